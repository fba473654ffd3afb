//! Nelder-Mead search over noise directions on the error surface.

use super::{Attribution, ChannelKind, Decoder, InstantonRecord, Representation, SearchInfo, SearchParams, DELTA};
use crate::error::{Error, Result};
use crate::iter_decode::{extract_trapping_set, DEFAULT_WINDOW};
use crate::channel::LlrVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const TAU_SURF: f64 = 1e-6;
pub const TAU_STOP: f64 = 1e-4;
pub const SCALE_CAP: f64 = 20.0;
const REBRACKET_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct AmoebaConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when every vertex direction is within this distance of the best.
    pub tau_stop: f64,
    pub tau_surf: f64,
    /// Optimize only over these bits; all other noise stays zero.
    pub support: Option<Vec<usize>>,
    /// Cap on Nelder-Mead iterations.
    pub max_iterations: usize,
    /// Step used to spread the starting simplex around a seed point.
    pub seed_spread: f64,
}

impl Default for AmoebaConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tau_stop: TAU_STOP,
            tau_surf: TAU_SURF,
            support: None,
            max_iterations: 2000,
            seed_spread: 0.3,
        }
    }
}

impl AmoebaConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.reflection, self.expansion, self.contraction, self.shrink, self.tau_stop, self.tau_surf, self.seed_spread];
        if all.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("amoeba coefficients and tolerances must be positive".into()));
        }
        if self.contraction >= 1.0 || self.shrink >= 1.0 || self.expansion <= 1.0 {
            return Err(Error::InvalidParameter("need contraction, shrink < 1 < expansion".into()));
        }
        Ok(())
    }
}

/// A bracketed crossing of the error surface along a unit direction `u`:
/// decoding `1 - lo·u` succeeds and `1 - hi·u` fails, with `hi / lo <= 1 + tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub scale: f64,
    pub lo: f64,
    pub hi: f64,
}

fn output(direction: &[f64], s: f64) -> Vec<f64> {
    direction.iter().map(|u| 1.0 - s * u).collect()
}

/// Finds the scale at which the noise `s·direction` crosses the error
/// surface, by doubling from 1 up to the cap and then bisecting.
///
/// The returned `scale` satisfies: decoding fails at `(1 + δ)·scale` and
/// succeeds at `(1 - δ)·scale`; both points are decoded explicitly.
pub fn scale_to_error_surface(dec: &Decoder, direction: &[f64], tau_surf: f64) -> Result<SurfacePoint> {
    let norm: f64 = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("direction norm {norm} is not 1")));
    }
    let fails = |s: f64| dec.fails_awgn(&output(direction, s));
    if fails(0.0)? {
        return Err(Error::InvalidParameter("decoder fails on the noiseless output".into()));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !fails(hi)? {
        lo = hi;
        if hi >= SCALE_CAP {
            return Err(Error::NoFailureBelowCap(SCALE_CAP));
        }
        hi = (2.0 * hi).min(SCALE_CAP);
    }
    for _ in 0..REBRACKET_CAP {
        let tol = tau_surf.min(DELTA);
        while hi - lo > tol * hi {
            let mid = 0.5 * (lo + hi);
            if fails(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let scale = hi / (1.0 + DELTA);
        let below = scale * (1.0 - DELTA);
        if !fails(below)? {
            return Ok(SurfacePoint { scale, lo: below, hi });
        }
        // Failure below the bracket: the surface is not monotone here, so
        // look for the crossing under `below` instead.
        hi = below;
        lo = 0.0;
    }
    Err(Error::NotConverged { steps: REBRACKET_CAP })
}

struct Objective<'a> {
    dec: &'a Decoder<'a>,
    n: usize,
    support: Vec<usize>,
    tau_surf: f64,
}

impl Objective<'_> {
    fn embed(&self, x: &[f64]) -> Option<Vec<f64>> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        let mut u = vec![0.0; self.n];
        for (k, &i) in self.support.iter().enumerate() {
            u[i] = x[k] / norm;
        }
        Some(u)
    }

    /// Squared noise norm at the error surface; infinite where no failure is found.
    fn eval(&self, x: &[f64]) -> Result<(f64, Option<SurfacePoint>)> {
        let Some(u) = self.embed(x) else {
            return Ok((f64::INFINITY, None));
        };
        match scale_to_error_surface(self.dec, &u, self.tau_surf) {
            Ok(sp) => Ok((sp.scale * sp.scale, Some(sp))),
            Err(Error::NoFailureBelowCap(_)) | Err(Error::NotConverged { .. }) => Ok((f64::INFINITY, None)),
            Err(e) => Err(e),
        }
    }
}

fn unit(x: &[f64]) -> Vec<f64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / norm).collect()
}

/// Nelder-Mead minimization of the squared surface distance over noise
/// directions. Optionally starts around `seed_point` and restricted to
/// `cfg.support`.
pub fn amoeba_iterative<R: Rng + ?Sized>(
    dec: &Decoder,
    cfg: &AmoebaConfig,
    rng: &mut R,
    seed_point: Option<&[f64]>,
) -> Result<InstantonRecord> {
    cfg.validate()?;
    let n = dec.n();
    let support: Vec<usize> = match &cfg.support {
        Some(s) => {
            if s.is_empty() || s.iter().any(|&i| i >= n) {
                return Err(Error::InvalidParameter("support must be a nonempty set of bit indices".into()));
            }
            s.clone()
        }
        None => (0..n).collect(),
    };
    let k = support.len();
    let obj = Objective { dec, n, support: support.clone(), tau_surf: cfg.tau_surf };
    let gauss = |rng: &mut R| -> Vec<f64> { (0..k).map(|_| StandardNormal.sample(rng)).collect() };

    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    match seed_point {
        Some(sp) => {
            crate::error::expect_len(n, sp.len())?;
            let base: Vec<f64> = support.iter().map(|&i| sp[i]).collect();
            if base.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidParameter("seed point vanishes on the support".into()));
            }
            let base = unit(&base);
            vertices.push(base.clone());
            for _ in 0..k {
                let g = unit(&gauss(rng));
                vertices.push(unit(&base.iter().zip(&g).map(|(b, d)| b + cfg.seed_spread * d).collect::<Vec<_>>()));
            }
        }
        None => {
            for _ in 0..=k {
                vertices.push(unit(&gauss(rng)));
            }
        }
    }
    let mut values = Vec::with_capacity(k + 1);
    for v in &vertices {
        values.push(obj.eval(v)?.0);
    }
    if values.iter().all(|v| v.is_infinite()) {
        return Err(Error::NoFailureBelowCap(SCALE_CAP));
    }

    let mut trajectory = Vec::new();
    let mut iterations = 0;
    loop {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        vertices = order.iter().map(|&i| vertices[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        // Vertices are compared as unit directions.
        let best = unit(&vertices[0]);
        trajectory.push(values[0]);
        let diameter = vertices[1..]
            .iter()
            .map(|v| unit(v).iter().zip(&best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < cfg.tau_stop || iterations >= cfg.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; k];
        for v in &vertices[..k] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / k as f64;
            }
        }
        let worst = vertices[k].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(cfg.reflection);
        let (fr, _) = obj.eval(&xr)?;
        if fr < values[0] {
            let xe = along(cfg.reflection * cfg.expansion);
            let (fe, _) = obj.eval(&xe)?;
            if fe < fr {
                vertices[k] = xe;
                values[k] = fe;
            } else {
                vertices[k] = xr;
                values[k] = fr;
            }
            continue;
        }
        if fr < values[k - 1] {
            vertices[k] = xr;
            values[k] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[k] {
            let x = along(cfg.reflection * cfg.contraction);
            let f = obj.eval(&x)?.0;
            (x, f)
        } else {
            let x = along(-cfg.contraction);
            let f = obj.eval(&x)?.0;
            (x, f)
        };
        if fc < values[k].min(fr) {
            vertices[k] = xc;
            values[k] = fc;
            continue;
        }
        for i in 1..=k {
            let shrunk: Vec<f64> = vertices[0].iter().zip(&vertices[i]).map(|(b, v)| b + cfg.shrink * (v - b)).collect();
            values[i] = obj.eval(&shrunk)?.0;
            vertices[i] = shrunk;
        }
    }

    let u = obj.embed(&vertices[0]).expect("finite best vertex");
    let (_, sp) = obj.eval(&vertices[0])?;
    let sp = sp.ok_or(Error::NoFailureBelowCap(SCALE_CAP))?;
    let noise: Vec<f64> = u.iter().map(|x| x * sp.scale).collect();
    let attribution = match dec {
        Decoder::Iterative { graph, cfg: icfg, channel } => {
            let scale = match channel {
                crate::channel::ChannelModel::Awgn { sigma } => 2.0 / (sigma * sigma),
                crate::channel::ChannelModel::Bsc { .. } => 1.0,
            };
            let yhat: Vec<f64> = output(&u, sp.hi).iter().map(|v| v * scale).collect();
            let trace = icfg.decode_llr(graph, &LlrVector::new(yhat)?)?;
            extract_trapping_set(&trace, graph, DEFAULT_WINDOW).map(Attribution::TrappingSet).unwrap_or(Attribution::None)
        }
        Decoder::Lp(inst) => {
            let p = inst.solve(&LlrVector::new(output(&u, sp.hi))?)?.pseudo_codeword;
            Attribution::PseudoCodeword(p)
        }
    };
    Ok(InstantonRecord {
        channel: ChannelKind::Awgn,
        decoder: dec.name().into(),
        weight: noise.iter().map(|x| x * x).sum(),
        representation: Representation::Noise(noise),
        attribution,
        search: SearchInfo {
            method: "amoeba".into(),
            seed: None,
            steps: iterations,
            weight_trajectory: trajectory,
            params: SearchParams { tau_surf: cfg.tau_surf, tau_stop: cfg.tau_stop, ..SearchParams::default() },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelModel;
    use crate::code_model::TannerGraph;
    use crate::iter_decode::IterConfig;

    fn toy() -> TannerGraph {
        TannerGraph::from_check_neighbors(3, vec![vec![0, 1, 2]]).unwrap()
    }

    /// Min-sum on one check: bit 0 decides 1 once its own LLR turns
    /// nonpositive, since the extrinsic check message is +min of the others.
    /// With D = 1 and noise on bit 0 only, its total is `y0 + min(y1, y2) = 2 - s`.
    #[test]
    fn single_bit_direction_min_sum() {
        let g = toy();
        let cfg = IterConfig::min_sum(1);
        let dec = Decoder::Iterative { graph: &g, cfg: &cfg, channel: ChannelModel::awgn(1.0).unwrap() };
        let sp = scale_to_error_surface(&dec, &[1.0, 0.0, 0.0], TAU_SURF).unwrap();
        assert!((sp.scale - 2.0).abs() < 1e-5, "{sp:?}");
        assert!(!dec.fails_awgn(&output(&[1.0, 0.0, 0.0], sp.scale * (1.0 - DELTA))).unwrap());
        assert!(dec.fails_awgn(&output(&[1.0, 0.0, 0.0], sp.scale * (1.0 + DELTA))).unwrap());
    }

    /// BP on one check with D >= 1: bit 0 has posterior
    /// `L0 + 2 atanh(tanh(L/2)^2)` with channel LLRs `L = 2/σ²` on the clean
    /// bits and `L0 = 2(1 - s)/σ²`, crossing zero at
    /// `s* = 1 + σ² atanh(tanh(1/σ²)²)`.
    #[test]
    fn single_bit_direction_bp() {
        let g = toy();
        let sigma: f64 = 0.8;
        let cfg = IterConfig::bp(3);
        let dec = Decoder::Iterative { graph: &g, cfg: &cfg, channel: ChannelModel::awgn(sigma).unwrap() };
        let sp = scale_to_error_surface(&dec, &[1.0, 0.0, 0.0], TAU_SURF).unwrap();
        let s2 = sigma * sigma;
        let t = (1.0 / s2).tanh();
        let expected = 1.0 + s2 * (t * t).atanh();
        assert!((sp.scale - expected).abs() < 1e-5, "{} vs {expected}", sp.scale);
    }

    /// LP on one check: failure iff the cheapest local codeword has
    /// nonpositive cost, i.e. `(1 - s) + 1 <= 0` along bit 0.
    #[test]
    fn lp_direction_and_refinement() {
        let g = toy();
        let inst = crate::lp_decode::build_lclp(&g).unwrap();
        let dec = Decoder::Lp(&inst);
        let a = scale_to_error_surface(&dec, &[1.0, 0.0, 0.0], 1e-4).unwrap();
        let b = scale_to_error_surface(&dec, &[1.0, 0.0, 0.0], 1e-6).unwrap();
        assert!((a.scale - 2.0).abs() < 1e-5 && (b.scale - 2.0).abs() < 1e-5);
        assert!((a.scale - b.scale).abs() <= 1e-6 * 2.0 + 1e-12);
    }

    #[test]
    fn no_failure_below_cap() {
        let g = toy();
        let cfg = IterConfig::min_sum(1);
        let dec = Decoder::Iterative { graph: &g, cfg: &cfg, channel: ChannelModel::awgn(1.0).unwrap() };
        // Negative noise only pushes the output away from the boundary.
        let d = [-1.0 / 3f64.sqrt(); 3];
        assert!(matches!(scale_to_error_surface(&dec, &d, TAU_SURF), Err(Error::NoFailureBelowCap(_))));
    }

    #[test]
    fn amoeba_on_toy_code() {
        let g = toy();
        let cfg = IterConfig::min_sum(2);
        let dec = Decoder::Iterative { graph: &g, cfg: &cfg, channel: ChannelModel::awgn(1.0).unwrap() };
        let rec = amoeba_iterative(&dec, &AmoebaConfig::default(), &mut crate::seeded_rng(5), None).unwrap();
        assert!(rec.weight_consistent());
        let t = &rec.search.weight_trajectory;
        assert!(t.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        // The closest failure is y0 = y1 = 0, noise (1, 1, 0) of weight 2.
        assert!(rec.weight <= 2.05, "{}", rec.weight);
    }
}
