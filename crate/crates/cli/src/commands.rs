use crate::manifest::{manifest_path, sha256_hex, RunManifest};
use crate::sweep::parse_sweep;
use crate::*;
use errorfloor::code_design::{check_forbidden, peg_construct, ForbiddenPattern};
use errorfloor::code_model::{build_tanner_155, census_trapping_subgraphs, gf2_rank, load_alist, save_alist};
use errorfloor::fer::{fer_csv, mc_fer, predict_fer_awgn, predict_fer_bsc, prediction_csv, InstantonSpectrum, StopRule};
use errorfloor::instanton_search::{
    amoeba_iterative, critical_number_search, dedup, isa_multi_start, pcs_multi_start, read_jsonl, write_jsonl, AmoebaConfig,
};
use errorfloor::lp_decode::build_lclp;
use errorfloor::{Algorithm, ChannelModel, ConstructionConfig, Decoder, InstantonRecord, IterConfig, TannerGraph};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Instant;

/// Collects inputs and outputs of one invocation for the manifest.
struct Run<'a> {
    cli: &'a Cli,
    start: Instant,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
    seed: Option<u64>,
}

impl Run<'_> {
    fn load_code(&mut self, name: &str) -> Result<TannerGraph, CliError> {
        if name == "tanner155" {
            let g = build_tanner_155();
            self.inputs.insert("builtin:tanner155".into(), sha256_hex(save_alist(&g).as_bytes()));
            return Ok(g);
        }
        let bytes = self.read_input(name)?;
        let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{name}: not UTF-8 text")))?;
        load_alist(&text).map_err(|e| CliError::Input(format!("{name}: {e}")))
    }

    fn read_input(&mut self, path: &str) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        self.inputs.insert(path.to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    /// Writes `text` to `path`, or to stdout when there is no path.
    fn emit(&mut self, path: Option<&str>, text: &str) -> Result<(), CliError> {
        match path {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| CliError::Input(format!("{p}: {e}")))?;
                self.outputs.push(p.to_string());
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn finish(self) -> Result<(), CliError> {
        if self.outputs.is_empty() {
            return Ok(());
        }
        let manifest = RunManifest {
            command: std::env::args().collect::<Vec<_>>().join(" "),
            config: serde_json::to_value(self.cli).expect("arguments serialize"),
            seed: self.seed,
            toolkit_version: env!("CARGO_PKG_VERSION"),
            input_hashes: self.inputs,
            wall_time_s: self.start.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        for out in &self.outputs {
            std::fs::write(manifest_path(out), &text)?;
        }
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut run = Run { cli, start: Instant::now(), inputs: BTreeMap::new(), outputs: Vec::new(), seed: None };
    match &cli.command {
        Command::GraphInfo(a) => graph_info(&mut run, a)?,
        Command::Census(a) => census(&mut run, a)?,
        Command::Search(a) => search(&mut run, a)?,
        Command::Fer(a) => fer(&mut run, a)?,
        Command::Predict(a) => predict(&mut run, a)?,
        Command::Construct(a) => construct(&mut run, a)?,
    }
    run.finish()
}

fn profile(degrees: impl Iterator<Item = usize>) -> String {
    let mut h = BTreeMap::new();
    for d in degrees {
        *h.entry(d).or_insert(0usize) += 1;
    }
    h.iter().map(|(d, c)| format!("{d}:{c}")).collect::<Vec<_>>().join(",")
}

fn graph_info(run: &mut Run, a: &GraphInfoArgs) -> Result<(), CliError> {
    let g = run.load_code(&a.code)?;
    let rank = gf2_rank(&g);
    let girth = g.girth().map_or("inf".to_string(), |x| x.to_string());
    let rate = (g.n() - rank) as f64 / g.n() as f64;
    let text = format!(
        "n={} m={} girth={girth} rank={rank} rate={rate:.4}\nvariable_degrees={}\ncheck_degrees={}\n",
        g.n(),
        g.m(),
        profile((0..g.n()).map(|v| g.var_degree(v))),
        profile((0..g.m()).map(|c| g.check_degree(c))),
    );
    run.emit(a.out.as_deref(), &text)
}

fn census(run: &mut Run, a: &CensusArgs) -> Result<(), CliError> {
    let g = run.load_code(&a.code)?;
    if a.a == 0 {
        return Err(CliError::Usage("--a must be positive".into()));
    }
    let class = census_trapping_subgraphs(&g, a.a, a.b);
    let text = serde_json::to_string(&class).expect("census serializes") + "\n";
    run.emit(a.out.as_deref(), &text)
}

fn iterative_config(name: &str, iterations: usize) -> Result<IterConfig, CliError> {
    let alg: Algorithm = name.parse().map_err(|e: errorfloor::Error| CliError::Usage(e.to_string()))?;
    Ok(IterConfig::new(alg, iterations))
}

fn search(run: &mut Run, a: &SearchArgs) -> Result<(), CliError> {
    let g = run.load_code(&a.code)?;
    run.seed = Some(a.seed);
    if a.trials == 0 && a.method != Method::Critical {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let results: Vec<errorfloor::Result<InstantonRecord>> = match a.method {
        Method::Isa => isa_multi_start(&build_lclp(&g)?, a.flips, a.trials, a.seed),
        Method::Pcs => pcs_multi_start(&build_lclp(&g)?, a.noise_strength, a.trials, a.seed),
        Method::Amoeba => amoeba_runs(&g, a)?,
        Method::Critical => return critical(run, &g, a),
    };
    let mut records = Vec::new();
    let mut first_error = None;
    for r in results {
        match r {
            Ok(r) => records.push(r),
            Err(e) => {
                log::warn!("run failed: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    if records.is_empty() {
        return Err(first_error.map_or(CliError::Algorithm("no runs".into()), CliError::from));
    }
    let failures = a.trials - records.len();
    let mut jsonl = Vec::new();
    write_jsonl(&records, &mut jsonl)?;
    run.emit(a.out.as_deref(), std::str::from_utf8(&jsonl).expect("JSON is UTF-8"))?;

    let hist = histogram(&records, a.method == Method::Isa);
    match &a.out {
        Some(out) => run.emit(Some(&format!("{out}.hist.csv")), &hist)?,
        None => eprint!("{hist}"),
    }
    eprintln!("runs={} failures={failures} unique={}", a.trials, dedup(&records).len());
    Ok(())
}

/// `weight,runs,unique` rows; ISA bins by support size, other methods by
/// weight rounded to four decimals.
fn histogram(records: &[InstantonRecord], integral: bool) -> String {
    let key = |r: &InstantonRecord| if integral { format!("{}", r.weight.round() as u64) } else { format!("{:.4}", r.weight) };
    let mut bins: BTreeMap<(u64, String), (usize, usize)> = BTreeMap::new();
    let order = |r: &InstantonRecord| (r.weight * 1e4).round() as u64;
    for r in records {
        bins.entry((order(r), key(r))).or_default().0 += 1;
    }
    for r in dedup(records) {
        bins.entry((order(&r), key(&r))).or_default().1 += 1;
    }
    let mut s = String::from("weight,runs,unique\n");
    for ((_, k), (runs, unique)) in bins {
        s.push_str(&format!("{k},{runs},{unique}\n"));
    }
    s
}

fn amoeba_runs(g: &TannerGraph, a: &SearchArgs) -> Result<Vec<errorfloor::Result<InstantonRecord>>, CliError> {
    let name = a.decoder.as_deref().unwrap_or("min-sum");
    let rate = (g.n() - gf2_rank(g)) as f64 / g.n() as f64;
    let channel = ChannelModel::awgn_from_ebn0_db(a.snr_db, rate)?;
    let cfg = AmoebaConfig { max_iterations: a.amoeba_iterations, ..AmoebaConfig::default() };
    let lp;
    let iter_cfg;
    let dec = if name == "lp" {
        lp = build_lclp(g)?;
        Decoder::Lp(&lp)
    } else {
        iter_cfg = iterative_config(name, a.iterations)?;
        if iter_cfg.algorithm.is_hard_decision() {
            return Err(CliError::Usage("amoeba needs a soft decoder (bp, min-sum or lp)".into()));
        }
        Decoder::Iterative { graph: g, cfg: &iter_cfg, channel }
    };
    Ok((0..a.trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = a.seed.wrapping_add(k);
            amoeba_iterative(&dec, &cfg, &mut errorfloor::seeded_rng(seed), None).map(|mut r| {
                r.search.seed = Some(seed);
                r
            })
        })
        .collect())
}

#[derive(serde::Serialize)]
struct CriticalLine {
    set: Vec<usize>,
    value: Option<usize>,
    witness: Option<Vec<usize>>,
    lower_bound: usize,
}

fn critical(run: &mut Run, g: &TannerGraph, a: &SearchArgs) -> Result<(), CliError> {
    let cfg = iterative_config(a.decoder.as_deref().unwrap_or("gallager-a"), a.iterations)?;
    if !cfg.algorithm.is_hard_decision() {
        return Err(CliError::Usage("critical numbers need gallager-a or gallager-b".into()));
    }
    let class = census_trapping_subgraphs(g, a.a, a.b);
    let mut sets = class.members;
    if a.trials > 0 && a.trials < sets.len() {
        let mut rng = errorfloor::seeded_rng(a.seed);
        let mut picked = rand::seq::index::sample(&mut rng, sets.len(), a.trials).into_vec();
        picked.sort_unstable();
        sets = picked.into_iter().map(|i| sets[i].clone()).collect();
    }
    let lines: Vec<errorfloor::Result<CriticalLine>> = sets
        .par_iter()
        .map(|s| {
            critical_number_search(g, s, &cfg, a.size_cap).map(|c| CriticalLine {
                set: s.clone(),
                value: c.value,
                witness: c.witness.map(|w| w.support().to_vec()),
                lower_bound: c.lower_bound,
            })
        })
        .collect();
    let mut jsonl = String::new();
    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    for l in lines {
        let l = l?;
        *hist.entry(l.value.map_or("none".into(), |v| v.to_string())).or_default() += 1;
        jsonl.push_str(&serde_json::to_string(&l).expect("serializes"));
        jsonl.push('\n');
    }
    run.emit(a.out.as_deref(), &jsonl)?;
    let mut csv = String::from("critical_number,count\n");
    for (k, c) in hist {
        csv.push_str(&format!("{k},{c}\n"));
    }
    match &a.out {
        Some(out) => run.emit(Some(&format!("{out}.hist.csv")), &csv),
        None => {
            eprint!("{csv}");
            Ok(())
        }
    }
}

/// Channel points of a sweep as (reported parameter, channel model).
fn channel_points(channel: &str, eps: Option<&str>, snr_db: Option<&str>, rate: f64) -> Result<Vec<(f64, ChannelModel)>, CliError> {
    match (channel, eps, snr_db) {
        ("bsc", Some(s), None) => parse_sweep(s)?.into_iter().map(|e| Ok((e, ChannelModel::bsc(e)?))).collect(),
        ("awgn", None, Some(s)) => parse_sweep(s)?.into_iter().map(|d| Ok((d, ChannelModel::awgn_from_ebn0_db(d, rate)?))).collect(),
        ("bsc", ..) => Err(CliError::Usage("bsc needs --eps and no --snr-db".into())),
        _ => Err(CliError::Usage("awgn needs --snr-db and no --eps".into())),
    }
}

fn fer(run: &mut Run, a: &FerArgs) -> Result<(), CliError> {
    let g = run.load_code(&a.code)?;
    run.seed = Some(a.seed);
    let rate = (g.n() - gf2_rank(&g)) as f64 / g.n() as f64;
    let points = channel_points(&a.channel, a.eps.as_deref(), a.snr_db.as_deref(), rate)?;
    let stop = StopRule { min_errors: a.min_errors, max_frames: a.max_frames };
    let lp = if a.decoder == "lp" { Some(build_lclp(&g)?) } else { None };
    let iter_cfg = if lp.is_none() { Some(iterative_config(&a.decoder, a.iterations)?) } else { None };
    let mut rows = Vec::new();
    for (k, (param, channel)) in points.into_iter().enumerate() {
        let dec = match (&lp, &iter_cfg) {
            (Some(inst), _) => Decoder::Lp(inst),
            (None, Some(cfg)) => Decoder::Iterative { graph: &g, cfg, channel },
            _ => unreachable!(),
        };
        let mut p = mc_fer(&dec, &channel, g.n(), stop, a.seed.wrapping_add(k as u64))?;
        p.param = param;
        log::info!("param={param} frames={} errors={}", p.frames, p.errors);
        rows.push(p);
    }
    run.emit(a.out.as_deref(), &fer_csv(&rows))
}

fn load_spectrum(run: &mut Run, path: &str) -> Result<InstantonSpectrum, CliError> {
    let bytes = run.read_input(path)?;
    if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        return Ok(InstantonSpectrum::from_records(&read_jsonl(&bytes[..])?)?);
    }
    let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{path}: not UTF-8 text")))?;
    let mut entries = Vec::new();
    for (k, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = line.split_once(',').and_then(|(w, c)| Some((w.trim().parse::<f64>().ok()?, c.trim().parse::<u64>().ok()?)));
        entries.push(parsed.ok_or_else(|| CliError::Input(format!("{path}:{}: expected weight,count", k + 1)))?);
    }
    Ok(InstantonSpectrum::new(entries)?)
}

fn predict(run: &mut Run, a: &PredictArgs) -> Result<(), CliError> {
    let spectrum = load_spectrum(run, &a.spectrum)?;
    let g = run.load_code(&a.code)?;
    let rate = (g.n() - gf2_rank(&g)) as f64 / g.n() as f64;
    let points = channel_points(&a.channel, a.eps.as_deref(), a.snr_db.as_deref(), rate)?;
    let curve = if a.channel == "bsc" {
        let eps: Vec<f64> = points.iter().map(|(p, _)| *p).collect();
        predict_fer_bsc(&spectrum, g.n(), &eps)?
    } else {
        let sigmas: Vec<f64> = points
            .iter()
            .map(|(_, c)| match c {
                ChannelModel::Awgn { sigma } => *sigma,
                ChannelModel::Bsc { .. } => unreachable!(),
            })
            .collect();
        let fer = predict_fer_awgn(&spectrum, &sigmas)?;
        points.iter().zip(fer).map(|((d, _), (_, f))| (*d, f)).collect()
    };
    run.emit(a.out.as_deref(), &prediction_csv(&curve))
}

fn parse_forbidden(spec: &str) -> Result<Vec<ForbiddenPattern>, CliError> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let s = s.trim();
            if let Some(g) = s.strip_prefix("cycles<") {
                let g = g.parse().map_err(|_| CliError::Usage(format!("bad cycle bound {s:?}")))?;
                Ok(ForbiddenPattern::cycles_shorter_than(g).map_err(|e| CliError::Usage(e.to_string()))?)
            } else if s == "ts53" {
                Ok(ForbiddenPattern::tanner_53())
            } else {
                Err(CliError::Usage(format!("unknown pattern {s:?} (use cycles<G or ts53)")))
            }
        })
        .collect()
}

fn construct(run: &mut Run, a: &ConstructArgs) -> Result<(), CliError> {
    let forbidden = parse_forbidden(&a.forbid)?;
    run.seed = Some(a.seed);
    let cfg = ConstructionConfig { max_backtracks: a.max_backtracks, ..ConstructionConfig::new(a.n, a.dv, a.m, a.seed) };
    let (g, log) = peg_construct(&cfg, &forbidden, &mut errorfloor::seeded_rng(a.seed))?;
    debug_assert!(forbidden.iter().all(|p| check_forbidden(&g, p).is_empty()));
    run.emit(Some(&a.out), &save_alist(&g))?;
    let log_text = serde_json::to_string_pretty(&log).expect("log serializes") + "\n";
    run.emit(Some(&format!("{}.log.json", a.out)), &log_text)?;
    eprintln!("girth={} backtracks={}", g.girth().map_or("inf".into(), |x| x.to_string()), log.backtracks.len());
    Ok(())
}
