//! Parameter sweeps: comma-separated values or `lo:hi:step` ranges.

use crate::CliError;

pub fn parse_sweep(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: &str| CliError::Usage(format!("bad sweep {spec:?}: {m}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let mut out = Vec::new();
    for part in spec.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [v] => out.push(num(v)?),
            [lo, hi, step] => {
                let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
                if !(step > 0.0) || hi < lo {
                    return Err(bad("need lo <= hi and step > 0"));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|k| lo + k as f64 * step));
            }
            _ => return Err(bad("expected value or lo:hi:step")),
        }
    }
    if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
        return Err(bad("empty or non-finite"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_sweep("0.03").unwrap(), vec![0.03]);
        let r = parse_sweep("1:2:0.5").unwrap();
        assert_eq!(r, vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_sweep("0.015,0.02,0.03").unwrap().len(), 3);
        assert_eq!(parse_sweep("0.01:0.03:0.01").unwrap().len(), 3);
        assert!(parse_sweep("2:1:0.5").is_err());
        assert!(parse_sweep("a").is_err());
        assert!(parse_sweep("1:2").is_err());
    }
}
