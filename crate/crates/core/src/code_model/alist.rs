//! MacKay's alist interchange format.
//!
//! ```text
//! n m
//! max_var_degree max_check_degree
//! var degrees (n entries)
//! check degrees (m entries)
//! n lines: 1-indexed checks of each variable, zero padded
//! m lines: 1-indexed variables of each check, zero padded
//! ```

use super::TannerGraph;
use crate::error::{Error, Result};
use std::fmt::Write;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line as parsed integers, with its 1-based line number.
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, raw) in self.inner.by_ref() {
            self.last = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let nums = raw
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(idx + 1, format!("invalid integer {t:?} in {what}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, nums));
        }
        Err(parse_err(self.last + 1, format!("unexpected end of input, expected {what}")))
    }
}

/// Parses alist text into a canonical graph.
pub fn load_alist(text: &str) -> Result<TannerGraph> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };

    let (line, header) = lines.next_numbers("header")?;
    let [n, m] = header[..] else {
        return Err(parse_err(line, "malformed header, expected \"n m\""));
    };
    let (line, maxes) = lines.next_numbers("maximum degrees")?;
    let [max_var, max_check] = maxes[..] else {
        return Err(parse_err(line, "malformed header, expected maximum degrees"));
    };
    let (line, var_deg) = lines.next_numbers("variable degrees")?;
    if var_deg.len() != n {
        return Err(parse_err(line, format!("expected {n} variable degrees, got {}", var_deg.len())));
    }
    let (line, check_deg) = lines.next_numbers("check degrees")?;
    if check_deg.len() != m {
        return Err(parse_err(line, format!("expected {m} check degrees, got {}", check_deg.len())));
    }

    let mut var_lists = Vec::with_capacity(n);
    for v in 0..n {
        let (line, entries) = lines.next_numbers("variable neighbor list")?;
        let list = neighbor_list(line, &entries, m, var_deg[v], max_var)?;
        var_lists.push((line, list));
    }
    let mut checks = Vec::with_capacity(m);
    let mut check_lines = Vec::with_capacity(m);
    for c in 0..m {
        let (line, entries) = lines.next_numbers("check neighbor list")?;
        checks.push(neighbor_list(line, &entries, n, check_deg[c], max_check)?);
        check_lines.push(line);
    }

    for (c, vars) in checks.iter().enumerate() {
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(parse_err(check_lines[c], "repeated variable in check list"));
        }
        for &v in vars {
            if !var_lists[v].1.contains(&c) {
                return Err(parse_err(
                    check_lines[c],
                    format!("asymmetric adjacency: check {} lists variable {} but not vice versa", c + 1, v + 1),
                ));
            }
        }
    }
    for (v, (line, list)) in var_lists.iter().enumerate() {
        for &c in list {
            if !checks[c].contains(&v) {
                return Err(parse_err(
                    *line,
                    format!("asymmetric adjacency: variable {} lists check {} but not vice versa", v + 1, c + 1),
                ));
            }
        }
    }

    TannerGraph::from_check_neighbors(n, checks)
}

fn neighbor_list(
    line: usize,
    entries: &[usize],
    bound: usize,
    degree: usize,
    max_degree: usize,
) -> Result<Vec<usize>> {
    if entries.len() > max_degree.max(degree) {
        return Err(parse_err(line, "more entries than the maximum degree"));
    }
    let mut out = Vec::with_capacity(degree);
    for &e in entries {
        if e == 0 {
            continue;
        }
        if e > bound {
            return Err(parse_err(line, format!("index out of range: {e} > {bound}")));
        }
        out.push(e - 1);
    }
    if out.len() != degree {
        return Err(parse_err(
            line,
            format!("declared degree {degree} but {} nonzero entries", out.len()),
        ));
    }
    Ok(out)
}

/// Writes the graph in alist form: ascending 1-indexed lists, zero padded to
/// the maximum degree.
pub fn save_alist(g: &TannerGraph) -> String {
    let mut out = String::new();
    let max_var = g.max_var_degree();
    let max_check = g.max_check_degree();
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    let _ = writeln!(out, "{max_var} {max_check}");
    let join = |it: &mut dyn Iterator<Item = usize>| {
        it.map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{}", join(&mut (0..g.n()).map(|v| g.var_degree(v))));
    let _ = writeln!(out, "{}", join(&mut (0..g.m()).map(|c| g.check_degree(c))));
    for v in 0..g.n() {
        let list = g.var_neighbors(v);
        let padded = list.iter().map(|&c| c + 1).chain(std::iter::repeat(0).take(max_var - list.len()));
        let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
    }
    for c in 0..g.m() {
        let list = g.check_neighbors(c);
        let padded =
            list.iter().map(|&v| v + 1).chain(std::iter::repeat(0).take(max_check - list.len()));
        let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n";

    #[test]
    fn single_parity_check() {
        let g = load_alist(SINGLE).unwrap();
        assert_eq!((g.n(), g.m()), (3, 1));
        assert_eq!(g.check_neighbors(0), &[0, 1, 2]);
        assert!(save_alist(&g).starts_with("3 1\n"));
        assert_eq!(save_alist(&g), SINGLE);
    }

    #[test]
    fn zero_padding_is_ignored() {
        let text = "3 2\n2 3\n1 2 1\n3 1\n1 0\n1 2\n1 0\n1 2 3\n2 0 0\n";
        let g = load_alist(text).unwrap();
        assert_eq!(g.var_neighbors(1), &[0, 1]);
        assert_eq!(g.check_neighbors(1), &[1]);
        assert_eq!(load_alist(&save_alist(&g)).unwrap(), g);
    }

    #[test]
    fn index_out_of_range() {
        let text = "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 4\n";
        let err = load_alist(text).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 8);
                assert!(message.contains("index out of range"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_header_and_asymmetry() {
        assert!(matches!(load_alist("3\n"), Err(Error::Parse { line: 1, .. })));
        // variable 3 claims check 1, but check 1 lists only variables 1 and 2
        let text = "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 2\n";
        assert!(matches!(load_alist(text), Err(Error::Parse { line: 8, .. })));
        let text = "2 1\n1 2\n1 1\n1\n1\n1\n1 1\n";
        assert!(load_alist(text).is_err());
    }
}
