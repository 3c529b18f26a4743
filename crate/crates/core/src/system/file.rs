//! Line-oriented `key = value` system files.
//!
//! ```text
//! # first-order example
//! order = 1
//! coeff.1 = "(t+1)"
//! coeff.0 = "(t+2)"
//! t0 = 0
//! ic = [0]
//! domain = [-0.9, 10]
//! ```
//!
//! `ic` may be omitted, in which case the system is relaxed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};

use super::{Domain, LtvSystem};

fn file_err(line: usize, message: impl Into<String>) -> Error {
    Error::SystemFile {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_real(line: usize, key: &str, v: &str) -> Result<f64> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(file_err(
            line,
            format!("`{key}`: expected a real number, got `{}`", v.trim()),
        )),
    }
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    let v = v.trim();
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| file_err(line, format!("`{key}`: expected a list like [1, 2]")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| parse_real(line, key, x)).collect()
}

fn unquote(v: &str) -> &str {
    let v = v.trim();
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

/// Parse and validate a system file.
pub fn parse_system_file(text: &str) -> Result<LtvSystem> {
    let mut order: Option<(usize, usize)> = None;
    let mut coeffs: BTreeMap<usize, (usize, Expr)> = BTreeMap::new();
    let mut t0: Option<f64> = None;
    let mut ic: Option<(usize, Vec<f64>)> = None;
    let mut domain: Option<(usize, f64, f64)> = None;
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| file_err(line, "expected `key = value`"))?;
        let key = key.trim();
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(file_err(
                line,
                format!("duplicate key `{key}` (first on line {prev})"),
            ));
        }
        match key {
            "order" => {
                let n = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| file_err(line, "`order`: expected a non-negative integer"))?;
                order = Some((line, n));
            }
            "t0" => t0 = Some(parse_real(line, key, value)?),
            "ic" => ic = Some((line, parse_list(line, key, value)?)),
            "domain" => {
                let d = parse_list(line, key, value)?;
                if d.len() != 2 {
                    return Err(file_err(line, "`domain`: expected [lo, hi]"));
                }
                if d[0] > d[1] {
                    return Err(file_err(line, "`domain`: lo must not exceed hi"));
                }
                domain = Some((line, d[0], d[1]));
            }
            _ => {
                let Some(i) = key.strip_prefix("coeff.") else {
                    return Err(file_err(line, format!("unknown key `{key}`")));
                };
                let i: usize = i
                    .parse()
                    .map_err(|_| file_err(line, format!("bad coefficient index in `{key}`")))?;
                let src = unquote(value);
                let e = parse(src).map_err(|e| {
                    file_err(
                        line,
                        format!("`{key}`: {} (byte {} of \"{src}\")", e.kind, e.offset),
                    )
                })?;
                coeffs.insert(i, (line, e));
            }
        }
    }

    let (order_line, n) = order.ok_or_else(|| file_err(0, "missing key `order`"))?;
    let t0 = t0.ok_or_else(|| file_err(0, "missing key `t0`"))?;
    let (domain_line, lo, hi) = domain.ok_or_else(|| file_err(0, "missing key `domain`"))?;

    if coeffs.len() != n + 1 || coeffs.keys().any(|&i| i > n) {
        let bad = coeffs.iter().find(|(&i, _)| i > n).map(|(_, (l, _))| *l);
        return Err(file_err(
            bad.unwrap_or(order_line),
            format!(
                "order {n} needs coefficients coeff.0 ..= coeff.{n}, found {} coefficient(s)",
                coeffs.len()
            ),
        ));
    }
    let ic = match ic {
        Some((line, v)) if v.len() != n => {
            return Err(file_err(
                line,
                format!("order {n} needs {n} initial condition(s), got {}", v.len()),
            ))
        }
        Some((_, v)) => v,
        None => vec![0.0; n],
    };
    let domain = Domain::new(lo, hi).map_err(|e| file_err(domain_line, e.to_string()))?;
    if !domain.contains(t0) {
        return Err(file_err(
            domain_line,
            format!("t0 = {t0} lies outside [{lo}, {hi}]"),
        ));
    }
    let coeffs: Vec<Expr> = coeffs.into_values().map(|(_, e)| e).collect();
    LtvSystem::new(coeffs, t0, ic, domain)
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

/// Render a system in the file format. Reals use the shortest
/// representation that reads back to the same `f64`.
pub fn write_system_file(s: &LtvSystem) -> String {
    let mut out = String::new();
    let n = s.order();
    let _ = writeln!(out, "order = {n}");
    for i in (0..=n).rev() {
        let _ = writeln!(out, "coeff.{i} = \"{}\"", s.coeff(i));
    }
    let _ = writeln!(out, "t0 = {}", s.t0());
    let _ = writeln!(out, "ic = {}", list(s.initial_state()));
    let d = s.domain();
    let _ = writeln!(out, "domain = {}", list(&[d.lo, d.hi]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYSTEM_A: &str = r#"
# (t+1) y' + (t+2) y = x
order = 1
coeff.1 = "(t+1)"
coeff.0 = "(t+2)"   # trailing comment
t0 = 0
ic = [0]
domain = [-0.9, 10]
"#;

    #[test]
    fn loads_first_order_system() {
        let s = parse_system_file(SYSTEM_A).unwrap();
        assert_eq!(s.order(), 1);
        assert_eq!(s.t0(), 0.0);
        assert_eq!(s.coeff(1).eval(0.0).unwrap(), 1.0);
        assert_eq!(s.coeff(0).eval(1.0).unwrap(), 3.0);
        assert_eq!(s.domain(), Domain { lo: -0.9, hi: 10.0 });
    }

    #[test]
    fn loads_scalar_system() {
        let s = parse_system_file("order = 0\ncoeff.0 = \"5\"\nt0 = 0\ndomain = [0, 1]\n").unwrap();
        assert!(s.is_scalar());
        assert!(s.initial_state().is_empty());
    }

    #[test]
    fn rejects_vanishing_leading_coefficient() {
        let text = "order = 1\ncoeff.1 = \"t\"\ncoeff.0 = \"1\"\nt0 = -1\ndomain = [-1, 1]\n";
        let err = parse_system_file(text).unwrap_err();
        assert!(matches!(err, Error::InvalidSystem(_)), "{err:?}");
    }

    #[test]
    fn structural_errors_name_the_line() {
        let missing = "coeff.0 = \"1\"\nt0 = 0\ndomain = [0, 1]\n";
        assert!(parse_system_file(missing)
            .unwrap_err()
            .to_string()
            .contains("order"));

        let short = "order = 1\ncoeff.1 = \"1\"\nt0 = 0\ndomain = [0, 1]\n";
        assert!(matches!(
            parse_system_file(short),
            Err(Error::SystemFile { .. })
        ));

        let ic =
            "order = 1\ncoeff.1 = \"1\"\ncoeff.0 = \"1\"\nt0 = 0\nic = [1, 2]\ndomain = [0, 1]\n";
        assert!(matches!(
            parse_system_file(ic),
            Err(Error::SystemFile { line: 5, .. })
        ));

        let bad_expr = "order = 0\ncoeff.0 = \"t +* 1\"\nt0 = 0\ndomain = [0, 1]\n";
        let err = parse_system_file(bad_expr).unwrap_err();
        assert!(matches!(err, Error::SystemFile { line: 2, .. }), "{err:?}");
        assert!(err.to_string().contains("byte 3"), "{err}");

        let dup = "order = 0\norder = 0\n";
        assert!(matches!(
            parse_system_file(dup),
            Err(Error::SystemFile { line: 2, .. })
        ));

        let unknown = "order = 0\nfoo = 1\n";
        assert!(matches!(
            parse_system_file(unknown),
            Err(Error::SystemFile { line: 2, .. })
        ));

        let outside = "order = 0\ncoeff.0 = \"1\"\nt0 = 5\ndomain = [0, 1]\n";
        assert!(parse_system_file(outside).is_err());
    }

    #[test]
    fn write_then_read() {
        let s = parse_system_file(SYSTEM_A)
            .unwrap()
            .with_initial_state(0.25, vec![1.0 / 3.0])
            .unwrap();
        let back = parse_system_file(&write_system_file(&s)).unwrap();
        assert_eq!(back.order(), s.order());
        assert_eq!(back.t0(), s.t0());
        assert_eq!(back.initial_state(), s.initial_state());
        for i in 0..50 {
            let t = -0.9 + 0.2 * i as f64;
            assert_eq!(back.eval_coeffs(t).unwrap(), s.eval_coeffs(t).unwrap());
        }
    }
}
