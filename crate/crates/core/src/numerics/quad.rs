//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};

/// Subdivision depth at which a panel is declared unconverged.
pub const MAX_DEPTH: u32 = 50;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrate a fallible integrand over `[a, b]` to absolute tolerance `tol`.
///
/// `a == b` returns 0, and `a > b` returns minus the integral over `[b, a]`.
/// Panels that reach [`MAX_DEPTH`] without meeting their share of the
/// tolerance make the whole call fail with the location of the worst one.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::invalid(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("quadrature bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_adaptive(f, b, a, tol).map(|v| -v);
    }

    let mut eval = |t: f64| -> Result<f64> {
        let v = f(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { t })
        }
    };

    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (eval(a)?, eval(m)?, eval(b)?);
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol,
        depth: 0,
    }];

    let mut total = 0.0;
    let mut compensation = 0.0;
    let mut worst: Option<(f64, f64)> = None;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let refined = left + right;
        let delta = refined - p.whole;
        // below this the difference is rounding noise
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        let accepted = delta.abs() <= 15.0 * p.tol.max(floor);
        if accepted || p.depth >= MAX_DEPTH {
            if !accepted {
                let excess = delta.abs() / (15.0 * p.tol);
                if worst.map_or(true, |(e, _)| excess > e) {
                    worst = Some((excess, m));
                }
            }
            // Kahan summation keeps many small panels from drifting
            let y = refined + delta / 15.0 - compensation;
            let s = total + y;
            compensation = (s - total) - y;
            total = s;
        } else {
            let half = 0.5 * p.tol;
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol: half,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol: half,
                depth: p.depth + 1,
            });
        }
    }

    match worst {
        Some((_, worst_t)) => Err(Error::QuadratureDiverged { a, b, worst_t }),
        None => Ok(total),
    }
}
