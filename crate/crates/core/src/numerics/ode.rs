//! Dormand-Prince 5(4) integrator with step rejection.
//!
//! Accepted steps are stored as cubic Hermite samples plus the quartic term
//! that upgrades the cubic to the method's fourth-order continuous
//! extension. Besides the usual embedded local-error estimate, each step is
//! also checked on that quartic term: it is the gap between the cubic and
//! the extension at the step midpoint, so even the bare cubic stays within
//! the requested tolerance.

use crate::error::{Error, Result};
use crate::expr::Expr;

use super::Trajectory;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_STEPS: usize = 2_000_000;

/// Leading coefficients with `|a_n| <= LEADING_GUARD * max_i |a_i|` are
/// treated as vanishing.
pub const LEADING_GUARD: f64 = 1e-12;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

#[derive(Debug, Clone)]
pub struct OdeOptions {
    /// Mixed absolute/relative tolerance.
    pub tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Times the integrator must land on exactly.
    pub stops: Vec<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            tol: DEFAULT_TOL,
            max_step: f64::INFINITY,
            max_steps: DEFAULT_MAX_STEPS,
            stops: Vec::new(),
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            tol,
            ..Default::default()
        }
    }

    pub fn stops(mut self, stops: &[f64]) -> Self {
        self.stops = stops.to_vec();
        self
    }
}

fn scaled_norm(v: &[f64], y0: &[f64], y1: &[f64], tol: f64) -> f64 {
    let n = v.len() as f64;
    let sum: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = tol + tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrate `sys` forward from `t0` to `t_end`.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::invalid(format!(
            "initial state has length {}, system dimension is {n}",
            y0.len()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("ODE tolerance must be positive"));
    }
    if !(t_end >= t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::invalid(format!(
            "integration span [{t0}, {t_end}] is not forward"
        )));
    }
    let tol = opts.tol;

    let mut stops: Vec<f64> = opts
        .stops
        .iter()
        .copied()
        .filter(|&s| s > t0 && s < t_end)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t_end);
    let mut next_stop = 0usize;

    let mut traj = Trajectory::new(n, tol);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; n];
    sys.rhs(t, &y, &mut f)?;
    let mut corr = vec![0.0; n];
    traj.push(t, &y, &f, &corr);
    if t_end == t0 {
        return Ok(traj);
    }

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut dense = vec![0.0; n];

    let mut h = initial_step(sys, t, &y, &f, tol, t_end - t0)?.min(opts.max_step);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while next_stop < stops.len() {
        let target = stops[next_stop];
        let remaining = target - t;
        let proposed = h;
        let mut landing = false;
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
            landing = true;
        } else if h > 0.5 * remaining && h < remaining {
            // two comparable steps beat one long and one tiny
            h = 0.5 * remaining;
        }

        let min_step = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < min_step {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::TooManySteps {
                t,
                max_steps: opts.max_steps,
            });
        }

        k[0].copy_from_slice(&f);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let ts = if s >= 5 { t + h } else { t + C[s] * h };
            if s == 6 {
                ynew.copy_from_slice(&ytmp);
            }
            sys.rhs(ts, &ytmp, &mut k[s])?;
        }
        // stage 7 is evaluated at the new point (FSAL)
        for i in 0..n {
            err[i] = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            dense[i] = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>() / 16.0;
        }
        let err_step = scaled_norm(&err, &y, &ynew, tol);
        let err_interp = scaled_norm(&dense, &y, &ynew, tol);

        if !err_step.is_finite() || !err_interp.is_finite() {
            h *= 0.2;
            last_rejected = true;
            continue;
        }

        let fac_step = 0.9 * err_step.max(1e-10).powf(-0.2);
        let fac_interp = 0.9 * err_interp.max(1e-10).powf(-0.25);
        let fac = fac_step.min(fac_interp);

        if err_step <= 1.0 && err_interp <= 1.0 {
            t = if landing { target } else { t + h };
            y.copy_from_slice(&ynew);
            f.copy_from_slice(&k[6]);
            for (c, d) in corr.iter_mut().zip(&dense) {
                *c = 16.0 * d;
            }
            traj.push(t, &y, &f, &corr);
            if landing {
                next_stop += 1;
            }
            let grow = if last_rejected { 1.0 } else { 5.0 };
            h = h * fac.clamp(0.2, grow);
            if landing {
                // a clipped step says nothing about the natural step size
                h = h.max(proposed.min(h * 5.0));
            }
            h = h.min(opts.max_step);
            last_rejected = false;
        } else {
            h *= fac.clamp(0.1, 0.9);
            last_rejected = true;
        }
    }
    Ok(traj)
}

fn initial_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    f: &[f64],
    tol: f64,
    span: f64,
) -> Result<f64> {
    let d0 = scaled_norm(y, y, y, tol);
    let d1 = scaled_norm(f, y, y, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f).map(|(yi, fi)| yi + h0 * fi).collect();
    let mut f1 = vec![0.0; y.len()];
    sys.rhs(t + h0, &y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, y, y, tol) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

/// `sum_i a_i(t) y^(i) = u(t)` in companion form `[y, y', ..., y^(n-1)]`.
pub struct LinearOde<'a, F> {
    coeffs: &'a [Expr],
    forcing: F,
}

impl<'a, F: Fn(f64) -> f64> LinearOde<'a, F> {
    /// `coeffs[i]` multiplies the i-th derivative; order is `coeffs.len() - 1 >= 1`.
    pub fn new(coeffs: &'a [Expr], forcing: F) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::OrderMismatch {
                expected: ">= 1".into(),
                found: coeffs.len().saturating_sub(1),
            });
        }
        Ok(LinearOde { coeffs, forcing })
    }
}

/// Highest derivative from the lower ones: `(u - sum_{i<n} a_i y^(i)) / a_n`.
pub(crate) fn highest_derivative(coeffs: &[Expr], t: f64, y: &[f64], u: f64) -> Result<f64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].eval(t)?;
    let mut scale = lead.abs();
    let mut acc = u;
    for (i, c) in coeffs[..n].iter().enumerate() {
        let a = c.eval(t)?;
        scale = scale.max(a.abs());
        acc -= a * y[i];
    }
    if lead.abs() <= LEADING_GUARD * scale {
        return Err(Error::LeadingCoefficientVanishes { t, value: lead });
    }
    Ok(acc / lead)
}

impl<F: Fn(f64) -> f64> OdeSystem for LinearOde<'_, F> {
    fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.dim();
        dy[..n - 1].copy_from_slice(&y[1..n]);
        dy[n - 1] = highest_derivative(self.coeffs, t, y, (self.forcing)(t))?;
        Ok(())
    }
}

/// Solve `sum_i coeffs[i](t) y^(i) = forcing(t)` from `y0 = [y, y', ..]` at `t0`.
pub fn solve_linear_ode<F: Fn(f64) -> f64>(
    coeffs: &[Expr],
    forcing: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    solve_linear_ode_with(coeffs, forcing, t0, y0, t_end, &OdeOptions::with_tol(tol))
}

pub fn solve_linear_ode_with<F: Fn(f64) -> f64>(
    coeffs: &[Expr],
    forcing: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    let ode = LinearOde::new(coeffs, forcing)?;
    if let Some((t, value)) = scan_for_zero(&coeffs[coeffs.len() - 1], t0, t_end, 256)? {
        return Err(Error::LeadingCoefficientVanishes { t, value });
    }
    integrate(&ode, t0, y0, t_end, opts)
}

/// Look for a zero of `e` on `[lo, hi]` using `n` uniform samples: either a
/// sample with `|e| <= LEADING_GUARD` (relative to the largest sample) or a
/// sign change, which is then refined by bisection.
pub fn scan_for_zero(e: &Expr, lo: f64, hi: f64, n: usize) -> Result<Option<(f64, f64)>> {
    let n = n.max(2);
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            Ok((t, e.eval(t)?))
        })
        .collect::<Result<_>>()?;
    let scale = samples.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    for &(t, v) in &samples {
        if v.abs() <= LEADING_GUARD * scale || v == 0.0 {
            return Ok(Some((t, v)));
        }
    }
    for w in samples.windows(2) {
        let ((mut a, fa), (mut b, _)) = (w[0], w[1]);
        if fa.signum() != w[1].1.signum() {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = e.eval(m)?;
                if fm == 0.0 {
                    return Ok(Some((m, 0.0)));
                }
                if fm.signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let m = 0.5 * (a + b);
            return Ok(Some((m, e.eval(m).unwrap_or(0.0))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn coeffs(src: &[&str]) -> Vec<Expr> {
        src.iter().map(|s| parse(s).unwrap()).collect()
    }

    #[test]
    fn exponential_decay() {
        let c = coeffs(&["1", "1"]);
        let tr = solve_linear_ode(&c, |_| 0.0, 0.0, &[1.0], 1.0, 1e-9).unwrap();
        assert!((tr.component(1.0, 0).unwrap() - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn time_varying_first_order() {
        // (t+1) y' + (t+2) y = 0 -> y = e^-t / (t+1)
        let c = coeffs(&["t+2", "t+1"]);
        let tr = solve_linear_ode(&c, |_| 0.0, 0.0, &[1.0], 1.0, 1e-9).unwrap();
        let y1 = tr.component(1.0, 0).unwrap();
        assert!((y1 - 0.183_939_720_585_721_16).abs() < 1e-7, "{y1}");
    }

    #[test]
    fn harmonic_oscillator() {
        let c = coeffs(&["1", "0", "1"]);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let tr = solve_linear_ode(&c, |_| 0.0, 0.0, &[0.0, 1.0], half_pi, 1e-9).unwrap();
        assert!((tr.component(half_pi, 0).unwrap() - 1.0).abs() < 1e-7);
        assert!(tr.component(half_pi, 1).unwrap().abs() < 1e-7);
    }

    #[test]
    fn forced_response() {
        // y' + y = 1, y(0) = 0 -> 1 - e^-t
        let c = coeffs(&["1", "1"]);
        let tr = solve_linear_ode(&c, |_| 1.0, 0.0, &[0.0], 3.0, 1e-10).unwrap();
        for i in 0..=30 {
            let t = 0.1 * i as f64;
            assert!((tr.component(t, 0).unwrap() - (1.0 - (-t).exp())).abs() < 1e-9);
        }
    }

    #[test]
    fn dense_output_between_steps() {
        let c = coeffs(&["1", "1"]);
        let tr = solve_linear_ode(&c, |_| 0.0, 0.0, &[1.0], 6.0, 1e-9).unwrap();
        for w in tr.times().windows(2) {
            for theta in [0.25, 0.5, 0.75] {
                let t = w[0] + theta * (w[1] - w[0]);
                let rel = (tr.component(t, 0).unwrap() - (-t).exp()).abs() / (-t).exp();
                assert!(rel < 1e-7, "t={t} rel={rel}");
            }
        }
    }

    #[test]
    fn lands_on_stops() {
        let c = coeffs(&["1", "1"]);
        let stops: Vec<f64> = (1..10).map(|i| i as f64 * 0.1).collect();
        let opts = OdeOptions::with_tol(1e-9).stops(&stops);
        let tr = solve_linear_ode_with(&c, |_| 0.0, 0.0, &[1.0], 1.0, &opts).unwrap();
        for s in &stops {
            assert!(tr.times().contains(s), "missing stop {s}");
        }
        assert_eq!(tr.end(), 1.0);
    }

    #[test]
    fn vanishing_leading_coefficient_is_rejected() {
        let c = coeffs(&["1", "t - 0.5"]);
        let err = solve_linear_ode(&c, |_| 0.0, 0.0, &[1.0], 1.0, 1e-9).unwrap_err();
        assert!(
            matches!(
                err,
                Error::LeadingCoefficientVanishes { .. } | Error::StepSizeUnderflow { .. }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn zero_length_span() {
        let c = coeffs(&["1", "1"]);
        let tr = solve_linear_ode(&c, |_| 0.0, 2.0, &[3.0], 2.0, 1e-9).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.component(2.0, 0).unwrap(), 3.0);
    }

    #[test]
    fn bad_inputs() {
        let c = coeffs(&["1", "1"]);
        assert!(solve_linear_ode(&c, |_| 0.0, 0.0, &[1.0, 2.0], 1.0, 1e-9).is_err());
        assert!(solve_linear_ode(&c, |_| 0.0, 1.0, &[1.0], 0.0, 1e-9).is_err());
        assert!(solve_linear_ode(&coeffs(&["1"]), |_| 0.0, 0.0, &[], 1.0, 1e-9).is_err());
    }
}
