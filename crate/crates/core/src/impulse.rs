//! Impulse responses `h(t, tau)`: output at `t` of a relaxed system hit by a
//! unit impulse at `tau`.
//!
//! For order `n >= 1` the impulse is realised as a jump in the initial state,
//! `y^(n-1)(tau+) = 1 / a_n(tau)` with all lower derivatives zero, followed by
//! the homogeneous equation. First-order systems additionally have the closed
//! form `h(t, tau) = exp(-int_tau^t a0/a1) / a1(tau)`; the exponent is always
//! computed as one definite integral. Scalar systems respond with a weighted
//! delta and never go through the trajectory machinery.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::Grid;
use crate::numerics::{integrate_adaptive, solve_linear_ode_with, OdeOptions, Trajectory};
use crate::system::LtvSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpulseMethod {
    Ode,
    ClosedForm,
}

impl ImpulseMethod {
    pub fn name(self) -> &'static str {
        match self {
            ImpulseMethod::Ode => "ode",
            ImpulseMethod::ClosedForm => "closed-form",
        }
    }
}

/// `t -> h(t, tau)` for a fixed impulse time, with dense output.
#[derive(Debug, Clone)]
pub struct ImpulseResponse {
    system: LtvSystem,
    tau: f64,
    trajectory: Trajectory,
    method: ImpulseMethod,
}

impl ImpulseResponse {
    pub fn system(&self) -> &LtvSystem {
        &self.system
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn method(&self) -> ImpulseMethod {
        self.method
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn tolerance(&self) -> f64 {
        self.trajectory.tolerance()
    }

    /// `h(t, tau)`; zero before the impulse.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < self.tau {
            return Ok(0.0);
        }
        self.trajectory.component(t, 0)
    }
}

/// Response of a scalar system `a0(t) y = x`: the delta `delta(t - tau) / a0(tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarImpulse {
    pub weight: f64,
    pub tau: f64,
}

pub fn scalar_impulse(s: &LtvSystem, tau: f64) -> Result<ScalarImpulse> {
    s.require_order(0)?;
    s.domain().check(tau)?;
    let a0 = s.coeff(0).eval(tau)?;
    let weight = 1.0 / a0;
    if !weight.is_finite() || weight == 0.0 {
        return Err(Error::InvalidSystem(format!(
            "scalar gain 1/a0({tau}) is not finite and nonzero"
        )));
    }
    Ok(ScalarImpulse { weight, tau })
}

/// Jump initial state realising a unit impulse at `tau`.
pub(crate) fn jump_state(s: &LtvSystem, tau: f64) -> Result<Vec<f64>> {
    let n = s.order();
    let lead = s.leading().eval(tau)?;
    if lead == 0.0 {
        return Err(Error::LeadingCoefficientVanishes {
            t: tau,
            value: lead,
        });
    }
    let mut y0 = vec![0.0; n];
    y0[n - 1] = 1.0 / lead;
    Ok(y0)
}

fn require_dynamic(s: &LtvSystem) -> Result<()> {
    if s.is_scalar() {
        Err(Error::ScalarSystem(
            "order-0 systems respond with a weighted delta; use scalar_impulse".into(),
        ))
    } else {
        Ok(())
    }
}

/// ODE-based impulse response on `[tau, t_end]`.
pub fn impulse_response(s: &LtvSystem, tau: f64, t_end: f64, tol: f64) -> Result<ImpulseResponse> {
    impulse_response_with(s, tau, t_end, &OdeOptions::with_tol(tol))
}

/// As [`impulse_response`], landing exactly on every grid point.
pub fn impulse_response_on(
    s: &LtvSystem,
    tau: f64,
    grid: &Grid,
    tol: f64,
) -> Result<ImpulseResponse> {
    let opts = OdeOptions::with_tol(tol).stops(grid);
    impulse_response_with(s, tau, grid.last().max(tau), &opts)
}

fn impulse_response_with(
    s: &LtvSystem,
    tau: f64,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<ImpulseResponse> {
    require_dynamic(s)?;
    s.domain().check(tau)?;
    s.domain().check(t_end)?;
    let y0 = jump_state(s, tau)?;
    let trajectory = solve_linear_ode_with(s.coeffs(), |_| 0.0, tau, &y0, t_end, opts)?;
    Ok(ImpulseResponse {
        system: s.clone(),
        tau,
        trajectory,
        method: ImpulseMethod::Ode,
    })
}

/// Closed-form first-order kernel sampled on `grid` (points before `tau`
/// are dropped). Between samples the Hermite interpolant uses the exact
/// derivative `-a0/a1 h`.
pub fn closed_form_response(
    s: &LtvSystem,
    tau: f64,
    grid: &Grid,
    tol: f64,
) -> Result<ImpulseResponse> {
    s.require_order(1)?;
    let mut times: Vec<f64> = vec![tau];
    times.extend(grid.iter().copied().filter(|&t| t > tau));
    let mut states = Vec::with_capacity(times.len());
    let mut derivs = Vec::with_capacity(times.len());
    let mut exponent = 0.0;
    let mut prev = tau;
    let inv_a1_tau = 1.0 / s.coeff(1).eval(tau)?;
    for &t in &times {
        s.domain().check(t)?;
        // accumulate the exponent panel by panel; each panel is one definite integral
        exponent += log_decay(s, prev, t, tol)?;
        prev = t;
        let h = inv_a1_tau * exponent.exp();
        let rate = -s.coeff(0).eval(t)? / s.coeff(1).eval(t)?;
        states.push(h);
        derivs.push(rate * h);
    }
    Ok(ImpulseResponse {
        system: s.clone(),
        tau,
        trajectory: Trajectory::from_samples(1, times, states, derivs, tol)?,
        method: ImpulseMethod::ClosedForm,
    })
}

/// `h(t, tau)` at every grid point: zero before `tau`, the closed form for
/// first-order systems and one ODE solve (landing on the grid) otherwise.
pub fn sample_kernel(s: &LtvSystem, tau: f64, grid: &Grid, tol: f64) -> Result<Vec<f64>> {
    require_dynamic(s)?;
    let response = if s.order() == 1 {
        closed_form_response(s, tau, grid, tol)?
    } else {
        impulse_response_on(s, tau, grid, tol)?
    };
    grid.iter().map(|&t| response.eval(t)).collect()
}

/// `int_from^to -a0/a1`.
fn log_decay(s: &LtvSystem, from: f64, to: f64, tol: f64) -> Result<f64> {
    let (a0, a1) = (s.coeff(0), s.coeff(1));
    integrate_adaptive(|g| Ok(-a0.eval(g)? / a1.eval(g)?), from, to, tol)
}

/// `h(t, tau) = exp(int_tau^t -a0/a1) / a1(tau)` for a first-order system.
pub fn first_order_closed_form(s: &LtvSystem, tau: f64, t: f64, tol: f64) -> Result<f64> {
    s.require_order(1)?;
    s.domain().check(tau)?;
    s.domain().check(t)?;
    if t < tau {
        return Ok(0.0);
    }
    let a1_tau = s.coeff(1).eval(tau)?;
    Ok(log_decay(s, tau, t, tol)?.exp() / a1_tau)
}

/// `g(t) - g(t0) = (k0/k1) int_t0^t 1/a1`, the factor relating the kernels of
/// a first-order commutative pair: `h_B = exp(g(t0) - g(t)) h_A / k1`.
pub fn gauge_function(a1: &Expr, k1: f64, k0: f64, t0: f64, t: f64, tol: f64) -> Result<f64> {
    if k1 == 0.0 || !k1.is_finite() {
        return Err(Error::invalid("gauge function needs k1 != 0"));
    }
    if k0 == 0.0 {
        return Ok(0.0);
    }
    let integral = integrate_adaptive(|g| Ok(1.0 / a1.eval(g)?), t0, t, tol)?;
    Ok(k0 / k1 * integral)
}

/// Pointwise `h(t, tau)` for any non-scalar system: closed form for order 1,
/// otherwise an ODE solve from `tau` to `t`.
pub fn kernel(s: &LtvSystem, t: f64, tau: f64, tol: f64) -> Result<f64> {
    require_dynamic(s)?;
    if t < tau {
        return Ok(0.0);
    }
    if s.order() == 1 {
        return first_order_closed_form(s, tau, t, tol);
    }
    if t == tau {
        return Ok(if s.order() == 1 {
            jump_state(s, tau)?[0]
        } else {
            0.0
        });
    }
    impulse_response(s, tau, t, tol)?.eval(t)
}
