//! Numerical substrate: adaptive quadrature and an adaptive Runge-Kutta
//! integrator with dense output.

mod ode;
mod quad;
mod trajectory;

pub(crate) use ode::highest_derivative;
pub use ode::{
    integrate, scan_for_zero, solve_linear_ode, solve_linear_ode_with, LinearOde, OdeOptions,
    OdeSystem, DEFAULT_MAX_STEPS, DEFAULT_TOL, LEADING_GUARD,
};
pub use quad::{integrate_adaptive, MAX_DEPTH};
pub use trajectory::Trajectory;
