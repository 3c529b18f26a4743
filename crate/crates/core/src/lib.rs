//! Impulse responses, cascades and commutativity checks for linear
//! time-varying differential systems `sum_i a_i(t) y^(i) = x`.

pub mod cascade;
pub mod commute;
pub mod error;
pub mod expr;
pub mod grid;
pub mod impulse;
pub mod numerics;
pub mod report;
pub mod system;
pub mod transitivity;

pub use cascade::{
    cascade_impulse, cascade_impulse_quadrature, cascade_pair, commutativity_defect,
    delta_integrand, scalar_cascade, simulate_cascade_with_ics, CascadeResult, CascadeSimulation,
    DefectReport, ScalarOrder,
};
pub use commute::{
    check_bracket, check_pair, check_unrelaxed, extract_first_order_constants,
    extract_pair_constants, second_order_bracket, sqrt_operator, synthesize_first_from_second,
    synthesize_first_order_pair, synthesize_second_from_first, synthesize_second_order_pair,
    CommutativityReport, UnrelaxedVerdict, Verdict, DEFAULT_CONSTANCY_TOL,
};
pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use grid::{Grid, DEFAULT_GRID_POINTS};
pub use impulse::{
    first_order_closed_form, gauge_function, impulse_response, kernel, sample_kernel,
    scalar_impulse, ImpulseMethod, ImpulseResponse, ScalarImpulse,
};
pub use numerics::{integrate_adaptive, solve_linear_ode, Trajectory, DEFAULT_TOL};
pub use system::{
    parse_system_file, validate_system, write_system_file, Domain, LtvSystem, PairConstants,
};
pub use transitivity::{
    compose_first_order_constants, compose_mixed_constants, verify_chain, verify_chain_with,
    ChainMode, ChainReport,
};
