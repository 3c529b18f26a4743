//! Cascade connections `AB` (A drives B) and the commutativity defect.
//!
//! `h_AB(t, t0)` is obtained by integrating both stages together: the first
//! stage starts from its impulse jump state at `t0` and its output is the
//! forcing of the relaxed second stage. This is the response of the second
//! system to `t -> h_A(t, t0)` without a separate interpolation layer.
//! [`cascade_impulse_quadrature`] evaluates the superposition integral
//! directly and is kept for cross-validation.

use rayon::join;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::Grid;
use crate::impulse::{jump_state, kernel, sample_kernel, scalar_impulse, ScalarImpulse};
use crate::numerics::{
    highest_derivative, integrate, integrate_adaptive, scan_for_zero, OdeOptions, OdeSystem,
    Trajectory,
};
use crate::report::csv_number;
use crate::system::LtvSystem;

/// `h_AB(t, t0)` on a grid.
#[derive(Debug, Clone)]
pub struct CascadeResult {
    first: LtvSystem,
    second: LtvSystem,
    t0: f64,
    grid: Grid,
    values: Vec<f64>,
    tol: f64,
}

impl CascadeResult {
    pub fn first(&self) -> &LtvSystem {
        &self.first
    }

    pub fn second(&self) -> &LtvSystem {
        &self.second
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }
}

/// Which side of the cascade the scalar system sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarOrder {
    ScalarFirst,
    ScalarSecond,
}

/// Both stages stacked into one state vector `[y_first.., y_second..]`.
struct CascadeOde<'a, F> {
    first: &'a [Expr],
    second: &'a [Expr],
    input: F,
}

impl<F: Fn(f64) -> f64> OdeSystem for CascadeOde<'_, F> {
    fn dim(&self) -> usize {
        self.first.len() + self.second.len() - 2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n1 = self.first.len() - 1;
        let n = self.dim();
        let (y1, y2) = y.split_at(n1);
        dy[..n1 - 1].copy_from_slice(&y1[1..]);
        dy[n1 - 1] = highest_derivative(self.first, t, y1, (self.input)(t))?;
        dy[n1..n - 1].copy_from_slice(&y2[1..]);
        dy[n - 1] = highest_derivative(self.second, t, y2, y1[0])?;
        Ok(())
    }
}

fn check_cascade_grid(first: &LtvSystem, second: &LtvSystem, t0: f64, grid: &Grid) -> Result<()> {
    if grid.first() < t0 {
        return Err(Error::invalid(format!(
            "cascade grid starts at {} before t0 = {t0}",
            grid.first()
        )));
    }
    for s in [first, second] {
        s.domain().check(t0)?;
        s.check_grid(grid)?;
    }
    Ok(())
}

fn require_dynamic_pair(first: &LtvSystem, second: &LtvSystem) -> Result<()> {
    if first.is_scalar() || second.is_scalar() {
        return Err(Error::ScalarSystem(
            "cascade with an order-0 stage; use scalar_cascade".into(),
        ));
    }
    Ok(())
}

fn run_cascade(
    first: &LtvSystem,
    second: &LtvSystem,
    input: impl Fn(f64) -> f64,
    t0: f64,
    y0: &[f64],
    grid: &Grid,
    tol: f64,
) -> Result<Trajectory> {
    let t_end = grid.last();
    for s in [first, second] {
        if let Some((t, value)) = scan_for_zero(s.leading(), t0, t_end, 256)? {
            return Err(Error::LeadingCoefficientVanishes { t, value });
        }
    }
    let ode = CascadeOde {
        first: first.coeffs(),
        second: second.coeffs(),
        input,
    };
    integrate(&ode, t0, y0, t_end, &OdeOptions::with_tol(tol).stops(grid))
}

/// `h_{first second}(t, t0)` for every grid point `t >= t0`.
pub fn cascade_impulse(
    first: &LtvSystem,
    second: &LtvSystem,
    t0: f64,
    grid: &Grid,
    tol: f64,
) -> Result<CascadeResult> {
    require_dynamic_pair(first, second)?;
    check_cascade_grid(first, second, t0, grid)?;
    let n1 = first.order();
    let mut y0 = jump_state(first, t0)?;
    y0.resize(n1 + second.order(), 0.0);
    let traj = run_cascade(first, second, |_| 0.0, t0, &y0, grid, tol)?;
    let values = grid
        .iter()
        .map(|&t| traj.component(t, n1))
        .collect::<Result<Vec<_>>>()?;
    Ok(CascadeResult {
        first: first.clone(),
        second: second.clone(),
        t0,
        grid: grid.clone(),
        values,
        tol,
    })
}

/// Cascade of an order-0 system `a0(t) y = x` with a dynamic one:
/// `h_other(t, t0) / a0(t0)` when the scalar comes first and
/// `h_other(t, t0) / a0(t)` when it comes second.
pub fn scalar_cascade(
    scalar: &LtvSystem,
    other: &LtvSystem,
    order: ScalarOrder,
    t0: f64,
    grid: &Grid,
    tol: f64,
) -> Result<CascadeResult> {
    scalar.require_order(0)?;
    if other.is_scalar() {
        return Err(Error::ScalarSystem(
            "both stages are scalar; the cascade is a weighted delta (see scalar_product)".into(),
        ));
    }
    check_cascade_grid(scalar, other, t0, grid)?;
    let h = sample_kernel(other, t0, grid, tol)?;
    let a0 = scalar.coeff(0);
    let values = match order {
        ScalarOrder::ScalarFirst => {
            let w = scalar_impulse(scalar, t0)?.weight;
            h.iter().map(|v| v * w).collect()
        }
        ScalarOrder::ScalarSecond => grid
            .iter()
            .zip(&h)
            .map(|(&t, v)| Ok(v / a0.eval(t)?))
            .collect::<Result<Vec<_>>>()?,
    };
    let (first, second) = match order {
        ScalarOrder::ScalarFirst => (scalar, other),
        ScalarOrder::ScalarSecond => (other, scalar),
    };
    Ok(CascadeResult {
        first: first.clone(),
        second: second.clone(),
        t0,
        grid: grid.clone(),
        values,
        tol,
    })
}

/// Cascade of two scalar systems: a delta at `t0` weighted by both gains.
pub fn scalar_product(a: &LtvSystem, b: &LtvSystem, t0: f64) -> Result<ScalarImpulse> {
    let wa = scalar_impulse(a, t0)?;
    let wb = scalar_impulse(b, t0)?;
    Ok(ScalarImpulse {
        weight: wa.weight * wb.weight,
        tau: t0,
    })
}

/// `h_AB` and `h_BA` side by side.
#[derive(Debug, Clone)]
pub struct DefectReport {
    pub t0: f64,
    pub grid: Grid,
    pub h_ab: Vec<f64>,
    pub h_ba: Vec<f64>,
    /// `max_t |h_AB - h_BA|`.
    pub defect: f64,
    /// `max_t max(|h_AB|, |h_BA|)`.
    pub peak: f64,
}

impl DefectReport {
    /// Defect relative to the response size, with a floor of 1 on the scale.
    pub fn scaled(&self) -> f64 {
        self.defect / self.peak.max(1.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t0,t,h_ab,h_ba,defect\n");
        for ((t, ab), ba) in self.grid.iter().zip(&self.h_ab).zip(&self.h_ba) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_number(self.t0),
                csv_number(*t),
                csv_number(*ab),
                csv_number(*ba),
                csv_number((ab - ba).abs())
            ));
        }
        out
    }
}

fn defect_report(t0: f64, grid: &Grid, h_ab: Vec<f64>, h_ba: Vec<f64>) -> DefectReport {
    let defect = h_ab
        .iter()
        .zip(&h_ba)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let peak = h_ab
        .iter()
        .chain(&h_ba)
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    DefectReport {
        t0,
        grid: grid.clone(),
        h_ab,
        h_ba,
        defect,
        peak,
    }
}

/// Both cascade orders of `(a, b)`, computed concurrently. Scalar operands
/// go through [`scalar_cascade`]; two scalars commute trivially.
pub fn cascade_pair(
    a: &LtvSystem,
    b: &LtvSystem,
    t0: f64,
    grid: &Grid,
    tol: f64,
) -> Result<DefectReport> {
    use ScalarOrder::*;
    let (h_ab, h_ba) = match (a.is_scalar(), b.is_scalar()) {
        (true, true) => {
            scalar_product(a, b, t0)?;
            let zeros = vec![0.0; grid.len()];
            (zeros.clone(), zeros)
        }
        (true, false) => {
            let (ab, ba) = join(
                || scalar_cascade(a, b, ScalarFirst, t0, grid, tol),
                || scalar_cascade(a, b, ScalarSecond, t0, grid, tol),
            );
            (ab?.values, ba?.values)
        }
        (false, true) => {
            let (ab, ba) = join(
                || scalar_cascade(b, a, ScalarSecond, t0, grid, tol),
                || scalar_cascade(b, a, ScalarFirst, t0, grid, tol),
            );
            (ab?.values, ba?.values)
        }
        (false, false) => {
            let (ab, ba) = join(
                || cascade_impulse(a, b, t0, grid, tol),
                || cascade_impulse(b, a, t0, grid, tol),
            );
            (ab?.values, ba?.values)
        }
    };
    Ok(defect_report(t0, grid, h_ab, h_ba))
}

/// `max_t |h_AB(t, t0) - h_BA(t, t0)|` over the grid.
pub fn commutativity_defect(
    a: &LtvSystem,
    b: &LtvSystem,
    t0: f64,
    grid: &Grid,
    tol: f64,
) -> Result<f64> {
    Ok(cascade_pair(a, b, t0, grid, tol)?.defect)
}

/// `Delta(t0, tau, t) = h_B(t, tau) h_A(tau, t0) - h_A(t, tau) h_B(tau, t0)`,
/// the pointwise difference of the two superposition integrands.
pub fn delta_integrand(
    a: &LtvSystem,
    b: &LtvSystem,
    t0: f64,
    tau: f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    if !(t0 <= tau && tau <= t) {
        return Err(Error::invalid(format!(
            "delta integrand needs t0 <= tau <= t, got ({t0}, {tau}, {t})"
        )));
    }
    let ab = kernel(b, t, tau, tol)? * kernel(a, tau, t0, tol)?;
    let ba = kernel(a, t, tau, tol)? * kernel(b, tau, t0, tol)?;
    Ok(ab - ba)
}

/// `h_AB(t, t0) = int_t0^t h_B(t, tau) h_A(tau, t0) dtau` by adaptive
/// quadrature. Each integrand evaluation costs a kernel evaluation of the
/// second stage, so this is for checking rather than bulk use.
pub fn cascade_impulse_quadrature(
    first: &LtvSystem,
    second: &LtvSystem,
    t0: f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    require_dynamic_pair(first, second)?;
    if t < t0 {
        return Ok(0.0);
    }
    let inner = tol * 1e-2;
    integrate_adaptive(
        |tau| Ok(kernel(second, t, tau, inner)? * kernel(first, tau, t0, inner)?),
        t0,
        t,
        tol,
    )
}

/// Two-stage connection driven by an arbitrary input, each stage starting
/// from its own initial state.
#[derive(Debug, Clone)]
pub struct CascadeSimulation {
    pub grid: Grid,
    /// Output of the first stage at each grid point.
    pub intermediate: Vec<f64>,
    /// Output of the second stage at each grid point.
    pub output: Vec<f64>,
    trajectory: Trajectory,
    first_order: usize,
}

impl CascadeSimulation {
    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    /// Interpolated output of the second stage.
    pub fn output_at(&self, t: f64) -> Result<f64> {
        self.trajectory.component(t, self.first_order)
    }
}

/// Simulate `first` then `second` with `input` feeding the first stage.
/// Both systems must share `t0`; the grid must start at or after it.
pub fn simulate_cascade_with_ics<F>(
    first: &LtvSystem,
    second: &LtvSystem,
    input: F,
    grid: &Grid,
    tol: f64,
) -> Result<CascadeSimulation>
where
    F: Fn(f64) -> f64,
{
    if first.is_scalar() || second.is_scalar() {
        return Err(Error::ScalarSystem(
            "scalar stages carry no state; scale the signal instead".into(),
        ));
    }
    if first.t0() != second.t0() {
        return Err(Error::invalid(format!(
            "stages start at different times: {} and {}",
            first.t0(),
            second.t0()
        )));
    }
    let t0 = first.t0();
    check_cascade_grid(first, second, t0, grid)?;
    let mut y0 = first.initial_state().to_vec();
    y0.extend_from_slice(second.initial_state());
    let traj = run_cascade(first, second, input, t0, &y0, grid, tol)?;
    let n1 = first.order();
    let sample =
        |k: usize| -> Result<Vec<f64>> { grid.iter().map(|&t| traj.component(t, k)).collect() };
    Ok(CascadeSimulation {
        grid: grid.clone(),
        intermediate: sample(0)?,
        output: sample(n1)?,
        trajectory: traj,
        first_order: n1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impulse::{first_order_closed_form, gauge_function};

    fn a() -> LtvSystem {
        LtvSystem::from_strs(&["t+2", "t+1"], -0.9, 10.0).unwrap()
    }
    fn b() -> LtvSystem {
        LtvSystem::from_strs(&["2*t+5", "2*(t+1)"], -0.9, 10.0).unwrap()
    }
    fn c() -> LtvSystem {
        LtvSystem::from_strs(&["-t+1", "-(t+1)"], -0.9, 10.0).unwrap()
    }

    fn h_ab_exact(t: f64, t0: f64) -> f64 {
        (t0 - t).exp() / (t + 1.0) * (1.0 - ((t0 + 1.0) / (t + 1.0)).sqrt())
    }

    fn h_ac_exact(t: f64, t0: f64) -> f64 {
        (t0 - t).exp() / (3.0 * (t + 1.0)) * (1.0 - ((t + 1.0) / (t0 + 1.0)).powi(3))
    }

    #[test]
    fn first_order_cascades_match_closed_forms() {
        let grid = Grid::uniform(0.0, 5.0, 51).unwrap();
        let ab = cascade_impulse(&a(), &b(), 0.0, &grid, 1e-10).unwrap();
        let ba = cascade_impulse(&b(), &a(), 0.0, &grid, 1e-10).unwrap();
        let ac = cascade_impulse(&a(), &c(), 0.0, &grid, 1e-10).unwrap();
        for (i, &t) in grid.iter().enumerate() {
            let e = h_ab_exact(t, 0.0);
            assert!(
                (ab.values()[i] - e).abs() <= 1e-7 * e.abs().max(1e-6),
                "t={t}"
            );
            assert!(
                (ba.values()[i] - e).abs() <= 1e-7 * e.abs().max(1e-6),
                "t={t}"
            );
            let e = h_ac_exact(t, 0.0);
            assert!(
                (ac.values()[i] - e).abs() <= 1e-7 * e.abs().max(1e-6),
                "t={t}"
            );
        }
        assert_eq!(ab.values()[0], 0.0);
        assert!((ab.values()[10] - 0.053_874_696_829_998_937).abs() < 1e-9);
    }

    #[test]
    fn defect_of_commuting_and_perturbed_pairs() {
        let grid = Grid::uniform(0.0, 5.0, 101).unwrap();
        assert!(commutativity_defect(&a(), &b(), 0.0, &grid, 1e-10).unwrap() < 1e-8);
        assert!(commutativity_defect(&a(), &c(), 0.0, &grid, 1e-10).unwrap() < 1e-8);
        // a constant shift of b0 only moves k0; a drift in t breaks the pair
        let shifted = LtvSystem::from_strs(&["2*t+5.5", "2*(t+1)"], -0.9, 10.0).unwrap();
        assert!(commutativity_defect(&a(), &shifted, 0.0, &grid, 1e-10).unwrap() < 1e-8);
        let bp = LtvSystem::from_strs(&["2.5*t+5", "2*(t+1)"], -0.9, 10.0).unwrap();
        assert!(commutativity_defect(&a(), &bp, 0.0, &grid, 1e-10).unwrap() > 1e-3);
    }

    #[test]
    fn gauge_closed_form_of_the_cascade() {
        // h_AB = h_A (1 - exp(g(t0) - g(t))) / k0 for b = 2a + 1
        let grid = Grid::uniform(0.5, 4.0, 8).unwrap();
        let r = cascade_impulse(&a(), &b(), 0.5, &grid, 1e-10).unwrap();
        let a1 = a().coeff(1).clone();
        for (t, v) in r.iter() {
            let g = gauge_function(&a1, 2.0, 1.0, 0.5, t, 1e-12).unwrap();
            let ha = first_order_closed_form(&a(), 0.5, t, 1e-12).unwrap();
            assert!((v - ha * (1.0 - (-g).exp())).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn quadrature_path_agrees() {
        let v = cascade_impulse_quadrature(&a(), &b(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 0.053_874_696_829_998_937).abs() < 1e-9);
        let v = cascade_impulse_quadrature(&a(), &c(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v + 0.429_192_681_366_682_71).abs() < 1e-9);
    }

    #[test]
    fn integrand_nonzero_while_integral_vanishes() {
        let d = delta_integrand(&a(), &b(), 0.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((d - 0.001_233_691_627_597_394_9).abs() < 1e-10, "{d}");
        let total = integrate_adaptive(
            |tau| delta_integrand(&a(), &b(), 0.0, tau, 2.0, 1e-13),
            0.0,
            2.0,
            1e-11,
        )
        .unwrap();
        assert!(total.abs() < 1e-9, "{total}");
        assert!(delta_integrand(&a(), &b(), 0.0, 3.0, 2.0, 1e-12).is_err());
    }

    #[test]
    fn time_invariant_delta_vanishes_pointwise() {
        let p = LtvSystem::from_strs(&["1", "1"], 0.0, 5.0).unwrap();
        let q = LtvSystem::from_strs(&["2", "2"], 0.0, 5.0).unwrap();
        for tau in [0.0, 0.4, 1.3, 2.0] {
            assert!(delta_integrand(&p, &q, 0.0, tau, 2.0, 1e-12).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_cascades() {
        let grid = Grid::uniform(0.0, 2.0, 3).unwrap();
        let gain = LtvSystem::from_strs(&["2"], -0.9, 10.0).unwrap();
        assert!(commutativity_defect(&gain, &a(), 0.0, &grid, 1e-12).unwrap() < 1e-14);
        let tv = LtvSystem::from_strs(&["t+1"], -0.9, 10.0).unwrap();
        let r = cascade_pair(&tv, &a(), 0.0, &grid, 1e-12).unwrap();
        let ha1 = (-1.0f64).exp() / 2.0;
        assert!((r.h_ab[1] - ha1).abs() < 1e-12);
        assert!((r.h_ba[1] - ha1 / 2.0).abs() < 1e-12);
        assert!(
            (r.defect - 0.091_969_860_292_860_58).abs() < 1e-12,
            "{}",
            r.defect
        );
        let one = LtvSystem::from_strs(&["1"], -0.9, 10.0).unwrap();
        let r = scalar_cascade(&one, &a(), ScalarOrder::ScalarSecond, 0.0, &grid, 1e-12).unwrap();
        assert_eq!(
            r.values()[1],
            first_order_closed_form(&a(), 0.0, 1.0, 1e-12).unwrap()
        );
        assert!(matches!(
            cascade_impulse(&one, &a(), 0.0, &grid, 1e-9),
            Err(Error::ScalarSystem(_))
        ));
        assert_eq!(
            commutativity_defect(&one, &gain, 0.0, &grid, 1e-9).unwrap(),
            0.0
        );
    }

    #[test]
    fn second_order_cascade_against_quadrature() {
        let s2 = LtvSystem::from_strs(&["1", "3*(t+1)", "(t+1)^2"], 0.0, 5.0).unwrap();
        let s1 = LtvSystem::from_strs(&["1", "t+1"], 0.0, 5.0).unwrap();
        let grid = Grid::uniform(0.0, 1.5, 4).unwrap();
        let r = cascade_impulse(&s2, &s1, 0.0, &grid, 1e-10).unwrap();
        let q = cascade_impulse_quadrature(&s2, &s1, 0.0, 1.5, 1e-9).unwrap();
        assert!((r.values()[3] - q).abs() < 1e-7, "{} vs {q}", r.values()[3]);
    }

    #[test]
    fn unrelaxed_pair_with_matching_constants_commutes() {
        // b = 2a - 1 with equal initial outputs
        let a0 = a().with_initial_state(0.0, vec![1.0]).unwrap();
        let b0 = LtvSystem::from_strs(&["2*t+3", "2*(t+1)"], -0.9, 10.0)
            .unwrap()
            .with_initial_state(0.0, vec![1.0])
            .unwrap();
        let grid = Grid::uniform(0.0, 3.0, 31).unwrap();
        let u = |t: f64| (2.0 * t).sin() + 0.5;
        let ab = simulate_cascade_with_ics(&a0, &b0, u, &grid, 1e-11).unwrap();
        let ba = simulate_cascade_with_ics(&b0, &a0, u, &grid, 1e-11).unwrap();
        let diff = ab
            .output
            .iter()
            .zip(&ba.output)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");

        let b1 = LtvSystem::from_strs(&["2*t+3.5", "2*(t+1)"], -0.9, 10.0)
            .unwrap()
            .with_initial_state(0.0, vec![1.0])
            .unwrap();
        let ab = simulate_cascade_with_ics(&a0, &b1, u, &grid, 1e-11).unwrap();
        let ba = simulate_cascade_with_ics(&b1, &a0, u, &grid, 1e-11).unwrap();
        let diff = ab
            .output
            .iter()
            .zip(&ba.output)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff > 1e-3, "{diff}");
    }

    #[test]
    fn step_response_is_the_integrated_kernel() {
        let grid = Grid::uniform(0.0, 1.0, 2).unwrap();
        let a0 = a().with_initial_state(0.0, vec![0.0]).unwrap();
        let b0 = b().with_initial_state(0.0, vec![0.0]).unwrap();
        let sim = simulate_cascade_with_ics(&a0, &b0, |_| 1.0, &grid, 1e-11).unwrap();
        let q = integrate_adaptive(
            |tau| cascade_impulse_quadrature(&a(), &b(), tau, 1.0, 1e-11),
            0.0,
            1.0,
            1e-9,
        )
        .unwrap();
        assert!((sim.output[1] - q).abs() < 1e-7, "{} vs {q}", sim.output[1]);
    }

    #[test]
    fn mismatched_start_times_are_rejected() {
        let a0 = a().with_initial_state(0.0, vec![1.0]).unwrap();
        let b0 = b().with_initial_state(0.5, vec![1.0]).unwrap();
        let grid = Grid::uniform(0.5, 1.0, 3).unwrap();
        assert!(simulate_cascade_with_ics(&a0, &b0, |_| 0.0, &grid, 1e-9).is_err());
    }

    #[test]
    fn csv_layout() {
        let grid = Grid::uniform(0.0, 1.0, 3).unwrap();
        let r = cascade_pair(&a(), &b(), 0.0, &grid, 1e-10).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t0,t,h_ab,h_ba,defect");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 5);
    }
}
