//! Single-input single-output linear time-varying systems
//! `sum_i a_i(t) y^(i)(t) = x(t)`.

mod file;

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::grid::Grid;
use crate::numerics::LEADING_GUARD;

pub use file::{parse_system_file, write_system_file};

/// Grid size used to check that the leading coefficient does not vanish.
pub const VALIDATION_POINTS: usize = 1000;

/// Closed interval on which a system is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidSystem(format!("invalid domain [{lo}, {hi}]")));
        }
        Ok(Domain { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn intersect(&self, other: &Domain) -> Option<Domain> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Domain { lo, hi })
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                t,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// An LTV system together with its initial time and initial state.
///
/// `coeffs[i]` multiplies the i-th derivative of the output, so the order is
/// `coeffs.len() - 1`. The initial state holds `y(t0), .., y^(n-1)(t0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtvSystem {
    coeffs: Vec<Expr>,
    t0: f64,
    ic: Vec<f64>,
    domain: Domain,
}

impl LtvSystem {
    /// Build and validate a system. The leading coefficient must not vanish
    /// anywhere on a [`VALIDATION_POINTS`]-point grid over the domain.
    pub fn new(coeffs: Vec<Expr>, t0: f64, ic: Vec<f64>, domain: Domain) -> Result<Self> {
        let s = Self::new_unchecked(coeffs, t0, ic, domain)?;
        let report = s.validate(VALIDATION_POINTS);
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidSystem(format!(
                "leading coefficient a_{}: {} at t = {}",
                s.order(),
                v.reason,
                v.t
            )));
        }
        Ok(s)
    }

    /// Structural checks only; the leading coefficient is not scanned.
    pub(crate) fn new_unchecked(
        coeffs: Vec<Expr>,
        t0: f64,
        ic: Vec<f64>,
        domain: Domain,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSystem(
                "a system needs at least one coefficient".into(),
            ));
        }
        let order = coeffs.len() - 1;
        if ic.len() != order {
            return Err(Error::InvalidSystem(format!(
                "order {order} needs {order} initial conditions, got {}",
                ic.len()
            )));
        }
        if ic.iter().any(|v| !v.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidSystem("initial data must be finite".into()));
        }
        if !domain.contains(t0) {
            return Err(Error::InvalidSystem(format!(
                "t0 = {t0} is outside the domain [{}, {}]",
                domain.lo, domain.hi
            )));
        }
        Ok(LtvSystem {
            coeffs,
            t0,
            ic,
            domain,
        })
    }

    /// Relaxed system starting at the left end of `domain`.
    pub fn relaxed(coeffs: Vec<Expr>, domain: Domain) -> Result<Self> {
        let order = coeffs.len().saturating_sub(1);
        Self::new(coeffs, domain.lo, vec![0.0; order], domain)
    }

    /// Convenience constructor from coefficient strings, lowest order first.
    pub fn from_strs(coeffs: &[&str], lo: f64, hi: f64) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|s| parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::relaxed(coeffs, Domain::new(lo, hi)?)
    }

    pub fn with_initial_state(mut self, t0: f64, ic: Vec<f64>) -> Result<Self> {
        if ic.len() != self.order() {
            return Err(Error::InvalidSystem(format!(
                "order {} needs {} initial conditions, got {}",
                self.order(),
                self.order(),
                ic.len()
            )));
        }
        self.domain.check(t0)?;
        self.t0 = t0;
        self.ic = ic;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_scalar(&self) -> bool {
        self.order() == 0
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    /// Coefficient of the i-th derivative.
    pub fn coeff(&self, i: usize) -> &Expr {
        &self.coeffs[i]
    }

    pub fn leading(&self) -> &Expr {
        &self.coeffs[self.order()]
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.ic
    }

    pub fn is_relaxed(&self) -> bool {
        self.ic.iter().all(|&v| v == 0.0)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval_coeffs(&self, t: f64) -> Result<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| c.eval(t).map_err(Error::from))
            .collect()
    }

    /// Scan the leading coefficient on `gridpoints` uniform points.
    pub fn validate(&self, gridpoints: usize) -> ValidationReport {
        validate_system(self, gridpoints)
    }

    pub(crate) fn require_order(&self, expected: usize) -> Result<()> {
        if self.order() == expected {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                expected: expected.to_string(),
                found: self.order(),
            })
        }
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        self.domain.check(grid.first())?;
        self.domain.check(grid.last())
    }
}

impl fmt::Display for LtvSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.order();
        let terms: Vec<String> = (0..=n)
            .rev()
            .map(|i| match i {
                0 => format!("{} y", self.coeffs[i]),
                1 => format!("{} y'", self.coeffs[i]),
                _ => format!("{} y^({i})", self.coeffs[i]),
            })
            .collect();
        write!(f, "{} = x", terms.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub reason: String,
}

/// Result of scanning the leading coefficient over the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub gridpoints: usize,
    pub min_abs_leading: f64,
    pub argmin: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `a_n(t) != 0` on a uniform grid over the system's domain. Sign
/// changes between neighbouring points are located by bisection and counted
/// as violations.
pub fn validate_system(s: &LtvSystem, gridpoints: usize) -> ValidationReport {
    let n = gridpoints.max(2);
    let Domain { lo, hi } = s.domain;
    let lead = s.leading();
    let mut violations = Vec::new();
    let mut min_abs = f64::INFINITY;
    let mut argmin = lo;
    let mut prev: Option<(f64, f64)> = None;

    for i in 0..n {
        let t = if lo == hi {
            lo
        } else if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        };
        let value = match s.eval_coeffs(t) {
            Ok(vals) => {
                let a_n = vals[vals.len() - 1];
                let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if a_n.abs() <= LEADING_GUARD * scale || a_n == 0.0 {
                    violations.push(Violation {
                        t,
                        reason: format!("vanishes (|a_n| = {:e})", a_n.abs()),
                    });
                }
                a_n
            }
            Err(e) => {
                violations.push(Violation {
                    t,
                    reason: format!("cannot be evaluated: {e}"),
                });
                prev = None;
                continue;
            }
        };
        if value.abs() < min_abs {
            min_abs = value.abs();
            argmin = t;
        }
        if let Some((pt, pv)) = prev {
            if pv != 0.0 && value != 0.0 && pv.signum() != value.signum() {
                let root = bisect_sign_change(lead, pt, t, pv);
                violations.push(Violation {
                    t: root,
                    reason: "changes sign".into(),
                });
                min_abs = 0.0;
                argmin = root;
            }
        }
        prev = Some((t, value));
    }

    ValidationReport {
        gridpoints: n,
        min_abs_leading: min_abs,
        argmin,
        violations,
    }
}

fn bisect_sign_change(e: &Expr, mut a: f64, mut b: f64, fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        match e.eval(m) {
            Ok(v) if v == 0.0 => return m,
            Ok(v) if v.signum() == fa.signum() => a = m,
            _ => b = m,
        }
    }
    0.5 * (a + b)
}

/// Constants relating the coefficients of a commutative pair.
///
/// * `First(k1, k0)`: two first-order systems, `b = k1 a + k0`.
/// * `Second(k2, k1, k0)`: a second-order partner expressed through the
///   second-order source's coefficient matrix.
/// * `MixedFree(k1, k0, free)`: a first-order partner of a second-order
///   system; `free` is the second-order system's free constant (A0 / C0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairConstants {
    First { k1: f64, k0: f64 },
    Second { k2: f64, k1: f64, k0: f64 },
    MixedFree { k1: f64, k0: f64, free: f64 },
}

impl PairConstants {
    /// Leading constant: must be nonzero for a genuine pair of that order.
    pub fn leading(&self) -> f64 {
        match *self {
            PairConstants::First { k1, .. } | PairConstants::MixedFree { k1, .. } => k1,
            PairConstants::Second { k2, .. } => k2,
        }
    }

    pub fn values(&self) -> Vec<(&'static str, f64)> {
        match *self {
            PairConstants::First { k1, k0 } => vec![("k1", k1), ("k0", k0)],
            PairConstants::Second { k2, k1, k0 } => vec![("k2", k2), ("k1", k1), ("k0", k0)],
            PairConstants::MixedFree { k1, k0, free } => {
                vec![("k1", k1), ("k0", k0), ("free", free)]
            }
        }
    }

    /// Largest relative difference (floor 1) between matching constants;
    /// infinite for different variants.
    pub fn distance(&self, other: &PairConstants) -> f64 {
        let a = self.values();
        let b = other.values();
        if std::mem::discriminant(self) != std::mem::discriminant(other) {
            return f64::INFINITY;
        }
        a.iter()
            .zip(&b)
            .map(|((_, x), (_, y))| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for PairConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values()
            .iter()
            .map(|(k, v)| format!("{k}={}", crate::report::sig(*v, 9)))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section6_system_a_on_shifted_domain() {
        let a = LtvSystem::from_strs(&["t+2", "t+1"], -0.9, 10.0).unwrap();
        let r = a.validate(1000);
        assert!(r.passed());
        assert!((r.min_abs_leading - 0.1).abs() < 1e-12);
        assert!((r.argmin + 0.9).abs() < 1e-12);
    }

    #[test]
    fn zero_crossing_between_grid_points_is_found() {
        let s = LtvSystem::new_unchecked(
            vec![parse("1").unwrap(), parse("(t+1)").unwrap()],
            -2.0,
            vec![0.0],
            Domain::new(-2.0, 0.0).unwrap(),
        )
        .unwrap();
        let r = validate_system(&s, 1000);
        assert!(!r.passed());
        assert!((r.violations[0].t + 1.0).abs() < 1e-9, "{:?}", r.violations);
        assert!(LtvSystem::from_strs(&["1", "(t+1)"], -2.0, 0.0).is_err());
    }

    #[test]
    fn scalar_systems_check_a0() {
        let s = LtvSystem::from_strs(&["t+1"], 0.0, 5.0).unwrap();
        assert!(s.is_scalar());
        assert!(s.initial_state().is_empty());
        assert!(s.validate(100).passed());
        assert!(LtvSystem::from_strs(&["t"], -1.0, 1.0).is_err());
    }

    #[test]
    fn structural_errors() {
        let d = Domain::new(0.0, 1.0).unwrap();
        let c = vec![parse("1").unwrap(), parse("1").unwrap()];
        assert!(LtvSystem::new(c.clone(), 0.0, vec![], d).is_err());
        assert!(LtvSystem::new(c.clone(), 2.0, vec![0.0], d).is_err());
        assert!(LtvSystem::new(vec![], 0.0, vec![], d).is_err());
        assert!(Domain::new(1.0, 0.0).is_err());
        let s = LtvSystem::new(c, 0.0, vec![1.0], d).unwrap();
        assert!(!s.is_relaxed());
    }

    #[test]
    fn constant_distance() {
        let a = PairConstants::First { k1: 2.0, k0: 1.0 };
        let b = PairConstants::First {
            k1: 2.0 + 1e-9,
            k0: 1.0,
        };
        assert!(a.distance(&b) < 1e-8);
        let c = PairConstants::Second {
            k2: 2.0,
            k1: 1.0,
            k0: 0.0,
        };
        assert!(a.distance(&c).is_infinite());
    }
}
