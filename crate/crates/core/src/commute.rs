//! Algebraic commutativity conditions.
//!
//! Two first-order systems commute iff `b = k1 a + k0` coefficient-wise for
//! constants `k1 != 0, k0`. For second-order systems the relations go
//! through the square-root operator
//! `S_A = sqrt(a2) D + (2 a1 - a2') / (4 sqrt(a2))`, which satisfies
//! `A = S_A^2 + A0` exactly when the bracket
//! `a0 - (4a1^2 + 3a2'^2 - 8a1a2' + 8a1'a2 - 4a2a2'') / (16 a2)` is the
//! constant `A0`. A first-order partner is then `k1 S_A + k0` and a
//! second-order partner `k2 A + k1 S_A + k0`.
//!
//! Extraction reads the would-be constants off a grid: each is estimated as
//! the grid mean, and its residual is the largest deviation from that mean
//! relative to `max(1, |mean|)`.

use std::fmt;

use crate::cascade::{cascade_pair, DefectReport};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::Grid;
use crate::report::sig;
use crate::system::{LtvSystem, PairConstants};

/// Default tolerance on constancy residuals.
pub const DEFAULT_CONSTANCY_TOL: f64 = 1e-8;

/// Points used when a synthesis routine checks its own preconditions.
const PRECONDITION_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Commutative,
    NotCommutative,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Commutative => "commutative",
            Verdict::NotCommutative => "not-commutative",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnrelaxedVerdict {
    /// Zero initial state: only the relaxed verdict matters.
    NotApplicable,
    Commutative,
    NotCommutative,
}

impl UnrelaxedVerdict {
    pub fn name(self) -> &'static str {
        match self {
            UnrelaxedVerdict::NotApplicable => "not-applicable",
            UnrelaxedVerdict::Commutative => "unrelaxed-commutative",
            UnrelaxedVerdict::NotCommutative => "not-unrelaxed-commutative",
        }
    }
}

/// Outcome of the initial-condition conditions for a first-order pair.
#[derive(Debug, Clone, PartialEq)]
pub struct UnrelaxedCheck {
    pub verdict: UnrelaxedVerdict,
    pub t0: f64,
    pub y_a: f64,
    pub y_b: f64,
    /// `|k0 - (1 - k1)|`.
    pub k0_residual: f64,
    /// `|(1 - a0)/a1 - (1 - b0)/b1|` at `t0`.
    pub ic_residual: f64,
    /// Largest value of the same residual over the grid; the condition does
    /// not single out any initial time when this is also below tolerance.
    pub ic_residual_over_grid: f64,
    pub notes: Vec<String>,
}

/// A named constancy residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct CommutativityReport {
    pub orders: (usize, usize),
    pub verdict: Verdict,
    pub constants: Option<PairConstants>,
    pub residuals: Vec<Residual>,
    pub unrelaxed: Option<UnrelaxedCheck>,
    /// Numerical `h_AB` vs `h_BA` comparison, when one was run.
    pub defect: Option<DefectReport>,
    pub grid_points: usize,
    pub grid_range: (f64, f64),
    pub tol: f64,
    pub notes: Vec<String>,
}

impl CommutativityReport {
    fn new(a: &LtvSystem, b: &LtvSystem, grid: &Grid, tol: f64) -> Self {
        CommutativityReport {
            orders: (a.order(), b.order()),
            verdict: Verdict::Inconclusive,
            constants: None,
            residuals: Vec::new(),
            unrelaxed: None,
            defect: None,
            grid_points: grid.len(),
            grid_range: (grid.first(), grid.last()),
            tol,
            notes: Vec::new(),
        }
    }

    fn residual(&mut self, name: &str, value: f64) {
        self.residuals.push(Residual {
            name: name.to_string(),
            value,
        });
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }

    fn residuals_pass(&self) -> bool {
        self.residuals.iter().all(|r| r.value < self.tol)
    }

    /// `key=value` lines for scripts.
    pub fn machine_block(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("verdict", self.verdict.name().into());
        kv("orders", format!("{}-{}", self.orders.0, self.orders.1));
        if let Some(c) = &self.constants {
            for (k, v) in c.values() {
                kv(&format!("const.{k}"), sig(v, 9));
            }
        }
        for r in &self.residuals {
            kv(&format!("residual.{}", r.name), sig(r.value, 9));
        }
        if let Some(d) = &self.defect {
            kv("defect", sig(d.defect, 9));
            kv("defect.scaled", sig(d.scaled(), 9));
        }
        if let Some(u) = &self.unrelaxed {
            kv("unrelaxed", u.verdict.name().into());
            kv("unrelaxed.k0_residual", sig(u.k0_residual, 9));
            kv("unrelaxed.ic_residual", sig(u.ic_residual, 9));
        }
        kv("grid.points", self.grid_points.to_string());
        kv("grid.lo", sig(self.grid_range.0, 9));
        kv("grid.hi", sig(self.grid_range.1, 9));
        kv("tol", sig(self.tol, 9));
        out
    }
}

impl fmt::Display for CommutativityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pair orders      {}-{}", self.orders.0, self.orders.1)?;
        writeln!(f, "verdict          {}", self.verdict)?;
        if let Some(c) = &self.constants {
            writeln!(f, "constants        {c}")?;
        }
        for r in &self.residuals {
            writeln!(f, "residual {:<8} {}", r.name, sig(r.value, 9))?;
        }
        if let Some(d) = &self.defect {
            writeln!(
                f,
                "defect           {} (scaled {})",
                sig(d.defect, 9),
                sig(d.scaled(), 9)
            )?;
        }
        if let Some(u) = &self.unrelaxed {
            writeln!(f, "initial state    {}", u.verdict.name())?;
            writeln!(
                f,
                "  y_A(t0)={} y_B(t0)={} |k0-(1-k1)|={} ic residual={}",
                sig(u.y_a, 9),
                sig(u.y_b, 9),
                sig(u.k0_residual, 9),
                sig(u.ic_residual, 9)
            )?;
            for n in &u.notes {
                writeln!(f, "  {n}")?;
            }
        }
        writeln!(
            f,
            "grid             {} points on [{}, {}], tol {}",
            self.grid_points,
            sig(self.grid_range.0, 9),
            sig(self.grid_range.1, 9),
            sig(self.tol, 9)
        )?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Grid mean and the largest deviation from it relative to `max(1, |mean|)`.
pub fn constancy(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dev = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    (mean, dev / mean.abs().max(1.0))
}

fn sample(e: &Expr, grid: &Grid) -> Result<Vec<f64>> {
    grid.iter().map(|&t| Ok(e.eval(t)?)).collect()
}

fn check_shared_grid(a: &LtvSystem, b: &LtvSystem, grid: &Grid) -> Result<()> {
    a.check_grid(grid)?;
    b.check_grid(grid)
}

fn nonvanishing(values: &[f64], grid: &Grid) -> Result<()> {
    match values.iter().position(|v| *v == 0.0) {
        Some(i) => Err(Error::LeadingCoefficientVanishes {
            t: grid[i],
            value: 0.0,
        }),
        None => Ok(()),
    }
}

fn ratio(num: &[f64], den: &[f64]) -> Vec<f64> {
    num.iter().zip(den).map(|(n, d)| n / d).collect()
}

/// `b_i - k * a_i` pointwise.
fn remainder(b: &[f64], k: f64, a: &[f64]) -> Vec<f64> {
    b.iter().zip(a).map(|(b, a)| b - k * a).collect()
}

fn leading_nonzero(k: f64, tol: f64) -> bool {
    k.abs() > tol
}

/// Constants `(k1, k0)` with `b = k1 a + k0` for two first-order systems.
pub fn extract_first_order_constants(
    a: &LtvSystem,
    b: &LtvSystem,
    grid: &Grid,
    tol: f64,
) -> Result<CommutativityReport> {
    a.require_order(1)?;
    b.require_order(1)?;
    check_shared_grid(a, b, grid)?;
    let a1 = sample(a.coeff(1), grid)?;
    let a0 = sample(a.coeff(0), grid)?;
    let b1 = sample(b.coeff(1), grid)?;
    let b0 = sample(b.coeff(0), grid)?;
    nonvanishing(&a1, grid)?;
    let (k1, r1) = constancy(&ratio(&b1, &a1));
    let (k0, r0) = constancy(&remainder(&b0, k1, &a0));
    let mut report = CommutativityReport::new(a, b, grid, tol);
    report.constants = Some(PairConstants::First { k1, k0 });
    report.residual("k1", r1);
    report.residual("k0", r0);
    report.verdict = if report.residuals_pass() && leading_nonzero(k1, tol) {
        Verdict::Commutative
    } else {
        Verdict::NotCommutative
    };
    Ok(report)
}

/// `S = s1 D + s0` with `s1 = sqrt(a2)`, `s0 = (2 a1 - a2') / (4 sqrt(a2))`.
#[derive(Debug, Clone)]
pub struct SqrtOperator {
    pub s1: Expr,
    pub s0: Expr,
}

/// Square-root operator of a second-order system. Requires `a2 > 0`.
pub fn sqrt_operator(a: &LtvSystem) -> Result<SqrtOperator> {
    a.require_order(2)?;
    let a2 = a.coeff(2);
    let s1 = Expr::pow(a2.clone(), 0.5);
    let num = Expr::sub(Expr::scale(2.0, a.coeff(1).clone()), a2.differentiate());
    let s0 = Expr::div(num, Expr::scale(4.0, s1.clone()));
    Ok(SqrtOperator { s1, s0 })
}

/// `a0 - (4a1^2 + 3a2'^2 - 8a1a2' + 8a1'a2 - 4a2a2'') / (16 a2)`.
pub fn second_order_bracket(a: &LtvSystem) -> Result<Expr> {
    a.require_order(2)?;
    let (a0, a1, a2) = (a.coeff(0).clone(), a.coeff(1).clone(), a.coeff(2).clone());
    let d1 = a1.differentiate();
    let d2 = a2.differentiate();
    let dd2 = d2.differentiate();
    let sq = |e: &Expr| Expr::pow(e.clone(), 2.0);
    let terms = [
        Expr::scale(4.0, sq(&a1)),
        Expr::scale(3.0, sq(&d2)),
        Expr::scale(-8.0, Expr::mul(a1.clone(), d2.clone())),
        Expr::scale(8.0, Expr::mul(d1, a2.clone())),
        Expr::scale(-4.0, Expr::mul(a2.clone(), dd2)),
    ];
    let num = terms.into_iter().reduce(Expr::add).expect("five terms");
    Ok(Expr::sub(a0, Expr::div(num, Expr::scale(16.0, a2))))
}

/// Bracket constancy of a second-order system on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketCheck {
    /// Grid mean of the bracket: the free constant `A0`.
    pub free: f64,
    pub residual: f64,
    /// Smallest value of `a2` on the grid.
    pub min_leading: f64,
}

impl BracketCheck {
    pub fn eligible(&self, tol: f64) -> bool {
        self.residual < tol && self.min_leading > 0.0
    }
}

pub fn check_bracket(a: &LtvSystem, grid: &Grid) -> Result<BracketCheck> {
    let bracket = second_order_bracket(a)?;
    a.check_grid(grid)?;
    let a2 = sample(a.coeff(2), grid)?;
    let min_leading = a2.iter().copied().fold(f64::INFINITY, f64::min);
    let (free, residual) = constancy(&sample(&bracket, grid)?);
    Ok(BracketCheck {
        free,
        residual,
        min_leading,
    })
}

fn domain_grid(s: &LtvSystem) -> Result<Grid> {
    let d = s.domain();
    if d.lo == d.hi {
        Grid::new(vec![d.lo])
    } else {
        Grid::uniform(d.lo, d.hi, PRECONDITION_POINTS)
    }
}

fn require_positive_leading(a: &LtvSystem) -> Result<BracketCheck> {
    let check = check_bracket(a, &domain_grid(a)?)?;
    if !(check.min_leading > 0.0) {
        return Err(Error::InvalidSystem(format!(
            "second-order coefficient must be positive for a square root (min {})",
            sig(check.min_leading, 9)
        )));
    }
    Ok(check)
}

fn require_eligible(a: &LtvSystem) -> Result<BracketCheck> {
    let check = require_positive_leading(a)?;
    if check.residual >= DEFAULT_CONSTANCY_TOL {
        return Err(Error::InvalidSystem(format!(
            "bracket is not constant over the domain (residual {}); no first-order partner exists",
            sig(check.residual, 9)
        )));
    }
    Ok(check)
}

fn synthesized(src: &LtvSystem, coeffs: Vec<Expr>) -> Result<LtvSystem> {
    let n = coeffs.len() - 1;
    LtvSystem::new(coeffs, src.t0(), vec![0.0; n], src.domain())
}

fn require_nonzero(name: &str, k: f64) -> Result<()> {
    if k == 0.0 || !k.is_finite() {
        Err(Error::invalid(format!("{name} must be finite and nonzero")))
    } else {
        Ok(())
    }
}

/// `b1 = k1 a1`, `b0 = k1 a0 + k0`.
pub fn synthesize_first_order_pair(a: &LtvSystem, k1: f64, k0: f64) -> Result<LtvSystem> {
    a.require_order(1)?;
    require_nonzero("k1", k1)?;
    let b1 = Expr::scale(k1, a.coeff(1).clone());
    let b0 = Expr::add(Expr::scale(k1, a.coeff(0).clone()), Expr::constant(k0));
    synthesized(a, vec![b0, b1])
}

/// First-order partner `k1 S_A + k0` of an eligible second-order system.
pub fn synthesize_first_from_second(a: &LtvSystem, k1: f64, k0: f64) -> Result<LtvSystem> {
    a.require_order(2)?;
    require_nonzero("k1", k1)?;
    require_eligible(a)?;
    let s = sqrt_operator(a)?;
    let b1 = Expr::scale(k1, s.s1);
    let b0 = Expr::add(Expr::scale(k1, s.s0), Expr::constant(k0));
    synthesized(a, vec![b0, b1])
}

/// Second-order partner `k2 A + k1 S_A + k0`.
pub fn synthesize_second_order_pair(a: &LtvSystem, k2: f64, k1: f64, k0: f64) -> Result<LtvSystem> {
    a.require_order(2)?;
    require_nonzero("k2", k2)?;
    let scaled = |i: usize| Expr::scale(k2, a.coeff(i).clone());
    if k1 == 0.0 {
        return synthesized(
            a,
            vec![
                Expr::add(scaled(0), Expr::constant(k0)),
                scaled(1),
                scaled(2),
            ],
        );
    }
    require_eligible(a)?;
    let s = sqrt_operator(a)?;
    let b2 = scaled(2);
    let b1 = Expr::add(scaled(1), Expr::scale(k1, s.s1));
    let b0 = Expr::add(
        Expr::add(scaled(0), Expr::scale(k1, s.s0)),
        Expr::constant(k0),
    );
    synthesized(a, vec![b0, b1, b2])
}

/// Second-order `C` with `B = l1 S_C + l0` and free constant `c0_free`:
/// `c2 = b1^2/l1^2`, `c1 = b1 (2b0 - 2l0 + b1') / l1^2`,
/// `c0 = C0 + ((b0 - l0)/l1)^2 + b1 b0' / l1^2`.
pub fn synthesize_second_from_first(
    b: &LtvSystem,
    l1: f64,
    l0: f64,
    c0_free: f64,
) -> Result<LtvSystem> {
    b.require_order(1)?;
    require_nonzero("l1", l1)?;
    let (b0, b1) = (b.coeff(0).clone(), b.coeff(1).clone());
    let inv = 1.0 / (l1 * l1);
    let c2 = Expr::scale(inv, Expr::pow(b1.clone(), 2.0));
    let inner = Expr::add(
        Expr::scale(2.0, Expr::sub(b0.clone(), Expr::constant(l0))),
        b1.differentiate(),
    );
    let c1 = Expr::scale(inv, Expr::mul(b1.clone(), inner));
    let shifted = Expr::scale(1.0 / l1, Expr::sub(b0.clone(), Expr::constant(l0)));
    let c0 = Expr::add(
        Expr::add(Expr::constant(c0_free), Expr::pow(shifted, 2.0)),
        Expr::scale(inv, Expr::mul(b1, b0.differentiate())),
    );
    synthesized(b, vec![c0, c1, c2])
}

/// Mixed pair: the first-order member is `k1 S_X + k0` for the second-order
/// member `X`; the free constant is `X`'s bracket value.
fn extract_mixed(
    a: &LtvSystem,
    b: &LtvSystem,
    grid: &Grid,
    tol: f64,
) -> Result<CommutativityReport> {
    let (x, y) = if a.order() == 2 { (a, b) } else { (b, a) };
    check_shared_grid(a, b, grid)?;
    let mut report = CommutativityReport::new(a, b, grid, tol);
    let bracket = check_bracket(x, grid)?;
    if !(bracket.min_leading > 0.0) {
        report
            .notes
            .push("second-order coefficient is not positive on the grid; no square root".into());
        return Ok(report);
    }
    let s = sqrt_operator(x)?;
    let s1 = sample(&s.s1, grid)?;
    let s0 = sample(&s.s0, grid)?;
    let y1 = sample(y.coeff(1), grid)?;
    let y0 = sample(y.coeff(0), grid)?;
    let (k1, r1) = constancy(&ratio(&y1, &s1));
    let (k0, r0) = constancy(&remainder(&y0, k1, &s0));
    report.constants = Some(PairConstants::MixedFree {
        k1,
        k0,
        free: bracket.free,
    });
    report.residual("k1", r1);
    report.residual("k0", r0);
    report.residual("bracket", bracket.residual);
    report.notes.push(format!(
        "first-order member expressed through the square-root operator of the {} system",
        if a.order() == 2 { "first" } else { "second" }
    ));
    report.verdict = if report.residuals_pass() && leading_nonzero(k1, tol) {
        Verdict::Commutative
    } else {
        // the relation is known to be sufficient, not necessary
        report.notes.push(
            "mixed-order condition failed; it is sufficient only, see the numerical defect".into(),
        );
        Verdict::Inconclusive
    };
    Ok(report)
}

/// `B = m2 A + m1 S_A + m0` for two second-order systems.
fn extract_second_order(
    a: &LtvSystem,
    b: &LtvSystem,
    grid: &Grid,
    tol: f64,
) -> Result<CommutativityReport> {
    check_shared_grid(a, b, grid)?;
    let mut report = CommutativityReport::new(a, b, grid, tol);
    let a_c: Vec<Vec<f64>> = (0..3)
        .map(|i| sample(a.coeff(i), grid))
        .collect::<Result<_>>()?;
    let b_c: Vec<Vec<f64>> = (0..3)
        .map(|i| sample(b.coeff(i), grid))
        .collect::<Result<_>>()?;
    nonvanishing(&a_c[2], grid)?;
    let (m2, r2) = constancy(&ratio(&b_c[2], &a_c[2]));
    let rem1 = remainder(&b_c[1], m2, &a_c[1]);
    let rem0 = remainder(&b_c[0], m2, &a_c[0]);
    let scale1 = b_c[1].iter().map(|v| v.abs()).fold(1.0, f64::max);
    let no_root_term = rem1.iter().all(|r| r.abs() <= tol * scale1);

    let (m1, m0) = if no_root_term {
        let (m0, r0) = constancy(&rem0);
        report.residual("k2", r2);
        report.residual("k0", r0);
        (0.0, m0)
    } else {
        let bracket = check_bracket(a, grid)?;
        if !(bracket.min_leading > 0.0) {
            report.notes.push(
                "second-order coefficient is not positive on the grid; no square root".into(),
            );
            return Ok(report);
        }
        let s = sqrt_operator(a)?;
        let s1 = sample(&s.s1, grid)?;
        let s0 = sample(&s.s0, grid)?;
        let (m1, r1) = constancy(&ratio(&rem1, &s1));
        let (m0, r0) = constancy(&remainder(&rem0, m1, &s0));
        report.residual("k2", r2);
        report.residual("k1", r1);
        report.residual("k0", r0);
        report.residual("bracket", bracket.residual);
        (m1, m0)
    };
    report.constants = Some(PairConstants::Second {
        k2: m2,
        k1: m1,
        k0: m0,
    });
    report.verdict = if report.residuals_pass() && leading_nonzero(m2, tol) {
        Verdict::Commutative
    } else {
        report.notes.push(
            "second-order condition failed; it is sufficient only, see the numerical defect".into(),
        );
        Verdict::Inconclusive
    };
    Ok(report)
}

fn extract_scalar(
    a: &LtvSystem,
    b: &LtvSystem,
    grid: &Grid,
    tol: f64,
) -> Result<CommutativityReport> {
    check_shared_grid(a, b, grid)?;
    let mut report = CommutativityReport::new(a, b, grid, tol);
    if a.is_scalar() && b.is_scalar() {
        report.verdict = Verdict::Commutative;
        report
            .notes
            .push("two scalar systems always commute".into());
        return Ok(report);
    }
    let scalar = if a.is_scalar() { a } else { b };
    let (gain, r) = constancy(&sample(scalar.coeff(0), grid)?);
    report.residual("gain", r);
    report.verdict = if r < tol {
        report.notes.push(format!(
            "constant gain 1/{} commutes with every system",
            sig(gain, 9)
        ));
        Verdict::Commutative
    } else {
        report
            .notes
            .push("a time-varying scalar commutes only with scalars".into());
        Verdict::NotCommutative
    };
    Ok(report)
}

/// Constants and constancy residuals for any pair of supported orders.
/// Orders above two yield an inconclusive report.
pub fn extract_pair_constants(
    a: &LtvSystem,
    b: &LtvSystem,
    grid: &Grid,
    tol: f64,
) -> Result<CommutativityReport> {
    match (a.order(), b.order()) {
        (0, _) | (_, 0) => extract_scalar(a, b, grid, tol),
        (1, 1) => extract_first_order_constants(a, b, grid, tol),
        (1, 2) | (2, 1) => extract_mixed(a, b, grid, tol),
        (2, 2) => extract_second_order(a, b, grid, tol),
        _ => {
            check_shared_grid(a, b, grid)?;
            let mut r = CommutativityReport::new(a, b, grid, tol);
            r.notes.push(
                "no algebraic conditions above second order; use the numerical defect".into(),
            );
            Ok(r)
        }
    }
}

fn ic_residual(a: &LtvSystem, b: &LtvSystem, t: f64) -> Result<f64> {
    let side =
        |s: &LtvSystem| -> Result<f64> { Ok((1.0 - s.coeff(0).eval(t)?) / s.coeff(1).eval(t)?) };
    Ok((side(a)? - side(b)?).abs())
}

/// Initial-condition conditions for a first-order pair with nonzero
/// initial outputs: `y_A(t0) = y_B(t0) != 0` and `k0 = 1 - k1`.
pub fn check_unrelaxed(
    a: &LtvSystem,
    b: &LtvSystem,
    mut report: CommutativityReport,
) -> Result<CommutativityReport> {
    let Some(PairConstants::First { k1, k0 }) = report.constants else {
        report
            .notes
            .push("initial-condition conditions are only available for first-order pairs".into());
        return Ok(report);
    };
    let tol = report.tol;
    let t0 = a.t0();
    let (y_a, y_b) = (a.initial_state()[0], b.initial_state()[0]);
    let mut notes = Vec::new();
    let k0_residual = (k0 - (1.0 - k1)).abs();
    let ic_res = ic_residual(a, b, t0)?;
    let grid = Grid::uniform(report.grid_range.0, report.grid_range.1, report.grid_points)?;
    let mut over_grid = 0.0f64;
    for &t in grid.iter() {
        over_grid = over_grid.max(ic_residual(a, b, t)?);
    }

    let verdict = if a.is_relaxed() && b.is_relaxed() {
        notes.push("zero initial state; the relaxed verdict stands".into());
        UnrelaxedVerdict::NotApplicable
    } else {
        let mut ok = report.verdict == Verdict::Commutative;
        if a.t0() != b.t0() {
            notes.push(format!(
                "initial times differ ({} vs {})",
                sig(a.t0(), 9),
                sig(b.t0(), 9)
            ));
            ok = false;
        }
        if (y_a - y_b).abs() > tol * y_a.abs().max(1.0) || y_a == 0.0 {
            notes.push("initial outputs must be equal and nonzero".into());
            ok = false;
        }
        if k0_residual >= tol {
            notes.push(format!(
                "k0 = {} but 1 - k1 = {}",
                sig(k0, 9),
                sig(1.0 - k1, 9)
            ));
            ok = false;
        }
        if ic_res >= tol {
            ok = false;
        }
        if ok {
            UnrelaxedVerdict::Commutative
        } else {
            UnrelaxedVerdict::NotCommutative
        }
    };
    if over_grid < tol {
        notes.push("the condition holds for every initial time on the grid".into());
    }
    report.unrelaxed = Some(UnrelaxedCheck {
        verdict,
        t0,
        y_a,
        y_b,
        k0_residual,
        ic_residual: ic_res,
        ic_residual_over_grid: over_grid,
        notes,
    });
    Ok(report)
}

/// Full check: algebraic extraction, the initial-condition conditions for
/// first-order pairs, and the numerical defect from `t0` over `grid`.
/// When the algebra is inconclusive the verdict follows the defect, scaled
/// by `max(1, peak |h|)`.
pub fn check_pair(
    a: &LtvSystem,
    b: &LtvSystem,
    t0: f64,
    grid: &Grid,
    tol: f64,
    ode_tol: f64,
) -> Result<CommutativityReport> {
    let report = extract_pair_constants(a, b, grid, tol)?;
    let mut report = if a.order() == 1 && b.order() == 1 {
        check_unrelaxed(a, b, report)?
    } else {
        report
    };
    let defect = cascade_pair(a, b, t0, grid, ode_tol)?;
    if report.verdict == Verdict::Inconclusive {
        report.verdict = if defect.scaled() < tol {
            Verdict::Commutative
        } else {
            Verdict::NotCommutative
        };
        report
            .notes
            .push("verdict from the numerical defect only".into());
    }
    report.defect = Some(defect);
    Ok(report)
}
