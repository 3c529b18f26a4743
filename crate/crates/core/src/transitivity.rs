//! Chains `A - B - C`: if `(A, B)` and `(B, C)` commute, does `(A, C)`?
//!
//! The `(A, C)` constants are predicted from the two known pairs and then
//! extracted independently from the coefficients of `A` and `C`; the two
//! must agree, and the numerical defect of every pair must be small.
//!
//! Prediction writes `A` and `C` against a common base operator `S`: `B`
//! itself when `B` is first order, otherwise the square-root operator
//! `S_B`. A first-order member is `alpha S + beta`; a second-order member
//! `X` has `S_X = sigma S + rho` and `X = S_X^2 + X0`.

use std::fmt;

use rayon::join;

use crate::commute::{
    check_bracket, check_pair, CommutativityReport, Verdict, DEFAULT_CONSTANCY_TOL,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::DEFAULT_TOL;
use crate::report::sig;
use crate::system::{LtvSystem, PairConstants};

/// `B = k1 A + k0` and `C = l1 B + l0` give `C = k1 l1 A + (k0 l1 + l0)`.
pub fn compose_first_order_constants(k1: f64, k0: f64, l1: f64, l0: f64) -> (f64, f64) {
    (k1 * l1, k0 * l1 + l0)
}

/// `B = k1 S_A + k0` and `B = l1 S_C + l0` give `C = m2 A + m1 S_A + m0`.
pub fn compose_mixed_constants(
    k1: f64,
    k0: f64,
    a0: f64,
    l1: f64,
    l0: f64,
    c0: f64,
) -> (f64, f64, f64) {
    let l1sq = l1 * l1;
    let m2 = k1 * k1 / l1sq;
    let m1 = 2.0 * k1 * (k0 - l0) / l1sq;
    let d = (k0 - l0) / l1;
    (m2, m1, c0 - a0 * m2 + d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    /// Shape covered by the first- and second-order theory.
    Algebraic,
    /// Three second-order members: the algebra runs, but transitivity for
    /// this shape has no published proof.
    UnprovenInSource,
    /// Verdict rests on the numerical defects alone.
    NumericalOnly,
}

impl ChainMode {
    pub fn name(self) -> &'static str {
        match self {
            ChainMode::Algebraic => "algebraic",
            ChainMode::UnprovenInSource => "unproven-in-source",
            ChainMode::NumericalOnly => "numerical-only",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub orders: [usize; 3],
    pub mode: ChainMode,
    pub ab: CommutativityReport,
    pub bc: CommutativityReport,
    pub ac: CommutativityReport,
    pub predicted: Option<PairConstants>,
    pub extracted: Option<PairConstants>,
    /// Relative distance between predicted and extracted constants.
    pub constants_gap: Option<f64>,
    pub transitive: bool,
    pub tol: f64,
    pub notes: Vec<String>,
}

impl ChainReport {
    pub fn shape(&self) -> String {
        format!("{}-{}-{}", self.orders[0], self.orders[1], self.orders[2])
    }

    fn pairs(&self) -> [(&'static str, &CommutativityReport); 3] {
        [("ab", &self.ab), ("bc", &self.bc), ("ac", &self.ac)]
    }

    pub fn machine_block(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k}={v}\n"));
        kv("transitive", self.transitive.to_string());
        kv("shape", self.shape());
        kv("mode", self.mode.name().into());
        for (name, r) in self.pairs() {
            kv(&format!("{name}.verdict"), r.verdict.name().into());
            if let Some(c) = &r.constants {
                for (k, v) in c.values() {
                    kv(&format!("{name}.const.{k}"), sig(v, 9));
                }
            }
            if let Some(d) = &r.defect {
                kv(&format!("{name}.defect"), sig(d.defect, 9));
            }
        }
        if let Some(p) = &self.predicted {
            for (k, v) in p.values() {
                kv(&format!("predicted.{k}"), sig(v, 9));
            }
        }
        if let Some(g) = self.constants_gap {
            kv("constants_gap", sig(g, 9));
        }
        kv("tol", sig(self.tol, 9));
        out
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "chain {}  mode {}", self.shape(), self.mode.name())?;
        for (name, r) in self.pairs() {
            let consts = r
                .constants
                .map(|c| c.to_string())
                .unwrap_or_else(|| "-".into());
            let defect = r
                .defect
                .as_ref()
                .map(|d| sig(d.defect, 9))
                .unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "  ({}) {:<16} constants {consts}  defect {defect}",
                name.to_uppercase(),
                r.verdict.name()
            )?;
        }
        if let Some(p) = &self.predicted {
            writeln!(f, "  predicted (A,C) {p}")?;
        }
        if let Some(e) = &self.extracted {
            writeln!(f, "  extracted (A,C) {e}")?;
        }
        if let Some(g) = self.constants_gap {
            writeln!(f, "  gap             {}", sig(g, 9))?;
        }
        writeln!(
            f,
            "transitive: {}",
            if self.transitive { "yes" } else { "no" }
        )?;
        if self.transitive {
            writeln!(
                f,
                "all six orderings ABC ACB BAC BCA CAB CBA have the same impulse response"
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// A chain member written against the base operator `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    /// `alpha S + beta`.
    First { alpha: f64, beta: f64 },
    /// `S_X = sigma S + rho`, `X = S_X^2 + free`.
    Second { sigma: f64, rho: f64, free: f64 },
}

fn eligible_free(x: &LtvSystem, grid: &Grid) -> Result<Option<f64>> {
    let chk = check_bracket(x, grid)?;
    Ok(chk.eligible(DEFAULT_CONSTANCY_TOL).then_some(chk.free))
}

/// `A` against `S`, from the `(A, B)` constants.
fn form_of_left(
    k: PairConstants,
    a: &LtvSystem,
    b: &LtvSystem,
    grid: &Grid,
) -> Result<Option<Form>> {
    Ok(match (k, a.order(), b.order()) {
        (PairConstants::First { k1, k0 }, 1, 1) => Some(Form::First {
            alpha: 1.0 / k1,
            beta: -k0 / k1,
        }),
        (PairConstants::MixedFree { k1, k0, free }, 2, 1) => Some(Form::Second {
            sigma: 1.0 / k1,
            rho: -k0 / k1,
            free,
        }),
        (PairConstants::MixedFree { k1, k0, .. }, 1, 2) => Some(Form::First {
            alpha: k1,
            beta: k0,
        }),
        (PairConstants::Second { k2, k1, .. }, 2, 2) if k2 > 0.0 => {
            let (Some(free), Some(_)) = (eligible_free(a, grid)?, eligible_free(b, grid)?) else {
                return Ok(None);
            };
            Some(Form::Second {
                sigma: 1.0 / k2.sqrt(),
                rho: -k1 / (2.0 * k2),
                free,
            })
        }
        _ => None,
    })
}

/// `C` against `S`, from the `(B, C)` constants.
fn form_of_right(
    k: PairConstants,
    b: &LtvSystem,
    c: &LtvSystem,
    grid: &Grid,
) -> Result<Option<Form>> {
    Ok(match (k, b.order(), c.order()) {
        (PairConstants::First { k1, k0 }, 1, 1) => Some(Form::First {
            alpha: k1,
            beta: k0,
        }),
        (PairConstants::MixedFree { k1, k0, free }, 1, 2) => Some(Form::Second {
            sigma: 1.0 / k1,
            rho: -k0 / k1,
            free,
        }),
        (PairConstants::MixedFree { k1, k0, .. }, 2, 1) => Some(Form::First {
            alpha: k1,
            beta: k0,
        }),
        (PairConstants::Second { k2, k1, .. }, 2, 2) if k2 > 0.0 => {
            let (Some(_), Some(free)) = (eligible_free(b, grid)?, eligible_free(c, grid)?) else {
                return Ok(None);
            };
            let r = k2.sqrt();
            Some(Form::Second {
                sigma: r,
                rho: k1 / (2.0 * r),
                free,
            })
        }
        _ => None,
    })
}

fn predict(a: Form, c: Form) -> PairConstants {
    match (a, c) {
        (
            Form::First {
                alpha: aa,
                beta: ba,
            },
            Form::First {
                alpha: ac,
                beta: bc,
            },
        ) => {
            let k1 = ac / aa;
            PairConstants::First {
                k1,
                k0: bc - k1 * ba,
            }
        }
        (Form::Second { sigma, rho, free }, Form::First { alpha, beta }) => {
            let k1 = alpha / sigma;
            PairConstants::MixedFree {
                k1,
                k0: beta - k1 * rho,
                free,
            }
        }
        (Form::First { alpha, beta }, Form::Second { sigma, rho, free }) => {
            let k1 = alpha / sigma;
            PairConstants::MixedFree {
                k1,
                k0: beta - k1 * rho,
                free,
            }
        }
        (
            Form::Second {
                sigma: sa,
                rho: ra,
                free: fa,
            },
            Form::Second {
                sigma: sc,
                rho: rc,
                free: fc,
            },
        ) => {
            let u = sc / sa;
            let v = rc - u * ra;
            PairConstants::Second {
                k2: u * u,
                k1: 2.0 * u * v,
                k0: v * v + fc - u * u * fa,
            }
        }
    }
}

/// The closed-form compositions where they apply, the general algebra
/// otherwise.
fn predicted_constants(
    ab: PairConstants,
    bc: PairConstants,
    a: &LtvSystem,
    b: &LtvSystem,
    c: &LtvSystem,
    grid: &Grid,
) -> Result<Option<PairConstants>> {
    use PairConstants::*;
    let direct = match (ab, bc, a.order(), b.order(), c.order()) {
        (First { k1, k0 }, First { k1: l1, k0: l0 }, 1, 1, 1) => {
            let (k1, k0) = compose_first_order_constants(k1, k0, l1, l0);
            Some(First { k1, k0 })
        }
        (MixedFree { k1, k0, free }, First { k1: l1, k0: l0 }, 2, 1, 1) => {
            let (k1, k0) = compose_first_order_constants(k1, k0, l1, l0);
            Some(MixedFree { k1, k0, free })
        }
        (
            MixedFree { k1, k0, free: a0 },
            MixedFree {
                k1: l1,
                k0: l0,
                free: c0,
            },
            2,
            1,
            2,
        ) => {
            let (k2, k1, k0) = compose_mixed_constants(k1, k0, a0, l1, l0, c0);
            Some(Second { k2, k1, k0 })
        }
        _ => None,
    };
    if direct.is_some() {
        return Ok(direct);
    }
    let (Some(fa), Some(fc)) = (
        form_of_left(ab, a, b, grid)?,
        form_of_right(bc, b, c, grid)?,
    ) else {
        return Ok(None);
    };
    Ok(Some(predict(fa, fc)))
}

fn pair_ok(r: &CommutativityReport, tol: f64) -> bool {
    r.verdict == Verdict::Commutative && r.defect.as_ref().map_or(false, |d| d.scaled() < tol)
}

/// Verify `A - B - C` on `grid`, with impulses applied at `grid.first()`.
pub fn verify_chain(
    a: &LtvSystem,
    b: &LtvSystem,
    c: &LtvSystem,
    grid: &Grid,
    tol: f64,
) -> Result<ChainReport> {
    verify_chain_with(a, b, c, grid, tol, DEFAULT_TOL)
}

pub fn verify_chain_with(
    a: &LtvSystem,
    b: &LtvSystem,
    c: &LtvSystem,
    grid: &Grid,
    tol: f64,
    ode_tol: f64,
) -> Result<ChainReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid("chain tolerance must be positive"));
    }
    let t0 = grid.first();
    let (ab, (bc, ac)) = join(
        || check_pair(a, b, t0, grid, tol, ode_tol),
        || {
            join(
                || check_pair(b, c, t0, grid, tol, ode_tol),
                || check_pair(a, c, t0, grid, tol, ode_tol),
            )
        },
    );
    let (ab, bc, ac) = (ab?, bc?, ac?);
    let orders = [a.order(), b.order(), c.order()];
    let mut notes = Vec::new();

    let in_theory = orders.iter().all(|&n| n == 1 || n == 2);
    let mut mode = if !in_theory {
        ChainMode::NumericalOnly
    } else if orders == [2, 2, 2] {
        ChainMode::UnprovenInSource
    } else {
        ChainMode::Algebraic
    };
    if !in_theory {
        notes
            .push("a member is outside first or second order; only the defects are checked".into());
    }

    let mut predicted = None;
    if mode != ChainMode::NumericalOnly {
        if let (Some(kab), Some(kbc)) = (ab.constants, bc.constants) {
            predicted = predicted_constants(kab, kbc, a, b, c, grid)?;
        }
        if predicted.is_none() {
            notes.push("no algebraic prediction for (A,C); the defects decide".into());
            mode = ChainMode::NumericalOnly;
        }
    }
    let extracted = ac.constants;
    let constants_gap = match (&predicted, &extracted) {
        (Some(p), Some(e)) => Some(p.distance(e)),
        _ => None,
    };

    let premises = pair_ok(&ab, tol) && pair_ok(&bc, tol);
    if !premises {
        notes.push("(A,B) or (B,C) does not commute; the chain has no premise".into());
    }
    let conclusion = pair_ok(&ac, tol);
    let algebra_agrees = match mode {
        ChainMode::NumericalOnly => true,
        _ => constants_gap.map_or(false, |g| g < tol),
    };
    if mode == ChainMode::UnprovenInSource {
        notes.push(
            "three second-order members: the algebra is checked but has no published proof".into(),
        );
    }

    Ok(ChainReport {
        orders,
        mode,
        ab,
        bc,
        ac,
        predicted,
        extracted,
        constants_gap,
        transitive: premises && conclusion && algebra_agrees,
        tol,
        notes,
    })
}
