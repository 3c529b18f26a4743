use super::{Expr, Func, Node};

pub(super) fn derivative(e: &Expr) -> Expr {
    match e.node() {
        Node::Const(_) => Expr::constant(0.0),
        Node::Var => Expr::constant(1.0),
        Node::Neg(a) => Expr::neg(derivative(a)),
        Node::Add(a, b) => Expr::add(derivative(a), derivative(b)),
        Node::Sub(a, b) => Expr::sub(derivative(a), derivative(b)),
        Node::Mul(a, b) => Expr::add(
            Expr::mul(derivative(a), b.clone()),
            Expr::mul(a.clone(), derivative(b)),
        ),
        Node::Div(a, b) => {
            let da = derivative(a);
            let db = derivative(b);
            if db.as_constant() == Some(0.0) {
                Expr::div(da, b.clone())
            } else {
                Expr::div(
                    Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db)),
                    Expr::pow(b.clone(), 2.0),
                )
            }
        }
        Node::Pow(a, p) => Expr::mul(
            Expr::scale(*p, Expr::pow(a.clone(), p - 1.0)),
            derivative(a),
        ),
        Node::Call(f, a) => {
            let da = derivative(a);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => return Expr::div(da, a.clone()),
                Func::Sqrt => {
                    return Expr::div(da, Expr::scale(2.0, e.clone()));
                }
                Func::Sin => Expr::call(Func::Cos, a.clone()),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, a.clone())),
            };
            Expr::mul(outer, da)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn d_at(s: &str, t: f64) -> f64 {
        parse(s).unwrap().differentiate().eval(t).unwrap()
    }

    #[test]
    fn textbook_rules() {
        for i in 0..10 {
            let t = -0.5 + 0.4 * i as f64;
            assert!((d_at("(t+1)^2", t) - 2.0 * (t + 1.0)).abs() < 1e-14);
        }
        assert_eq!(
            parse("3*(t+1)").unwrap().differentiate().as_constant(),
            Some(3.0)
        );
        assert_eq!(parse("5").unwrap().differentiate().as_constant(), Some(0.0));
        assert!((d_at("ln(t)", 2.0) - 0.5).abs() < 1e-15);
        assert!((d_at("sqrt(t)", 4.0) - 0.25).abs() < 1e-15);
        assert!((d_at("sin(2*t)", 0.0) - 2.0).abs() < 1e-15);
        assert!((d_at("cos(t)", 0.5) + 0.5f64.sin()).abs() < 1e-15);
        assert!((d_at("exp(-t)", 0.0) + 1.0).abs() < 1e-15);
        assert!((d_at("1/t", 2.0) + 0.25).abs() < 1e-15);
        assert!((d_at("t/(t+1)", 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn time_invariant_derivative_folds_to_zero() {
        let d = parse("exp(2)*3 + sqrt(5)").unwrap().differentiate();
        assert_eq!(d.as_constant(), Some(0.0));
    }
}
