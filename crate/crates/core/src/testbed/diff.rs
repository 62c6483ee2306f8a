//! Symbolic differentiation with literal constant folding.

use thiserror::Error;

use super::expr::{BinOp, Expr, Func};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("non-differentiable primitive `{0}`")]
pub struct NonDifferentiable(pub &'static str);

fn is_const(e: &Expr, value: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == value)
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) if is_const(&a, 0.0) => b,
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) => Expr::binary(BinOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) if is_const(&a, 0.0) => neg(b),
        (a, b) => Expr::binary(BinOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, _) if is_const(&a, 0.0) => Expr::Const(0.0),
        (_, b) if is_const(&b, 0.0) => Expr::Const(0.0),
        (a, b) if is_const(&a, 1.0) => b,
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Expr::binary(BinOp::Mul, a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) if y != 0.0 => Expr::Const(x / y),
        (a, _) if is_const(&a, 0.0) => Expr::Const(0.0),
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Expr::binary(BinOp::Div, a, b),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (a, b) if is_const(&b, 1.0) => a,
        (_, b) if is_const(&b, 0.0) => Expr::Const(1.0),
        (Expr::Const(x), Expr::Const(y)) if x > 0.0 => Expr::Const(x.powf(y)),
        (a, b) => Expr::binary(BinOp::Pow, a, b),
    }
}

/// Returns `d/dx` of `expr`. Fails on `abs`.
pub fn differentiate(expr: &Expr) -> Result<Expr, NonDifferentiable> {
    Ok(match expr {
        Expr::Const(_) | Expr::Pi | Expr::E => Expr::Const(0.0),
        Expr::Var => Expr::Const(1.0),
        Expr::Neg(a) => neg(differentiate(a)?),
        Expr::Binary(op, a, b) => {
            let (u, v) = (a.as_ref().clone(), b.as_ref().clone());
            let du = differentiate(a)?;
            let dv = differentiate(b)?;
            match op {
                BinOp::Add => add(du, dv),
                BinOp::Sub => sub(du, dv),
                BinOp::Mul => add(mul(du, v), mul(u, dv)),
                BinOp::Div => div(
                    sub(mul(du, v.clone()), mul(u, dv)),
                    pow(v, Expr::Const(2.0)),
                ),
                BinOp::Pow if !b.depends_on_x() => {
                    // d(u^c) = c u^(c-1) u'
                    let exponent = sub(v.clone(), Expr::Const(1.0));
                    mul(mul(v, pow(u, exponent)), du)
                }
                BinOp::Pow if !a.depends_on_x() => {
                    // d(c^v) = c^v ln(c) v'
                    mul(mul(pow(u.clone(), v), Expr::call(Func::Log, u)), dv)
                }
                BinOp::Pow => {
                    // d(u^v) = u^v (v' ln u + v u' / u)
                    let power = pow(u.clone(), v.clone());
                    let log_part = mul(dv, Expr::call(Func::Log, u.clone()));
                    let ratio_part = div(mul(v, du), u);
                    mul(power, add(log_part, ratio_part))
                }
            }
        }
        Expr::Call(func, a) => {
            let u = a.as_ref().clone();
            let du = differentiate(a)?;
            let outer = match func {
                Func::Sin => Expr::call(Func::Cos, u),
                Func::Cos => neg(Expr::call(Func::Sin, u)),
                Func::Tan => div(
                    Expr::Const(1.0),
                    pow(Expr::call(Func::Cos, u), Expr::Const(2.0)),
                ),
                Func::Exp => Expr::call(Func::Exp, u),
                Func::Log => div(Expr::Const(1.0), u),
                Func::Sqrt => div(
                    Expr::Const(1.0),
                    mul(Expr::Const(2.0), Expr::call(Func::Sqrt, u)),
                ),
                Func::Abs => return Err(NonDifferentiable("abs")),
            };
            mul(outer, du)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::expr::parse_expression;

    fn d(s: &str) -> Expr {
        differentiate(&parse_expression(s).unwrap()).unwrap()
    }

    fn central(e: &Expr, x: f64) -> f64 {
        let h = 1e-6 * x.abs().max(1.0);
        (e.eval(x + h).unwrap() - e.eval(x - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn square_becomes_two_x() {
        assert_eq!(
            d("x^2"),
            Expr::binary(BinOp::Mul, Expr::Const(2.0), Expr::Var)
        );
        assert_eq!(d("x"), Expr::Const(1.0));
        assert_eq!(d("3*pi"), Expr::Const(0.0));
    }

    #[test]
    fn squared_sine_closed_form() {
        let x: f64 = 0.3;
        let got = d("sin(x)^2").eval(x).unwrap();
        assert!((got - 2.0 * x.sin() * x.cos()).abs() < 1e-12);
    }

    #[test]
    fn abs_is_rejected() {
        let e = parse_expression("1 + abs(x - 2)").unwrap();
        assert_eq!(differentiate(&e), Err(NonDifferentiable("abs")));
    }

    #[test]
    fn matches_finite_differences() {
        let cases = [
            "x^3 - 2*x + 1",
            "sin(3*x) / (1 + x^2)",
            "exp(-x) * cos(x)",
            "log(x + 4) + sqrt(x + 5)",
            "tan(x / 4)",
            "2^x",
            "(x + 3)^(x / 5 + 1)",
            "-(x - 1)^2 * e^x",
            "pi * x - 1/(x + 7)",
        ];
        for s in cases {
            let e = parse_expression(s).unwrap();
            let de = differentiate(&e).unwrap();
            for i in 0..=40 {
                let x = -2.0 + 0.1 * i as f64;
                let exact = de.eval(x).unwrap();
                let approx = central(&e, x);
                assert!(
                    (exact - approx).abs() <= 1e-6 * exact.abs().max(1.0),
                    "{s} at {x}: {exact} vs {approx}"
                );
            }
        }
    }
}
