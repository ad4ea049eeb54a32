//! Numeric evaluation.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;

use super::{Exponent, Expr, ExprError, Node, Symbol};

/// Numeric values bound to symbols.
pub type Point = BTreeMap<Symbol, f64>;

/// Evaluate `e` at `point`.
pub fn eval(e: &Expr, point: &Point) -> Result<f64, ExprError> {
    eval_with_scale(e, point).map(|(v, _)| v)
}

/// Evaluate `e` and return `(value, scale)`. The scale is a magnitude bound
/// computed as if no cancellation happened anywhere: every sum contributes
/// the sum of its terms' magnitudes. It is at least the magnitude of the
/// largest additive term at the top level, and it is what residual
/// tolerances are measured against.
pub fn eval_with_scale(e: &Expr, point: &Point) -> Result<(f64, f64), ExprError> {
    let mut memo = HashMap::new();
    eval_rec(e, point, &mut memo)
}

fn eval_rec(e: &Expr, point: &Point, memo: &mut HashMap<usize, (f64, f64)>) -> Result<(f64, f64), ExprError> {
    if let Some(v) = memo.get(&e.ptr()) {
        return Ok(*v);
    }
    let out = match e.node() {
        Node::Const(c) => {
            let v = c.to_f64().unwrap_or(f64::NAN);
            (v, v.abs())
        }
        Node::Sym(s) => {
            let v = *point.get(s).ok_or_else(|| ExprError::Unbound(s.name().to_string()))?;
            (v, v.abs())
        }
        Node::Add(cs) => {
            let (mut v, mut m) = (0.0, 0.0);
            for c in cs {
                let (cv, cm) = eval_rec(c, point, memo)?;
                v += cv;
                m += cm;
            }
            (v, m)
        }
        Node::Mul(cs) => {
            let (mut v, mut m) = (1.0, 1.0);
            for c in cs {
                let (cv, cm) = eval_rec(c, point, memo)?;
                v *= cv;
                m *= cm;
            }
            (v, m)
        }
        Node::Pow(b, p) => {
            let (bv, bm) = eval_rec(b, point, memo)?;
            let v = power(bv, p)?;
            let q = p.to_f64();
            let m = if q > 0.0 {
                bm.powf(q) * q.max(1.0)
            } else {
                v.abs() * (1.0 + q.abs() * bm / bv.abs())
            };
            (v, m)
        }
        Node::Exp(a) => {
            let (av, am) = eval_rec(a, point, memo)?;
            let v = av.exp();
            (v, v.abs() * (1.0 + am))
        }
        Node::Ln(a) => {
            let (av, am) = eval_rec(a, point, memo)?;
            if av <= 0.0 {
                return Err(ExprError::Domain(format!("ln of non-positive value {av}")));
            }
            let v = av.ln();
            (v, v.abs() + am / av)
        }
    };
    if !out.0.is_finite() {
        return Err(ExprError::Domain(format!("non-finite value while evaluating {e}")));
    }
    memo.insert(e.ptr(), out);
    Ok(out)
}

fn power(b: f64, p: &Exponent) -> Result<f64, ExprError> {
    match p {
        Exponent::Rational(r) if r.is_integer() => {
            let n = r.to_i32().ok_or_else(|| ExprError::Domain(format!("exponent {r} too large")))?;
            if b == 0.0 && n < 0 {
                return Err(ExprError::Domain("division by zero".into()));
            }
            Ok(b.powi(n))
        }
        _ => {
            let q = p.to_f64();
            if b < 0.0 {
                return Err(ExprError::Domain(format!("fractional power of negative value {b}")));
            }
            if b == 0.0 && q < 0.0 {
                return Err(ExprError::Domain("division by zero".into()));
            }
            Ok(b.powf(q))
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Var(usize),
    Add(Vec<usize>),
    Mul(Vec<usize>),
    PowI(usize, i32),
    PowF(usize, f64),
    Exp(usize),
    Ln(usize),
}

/// An expression flattened to a tape over a fixed variable order, for hot
/// numeric loops. Domain violations evaluate to NaN instead of an error.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    ops: Vec<Op>,
}

impl CompiledExpr {
    pub fn new(e: &Expr, vars: &[Symbol]) -> Result<Self, ExprError> {
        let mut ops = Vec::new();
        let mut memo = HashMap::new();
        compile_rec(e, vars, &mut ops, &mut memo)?;
        Ok(CompiledExpr { ops })
    }

    pub fn eval(&self, vars: &[f64], buf: &mut Vec<f64>) -> f64 {
        buf.clear();
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => *c,
                Op::Var(i) => vars[*i],
                Op::Add(ix) => ix.iter().map(|&i| buf[i]).sum(),
                Op::Mul(ix) => ix.iter().map(|&i| buf[i]).product(),
                Op::PowI(i, n) => buf[*i].powi(*n),
                Op::PowF(i, q) => {
                    let b = buf[*i];
                    if b < 0.0 {
                        f64::NAN
                    } else {
                        b.powf(*q)
                    }
                }
                Op::Exp(i) => buf[*i].exp(),
                Op::Ln(i) => {
                    let a = buf[*i];
                    if a <= 0.0 {
                        f64::NAN
                    } else {
                        a.ln()
                    }
                }
            };
            buf.push(v);
        }
        *buf.last().unwrap_or(&f64::NAN)
    }

    /// Convenience evaluation with a fresh buffer.
    pub fn eval_once(&self, vars: &[f64]) -> f64 {
        let mut buf = Vec::with_capacity(self.ops.len());
        self.eval(vars, &mut buf)
    }
}

fn compile_rec(
    e: &Expr,
    vars: &[Symbol],
    ops: &mut Vec<Op>,
    memo: &mut HashMap<usize, usize>,
) -> Result<usize, ExprError> {
    if let Some(&i) = memo.get(&e.ptr()) {
        return Ok(i);
    }
    let op = match e.node() {
        Node::Const(c) => Op::Const(c.to_f64().unwrap_or(f64::NAN)),
        Node::Sym(s) => {
            let i = vars
                .iter()
                .position(|v| v == s)
                .ok_or_else(|| ExprError::Unbound(s.name().to_string()))?;
            Op::Var(i)
        }
        Node::Add(cs) => {
            let ix = cs.iter().map(|c| compile_rec(c, vars, ops, memo)).collect::<Result<_, _>>()?;
            Op::Add(ix)
        }
        Node::Mul(cs) => {
            let ix = cs.iter().map(|c| compile_rec(c, vars, ops, memo)).collect::<Result<_, _>>()?;
            Op::Mul(ix)
        }
        Node::Pow(b, p) => {
            let i = compile_rec(b, vars, ops, memo)?;
            match p {
                Exponent::Rational(r) if r.is_integer() && r.to_i32().is_some() => Op::PowI(i, r.to_i32().unwrap()),
                _ => Op::PowF(i, p.to_f64()),
            }
        }
        Node::Exp(a) => Op::Exp(compile_rec(a, vars, ops, memo)?),
        Node::Ln(a) => Op::Ln(compile_rec(a, vars, ops, memo)?),
    };
    ops.push(op);
    let idx = ops.len() - 1;
    memo.insert(e.ptr(), idx);
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::super::{q, sym};
    use super::*;

    fn point(pairs: &[(Symbol, f64)]) -> Point {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn arithmetic() {
        // x^4 (u_x + f) at x=2, u_x=1, f=9
        let f = Symbol::parameter("f");
        let e = Expr::powi(sym::x().into(), 4) * (Expr::symbol(&sym::u_x()) + Expr::symbol(&f));
        let p = point(&[(sym::x(), 2.0), (sym::u_x(), 1.0), (f, 9.0)]);
        assert_eq!(eval(&e, &p).unwrap(), 160.0);
    }

    #[test]
    fn log_and_rational_power() {
        let p = point(&[(sym::x(), 1.0), (sym::u(), 8.0)]);
        assert_eq!(eval(&Expr::ln(sym::x().into()), &p).unwrap(), 0.0);
        let v = eval(&Expr::pow(sym::u().into(), q(4, 3)), &p).unwrap();
        assert!((v - 16.0).abs() < 1e-12);
    }

    #[test]
    fn domain_violations() {
        let p = point(&[(sym::x(), -1.0), (sym::u(), -8.0)]);
        assert!(matches!(eval(&Expr::ln(sym::x().into()), &p), Err(ExprError::Domain(_))));
        assert!(matches!(
            eval(&Expr::pow(sym::u().into(), q(1, 3)), &p),
            Err(ExprError::Domain(_))
        ));
        // integer powers of negative values are fine
        assert_eq!(eval(&Expr::powi(sym::u().into(), 2), &p).unwrap(), 64.0);
        assert!(matches!(eval(&Expr::symbol(&sym::t()), &p), Err(ExprError::Unbound(_))));
    }

    #[test]
    fn scale_sees_through_cancellation() {
        let x: Expr = sym::x().into();
        // (x + 1)^2 is not expanded, so the cancellation survives construction
        let e = Expr::powi(x.clone() + 1, 2) - Expr::powi(x.clone(), 2) - Expr::int(2) * &x;
        let p = point(&[(sym::x(), 1e6)]);
        let (v, m) = eval_with_scale(&e, &p).unwrap();
        assert_eq!(v, 1.0);
        assert!(m >= 1e6);
    }

    #[test]
    fn compiled_matches_tree() {
        let x: Expr = sym::x().into();
        let u: Expr = sym::u().into();
        let e = Expr::exp(x.clone()) * Expr::pow(u.clone(), q(1, 3)) + Expr::ln(x.clone() + &u) - Expr::powi(u, -2);
        let c = CompiledExpr::new(&e, &[sym::x(), sym::u()]).unwrap();
        let p = point(&[(sym::x(), 0.7), (sym::u(), 1.9)]);
        let a = eval(&e, &p).unwrap();
        let b = c.eval_once(&[0.7, 1.9]);
        assert!((a - b).abs() < 1e-14 * a.abs().max(1.0));
    }
}
