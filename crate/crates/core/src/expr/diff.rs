//! Partial and total derivatives.

use std::collections::HashMap;

use num_traits::One;

use super::{Exponent, Expr, ExprError, FieldRole, JetContext, Node, Symbol, SymbolKind};

/// Apply the derivation defined by `rule` (the derivative of each symbol)
/// through the tree by the chain rule.
pub fn differentiate_with(
    e: &Expr,
    rule: &dyn Fn(&Symbol) -> Result<Expr, ExprError>,
) -> Result<Expr, ExprError> {
    let mut memo = HashMap::new();
    derive(e, rule, &mut memo)
}

fn derive(
    e: &Expr,
    rule: &dyn Fn(&Symbol) -> Result<Expr, ExprError>,
    memo: &mut HashMap<usize, Expr>,
) -> Result<Expr, ExprError> {
    if let Some(d) = memo.get(&e.ptr()) {
        return Ok(d.clone());
    }
    let d = match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Sym(s) => rule(s)?,
        Node::Add(cs) => {
            let mut terms = Vec::with_capacity(cs.len());
            for c in cs {
                terms.push(derive(c, rule, memo)?);
            }
            Expr::sum(terms)
        }
        Node::Mul(cs) => {
            let mut terms = Vec::with_capacity(cs.len());
            for (i, c) in cs.iter().enumerate() {
                let dc = derive(c, rule, memo)?;
                if dc.is_zero() {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(cs.len());
                factors.extend(cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()));
                factors.push(dc);
                terms.push(Expr::product(factors));
            }
            Expr::sum(terms)
        }
        Node::Pow(b, p) => {
            let db = derive(b, rule, memo)?;
            if db.is_zero() {
                Expr::zero()
            } else {
                let lowered = match p {
                    Exponent::Rational(r) => Exponent::Rational(r - super::Q::one()),
                    Exponent::Real(r) => Exponent::Real(r - 1.0),
                };
                let coeff = match p {
                    Exponent::Rational(r) => Expr::constant(r.clone()),
                    // f64 values are dyadic rationals, so this is exact
                    Exponent::Real(r) => Expr::constant(real_to_q(*r)),
                };
                Expr::product([coeff, Expr::pow_exponent(b.clone(), lowered), db])
            }
        }
        Node::Exp(a) => {
            let da = derive(a, rule, memo)?;
            Expr::product([e.clone(), da])
        }
        Node::Ln(a) => {
            let da = derive(a, rule, memo)?;
            Expr::product([da, Expr::powi(a.clone(), -1)])
        }
    };
    memo.insert(e.ptr(), d.clone());
    Ok(d)
}

fn real_to_q(r: f64) -> super::Q {
    super::Q::from_float(r).unwrap_or_else(num_traits::Zero::zero)
}

/// Partial derivative with respect to the symbol `v`. Jet coordinates other
/// than `v` are held fixed; opaque functions and placeholders depending on
/// `v` differentiate to their tracked derivative symbols.
pub fn differentiate(e: &Expr, v: &Expr) -> Result<Expr, ExprError> {
    let Some(var) = v.as_symbol() else {
        return Err(ExprError::NotAVariable(v.to_string()));
    };
    let var = var.clone();
    let var_name = var.name().to_string();
    let independent = matches!(var.kind(), SymbolKind::Independent);
    differentiate_with(e, &|s: &Symbol| {
        if *s == var {
            return Ok(Expr::one());
        }
        if independent {
            if let SymbolKind::Field { role, .. } = s.kind() {
                if *role != FieldRole::Jet {
                    if let Some(d) = s.field_derivative(&var_name) {
                        return Ok(Expr::symbol(&d));
                    }
                }
            }
        }
        Ok(Expr::zero())
    })
}

/// Total derivative `D_wrt` on the jet space: `u` and its derivative
/// coordinates (and opaque functions) move along with the base variable.
pub fn total_derivative(e: &Expr, wrt: &Symbol, ctx: &JetContext) -> Result<Expr, ExprError> {
    if !matches!(wrt.kind(), SymbolKind::Independent) {
        return Err(ExprError::NotAVariable(wrt.name().to_string()));
    }
    let name = wrt.name().to_string();
    differentiate_with(e, &|s: &Symbol| {
        if s == wrt {
            return Ok(Expr::one());
        }
        match s.kind() {
            SymbolKind::Field { .. } => match ctx.differentiate_field(s, &name)? {
                Some(d) => Ok(Expr::symbol(&d)),
                None => Ok(Expr::zero()),
            },
            _ => Ok(Expr::zero()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::{q, sym, eval, Point};
    use super::*;

    fn e(s: &Symbol) -> Expr {
        Expr::symbol(s)
    }

    #[test]
    fn power_rule() {
        let u = e(&sym::u());
        let d = differentiate(&Expr::pow(u.clone(), q(4, 3)), &u).unwrap();
        assert_eq!(d, Expr::rational(4, 3) * Expr::pow(u, q(1, 3)));
    }

    #[test]
    fn log_derivative() {
        let x = e(&sym::x());
        let d = differentiate(&Expr::ln(x.clone()), &x).unwrap();
        assert_eq!(d, Expr::powi(x, -1));
    }

    #[test]
    fn exp_plus_linear() {
        let u = e(&sym::u());
        let k = Expr::symbol(&Symbol::parameter("k"));
        let d = differentiate(&(Expr::exp(u.clone()) + &k * &u), &u).unwrap();
        assert_eq!(d, Expr::exp(u) + k);
    }

    #[test]
    fn non_variable_is_rejected() {
        let x = e(&sym::x());
        let err = differentiate(&x, &(x.clone() * 2)).unwrap_err();
        assert!(matches!(err, ExprError::NotAVariable(_)));
    }

    #[test]
    fn opaque_functions_track_derivatives() {
        let psi = e(&sym::psi());
        let d = differentiate(&psi, &e(&sym::t())).unwrap();
        assert_eq!(d.as_symbol().unwrap().name(), "psi_t");
        // jet coordinate u is independent of x for a partial derivative
        assert!(differentiate(&e(&sym::u()), &e(&sym::x())).unwrap().is_zero());
    }

    #[test]
    fn total_derivatives_follow_the_jet() {
        let ctx = JetContext::standard();
        let x = e(&sym::x());
        let ux = e(&sym::u_x());
        assert_eq!(total_derivative(&e(&sym::u()), &sym::x(), &ctx).unwrap(), ux);
        let d = total_derivative(&(Expr::powi(x.clone(), 2) * &ux), &sym::x(), &ctx).unwrap();
        let expected = Expr::int(2) * &x * &ux + Expr::powi(x, 2) * e(&sym::u_xx());
        assert_eq!(d, expected);
        let dt = total_derivative(&e(&sym::psi()), &sym::t(), &ctx).unwrap();
        assert_eq!(dt.as_symbol().unwrap().name(), "psi_t");
        assert_eq!(total_derivative(&ux, &sym::t(), &ctx).unwrap(), e(&sym::u_tx()));
        let err = total_derivative(&e(&sym::u_xxx()), &sym::x(), &ctx).unwrap_err();
        assert!(matches!(err, ExprError::OutOfOrder(_)));
    }

    #[test]
    fn chain_rule_through_exp_and_ln() {
        let x = e(&sym::x());
        let f = Expr::exp(Expr::ln(x.clone()) * Expr::ln(x.clone()));
        let d = differentiate(&f, &x).unwrap();
        let mut p = Point::new();
        p.insert(sym::x(), 1.7);
        let l = 1.7f64.ln();
        let expected = (l * l).exp() * 2.0 * l / 1.7;
        assert!((eval(&d, &p).unwrap() - expected).abs() < 1e-12);
    }
}
