//! The equation family
//!
//! ```text
//! u_t = x² u_xx + x (x f_u + 4) u_x + 4x f(u)
//! ```
//!
//! its classification catalog, and the equivalence group acting on it.

mod catalog;
mod equiv;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{differentiate, sym, Expr, ExprError, SymbolKind, Q};

pub(crate) use catalog::four_thirds_basis;
pub use catalog::{catalog, Basis, CatalogDoc, CatalogEntry, InfiniteFamily, Instance};
pub use equiv::{shift_map_f1_to_f0, EquivTransform};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("f must depend on u and constants only, found `{0}`")]
    NotAFunctionOfU(String),
    #[error("equivalence transformation needs B*C1 != 0")]
    Degenerate,
    #[error("B = {0} < 0 maps x > 0 outside the physical domain")]
    NegativeScale(String),
}

/// One member of the family, fixed by `f(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GkeModel {
    pub label: String,
    pub f: Expr,
    pub f_u: Expr,
    pub f_uu: Expr,
    pub params: BTreeMap<String, Q>,
}

impl GkeModel {
    pub fn new(label: &str, f: Expr) -> Result<Self, ModelError> {
        if let Some(s) = f
            .free_symbols()
            .into_iter()
            .find(|s| *s != sym::u() && !matches!(s.kind(), SymbolKind::Parameter))
        {
            return Err(ModelError::NotAFunctionOfU(s.name().to_string()));
        }
        let u: Expr = sym::u().into();
        let f_u = differentiate(&f, &u)?;
        let f_uu = differentiate(&f_u, &u)?;
        Ok(GkeModel {
            label: label.to_string(),
            f,
            f_u,
            f_uu,
            params: BTreeMap::new(),
        })
    }

    fn known(label: &str, f: Expr) -> Self {
        GkeModel::new(label, f).expect("built-in f depends on u only")
    }

    pub fn with_param(mut self, name: &str, value: Q) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn exponential() -> Self {
        GkeModel::known("exp(u)", Expr::exp(sym::u().into()))
    }

    /// `u^k` for a rational `k`.
    pub fn power(k: Q) -> Self {
        let label = format!("u^{}", Expr::constant(k.clone()));
        GkeModel::known(&label, Expr::pow(sym::u().into(), k.clone())).with_param("k", k)
    }

    /// `u^k` with `k` a free parameter, written `exp(k ln u)`.
    pub fn power_symbolic() -> Self {
        let k: Expr = crate::expr::Symbol::parameter("k").into();
        GkeModel::known("u^k", Expr::exp(k * Expr::ln(sym::u().into())))
    }

    pub fn linear() -> Self {
        GkeModel::known("u", sym::u().into())
    }

    pub fn one() -> Self {
        GkeModel::known("1", Expr::one())
    }

    pub fn zero() -> Self {
        GkeModel::known("0", Expr::zero())
    }

    pub fn four_thirds() -> Self {
        GkeModel::power(crate::expr::q(4, 3))
    }

    /// Same model with `f` replaced, derivatives recomputed.
    pub fn with_f(&self, label: &str, f: Expr) -> Result<Self, ModelError> {
        let mut m = GkeModel::new(label, f)?;
        m.params = self.params.clone();
        Ok(m)
    }
}

/// Right-hand side over the jet coordinates.
pub fn gke_rhs(m: &GkeModel) -> Expr {
    let x: Expr = sym::x().into();
    let ux: Expr = sym::u_x().into();
    let uxx: Expr = sym::u_xx().into();
    Expr::powi(x.clone(), 2) * uxx + &x * (&x * &m.f_u + 4) * ux + Expr::int(4) * &x * &m.f
}

/// `u_t - RHS` for the concrete function `u_expr(t, x)`.
pub fn residual(m: &GkeModel, u_expr: &Expr) -> Result<Expr, ExprError> {
    let t: Expr = sym::t().into();
    let x: Expr = sym::x().into();
    residual_with(m, u_expr, &|e, wrt| differentiate(e, if wrt == 't' { &t } else { &x }))
}

/// [`residual`] with a caller-supplied partial derivative `d(e, 't' | 'x')`,
/// e.g. one that applies the chain rule through a placeholder `w(y(t,x))`.
pub fn residual_with(
    m: &GkeModel,
    u_expr: &Expr,
    d: &dyn Fn(&Expr, char) -> Result<Expr, ExprError>,
) -> Result<Expr, ExprError> {
    let ut = d(u_expr, 't')?;
    let ux = d(u_expr, 'x')?;
    let uxx = d(&ux, 'x')?;
    let mut b = BTreeMap::new();
    b.insert(sym::u_x(), ux);
    b.insert(sym::u_xx(), uxx);
    b.insert(sym::u(), u_expr.clone());
    Ok(ut - gke_rhs(m).substitute(&b))
}

/// Serializable summary of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub label: String,
    pub f: String,
    pub f_u: String,
    pub f_uu: String,
}

impl From<&GkeModel> for ModelDoc {
    fn from(m: &GkeModel) -> Self {
        ModelDoc {
            label: m.label.clone(),
            f: m.f.to_string(),
            f_u: m.f_u.to_string(),
            f_uu: m.f_uu.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval, is_identically_zero, q, Point, SampleConfig, Symbol};

    fn x() -> Expr {
        sym::x().into()
    }

    #[test]
    fn rhs_for_zero_and_linear_f() {
        let ux: Expr = sym::u_x().into();
        let uxx: Expr = sym::u_xx().into();
        assert_eq!(gke_rhs(&GkeModel::zero()), Expr::powi(x(), 2) * &uxx + Expr::int(4) * x() * &ux);
        let lin = Expr::powi(x(), 2) * &uxx + x() * (x() + 4) * &ux + Expr::int(4) * x() * Expr::symbol(&sym::u());
        let d = gke_rhs(&GkeModel::linear()) - lin;
        assert!(is_identically_zero(&d, &SampleConfig::default()).unwrap().zero);
    }

    #[test]
    fn rhs_for_four_thirds() {
        let u: Expr = sym::u().into();
        let expected = Expr::powi(x(), 2) * Expr::symbol(&sym::u_xx())
            + Expr::int(4) * x() * (Expr::rational(1, 3) * x() * Expr::pow(u.clone(), q(1, 3)) + 1) * Expr::symbol(&sym::u_x())
            + Expr::int(4) * x() * Expr::pow(u, q(4, 3));
        let d = gke_rhs(&GkeModel::four_thirds()) - expected;
        assert!(is_identically_zero(&d, &SampleConfig::default()).unwrap().zero);
    }

    #[test]
    fn stationary_family_solves_four_thirds() {
        let c: Expr = Symbol::parameter("c").into();
        let r = residual(&GkeModel::four_thirds(), &(c * Expr::powi(x(), -3))).unwrap();
        assert!(is_identically_zero(&r, &SampleConfig::default()).unwrap().zero);
    }

    #[test]
    fn constants_solve_zero_f() {
        assert!(residual(&GkeModel::zero(), &Expr::int(5)).unwrap().is_zero());
    }

    #[test]
    fn growing_profile_is_not_a_solution() {
        let t: Expr = sym::t().into();
        let u = Expr::powi(x(), -3) * (t + 1);
        let r = residual(&GkeModel::four_thirds(), &u).unwrap();
        let z = is_identically_zero(&r, &SampleConfig::default()).unwrap();
        assert!(!z.zero);
        // u_t = x^-3 and the stationary part of the operator kills c x^-3
        let mut p = Point::new();
        p.insert(sym::t(), 1.0);
        p.insert(sym::x(), 1.0);
        assert!((eval(&r, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_must_be_a_function_of_u() {
        assert!(matches!(
            GkeModel::new("bad", x() * Expr::symbol(&sym::u())),
            Err(ModelError::NotAFunctionOfU(_))
        ));
    }
}
