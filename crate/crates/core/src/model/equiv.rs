//! Equivalence transformations `(t, x, u, f) -> (t + A, B x, C1 u + C2, (C1/B) f)`.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{GkeModel, ModelError};
use crate::expr::{sym, Expr, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivTransform {
    #[serde(with = "crate::expr::rational_text")]
    pub a: Q,
    #[serde(with = "crate::expr::rational_text")]
    pub b: Q,
    #[serde(with = "crate::expr::rational_text")]
    pub c1: Q,
    #[serde(with = "crate::expr::rational_text")]
    pub c2: Q,
}

impl EquivTransform {
    pub fn new(a: Q, b: Q, c1: Q, c2: Q) -> Result<Self, ModelError> {
        if b.is_zero() || c1.is_zero() {
            return Err(ModelError::Degenerate);
        }
        Ok(EquivTransform { a, b, c1, c2 })
    }

    pub fn identity() -> Self {
        EquivTransform {
            a: Q::zero(),
            b: Q::one(),
            c1: Q::one(),
            c2: Q::zero(),
        }
    }

    pub fn time_shift(a: Q) -> Self {
        EquivTransform { a, ..Self::identity() }
    }

    pub fn x_scale(b: Q) -> Result<Self, ModelError> {
        Self::new(Q::zero(), b, Q::one(), Q::zero())
    }

    /// `f̄(v) = (C1/B) f((v - C2)/C1)`.
    pub fn apply_f(&self, m: &GkeModel) -> Result<GkeModel, ModelError> {
        let v: Expr = sym::u().into();
        let arg = (v - Expr::constant(self.c2.clone())) * Expr::constant(self.c1.recip());
        let f = Expr::constant(&self.c1 / &self.b) * m.f.subs(&sym::u(), &arg);
        m.with_f(&format!("T({})[{}]", self.describe(), m.label), f)
    }

    pub fn apply_point(&self, p: [f64; 3]) -> [f64; 3] {
        let (a, b, c1, c2) = self.as_f64();
        [p[0] + a, b * p[1], c1 * p[2] + c2]
    }

    /// `ū(t̄, x̄) = C1 u(t̄ - A, x̄ / B) + C2`. Requires `B > 0`.
    pub fn push_solution(&self, u_expr: &Expr) -> Result<Expr, ModelError> {
        if self.b.is_negative() {
            return Err(ModelError::NegativeScale(self.b.to_string()));
        }
        let t: Expr = sym::t().into();
        let x: Expr = sym::x().into();
        let mut b = std::collections::BTreeMap::new();
        b.insert(sym::t(), t - Expr::constant(self.a.clone()));
        b.insert(sym::x(), x * Expr::constant(self.b.recip()));
        Ok(Expr::constant(self.c1.clone()) * u_expr.substitute(&b) + Expr::constant(self.c2.clone()))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &EquivTransform) -> EquivTransform {
        EquivTransform {
            a: &self.a + &other.a,
            b: &self.b * &other.b,
            c1: &self.c1 * &other.c1,
            c2: &self.c1 * &other.c2 + &self.c2,
        }
    }

    pub fn invert(&self) -> EquivTransform {
        let c1 = self.c1.recip();
        EquivTransform {
            a: -self.a.clone(),
            b: self.b.recip(),
            c2: -(&self.c2 * &c1),
            c1,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn as_f64(&self) -> (f64, f64, f64, f64) {
        let f = |v: &Q| v.to_f64().unwrap_or(f64::NAN);
        (f(&self.a), f(&self.b), f(&self.c1), f(&self.c2))
    }

    pub fn describe(&self) -> String {
        format!("{},{},{},{}", self.a, self.b, self.c1, self.c2)
    }
}

/// `ū = u + x`, taking solutions for `f = 1` to solutions for `f = 0`.
pub fn shift_map_f1_to_f0(u_expr: &Expr) -> Expr {
    u_expr + Expr::symbol(&sym::x())
}
