//! Point-symmetry machinery: vector fields on `(t, x, u)`, their second
//! prolongation, the invariance residual of the GKE, Lie brackets and flows.

mod algebra;
mod flow;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{
    differentiate, is_identically_zero, sym, total_derivative, Expr, ExprError, JetContext, SampleConfig, Symbol,
    Witness,
};
use crate::model::{gke_rhs, GkeModel};

pub use algebra::{
    jacobi_residual, lie_bracket, verify_structure_constants, BracketCheck, BracketTable, StructureReport,
};
pub use flow::{flow, flow_with, map_solution_by_flow, FlowConfig, FlowMapReport, FlowPoint};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SymmetryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("flow left the domain (x > 0, u > 0) at parameter {at}")]
    DomainExit { at: f64 },
    #[error("flow integration did not settle: endpoint change {change:e} after {steps} steps")]
    NoConvergence { change: f64, steps: usize },
    #[error("structure table is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("structure table has wrong shape: {0}")]
    TableShape(String),
    #[error("transformed solution could not be located at ({t}, {x}): {reason}")]
    InverseLookup { t: f64, x: f64, reason: String },
    #[error("{0}")]
    Config(String),
}

/// `tau d/dt + xi d/dx + eta d/du`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub name: String,
    pub tau: Expr,
    pub xi: Expr,
    pub eta: Expr,
}

impl VectorField {
    pub fn new(name: &str, tau: Expr, xi: Expr, eta: Expr) -> Self {
        VectorField {
            name: name.to_string(),
            tau,
            xi,
            eta,
        }
    }

    pub fn zero(name: &str) -> Self {
        VectorField::new(name, Expr::zero(), Expr::zero(), Expr::zero())
    }

    pub fn d_t() -> Self {
        VectorField::new("d_t", Expr::one(), Expr::zero(), Expr::zero())
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Action on a function of `(t, x, u)` as a first-order operator.
    pub fn apply(&self, g: &Expr) -> Result<Expr, ExprError> {
        let gt = differentiate(g, &sym::t().into())?;
        let gx = differentiate(g, &sym::x().into())?;
        let gu = differentiate(g, &sym::u().into())?;
        Ok(&self.tau * gt + &self.xi * gx + &self.eta * gu)
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        VectorField::new(&self.name, c * &self.tau, c * &self.xi, c * &self.eta)
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(
            &format!("{}+{}", self.name, other.name),
            &self.tau + &other.tau,
            &self.xi + &other.xi,
            &self.eta + &other.eta,
        )
    }

    /// `sum_i c_i X_i`.
    pub fn combination(name: &str, terms: &[(Expr, &VectorField)]) -> VectorField {
        let tau = Expr::sum(terms.iter().map(|(c, v)| c * &v.tau));
        let xi = Expr::sum(terms.iter().map(|(c, v)| c * &v.xi));
        let eta = Expr::sum(terms.iter().map(|(c, v)| c * &v.eta));
        VectorField::new(name, tau, xi, eta)
    }

    pub fn coefficients(&self) -> [&Expr; 3] {
        [&self.tau, &self.xi, &self.eta]
    }

    pub fn substitute(&self, b: &BTreeMap<Symbol, Expr>) -> VectorField {
        VectorField::new(&self.name, self.tau.substitute(b), self.xi.substitute(b), self.eta.substitute(b))
    }

    /// Coefficients must be functions of `(t, x, u)` and opaque symbols only.
    pub fn has_jet_coordinates(&self) -> bool {
        self.coefficients()
            .iter()
            .flat_map(|c| c.free_symbols())
            .any(|s| s.is_derivative_coordinate() && matches!(s.kind(), crate::expr::SymbolKind::Field { role: crate::expr::FieldRole::Jet, .. }))
    }

    /// Text form `[tau; xi; eta]` in the expression grammar.
    pub fn to_text(&self) -> [String; 3] {
        [self.tau.to_string(), self.xi.to_string(), self.eta.to_string()]
    }
}

/// A vector field extended to `u_t, u_x, u_xx`.
#[derive(Debug, Clone)]
pub struct ProlongedField {
    pub base: VectorField,
    pub eta_t: Expr,
    pub eta_x: Expr,
    pub eta_xx: Expr,
}

/// Second prolongation by the total-derivative formulas.
pub fn prolong2(v: &VectorField) -> Result<ProlongedField, ExprError> {
    let ctx = JetContext::standard();
    let (t, x) = (sym::t(), sym::x());
    let (ut, ux, uxx, utx): (Expr, Expr, Expr, Expr) =
        (sym::u_t().into(), sym::u_x().into(), sym::u_xx().into(), sym::u_tx().into());
    let dt = |e: &Expr| total_derivative(e, &t, &ctx);
    let dx = |e: &Expr| total_derivative(e, &x, &ctx);
    let dt_tau = dt(&v.tau)?;
    let dt_xi = dt(&v.xi)?;
    let dx_tau = dx(&v.tau)?;
    let dx_xi = dx(&v.xi)?;
    let eta_t = dt(&v.eta)? - &ut * dt_tau - &ux * dt_xi;
    let eta_x = dx(&v.eta)? - &ut * &dx_tau - &ux * &dx_xi;
    let eta_xx = dx(&eta_x)? - utx * dx_tau - uxx * dx_xi;
    Ok(ProlongedField {
        base: v.clone(),
        eta_t,
        eta_x,
        eta_xx,
    })
}

/// The invariance condition of the GKE under `v`, with `u_t` and `u_tx`
/// eliminated through the equation. Free jet coordinates of the result are
/// `t, x, u, u_x, u_xx, u_xxx` plus any opaque symbols of `v`.
pub fn invariance_residual(v: &VectorField, m: &GkeModel) -> Result<Expr, ExprError> {
    let p = prolong2(v)?;
    let x: Expr = sym::x().into();
    let ux: Expr = sym::u_x().into();
    let uxx: Expr = sym::u_xx().into();
    let x2 = Expr::powi(x.clone(), 2);
    let (xi, eta) = (&v.xi, &v.eta);
    let raw = Expr::sum([
        p.eta_t.clone(),
        -(Expr::int(2) * &x * &uxx * xi),
        -(&x2 * &p.eta_xx),
        -(Expr::int(2) * (&x * &m.f_u + 2) * &ux * xi),
        -(&x2 * &m.f_uu * &ux * eta),
        -(&x * (&x * &m.f_u + 4) * &p.eta_x),
        -(Expr::int(4) * &m.f * xi),
        -(Expr::int(4) * &x * &m.f_u * eta),
    ]);
    let ctx = JetContext::standard();
    let rhs = gke_rhs(m);
    let rhs_x = total_derivative(&rhs, &sym::x(), &ctx)?;
    let mut b = BTreeMap::new();
    b.insert(sym::u_t(), rhs);
    b.insert(sym::u_tx(), rhs_x);
    Ok(raw.substitute(&b))
}

/// Outcome of [`verify_symmetry`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub case: String,
    pub generator: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub max_residual: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Check that `v` is admitted by `m`. `constraints` rewrites opaque
/// derivative symbols (side conditions of infinite families) before testing.
pub fn verify_symmetry(
    v: &VectorField,
    m: &GkeModel,
    cfg: &SampleConfig,
    constraints: Option<&BTreeMap<Symbol, Expr>>,
) -> Result<SymmetryReport, ExprError> {
    let mut r = invariance_residual(v, m)?;
    if let Some(c) = constraints {
        r = r.substitute(c);
    }
    let z = is_identically_zero(&r, cfg)?;
    Ok(SymmetryReport {
        case: m.label.clone(),
        generator: v.name.clone(),
        pass: z.zero,
        witness: z.witness,
        max_residual: z.max_residual,
        samples: z.samples,
        seed: cfg.seed,
    })
}
