//! Symmetry reduction of the `f = u^(4/3)` equation: the optimal system of
//! subalgebras, the invariant ansätze of the one-dimensional ones, the
//! reduced ODEs and the exact solutions they produce.

mod exact;
mod ode;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{
    differentiate, differentiate_with, is_identically_zero, q, qi, sym, Expr, ExprError, SampleConfig, Symbol,
    SymbolKind, Witness, ZeroTest, Q,
};
use crate::model::{residual_with, GkeModel};
use crate::symmetry::{lie_bracket, SymmetryError, VectorField};

pub use exact::{exact_solutions, verify_exact, ExactReport, ExactSolution, Mode, SolutionDomain};
pub use ode::{
    default_initial, implicit_relation_check, implicit_y, integrate_reduced_ode, lift_consistency, Branch, ImplicitReport, LiftReport,
    Trajectory,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ReductionError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error("no ansatz for the subalgebra {0}")]
    Unsupported(String),
    #[error("the factor {0} vanishes identically; refusing to divide")]
    DegenerateFactor(String),
    #[error("phi = {phi} <= 0 at y = {y}")]
    NonPositive { y: f64, phi: f64 },
    #[error("blow-up |phi| = {phi:e} at y = {y}")]
    BlowUp { y: f64, phi: f64 },
    #[error("cannot invert y(phi): {0}")]
    Inversion(String),
    #[error("{0}")]
    Config(String),
}

/// Reduction cases of the five one-dimensional subalgebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
}

impl Case {
    pub const ALL: [Case; 5] = [Case::I, Case::II, Case::III, Case::IV, Case::V];

    pub fn parse(s: &str) -> Option<Case> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Some(Case::I),
            "II" | "2" => Some(Case::II),
            "III" | "3" => Some(Case::III),
            "IV" | "4" => Some(Case::IV),
            "V" | "5" => Some(Case::V),
            _ => None,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
            Case::V => "V",
        };
        f.write_str(s)
    }
}

/// `X1 = d_t`, `X2 = x d_x - 3u d_u`, `X3 = t d_t + (3t + ln x) x/2 d_x - 3(1 + 3t + ln x) u/2 d_u`.
pub fn basis() -> [VectorField; 3] {
    crate::model::four_thirds_basis()
}

/// Structure constants of `X1, X2, X3`: `[X1,X3] = X1 + 3/2 X2`, `[X2,X3] = 1/2 X2`.
pub fn basis_table() -> crate::symmetry::BracketTable {
    let mut t = crate::symmetry::BracketTable::zeros(3);
    t.set(0, 2, &[qi(1), q(3, 2), qi(0)]);
    t.set(1, 2, &[qi(0), q(1, 2), qi(0)]);
    t
}

/// A subalgebra spanned by combinations of `X1, X2, X3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subalgebra {
    pub label: String,
    pub combos: Vec<[Q; 3]>,
}

fn combo_label(c: &[Q; 3]) -> String {
    let mut parts = Vec::new();
    for (i, v) in c.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let name = format!("X{}", i + 1);
        parts.push(if v.is_one() { name } else { format!("{}{}", Expr::constant(v.clone()), name) });
    }
    parts.join("+")
}

impl Subalgebra {
    fn new(combos: Vec<[Q; 3]>) -> Self {
        let label = format!("<{}>", combos.iter().map(combo_label).collect::<Vec<_>>().join(", "));
        Subalgebra { label, combos }
    }

    pub fn dim(&self) -> usize {
        self.combos.len()
    }

    pub fn generators(&self) -> Vec<VectorField> {
        let b = basis();
        self.combos
            .iter()
            .map(|c| {
                let terms: Vec<(Expr, &VectorField)> =
                    c.iter().zip(b.iter()).map(|(v, f)| (Expr::constant(v.clone()), f)).collect();
                VectorField::combination(&combo_label(c), &terms)
            })
            .collect()
    }
}

fn c3(a: i64, b: i64, c: i64) -> [Q; 3] {
    [qi(a), qi(b), qi(c)]
}

/// The optimal system of subalgebras of `<X1, X2, X3>`.
pub fn optimal_system() -> Vec<Subalgebra> {
    vec![
        Subalgebra::new(vec![c3(0, 1, 0)]),
        Subalgebra::new(vec![c3(0, 0, 1)]),
        Subalgebra::new(vec![c3(1, 2, 0)]),
        Subalgebra::new(vec![c3(1, 3, 0)]),
        Subalgebra::new(vec![c3(1, 4, 0)]),
        Subalgebra::new(vec![c3(1, 3, 0), c3(0, 1, 0)]),
        Subalgebra::new(vec![c3(1, 3, 0), c3(0, 0, 1)]),
        Subalgebra::new(vec![c3(0, 1, 0), c3(0, 0, 1)]),
        Subalgebra::new(vec![c3(1, 0, 0), c3(0, 1, 0), c3(0, 0, 1)]),
    ]
}

#[allow(clippy::needless_range_loop)]
fn bracket_coords(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    let t = basis_table();
    let mut out = [Q::zero(), Q::zero(), Q::zero()];
    for i in 0..3 {
        for j in 0..3 {
            let w = &a[i] * &b[j];
            if w.is_zero() {
                continue;
            }
            for k in 0..3 {
                out[k] += &w * &t.c[i][j][k];
            }
        }
    }
    out
}

#[allow(clippy::needless_range_loop)]
fn rank(rows: &[[Q; 3]]) -> usize {
    let mut m: Vec<[Q; 3]> = rows.to_vec();
    let mut r = 0;
    for col in 0..3 {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = &m[i][col] / &m[r][col];
                for k in 0..3 {
                    let v = &f * &m[r][k];
                    m[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub label: String,
    pub closed: bool,
    /// Every bracket of the actual vector fields matched its predicted combination.
    pub brackets_verified: bool,
}

/// Closure of a subalgebra under brackets: the brackets predicted by the
/// structure constants must lie in the span, and the actual bracket of the
/// vector fields must equal the prediction identically.
pub fn subalgebra_closure(s: &Subalgebra, cfg: &SampleConfig) -> Result<ClosureReport, ReductionError> {
    let gens = s.generators();
    let b = basis();
    let mut closed = true;
    let mut verified = true;
    for i in 0..s.dim() {
        for j in i + 1..s.dim() {
            let predicted = bracket_coords(&s.combos[i], &s.combos[j]);
            let mut rows = s.combos.clone();
            rows.push(predicted.clone());
            if rank(&rows) > rank(&s.combos) {
                closed = false;
            }
            let actual = lie_bracket(&gens[i], &gens[j])?;
            let terms: Vec<(Expr, &VectorField)> =
                predicted.iter().zip(b.iter()).map(|(v, f)| (Expr::constant(-v.clone()), f)).collect();
            let diff = actual.add(&VectorField::combination("", &terms));
            for c in diff.coefficients() {
                if !is_identically_zero(c, cfg)?.zero {
                    verified = false;
                }
            }
        }
    }
    Ok(ClosureReport {
        label: s.label.clone(),
        closed,
        brackets_verified: verified,
    })
}

/// Invariant solution template `u = shape(t, x) * w(y(t, x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub case: Case,
    pub generator: VectorField,
    /// First invariant `y(t, x)`.
    pub y: Expr,
    pub shape: Expr,
    /// Second invariant `u / shape`, a function of `(t, x, u)`.
    pub omega: Expr,
    /// Nonzero factor the PDE residual carries in front of the reduced ODE.
    pub factor: Expr,
    /// The coordinate eliminated in favour of `y`, and its expression in `y`
    /// and the remaining coordinate.
    pub eliminate: (Symbol, Expr),
    /// Coordinate that must drop out after elimination.
    pub spare: Symbol,
    /// The expected reduced ODE, over `y, w, w_y, w_yy`.
    pub expected_ode: Expr,
    pub order: usize,
}

impl Ansatz {
    pub fn template(&self) -> Expr {
        &self.shape * Expr::symbol(&sym::w())
    }
}

fn t() -> Expr {
    sym::t().into()
}
fn x() -> Expr {
    sym::x().into()
}
fn y() -> Expr {
    sym::y().into()
}
fn w() -> Expr {
    sym::w().into()
}
fn wy() -> Expr {
    sym::w_y().into()
}
fn wyy() -> Expr {
    sym::w_yy().into()
}
fn cbrt_w() -> Expr {
    Expr::pow(w(), q(1, 3))
}

/// The ansatz of one of the five one-dimensional subalgebras.
pub fn ansatz_for(s: &Subalgebra) -> Result<Ansatz, ReductionError> {
    let case = match s.combos.as_slice() {
        [c] if *c == c3(0, 1, 0) => Case::I,
        [c] if *c == c3(0, 0, 1) => Case::II,
        [c] if *c == c3(1, 2, 0) => Case::III,
        [c] if *c == c3(1, 3, 0) => Case::IV,
        [c] if *c == c3(1, 4, 0) => Case::V,
        _ => return Err(ReductionError::Unsupported(s.label.clone())),
    };
    Ok(ansatz(case, s.generators().remove(0)))
}

/// The ansatz of a reduction case.
pub fn ansatz_case(case: Case) -> Ansatz {
    let s = &optimal_system()[match case {
        Case::I => 0,
        Case::II => 1,
        Case::III => 2,
        Case::IV => 3,
        Case::V => 4,
    }];
    ansatz_for(s).expect("one-dimensional entries of the optimal system have ansätze")
}

fn ansatz(case: Case, generator: VectorField) -> Ansatz {
    let u: Expr = sym::u().into();
    let x_3 = Expr::powi(x(), -3);
    let travelling = |k: i64| {
        let yv = x() * Expr::exp(Expr::int(-k) * t());
        let factor = -(Expr::powi(yv.clone(), 2) * &x_3);
        (yv, factor, (sym::x(), y() * Expr::exp(Expr::int(k) * t())))
    };
    let third = Expr::rational(1, 3);
    match case {
        Case::I => Ansatz {
            case,
            generator,
            y: t(),
            shape: x_3.clone(),
            omega: u * Expr::powi(x(), 3),
            factor: x_3,
            eliminate: (sym::t(), y()),
            spare: sym::x(),
            expected_ode: wy(),
            order: 1,
        },
        Case::II => {
            let shape = &x_3 * Expr::pow(t(), q(-3, 2));
            Ansatz {
                case,
                generator,
                y: (Expr::ln(x()) - Expr::int(3) * t()) * Expr::pow(t(), q(-1, 2)),
                omega: u * Expr::powi(x(), 3) * Expr::pow(t(), q(3, 2)),
                factor: -(&x_3 * Expr::pow(t(), q(-5, 2))),
                shape,
                eliminate: (sym::x(), Expr::exp(y() * Expr::sqrt(t()) + Expr::int(3) * t())),
                spare: sym::t(),
                expected_ode: wyy()
                    + (Expr::rational(4, 3) * cbrt_w() + y() / 2) * wy()
                    + Expr::rational(3, 2) * w(),
                order: 2,
            }
        }
        Case::III | Case::IV | Case::V => {
            let k = match case {
                Case::III => 2,
                Case::IV => 3,
                _ => 4,
            };
            let (yv, factor, eliminate) = travelling(k);
            let expected_ode = match case {
                Case::III => wyy() + Expr::rational(4, 3) * Expr::powi(y(), -1) * cbrt_w() * wy(),
                Case::IV => wyy() + Expr::powi(y(), -1) * (Expr::rational(4, 3) * cbrt_w() + 1) * wy(),
                _ => wyy() + Expr::int(2) * Expr::powi(y(), -1) * (Expr::int(2) * &third * cbrt_w() + 1) * wy(),
            };
            Ansatz {
                case,
                generator,
                y: yv,
                shape: x_3,
                omega: u * Expr::powi(x(), 3),
                factor,
                eliminate,
                spare: sym::t(),
                expected_ode,
                order: 2,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub case: Case,
    pub y_invariant: bool,
    pub omega_invariant: bool,
}

/// `X(y) = 0` and `X(omega) = 0` identically.
pub fn check_invariants(a: &Ansatz, cfg: &SampleConfig) -> Result<InvarianceReport, ReductionError> {
    let zy = is_identically_zero(&a.generator.apply(&a.y)?, cfg)?;
    let zo = is_identically_zero(&a.generator.apply(&a.omega)?, cfg)?;
    Ok(InvarianceReport {
        case: a.case,
        y_invariant: zy.zero,
        omega_invariant: zo.zero,
    })
}

/// Partial derivative of an expression in `t, x` and the placeholder
/// `w(y(t, x))`, by the chain rule through `y`.
pub fn chain_derivative(e: &Expr, wrt: char, y_expr: &Expr) -> Result<Expr, ExprError> {
    let var = if wrt == 't' { sym::t() } else { sym::x() };
    let dy = differentiate(y_expr, &var.clone().into())?;
    differentiate_with(e, &|s: &Symbol| {
        if *s == var {
            return Ok(Expr::one());
        }
        match s.kind() {
            SymbolKind::Field { base, .. } if base.as_ref() == "w" => match s.field_derivative("y") {
                Some(d) if d.order() <= 2 => Ok(Expr::symbol(&d) * &dy),
                _ => Err(ExprError::OutOfOrder(format!("{}_y", s.name()))),
            },
            _ => Ok(Expr::zero()),
        }
    })
}

/// Result of [`reduce`].
#[derive(Debug, Clone)]
pub struct Reduction {
    pub case: Case,
    /// Residual divided by the factor, in `y, w, w_y, w_yy`.
    pub ode: Expr,
    /// The spare coordinate dropped out.
    pub spare_free: bool,
    /// Identity test of `ode - expected_ode`.
    pub matches_expected: ZeroTest,
}

impl Reduction {
    pub fn pass(&self) -> bool {
        self.spare_free && self.matches_expected.zero
    }
}

/// Substitute the ansatz into the residual of `m`, divide by the recorded
/// factor and express the result in the invariant.
pub fn reduce_with(a: &Ansatz, m: &GkeModel, cfg: &SampleConfig) -> Result<Reduction, ReductionError> {
    let factor_zero = is_identically_zero(&a.factor, cfg)?;
    if factor_zero.zero {
        return Err(ReductionError::DegenerateFactor(a.factor.to_string()));
    }
    let y_expr = a.y.clone();
    let r = residual_with(m, &a.template(), &|e, wrt| chain_derivative(e, wrt, &y_expr))?;
    let reduced = r / &a.factor;
    let mut b = BTreeMap::new();
    b.insert(a.eliminate.0.clone(), a.eliminate.1.clone());
    let ode = reduced.substitute(&b);
    let d_spare = differentiate(&ode, &a.spare.clone().into())?;
    let spare_free = is_identically_zero(&d_spare, cfg)?.zero;
    let matches_expected = is_identically_zero(&(&ode - &a.expected_ode), cfg)?;
    Ok(Reduction {
        case: a.case,
        ode,
        spare_free,
        matches_expected,
    })
}

/// [`reduce_with`] for `f = u^(4/3)`.
pub fn reduce(a: &Ansatz, cfg: &SampleConfig) -> Result<Reduction, ReductionError> {
    reduce_with(a, &GkeModel::four_thirds(), cfg)
}

/// JSON summary of a reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionDoc {
    pub case: Case,
    pub subalgebra: String,
    pub invariant: String,
    pub ansatz: String,
    pub factor: String,
    pub ode: String,
    pub spare_free: bool,
    pub matches_expected: bool,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ReductionDoc {
    pub fn new(a: &Ansatz, r: &Reduction) -> Self {
        ReductionDoc {
            case: a.case,
            subalgebra: a.generator.name.clone(),
            invariant: a.y.to_string(),
            ansatz: a.template().to_string(),
            factor: a.factor.to_string(),
            ode: r.ode.to_string(),
            spare_free: r.spare_free,
            matches_expected: r.matches_expected.zero,
            max_residual: r.matches_expected.max_residual,
            witness: r.matches_expected.witness.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_system_shape() {
        let o = optimal_system();
        assert_eq!(o.iter().filter(|s| s.dim() == 1).count(), 5);
        assert_eq!(o.iter().filter(|s| s.dim() == 2).count(), 3);
        assert_eq!(o.iter().filter(|s| s.dim() == 3).count(), 1);
        assert!(o.iter().any(|s| s.label == "<X1+2X2>"));
    }

    #[test]
    fn listed_subalgebras_close() {
        let cfg = SampleConfig::default();
        for s in optimal_system() {
            let r = subalgebra_closure(&s, &cfg).unwrap();
            assert!(r.closed && r.brackets_verified, "{}", s.label);
        }
        // <X1, X3> is not closed: [X1, X3] = X1 + 3/2 X2
        let open = Subalgebra::new(vec![c3(1, 0, 0), c3(0, 0, 1)]);
        assert!(!subalgebra_closure(&open, &cfg).unwrap().closed);
    }

    #[test]
    fn two_dimensional_brackets_by_structure_constants() {
        let e1 = c3(1, 3, 0);
        assert_eq!(bracket_coords(&e1, &c3(0, 0, 1)), e1);
    }

    #[test]
    fn ansatz_forms() {
        let a = ansatz_case(Case::I);
        assert_eq!(a.template(), Expr::powi(x(), -3) * w());
        let b = ansatz_case(Case::III);
        assert_eq!(b.y, x() * Expr::exp(Expr::int(-2) * t()));
        let c = ansatz_case(Case::II);
        assert!(matches!(ansatz_for(&optimal_system()[5]), Err(ReductionError::Unsupported(_))));
        let cfg = SampleConfig::default();
        for case in Case::ALL {
            let r = check_invariants(&ansatz_case(case), &cfg).unwrap();
            assert!(r.y_invariant && r.omega_invariant, "{case}");
        }
        let _ = c;
    }

    #[test]
    fn every_case_reduces_to_the_expected_ode() {
        let cfg = SampleConfig::default();
        for case in Case::ALL {
            let r = reduce(&ansatz_case(case), &cfg).unwrap();
            assert!(r.spare_free, "{case}: spare variable survives in {}", r.ode);
            assert!(r.matches_expected.zero, "{case}: {:?}", r.matches_expected.witness);
        }
    }

    #[test]
    fn degenerate_factor_is_refused() {
        let mut a = ansatz_case(Case::III);
        a.factor = Expr::zero();
        assert!(matches!(reduce(&a, &SampleConfig::default()), Err(ReductionError::DegenerateFactor(_))));
    }

    #[test]
    fn wrong_ode_is_detected() {
        let mut a = ansatz_case(Case::V);
        a.expected_ode = wyy() + Expr::powi(y(), -1) * (Expr::rational(4, 3) * cbrt_w() + 1) * wy();
        let r = reduce(&a, &SampleConfig::default()).unwrap();
        assert!(!r.matches_expected.zero);
    }
}
