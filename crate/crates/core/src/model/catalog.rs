//! The group-classification list as data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GkeModel, ModelDoc};
use crate::expr::{q, qi, sym, Expr, Symbol};
use crate::symmetry::VectorField;

/// One listing of a basis of the finite part of an invariance algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub source: String,
    pub generators: Vec<VectorField>,
}

/// `g(t,x) d_u` with `g` an arbitrary solution of a linear side condition.
#[derive(Debug, Clone, PartialEq)]
pub struct InfiniteFamily {
    pub generator: VectorField,
    pub function: Symbol,
    /// Substitution imposing the side condition, e.g. `psi_t -> x² psi_xx + 4x psi_x`.
    pub constraints: BTreeMap<Symbol, Expr>,
    pub side_condition: String,
}

/// A concrete parameter value of a parametric entry with its generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub model: GkeModel,
    pub generators: Vec<VectorField>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub row: usize,
    pub model: GkeModel,
    pub bases: Vec<Basis>,
    pub infinite_family: Option<InfiniteFamily>,
    pub instances: Vec<Instance>,
    /// Sampling ranges for the entry's parameters.
    pub ranges: BTreeMap<String, (f64, f64)>,
}

impl CatalogEntry {
    /// The first (reference) basis.
    pub fn generators(&self) -> &[VectorField] {
        &self.bases[0].generators
    }

    pub fn label(&self) -> &str {
        &self.model.label
    }
}

fn t() -> Expr {
    sym::t().into()
}
fn x() -> Expr {
    sym::x().into()
}
fn u() -> Expr {
    sym::u().into()
}
fn lnx() -> Expr {
    Expr::ln(x())
}
fn n(v: i64) -> Expr {
    Expr::int(v)
}
fn r(a: i64, b: i64) -> Expr {
    Expr::rational(a, b)
}

fn vf(name: &str, tau: Expr, xi: Expr, eta: Expr) -> VectorField {
    VectorField::new(name, tau, xi, eta)
}

fn d_t() -> VectorField {
    VectorField::d_t().named("X1")
}

fn basis(source: &str, generators: Vec<VectorField>) -> Basis {
    Basis {
        source: source.to_string(),
        generators,
    }
}

fn power_generators(k: &Expr) -> Vec<VectorField> {
    vec![d_t(), vf("X2", Expr::zero(), x(), -(Expr::powi(k - 1, -1) * u()))]
}

fn row2_instances() -> Vec<Instance> {
    [qi(2), q(1, 2), qi(-1), qi(3)]
        .into_iter()
        .map(|k| Instance {
            model: GkeModel::power(k.clone()),
            generators: power_generators(&Expr::constant(k)),
        })
        .collect()
}

/// The three generators of the maximal algebra for `u^(4/3)`.
pub(crate) fn four_thirds_basis() -> [VectorField; 3] {
    [
        d_t(),
        vf("X2", Expr::zero(), x(), n(-3) * u()),
        vf(
            "X3",
            t(),
            r(1, 2) * (n(3) * t() + lnx()) * x(),
            r(-3, 2) * (n(1) + n(3) * t() + lnx()) * u(),
        ),
    ]
}

fn heat_family(side: Expr, side_text: &str, name: &str) -> InfiniteFamily {
    let f = Symbol::field(name, "tx", "", crate::expr::FieldRole::Opaque);
    let ft = f.field_derivative("t").expect("opaque in (t, x)");
    let mut constraints = BTreeMap::new();
    constraints.insert(ft, side);
    InfiniteFamily {
        generator: vf(&format!("{name}*d_u"), Expr::zero(), Expr::zero(), Expr::symbol(&f)),
        function: f,
        constraints,
        side_condition: side_text.to_string(),
    }
}

fn opaque(name: &str, derivs: &str) -> Expr {
    Symbol::field(name, "tx", derivs, crate::expr::FieldRole::Opaque).into()
}

/// The six classified cases with their generators.
pub fn catalog() -> Vec<CatalogEntry> {
    let k: Expr = Symbol::parameter("k").into();
    let x2 = || Expr::powi(x(), 2);
    let l3 = || lnx() + n(3) * t();
    let xu = || x() + u();

    let row1 = CatalogEntry {
        row: 1,
        model: GkeModel::exponential(),
        bases: vec![basis(
            "primary",
            vec![d_t(), vf("X2", Expr::zero(), x(), n(-1))],
        )],
        infinite_family: None,
        instances: vec![],
        ranges: BTreeMap::new(),
    };

    let row2 = CatalogEntry {
        row: 2,
        model: GkeModel::power_symbolic(),
        bases: vec![
            basis("primary", power_generators(&k)),
            basis(
                "alternate",
                vec![d_t(), vf("X2", Expr::zero(), (&k - 1) * x(), -u())],
            ),
        ],
        infinite_family: None,
        instances: row2_instances(),
        ranges: [("k".to_string(), (1.5, 3.0))].into_iter().collect(),
    };

    let row3 = CatalogEntry {
        row: 3,
        model: GkeModel::four_thirds(),
        bases: vec![
            basis("normalized", four_thirds_basis().to_vec()),
            basis(
                "primary",
                vec![
                    d_t(),
                    vf("X2", Expr::zero(), x(), n(-3) * u()),
                    vf(
                        "X3",
                        n(2) * t(),
                        (n(3) * t() + lnx()) * x(),
                        n(-3) * (n(1) + n(3) * t() + lnx()) * u(),
                    ),
                ],
            ),
            basis(
                "alternate",
                vec![
                    d_t(),
                    vf(
                        "X2",
                        n(2) * t(),
                        (n(3) * t() + lnx() - 1) * x(),
                        n(-3) * (n(3) * t() + lnx()) * u(),
                    ),
                    vf("X3", Expr::zero(), x(), n(-3) * u()),
                ],
            ),
        ],
        infinite_family: None,
        instances: vec![],
        ranges: BTreeMap::new(),
    };

    let phi = |d: &str| opaque("phi", d);
    let row4 = CatalogEntry {
        row: 4,
        model: GkeModel::linear(),
        bases: vec![basis("primary", vec![d_t(), vf("X2", Expr::zero(), Expr::zero(), u())])],
        infinite_family: Some(heat_family(
            x2() * phi("xx") + x() * (x() + 4) * phi("x") + n(4) * x() * phi(""),
            "phi_t = x^2 phi_xx + x(x+4) phi_x + 4x phi",
            "phi",
        )),
        instances: vec![],
        ranges: BTreeMap::new(),
    };

    let psi = |d: &str| opaque("psi", d);
    let psi_side = || x2() * psi("xx") + n(4) * x() * psi("x");
    let psi_text = "psi_t = x^2 psi_xx + 4x psi_x";

    let row5 = CatalogEntry {
        row: 5,
        model: GkeModel::one(),
        bases: vec![
            basis(
                "primary",
                vec![
                    d_t(),
                    vf("X2", Expr::zero(), x(), u()),
                    vf("X3", Expr::zero(), Expr::zero(), xu()),
                    vf(
                        "X4",
                        n(2) * t(),
                        (lnx() - n(3) * t()) * x(),
                        -((lnx() - n(3) * t()) * x()),
                    ),
                    vf(
                        "X5",
                        n(4) * Expr::powi(t(), 2),
                        n(4) * t() * x() * lnx(),
                        -((Expr::powi(l3(), 2) + n(2) * t()) * xu() + n(4) * t() * x() * lnx()),
                    ),
                    vf(
                        "X6",
                        Expr::zero(),
                        n(2) * t() * x(),
                        -(l3() * xu() + n(2) * t() * x()),
                    ),
                ],
            ),
            basis(
                "alternate",
                vec![
                    d_t(),
                    vf("X2", Expr::zero(), x(), -x()),
                    vf("X3", Expr::zero(), Expr::zero(), xu()),
                    vf(
                        "X4",
                        Expr::zero(),
                        n(2) * t() * x(),
                        -(l3() * xu() + n(2) * t() * x()),
                    ),
                    vf(
                        "X5",
                        n(4) * t(),
                        n(2) * x() * lnx(),
                        -(n(3) * l3() * xu() + n(2) * x() * lnx()),
                    ),
                    vf(
                        "X6",
                        n(4) * Expr::powi(t(), 2),
                        n(4) * t() * x() * lnx(),
                        -((Expr::powi(l3(), 2) + n(2) * t()) * xu() + n(4) * t() * x() * lnx()),
                    ),
                ],
            ),
        ],
        infinite_family: Some(heat_family(psi_side(), psi_text, "psi")),
        instances: vec![],
        ranges: BTreeMap::new(),
    };

    let row6 = CatalogEntry {
        row: 6,
        model: GkeModel::zero(),
        bases: vec![
            basis(
                "primary",
                vec![
                    d_t(),
                    vf("X2", Expr::zero(), x(), Expr::zero()),
                    vf("X3", Expr::zero(), Expr::zero(), u()),
                    vf("X4", n(2) * t(), (lnx() - n(3) * t()) * x(), Expr::zero()),
                    vf("X5", Expr::zero(), n(2) * t() * x(), -(l3() * u())),
                    vf(
                        "X6",
                        n(4) * Expr::powi(t(), 2),
                        n(4) * t() * x() * lnx(),
                        -((Expr::powi(l3(), 2) + n(2) * t()) * u()),
                    ),
                ],
            ),
            basis(
                "alternate",
                vec![
                    d_t(),
                    vf("X2", Expr::zero(), x(), Expr::zero()),
                    vf("X3", Expr::zero(), Expr::zero(), u()),
                    vf("X4", Expr::zero(), n(2) * t() * x(), -(l3() * u())),
                    vf("X5", n(4) * t(), n(2) * x() * lnx(), -(n(3) * l3() * u())),
                    vf(
                        "X6",
                        n(4) * Expr::powi(t(), 2),
                        n(4) * t() * x() * lnx(),
                        -((Expr::powi(l3(), 2) + n(2) * t()) * u()),
                    ),
                ],
            ),
        ],
        infinite_family: Some(heat_family(psi_side(), psi_text, "psi")),
        instances: vec![],
        ranges: BTreeMap::new(),
    };

    vec![row1, row2, row3, row4, row5, row6]
}

/// JSON form of the catalog: coefficients in the expression text grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogDoc {
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub row: usize,
    pub model: ModelDoc,
    pub bases: Vec<BasisDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infinite_family: Option<FamilyDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDoc {
    pub source: String,
    pub generators: Vec<GeneratorDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub name: String,
    pub tau: String,
    pub xi: String,
    pub eta: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub generator: GeneratorDoc,
    pub side_condition: String,
    pub constraints: BTreeMap<String, String>,
}

impl From<&VectorField> for GeneratorDoc {
    fn from(v: &VectorField) -> Self {
        let [tau, xi, eta] = v.to_text();
        GeneratorDoc {
            name: v.name.clone(),
            tau,
            xi,
            eta,
        }
    }
}

impl CatalogDoc {
    pub fn new(entries: &[CatalogEntry]) -> Self {
        CatalogDoc {
            entries: entries
                .iter()
                .map(|e| EntryDoc {
                    row: e.row,
                    model: ModelDoc::from(&e.model),
                    bases: e
                        .bases
                        .iter()
                        .map(|b| BasisDoc {
                            source: b.source.clone(),
                            generators: b.generators.iter().map(GeneratorDoc::from).collect(),
                        })
                        .collect(),
                    infinite_family: e.infinite_family.as_ref().map(|f| FamilyDoc {
                        generator: GeneratorDoc::from(&f.generator),
                        side_condition: f.side_condition.clone(),
                        constraints: f
                            .constraints
                            .iter()
                            .map(|(k, v)| (k.name().to_string(), v.to_string()))
                            .collect(),
                    }),
                    instances: e.instances.iter().map(|i| i.model.label.clone()).collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_rows_with_expected_sizes() {
        let c = catalog();
        assert_eq!(c.len(), 6);
        let sizes: Vec<usize> = c.iter().map(|e| e.generators().len()).collect();
        assert_eq!(sizes, vec![2, 2, 3, 2, 6, 6]);
        assert!(c[3].infinite_family.is_some() && c[4].infinite_family.is_some() && c[5].infinite_family.is_some());
        assert_eq!(c[1].instances.len(), 4);
    }

    #[test]
    fn exponential_row_generators() {
        let c = catalog();
        let g = c[0].generators();
        assert_eq!(g[0], VectorField::d_t().named("X1"));
        assert_eq!(g[1].xi, x());
        assert_eq!(g[1].eta, Expr::int(-1));
    }

    #[test]
    fn json_round_trip_parses_back() {
        let doc = CatalogDoc::new(&catalog());
        let s = serde_json::to_string(&doc).unwrap();
        let back: CatalogDoc = serde_json::from_str(&s).unwrap();
        assert_eq!(back, doc);
        let ctx = crate::expr::JetContext::standard();
        for e in &doc.entries {
            for b in &e.bases {
                for g in &b.generators {
                    for c in [&g.tau, &g.xi, &g.eta] {
                        crate::expr::parse(c, &ctx).unwrap();
                    }
                }
            }
        }
    }
}
