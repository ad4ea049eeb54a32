//! Lie brackets and structure-constant checks.

use serde::{Deserialize, Serialize};

use super::{SymmetryError, VectorField};
use crate::expr::{is_identically_zero, Expr, ExprError, SampleConfig, Witness, Q};
use num_traits::Zero;

/// `[X, Y]` as first-order operators on `(t, x, u)`.
pub fn lie_bracket(a: &VectorField, b: &VectorField) -> Result<VectorField, ExprError> {
    let tau = a.apply(&b.tau)? - b.apply(&a.tau)?;
    let xi = a.apply(&b.xi)? - b.apply(&a.xi)?;
    let eta = a.apply(&b.eta)? - b.apply(&a.eta)?;
    Ok(VectorField::new(&format!("[{},{}]", a.name, b.name), tau, xi, eta))
}

/// `[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]]`.
pub fn jacobi_residual(a: &VectorField, b: &VectorField, c: &VectorField) -> Result<VectorField, ExprError> {
    let t1 = lie_bracket(a, &lie_bracket(b, c)?)?;
    let t2 = lie_bracket(b, &lie_bracket(c, a)?)?;
    let t3 = lie_bracket(c, &lie_bracket(a, b)?)?;
    Ok(t1.add(&t2).add(&t3).named("jacobi"))
}

/// Structure constants `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketTable {
    pub c: Vec<Vec<Vec<Q>>>,
}

impl BracketTable {
    pub fn zeros(n: usize) -> Self {
        BracketTable {
            c: vec![vec![vec![Q::zero(); n]; n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Set `[e_i, e_j]` and the antisymmetric partner `[e_j, e_i]`.
    pub fn set(&mut self, i: usize, j: usize, coeffs: &[Q]) {
        self.c[i][j] = coeffs.to_vec();
        self.c[j][i] = coeffs.iter().map(|v| -v.clone()).collect();
    }

    pub fn validate(&self) -> Result<(), SymmetryError> {
        let n = self.dim();
        for (i, row) in self.c.iter().enumerate() {
            if row.len() != n || row.iter().any(|v| v.len() != n) {
                return Err(SymmetryError::TableShape(format!("row {i} is not {n}x{n}")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        return Err(SymmetryError::NotAntisymmetric(i, j));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketCheck {
    pub i: usize,
    pub j: usize,
    pub pass: bool,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub pass: bool,
    pub checks: Vec<BracketCheck>,
}

/// Test every `[e_i, e_j]`, `i < j`, against the expected combination.
pub fn verify_structure_constants(
    basis: &[VectorField],
    expected: &BracketTable,
    cfg: &SampleConfig,
) -> Result<StructureReport, SymmetryError> {
    expected.validate()?;
    if expected.dim() != basis.len() {
        return Err(SymmetryError::TableShape(format!(
            "table is {0}x{0}, basis has {1} fields",
            expected.dim(),
            basis.len()
        )));
    }
    let mut checks = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let got = lie_bracket(&basis[i], &basis[j])?;
            let terms: Vec<(Expr, &VectorField)> = expected.c[i][j]
                .iter()
                .zip(basis)
                .map(|(c, v)| (Expr::constant(-c.clone()), v))
                .collect();
            let diff = got.add(&VectorField::combination("", &terms));
            let mut check = BracketCheck {
                i,
                j,
                pass: true,
                max_residual: 0.0,
                witness: None,
            };
            for coeff in diff.coefficients() {
                let z = is_identically_zero(coeff, cfg)?;
                check.max_residual = check.max_residual.max(z.max_residual);
                if !z.zero {
                    check.pass = false;
                    if check.witness.is_none() {
                        check.witness = z.witness;
                    }
                }
            }
            checks.push(check);
        }
    }
    Ok(StructureReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{q, qi, sym};

    fn x1() -> VectorField {
        VectorField::d_t().named("X1")
    }
    fn x2() -> VectorField {
        VectorField::new("X2", Expr::zero(), sym::x().into(), Expr::int(-3) * Expr::symbol(&sym::u()))
    }

    #[test]
    fn translations_commute_with_scaling() {
        let b = lie_bracket(&x1(), &x2()).unwrap();
        assert!(b.tau.is_zero() && b.xi.is_zero() && b.eta.is_zero());
    }

    #[test]
    fn antisymmetry_is_enforced() {
        let mut t = BracketTable::zeros(2);
        t.c[0][1] = vec![qi(1), qi(0)];
        assert!(matches!(t.validate(), Err(SymmetryError::NotAntisymmetric(..))));
        t.set(0, 1, &[qi(1), q(1, 2)]);
        t.validate().unwrap();
    }

    #[test]
    fn expected_zero_table_matches_abelian_pair() {
        let r = verify_structure_constants(&[x1(), x2()], &BracketTable::zeros(2), &SampleConfig::default()).unwrap();
        assert!(r.pass);
        let mut wrong = BracketTable::zeros(2);
        wrong.set(0, 1, &[qi(1), qi(0)]);
        let r = verify_structure_constants(&[x1(), x2()], &wrong, &SampleConfig::default()).unwrap();
        assert!(!r.pass);
        assert!(r.checks[0].witness.is_some());
    }
}
