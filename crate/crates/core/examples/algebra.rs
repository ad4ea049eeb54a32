//! Brackets of the u^(4/3) algebra in the basis e1 = X1 + 3X2, e2 = X2, e3 = X3.

use gke_lab::expr::{q, qi, Expr, SampleConfig};
use gke_lab::reduction::basis;
use gke_lab::symmetry::{jacobi_residual, lie_bracket, verify_structure_constants, BracketTable, VectorField};

fn main() {
    let [x1, x2, x3] = basis();
    for (a, b) in [(&x1, &x2), (&x1, &x3), (&x2, &x3)] {
        let c = lie_bracket(a, b).unwrap();
        let [tau, xi, eta] = c.to_text();
        println!("[{}, {}] = ({tau}, {xi}, {eta})", a.name, b.name);
    }

    let e1 = VectorField::combination("e1", &[(Expr::one(), &x1), (Expr::int(3), &x2)]);
    let e = [e1, x2.clone().named("e2"), x3.clone().named("e3")];
    let mut table = BracketTable::zeros(3);
    table.set(0, 2, &[qi(1), qi(0), qi(0)]);
    table.set(1, 2, &[qi(0), q(1, 2), qi(0)]);
    let r = verify_structure_constants(&e, &table, &SampleConfig::default()).unwrap();
    for c in &r.checks {
        println!("[e{}, e{}] matches: {} ({:.1e})", c.i + 1, c.j + 1, c.pass, c.max_residual);
    }

    let j = jacobi_residual(&x1, &x2, &x3).unwrap();
    println!("Jacobi residual of (X1, X2, X3) is zero: {}", j.coefficients().iter().all(|c| c.is_zero()));
}
