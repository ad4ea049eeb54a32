//! The implicit y(phi) branches of case IV checked against the ODE.

use gke_lab::reduction::{implicit_relation_check, implicit_y, Branch};

fn main() {
    for b in [Branch::One, Branch::Two] {
        let r = implicit_relation_check(b, 2.0, 0.0, (1.0, 8.0), 1e-3, 1e-4).unwrap();
        println!(
            "{b:?}: y in [{:.4}, {:.4}], {} monotone piece(s), {} points, residual {:.1e}, pass {}",
            r.y_range.0, r.y_range.1, r.monotone_pieces, r.points, r.max_residual, r.pass
        );
        for phi in [1.0, 2.0, 4.0, 8.0] {
            println!("    y({phi}) = {:.6}", implicit_y(b, 2.0, 0.0, phi));
        }
    }
}
