//! Integrate reduced ODEs and compare with known particular solutions.
//!
//! `cargo run --example reduced_ode > phi.csv` writes the case II track.

use gke_lab::reduction::{integrate_reduced_ode, Case};

fn main() {
    // phi = 27 y^-3 solves the case II equation
    let tr = integrate_reduced_ode(Case::II, 3.0, [1.0, -1.0], 6.0, 3000).unwrap();
    let err = tr.y.iter().zip(&tr.phi).map(|(y, p)| (p - 27.0 / y.powi(3)).abs()).fold(0.0, f64::max);
    eprintln!("case II: max |phi - 27/y^3| = {err:.2e}");

    // Emden-Fowler type case III with phi = (1 - c y^(-1/3))^-3, c = 1/2
    let tr3 = integrate_reduced_ode(Case::III, 1.0, [8.0, -8.0], 4.0, 3000).unwrap();
    let (y, phi, _) = tr3.last();
    eprintln!("case III: phi({y}) = {phi:.12} vs {:.12}", (1.0 - 0.5 * y.powf(-1.0 / 3.0)).powi(-3));

    print!("{}", tr.to_csv());
}
