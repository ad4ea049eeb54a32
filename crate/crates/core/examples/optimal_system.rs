//! The optimal system of subalgebras with closure checks.

use gke_lab::expr::SampleConfig;
use gke_lab::reduction::{optimal_system, subalgebra_closure};

fn main() {
    for s in optimal_system() {
        let r = subalgebra_closure(&s, &SampleConfig::default()).unwrap();
        println!("{:<22} dim {}  closed {}  brackets verified {}", s.label, s.dim(), r.closed, r.brackets_verified);
    }
}
