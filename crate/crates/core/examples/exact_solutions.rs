//! Closed-form invariant solutions checked symbolically and by differences.

use gke_lab::expr::SampleConfig;
use gke_lab::reduction::{exact_solutions, verify_exact, Mode};

fn main() {
    let cfg = SampleConfig::default();
    for s in exact_solutions() {
        println!("({}) case {}  u = {}", s.id, s.case, s.u);
        for mode in [Mode::Symbolic, Mode::Numeric] {
            let r = verify_exact(&s, mode, &cfg).unwrap();
            println!("    {mode:?}: pass {} max residual {:.1e} over {} points", r.pass, r.max_residual, r.samples);
        }
        let bad = verify_exact(&s.corrupted(), Mode::Symbolic, &cfg).unwrap();
        println!("    perturbed copy rejected: {}", !bad.pass);
    }
}
