//! The five invariant reductions of the u^(4/3) equation.

use gke_lab::expr::SampleConfig;
use gke_lab::reduction::{ansatz_case, check_invariants, lift_consistency, reduce, Case};

fn main() {
    let cfg = SampleConfig::default();
    for c in Case::ALL {
        let a = ansatz_case(c);
        let inv = check_invariants(&a, &cfg).unwrap();
        let r = reduce(&a, &cfg).unwrap();
        let lift = lift_consistency(c, 1e-2, 1e-3).unwrap();
        println!("case {c}: {}", a.generator.name);
        println!("  y = {}   u = ({}) phi(y)", a.y, a.shape);
        println!("  invariants ok: {}", inv.y_invariant && inv.omega_invariant);
        println!("  reduced ODE {} = 0  matches: {}", a.expected_ode, r.pass());
        println!("  lift residual {:.1e} at h, {:.1e} at h/2, order {:.2}", lift.residual_h, lift.residual_h2, lift.order);
    }
}
