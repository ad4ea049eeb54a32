//! Grid refinement studies: the heat kernel and solution (b) of the u^(4/3) equation.
//!
//! `cargo run --release --example convergence`

use gke_lab::model::GkeModel;
use gke_lab::solver::{convergence_study, solution_b_reference, HeatKernel, SolverGrid};

fn main() {
    let k = HeatKernel::default();
    let heat = SolverGrid::new(-4.0, 3.5, 128, 1e-3, 0.1, 0.2).unwrap();
    let r = convergence_study(&GkeModel::zero(), &|t, y| k.eval(t, y), &heat, &[128, 256, 512], 0.5).unwrap();
    report("f = 0", &r);

    let t0 = 0.5;
    let b = SolverGrid::new(3.0 * t0 + 1.0, 3.0 * t0 + 3.0, 64, 1e-5, t0, t0 + 0.01).unwrap();
    let r = convergence_study(&GkeModel::four_thirds(), &solution_b_reference, &b, &[64, 128, 256], 0.5).unwrap();
    report("f = u^(4/3)", &r);
}

fn report(name: &str, r: &gke_lab::solver::ConvergenceReport) {
    println!("{name}");
    for run in &r.runs {
        println!("  n {:<4} h {:.3e} dt {:.2e} error {:.3e}", run.n, run.h, run.dt, run.abs_error);
    }
    println!("  observed orders {:.3?}, band {:?}, pass {}", r.orders, r.band, r.pass);
}
