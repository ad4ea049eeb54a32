//! The f = 0 equation in y = ln x against its Gaussian kernel.

use gke_lab::model::GkeModel;
use gke_lab::solver::{solve, HeatKernel, SolverGrid};

fn main() {
    let k = HeatKernel::default();
    for n in [64, 128, 256, 512] {
        let h = 7.5 / (n as f64 + 1.0);
        let g = SolverGrid::new(-4.0, 3.5, n, 0.5 * h * h, 0.1, 0.2).unwrap();
        let out = solve(&g, &GkeModel::zero(), &|t, y| k.eval(t, y)).unwrap();
        let (abs, rel) = out.error_against(&g, &|t, y| k.eval(t, y));
        println!("n = {n:<4} steps {:<5} max error {abs:.3e} (relative {rel:.3e})", g.steps().0);
    }
}
