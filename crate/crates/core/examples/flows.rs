//! One-parameter groups of the symmetry generators, and what they do to solutions.

use gke_lab::expr::{q, sym, Expr, Symbol};
use gke_lab::model::GkeModel;
use gke_lab::reduction::{basis, ExactSolution};
use gke_lab::symmetry::{flow, map_solution_by_flow};

fn main() {
    let [x1, x2, x3] = basis();
    let p = [1.0, 2.0, 0.5];
    for v in [&x1, &x2, &x3] {
        let img = flow(v, 0.3, p).unwrap();
        let back = flow(v, -0.3, img).unwrap();
        println!("exp(0.3 {}) {p:?} = {img:.6?}, back {back:.6?}", v.name);
    }

    let m = GkeModel::four_thirds();
    let grid: Vec<(f64, f64)> = (0..4).flat_map(|i| (0..4).map(move |j| (0.6 + 0.2 * i as f64, 0.8 + 0.3 * j as f64))).collect();
    let x: Expr = sym::x().into();
    let a = Expr::rational(3, 2) * Expr::powi(x, -3);
    let r = map_solution_by_flow(&x2, 0.5, &a, &m, &grid, 1e-4, 1e-6).unwrap();
    println!("X2 image of (a) solves the equation: {} ({:.1e})", r.pass, r.max_residual);

    let c = ExactSolution::find("c").unwrap().u.subs(&Symbol::parameter("c"), &Expr::constant(q(-1, 2)));
    for v in [&x1, &x3] {
        let r = map_solution_by_flow(v, 0.2, &c, &m, &grid, 1e-4, 1e-6).unwrap();
        println!("{} image of (c) solves the equation: {} ({:.1e})", v.name, r.pass, r.max_residual);
    }
}
