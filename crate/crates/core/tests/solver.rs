use gke_lab::expr::qi;
use gke_lab::model::{EquivTransform, GkeModel};
use gke_lab::solver::{convergence_study, solution_b_reference, solve, HeatKernel, SolverGrid};

fn b_grid(n: usize, dt: f64) -> SolverGrid {
    let t0 = 0.5;
    SolverGrid::new(3.0 * t0 + 1.0, 3.0 * t0 + 3.0, n, dt, t0, t0 + 0.01).unwrap()
}

#[test]
fn heat_kernel_three_grid_study() {
    let g = SolverGrid::new(-4.0, 3.5, 128, 1e-3, 0.1, 0.2).unwrap();
    let k = HeatKernel::default();
    let r = convergence_study(&GkeModel::zero(), &|t, y| k.eval(t, y), &g, &[128, 256, 512], 0.5).unwrap();
    println!("{:?}", r);
    assert!(r.pass);
    assert!(r.runs[2].abs_error < 1e-4);
}

#[test]
fn four_thirds_tracks_solution_b() {
    let g = b_grid(256, 1e-5);
    let out = solve(&g, &GkeModel::four_thirds(), &solution_b_reference).unwrap();
    let (_, rel) = out.error_against(&g, &solution_b_reference);
    println!("rel {rel:e}");
    assert!(rel < 1e-3);
}

#[test]
fn solution_b_refinement() {
    let r = convergence_study(&GkeModel::four_thirds(), &solution_b_reference, &b_grid(64, 1e-5), &[64, 128, 256], 0.5)
        .unwrap();
    println!("{:?}", r);
    assert!(r.pass);
}

#[test]
fn u_affine_maps_commute_with_the_scheme() {
    let m = GkeModel::four_thirds();
    let t = EquivTransform::new(qi(0), qi(1), qi(2), qi(3)).unwrap();
    let mt = t.apply_f(&m).unwrap();
    let g = b_grid(64, 1e-4);
    let base = solve(&g, &m, &solution_b_reference).unwrap();
    let pushed = |tt: f64, y: f64| 2.0 * solution_b_reference(tt, y) + 3.0;
    let mapped = solve(&g, &mt, &pushed).unwrap();
    let (disc, _) = base.error_against(&g, &solution_b_reference);
    for (a, b) in base.u.iter().zip(&mapped.u) {
        assert!((2.0 * a + 3.0 - b).abs() <= 2.0 * 2.0 * disc + 1e-12);
    }
}
