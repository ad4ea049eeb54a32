use gke_lab::expr::{q, sym, Expr, SampleConfig, Symbol};
use gke_lab::model::GkeModel;
use gke_lab::reduction::{basis, exact_solutions, verify_exact, ExactSolution, Mode};
use gke_lab::symmetry::map_solution_by_flow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn t() -> Expr {
    sym::t().into()
}

fn x() -> Expr {
    sym::x().into()
}

/// `u_t - x² u_xx - x(x f'(u) + 4) u_x - 4x f(u)` for `f = u^(4/3)`, by
/// second-order differences with step `h`, relative to the term sizes.
fn fd_oracle(u: impl Fn(f64, f64) -> f64, t: f64, x: f64, h: f64) -> f64 {
    let (ht, hx) = (h, h * x);
    let u0 = u(t, x);
    let ut = (u(t + ht, x) - u(t - ht, x)) / (2.0 * ht);
    let ux = (u(t, x + hx) - u(t, x - hx)) / (2.0 * hx);
    let uxx = (u(t, x + hx) - 2.0 * u0 + u(t, x - hx)) / (hx * hx);
    let f = u0.powf(4.0 / 3.0);
    let fu = 4.0 / 3.0 * u0.cbrt();
    let terms = [x * x * uxx, x * (x * fu + 4.0) * ux, 4.0 * x * f];
    (ut - terms.iter().sum::<f64>()).abs() / (ut.abs() + terms.iter().map(|v| v.abs()).sum::<f64>())
}

#[test]
fn every_solution_passes_in_both_modes() {
    for s in exact_solutions() {
        for mode in [Mode::Symbolic, Mode::Numeric] {
            let r = verify_exact(&s, mode, &SampleConfig::default()).unwrap();
            assert!(r.pass, "({}) {mode:?} {:?}", s.id, r.witness);
        }
        let numeric = verify_exact(&s, Mode::Numeric, &SampleConfig::default()).unwrap();
        assert_eq!(numeric.samples, 200);
    }
}

#[test]
fn b_with_squared_denominator_fails() {
    let mut s = ExactSolution::find("b").unwrap();
    let x3 = Expr::powi(x(), 3);
    s.u = Expr::int(27) * Expr::powi(&x3 * Expr::powi(Expr::ln(x()) - Expr::int(3) * t(), 2), -1);
    let r = verify_exact(&s, Mode::Symbolic, &SampleConfig::default()).unwrap();
    assert!(!r.pass);
    let w = r.witness.expect("witness");
    let tw = w.point["t"];
    let xw = (3.0 * tw + w.point["s"]).exp();
    let wrong = |t: f64, x: f64| 27.0 / (x.powi(3) * (x.ln() - 3.0 * t).powi(2));
    let right = |t: f64, x: f64| 27.0 / (x.powi(3) * (x.ln() - 3.0 * t).powi(3));
    assert!(fd_oracle(wrong, tw, xw, 1e-4) > 1e-3);
    assert!(fd_oracle(right, tw, xw, 1e-4) < 1e-6);
}

#[test]
fn a_for_random_rational_c() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c = Symbol::parameter("c");
    for _ in 0..5 {
        let cq = q(rng.random_range(1..=40), rng.random_range(1..=9));
        let mut s = ExactSolution::find("a").unwrap();
        s.u = s.u.subs(&c, &Expr::constant(cq.clone()));
        s.params.clear();
        let r = verify_exact(&s, Mode::Symbolic, &SampleConfig::default()).unwrap();
        assert!(r.pass, "c = {cq}");
    }
}

#[test]
fn c_at_zero_is_the_stationary_profile() {
    let s = ExactSolution::find("c").unwrap();
    let u = s.u.subs(&Symbol::parameter("c"), &Expr::zero());
    assert_eq!(u, Expr::powi(x(), -3));
}

#[test]
fn scaling_flow_keeps_family_a() {
    let x2 = &basis()[1];
    let m = GkeModel::four_thirds();
    let grid: Vec<(f64, f64)> = (0..5).flat_map(|i| (0..5).map(move |j| (0.5 + 0.3 * i as f64, 0.6 + 0.3 * j as f64))).collect();
    for (c, eps) in [(1.0, 0.3), (1.5, -0.7), (0.25, 1.1)] {
        let u = Expr::rational((c * 4.0) as i64, 4) * Expr::powi(x(), -3);
        let r = map_solution_by_flow(x2, eps, &u, &m, &grid, 1e-4, 1e-6).unwrap();
        assert!(r.pass, "c = {c}, eps = {eps}: {r:?}");
    }
}

#[test]
fn time_translation_moves_along_family_c() {
    let x1 = &basis()[0];
    let m = GkeModel::four_thirds();
    let grid: Vec<(f64, f64)> = (0..4).flat_map(|i| (0..4).map(move |j| (0.5 + 0.2 * i as f64, 0.8 + 0.3 * j as f64))).collect();
    let s = ExactSolution::find("c").unwrap();
    let u = s.u.subs(&Symbol::parameter("c"), &Expr::rational(-1, 2));
    let r = map_solution_by_flow(x1, 0.2, &u, &m, &grid, 1e-4, 1e-6).unwrap();
    assert!(r.pass, "{r:?}");
    let wrong = GkeModel::power(q(5, 3));
    let r = map_solution_by_flow(x1, 0.2, &u, &wrong, &grid, 1e-4, 1e-6).unwrap();
    assert!(!r.pass);
}
