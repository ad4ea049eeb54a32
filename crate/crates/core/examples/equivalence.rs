//! Equivalence transformations acting on f and on solutions.

use gke_lab::expr::{is_identically_zero, q, qi, sym, Expr, SampleConfig};
use gke_lab::model::{residual, shift_map_f1_to_f0, EquivTransform, GkeModel};

fn main() {
    let t1 = EquivTransform::new(q(1, 2), qi(2), qi(3), q(-1, 4)).unwrap();
    let t2 = EquivTransform::new(qi(-1), q(1, 3), q(1, 2), qi(1)).unwrap();
    println!("T1 = {}", t1.describe());
    println!("T2 = {}", t2.describe());
    println!("T1 T2 = {}", t1.compose(&t2).describe());
    println!("T1 T1^-1 is identity: {}", t1.compose(&t1.invert()).is_identity());

    let m = GkeModel::four_thirds();
    let mt = t1.apply_f(&m).unwrap();
    println!("f  = {}\nf' = {}", m.f, mt.f);

    // c x^-3 solves the u^(4/3) equation; push it forward
    let x: Expr = sym::x().into();
    let u0 = Expr::int(2) * Expr::powi(x.clone(), -3);
    let pushed = t1.push_solution(&u0).unwrap();
    println!("pushed solution {pushed}");
    let cfg = SampleConfig::default().with_range("t", 1.0, 2.0).with_range("x", 2.0, 4.0);
    let r = residual(&mt, &pushed).unwrap();
    println!("solves the pushed model: {}", is_identically_zero(&r, &cfg).unwrap().zero);

    // the f = 1 equation linearizes to f = 0
    let v = Expr::int(3) * Expr::powi(x.clone(), -3) - &x;
    let one = residual(&GkeModel::one(), &v).unwrap();
    let zero = residual(&GkeModel::zero(), &shift_map_f1_to_f0(&v)).unwrap();
    println!(
        "f=1 solution {v}: {}  image solves f=0: {}",
        is_identically_zero(&one, &cfg).unwrap().zero,
        is_identically_zero(&zero, &cfg).unwrap().zero
    );
}
