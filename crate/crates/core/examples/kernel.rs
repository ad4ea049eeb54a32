//! For a generic f only the time translation survives.

use gke_lab::expr::{q, sym, Expr, SampleConfig};
use gke_lab::model::{catalog, GkeModel};
use gke_lab::symmetry::{verify_symmetry, VectorField};

fn main() {
    let u: Expr = sym::u().into();
    let f = Expr::rational(1, 3) * Expr::powi(u.clone(), 3) - Expr::int(2) * &u + Expr::rational(5, 4) * Expr::exp(u.clone())
        + Expr::pow(u.clone(), q(1, 2));
    let m = GkeModel::new("generic", f).unwrap();
    println!("f = {}", m.f);

    let r = verify_symmetry(&VectorField::d_t(), &m, &SampleConfig::default(), None).unwrap();
    println!("d_t admitted: {}", r.pass);

    for entry in catalog() {
        for g in entry.generators() {
            if g.tau == Expr::one() && g.xi.is_zero() && g.eta.is_zero() {
                continue;
            }
            let r = verify_symmetry(g, &m, &SampleConfig::default(), None).unwrap();
            let at = r.witness.map(|w| format!("{:?}", w.point)).unwrap_or_default();
            println!("row {} {:<4} admitted: {:<5} {at}", entry.row, g.name, r.pass);
        }
    }
}
