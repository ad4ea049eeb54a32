//! The expression layer: build, differentiate, print, parse, test for zero.

use gke_lab::expr::{differentiate, is_identically_zero, parse, q, sym, total_derivative, Expr, JetContext, SampleConfig};

fn main() {
    let ctx = JetContext::standard();
    let u: Expr = sym::u().into();
    let x: Expr = sym::x().into();

    let f = Expr::pow(u.clone(), q(4, 3));
    let f_u = differentiate(&f, &u).unwrap();
    println!("f      = {f}");
    println!("f'(u)  = {f_u}");

    // total derivative treats u as u(t, x)
    let g = &x * Expr::exp(u.clone());
    println!("D_x g  = {}", total_derivative(&g, &sym::x(), &ctx).unwrap());

    let text = f_u.to_string();
    let back = parse(&text, &ctx).unwrap();
    println!("round trip {text:?} -> equal: {}", back == f_u);

    // (u^(1/3))^3 - u vanishes for u > 0
    let e = Expr::powi(Expr::pow(u.clone(), q(1, 3)), 3) - &u;
    let z = is_identically_zero(&e, &SampleConfig::default()).unwrap();
    println!("(u^(1/3))^3 - u: zero = {} over {} samples", z.zero, z.samples);

    let nonzero = Expr::ln(&x * &u) - Expr::ln(x.clone());
    let z = is_identically_zero(&nonzero, &SampleConfig::default()).unwrap();
    println!("ln(xu) - ln x  : zero = {}, witness {:?}", z.zero, z.witness.map(|w| w.point));
}
