//! One-parameter flows of vector fields and the solution maps they induce.

use serde::{Deserialize, Serialize};

use super::{SymmetryError, VectorField};
use crate::expr::{differentiate, sym, CompiledExpr, Expr, Symbol};
use crate::model::GkeModel;

/// A point `(t, x, u)`.
pub type FlowPoint = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Initial number of RK4 steps over `[0, eps]`.
    pub steps: usize,
    /// Accept when halving the step moves the endpoint by less than this,
    /// relative to the endpoint magnitude.
    pub rel_tol: f64,
    pub max_halvings: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            steps: 64,
            rel_tol: 1e-10,
            max_halvings: 12,
        }
    }
}

enum Kind {
    /// Each coefficient is `a + b * own coordinate` with constant `a, b`.
    Diagonal([(f64, f64); 3]),
    Numeric([CompiledExpr; 3]),
}

struct Compiled {
    kind: Kind,
}

fn constant_value(e: &Expr) -> Option<f64> {
    if !e.free_symbols().is_empty() {
        return None;
    }
    crate::expr::eval(e, &Default::default()).ok()
}

fn affine_in(e: &Expr, v: &Symbol) -> Option<(f64, f64)> {
    if e.free_symbols().iter().any(|s| s != v) {
        return None;
    }
    let b = differentiate(e, &v.into()).ok()?;
    let bv = constant_value(&b)?;
    let a = e - b * Expr::symbol(v);
    Some((constant_value(&a)?, bv))
}

impl Compiled {
    fn new(v: &VectorField) -> Result<Self, SymmetryError> {
        let vars = [sym::t(), sym::x(), sym::u()];
        let diag = [
            affine_in(&v.tau, &vars[0]),
            affine_in(&v.xi, &vars[1]),
            affine_in(&v.eta, &vars[2]),
        ];
        if let [Some(a), Some(b), Some(c)] = diag {
            return Ok(Compiled {
                kind: Kind::Diagonal([a, b, c]),
            });
        }
        let c = |e: &Expr| CompiledExpr::new(e, &vars).map_err(SymmetryError::from);
        Ok(Compiled {
            kind: Kind::Numeric([c(&v.tau)?, c(&v.xi)?, c(&v.eta)?]),
        })
    }

    fn field(&self, p: &FlowPoint, buf: &mut Vec<f64>) -> FlowPoint {
        match &self.kind {
            Kind::Diagonal(d) => [d[0].0 + d[0].1 * p[0], d[1].0 + d[1].1 * p[1], d[2].0 + d[2].1 * p[2]],
            Kind::Numeric(c) => [c[0].eval(p, buf), c[1].eval(p, buf), c[2].eval(p, buf)],
        }
    }
}

fn check_domain(p: &FlowPoint, at: f64) -> Result<(), SymmetryError> {
    if !(p[1] > 0.0 && p[2] > 0.0) || p.iter().any(|v| !v.is_finite()) {
        return Err(SymmetryError::DomainExit { at });
    }
    Ok(())
}

fn closed_form(d: &[(f64, f64); 3], eps: f64, p: &FlowPoint) -> FlowPoint {
    let mut out = [0.0; 3];
    for i in 0..3 {
        let (a, b) = d[i];
        out[i] = if b == 0.0 {
            p[i] + a * eps
        } else {
            let g = (b * eps).exp();
            p[i] * g + a / b * (g - 1.0)
        };
    }
    out
}

fn rk4(c: &Compiled, eps: f64, p: &FlowPoint, steps: usize) -> Result<FlowPoint, SymmetryError> {
    let h = eps / steps as f64;
    let mut buf = Vec::new();
    let mut z = *p;
    let add = |a: &FlowPoint, k: &FlowPoint, s: f64| [a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2]];
    for n in 0..steps {
        let k1 = c.field(&z, &mut buf);
        let z2 = add(&z, &k1, h / 2.0);
        check_domain(&z2, (n as f64 + 0.5) * h)?;
        let k2 = c.field(&z2, &mut buf);
        let z3 = add(&z, &k2, h / 2.0);
        check_domain(&z3, (n as f64 + 0.5) * h)?;
        let k3 = c.field(&z3, &mut buf);
        let z4 = add(&z, &k3, h);
        check_domain(&z4, (n + 1) as f64 * h)?;
        let k4 = c.field(&z4, &mut buf);
        for i in 0..3 {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_domain(&z, (n + 1) as f64 * h)?;
    }
    Ok(z)
}

fn rel_change(a: &FlowPoint, b: &FlowPoint) -> f64 {
    (0..3)
        .map(|i| (a[i] - b[i]).abs() / (1.0 + b[i].abs()))
        .fold(0.0, f64::max)
}

/// `exp(eps X)` applied to `p`, with step halving until the endpoint settles.
pub fn flow_with(v: &VectorField, eps: f64, p: FlowPoint, cfg: &FlowConfig) -> Result<(FlowPoint, usize), SymmetryError> {
    check_domain(&p, 0.0)?;
    let c = Compiled::new(v)?;
    if let Kind::Diagonal(d) = &c.kind {
        let out = closed_form(d, eps, &p);
        if check_domain(&out, eps).is_err() {
            // each coordinate is monotone along an affine flow: bisect for the exit
            let (mut lo, mut hi) = (0.0, eps);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if check_domain(&closed_form(d, mid, &p), mid).is_ok() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Err(SymmetryError::DomainExit { at: hi });
        }
        return Ok((out, 0));
    }
    let mut n = cfg.steps.max(1);
    let mut prev = rk4(&c, eps, &p, n)?;
    let mut change = f64::INFINITY;
    for _ in 0..cfg.max_halvings {
        n *= 2;
        let next = rk4(&c, eps, &p, n)?;
        change = rel_change(&prev, &next);
        prev = next;
        if change < cfg.rel_tol {
            return Ok((prev, n));
        }
    }
    Err(SymmetryError::NoConvergence { change, steps: n })
}

/// [`flow_with`] under the default configuration.
pub fn flow(v: &VectorField, eps: f64, p: FlowPoint) -> Result<FlowPoint, SymmetryError> {
    flow_with(v, eps, p, &FlowConfig::default()).map(|(z, _)| z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowMapReport {
    pub generator: String,
    pub eps: f64,
    pub pass: bool,
    pub tol: f64,
    /// Largest `|residual| / (sum of |term|)` over the grid.
    pub max_residual: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<(f64, f64)>,
}

struct SolutionMap {
    c: Compiled,
    u: CompiledExpr,
    eps: f64,
    steps: usize,
}

impl SolutionMap {
    fn back(&self, p: FlowPoint) -> Result<FlowPoint, SymmetryError> {
        match &self.c.kind {
            Kind::Diagonal(d) => Ok(closed_form(d, -self.eps, &p)),
            Kind::Numeric(_) => rk4(&self.c, -self.eps, &p, self.steps),
        }
    }

    /// Value of the transformed solution at `(t, x)`: the `w` for which the
    /// backward flow of `(t, x, w)` lands on the graph of `u`.
    fn value(&self, t: f64, x: f64) -> Result<f64, SymmetryError> {
        let lookup = |reason: String| SymmetryError::InverseLookup { t, x, reason };
        let g = |w: f64| -> Result<f64, SymmetryError> {
            let z = self.back([t, x, w])?;
            let target = self.u.eval_once(&[z[0], z[1]]);
            if !target.is_finite() {
                return Err(lookup("original solution undefined at the preimage".into()));
            }
            Ok(z[2] - target)
        };
        let guess = {
            let v = self.u.eval_once(&[t, x]);
            if v.is_finite() && v > 0.0 {
                v
            } else {
                1.0
            }
        };
        // secant iteration; the map w -> g(w) is close to linear
        let (mut w0, mut w1) = (guess, guess * 1.001);
        let (mut g0, mut g1) = (g(w0)?, g(w1)?);
        for _ in 0..60 {
            if g1 == 0.0 {
                return Ok(w1);
            }
            let denom = g1 - g0;
            if denom == 0.0 {
                break;
            }
            let mut w2 = w1 - g1 * (w1 - w0) / denom;
            if w2 <= 0.0 {
                w2 = w1 / 2.0;
            }
            if (w2 - w1).abs() <= 1e-15 * w1.abs() {
                return Ok(w2);
            }
            (w0, g0) = (w1, g1);
            w1 = w2;
            g1 = g(w1)?;
        }
        if g1.abs() <= 1e-14 * (1.0 + w1.abs()) {
            return Ok(w1);
        }
        Err(lookup(format!("secant iteration stalled at w = {w1}, g = {g1:e}")))
    }
}

/// Transform `u_expr` (a solution of `m` in `t, x`) by `exp(eps X)` and
/// check the PDE on `grid` by centered finite differences with relative
/// step `h`. Passes when every relative residual is below `tol`.
pub fn map_solution_by_flow(
    v: &VectorField,
    eps: f64,
    u_expr: &Expr,
    m: &GkeModel,
    grid: &[(f64, f64)],
    h: f64,
    tol: f64,
) -> Result<FlowMapReport, SymmetryError> {
    if grid.is_empty() || !(h > 0.0) {
        return Err(SymmetryError::Config("need a non-empty grid and h > 0".into()));
    }
    let c = Compiled::new(v)?;
    let u = CompiledExpr::new(u_expr, &[sym::t(), sym::x()])?;
    let f = CompiledExpr::new(&m.f, &[sym::u()])?;
    let f_u = CompiledExpr::new(&m.f_u, &[sym::u()])?;
    // step count settled once at the first grid point, then frozen so the
    // transformed solution is a smooth function of (t, x)
    let steps = match &c.kind {
        Kind::Diagonal(_) => 0,
        Kind::Numeric(_) => {
            let (t, x) = grid[0];
            let w = u.eval_once(&[t, x]);
            let w = if w.is_finite() && w > 0.0 { w } else { 1.0 };
            flow_with(v, -eps, [t, x, w], &FlowConfig::default())?.1.max(64)
        }
    };
    let map = SolutionMap {
        c,
        u,
        eps,
        steps,
    };
    let mut worst = 0.0;
    let mut worst_point = None;
    for &(t, x) in grid {
        let ht = h * t.abs().max(1.0);
        let hx = h * x;
        let c0 = map.value(t, x)?;
        let tp = map.value(t + ht, x)?;
        let tm = map.value(t - ht, x)?;
        let xp = map.value(t, x + hx)?;
        let xm = map.value(t, x - hx)?;
        let ut = (tp - tm) / (2.0 * ht);
        let ux = (xp - xm) / (2.0 * hx);
        let uxx = (xp - 2.0 * c0 + xm) / (hx * hx);
        let fv = f.eval_once(&[c0]);
        let fu = f_u.eval_once(&[c0]);
        let terms = [ut, -x * x * uxx, -x * (x * fu + 4.0) * ux, -4.0 * x * fv];
        let res: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        let rel = res.abs() / scale;
        if !rel.is_finite() {
            return Err(SymmetryError::InverseLookup {
                t,
                x,
                reason: "non-finite residual".into(),
            });
        }
        if rel > worst {
            worst = rel;
            worst_point = Some((t, x));
        }
    }
    Ok(FlowMapReport {
        generator: v.name.clone(),
        eps,
        pass: worst <= tol,
        tol,
        max_residual: worst,
        points: grid.len(),
        worst_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    
    fn x() -> Expr {
        sym::x().into()
    }
    fn u() -> Expr {
        sym::u().into()
    }
    fn t() -> Expr {
        sym::t().into()
    }

    #[test]
    fn time_translation() {
        let z = flow(&VectorField::d_t(), 1.0, [0.0, 1.0, 1.0]).unwrap();
        assert_eq!(z, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn scaling_flow_is_exact() {
        let v = VectorField::new("X2", Expr::zero(), x(), Expr::int(-3) * u());
        let e: f64 = 0.7;
        let z = flow(&v, e, [0.3, 1.5, 2.0]).unwrap();
        assert!((z[1] - 1.5 * e.exp()).abs() < 1e-12);
        assert!((z[2] - 2.0 * (-3.0 * e).exp()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_field_matches_closed_form() {
        let v = VectorField::new("x2", Expr::zero(), Expr::powi(x(), 2), Expr::zero());
        let z = flow(&v, 0.3, [0.0, 1.0, 1.0]).unwrap();
        assert!((z[1] - 1.0 / 0.7).abs() < 1e-10);
    }

    #[test]
    fn x3_matches_first_order_taylor() {
        let x3 = VectorField::new(
            "X3",
            t(),
            Expr::rational(1, 2) * (Expr::int(3) * t() + Expr::ln(x())) * x(),
            Expr::rational(-3, 2) * (Expr::int(1) + Expr::int(3) * t() + Expr::ln(x())) * u(),
        );
        let e = 1e-3;
        let z = flow(&x3, e, [1.0, 1.0, 1.0]).unwrap();
        let taylor = [1.0 + e, 1.0 + 1.5 * e, 1.0 - 6.0 * e];
        for i in 0..3 {
            assert!((z[i] - taylor[i]).abs() < 50.0 * e * e, "{i}: {} vs {}", z[i], taylor[i]);
        }
    }

    #[test]
    fn domain_exit_is_reported() {
        let v = VectorField::new("shift", Expr::zero(), Expr::zero(), Expr::int(-1));
        match flow(&v, 2.0, [0.0, 1.0, 1.0]) {
            Err(SymmetryError::DomainExit { at }) => assert!((at - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        // x' = -1/x reaches x = 0 at eps = 1/2, detected within one step
        let v = VectorField::new("shrink", Expr::zero(), Expr::int(-1) * Expr::powi(x(), -1), Expr::zero());
        match flow(&v, 2.0, [0.0, 1.0, 1.0]) {
            Err(SymmetryError::DomainExit { at }) => assert!((0.5..=0.5 + 2.0 / 64.0).contains(&at), "{at}"),
            other => panic!("{other:?}"),
        }
    }
}
