//! Closed-form invariant solutions of the `u^(4/3)` equation.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Case, ReductionError};
use crate::expr::{is_identically_zero, q, sym, CompiledExpr, Expr, SampleConfig, Symbol, Witness};
use crate::model::{residual, GkeModel};

/// Where sample points are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolutionDomain {
    /// `t, x` from the configured ranges.
    Box,
    /// `x = exp(3t + s)` with `s` in `[lo, hi]`, keeping `ln x - 3t` away from zero.
    LogShift { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub id: String,
    pub case: Case,
    pub u: Expr,
    /// Free constants and their sampling ranges.
    pub params: Vec<(String, (f64, f64))>,
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub domain: SolutionDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Numeric,
}

fn t() -> Expr {
    sym::t().into()
}
fn x() -> Expr {
    sym::x().into()
}
fn c() -> Expr {
    Symbol::parameter("c").into()
}

/// Solutions (a)–(d).
pub fn exact_solutions() -> Vec<ExactSolution> {
    let x3 = Expr::powi(x(), 3);
    let sol = |id: &str, case, u, params: Vec<(&str, (f64, f64))>, domain| ExactSolution {
        id: id.to_string(),
        case,
        u,
        params: params.into_iter().map(|(n, r)| (n.to_string(), r)).collect(),
        t_range: (0.5, 2.0),
        x_range: (0.5, 2.0),
        domain,
    };
    let b = Expr::int(27) * Expr::powi(&x3 * Expr::powi(Expr::ln(x()) - Expr::int(3) * t(), 3), -1);
    let cc = Expr::powi(
        &x3 * Expr::powi(
            Expr::one() - c() * Expr::pow(Expr::powi(x(), -1) * Expr::exp(Expr::int(2) * t()), q(1, 3)),
            3,
        ),
        -1,
    );
    let d = Expr::powi(
        &x3 * Expr::powi(c() * Expr::pow(x() * Expr::exp(Expr::int(-4) * t()), q(1, 3)) - 1, 3),
        -1,
    );
    let mut out = vec![
        sol("a", Case::I, c() * Expr::powi(x(), -3), vec![("c", (0.1, 2.0))], SolutionDomain::Box),
        sol("b", Case::II, b, vec![], SolutionDomain::LogShift { lo: 1.0, hi: 3.0 }),
        sol("c", Case::III, cc, vec![("c", (-2.0, 0.1))], SolutionDomain::Box),
        sol("d", Case::V, d, vec![("c", (20.0, 40.0))], SolutionDomain::Box),
    ];
    out[1].t_range = (0.0, 1.0);
    out
}

impl ExactSolution {
    pub fn find(id: &str) -> Option<ExactSolution> {
        exact_solutions().into_iter().find(|s| s.id.eq_ignore_ascii_case(id))
    }

    /// A perturbed copy, `u (1 + t/10)`, that is no longer a solution.
    pub fn corrupted(&self) -> ExactSolution {
        let mut s = self.clone();
        s.id = format!("{}*", self.id);
        s.u = &self.u * (Expr::one() + t() / 10);
        s
    }

    /// `cfg` with this solution's sampling ranges.
    pub fn sample_config(&self, cfg: &SampleConfig) -> SampleConfig {
        let mut c = cfg.clone().with_range("t", self.t_range.0, self.t_range.1);
        c = c.with_range("x", self.x_range.0, self.x_range.1);
        for (n, (lo, hi)) in &self.params {
            c = c.with_range(n, *lo, *hi);
        }
        if let SolutionDomain::LogShift { lo, hi } = self.domain {
            c = c.with_range("s", lo, hi);
        }
        c
    }

    /// Rewrite `e` so that sampling stays in the solution's domain.
    pub fn restrict(&self, e: &Expr) -> Expr {
        match self.domain {
            SolutionDomain::Box => e.clone(),
            SolutionDomain::LogShift { .. } => {
                let s: Expr = Symbol::parameter("s").into();
                e.subs(&sym::x(), &Expr::exp(Expr::int(3) * t() + s))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub id: String,
    pub mode: Mode,
    pub pass: bool,
    pub max_residual: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Relative tolerance of the finite-difference check.
pub const NUMERIC_TOL: f64 = 1e-6;

/// Sample points of the finite-difference check.
pub const NUMERIC_SAMPLES: usize = 200;

/// Check that a solution satisfies the `u^(4/3)` equation, either by an
/// identity test of its symbolic residual or by centred differences of
/// the compiled closed form.
pub fn verify_exact(s: &ExactSolution, mode: Mode, cfg: &SampleConfig) -> Result<ExactReport, ReductionError> {
    let m = GkeModel::four_thirds();
    let local = s.sample_config(cfg);
    match mode {
        Mode::Symbolic => {
            let r = s.restrict(&residual(&m, &s.u)?);
            let z = is_identically_zero(&r, &local)?;
            Ok(ExactReport {
                id: s.id.clone(),
                mode,
                pass: z.zero,
                max_residual: z.max_residual,
                samples: z.samples,
                witness: z.witness,
            })
        }
        Mode::Numeric => numeric(s, &m, &local),
    }
}

/// `f` and `f_u` compiled over `u`.
pub(crate) struct FdModel {
    f: CompiledExpr,
    f_u: CompiledExpr,
}

impl FdModel {
    pub(crate) fn new(m: &GkeModel) -> Result<Self, crate::expr::ExprError> {
        Ok(FdModel {
            f: CompiledExpr::new(&m.f, &[sym::u()])?,
            f_u: CompiledExpr::new(&m.f_u, &[sym::u()])?,
        })
    }
}

/// `(u_t - RHS) / (|u_t| + sum |RHS terms|)` by centred differences.
pub(crate) fn fd_residual(u: &dyn Fn(f64, f64) -> f64, f: &FdModel, t: f64, x: f64, h: f64) -> f64 {
    let hx = h * x;
    let ht = h * t.abs().max(0.1);
    let u0 = u(t, x);
    let ut = (u(t + ht, x) - u(t - ht, x)) / (2.0 * ht);
    let ux = (u(t, x + hx) - u(t, x - hx)) / (2.0 * hx);
    let uxx = (u(t, x + hx) - 2.0 * u0 + u(t, x - hx)) / (hx * hx);
    let (fv, fuv) = (f.f.eval_once(&[u0]), f.f_u.eval_once(&[u0]));
    let terms = [x * x * uxx, x * (x * fuv + 4.0) * ux, 4.0 * x * fv];
    let rhs: f64 = terms.iter().sum();
    let scale = ut.abs() + terms.iter().map(|v| v.abs()).sum::<f64>();
    (ut - rhs).abs() / scale.max(f64::MIN_POSITIVE)
}

fn numeric(s: &ExactSolution, m: &GkeModel, cfg: &SampleConfig) -> Result<ExactReport, ReductionError> {
    let mut vars = vec![sym::t(), sym::x()];
    vars.extend(s.params.iter().map(|(n, _)| Symbol::parameter(n)));
    let cu = CompiledExpr::new(&s.u, &vars)?;
    let fm = FdModel::new(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_residual: f64 = 0.0;
    let mut witness = None;
    let mut accepted = 0;
    let mut attempts = 0;
    let draw = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..hi) } else { lo };
    while accepted < NUMERIC_SAMPLES {
        attempts += 1;
        if attempts > 100 * NUMERIC_SAMPLES {
            return Err(crate::expr::ExprError::PersistentDomain {
                attempts,
                last: format!("solution ({}) has no valid sample points", s.id),
            }
            .into());
        }
        let t = draw(&mut rng, cfg.range_for(&sym::t()));
        let x = match s.domain {
            SolutionDomain::Box => draw(&mut rng, cfg.range_for(&sym::x())),
            SolutionDomain::LogShift { lo, hi } => (3.0 * t + draw(&mut rng, (lo, hi))).exp(),
        };
        let ps: Vec<f64> = s.params.iter().map(|(_, r)| draw(&mut rng, *r)).collect();
        let u = |tt: f64, xx: f64| {
            let mut v = vec![tt, xx];
            v.extend_from_slice(&ps);
            cu.eval_once(&v)
        };
        let r = fd_residual(&u, &fm, t, x, 1e-4);
        if !r.is_finite() {
            continue;
        }
        accepted += 1;
        if r > max_residual {
            max_residual = r;
        }
        if r > NUMERIC_TOL && witness.is_none() {
            let mut point = BTreeMap::new();
            point.insert("t".to_string(), t);
            point.insert("x".to_string(), x);
            for ((n, _), v) in s.params.iter().zip(&ps) {
                point.insert(n.clone(), *v);
            }
            witness = Some(Witness {
                point,
                value: r,
                scale: 1.0,
            });
        }
    }
    Ok(ExactReport {
        id: s.id.clone(),
        mode: Mode::Numeric,
        pass: witness.is_none(),
        max_residual,
        samples: accepted,
        witness,
    })
}
