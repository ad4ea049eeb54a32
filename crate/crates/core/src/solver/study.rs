//! Reference solutions and refinement studies.

use serde::{Deserialize, Serialize};

use super::{solve, SolverError, SolverGrid};
use crate::expr::{sym, Expr};
use crate::model::GkeModel;

/// Shifted Gaussian solving the `f = 0` equation in `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatKernel {
    pub mu: f64,
    pub t_off: f64,
}

impl Default for HeatKernel {
    fn default() -> Self {
        HeatKernel { mu: 0.0, t_off: 0.4 }
    }
}

impl HeatKernel {
    pub fn eval(&self, t: f64, y: f64) -> f64 {
        heat_kernel_reference(t, y, self.mu, self.t_off)
    }
}

/// `(4π(t + t_off))^(-1/2) exp(-(y + 3t - μ)² / (4(t + t_off)))`.
pub fn heat_kernel_reference(t: f64, y: f64, mu: f64, t_off: f64) -> f64 {
    let s = t + t_off;
    let z = y + 3.0 * t - mu;
    (4.0 * std::f64::consts::PI * s).sqrt().recip() * (-z * z / (4.0 * s)).exp()
}

/// The kernel as an expression in `t, y` up to the constant `(4π)^(-1/2)`.
pub fn heat_kernel_expr(mu: crate::expr::Q, t_off: crate::expr::Q) -> Expr {
    let t: Expr = sym::t().into();
    let y: Expr = sym::y().into();
    let s = &t + Expr::constant(t_off);
    let z = y + Expr::int(3) * t - Expr::constant(mu);
    Expr::pow(s.clone(), crate::expr::q(-1, 2)) * Expr::exp(-(Expr::powi(z, 2) * Expr::powi(Expr::int(4) * s, -1)))
}

/// Solution (b) in `y = ln x`: `27 e^(-3y) / (y - 3t)³`.
pub fn solution_b_reference(t: f64, y: f64) -> f64 {
    27.0 * (-3.0 * y).exp() / (y - 3.0 * t).powi(3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub abs_error: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub model: String,
    pub runs: Vec<RunRecord>,
    /// `ln(e_k / e_{k+1}) / ln(h_k / h_{k+1})`.
    pub orders: Vec<f64>,
    pub band: (f64, f64),
    /// Errors decrease under every refinement.
    pub monotone: bool,
    pub pass: bool,
}

pub const ORDER_BAND: (f64, f64) = (1.7, 2.3);

/// Solve on each `n` of `ns` (successive entries doubling) with
/// `dt = dt_coeff * h²`, grids solved concurrently.
pub fn convergence_study(
    m: &GkeModel,
    reference: &(dyn Fn(f64, f64) -> f64 + Sync),
    template: &SolverGrid,
    ns: &[usize],
    dt_coeff: f64,
) -> Result<ConvergenceReport, SolverError> {
    if ns.len() < 3 {
        return Err(SolverError::Study(format!("need at least 3 grids, got {}", ns.len())));
    }
    if let Some(w) = ns.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(SolverError::Study(format!("refinement {} -> {} is not a factor of 2", w[0], w[1])));
    }
    if !(dt_coeff > 0.0) {
        return Err(SolverError::Study(format!("dt coefficient {dt_coeff} must be positive")));
    }
    let grids: Vec<SolverGrid> = ns
        .iter()
        .map(|&n| {
            let mut g = template.clone();
            g.n = n;
            g.dt = dt_coeff * g.h() * g.h();
            g.validate().map(|_| g)
        })
        .collect::<Result<_, _>>()?;
    let results: Vec<Result<RunRecord, SolverError>> = std::thread::scope(|s| {
        let handles: Vec<_> = grids
            .iter()
            .map(|g| {
                s.spawn(move || {
                    let out = solve(g, m, reference)?;
                    let (abs_error, rel_error) = out.error_against(g, reference);
                    let (steps, dt) = g.steps();
                    Ok(RunRecord {
                        n: g.n,
                        h: g.h(),
                        dt,
                        steps,
                        abs_error,
                        rel_error,
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    let runs: Vec<RunRecord> = results.into_iter().collect::<Result<_, _>>()?;
    let orders: Vec<f64> = runs
        .windows(2)
        .map(|w| (w[0].abs_error / w[1].abs_error).ln() / (w[0].h / w[1].h).ln())
        .collect();
    let monotone = runs.windows(2).all(|w| w[1].abs_error < w[0].abs_error);
    let pass = monotone && orders.iter().all(|o| *o >= ORDER_BAND.0 && *o <= ORDER_BAND.1);
    Ok(ConvergenceReport {
        model: m.label.clone(),
        runs,
        orders,
        band: ORDER_BAND,
        monotone,
        pass,
    })
}
