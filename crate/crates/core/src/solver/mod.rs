//! Finite-difference solver in `y = ln x`:
//!
//! ```text
//! u_t = u_yy + (3 + e^y f_u(u)) u_y + 4 e^y f(u)
//! ```
//!
//! Diffusion is Crank–Nicolson; advection (second-order upwind) and
//! reaction are explicit inside a Heun predictor-corrector.

mod study;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{sym, CompiledExpr, Expr, ExprError};
use crate::model::GkeModel;

pub use study::{
    convergence_study, heat_kernel_expr, heat_kernel_reference, solution_b_reference, ConvergenceReport, HeatKernel,
    RunRecord,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid grid: {0}")]
    Config(String),
    #[error("dt = {dt:e} exceeds the stability bound {dt_max:e} at t = {t}")]
    Stability { dt: f64, dt_max: f64, t: f64 },
    #[error("positivity lost at node {index} (y = {y}), t = {t}: u = {value:e}")]
    Positivity { index: usize, y: f64, t: f64, value: f64 },
    #[error("tridiagonal solve failed at row {row}")]
    Tridiagonal { row: usize },
    #[error("{0}")]
    Study(String),
}

/// Equation coefficients over `(y, u)` after `x = e^y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCoefficients {
    pub diffusion: Expr,
    pub advection: Expr,
    pub reaction: Expr,
}

pub fn transform_to_log(m: &GkeModel) -> LogCoefficients {
    let ey = Expr::exp(sym::y().into());
    LogCoefficients {
        diffusion: Expr::one(),
        advection: Expr::int(3) + &ey * &m.f_u,
        reaction: Expr::int(4) * &ey * &m.f,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Boundary values read from the reference at each new time level.
    Dirichlet,
    /// Quadratic extrapolation from the interior.
    Extrapolate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverGrid {
    pub y_min: f64,
    pub y_max: f64,
    /// Interior nodes; the grid has `n + 2` nodes including both ends.
    pub n: usize,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub boundary: Boundary,
}

impl SolverGrid {
    pub fn new(y_min: f64, y_max: f64, n: usize, dt: f64, t0: f64, t1: f64) -> Result<Self, SolverError> {
        let g = SolverGrid {
            y_min,
            y_max,
            n,
            dt,
            t0,
            t1,
            boundary: Boundary::Dirichlet,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.y_min < self.y_max) {
            return Err(SolverError::Config(format!("y_min {} >= y_max {}", self.y_min, self.y_max)));
        }
        if self.n < 8 {
            return Err(SolverError::Config(format!("n = {} < 8", self.n)));
        }
        if !(self.dt > 0.0) {
            return Err(SolverError::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t0 < self.t1) {
            return Err(SolverError::Config(format!("t0 {} >= t1 {}", self.t0, self.t1)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.y_max - self.y_min) / (self.n + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.n + 2).map(|i| self.y_min + i as f64 * h).collect()
    }

    /// Step count and the uniform step actually taken, `<= dt`.
    pub fn steps(&self) -> (usize, f64) {
        let span = self.t1 - self.t0;
        let k = (span / self.dt - 1e-9).ceil().max(1.0) as usize;
        (k, span / k as f64)
    }
}

/// Node values at one time level, boundary nodes included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub t: f64,
    pub u: Vec<f64>,
}

impl Field {
    pub fn sample(grid: &SolverGrid, t: f64, f: &dyn Fn(f64, f64) -> f64) -> Field {
        Field {
            t,
            u: grid.nodes().into_iter().map(|y| f(t, y)).collect(),
        }
    }

    pub fn to_csv(&self, grid: &SolverGrid) -> String {
        let mut s = String::from("t,y,u\n");
        for (y, u) in grid.nodes().iter().zip(&self.u) {
            s.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", self.t, y, u));
        }
        s
    }

    /// Max-norm difference on interior nodes, absolute and relative to `|reference|`.
    pub fn error_against(&self, grid: &SolverGrid, reference: &dyn Fn(f64, f64) -> f64) -> (f64, f64) {
        let mut abs: f64 = 0.0;
        let mut rel: f64 = 0.0;
        for (i, y) in grid.nodes().into_iter().enumerate().skip(1).take(grid.n) {
            let r = reference(self.t, y);
            let e = (self.u[i] - r).abs();
            abs = abs.max(e);
            rel = rel.max(e / r.abs().max(f64::MIN_POSITIVE));
        }
        (abs, rel)
    }
}

/// Solve `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i`.
pub fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>, SolverError> {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut denom = b[0];
    for i in 0..n {
        if i > 0 {
            denom = b[i] - a[i] * cp[i - 1];
        }
        if !(denom.abs() > 1e-300) || !denom.is_finite() {
            return Err(SolverError::Tridiagonal { row: i });
        }
        cp[i] = if i + 1 < n { c[i] / denom } else { 0.0 };
        dp[i] = (d[i] - if i > 0 { a[i] * dp[i - 1] } else { 0.0 }) / denom;
    }
    let mut x = dp;
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// A model compiled for a grid.
pub struct Solver {
    pub grid: SolverGrid,
    advection: CompiledExpr,
    reaction: CompiledExpr,
    f_u: CompiledExpr,
    nodes: Vec<f64>,
    /// Abort on nonpositive values.
    pub monitor_positivity: bool,
}

impl Solver {
    pub fn new(grid: SolverGrid, m: &GkeModel) -> Result<Self, SolverError> {
        grid.validate()?;
        let c = transform_to_log(m);
        let vars = [sym::y(), sym::u()];
        Ok(Solver {
            nodes: grid.nodes(),
            advection: CompiledExpr::new(&c.advection, &vars)?,
            reaction: CompiledExpr::new(&c.reaction, &vars)?,
            f_u: CompiledExpr::new(&m.f_u, &[sym::u()])?,
            grid,
            monitor_positivity: true,
        })
    }

    /// `1 / max_i (|3 + e^y f_u| / h + 4 e^y |f_u|)` for the current field.
    pub fn dt_max(&self, field: &Field) -> f64 {
        let h = self.grid.h();
        let mut rate: f64 = 0.0;
        let mut buf = Vec::new();
        for (y, u) in self.nodes.iter().zip(&field.u) {
            let a = self.advection.eval(&[*y, *u], &mut buf);
            let fu = self.f_u.eval(&[*u], &mut buf);
            rate = rate.max(a.abs() / h + 4.0 * y.exp() * fu.abs());
        }
        if rate > 0.0 {
            1.0 / rate
        } else {
            f64::INFINITY
        }
    }

    /// Explicit part `a u_y + r` on interior nodes (index `i - 1`).
    fn explicit(&self, u: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let h = self.grid.h();
        let mut buf = Vec::new();
        (1..=n)
            .map(|i| {
                let y = self.nodes[i];
                let a = self.advection.eval(&[y, u[i]], &mut buf);
                let uy = if a > 0.0 && i + 2 <= n + 1 {
                    (-3.0 * u[i] + 4.0 * u[i + 1] - u[i + 2]) / (2.0 * h)
                } else if a < 0.0 && i >= 2 {
                    (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) / (2.0 * h)
                } else {
                    (u[i + 1] - u[i - 1]) / (2.0 * h)
                };
                a * uy + self.reaction.eval(&[y, u[i]], &mut buf)
            })
            .collect()
    }

    /// Interior update `(I - dt/2 L) v = (I + dt/2 L) u + dt * e` with the
    /// new boundary values `bc`.
    fn implicit(&self, u: &[f64], e: &[f64], dt: f64, bc: (f64, f64)) -> Result<Vec<f64>, SolverError> {
        let n = self.grid.n;
        let h = self.grid.h();
        let r = dt / (2.0 * h * h);
        let mut d: Vec<f64> = (1..=n)
            .map(|i| u[i] + r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + dt * e[i - 1])
            .collect();
        d[0] += r * bc.0;
        d[n - 1] += r * bc.1;
        let a = vec![-r; n];
        let b = vec![1.0 + 2.0 * r; n];
        let c = vec![-r; n];
        thomas(&a, &b, &c, &d)
    }

    fn assemble(&self, interior: Vec<f64>, bc: (f64, f64)) -> Vec<f64> {
        let mut v = Vec::with_capacity(interior.len() + 2);
        v.push(bc.0);
        v.extend(interior);
        v.push(bc.1);
        v
    }

    fn extrapolated(u: &[f64]) -> (f64, f64) {
        let n = u.len();
        (3.0 * u[1] - 3.0 * u[2] + u[3], 3.0 * u[n - 2] - 3.0 * u[n - 3] + u[n - 4])
    }

    /// One step of size `dt`; `bc` gives the boundary values at `t + dt`
    /// (ignored under extrapolation).
    pub fn step(&self, field: &Field, dt: f64, bc: (f64, f64)) -> Result<Field, SolverError> {
        let dt_max = self.dt_max(field);
        if dt > dt_max {
            return Err(SolverError::Stability { dt, dt_max, t: field.t });
        }
        let extrap = self.grid.boundary == Boundary::Extrapolate;
        let e0 = self.explicit(&field.u);
        let pred_bc = if extrap { Self::extrapolated(&field.u) } else { bc };
        let star = self.assemble(self.implicit(&field.u, &e0, dt, pred_bc)?, pred_bc);
        let e1 = self.explicit(&star);
        let avg: Vec<f64> = e0.iter().zip(&e1).map(|(a, b)| 0.5 * (a + b)).collect();
        let bc = if extrap { Self::extrapolated(&star) } else { bc };
        let u = self.assemble(self.implicit(&field.u, &avg, dt, bc)?, bc);
        let t = field.t + dt;
        if self.monitor_positivity {
            if let Some((index, &value)) = u.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(SolverError::Positivity {
                    index,
                    y: self.nodes[index],
                    t,
                    value,
                });
            }
        }
        Ok(Field { t, u })
    }

    /// March `initial` from `t0` to `t1`, boundaries from `reference`.
    pub fn solve(&self, initial: &Field, reference: &dyn Fn(f64, f64) -> f64) -> Result<Field, SolverError> {
        let (k, dt) = self.grid.steps();
        let (yl, yr) = (self.nodes[0], self.nodes[self.grid.n + 1]);
        let mut f = initial.clone();
        for j in 0..k {
            let t = self.grid.t0 + (j + 1) as f64 * dt;
            f = self.step(&f, dt, (reference(t, yl), reference(t, yr)))?;
            f.t = t;
        }
        Ok(f)
    }
}

/// Sample `reference` at `t0`, solve to `t1`, and return the final field.
pub fn solve(grid: &SolverGrid, m: &GkeModel, reference: &dyn Fn(f64, f64) -> f64) -> Result<Field, SolverError> {
    let s = Solver::new(grid.clone(), m)?;
    let init = Field::sample(grid, grid.t0, reference);
    s.solve(&init, reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_identically_zero, q, SampleConfig};

    fn same(a: &Expr, b: &Expr) -> bool {
        is_identically_zero(&(a - b), &SampleConfig::default()).unwrap().zero
    }

    #[test]
    fn log_coefficients() {
        let y: Expr = sym::y().into();
        let u: Expr = sym::u().into();
        let c = transform_to_log(&GkeModel::zero());
        assert_eq!(c.advection, Expr::int(3));
        assert!(c.reaction.is_zero());
        let c = transform_to_log(&GkeModel::linear());
        assert!(same(&c.advection, &(Expr::int(3) + Expr::exp(y.clone()))));
        assert!(same(&c.reaction, &(Expr::int(4) * Expr::exp(y.clone()) * &u)));
        let c = transform_to_log(&GkeModel::four_thirds());
        let adv = Expr::int(3) + Expr::rational(4, 3) * Expr::exp(y.clone()) * Expr::pow(u.clone(), q(1, 3));
        assert!(same(&c.advection, &adv));
        assert!(same(&c.reaction, &(Expr::int(4) * Expr::exp(y) * Expr::pow(u, q(4, 3)))));
    }

    #[test]
    fn grid_validation() {
        assert!(SolverGrid::new(0.0, 1.0, 7, 1e-3, 0.0, 1.0).is_err());
        assert!(SolverGrid::new(1.0, 0.0, 16, 1e-3, 0.0, 1.0).is_err());
        assert!(SolverGrid::new(0.0, 1.0, 16, 0.0, 0.0, 1.0).is_err());
        assert!(SolverGrid::new(0.0, 1.0, 16, 1e-3, 1.0, 1.0).is_err());
        let g = SolverGrid::new(0.0, 1.0, 9, 0.3, 0.0, 1.0).unwrap();
        assert_eq!(g.nodes().len(), 11);
        assert_eq!(g.steps().0, 4);
    }

    #[test]
    fn thomas_solves_and_reports_rows() {
        let x = thomas(&[0.0, 1.0, 1.0], &[2.0, 2.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 4.0, 3.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert_eq!(thomas(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]), Err(SolverError::Tridiagonal { row: 1 }));
    }

    #[test]
    fn constants_are_equilibria_of_the_linear_case() {
        let g = SolverGrid::new(-1.0, 1.0, 32, 1e-3, 0.0, 0.1).unwrap();
        let out = solve(&g, &GkeModel::zero(), &|_, _| 2.5).unwrap();
        assert!(out.u.iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn stability_violation_is_an_error() {
        let g = SolverGrid::new(-1.0, 1.0, 64, 0.5, 0.0, 1.0).unwrap();
        let e = solve(&g, &GkeModel::zero(), &|_, _| 1.0).unwrap_err();
        assert!(matches!(e, SolverError::Stability { .. }));
    }

    #[test]
    fn stationary_power_profile() {
        // c x^-3 = c e^(-3y) with f = u^(4/3)
        let g = SolverGrid::new(0.0, 2.0, 256, 1e-4, 0.0, 0.05).unwrap();
        let r = |_: f64, y: f64| 2.0 * (-3.0 * y).exp();
        let out = solve(&g, &GkeModel::four_thirds(), &r).unwrap();
        let (_, rel) = out.error_against(&g, &r);
        assert!(rel < 5e-4, "{rel}");
    }

    #[test]
    fn positivity_is_monitored() {
        let g = SolverGrid::new(-1.0, 1.0, 16, 1e-3, 0.0, 0.01).unwrap();
        let e = solve(&g, &GkeModel::zero(), &|_, y| if y.abs() < 0.5 { 1.0 } else { -1.0 }).unwrap_err();
        assert!(matches!(e, SolverError::Positivity { .. }));
    }

    #[test]
    fn csv_columns() {
        let g = SolverGrid::new(0.0, 1.0, 8, 0.1, 0.0, 1.0).unwrap();
        let f = Field::sample(&g, 0.0, &|_, y| y + 1.0);
        let csv = f.to_csv(&g);
        assert!(csv.starts_with("t,y,u\n"));
        assert_eq!(csv.lines().count(), 11);
    }
}
