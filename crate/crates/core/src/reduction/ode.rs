//! Numerical work on the reduced ODEs: integration, the implicit case-IV
//! relations, and lifting trajectories back to the PDE.

use serde::{Deserialize, Serialize};

use super::exact::{fd_residual, FdModel};
use super::{ansatz_case, Case, ReductionError};
use crate::expr::{sym, CompiledExpr, Expr};
use crate::model::GkeModel;

/// `phi''` (or `phi'` for a first-order case) as a function of `(y, phi, phi')`.
struct ReducedRhs {
    order: usize,
    rest: CompiledExpr,
}

impl ReducedRhs {
    fn new(case: Case) -> Result<Self, ReductionError> {
        let a = ansatz_case(case);
        let lead = if a.order == 2 { sym::w_yy() } else { sym::w_y() };
        let rest = a.expected_ode.subs(&lead, &Expr::zero());
        let rest = CompiledExpr::new(&rest, &[sym::y(), sym::w(), sym::w_y()])?;
        Ok(ReducedRhs { order: a.order, rest })
    }

    fn deriv(&self, y: f64, s: [f64; 2]) -> [f64; 2] {
        let r = -self.rest.eval_once(&[y, s[0], s[1]]);
        if self.order == 2 {
            [s[1], r]
        } else {
            [r, 0.0]
        }
    }

    fn rk4(&self, y: f64, s: [f64; 2], h: f64) -> [f64; 2] {
        let add = |a: [f64; 2], k: [f64; 2], c: f64| [a[0] + c * k[0], a[1] + c * k[1]];
        let k1 = self.deriv(y, s);
        let k2 = self.deriv(y + h / 2.0, add(s, k1, h / 2.0));
        let k3 = self.deriv(y + h / 2.0, add(s, k2, h / 2.0));
        let k4 = self.deriv(y + h, add(s, k3, h));
        let mut out = s;
        for i in 0..2 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if self.order == 1 {
            out[1] = self.deriv(y + h, out)[0];
        }
        out
    }
}

/// Samples `(y, phi, phi')` of a reduced-ODE solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub case: Case,
    pub y: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("y,phi,dphi\n");
        for i in 0..self.y.len() {
            s.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", self.y[i], self.phi[i], self.dphi[i]));
        }
        s
    }

    pub fn last(&self) -> (f64, f64, f64) {
        let n = self.y.len() - 1;
        (self.y[n], self.phi[n], self.dphi[n])
    }
}

const BLOW_UP: f64 = 1e12;

/// Fixed-step RK4 from `y0` to `y1` (either direction) with initial
/// `(phi, phi')`. For first-order cases `phi'` is ignored.
pub fn integrate_reduced_ode(
    case: Case,
    y0: f64,
    init: [f64; 2],
    y1: f64,
    steps: usize,
) -> Result<Trajectory, ReductionError> {
    if steps == 0 || !(y0.is_finite() && y1.is_finite()) {
        return Err(ReductionError::Config("need finite end points and at least one step".into()));
    }
    let rhs = ReducedRhs::new(case)?;
    let h = (y1 - y0) / steps as f64;
    let mut s = init;
    if rhs.order == 1 {
        s[1] = rhs.deriv(y0, s)[0];
    }
    let mut tr = Trajectory {
        case,
        y: vec![y0],
        phi: vec![s[0]],
        dphi: vec![s[1]],
    };
    for k in 0..steps {
        let y = y0 + k as f64 * h;
        s = rhs.rk4(y, s, h);
        let yn = y0 + (k + 1) as f64 * h;
        if s[0].is_nan() || s[0] <= 0.0 {
            return Err(ReductionError::NonPositive { y: yn, phi: s[0] });
        }
        if !s[0].is_finite() || s[0].abs() > BLOW_UP || !s[1].is_finite() {
            return Err(ReductionError::BlowUp { y: yn, phi: s[0] });
        }
        tr.y.push(yn);
        tr.phi.push(s[0]);
        tr.dphi.push(s[1]);
    }
    Ok(tr)
}

/// Start point, initial data and end point used when none are given.
/// Case II starts on `27 y^-3`, case III on `(1 - y^(-1/3)/2)^-3`.
pub fn default_initial(case: Case) -> (f64, [f64; 2], f64) {
    match case {
        Case::I => (0.5, [2.0, 0.0], 1.5),
        Case::II => (3.0, [1.0, -1.0], 6.0),
        Case::III => (1.0, [8.0, -8.0], 4.0),
        Case::IV => (1.0, [1.0, 0.5], 3.0),
        Case::V => (1.0, [2.0, -0.5], 3.0),
    }
}

/// `phi(y)` by `n` RK4 steps from `y0`. Smooth in `y` since the step is
/// `(y - y0) / n`.
fn phi_at(rhs: &ReducedRhs, y0: f64, init: [f64; 2], y: f64, n: usize) -> f64 {
    let h = (y - y0) / n as f64;
    let mut s = init;
    for k in 0..n {
        s = rhs.rk4(y0 + k as f64 * h, s, h);
    }
    s[0]
}

/// The two implicit solution families of case IV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    One,
    Two,
}

/// `y(phi)` on a branch, with `s = phi^(1/3)`.
pub fn implicit_y(branch: Branch, c: f64, c2: f64, phi: f64) -> f64 {
    let s = phi.cbrt();
    let cs = c * s;
    let inner = match branch {
        Branch::One => 2.0 * (1.0 / cs).atan() + ((cs + 1.0) / (cs - 1.0)).abs().ln(),
        Branch::Two => {
            2.0 * (1.0 / cs + 1.0).atan()
                + 2.0 * (1.0 / cs - 1.0).atan()
                + ((2.0 * cs * cs + 2.0 * cs + 1.0) / (2.0 * cs * cs - 2.0 * cs + 1.0)).ln()
        }
    };
    (0.75 * c * inner + c2).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitReport {
    pub branch: Branch,
    pub c: f64,
    pub c2: f64,
    pub phi_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Maximal monotone pieces of `y(phi)` on the sampled range.
    pub monotone_pieces: usize,
    pub points: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Invert `y(phi)` by bisection on its monotone pieces, difference the
/// inverse with step `h` and evaluate the case-IV ODE
/// `phi'' + (1/y)((4/3) phi^(1/3) + 1) phi'`.
pub fn implicit_relation_check(
    branch: Branch,
    c: f64,
    c2: f64,
    phi_range: (f64, f64),
    h: f64,
    tol: f64,
) -> Result<ImplicitReport, ReductionError> {
    let (lo, hi) = phi_range;
    if !(hi > lo) || !(h > 0.0) {
        return Err(ReductionError::Inversion(format!("empty phi window [{lo}, {hi}] or step {h}")));
    }
    const GRID: usize = 400;
    let phis: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let ys: Vec<f64> = phis.iter().map(|&p| implicit_y(branch, c, c2, p)).collect();
    if let Some(i) = ys.iter().position(|v| !v.is_finite()) {
        return Err(ReductionError::Inversion(format!("y undefined at phi = {}", phis[i])));
    }
    let mut pieces: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..GRID {
        let a = ys[i] - ys[i - 1];
        let b = ys[i + 1] - ys[i];
        if a * b < 0.0 {
            pieces.push((start, i));
            start = i;
        }
    }
    pieces.push((start, GRID));
    if pieces.iter().all(|&(a, b)| ys[a] == ys[b]) {
        return Err(ReductionError::Inversion("y is constant on the window".into()));
    }
    let invert = |a: usize, b: usize, target: f64| -> f64 {
        let (mut pl, mut pr) = (phis[a], phis[b]);
        let inc = ys[b] > ys[a];
        for _ in 0..200 {
            let m = 0.5 * (pl + pr);
            if m <= pl || m >= pr {
                break;
            }
            let ym = implicit_y(branch, c, c2, m);
            if (ym < target) == inc {
                pl = m;
            } else {
                pr = m;
            }
        }
        0.5 * (pl + pr)
    };
    let mut max_residual: f64 = 0.0;
    let mut points = 0;
    for &(a, b) in &pieces {
        let (ylo, yhi) = if ys[a] < ys[b] { (ys[a], ys[b]) } else { (ys[b], ys[a]) };
        if yhi - ylo <= 4.0 * h {
            continue;
        }
        for k in 1..=40 {
            let y = ylo + 2.0 * h + (yhi - ylo - 4.0 * h) * k as f64 / 41.0;
            let pm = invert(a, b, y - h);
            let p0 = invert(a, b, y);
            let pp = invert(a, b, y + h);
            let d1 = (pp - pm) / (2.0 * h);
            let d2 = (pp - 2.0 * p0 + pm) / (h * h);
            let r = (d2 + ((4.0 / 3.0) * p0.cbrt() + 1.0) * d1 / y).abs();
            max_residual = max_residual.max(r);
            points += 1;
        }
    }
    let (ymin, ymax) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(ImplicitReport {
        branch,
        c,
        c2,
        phi_range,
        y_range: (ymin, ymax),
        monotone_pieces: pieces.len(),
        points,
        max_residual,
        tol,
        pass: points > 0 && max_residual <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub case: Case,
    pub h: f64,
    pub residual_h: f64,
    pub residual_h2: f64,
    /// `log2(residual_h / residual_h2)`.
    pub order: f64,
    pub pass: bool,
}

/// Residuals at or below this are treated as exact.
const LIFT_FLOOR: f64 = 1e-9;

struct LiftSetup {
    y0: f64,
    init: [f64; 2],
    /// `(y, t)` pairs; `x` follows from the invariant.
    grid: Vec<(f64, f64)>,
}

fn lift_setup(case: Case) -> LiftSetup {
    let tw = |ys: &[f64], ts: &[f64]| ys.iter().flat_map(|&y| ts.iter().map(move |&t| (y, t))).collect();
    match case {
        Case::I => LiftSetup {
            y0: 0.5,
            init: [2.0, 0.0],
            grid: vec![(0.6, 0.8), (0.8, 1.2), (1.0, 0.9)],
        },
        Case::II => LiftSetup {
            y0: 3.0,
            init: [1.0, -0.5],
            grid: tw(&[3.2, 3.5, 3.8], &[0.5, 0.8]),
        },
        Case::III => LiftSetup {
            y0: 1.0,
            init: [8.0, -7.0],
            grid: tw(&[1.3, 1.6, 2.0], &[0.2, 0.4]),
        },
        Case::IV => LiftSetup {
            y0: 1.0,
            init: [1.0, 0.5],
            grid: tw(&[1.3, 1.6, 2.0], &[0.2, 0.4]),
        },
        Case::V => LiftSetup {
            y0: 1.0,
            init: [2.0, -0.5],
            grid: tw(&[1.3, 1.6, 2.0], &[0.2, 0.4]),
        },
    }
}

/// Lift a numerical ODE trajectory to `u = shape * phi(y(t, x))` and
/// measure its centred-difference PDE residual at steps `h` and `h/2`.
/// Passes when that residual is at the exact floor, or shrinks at
/// second order and stays below `tol`.
pub fn lift_consistency(case: Case, h: f64, tol: f64) -> Result<LiftReport, ReductionError> {
    let a = ansatz_case(case);
    let rhs = ReducedRhs::new(case)?;
    let setup = lift_setup(case);
    let cy = CompiledExpr::new(&a.y, &[sym::t(), sym::x()])?;
    let cs = CompiledExpr::new(&a.shape, &[sym::t(), sym::x()])?;
    let fm = FdModel::new(&GkeModel::four_thirds())?;
    let mut init = setup.init;
    if rhs.order == 1 {
        init[1] = 0.0;
    }
    let u = |t: f64, x: f64| {
        let y = cy.eval_once(&[t, x]);
        cs.eval_once(&[t, x]) * phi_at(&rhs, setup.y0, init, y, 2000)
    };
    let points: Vec<(f64, f64)> = setup
        .grid
        .iter()
        .map(|&(y, t)| {
            let x = match case {
                Case::I => 1.0 + 0.1 * y,
                Case::II => (y * t.sqrt() + 3.0 * t).exp(),
                Case::III => y * (2.0 * t).exp(),
                Case::IV => y * (3.0 * t).exp(),
                Case::V => y * (4.0 * t).exp(),
            };
            let t = if case == Case::I { y } else { t };
            (t, x)
        })
        .collect();
    let measure = |hh: f64| points.iter().map(|&(t, x)| fd_residual(&u, &fm, t, x, hh)).fold(0.0, f64::max);
    let r1 = measure(h);
    let r2 = measure(h / 2.0);
    if !(r1.is_finite() && r2.is_finite()) {
        return Err(ReductionError::NonPositive { y: f64::NAN, phi: f64::NAN });
    }
    let order = (r1 / r2).log2();
    let pass = r1 <= LIFT_FLOOR || (r1 <= tol && order >= 1.5);
    Ok(LiftReport {
        case,
        h,
        residual_h: r1,
        residual_h2: r2,
        order,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_two_tracks_the_closed_form() {
        let tr = integrate_reduced_ode(Case::II, 3.0, [1.0, -1.0], 6.0, 3000).unwrap();
        for (y, p) in tr.y.iter().zip(&tr.phi) {
            assert!((p - 27.0 / y.powi(3)).abs() < 1e-6, "y={y}");
        }
    }

    #[test]
    fn case_three_tracks_the_closed_form() {
        let c = 0.5;
        let exact = |y: f64| (1.0 - c * y.powf(-1.0 / 3.0)).powi(-3);
        let tr = integrate_reduced_ode(Case::III, 1.0, [8.0, -8.0], 4.0, 3000).unwrap();
        let (y, p, _) = tr.last();
        assert!((p - exact(y)).abs() < 1e-6 * exact(y));
    }

    #[test]
    fn case_one_is_constant() {
        let tr = integrate_reduced_ode(Case::I, 0.0, [3.0, 7.0], 1.0, 10).unwrap();
        assert!(tr.phi.iter().all(|&p| p == 3.0));
        assert!(tr.to_csv().starts_with("y,phi,dphi\n"));
    }

    #[test]
    fn negative_phi_is_reported() {
        let e = integrate_reduced_ode(Case::IV, 1.0, [0.1, -5.0], 3.0, 1000).unwrap_err();
        assert!(matches!(e, ReductionError::NonPositive { .. }));
    }

    #[test]
    fn implicit_branches_are_decreasing_and_satisfy_the_ode() {
        for b in [Branch::One, Branch::Two] {
            let r = implicit_relation_check(b, 2.0, 0.0, (1.0, 8.0), 1e-3, 1e-4).unwrap();
            assert_eq!(r.monotone_pieces, 1);
            assert!(r.pass, "{b:?}: {}", r.max_residual);
        }
        let y1 = implicit_y(Branch::One, 2.0, 0.0, 1.0);
        assert!(y1 > implicit_y(Branch::One, 2.0, 0.0, 8.0));
    }

    #[test]
    fn implicit_check_rejects_empty_window() {
        assert!(matches!(
            implicit_relation_check(Branch::One, 2.0, 0.0, (3.0, 3.0), 1e-3, 1e-4),
            Err(ReductionError::Inversion(_))
        ));
    }

    #[test]
    fn lifted_trajectories_solve_the_pde() {
        for case in Case::ALL {
            let r = lift_consistency(case, 1e-2, 1e-3).unwrap();
            assert!(r.pass, "{case}: {r:?}");
        }
    }
}
