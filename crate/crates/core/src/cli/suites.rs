use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{CaseResult, CliError, Command, Fault, ModeArg, Problem, Report, RunConfig};
use crate::expr::{is_identically_zero, q, sym, Expr, SampleConfig, Symbol, Q};
use crate::model::{catalog, residual, shift_map_f1_to_f0, EquivTransform, GkeModel};
use crate::reduction::{
    ansatz_case, basis, basis_table, check_invariants, default_initial, exact_solutions, implicit_relation_check,
    integrate_reduced_ode, lift_consistency, optimal_system, reduce, subalgebra_closure, verify_exact, Branch, Case,
    ExactSolution, Mode, ReductionDoc,
};
use crate::solver::{
    convergence_study, solution_b_reference, solve, ConvergenceReport, HeatKernel, RunRecord, SolverGrid,
};
use crate::symmetry::{jacobi_residual, verify_structure_constants, verify_symmetry, BracketTable, VectorField};

/// Run the suite selected by `cmd`.
pub fn run_suite(cmd: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    let fault_ok = matches!(
        (cfg.inject_fault, cmd),
        (None, _)
            | (Some(Fault::Row3Gen2), Command::VerifyTable)
            | (Some(Fault::CorruptBrackets), Command::Brackets)
            | (Some(Fault::CorruptSolution), Command::VerifySolutions { .. })
    );
    if !fault_ok {
        return Err(CliError::Config(format!("fault does not apply to {}", cmd.suite_name())));
    }
    let mut r = Report::new(cmd.suite_name(), cfg);
    match cmd {
        Command::VerifyTable => verify_table(cfg, &mut r)?,
        Command::VerifyKernel { functions } => verify_kernel(cfg, *functions, &mut r)?,
        Command::Brackets => brackets(cfg, &mut r)?,
        Command::VerifySolutions { case, mode, ode } => verify_solutions(cfg, case.as_deref(), *mode, *ode, &mut r)?,
        Command::Reduce {
            case,
            y0,
            phi0,
            dphi0,
            y1,
            steps,
        } => reduce_suite(cfg, case.as_deref(), [*y0, *phi0, *dphi0, *y1], *steps, &mut r)?,
        Command::OptimalSystem => optimal(cfg, &mut r)?,
        Command::Solve { problem, n, dt } => solve_suite(*problem, *n, *dt, &mut r)?,
        Command::Convergence { problem, ns, dt_coeff } => convergence(*problem, ns.as_deref(), *dt_coeff, &mut r)?,
        Command::Equivalence { transforms } => equivalence(cfg, *transforms, &mut r)?,
    }
    Ok(r)
}

fn with_ranges(cfg: &SampleConfig, ranges: &BTreeMap<String, (f64, f64)>) -> SampleConfig {
    let mut c = cfg.clone();
    for (k, (lo, hi)) in ranges {
        c = c.with_range(k, *lo, *hi);
    }
    c
}

fn symmetry_case(id: String, r: crate::symmetry::SymmetryReport) -> CaseResult {
    CaseResult::new(id, r.pass, r.max_residual).with_witness(r.witness)
}

fn verify_table(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let base = cfg.sample_config();
    let entries = catalog();
    for entry in &entries {
        let sc = with_ranges(&base, &entry.ranges);
        for (bi, b) in entry.bases.iter().enumerate() {
            for (gi, g) in b.generators.iter().enumerate() {
                let mut g = g.clone();
                if cfg.inject_fault == Some(Fault::Row3Gen2) && entry.row == 3 && bi == 0 && gi == 1 {
                    g = VectorField::new(&g.name, g.tau.clone(), g.xi.clone(), &g.eta + Expr::symbol(&sym::u()));
                }
                let rep = verify_symmetry(&g, &entry.model, &sc, None).map_err(CliError::run)?;
                r.cases.push(symmetry_case(format!("row{}/{}/{}", entry.row, b.source, g.name), rep));
            }
        }
        for inst in &entry.instances {
            for g in &inst.generators {
                let rep = verify_symmetry(g, &inst.model, &base, None).map_err(CliError::run)?;
                r.cases.push(symmetry_case(format!("row{}/{}/{}", entry.row, inst.model.label, g.name), rep));
            }
        }
        if let Some(fam) = &entry.infinite_family {
            let rep = verify_symmetry(&fam.generator, &entry.model, &sc, Some(&fam.constraints)).map_err(CliError::run)?;
            r.cases.push(symmetry_case(format!("row{}/family/{}", entry.row, fam.generator.name), rep));
        }
    }
    r.details = Some(json!({
        "entries": entries.len(),
        "rows": entries.iter().map(|e| json!({"row": e.row, "f": e.model.f.to_string(), "generators": e.generators().len()})).collect::<Vec<_>>(),
    }));
    Ok(())
}

type Constraints = BTreeMap<Symbol, Expr>;

fn random_q(rng: &mut ChaCha8Rng, num: std::ops::RangeInclusive<i64>, nonzero: bool) -> Q {
    loop {
        let n = rng.random_range(num.clone());
        if nonzero && n == 0 {
            continue;
        }
        let d = rng.random_range(1..=4);
        return Q::new(BigInt::from(n), BigInt::from(d));
    }
}

/// `a0 + a1 u + a2 u² + a3 u³ + b e^u` with `a3, b != 0`.
pub fn random_f(rng: &mut ChaCha8Rng) -> Expr {
    let u: Expr = sym::u().into();
    let mut terms = Vec::new();
    for k in 0..4 {
        let a = random_q(rng, -5..=5, k == 3);
        terms.push(Expr::constant(a) * Expr::powi(u.clone(), k));
    }
    terms.push(Expr::constant(random_q(rng, -5..=5, true)) * Expr::exp(u));
    Expr::sum(terms)
}

fn is_d_t(g: &VectorField) -> bool {
    g.tau.is_one() && g.xi.is_zero() && g.eta.is_zero()
}

fn verify_kernel(cfg: &RunConfig, functions: usize, r: &mut Report) -> Result<(), CliError> {
    if functions == 0 {
        return Err(CliError::Config("--functions must be at least 1".into()));
    }
    let base = cfg.sample_config();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let entries = catalog();
    let mut fs = Vec::new();
    for i in 0..functions {
        let f = random_f(&mut rng);
        let m = GkeModel::new(&format!("f{}", i + 1), f).map_err(CliError::run)?;
        fs.push(m.f.to_string());
        let rep = verify_symmetry(&VectorField::d_t(), &m, &base, None).map_err(CliError::run)?;
        r.cases.push(symmetry_case(format!("{}/d_t", m.label), rep));
        for entry in &entries {
            let sc = with_ranges(&base, &entry.ranges);
            let mut gens: Vec<(String, &VectorField, Option<&Constraints>)> = Vec::new();
            for b in &entry.bases {
                for g in &b.generators {
                    gens.push((format!("row{}/{}/{}", entry.row, b.source, g.name), g, None));
                }
            }
            if let Some(fam) = &entry.infinite_family {
                gens.push((format!("row{}/family/{}", entry.row, fam.generator.name), &fam.generator, Some(&fam.constraints)));
            }
            for (id, g, cons) in gens {
                if is_d_t(g) {
                    continue;
                }
                let rep = verify_symmetry(g, &m, &sc, cons).map_err(CliError::run)?;
                let rejected = !rep.pass && rep.witness.is_some();
                r.cases.push(CaseResult::new(format!("{}/{id} rejected", m.label), rejected, rep.max_residual).with_witness(rep.witness));
            }
        }
    }
    r.details = Some(json!({ "functions": fs }));
    Ok(())
}

fn e_basis() -> [VectorField; 3] {
    let [x1, x2, x3] = basis();
    let e1 = VectorField::combination("e1", &[(Expr::one(), &x1), (Expr::int(3), &x2)]);
    [e1, x2.named("e2"), x3.named("e3")]
}

/// `[e1,e2] = 0`, `[e1,e3] = e1`, `[e2,e3] = e2/2`.
pub fn e_table() -> BracketTable {
    let mut t = BracketTable::zeros(3);
    t.set(0, 2, &[q(1, 1), q(0, 1), q(0, 1)]);
    t.set(1, 2, &[q(0, 1), q(1, 2), q(0, 1)]);
    t
}

fn brackets(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let sc = cfg.sample_config();
    let mut table = e_table();
    if cfg.inject_fault == Some(Fault::CorruptBrackets) {
        table.set(0, 2, &[q(2, 1), q(0, 1), q(0, 1)]);
    }
    for (prefix, fields, t) in [("e", e_basis(), table), ("X", basis(), basis_table())] {
        let rep = verify_structure_constants(&fields, &t, &sc).map_err(CliError::run)?;
        for c in rep.checks {
            let id = format!("{prefix}/[{},{}]", fields[c.i].name, fields[c.j].name);
            r.cases.push(CaseResult::new(id, c.pass, c.max_residual).with_witness(c.witness));
        }
    }
    let [x1, x2, x3] = basis();
    let j = jacobi_residual(&x1, &x2, &x3).map_err(CliError::run)?;
    let mut pass = true;
    let mut max: f64 = 0.0;
    let mut witness = None;
    for coeff in j.coefficients() {
        let z = is_identically_zero(coeff, &sc).map_err(CliError::run)?;
        max = max.max(z.max_residual);
        if !z.zero {
            pass = false;
            witness = witness.or(z.witness);
        }
    }
    r.cases.push(CaseResult::new("jacobi/(X1,X2,X3)", pass, max).with_witness(witness));
    Ok(())
}

fn parse_case(s: &str) -> Result<Case, CliError> {
    Case::parse(s).ok_or_else(|| CliError::Config(format!("unknown case `{s}` (expected I-V)")))
}

fn corrupted_b() -> ExactSolution {
    let mut s = ExactSolution::find("b").expect("solution b exists");
    let x: Expr = sym::x().into();
    let t: Expr = sym::t().into();
    s.id = "b-squared".into();
    s.u = Expr::int(27) * Expr::powi(Expr::powi(x.clone(), 3) * Expr::powi(Expr::ln(x) - Expr::int(3) * t, 2), -1);
    s
}

fn verify_solutions(
    cfg: &RunConfig,
    sel: Option<&str>,
    mode: ModeArg,
    ode: bool,
    r: &mut Report,
) -> Result<(), CliError> {
    let sc = cfg.sample_config();
    let (solutions, cases): (Vec<ExactSolution>, Vec<Case>) = match sel {
        None => (exact_solutions(), Case::ALL.to_vec()),
        Some(s) => match ExactSolution::find(s) {
            Some(sol) => {
                let c = sol.case;
                (vec![sol], vec![c])
            }
            None => {
                let c = parse_case(s)?;
                (exact_solutions().into_iter().filter(|x| x.case == c).collect(), vec![c])
            }
        },
    };
    let mut solutions = solutions;
    if cfg.inject_fault == Some(Fault::CorruptSolution) {
        match solutions.iter_mut().find(|s| s.id == "b") {
            Some(s) => *s = corrupted_b(),
            None => return Err(CliError::Config("corrupt-solution needs solution (b) in the selection".into())),
        }
    }
    let modes: &[Mode] = match mode {
        ModeArg::Symbolic => &[Mode::Symbolic],
        ModeArg::Numeric => &[Mode::Numeric],
        ModeArg::Both => &[Mode::Symbolic, Mode::Numeric],
    };
    for s in &solutions {
        for &m in modes {
            let rep = verify_exact(s, m, &sc).map_err(CliError::run)?;
            let tag = if m == Mode::Symbolic { "symbolic" } else { "numeric" };
            r.cases.push(CaseResult::new(format!("({})/{tag}", s.id), rep.pass, rep.max_residual).with_witness(rep.witness));
        }
    }
    let want_ode = ode || (solutions.is_empty() && cases == [Case::IV]);
    if want_ode {
        for c in &cases {
            ode_checks(*c, r)?;
        }
    }
    r.details = Some(json!({
        "solutions": solutions.iter().map(|s| json!({"id": s.id, "case": s.case, "u": s.u.to_string(), "domain": s.domain})).collect::<Vec<_>>(),
    }));
    Ok(())
}

fn ode_checks(c: Case, r: &mut Report) -> Result<(), CliError> {
    match c {
        Case::II => {
            let tr = integrate_reduced_ode(Case::II, 3.0, [1.0, -1.0], 6.0, 3000).map_err(CliError::run)?;
            let err = tr.y.iter().zip(&tr.phi).map(|(y, p)| (p - 27.0 / y.powi(3)).abs()).fold(0.0, f64::max);
            r.cases.push(CaseResult::new("II/ode-track 27y^-3", err <= 1e-6, err));
        }
        Case::III => {
            let exact = |y: f64| (1.0 - 0.5 * y.powf(-1.0 / 3.0)).powi(-3);
            let tr = integrate_reduced_ode(Case::III, 1.0, [8.0, -8.0], 4.0, 3000).map_err(CliError::run)?;
            let err = tr.y.iter().zip(&tr.phi).map(|(y, p)| (p - exact(*y)).abs() / exact(*y)).fold(0.0, f64::max);
            r.cases.push(CaseResult::new("III/ode-track c=1/2", err <= 1e-6, err));
        }
        Case::IV => {
            for (b, name) in [(Branch::One, "y1"), (Branch::Two, "y2")] {
                let rep = implicit_relation_check(b, 2.0, 0.0, (1.0, 8.0), 1e-3, 1e-4).map_err(CliError::run)?;
                r.cases.push(CaseResult::new(format!("IV/implicit-{name}"), rep.pass, rep.max_residual));
            }
        }
        Case::I | Case::V => {}
    }
    Ok(())
}

fn reduce_suite(
    cfg: &RunConfig,
    sel: Option<&str>,
    traj: [Option<f64>; 4],
    steps: usize,
    r: &mut Report,
) -> Result<(), CliError> {
    let sc = cfg.sample_config();
    let cases = match sel {
        None => Case::ALL.to_vec(),
        Some(s) => vec![parse_case(s)?],
    };
    let mut docs = Vec::new();
    for &c in &cases {
        let a = ansatz_case(c);
        let inv = check_invariants(&a, &sc).map_err(CliError::run)?;
        r.cases.push(CaseResult::new(format!("{c}/invariants"), inv.y_invariant && inv.omega_invariant, 0.0));
        let red = reduce(&a, &sc).map_err(CliError::run)?;
        r.cases.push(
            CaseResult::new(format!("{c}/ode"), red.pass(), red.matches_expected.max_residual)
                .with_witness(red.matches_expected.witness.clone()),
        );
        let lift = lift_consistency(c, 1e-2, 1e-3).map_err(CliError::run)?;
        r.cases.push(CaseResult::new(format!("{c}/lift"), lift.pass, lift.residual_h));
        docs.push(json!({"reduction": ReductionDoc::new(&a, &red), "lift": lift}));
    }
    if let [c] = cases.as_slice() {
        let (y0, init, y1) = default_initial(*c);
        let y0 = traj[0].unwrap_or(y0);
        let init = [traj[1].unwrap_or(init[0]), traj[2].unwrap_or(init[1])];
        let y1 = traj[3].unwrap_or(y1);
        let tr = integrate_reduced_ode(*c, y0, init, y1, steps).map_err(|e| CliError::Config(e.to_string()))?;
        r.csv = Some(tr.to_csv());
    }
    r.details = Some(serde_json::Value::Array(docs));
    Ok(())
}

fn optimal(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let sc = cfg.sample_config();
    let mut list = Vec::new();
    for s in optimal_system() {
        let c = subalgebra_closure(&s, &sc).map_err(CliError::run)?;
        r.cases.push(CaseResult::new(format!("{}/closed", s.label), c.closed && c.brackets_verified, 0.0));
        if s.dim() == 1 {
            let a = crate::reduction::ansatz_for(&s).map_err(CliError::run)?;
            let inv = check_invariants(&a, &sc).map_err(CliError::run)?;
            r.cases.push(CaseResult::new(
                format!("{}/ansatz {}", s.label, a.case),
                inv.y_invariant && inv.omega_invariant,
                0.0,
            ));
        }
        list.push(json!({"label": s.label, "dim": s.dim()}));
    }
    r.details = Some(json!({ "subalgebras": list }));
    Ok(())
}

/// Grid, model, reference and acceptance test of a solver problem.
struct Setup {
    grid: SolverGrid,
    model: GkeModel,
    reference: fn(f64, f64) -> f64,
}

fn heat(t: f64, y: f64) -> f64 {
    HeatKernel::default().eval(t, y)
}

fn setup(p: Problem, n: usize, dt: Option<f64>) -> Result<Setup, CliError> {
    let cfg = |e: crate::solver::SolverError| CliError::Config(e.to_string());
    Ok(match p {
        Problem::Heat => {
            let mut g = SolverGrid::new(-4.0, 3.5, n, 1.0, 0.1, 0.2).map_err(cfg)?;
            g.dt = dt.unwrap_or(0.5 * g.h() * g.h());
            g.validate().map_err(cfg)?;
            Setup {
                grid: g,
                model: GkeModel::zero(),
                reference: heat,
            }
        }
        Problem::B => {
            let t0 = 0.5;
            let g = SolverGrid::new(3.0 * t0 + 1.0, 3.0 * t0 + 3.0, n, dt.unwrap_or(1e-5), t0, t0 + 0.01).map_err(cfg)?;
            Setup {
                grid: g,
                model: GkeModel::four_thirds(),
                reference: solution_b_reference,
            }
        }
    })
}

fn solve_suite(p: Problem, n: Option<usize>, dt: Option<f64>, r: &mut Report) -> Result<(), CliError> {
    let n = n.unwrap_or(match p {
        Problem::Heat => 512,
        Problem::B => 256,
    });
    let s = setup(p, n, dt)?;
    let out = solve(&s.grid, &s.model, &s.reference).map_err(CliError::run)?;
    let (abs, rel) = out.error_against(&s.grid, &s.reference);
    let (steps, dt) = s.grid.steps();
    let rec = RunRecord {
        n,
        h: s.grid.h(),
        dt,
        steps,
        abs_error: abs,
        rel_error: rel,
    };
    let case = match p {
        Problem::Heat => CaseResult::new(format!("heat/n={n} max-norm error < 1e-4"), abs < 1e-4, abs),
        Problem::B => CaseResult::new(format!("b/n={n} relative error < 1e-3"), rel < 1e-3, rel),
    };
    r.cases.push(case);
    r.csv = Some(out.to_csv(&s.grid));
    r.details = Some(json!({"grid": s.grid, "model": s.model.label, "scheme": "imex-cn-heun", "run": rec}));
    Ok(())
}

fn convergence_csv(c: &ConvergenceReport) -> String {
    let mut s = String::from("n,h,dt,steps,abs_error,rel_error\n");
    for r in &c.runs {
        s.push_str(&format!("{},{:.12e},{:.12e},{},{:.12e},{:.12e}\n", r.n, r.h, r.dt, r.steps, r.abs_error, r.rel_error));
    }
    s
}

fn convergence(p: Problem, ns: Option<&[usize]>, dt_coeff: f64, r: &mut Report) -> Result<(), CliError> {
    let default: &[usize] = match p {
        Problem::Heat => &[128, 256, 512],
        Problem::B => &[64, 128, 256],
    };
    let ns = ns.unwrap_or(default);
    let s = setup(p, ns.first().copied().unwrap_or(16).max(8), None)?;
    let rep = convergence_study(&s.model, &s.reference, &s.grid, ns, dt_coeff).map_err(|e| match e {
        crate::solver::SolverError::Study(m) => CliError::Config(m),
        other => CliError::run(other),
    })?;
    for (i, run) in rep.runs.iter().enumerate() {
        let decreased = i == 0 || run.abs_error < rep.runs[i - 1].abs_error;
        r.cases.push(CaseResult::new(format!("n={}/error", run.n), decreased, run.abs_error));
    }
    for (w, o) in rep.runs.windows(2).zip(&rep.orders) {
        let ok = *o >= rep.band.0 && *o <= rep.band.1;
        r.cases.push(CaseResult::new(format!("order {}->{}", w[0].n, w[1].n), ok, *o));
    }
    r.csv = Some(convergence_csv(&rep));
    r.details = Some(serde_json::to_value(&rep).expect("report serializes"));
    Ok(())
}

fn random_transform(rng: &mut ChaCha8Rng) -> EquivTransform {
    let a = random_q(rng, -3..=3, false);
    let b = random_q(rng, 1..=4, true);
    let c1 = random_q(rng, -4..=4, true);
    let c2 = random_q(rng, -3..=3, false);
    EquivTransform::new(a, b, c1, c2).expect("nonzero B and C1")
}

fn equivalence(cfg: &RunConfig, transforms: usize, r: &mut Report) -> Result<(), CliError> {
    if transforms == 0 {
        return Err(CliError::Config("--transforms must be at least 1".into()));
    }
    let sc = cfg.sample_config();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ts: Vec<EquivTransform> = (0..transforms).map(|_| random_transform(&mut rng)).collect();
    let id = EquivTransform::identity();
    let mut identity = true;
    let mut inverse = true;
    let mut assoc = true;
    for (i, t) in ts.iter().enumerate() {
        let u = &ts[(i + 1) % ts.len()];
        let v = &ts[(i + 2) % ts.len()];
        identity &= t.compose(&id) == *t && id.compose(t) == *t;
        inverse &= t.compose(&t.invert()).is_identity() && t.invert().compose(t).is_identity();
        assoc &= t.compose(&u.compose(v)) == t.compose(u).compose(v);
    }
    r.cases.push(CaseResult::new("axioms/identity", identity, 0.0));
    r.cases.push(CaseResult::new("axioms/inverse", inverse, 0.0));
    r.cases.push(CaseResult::new("axioms/associativity", assoc, 0.0));

    let m = GkeModel::four_thirds();
    let mut action_max: f64 = 0.0;
    let mut action_ok = true;
    for (i, t) in ts.iter().enumerate() {
        let u = &ts[(i + 1) % ts.len()];
        let lhs = t.compose(u).apply_f(&m).map_err(CliError::run)?;
        let rhs = t.apply_f(&u.apply_f(&m).map_err(CliError::run)?).map_err(CliError::run)?;
        let tu = t.compose(u);
        let v = Expr::constant(tu.c1.clone()) * Expr::symbol(&sym::u()) + Expr::constant(tu.c2.clone());
        let diff = (&lhs.f - &rhs.f).subs(&sym::u(), &v);
        let z = is_identically_zero(&diff, &sc).map_err(CliError::run)?;
        action_ok &= z.zero;
        action_max = action_max.max(z.max_residual);
    }
    r.cases.push(CaseResult::new("axioms/action on f", action_ok, action_max));

    let sols = exact_solutions();
    for (i, t) in ts.iter().enumerate() {
        let s = &sols[i % sols.len()];
        let mt = t.apply_f(&m).map_err(CliError::run)?;
        let pushed = t.push_solution(&s.u).map_err(CliError::run)?;
        let res = residual(&mt, &pushed).map_err(CliError::run)?;
        // back to the original coordinates so sampling stays in the domain of `s`
        let mut back = BTreeMap::new();
        back.insert(sym::t(), Expr::symbol(&sym::t()) + Expr::constant(t.a.clone()));
        back.insert(sym::x(), Expr::constant(t.b.clone()) * Expr::symbol(&sym::x()));
        let res = s.restrict(&res.substitute(&back));
        let id = format!("T{}[{}]/({})", i + 1, t.describe(), s.id);
        let z = is_identically_zero(&res, &s.sample_config(&sc)).map_err(|e| CliError::Run(format!("{id}: {e}")))?;
        r.cases.push(
            CaseResult::new(id, z.zero, z.max_residual)
                .with_witness(z.witness),
        );
    }

    let c: Expr = Symbol::parameter("c").into();
    let x: Expr = sym::x().into();
    let u1 = c * Expr::powi(x.clone(), -3) - x;
    let z1 = is_identically_zero(&residual(&GkeModel::one(), &u1).map_err(CliError::run)?, &sc).map_err(CliError::run)?;
    r.cases.push(CaseResult::new("shift/f=1 solution", z1.zero, z1.max_residual).with_witness(z1.witness));
    let u0 = shift_map_f1_to_f0(&u1);
    let z0 = is_identically_zero(&residual(&GkeModel::zero(), &u0).map_err(CliError::run)?, &sc).map_err(CliError::run)?;
    r.cases.push(CaseResult::new("shift/f=0 image", z0.zero, z0.max_residual).with_witness(z0.witness));
    r.details = Some(json!({ "transforms": ts }));
    Ok(())
}
