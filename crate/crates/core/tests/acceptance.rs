use std::time::{Duration, Instant};

use gke_lab::cli::dispatch;
use serde_json::Value;

struct Run {
    code: i32,
    report: Option<Value>,
    stderr: String,
    elapsed: Duration,
}

fn run(args: &[&str]) -> Run {
    let mut argv = vec!["gke-lab", "--format", "json"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let started = Instant::now();
    let code = dispatch(argv, &mut out, &mut err);
    let elapsed = started.elapsed();
    Run {
        code,
        report: serde_json::from_slice(&out).ok(),
        stderr: String::from_utf8_lossy(&err).into_owned(),
        elapsed,
    }
}

fn cases(r: &Run) -> Vec<Value> {
    r.report.as_ref().and_then(|v| v["cases"].as_array().cloned()).unwrap_or_default()
}

fn all_pass(r: &Run) -> Result<(), String> {
    if r.code != 0 {
        let failed: Vec<String> = cases(r)
            .iter()
            .filter(|c| c["pass"] != Value::Bool(true))
            .map(|c| c["id"].to_string())
            .collect();
        return Err(format!("exit {} failed={failed:?} {}", r.code, r.stderr.trim()));
    }
    if cases(r).is_empty() {
        return Err("empty report".into());
    }
    Ok(())
}

fn case<'a>(cs: &'a [Value], id: &str) -> Result<&'a Value, String> {
    cs.iter().find(|c| c["id"] == id).ok_or_else(|| format!("missing case {id}"))
}

fn table_audit() -> Result<String, String> {
    let r = run(&["verify-table", "--seed", "7"]);
    all_pass(&r)?;
    let entries = r.report.as_ref().unwrap()["details"]["entries"].as_u64();
    if entries != Some(6) {
        return Err(format!("expected 6 catalog entries, got {entries:?}"));
    }
    if r.elapsed > Duration::from_secs(10) {
        return Err(format!("took {:?}", r.elapsed));
    }
    Ok(format!("{} generator checks in {:.2?}", cases(&r).len(), r.elapsed))
}

fn kernel() -> Result<String, String> {
    let r = run(&["verify-kernel", "--functions", "5"]);
    all_pass(&r)?;
    Ok(format!("{} checks", cases(&r).len()))
}

fn algebra() -> Result<String, String> {
    let r = run(&["brackets"]);
    all_pass(&r)?;
    Ok(format!("{} bracket and Jacobi checks", cases(&r).len()))
}

fn equivalence() -> Result<String, String> {
    let r = run(&["equivalence", "--transforms", "20"]);
    all_pass(&r)?;
    let cs = cases(&r);
    let pushed = cs.iter().filter(|c| c["id"].as_str().is_some_and(|s| s.starts_with('T'))).count();
    if pushed != 20 {
        return Err(format!("expected 20 push-forwards, got {pushed}"));
    }
    let worst = cs.iter().filter_map(|c| c["max_residual"].as_f64()).fold(0.0, f64::max);
    if worst > 1e-9 {
        return Err(format!("residual {worst:e}"));
    }
    Ok(format!("worst residual {worst:.1e}"))
}

fn reductions() -> Result<String, String> {
    let r = run(&["reduce"]);
    all_pass(&r)?;
    let cs = cases(&r);
    for c in ["I", "II", "III", "IV", "V"] {
        case(&cs, &format!("{c}/ode"))?;
        case(&cs, &format!("{c}/lift"))?;
    }
    Ok("five ODEs reproduced, five lifts consistent".into())
}

fn exact_solutions() -> Result<String, String> {
    let r = run(&["verify-solutions", "--mode", "both", "--ode"]);
    all_pass(&r)?;
    let cs = cases(&r);
    for id in ["(a)", "(b)", "(c)", "(d)"] {
        case(&cs, &format!("{id}/symbolic"))?;
    }
    let track = case(&cs, "II/ode-track 27y^-3")?["max_residual"].as_f64().unwrap_or(f64::NAN);
    case(&cs, "IV/implicit-y1")?;
    case(&cs, "IV/implicit-y2")?;
    Ok(format!("case II tracking error {track:.1e}"))
}

fn solver() -> Result<String, String> {
    let started = Instant::now();
    let conv = run(&["convergence", "--problem", "heat", "--ns", "128,256,512"]);
    all_pass(&conv)?;
    let d = &conv.report.as_ref().unwrap()["details"];
    let orders: Vec<f64> = d["orders"].as_array().map(|a| a.iter().filter_map(Value::as_f64).collect()).unwrap_or_default();
    if orders.is_empty() || orders.iter().any(|o| !(1.7..=2.3).contains(o)) {
        return Err(format!("orders {orders:?}"));
    }
    let finest = d["runs"][2]["abs_error"].as_f64().unwrap_or(f64::NAN);
    if finest.is_nan() || finest >= 1e-4 {
        return Err(format!("n=512 error {finest:e}"));
    }
    let b = run(&["solve", "--problem", "b", "--n", "256"]);
    all_pass(&b)?;
    let rel = cases(&b)[0]["max_residual"].as_f64().unwrap_or(f64::NAN);
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("orders {orders:.3?}, heat error {finest:.1e}, (b) rel error {rel:.1e}, {elapsed:.2?}"))
}

fn negative_controls() -> Result<String, String> {
    let runs = [
        ("row3gen2", vec!["verify-table", "--inject-fault", "row3gen2"]),
        ("corrupt-solution", vec!["verify-solutions", "--inject-fault", "corrupt-solution"]),
        ("corrupt-brackets", vec!["brackets", "--inject-fault", "corrupt-brackets"]),
    ];
    for (name, args) in runs {
        let r = run(&args);
        if r.code != 1 {
            return Err(format!("{name}: exit {} {}", r.code, r.stderr.trim()));
        }
        let witnessed = cases(&r)
            .iter()
            .any(|c| c["pass"] == Value::Bool(false) && c.get("witness").is_some_and(|w| !w.is_null()));
        if !witnessed {
            return Err(format!("{name}: no failing case carries a witness"));
        }
    }
    Ok("three faults rejected with witnesses".into())
}

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("table audit", table_audit),
        ("kernel", kernel),
        ("algebra structure", algebra),
        ("equivalence group", equivalence),
        ("reductions", reductions),
        ("exact solutions", exact_solutions),
        ("solver", solver),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("PASS  criterion {}  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {}  {name}: {msg}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
