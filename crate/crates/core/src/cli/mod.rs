//! The `gke-lab` command line.
//!
//! Every subcommand runs one verification suite and produces a [`Report`].
//! Exit codes: 0 when every case passes, 1 when some case fails (the report
//! is still written), 2 on usage or configuration errors.

mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{SampleConfig, DEFAULT_SEED};

pub use suites::run_suite;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(String),
}

impl CliError {
    fn run(e: impl std::fmt::Display) -> Self {
        CliError::Run(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Test-only corruptions for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Second generator of catalog row 3.
    #[value(name = "row3gen2")]
    Row3Gen2,
    /// Solution (b) with the cube replaced by a square.
    #[value(name = "corrupt-solution")]
    CorruptSolution,
    /// `[e1, e3] = 2 e1` in the expected structure constants.
    #[value(name = "corrupt-brackets")]
    CorruptBrackets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Symbolic,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// `f = 0` against the shifted Gaussian.
    Heat,
    /// `f = u^(4/3)` against solution (b).
    B,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
    /// Write the report (or CSV) here; run metadata goes to a sibling `.meta.json`.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write a matplotlib script that plots the CSV output.
    #[arg(long, global = true)]
    pub plot_script: Option<PathBuf>,
    #[arg(long, global = true, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

impl RunConfig {
    pub fn sample_config(&self) -> SampleConfig {
        SampleConfig {
            samples: self.samples,
            tol: self.tol,
            seed: self.seed,
            ranges: Default::default(),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.samples == 0 {
            return Err(CliError::Config("--samples must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Invariance of every catalogued generator.
    VerifyTable,
    /// Random f outside the catalog admit only d_t.
    VerifyKernel {
        #[arg(long, default_value_t = 5)]
        functions: usize,
    },
    /// Structure constants of the u^(4/3) algebra and the Jacobi identity.
    Brackets,
    /// Residuals of the closed-form invariant solutions.
    VerifySolutions {
        /// Solution id (a-d) or reduction case (I-V).
        #[arg(long)]
        case: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Symbolic)]
        mode: ModeArg,
        /// Add the reduced-ODE integration and implicit-branch checks.
        #[arg(long)]
        ode: bool,
    },
    /// Reduce the u^(4/3) equation along the one-dimensional subalgebras.
    Reduce {
        #[arg(long)]
        case: Option<String>,
        /// Trajectory start `y0` (CSV output).
        #[arg(long)]
        y0: Option<f64>,
        #[arg(long)]
        phi0: Option<f64>,
        #[arg(long)]
        dphi0: Option<f64>,
        #[arg(long)]
        y1: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// List the optimal system and check closure of each subalgebra.
    OptimalSystem,
    /// One solver run against a reference solution.
    Solve {
        #[arg(long, value_enum, default_value_t = Problem::Heat)]
        problem: Problem,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Grid refinement study.
    Convergence {
        #[arg(long, value_enum, default_value_t = Problem::Heat)]
        problem: Problem,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        /// `dt = dt_coeff * h²`.
        #[arg(long, default_value_t = 0.5)]
        dt_coeff: f64,
    },
    /// Equivalence-group axioms and push-forward of solutions.
    Equivalence {
        #[arg(long, default_value_t = 20)]
        transforms: usize,
    },
}

impl Command {
    pub fn suite_name(&self) -> &'static str {
        match self {
            Command::VerifyTable => "verify-table",
            Command::VerifyKernel { .. } => "verify-kernel",
            Command::Brackets => "brackets",
            Command::VerifySolutions { .. } => "verify-solutions",
            Command::Reduce { .. } => "reduce",
            Command::OptimalSystem => "optimal-system",
            Command::Solve { .. } => "solve",
            Command::Convergence { .. } => "convergence",
            Command::Equivalence { .. } => "equivalence",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "gke-lab", version, about = "Symmetry and solver checks for the generalized Kompaneets equation")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub pass: bool,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl CaseResult {
    pub fn new(id: impl Into<String>, pass: bool, max_residual: f64) -> Self {
        CaseResult {
            id: id.into(),
            pass,
            max_residual,
            witness: None,
        }
    }

    pub fn with_witness<W: Serialize>(mut self, w: Option<W>) -> Self {
        self.witness = w.and_then(|w| serde_json::to_value(w).ok());
        self
    }
}

/// Deterministic suite report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub tol: f64,
    pub cases: Vec<CaseResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub details: Option<serde_json::Value>,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    pub fn new(suite: &str, cfg: &RunConfig) -> Self {
        Report {
            suite: suite.to_string(),
            seed: cfg.seed,
            tol: cfg.tol,
            cases: Vec::new(),
            details: None,
            csv: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("suite {}  seed {}  tol {:e}\n", self.suite, self.seed, self.tol);
        let width = self.cases.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.cases {
            s.push_str(&format!(
                "{}  {:width$}  max_residual {:.3e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.max_residual,
            ));
            if let (false, Some(w)) = (c.pass, &c.witness) {
                s.push_str(&format!("      witness {w}\n"));
            }
        }
        let passed = self.cases.iter().filter(|c| c.pass).count();
        s.push_str(&format!("{passed}/{} passed\n", self.cases.len()));
        s
    }

    fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Text => Ok(self.to_text()),
            Format::Csv => match &self.csv {
                Some(c) => Ok(c.clone()),
                None => Err(CliError::Config(format!("suite {} has no CSV output", self.suite))),
            },
        }
    }
}

/// Run metadata kept apart from the comparable report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool: String,
    pub version: String,
    pub argv: Vec<String>,
    pub started_unix_s: u64,
    pub elapsed_ms: u128,
}

/// `report.json` -> `report.meta.json`.
pub fn meta_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.meta.json"))
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn plot_script(data: &Path, suite: &str) -> String {
    let (x, y) = match suite {
        "reduce" => ("y", "phi"),
        "convergence" => ("h", "abs_error"),
        _ => ("y", "u"),
    };
    let scale = if suite == "convergence" { "plt.loglog" } else { "plt.plot" };
    format!(
        "import csv\nimport matplotlib.pyplot as plt\n\nrows = list(csv.DictReader(open({data:?})))\n\
         {scale}([float(r[{x:?}]) for r in rows], [float(r[{y:?}]) for r in rows], \"o-\")\n\
         plt.xlabel({x:?})\nplt.ylabel({y:?})\nplt.title({suite:?})\nplt.savefig({png:?})\n",
        data = data.display().to_string(),
        png = data.with_extension("png").display().to_string(),
    )
}

fn execute(cli: &Cli, argv: &[String], out: &mut dyn Write) -> Result<bool, CliError> {
    let started = Instant::now();
    let started_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    cli.config.validate()?;
    if cli.config.plot_script.is_some() && cli.config.format != Format::Csv {
        return Err(CliError::Config("--plot-script needs --format csv".into()));
    }
    let report = run_suite(&cli.command, &cli.config)?;
    let body = report.render(cli.config.format)?;
    match &cli.config.output {
        Some(path) => {
            write_file(path, &body)?;
            let meta = RunMeta {
                tool: "gke-lab".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                argv: argv.to_vec(),
                started_unix_s,
                elapsed_ms: started.elapsed().as_millis(),
            };
            write_file(&meta_path(path), &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"))?;
            if cli.config.format != Format::Text {
                let _ = out.write_all(report.to_text().as_bytes());
            }
        }
        None => {
            let _ = out.write_all(body.as_bytes());
        }
    }
    if let Some(script) = &cli.config.plot_script {
        let data = cli.config.output.clone().unwrap_or_else(|| PathBuf::from("data.csv"));
        write_file(script, &plot_script(&data, &report.suite))?;
    }
    Ok(report.pass())
}

/// Parse `argv` (program name first) and run. Returns the exit code.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match execute(&cli, &argv, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "gke-lab: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["gke-lab"];
        argv.extend_from_slice(args);
        let code = dispatch(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["brackets", "--no-such-flag"]).0, 2);
        assert_eq!(run(&["brackets", "--samples", "0"]).0, 2);
        assert_eq!(run(&["brackets", "--tol", "-1"]).0, 2);
        assert_eq!(run(&["brackets", "--inject-fault", "row3gen2"]).0, 2);
        let (code, _, err) = run(&["brackets", "--format", "csv"]);
        assert_eq!(code, 2);
        assert!(err.contains("no CSV"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify-table"));
        assert!(!out.contains("inject-fault"));
    }

    #[test]
    fn meta_path_is_a_sibling() {
        assert_eq!(meta_path(Path::new("/tmp/r.json")), PathBuf::from("/tmp/r.meta.json"));
        assert_eq!(meta_path(Path::new("out")), PathBuf::from("out.meta.json"));
    }

    #[test]
    fn text_report_marks_failures() {
        let cfg = Cli::try_parse_from(["gke-lab", "brackets"]).unwrap().config;
        let mut r = Report::new("x", &cfg);
        r.cases.push(CaseResult::new("good", true, 0.0));
        r.cases.push(CaseResult::new("bad", false, 1.0).with_witness(Some(serde_json::json!({"t": 1.0}))));
        let t = r.to_text();
        assert!(t.contains("FAIL  bad"));
        assert!(t.contains("witness"));
        assert!(t.ends_with("1/2 passed\n"));
        assert!(!r.pass());
    }
}
