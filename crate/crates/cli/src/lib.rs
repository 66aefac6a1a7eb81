//! Command-line front end. [`run`] parses an argument list, executes one
//! subcommand and returns the exit code with the rendered report.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use cat0lab::cat1::{self, FiniteMetricSample, TitsBoundary};
use cat0lab::error::Error;
use cat0lab::gradflow::{self, ConvexFunctional};
use cat0lab::io::parse_mat3;
use cat0lab::isometry::{self, GroupElement};
use cat0lab::symspace::SpdPoint;
use cat0lab::{building, verify};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub const SCHEMA: &str = "cat0lab/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cat0lab", version, about = "Isometries of SL(3,R)/SO(3), Tits boundary fixed sets and CAT(1) centers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jordan case, type, translation length and fixed set of a matrix.
    Classify {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Proximal steps for the numeric translation length (0 skips it).
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Fixed set on the Tits boundary and its sampled radius.
    Boundary {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Points sampled from the fixed set.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Gradient curve of the displacement function from the identity.
    Flow {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Radius and centers of a sampled spherical simplex or its suspension.
    Center {
        /// Simplex dimension m (the suspension is taken over dimension m − 1).
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Suspension over the (m − 1)-simplex instead of the m-simplex.
        #[arg(long)]
        suspension: bool,
        /// Lattice resolution of the simplex grid (default depends on m).
        #[arg(long)]
        grid: Option<usize>,
        /// Latitude levels of the suspension grid.
        #[arg(long)]
        levels: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, required_unless_present = "list")]
        suite: Option<String>,
        /// List suites with their modules.
        #[arg(long)]
        list: bool,
        /// Override the suite's main sample count.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Nine decimals, row-major, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    matrix: String,
    /// Rescale to determinant 1 instead of rejecting det ≠ 1.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

impl Common {
    fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else {
            Format::Json
        }
    }
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// Report text for stdout; empty when it went to `--out`.
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Self { code, stdout, stderr: String::new() }
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(code, text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (name, common) = match &cli.command {
        Command::Classify { common, .. } => ("classify", common),
        Command::Boundary { common, .. } => ("boundary", common),
        Command::Flow { common, .. } => ("flow", common),
        Command::Center { common, .. } => ("center", common),
        Command::Verify { common, .. } => ("verify", common),
    };
    match execute(&cli.command) {
        Ok((code, report)) => match emit(&report, common) {
            Ok(stdout) => Outcome::ok(code, stdout),
            Err(msg) => Outcome { code: EXIT_VALIDATION, stdout: String::new(), stderr: msg },
        },
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Lib(e) if e.is_numerical() => (EXIT_NUMERICAL, "numerical", e.to_string()),
                Failure::Lib(e) => (EXIT_VALIDATION, "validation", e.to_string()),
                Failure::Usage(m) => (EXIT_VALIDATION, "validation", m),
            };
            let report = Report::Json(json!({
                "schema": SCHEMA,
                "command": name,
                "seed": common.seed,
                "error": { "kind": kind, "message": msg },
            }));
            let stdout = match common.format() {
                Format::Json => render_json(&report_value(&report)),
                Format::Csv => String::new(),
            };
            Outcome { code, stdout, stderr: format!("error: {msg}\n") }
        }
    }
}

enum Report {
    Json(Value),
    /// JSON report plus the CSV alternative.
    Both(Value, String),
}

fn report_value(r: &Report) -> &Value {
    match r {
        Report::Json(v) | Report::Both(v, _) => v,
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn emit(report: &Report, common: &Common) -> Result<String, String> {
    let text = match (common.format(), report) {
        (Format::Json, r) => {
            let v = report_value(r);
            if let Some(path) = first_non_finite(v, "$") {
                return Err(format!("report contains a non-finite number at {path}"));
            }
            render_json(v)
        }
        (Format::Csv, Report::Both(_, csv)) => csv.clone(),
        (Format::Csv, Report::Json(_)) => {
            return Err("--csv is available for flow and verify only\n".into());
        }
    };
    match &common.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}\n", path.display()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// serde_json renders NaN and ±∞ as `null`; reject those.
fn first_non_finite(v: &Value, path: &str) -> Option<String> {
    match v {
        Value::Null => Some(path.to_string()),
        Value::Array(a) => a.iter().enumerate().find_map(|(i, x)| first_non_finite(x, &format!("{path}[{i}]"))),
        Value::Object(o) => o.iter().find_map(|(k, x)| {
            if x.is_null() && ALLOWED_NULLS.contains(&k.as_str()) {
                None
            } else {
                first_non_finite(x, &format!("{path}.{k}"))
            }
        }),
        _ => None,
    }
}

/// Keys whose `null` means "absent" rather than a non-finite number.
const ALLOWED_NULLS: [&str; 4] = ["threshold", "numeric", "gap", "boundary_limit"];

fn group_element(m: &MatrixArgs) -> Result<GroupElement, Failure> {
    let raw = parse_mat3(&m.matrix)?;
    Ok(if m.normalize { GroupElement::normalized(raw)? } else { GroupElement::new(raw)? })
}

fn execute(cmd: &Command) -> Result<(i32, Report), Failure> {
    match cmd {
        Command::Classify { matrix, steps, tau, common } => {
            let g = group_element(matrix)?;
            let r = isometry::classify(&g)?;
            let (numeric, gap) = if *steps > 0 {
                if !(*tau > 0.0) {
                    return Err(Failure::Usage("--tau must be positive".into()));
                }
                let (est, _) = isometry::translation_length_numeric(&g, *steps, *tau)?;
                (Some(est), Some(est - r.translation_length))
            } else {
                (None, None)
            };
            Ok((
                EXIT_OK,
                Report::Json(json!({
                    "schema": SCHEMA,
                    "command": "classify",
                    "seed": common.seed,
                    "matrix": matrix_rows(&g),
                    "case": r.jordan.case_id,
                    "kind": r.kind,
                    "params": r.jordan.params,
                    "translation_length": {
                        "closed_form": r.translation_length,
                        "numeric": numeric,
                        "gap": gap,
                        "steps": steps,
                        "tau": tau,
                    },
                    "min_set": r.min_set,
                    "fixed_set": r.fixed_boundary,
                })),
            ))
        }
        Command::Boundary { matrix, samples, common } => {
            let g = group_element(matrix)?;
            let desc = building::fixed_set(&g)?;
            let pts = building::sample_fixed_set(&desc, *samples, common.seed)?;
            let sample = FiniteMetricSample::from_space(&TitsBoundary, &pts);
            let c = cat1::minimax_center(&sample)?;
            let parabolic = (1..=3).contains(&desc.case_id);
            Ok((
                EXIT_OK,
                Report::Json(json!({
                    "schema": SCHEMA,
                    "command": "boundary",
                    "seed": common.seed,
                    "matrix": matrix_rows(&g),
                    "case": desc.case_id,
                    "fixed_set": desc,
                    "radius": {
                        "value": c.rad,
                        "centers": c.centers.len(),
                        "samples": pts.len(),
                        "at_most_pi_over_2": c.rad <= FRAC_PI_2 + 2e-3,
                    },
                    "parabolic": parabolic,
                })),
            ))
        }
        Command::Flow { matrix, steps, tau, common } => {
            let g = group_element(matrix)?;
            if *steps == 0 || !(*tau > 0.0) {
                return Err(Failure::Usage("need --steps ≥ 1 and --tau > 0".into()));
            }
            let f = ConvexFunctional::displacement(g);
            let trace =
                gradflow::gradient_curve_steps(&f, &SpdPoint::identity(), *steps, *tau, &Default::default())?;
            let limit = match gradflow::boundary_limit(&trace) {
                Ok(b) => json!({
                    "point": b.point,
                    "window_spread": b.window_spread,
                    "escape_distance": b.escape_distance,
                    "is_fixed": building::is_fixed(&g, &b.point),
                }),
                Err(Error::NoBoundaryLimit(_)) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            let last = trace.values.len() - 1;
            let v = json!({
                "schema": SCHEMA,
                "command": "flow",
                "seed": common.seed,
                "matrix": matrix_rows(&g),
                "steps": steps,
                "tau": tau,
                "initial_value": trace.values[0],
                "final_value": trace.values[last],
                "min_value": trace.values.iter().copied().fold(f64::INFINITY, f64::min),
                "final_grad_norm": trace.grad_norms[last],
                "boundary_limit": limit,
            });
            Ok((EXIT_OK, Report::Both(v, trace.to_csv())))
        }
        Command::Center { dim, suspension, grid, levels, common } => center(*dim, *suspension, *grid, *levels, common),
        Command::Verify { suite, list, samples, common } => {
            if *list {
                let suites: Vec<Value> = verify::SUITES
                    .iter()
                    .map(|(n, m, d)| json!({"name": n, "module": m, "description": d}))
                    .collect();
                let csv = verify::SUITES.iter().fold(String::from("name,module\n"), |mut s, (n, m, _)| {
                    s.push_str(&format!("{n},{m}\n"));
                    s
                });
                return Ok((
                    EXIT_OK,
                    Report::Both(json!({"schema": SCHEMA, "command": "verify", "suites": suites}), csv),
                ));
            }
            let name = suite.as_deref().expect("clap requires --suite without --list");
            let r = verify::run_suite(name, common.seed, *samples)?;
            let mut csv = String::from("suite,check,value,relation,threshold,passed\n");
            for c in &r.checks {
                let rel = serde_json::to_value(c.relation).expect("serializes");
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.suite,
                    c.name,
                    c.value,
                    rel.as_str().unwrap_or_default(),
                    c.threshold.map(|t| t.to_string()).unwrap_or_default(),
                    c.passed
                ));
            }
            let code = if r.passed { EXIT_OK } else { EXIT_SUITE_FAILED };
            let v = json!({
                "schema": SCHEMA,
                "command": "verify",
                "seed": common.seed,
                "suite": r,
            });
            Ok((code, Report::Both(v, csv)))
        }
    }
}

fn center(dim: usize, suspension: bool, grid: Option<usize>, levels: Option<usize>, common: &Common) -> Result<(i32, Report), Failure> {
    if suspension {
        if !(2..=3).contains(&dim) {
            return Err(Failure::Usage("--suspension needs --dim 2 or 3".into()));
        }
        let (n0, l0) = if dim == 2 { (200, 60) } else { (30, 22) };
        let pts = cat1::suspension_grid(dim, grid.unwrap_or(n0), levels.unwrap_or(l0));
        let c = cat1::suspension_centers(dim, &pts)?;
        let off = c
            .centers
            .iter()
            .map(|&i| (pts[i].polar - FRAC_PI_2).abs())
            .fold(0.0, f64::max);
        let c2: Vec<Value> = c
            .centers2
            .iter()
            .map(|&i| json!({"polar": pts[i].polar, "base": pts[i].base.coords()}))
            .collect();
        return Ok((
            EXIT_OK,
            Report::Json(json!({
                "schema": SCHEMA,
                "command": "center",
                "seed": common.seed,
                "space": "suspension",
                "dim": dim,
                "radius": {
                    "value": c.rad,
                    "centers": c.centers.len(),
                    "centers_max_off_equator": off,
                    "grid_points": pts.len(),
                },
                "second_radius": c.rad2,
                "second_centers": c2,
            })),
        ));
    }
    if dim == 0 {
        return Err(Failure::Usage("--dim must be at least 1".into()));
    }
    let g = match grid {
        Some(n) => cat1::simplex_geometry_with(dim, n)?,
        None => cat1::simplex_geometry(dim)?,
    };
    Ok((
        EXIT_OK,
        Report::Json(json!({
            "schema": SCHEMA,
            "command": "center",
            "seed": common.seed,
            "space": "simplex",
            "dim": dim,
            "radius": {
                "value": g.rad,
                "centers": [g.center.coords()],
                "grid_error": g.grid_error,
                "grid_points": g.grid_points,
            },
            "delta": g.delta,
            "barycenter": g.barycenter.coords(),
        })),
    ))
}

fn matrix_rows(g: &GroupElement) -> Vec<[f64; 3]> {
    let m = g.matrix();
    (0..3).map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]]).collect()
}
