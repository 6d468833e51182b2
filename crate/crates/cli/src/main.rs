//! `dspace`: norms, point evaluations and verification suites for spaces of
//! Dirichlet series.
//!
//! Exit codes: 0 success, 1 a verification report failed, 2 bad
//! configuration or input, 3 numerical failure.

mod settings;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dirichlet_spaces::eval::{
    disk_eval_bound, eval_bound_ap_even, eval_bound_ap_general, eval_bound_ap_zero, eval_bound_dp,
    eval_lower_ap, eval_norm_a2, eval_norm_bp, eval_norm_hp, kernel_a2, DiskWeight, EvalBound,
};
use dirichlet_spaces::json::{g17, num, to_string_pretty};
use dirichlet_spaces::lab::{run_suite, LabConfig, Suite};
use dirichlet_spaces::measure::MeasureSpec;
use dirichlet_spaces::norms::{
    a2_norm, ap_norm, as_even, b2_norm, bp_norm_mc, dirichlet_space_norm, even_bp_norm,
    even_hp_norm, h2_norm, mc_hp_norm, NormEstimate, SamplerConfig, DEFAULT_BUDGET,
};
use dirichlet_spaces::poly::{DirichletPolynomial, Domain};
use dirichlet_spaces::Error;
use serde_json::{json, Value};

use settings::{parse_complex, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange(_)
            | Error::InvalidParameter(_)
            | Error::Parse(_)
            | Error::LengthMismatch { .. }
            | Error::InsufficientCharacter { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dspace",
    version,
    about = "Norms, point evaluations and verification suites for Dirichlet series spaces"
)]
#[command(after_help = "Set THREADS to a positive integer to use more than one worker thread.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a Dirichlet polynomial: h2, hp, a2, ap, b2, bp, dp.
    Norm(RunArgs),
    /// Point-evaluation norm or bound: hp, bp, a2, ap, ap-zero, ap-lower, dp, disk.
    EvalNorm(RunArgs),
    /// Evaluation norms over a σ grid, as CSV.
    EvalScan(ScanArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Truncated reproducing kernel of A²_μ at (s, w).
    Kernel(RunArgs),
    /// Summarize a saved verification JSON file.
    Report(ReportArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[command(flatten)]
    settings: Settings,
    /// JSON file with any of the flag names as keys; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ScanArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// identities, asymptotics, littlewood-paley, multipliers, embeddings or coefficients.
    #[arg(long)]
    suite: String,
    /// Lab config overlay (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the JSON result here.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Record runtime_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// JSON written by `verify --json`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

fn init_threads() -> Result<(), CliError> {
    let n = match std::env::var("THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::Config(format!("THREADS must be a positive integer, got {v:?}"))
            })?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

fn load_poly(s: &Settings) -> Result<DirichletPolynomial, CliError> {
    let v = match (&s.poly, &s.poly_file) {
        (Some(v), _) => v.clone(),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        (None, None) => {
            return Err(CliError::Config(
                "a polynomial is required (--poly or --poly-file)".into(),
            ))
        }
    };
    Ok(DirichletPolynomial::from_json_value(&v)?)
}

fn sampler(s: &Settings, f: &DirichletPolynomial, domain: Domain) -> SamplerConfig {
    let k = s.k.unwrap_or_else(|| f.prime_support());
    SamplerConfig::torus(k, s.samples(), s.seed()).with_domain(domain)
}

fn cmd_norm(args: RunArgs) -> Result<String, CliError> {
    let s = args.settings.with_file(args.config.as_deref())?;
    let f = load_poly(&s)?;
    let space = s.space()?.to_string();
    let p = s.p();
    let mu = || MeasureSpec::parse(s.measure());
    let (estimate, fields): (NormEstimate, &[&str]) = match space.as_str() {
        "h2" => (h2_norm(&f), &[]),
        "b2" => (b2_norm(&f), &[]),
        "a2" => (a2_norm(&f, &mu()?)?, &["measure"]),
        "hp" => match as_even(p) {
            Some(2) => (h2_norm(&f), &["p"]),
            Some(pe) => (even_hp_norm(&f, pe, DEFAULT_BUDGET)?, &["p"]),
            None => (
                mc_hp_norm(&f, p, &sampler(&s, &f, Domain::Torus))?,
                &["p", "samples", "seed"],
            ),
        },
        "bp" => match as_even(p) {
            Some(2) => (b2_norm(&f), &["p"]),
            Some(pe) => (even_bp_norm(&f, pe, DEFAULT_BUDGET)?, &["p"]),
            None => (
                bp_norm_mc(&f, p, &sampler(&s, &f, Domain::Polydisk))?,
                &["p", "samples", "seed"],
            ),
        },
        "ap" => (
            ap_norm(&f, &mu()?, p, &sampler(&s, &f, Domain::Torus))?,
            &["p", "measure", "samples", "seed"],
        ),
        "dp" => (
            dirichlet_space_norm(&f, &mu()?, p, &sampler(&s, &f, Domain::Torus))?,
            &["p", "measure", "samples", "seed"],
        ),
        other => {
            return Err(CliError::Config(format!(
                "unknown norm space {other:?} (h2, hp, a2, ap, b2, bp, dp)"
            )))
        }
    };
    let config = s.effective(fields).to_value();
    Ok(to_string_pretty(
        &json!({"command": "norm", "config": config, "estimate": estimate.to_json_value()}),
    ))
}

/// Evaluation norm of `space` at `s`; also returns the settings fields it read.
fn eval_at(
    space: &str,
    st: &Settings,
    s: num_complex::Complex64,
) -> Result<(EvalBound, &'static [&'static str]), CliError> {
    let p = st.p();
    let mu = || MeasureSpec::parse(st.measure());
    Ok(match space {
        "hp" => (eval_norm_hp(s, p)?, &["p", "t"]),
        "bp" => (eval_norm_bp(s, p)?, &["p", "t"]),
        "a2" => (eval_norm_a2(&mu()?, s)?, &["measure", "t"]),
        "ap" => match as_even(p) {
            Some(pe) => (eval_bound_ap_even(&mu()?, s, pe)?, &["p", "measure", "t"]),
            None => (
                eval_bound_ap_general(&mu()?, s, p, None)?,
                &["p", "measure", "t"],
            ),
        },
        "ap-zero" => (
            eval_bound_ap_zero(&mu()?, s, p, None)?,
            &["p", "measure", "t"],
        ),
        "ap-lower" => {
            if s.im != 0.0 {
                return Err(CliError::Config("ap-lower evaluates at real s only".into()));
            }
            (
                eval_lower_ap(&mu()?, s.re, p, st.terms(), st.samples(), st.seed())?,
                &["p", "measure", "n", "samples", "seed"],
            )
        }
        "dp" => (eval_bound_dp(&mu()?, s, p)?, &["p", "measure", "t"]),
        other => {
            return Err(CliError::Config(format!(
                "unknown evaluation space {other:?} (hp, bp, a2, ap, ap-zero, ap-lower, dp, disk)"
            )))
        }
    })
}

fn cmd_eval_norm(args: RunArgs) -> Result<String, CliError> {
    let st = args.settings.with_file(args.config.as_deref())?;
    let space = st.space()?.to_string();
    let (bound, fields): (EvalBound, &[&str]) = if space == "disk" {
        let z = parse_complex(
            st.z.as_deref()
                .ok_or_else(|| CliError::Config("--z is required for the disk".into()))?,
        )?;
        let weight = st.disk_beta.map_or(DiskWeight::Uniform, DiskWeight::Power);
        (disk_eval_bound(weight, z, st.p(), None)?, &["p"])
    } else {
        eval_at(&space, &st, st.s()?)?
    };
    let config = st.effective(fields).to_value();
    Ok(to_string_pretty(
        &json!({"command": "eval-norm", "config": config, "bound": bound.to_json_value()}),
    ))
}

fn cmd_eval_scan(args: ScanArgs) -> Result<String, CliError> {
    let st = args.run.settings.with_file(args.run.config.as_deref())?;
    let space = st.space()?.to_string();
    let lo = st
        .sigma_min
        .ok_or_else(|| CliError::Config("--sigma-min is required".into()))?;
    let hi = st
        .sigma_max
        .ok_or_else(|| CliError::Config("--sigma-max is required".into()))?;
    let points = st.points();
    if !(lo > 0.5) || !(hi >= lo) || !hi.is_finite() {
        return Err(CliError::Config(format!(
            "σ range [{lo}, {hi}] must satisfy 1/2 < σ_min <= σ_max"
        )));
    }
    if points == 0 {
        return Err(CliError::Config("--points must be positive".into()));
    }
    let mut out = String::from("sigma,value,kind,space,p\n");
    for i in 0..points {
        let sigma = if points == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (points - 1) as f64
        };
        let (b, _) = eval_at(&space, &st, num_complex::Complex64::new(sigma, 0.0))?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            g17(sigma),
            g17(b.value),
            b.kind,
            b.space,
            g17(b.p)
        ));
    }
    match args.output {
        Some(path) => {
            write_atomic(&path, &out)?;
            Ok(String::new())
        }
        None => Ok(out),
    }
}

fn cmd_kernel(args: RunArgs) -> Result<String, CliError> {
    let st = args.settings.with_file(args.config.as_deref())?;
    let s = st.s()?;
    let w = match &st.w {
        Some(text) => parse_complex(text)?,
        None => s,
    };
    let mu = MeasureSpec::parse(st.measure())?;
    let k = kernel_a2(&mu, s, w, st.terms())?;
    let config = st.effective(&["measure", "n", "t"]).to_value();
    Ok(to_string_pretty(&json!({
        "command": "kernel",
        "config": config,
        "kernel": {"value": [num(k.value.re), num(k.value.im)], "terms": k.terms, "tail_bound": num(k.tail_bound)},
    })))
}

fn table(reports: &[Value]) -> String {
    let mut out = String::new();
    let width = reports
        .iter()
        .filter_map(|r| r["name"].as_str())
        .map(str::len)
        .max()
        .unwrap_or(4)
        .max(4);
    out.push_str(&format!(
        "{:<6} {:<width$} {:>24} {:>24} {:>10} {:>9}\n",
        "status", "name", "lhs", "rhs", "tolerance", "ms"
    ));
    let show = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.as_f64().map_or_else(|| other.to_string(), g17),
    };
    let mut passed = 0;
    for r in reports {
        let status = r["status"].as_str().unwrap_or("?");
        if status == "pass" {
            passed += 1;
        }
        out.push_str(&format!(
            "{:<6} {:<width$} {:>24} {:>24} {:>10} {:>9}\n",
            status,
            r["name"].as_str().unwrap_or(""),
            show(&r["lhs"]),
            show(&r["rhs"]),
            show(&r["tolerance"]),
            r["runtime_ms"],
        ));
        if let Some(conds) = r["conditions"].as_array() {
            for c in conds.iter().filter(|c| c["pass"] == false) {
                out.push_str(&format!(
                    "       failed condition: {}\n",
                    c["name"].as_str().unwrap_or("")
                ));
            }
        }
    }
    out.push_str(&format!("{passed}/{} passed\n", reports.len()));
    out
}

fn csv(reports: &[Value]) -> String {
    let mut out = String::from("name,status,lhs,rhs,tolerance,runtime_ms\n");
    for r in reports {
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.as_f64().map_or_else(|| other.to_string(), g17),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            cell(&r["name"]),
            cell(&r["status"]),
            cell(&r["lhs"]),
            cell(&r["rhs"]),
            cell(&r["tolerance"]),
            r["runtime_ms"]
        ));
    }
    out
}

fn all_pass(reports: &[Value]) -> bool {
    reports.iter().all(|r| r["status"] == "pass")
}

fn cmd_verify(args: VerifyArgs) -> Result<(String, bool), CliError> {
    let suite: Suite = args.suite.parse()?;
    let mut overlay = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => json!({}),
    };
    if let (Some(seed), Some(obj)) = (args.seed, overlay.as_object_mut()) {
        obj.insert("seed".into(), Value::from(seed));
    }
    let cfg = LabConfig::from_value(&overlay)?;
    let reports = run_suite(suite, &cfg)?;
    let reports: Vec<Value> = reports
        .into_iter()
        .map(|r| {
            if args.no_timing {
                r.without_timing()
            } else {
                r
            }
        })
        .map(|r| r.to_json_value())
        .collect();
    let ok = all_pass(&reports);
    let doc = json!({"suite": suite.name(), "config": cfg.to_value(), "reports": reports});
    let text = to_string_pretty(&doc) + "\n";
    if let Some(path) = &args.json {
        write_atomic(path, &text)?;
    }
    let out = match args.format {
        Format::Json => text,
        Format::Table => table(&reports),
        Format::Csv => csv(&reports),
    };
    Ok((out, ok))
}

fn cmd_report(args: ReportArgs) -> Result<(String, bool), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.input.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.input.display())))?;
    let reports = doc["reports"]
        .as_array()
        .ok_or_else(|| CliError::Config("expected an object with a \"reports\" array".into()))?;
    let ok = all_pass(reports);
    let out = match args.format {
        Format::Json => to_string_pretty(&Value::Array(reports.clone())),
        Format::Table => table(reports),
        Format::Csv => csv(reports),
    };
    Ok((out, ok))
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    init_threads()?;
    match cli.command {
        Command::Norm(a) => cmd_norm(a).map(|s| (s, true)),
        Command::EvalNorm(a) => cmd_eval_norm(a).map(|s| (s, true)),
        Command::EvalScan(a) => cmd_eval_scan(a).map(|s| (s, true)),
        Command::Kernel(a) => cmd_kernel(a).map(|s| (s, true)),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, ok)) => {
            let mut stdout = std::io::stdout().lock();
            if !out.is_empty() {
                let _ = stdout.write_all(out.as_bytes());
                if !out.ends_with('\n') {
                    let _ = stdout.write_all(b"\n");
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("dspace: {e}");
            ExitCode::from(e.code())
        }
    }
}
