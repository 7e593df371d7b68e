//! `coherent`: batch front door to the coherent-spaces library.
//!
//! Every subcommand reads one JSON document. Flags only override tolerances
//! and the seed. Exit status is 0 when every check passes, 1 when a check
//! fails and 2 for configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use coherent_spaces::error::{Error, Result};
use coherent_spaces::io::{matrix_from_rows, matrix_to_json, point_from_value, point_to_value, MapDoc, OscDoc, SpaceDoc};
use coherent_spaces::linalg::C64;
use coherent_spaces::maps::{quantize, OrbitSample};
use coherent_spaces::realization::{factor_gram, operator_from_kernel, shadow_of_operator, KernelOnSample, OperatorOnSpan, DEFAULT_EPS_RANK};
use coherent_spaces::space::{check_positive_type, gram_matrix, Space};
use coherent_spaces::suite::{run_suite, CheckKind, CheckSpec, SuiteConfig, BUILTIN_SUITES};
use serde::Deserialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "coherent", version, about = "Coherent spaces, quantum spans and coherent quantization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix of a points file, checked for positive type.
    Gram {
        points: PathBuf,
        /// Passes iff lambda_min >= -tol * lambda_max.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Kernel to operator on the span, or operator to kernel.
    Shadow {
        doc: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Operator of a coherent map on an orbit-closed sample.
    Quantize {
        doc: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Coherence of every map in a suite config.
    CheckCoherent(ConfigArgs),
    /// Separability of every scalar map in a suite config.
    CheckSeparable(ConfigArgs),
    /// Product, adjoint, inverse or point action of oscillator elements.
    Osc { doc: PathBuf },
    /// Truncated Fock space checks.
    Fock {
        #[command(subcommand)]
        check: FockCheck,
    },
    /// A bundled suite by name, or a suite config file.
    Suite(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Config path, or a bundled suite name for `suite`.
    config: String,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Clone, Copy)]
struct Overrides {
    /// Tolerance for every check.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed; beats COHERENT_SEED, which beats the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Copy)]
struct FockArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    cutoff: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum FockCheck {
    /// `[a_j, a_k*] = delta_jk` below the cutoff.
    Ccr(FockArgs),
    /// Weyl relation on states of degree <= probe degree.
    Weyl {
        #[command(flatten)]
        args: FockArgs,
        #[arg(long, default_value_t = 10)]
        probe_degree: usize,
    },
    /// Gamma of random oscillator elements on coherent vectors.
    Gamma(FockArgs),
    /// Truncated coherent overlaps against the exponential kernel.
    Overlap(FockArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Errors that mean the mathematics said no, as opposed to bad input.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotPositive { .. }
        | Error::NotAdmissible { .. }
        | Error::NotShadow { .. }
        | Error::OrbitNotClosed { .. }
        | Error::Singular { .. }
        | Error::NotUnitary { .. }
        | Error::IllConditioned { .. } => 1,
        _ => 2,
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gram { points, tol } => gram(&points, tol),
        Command::Shadow { doc, tol } => shadow(&doc, tol),
        Command::Quantize { doc, tol } => quantize_cmd(&doc, tol),
        Command::CheckCoherent(args) => {
            let mut config = load_config(&args.config, false)?;
            let names: Vec<String> = config.maps.keys().cloned().collect();
            if names.is_empty() {
                return Err(config_err("maps", "no maps to check"));
            }
            config.checks = names.into_iter().map(|m| check(format!("coherence {m}"), CheckKind::Coherence { map: m })).collect();
            report(config, args.overrides)
        }
        Command::CheckSeparable(args) => {
            let mut config = load_config(&args.config, false)?;
            config.checks = config
                .maps
                .iter()
                .filter_map(|(name, doc)| match doc {
                    MapDoc::Scalar { scalar } => Some(check(format!("separable {name}"), CheckKind::Separable { lambda: *scalar })),
                    _ => None,
                })
                .collect();
            if config.checks.is_empty() {
                return Err(config_err("maps", "no scalar maps to check"));
            }
            report(config, args.overrides)
        }
        Command::Osc { doc } => osc(&doc),
        Command::Fock { check } => fock(check),
        Command::Suite(args) => {
            let config = load_config(&args.config, true)?;
            report(config, args.overrides)
        }
    }
}

fn config_err(field: &str, message: &str) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn load_config(arg: &str, allow_builtin: bool) -> Result<SuiteConfig> {
    if allow_builtin && !Path::new(arg).exists() {
        return SuiteConfig::builtin(arg)
            .ok_or_else(|| Error::Config { field: "suite".into(), message: format!("`{arg}` is neither a file nor one of {BUILTIN_SUITES:?}") });
    }
    SuiteConfig::from_json(&read(Path::new(arg))?)
}

fn check(name: String, kind: CheckKind) -> CheckSpec {
    CheckSpec { name: Some(name), tol: None, space: None, count: None, kind }
}

/// Runs a config, prints the report and writes it where the config asks.
fn report(mut config: SuiteConfig, overrides: Overrides) -> Result<bool> {
    config.apply_env()?;
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(tol) = overrides.tol {
        if !(tol >= 0.0) {
            return Err(config_err("--tol", "must be a nonnegative number"));
        }
        config.tolerances.all = Some(tol);
    }
    let report = run_suite(&config)?;
    println!("{}", report.to_json());
    if let Some(path) = &config.output.report {
        report.write(path)?;
    }
    for c in &report.checks {
        eprintln!("{} {}: residual {:.3e} (tol {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.residual, c.tolerance);
    }
    Ok(report.passed())
}

fn gram(path: &Path, tol: f64) -> Result<bool> {
    let sample = coherent_spaces::io::parse_points(&read(path)?)?;
    let g = gram_matrix(&sample)?;
    let r = check_positive_type(&sample, tol)?;
    println!("{}", matrix_to_json(&g));
    eprintln!("lambda_min {:.6e}, lambda_max {:.6e}: {}", r.min_eigenvalue, r.max_eigenvalue, if r.passed { "positive" } else { "NOT positive" });
    Ok(r.passed)
}

/// A points document with either a `kernel` on the sample or an `operator`
/// in span coordinates.
#[derive(Deserialize)]
struct ShadowDoc {
    #[serde(flatten)]
    space: SpaceDoc,
    #[serde(default)]
    kernel: Option<Vec<Vec<C64>>>,
    #[serde(default)]
    operator: Option<Vec<Vec<C64>>>,
    #[serde(default = "default_eps_rank")]
    eps_rank: f64,
}

fn default_eps_rank() -> f64 {
    DEFAULT_EPS_RANK
}

fn shadow(path: &Path, tol: f64) -> Result<bool> {
    let doc: ShadowDoc = parse(path)?;
    let fact = Arc::new(factor_gram(&doc.space.sample()?, doc.eps_rank)?);
    match (doc.kernel, doc.operator) {
        (Some(k), None) => {
            let op = operator_from_kernel(&fact, &KernelOnSample::new(matrix_from_rows(&k)?), tol)?;
            println!("{}", matrix_to_json(&op.matrix));
            eprintln!("operator on a span of rank {}", fact.rank);
        }
        (None, Some(m)) => {
            let op = OperatorOnSpan::new(fact, matrix_from_rows(&m)?)?;
            println!("{}", matrix_to_json(&shadow_of_operator(&op).values));
        }
        _ => return Err(config_err("kernel", "give exactly one of `kernel` and `operator`")),
    }
    Ok(true)
}

#[derive(Deserialize)]
struct QuantizeDoc {
    #[serde(flatten)]
    space: SpaceDoc,
    map: MapDoc,
    #[serde(default = "one")]
    depth: usize,
    #[serde(default = "default_eps_rank")]
    eps_rank: f64,
}

fn one() -> usize {
    1
}

fn quantize_cmd(path: &Path, tol: f64) -> Result<bool> {
    let doc: QuantizeDoc = parse(path)?;
    let sample = doc.space.sample()?;
    let map = doc.map.map(&sample.space)?;
    let orbit = OrbitSample::with_eps_rank(sample, vec![map.clone()], doc.depth, doc.eps_rank)?;
    let op = quantize(&orbit, &map, tol)?;
    println!("{}", matrix_to_json(&op.matrix));
    eprintln!("orbit of {} points, span rank {}", orbit.len(), orbit.factorization().rank);
    Ok(true)
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
enum OscOp {
    Product { x: OscDoc, y: OscDoc },
    Adjoint { x: OscDoc },
    Inverse { x: OscDoc },
    Action { x: OscDoc, point: Value },
}

fn osc(path: &Path) -> Result<bool> {
    let op: OscOp = parse(path)?;
    let out = match op {
        OscOp::Product { x, y } => serde_json::to_value(OscDoc::from_element(&x.element()?.multiply(&y.element()?)?)),
        OscOp::Adjoint { x } => serde_json::to_value(OscDoc::from_element(&x.element()?.adjoint())),
        OscOp::Inverse { x } => serde_json::to_value(OscDoc::from_element(&x.element()?.inverse()?)),
        OscOp::Action { x, point } => {
            let x = x.element()?;
            let z = point_from_value(&Space::klauder(x.dim()), &point)?;
            Ok(point_to_value(&x.act(&z)?)?)
        }
    };
    println!("{}", serde_json::to_string_pretty(&out?)?);
    Ok(true)
}

fn fock(check: FockCheck) -> Result<bool> {
    let (kind, args) = match check {
        FockCheck::Ccr(a) => (CheckKind::FockCcr { dim: a.dim, cutoff: a.cutoff.unwrap_or(40) }, a),
        FockCheck::Weyl { args: a, probe_degree } => {
            let defaults = kind_defaults("fock-weyl")?;
            let (p, q) = match defaults {
                CheckKind::FockWeyl { p, q, .. } => (p, q),
                _ => unreachable!(),
            };
            (CheckKind::FockWeyl { dim: a.dim, cutoff: a.cutoff.unwrap_or(40), probe_degree, p, q }, a)
        }
        FockCheck::Gamma(a) => {
            let count = match kind_defaults("fock-gamma")? {
                CheckKind::FockGamma { count, .. } => count,
                _ => unreachable!(),
            };
            (CheckKind::FockGamma { dim: a.dim, cutoff: a.cutoff.unwrap_or(30), count }, a)
        }
        FockCheck::Overlap(a) => {
            let pairs = match kind_defaults("fock-overlap")? {
                CheckKind::FockOverlap { pairs, .. } => pairs,
                _ => unreachable!(),
            };
            (CheckKind::FockOverlap { dim: a.dim, cutoff: a.cutoff.unwrap_or(30), pairs }, a)
        }
    };
    let mut config = SuiteConfig::single(kind);
    config.name = Some(format!("fock {}", config.checks[0].kind.name().trim_start_matches("fock-")));
    report(config, args.overrides)
}

/// The check with every field at its serde default.
fn kind_defaults(name: &str) -> Result<CheckKind> {
    Ok(serde_json::from_value(serde_json::json!({ "check": name }))?)
}
