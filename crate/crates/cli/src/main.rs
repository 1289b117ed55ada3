//! `midsub`: subdivision, spectral analysis and smoothness certificates
//! from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use midsub::certificate::{num, to_value, Certificate, Verdict, SCHEMA};
use midsub::characteristic::certify::certify_extraordinary;
use midsub::characteristic::charmesh::{chain_top, characteristic_mesh, to_quad_mesh, CharOutcome};
use midsub::characteristic::cone::{angle, cone_contains, Cone};
use midsub::characteristic::nabla::nabla2_matrix;
use midsub::config::AnalysisConfig;
use midsub::mesh::obj::{read_obj, write_obj};
use midsub::operators::apply::apply_word;
use midsub::operators::word::parse_word;
use midsub::rational::parse_rational;
use midsub::regular::certify::certify_regular;
use midsub::spectral::report::{analyse, eigenvalue_csv};
use midsub::verify::{run_check, tap, SuiteOptions, CHECKS};
use midsub::Error;

const EXIT_OK: u8 = 0;
const EXIT_NOT_CERTIFIED: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

/// Log level is read from this variable (`error`, `warn`, `info`, ...).
const LOG_ENV: &str = "MIDSUB_LOG";

#[derive(Parser)]
#[command(name = "midsub", version, about = "General midpoint subdivision and smoothness certification")]
struct Cli {
    /// TOML file with analysis settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    knobs: Knobs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Knobs {
    /// Ringnet size of the subdivision matrix.
    #[arg(long, global = true)]
    rho: Option<usize>,
    /// Convergence tolerance of the eigen solvers.
    #[arg(long, global = true)]
    eigen_tol: Option<f64>,
    /// Iteration limit of the eigen solvers.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Levels of the finite-level cone check.
    #[arg(long, global = true)]
    cone_levels: Option<usize>,
    /// Largest power searched for a positive column.
    #[arg(long, global = true)]
    c0_max_power: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a word to an OBJ mesh.
    Subdivide {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify smoothness on regular grids or at extraordinary elements.
    Certify {
        #[command(subcommand)]
        target: CertifyTarget,
    },
    /// Spectrum of the subdivision matrix as JSON.
    Spectrum {
        #[arg(long)]
        word: String,
        #[arg(long)]
        valence: usize,
        /// Write every eigenvalue per frequency as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the exact matrix as `row col value` triplets.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Export the characteristic mesh and its vertical differences.
    Charmap {
        #[arg(long)]
        word: String,
        #[arg(long)]
        valence: usize,
        #[arg(long)]
        out: PathBuf,
        /// CSV of the vertical differences; defaults to the OBJ path with a
        /// `.csv` extension.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the reproduction checks and print TAP.
    VerifyPaper {
        /// Run only these checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trials of the randomised property check.
        #[arg(long)]
        trials: Option<usize>,
        /// Do not fail checks that exceed their time limit.
        #[arg(long)]
        no_budgets: bool,
        /// Negative control: the value the R norm is compared with.
        #[arg(long, hide = true)]
        inject_r_norm: Option<String>,
    },
}

#[derive(Subcommand)]
enum CertifyTarget {
    Regular {
        #[arg(long)]
        word: String,
    },
    Extraordinary {
        #[arg(long)]
        word: String,
        #[arg(long)]
        valence: usize,
    },
}

fn load_config(path: Option<&Path>, knobs: &Knobs) -> Result<AnalysisConfig, Error> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            toml::from_str(&text).map_err(|e| Error::InvalidParameter(format!("config {}: {e}", p.display())))?
        }
        None => AnalysisConfig::default(),
    };
    if knobs.rho.is_some() {
        cfg.rho = knobs.rho;
    }
    if let Some(x) = knobs.eigen_tol {
        cfg.eigen_tol = x;
    }
    if let Some(x) = knobs.max_iter {
        cfg.eigen_max_iter = x;
        cfg.char_max_iter = x;
    }
    if let Some(x) = knobs.cone_levels {
        cfg.cone_levels = x;
    }
    if let Some(x) = knobs.c0_max_power {
        cfg.c0_max_power = x;
    }
    Ok(cfg)
}

fn exit_for_error(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_)
        | Error::Syntax { .. }
        | Error::InvalidWord { .. }
        | Error::NonManifold { .. }
        | Error::InvalidMesh(_)
        | Error::NotABaseCase(_)
        | Error::Io(_) => EXIT_INVALID,
        _ => EXIT_INTERNAL,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid-parameter",
        Error::Syntax { .. } => "syntax",
        Error::InvalidWord { .. } => "invalid-word",
        Error::NonManifold { .. } => "non-manifold",
        Error::InvalidMesh(_) => "invalid-mesh",
        Error::Structural(_) => "structural",
        Error::State(_) => "state",
        Error::RingnetTooSmall(_) => "ringnet-too-small",
        Error::Resource(_) => "resource",
        Error::NotABaseCase(_) => "not-a-base-case",
        Error::Io(_) => "io",
        Error::Numerical(_) => "numerical",
    }
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn write_stdout(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(v: &Value) {
    write_stdout(&format!("{}\n", serde_json::to_string_pretty(v).expect("JSON values serialise")));
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        v if v.is_certified() => EXIT_OK,
        Verdict::InvalidInput => EXIT_INVALID,
        _ => EXIT_NOT_CERTIFIED,
    }
}

fn emit(mut c: Certificate, cfg: &AnalysisConfig) -> u8 {
    c.config = to_value(cfg);
    let code = verdict_exit(c.verdict);
    print_json(&to_value(&c));
    code
}

fn subdivide(input: &Path, word: &str, steps: usize, out: &Path) -> Result<u8, Error> {
    let word = parse_word(word)?;
    if let midsub::operators::word::WordClass::Invalid { reason } = word.classify() {
        return Err(Error::InvalidWord { word: word.to_string(), reason });
    }
    let mesh = read_obj(input)?;
    let (result, rounds) = apply_word(&mesh, &word, steps)?;
    write_obj(&result, out)?;
    print_json(&json!({
        "schema": SCHEMA,
        "word": word.to_string(),
        "input": { "vertices": mesh.n_vertices(), "faces": mesh.n_faces(), "orientation": mesh.orientation() },
        "rounds": to_value(&rounds),
    }));
    Ok(EXIT_OK)
}

fn spectrum(word: &str, m: usize, csv: Option<&Path>, dump: Option<&Path>, cfg: &AnalysisConfig) -> Result<u8, Error> {
    let word = parse_word(word)?.even_power();
    let a = analyse(&word, m, cfg.rho, &cfg.eigen())?;
    if let Some(p) = csv {
        std::fs::write(p, eigenvalue_csv(&a.blocks)?)?;
    }
    if let Some(p) = dump {
        std::fs::write(p, a.matrix.triplets())?;
    }
    let mut report = to_value(&a.report);
    if let Value::Object(o) = &mut report {
        o.insert("schema".into(), json!(SCHEMA));
        o.insert("config".into(), to_value(cfg));
    }
    print_json(&report);
    Ok(EXIT_OK)
}

fn charmap(word: &str, m: usize, out: &Path, csv: Option<&Path>, cfg: &AnalysisConfig) -> Result<u8, Error> {
    let word = parse_word(word)?.even_power();
    let a = analyse(&word, m, cfg.rho, &cfg.eigen())?;
    let mesh = match characteristic_mesh(&a.matrix, cfg.char_tol, cfg.char_max_iter)? {
        CharOutcome::Converged(c) => c,
        CharOutcome::NoSimplePair { .. } => {
            chain_top(&a.matrix, &a.blocks, a.report.lambda_subdominant, cfg.rank_tol)?.0
        }
    };
    write_obj(&to_quad_mesh(&mesh)?, out)?;
    let cone = Cone::spokes(m, true);
    let edges = nabla2_matrix(&a.matrix, &mesh.net);
    let scale = edges.iter().map(|(_, z)| z.norm()).fold(0.0, f64::max);
    let check = cone_contains(&cone, &edges, 1e-10 * scale);
    let outside: std::collections::HashSet<_> = check.violations.iter().map(|w| (w.label.i, w.label.j)).collect();
    let mut text = String::from("i,j,re,im,angle,in_cone\n");
    for (l, z) in &edges {
        text.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e},{}\n",
            l.i,
            l.j,
            z.re,
            z.im,
            angle(*z),
            !outside.contains(&(l.i, l.j))
        ));
    }
    let csv_path = csv.map(Path::to_path_buf).unwrap_or_else(|| out.with_extension("csv"));
    std::fs::write(&csv_path, text)?;
    print_json(&json!({
        "schema": SCHEMA,
        "word": word.to_string(),
        "valence": m,
        "method": mesh.method,
        "lambda": num(mesh.lambda),
        "residual": num(mesh.residual),
        "edges": edges.len(),
        "cone": to_value(&cone),
        "contained": check.contained,
        "obj": out.display().to_string(),
        "csv": csv_path.display().to_string(),
    }));
    Ok(EXIT_OK)
}

fn verify_paper(
    only: &[usize],
    seed: Option<u64>,
    trials: Option<usize>,
    no_budgets: bool,
    inject: Option<&str>,
    cfg: &AnalysisConfig,
) -> Result<u8, Error> {
    let mut opts = SuiteOptions { config: cfg.clone(), enforce_budgets: !no_budgets, ..SuiteOptions::default() };
    if let Some(s) = seed {
        opts.seed = s;
    }
    if let Some(t) = trials {
        opts.property_trials = t;
    }
    if let Some(r) = inject {
        opts.expected_r_norm = parse_rational(r)?;
    }
    let ids: Vec<usize> = if only.is_empty() { (1..=CHECKS.len()).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CHECKS.len()) {
        return Err(Error::InvalidParameter(format!("no check {bad}; checks are 1..={}", CHECKS.len())));
    }
    let results: Vec<_> = ids.iter().map(|&id| run_check(id, &opts)).collect();
    let failed = results.iter().filter(|r| !r.passed).count();
    write_stdout(&format!("{}# {} passed, {failed} failed, seed {}\n", tap(&results), results.len() - failed, opts.seed));
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NOT_CERTIFIED })
}

fn run(cli: Cli) -> Result<u8, Error> {
    let cfg = load_config(cli.config.as_deref(), &cli.knobs)?;
    log::debug!("configuration {cfg:?}");
    match cli.command {
        Command::Subdivide { input, word, steps, out } => subdivide(&input, &word, steps, &out),
        Command::Certify { target: CertifyTarget::Regular { word } } => {
            Ok(emit(certify_regular(&parse_word(&word)?)?, &cfg))
        }
        Command::Certify { target: CertifyTarget::Extraordinary { word, valence } } => {
            Ok(emit(certify_extraordinary(&parse_word(&word)?, valence, &cfg)?, &cfg))
        }
        Command::Spectrum { word, valence, csv, dump_matrix } => {
            spectrum(&word, valence, csv.as_deref(), dump_matrix.as_deref(), &cfg)
        }
        Command::Charmap { word, valence, out, csv } => charmap(&word, valence, &out, csv.as_deref(), &cfg),
        Command::VerifyPaper { only, seed, trials, no_budgets, inject_r_norm } => {
            verify_paper(&only, seed, trials, no_budgets, inject_r_norm.as_deref(), &cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or(LOG_ENV, "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", json!({ "schema": SCHEMA, "error": error_kind(&e), "message": e.to_string() }));
            ExitCode::from(exit_for_error(&e))
        }
    }
}
