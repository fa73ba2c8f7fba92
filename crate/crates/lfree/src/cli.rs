//! Command-line front end: every operation as a reproducible, seeded batch
//! run emitting JSON (authoritative) or CSV (a per-trial projection).
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a mathematical
//! assertion or calibrated bound failed. The split lets CI distinguish
//! "you typed it wrong" from "the math check did not hold".

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faer::c64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::calibration::{self, CalibrationError};
use crate::closedform::{self, ClosedFormError};
use crate::constructions::{
    build_paving, dilate, dilation_sum_bound_check, paving_norms, sharpness_experiment,
    ConstructionError,
};
use crate::moments::{
    kesten_lower_bound, kesten_moment, parse_gauss_rational, Convolver, GaussRational,
    MomentError, MomentRecord, DEFAULT_SUPPORT_CAP,
};
use crate::report::{
    pass_fraction, run_trials, summarize, ExperimentReport, Targets, TrialRecord,
};
use crate::rmt::{
    lfree_defect, sample_contraction, sample_projection, DefectOptions, DenseOperator, RmtError,
    RngSpec, Trace,
};
use crate::words::{
    leinert_bounded, leinert_exact, parse_word_list, GroupPresentation, WordError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Rmt(#[from] RmtError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    BadFlag(String),
    #[error("csv output is only defined for sampled experiment commands (dilate, pave, sharpness, qpq); {command} reports are symbolic")]
    CsvUnsupported { command: &'static str },
    #[error("internal consistency check failed: {0}")]
    MathAssertion(String),
}

impl CliError {
    /// 1 for usage and input problems, 2 for failed mathematical checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MathAssertion(_) => EXIT_ASSERTION,
            CliError::Moment(MomentError::NotPositive { .. }) => EXIT_ASSERTION,
            CliError::Construction(e) => match e {
                ConstructionError::UnitarityFailure { .. }
                | ConstructionError::AveragingIdentityBroken { .. }
                | ConstructionError::PartitionBroken { .. }
                | ConstructionError::NotSelfAdjoint { .. }
                | ConstructionError::NotPositive { .. } => EXIT_ASSERTION,
                _ => EXIT_USAGE,
            },
            CliError::Rmt(RmtError::Eigen(_)) => EXIT_ASSERTION,
            _ => EXIT_USAGE,
        }
    }
}

/// A fully resolved run: subcommand plus the flags shared by every command.
#[derive(Debug, Parser)]
#[command(
    name = "lfree",
    version,
    about = "Word norms, Leinert checks, and random-matrix paving experiments"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Base seed; trial t uses the derived substream t.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Number of trials for sampled experiment commands.
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: u32,
    /// Report destination; stdout when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit the timestamp so identical runs emit identical bytes.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a word list is a Leinert set.
    Leinert(LeinertArgs),
    /// Exact word-level moments of L*L and the norm lower bounds they give.
    Moment(MomentArgs),
    /// Best certified norm lower bound, with a formula ceiling when one
    /// applies.
    NormBound(MomentArgs),
    /// Evaluate one of the closed-form norm formulas.
    ClosedForm(ClosedFormArgs),
    /// Dilate sampled contractions to unitaries and check the sum bounds.
    Dilate(DilateArgs),
    /// Pave sampled contractions and compare against the optimal bound.
    Pave(PaveArgs),
    /// Pave a trace-zero symmetry with chosen block traces.
    Sharpness(SharpnessArgs),
    /// Norm of q p q for independently rotated projections.
    Qpq(QpqArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Leinert(_) => "leinert",
            Command::Moment(_) => "moment",
            Command::NormBound(_) => "norm-bound",
            Command::ClosedForm(_) => "closed-form",
            Command::Dilate(_) => "dilate",
            Command::Pave(_) => "pave",
            Command::Sharpness(_) => "sharpness",
            Command::Qpq(_) => "qpq",
        }
    }
}

#[derive(Debug, Args)]
pub struct LeinertArgs {
    /// Group presentation, e.g. "Z,Z" or "Z,C2"; must match the word-list
    /// header when both are given.
    #[arg(long)]
    pub group: Option<String>,
    /// Word-list file (one word per line, `group:` header).
    #[arg(long)]
    pub words: PathBuf,
    #[arg(long, value_enum, default_value_t = LeinertMode::Exact)]
    pub mode: LeinertMode,
    /// Witness search depth in letter pairs (bounded mode).
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LeinertMode {
    Exact,
    Bounded,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    /// Group presentation; required consistent with --laplacian or the
    /// word-list header.
    #[arg(long)]
    pub group: Option<String>,
    /// Use the degree-2k walk operator on the free group of rank k.
    #[arg(long, conflicts_with = "words")]
    pub laplacian: Option<usize>,
    /// Weighted word-list file defining the operator.
    #[arg(long)]
    pub words: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub max_m: u32,
    /// State-support ceiling for the generic convolution engine.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_CAP)]
    pub support_cap: usize,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    #[arg(long, value_enum)]
    pub formula: Formula,
    /// Free rank, for --formula kesten.
    #[arg(long)]
    pub k: Option<usize>,
    /// Set or block count, for leinert / coefficient / paving-bound.
    #[arg(long)]
    pub n: Option<usize>,
    /// Projection trace, e.g. "1/2" or "0.5".
    #[arg(long)]
    pub tau_p: Option<String>,
    #[arg(long)]
    pub tau_q: Option<String>,
    /// Paving accuracy target in (0, 2].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma-separated complex coefficients, e.g. "1/2,-1/2i,1/4+1/4i".
    #[arg(long)]
    pub alphas: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Kesten,
    Leinert,
    Coefficient,
    Qpq,
    Qvq,
    PavingBound,
    PavingSize,
}

#[derive(Debug, Args)]
pub struct DilateArgs {
    /// Number of contractions (at least 2: the sum bounds are vacuous for a
    /// single operator).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Base dimension of the sampled contractions.
    #[arg(long, default_value_t = 64)]
    pub d: usize,
    /// Defect scan length over the dilated unitaries.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
    /// Deviation allowed on the sum-norm targets; calibrated default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Weights for the weighted sum bound; defaults to 1/sqrt(n) each.
    #[arg(long)]
    pub alphas: Option<String>,
}

#[derive(Debug, Args)]
pub struct PaveArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 400)]
    pub d: usize,
    /// Simultaneous targets paved by one shared partition.
    #[arg(long, default_value_t = 1)]
    pub targets: usize,
    /// One-sided allowance above 2 sqrt(n-1)/n; calibrated default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also scan the conjugation orbit of the first target for L-freeness.
    #[arg(long)]
    pub orbit_max_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 600)]
    pub d: usize,
    /// Comma-separated block traces summing to 1, e.g. "1/2,1/4,1/4".
    #[arg(long, default_value = "1/3,1/3,1/3")]
    pub traces: String,
}

#[derive(Debug, Args)]
pub struct QpqArgs {
    #[arg(long, default_value = "1/2")]
    pub tau_p: String,
    #[arg(long, default_value = "1/3")]
    pub tau_q: String,
    #[arg(long, default_value_t = 600)]
    pub d: usize,
    /// Deviation allowed from the formula value; calibrated default.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Rendered report plus the exit code it implies.
#[derive(Debug)]
pub struct RunOutput {
    pub body: String,
    pub exit_code: i32,
}

/// Parses argv, runs, writes the report, returns the process exit code.
pub fn main() -> i32 {
    // Clap's default exit code for usage errors is 2, which is reserved here
    // for failed math checks; remap parse failures to 1.
    let config = match RunConfig::try_parse() {
        Ok(config) => config,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(out) => {
            if let Some(path) = &config.output {
                if let Err(source) = std::fs::write(path, &out.body) {
                    eprintln!("error: cannot write {}: {source}", path.display());
                    return EXIT_USAGE;
                }
            } else {
                print!("{}", out.body);
            }
            out.exit_code
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// Runs one config to a rendered report. Pure given the config and any
/// referenced files, so identical inputs give identical bytes (set
/// `no_timestamp` to compare runs).
pub fn execute(config: &RunConfig) -> Result<RunOutput, CliError> {
    if config.trials < 1 {
        return Err(CliError::BadFlag("--trials must be at least 1".into()));
    }
    match &config.command {
        Command::Leinert(args) => run_leinert(config, args),
        Command::Moment(args) => run_moment(config, args, true),
        Command::NormBound(args) => run_moment(config, args, false),
        Command::ClosedForm(args) => run_closed_form(config, args),
        Command::Dilate(args) => run_dilate(config, args),
        Command::Pave(args) => run_pave(config, args),
        Command::Sharpness(args) => run_sharpness(config, args),
        Command::Qpq(args) => run_qpq(config, args),
    }
}

fn require_json(config: &RunConfig) -> Result<(), CliError> {
    if config.format == Format::Csv {
        return Err(CliError::CsvUnsupported { command: config.command.name() });
    }
    Ok(())
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn envelope(config: &RunConfig, mut body: serde_json::Map<String, Value>) -> String {
    body.insert("command".into(), json!(config.command.name()));
    body.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if !config.no_timestamp {
        body.insert("timestamp".into(), json!(crate::report::unix_timestamp()));
    }
    let mut text =
        serde_json::to_string_pretty(&Value::Object(body)).expect("report serializes");
    text.push('\n');
    text
}

/// Parses "p/q", "k", or a short decimal into an exact rational trace.
fn parse_trace(text: &str) -> Result<Trace, CliError> {
    let bad = || CliError::BadFlag(format!("cannot parse '{text}' as a rational trace"));
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Trace::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.len() > 9 || frac.is_empty() {
            return Err(bad());
        }
        let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
        let digits: u64 = frac.parse().map_err(|_| bad())?;
        let scale = 10u64.pow(frac.len() as u32);
        return Ok(Trace::new(whole * scale + digits, scale));
    }
    let whole: u64 = s.parse().map_err(|_| bad())?;
    Ok(Trace::from_integer(whole))
}

fn trace_to_f64(t: Trace) -> f64 {
    *t.numer() as f64 / *t.denom() as f64
}

fn parse_traces(text: &str) -> Result<Vec<Trace>, CliError> {
    text.split(',').map(parse_trace).collect()
}

fn gauss_to_c64(value: &GaussRational) -> Result<c64, CliError> {
    let convert = |r: &num_rational::BigRational| {
        r.to_f64().ok_or_else(|| CliError::BadFlag("coefficient overflows f64".into()))
    };
    Ok(c64::new(convert(&value.re)?, convert(&value.im)?))
}

fn parse_alphas(text: &str) -> Result<Vec<c64>, CliError> {
    text.split(',')
        .map(|tok| gauss_to_c64(&parse_gauss_rational(tok)?))
        .collect()
}

fn load_group(
    flag: &Option<String>,
    header: Option<&GroupPresentation>,
) -> Result<GroupPresentation, CliError> {
    let from_flag = flag.as_deref().map(GroupPresentation::parse).transpose()?;
    match (from_flag, header) {
        (Some(a), Some(b)) => {
            if &a != b {
                return Err(CliError::BadFlag(format!(
                    "--group {} conflicts with the word-list header {}",
                    a.spec_string(),
                    b.spec_string()
                )));
            }
            Ok(a)
        }
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(b.clone()),
        (None, None) => Err(CliError::BadFlag("no group given and none in the file".into())),
    }
}

fn run_leinert(config: &RunConfig, args: &LeinertArgs) -> Result<RunOutput, CliError> {
    require_json(config)?;
    let list = parse_word_list(&read_file(&args.words)?)?;
    let pres = load_group(&args.group, Some(&list.presentation))?;
    if list.has_coefficients() {
        return Err(CliError::BadFlag(
            "leinert takes a plain word list; coefficients belong to moment/norm-bound".into(),
        ));
    }
    let words = list.words();
    let verdict = match args.mode {
        LeinertMode::Exact => leinert_exact(&words, &pres)?,
        LeinertMode::Bounded => leinert_bounded(&words, &pres, args.depth)?,
    };
    let mut body = serde_json::Map::new();
    body.insert(
        "params".into(),
        json!({
            "group": pres.spec_string(),
            "words": args.words.display().to_string(),
            "mode": match args.mode { LeinertMode::Exact => "exact", LeinertMode::Bounded => "bounded" },
            "depth": args.depth,
        }),
    );
    body.insert("provenance".into(), json!("exact"));
    body.insert(
        "words".into(),
        json!(words.iter().map(|w| pres.render_token(w)).collect::<Vec<_>>()),
    );
    body.insert("verdict".into(), serde_json::to_value(&verdict).expect("verdict serializes"));
    Ok(RunOutput { body: envelope(config, body), exit_code: EXIT_OK })
}

fn moment_rows(records: &[MomentRecord]) -> Value {
    json!(records
        .iter()
        .map(|r| {
            json!({
                "m": r.m,
                "moment": r.value.display_string(),
                "lower_bound": r.lower_bound,
            })
        })
        .collect::<Vec<_>>())
}

fn run_moment(
    config: &RunConfig,
    args: &MomentArgs,
    include_rows: bool,
) -> Result<RunOutput, CliError> {
    require_json(config)?;
    if args.max_m < 1 {
        return Err(CliError::BadFlag("--max-m must be at least 1".into()));
    }
    let mut body = serde_json::Map::new();
    let mut params = serde_json::Map::new();
    params.insert("max_m".into(), json!(args.max_m));

    let records: Vec<MomentRecord>;
    let mut upper: Option<(f64, &'static str)> = None;
    let mut notes: Vec<String> = Vec::new();

    match (&args.laplacian, &args.words) {
        (Some(k), None) => {
            let k = *k;
            if k < 1 {
                return Err(CliError::BadFlag("--laplacian needs rank at least 1".into()));
            }
            let pres = load_group(&args.group, Some(&GroupPresentation::free(k)))
                .map_err(|_| CliError::BadFlag(format!(
                    "--laplacian {k} works on the free group of rank {k}; drop --group or pass the matching presentation"
                )))?;
            params.insert("group".into(), json!(pres.spec_string()));
            params.insert("laplacian".into(), json!(k));
            // Radial walk recursion: exact counts without enumerating states.
            records = (1..=args.max_m)
                .map(|m| {
                    let count = kesten_moment(k, m);
                    MomentRecord {
                        m,
                        value: crate::moments::MomentValue::Exact(
                            num_rational::BigRational::from_integer(count.into()),
                        ),
                        lower_bound: kesten_lower_bound(k, m),
                    }
                })
                .collect();
            upper = Some((closedform::kesten_norm(k)?, "kesten"));
        }
        (None, Some(path)) => {
            let list = parse_word_list(&read_file(path)?)?;
            let pres = load_group(&args.group, Some(&list.presentation))?;
            params.insert("group".into(), json!(pres.spec_string()));
            params.insert("words".into(), json!(path.display().to_string()));
            params.insert("support_cap".into(), json!(args.support_cap));
            let mut terms = Vec::with_capacity(list.entries.len());
            for entry in &list.entries {
                let coefficient = match &entry.coefficient {
                    Some(text) => parse_gauss_rational(text)?,
                    None => parse_gauss_rational("1")?,
                };
                terms.push((entry.word.clone(), coefficient));
            }
            let convolver = Convolver::new(pres.clone(), terms)?;
            records = convolver.moments_up_to(args.max_m, args.support_cap)?;

            // A certified Leinert set caps the norm of an unweighted sum at
            // 2 sqrt(n-1); weighted sums use the coefficient bound.
            let n = list.entries.len();
            if pres.is_free_group() && n >= 2 {
                let words = list.words();
                if let Ok(verdict) = leinert_exact(&words, &pres) {
                    if verdict.status == crate::words::LeinertStatus::Leinert {
                        if list.has_coefficients() {
                            let alphas: Vec<c64> = list
                                .entries
                                .iter()
                                .map(|e| match &e.coefficient {
                                    Some(t) => gauss_to_c64(&parse_gauss_rational(t)?),
                                    None => Ok(c64::new(1.0, 0.0)),
                                })
                                .collect::<Result<_, CliError>>()?;
                            upper = Some((
                                closedform::coefficient_bound(n, &alphas)?,
                                "coefficient",
                            ));
                        } else {
                            upper = Some((closedform::leinert_norm(n)?.value, "leinert"));
                        }
                        notes.push("word set certified Leinert; formula ceiling applies".into());
                    } else {
                        notes.push("word set is not Leinert; no formula ceiling".into());
                    }
                }
            }
        }
        _ => {
            return Err(CliError::BadFlag(
                "give exactly one operator source: --laplacian K or --words FILE".into(),
            ));
        }
    }

    let best = records
        .iter()
        .max_by(|a, b| a.lower_bound.partial_cmp(&b.lower_bound).expect("finite bounds"))
        .expect("max_m >= 1");
    // Certified lower bounds can never exceed an applicable ceiling.
    if let Some((ceiling, formula)) = upper {
        if best.lower_bound > ceiling + 1e-9 {
            return Err(CliError::MathAssertion(format!(
                "lower bound {} exceeds the {formula} ceiling {ceiling}",
                best.lower_bound
            )));
        }
    }

    body.insert("params".into(), Value::Object(params));
    body.insert("provenance".into(), json!("exact"));
    if include_rows {
        body.insert("rows".into(), moment_rows(&records));
    }
    body.insert(
        "best_bound".into(),
        json!({ "value": best.lower_bound, "m": best.m, "provenance": "exact" }),
    );
    if let Some((ceiling, formula)) = upper {
        body.insert(
            "ceiling".into(),
            json!({ "value": ceiling, "formula": formula, "provenance": "float" }),
        );
    }
    if !notes.is_empty() {
        body.insert("notes".into(), json!(notes));
    }
    Ok(RunOutput { body: envelope(config, body), exit_code: EXIT_OK })
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::BadFlag(format!("this formula needs {flag}")))
}

fn run_closed_form(config: &RunConfig, args: &ClosedFormArgs) -> Result<RunOutput, CliError> {
    require_json(config)?;
    let mut params = serde_json::Map::new();
    let mut extras = serde_json::Map::new();
    let value: f64;
    let formula_name: &str;
    match args.formula {
        Formula::Kesten => {
            formula_name = "kesten";
            let k = need(args.k, "--k")?;
            params.insert("k".into(), json!(k));
            value = closedform::kesten_norm(k)?;
        }
        Formula::Leinert => {
            formula_name = "leinert";
            let n = need(args.n, "--n")?;
            params.insert("n".into(), json!(n));
            let result = closedform::leinert_norm(n)?;
            value = result.value;
            extras.insert("vacuous".into(), json!(result.vacuous));
        }
        Formula::Coefficient => {
            formula_name = "coefficient";
            let n = need(args.n, "--n")?;
            let text = args
                .alphas
                .as_deref()
                .ok_or_else(|| CliError::BadFlag("this formula needs --alphas".into()))?;
            let alphas = parse_alphas(text)?;
            params.insert("n".into(), json!(n));
            params.insert("alphas".into(), json!(text));
            value = closedform::coefficient_bound(n, &alphas)?;
        }
        Formula::Qpq => {
            formula_name = "qpq";
            let tau_p = parse_trace(need(args.tau_p.as_deref(), "--tau-p")?)?;
            let tau_q = parse_trace(need(args.tau_q.as_deref(), "--tau-q")?)?;
            params.insert("tau_p".into(), json!(tau_p.to_string()));
            params.insert("tau_q".into(), json!(tau_q.to_string()));
            value = closedform::qpq_norm(trace_to_f64(tau_p), trace_to_f64(tau_q))?;
        }
        Formula::Qvq => {
            formula_name = "qvq";
            let tau_q = parse_trace(need(args.tau_q.as_deref(), "--tau-q")?)?;
            params.insert("tau_q".into(), json!(tau_q.to_string()));
            value = closedform::qvq_norm(trace_to_f64(tau_q))?;
        }
        Formula::PavingBound => {
            formula_name = "paving-bound";
            let n = need(args.n, "--n")?;
            params.insert("n".into(), json!(n));
            let result = closedform::paving_norm_bound(n)?;
            value = result.bound;
            extras.insert("vacuous".into(), json!(result.vacuous));
        }
        Formula::PavingSize => {
            formula_name = "paving-size";
            let epsilon = need(args.epsilon, "--epsilon")?;
            params.insert("epsilon".into(), json!(epsilon));
            let result = closedform::paving_size(epsilon)?;
            value = result.n as f64;
            extras.insert("n".into(), json!(result.n));
            extras.insert("sufficient".into(), json!(result.sufficient));
            extras.insert("necessary".into(), json!(result.necessary));
            extras.insert("vacuous".into(), json!(result.vacuous));
        }
    }
    params.insert("formula".into(), json!(formula_name));
    let mut body = serde_json::Map::new();
    body.insert("params".into(), Value::Object(params));
    body.insert("value".into(), json!(value));
    body.insert("provenance".into(), json!("float"));
    if !extras.is_empty() {
        body.insert("detail".into(), Value::Object(extras));
    }
    Ok(RunOutput { body: envelope(config, body), exit_code: EXIT_OK })
}

struct ExperimentFrame<'a> {
    config: &'a RunConfig,
    params: Value,
    targets: Targets,
}

impl ExperimentFrame<'_> {
    /// Assembles the report, renders it in the requested format, and maps
    /// the overall verdict to an exit code.
    fn finish(self, records: Vec<TrialRecord>, pass: bool) -> RunOutput {
        let values: Vec<f64> = records.iter().map(|r| r.value).collect();
        let report = ExperimentReport {
            command: self.config.command.name().into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: self.config.seed,
            provenance: format!("sampled(seed={})", self.config.seed),
            params: self.params,
            trials: self.config.trials,
            per_trial: records,
            summary: summarize(&values),
            targets: self.targets,
            pass,
            timestamp: if self.config.no_timestamp {
                None
            } else {
                Some(crate::report::unix_timestamp())
            },
        };
        let body = match self.config.format {
            Format::Json => report.to_json(),
            Format::Csv => report.to_csv(),
        };
        RunOutput { body, exit_code: if pass { EXIT_OK } else { EXIT_ASSERTION } }
    }
}

fn collect_trials(
    results: Vec<Result<TrialRecord, CliError>>,
) -> Result<Vec<TrialRecord>, CliError> {
    let mut records = Vec::with_capacity(results.len());
    for result in results {
        records.push(result?);
    }
    Ok(records)
}

fn run_qpq(config: &RunConfig, args: &QpqArgs) -> Result<RunOutput, CliError> {
    let cal = calibration::load()?;
    let tau_p = parse_trace(&args.tau_p)?;
    let tau_q = parse_trace(&args.tau_q)?;
    let target = closedform::qpq_norm(trace_to_f64(tau_p), trace_to_f64(tau_q))?;
    let tol = args.tol.unwrap_or(cal.qpq.tolerance);
    let base = RngSpec::new(config.seed, 0);

    let results = run_trials(config.trials, |t| -> Result<TrialRecord, CliError> {
        let spec = base.substream(t as u64);
        let p = sample_projection(tau_p, args.d, &spec.substream(0))?;
        let q = sample_projection(tau_q, args.d, &spec.substream(1))?;
        let value = q.mul(&p)?.mul(&q)?.op_norm()?;
        Ok(TrialRecord {
            trial: t,
            stream: spec.stream,
            value,
            pass: (value - target).abs() <= tol,
            extra: BTreeMap::new(),
        })
    });
    let records = collect_trials(results)?;
    let pass = pass_fraction(&records) >= cal.qpq.min_pass_fraction;

    let frame = ExperimentFrame {
        config,
        params: json!({
            "tau_p": tau_p.to_string(),
            "tau_q": tau_q.to_string(),
            "d": args.d,
            "min_pass_fraction": cal.qpq.min_pass_fraction,
        }),
        targets: Targets { target_value: target, tolerance: tol, provenance: "float".into() },
    };
    Ok(frame.finish(records, pass))
}

fn run_pave(config: &RunConfig, args: &PaveArgs) -> Result<RunOutput, CliError> {
    let cal = calibration::load()?;
    if args.targets < 1 {
        return Err(CliError::BadFlag("--targets must be at least 1".into()));
    }
    let bound = closedform::paving_norm_bound(args.n)?.bound;
    let tol = args.tol.unwrap_or(cal.paving.tolerance);
    let base = RngSpec::new(config.seed, 0);

    let results = run_trials(config.trials, |t| -> Result<TrialRecord, CliError> {
        let spec = base.substream(t as u64);
        let first = sample_contraction(args.d, &spec.substream(10));
        let instance = build_paving(args.n, &first, &spec.substream(0))?;
        let mut norms = Vec::with_capacity(args.targets);
        norms.push(paving_norms(&instance)?.compressed);
        for k in 1..args.targets {
            let x = sample_contraction(args.d, &spec.substream(10 + k as u64));
            norms.push(paving_norms(&instance.retarget(&x)?)?.compressed);
        }
        let value = norms.iter().copied().fold(0.0f64, f64::max);
        let mut extra = BTreeMap::new();
        extra.insert("target_norms".into(), json!(norms));
        if let Some(max_len) = args.orbit_max_len {
            let defect = crate::constructions::orbit_lfree_check(&instance, max_len)?;
            extra.insert(
                "orbit_defect".into(),
                serde_json::to_value(&defect).expect("defect serializes"),
            );
        }
        Ok(TrialRecord {
            trial: t,
            stream: spec.stream,
            value,
            pass: value <= bound + tol,
            extra,
        })
    });
    let records = collect_trials(results)?;
    let mut pass = pass_fraction(&records) >= cal.paving.min_pass_fraction;
    let mut params = serde_json::Map::new();
    params.insert("n".into(), json!(args.n));
    params.insert("d".into(), json!(args.d));
    params.insert("targets".into(), json!(args.targets));
    params.insert("orbit_max_len".into(), json!(args.orbit_max_len));
    params.insert("min_pass_fraction".into(), json!(cal.paving.min_pass_fraction));
    if args.orbit_max_len.is_some() {
        let defects: Vec<f64> = records
            .iter()
            .map(|r| {
                r.extra["orbit_defect"]["max_abs_trace"].as_f64().expect("orbit defect recorded")
            })
            .collect();
        let orbit_median = summarize(&defects).median;
        pass = pass && orbit_median <= cal.defect.orbit_median_max;
        params.insert("orbit_defect_median".into(), json!(orbit_median));
        params.insert("orbit_median_max".into(), json!(cal.defect.orbit_median_max));
    }

    let frame = ExperimentFrame {
        config,
        params: Value::Object(params),
        targets: Targets { target_value: bound, tolerance: tol, provenance: "float".into() },
    };
    Ok(frame.finish(records, pass))
}

fn run_dilate(config: &RunConfig, args: &DilateArgs) -> Result<RunOutput, CliError> {
    let cal = calibration::load()?;
    if args.n < 2 {
        return Err(CliError::BadFlag(
            "--n must be at least 2; sum bounds over a single contraction are vacuous".into(),
        ));
    }
    let alphas = match &args.alphas {
        Some(text) => {
            let parsed = parse_alphas(text)?;
            if parsed.len() != args.n {
                return Err(CliError::BadFlag(format!(
                    "--alphas lists {} coefficients for n = {}",
                    parsed.len(),
                    args.n
                )));
            }
            parsed
        }
        None => vec![c64::new(1.0 / (args.n as f64).sqrt(), 0.0); args.n],
    };
    let tol = args.tol.unwrap_or(cal.dilation_sum.tolerance);
    let target = closedform::leinert_norm(args.n)?.value;
    let base = RngSpec::new(config.seed, 0);

    let results = run_trials(config.trials, |t| -> Result<TrialRecord, CliError> {
        let spec = base.substream(t as u64);
        let xs: Vec<DenseOperator> = (0..args.n)
            .map(|i| sample_contraction(args.d, &spec.substream(100 + i as u64)))
            .collect();
        let dilation = dilate(&xs, &spec.substream(0))?;
        let corners_exact =
            (0..args.n).all(|i| dilation.corner(i).exactly_equals(dilation.input(i)));
        let bounds = dilation_sum_bound_check(&dilation, &alphas, tol)?;
        let defect =
            lfree_defect(dilation.unitaries(), args.max_len, &DefectOptions::default())?;
        let mut extra = BTreeMap::new();
        extra.insert("corners_exact".into(), json!(corners_exact));
        extra.insert("unitarity_residual".into(), json!(dilation.unitarity_residual()));
        extra.insert("sum_corner_norm".into(), json!(bounds.sum_corner_norm));
        extra.insert("weighted_unitary_norm".into(), json!(bounds.weighted_unitary_norm));
        extra.insert("weighted_target".into(), json!(bounds.weighted_target));
        extra.insert("defect".into(), json!(defect.max_abs_trace));
        Ok(TrialRecord {
            trial: t,
            stream: spec.stream,
            value: bounds.sum_unitary_norm,
            pass: bounds.pass && corners_exact,
            extra,
        })
    });
    let records = collect_trials(results)?;
    let defects: Vec<f64> = records
        .iter()
        .map(|r| r.extra["defect"].as_f64().expect("defect recorded"))
        .collect();
    let defect_median = summarize(&defects).median;
    let pass = pass_fraction(&records) >= cal.dilation_sum.min_pass_fraction
        && defect_median <= cal.defect.dilation_median_max;

    let frame = ExperimentFrame {
        config,
        params: json!({
            "n": args.n,
            "d": args.d,
            "max_len": args.max_len,
            "defect_median": defect_median,
            "defect_median_max": cal.defect.dilation_median_max,
            "min_pass_fraction": cal.dilation_sum.min_pass_fraction,
        }),
        targets: Targets { target_value: target, tolerance: tol, provenance: "float".into() },
    };
    Ok(frame.finish(records, pass))
}

fn run_sharpness(config: &RunConfig, args: &SharpnessArgs) -> Result<RunOutput, CliError> {
    let cal = calibration::load()?;
    let traces = parse_traces(&args.traces)?;
    let bound = closedform::paving_norm_bound(args.n)?.bound;
    let equal = traces.iter().all(|&t| Some(&t) == traces.first());
    let base = RngSpec::new(config.seed, 0);

    let results = run_trials(config.trials, |t| -> Result<TrialRecord, CliError> {
        let spec = base.substream(t as u64);
        let outcome = sharpness_experiment(args.n, &traces, args.d, &spec)?;
        let value = outcome.paving_norm;
        let pass = if outcome.equal_traces {
            (value - bound).abs() <= cal.sharpness.equal_tolerance
        } else {
            value >= bound + cal.sharpness.unequal_margin
        };
        let blocks: Vec<Value> = outcome
            .blocks
            .iter()
            .map(|b| {
                json!({
                    "trace": b.trace.to_string(),
                    "norm": b.norm,
                    "predicted": b.predicted,
                    "within_band": (b.norm - b.predicted).abs() <= cal.sharpness.block_tolerance,
                })
            })
            .collect();
        let mut extra = BTreeMap::new();
        extra.insert("blocks".into(), json!(blocks));
        Ok(TrialRecord { trial: t, stream: spec.stream, value, pass, extra })
    });
    let records = collect_trials(results)?;
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    let median = summarize(&values).median;
    let pass = if equal {
        (median - bound).abs() <= cal.sharpness.equal_tolerance
    } else {
        median >= bound + cal.sharpness.unequal_margin
    };

    let frame = ExperimentFrame {
        config,
        params: json!({
            "n": args.n,
            "d": args.d,
            "traces": traces.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "equal_traces": equal,
            "comparison": if equal { "median_within_tolerance" } else { "median_exceeds_by_margin" },
        }),
        targets: Targets {
            target_value: bound,
            tolerance: if equal { cal.sharpness.equal_tolerance } else { cal.sharpness.unequal_margin },
            provenance: "float".into(),
        },
    };
    Ok(frame.finish(records, pass))
}
