//! The `cgx` command line: `eval`, `position` and `verify`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error, 3 numerical error.

mod config;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::geom::Body;
use crate::linalg::{matrix_from_rows, matrix_to_rows, orthonormalize};
use crate::positions::{
    isotropic_position, john_decomposition, john_position, lewis_position, lowner_position, minimal_surface_position,
    PositionResult,
};
use crate::quadra::{
    dual_mixed_volume, mean_norm, mean_radius, mean_width, moment_p, section_volume, volume, default_subsphere_rule,
    QuadratureEstimate, SphereRule, SubspaceFrame,
};
use crate::verify::{self, summary_line, BodyParam, CheckRecord, LevyRepresentation, Verdict};

pub use config::{Overrides, RunConfig};
pub use report::{format_table, ReportRecord, SCHEMA_VERSION};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "CGX_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::Parse { .. }
                | Error::InvalidArgument(_)
                | Error::InvalidBody(_)
                | Error::UnknownCheck(_)
                | Error::DimensionMismatch { .. }
                | Error::BadRank { .. }
                | Error::RankOutOfRange { .. }
                | Error::UnsupportedKind { .. }
                | Error::NonConvexPolar(_)
                | Error::NonConvexBody(_) => 2,
                _ => 3,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cgx", version, about = "Convex geometry estimates, positions and verification checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sphere-rule size.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Solver tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// JSONL output file; `verify` also writes a CSV summary beside it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML or JSON config file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the JSON report to stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity of a body.
    Eval(EvalArgs),
    /// Bring a body into a classical position.
    Position(PositionArgs),
    /// Run catalog checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Volume,
    #[value(name = "Mp")]
    Mp,
    #[value(name = "MRp")]
    MRp,
    #[value(name = "Mstar_p")]
    MstarP,
    #[value(name = "LK")]
    Lk,
    Dmv,
    Section,
    Moment,
}

#[derive(Debug, Args)]
pub struct BodyArgs {
    /// Body JSON file, or a corpus name (`ball`, `cube`, `cross`, `lp:3`, ...) with `--dim`.
    #[arg(long)]
    pub body: String,
    /// Dimension for corpus names.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Exponent for `Mp`, `MRp`, `Mstar_p`, `dmv` and `moment`.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Second body for `dmv`.
    #[arg(long)]
    pub body2: Option<String>,
    /// Direction for `moment`, comma separated; `e_1` by default.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Option<Vec<f64>>,
    /// Subspace for `section` as JSON rows spanning it; the first `m` axes by default.
    #[arg(long)]
    pub basis: Option<String>,
    /// Subspace dimension for `section` without `--basis`.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PositionKind {
    Isotropic,
    John,
    Lowner,
    Lewis,
    Minsurf,
}

#[derive(Debug, Args)]
pub struct PositionArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    #[arg(long, value_enum)]
    pub kind: PositionKind,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check id, with or without the `check_` prefix.
    pub check: Option<String>,
    /// Run a suite instead: smoke, identities, sandwich, sections, profiles or full.
    #[arg(long, conflicts_with = "check")]
    pub suite: Option<String>,
    /// List the catalog.
    #[arg(long)]
    pub list: bool,
    /// JSON object merged into the selected parameters.
    #[arg(long)]
    pub params: Option<String>,
    /// `key=value` parameter override; the value is parsed as JSON when possible.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Shorthand for `--set n=N`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Shorthand for `--set p=P`.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
}

/// Parses `args` and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0) {
        // a second call in one process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let dim = match &cli.command {
        Command::Eval(a) => a.body.dim,
        Command::Position(a) => a.body.dim,
        Command::Verify(_) => None,
    };
    let flags = Overrides {
        seed: cli.global.seed,
        samples: cli.global.samples,
        tol: cli.global.tol,
        dim,
        out: cli.global.out.clone(),
    };
    let cfg = RunConfig::resolve(cli.global.config.as_deref(), &flags)?;
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, &cfg, cli.global.json),
        Command::Position(a) => cmd_position(a, &cfg, cli.global.json),
        Command::Verify(a) => cmd_verify(a, &cfg, cli.global.json),
    }
}

/// A JSON file, or a corpus name resolved at `dim`.
pub fn load_body(spec: &str, dim: Option<usize>) -> Result<Body, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
        return Body::from_json(&text).map_err(|e| match e {
            Error::Parse { location, message } => CliError::Usage(format!("{spec}: {location}: {message}")),
            other => CliError::Core(other),
        });
    }
    let n = dim.ok_or_else(|| CliError::Usage(format!("`{spec}` is not a file; corpus names need --dim")))?;
    Ok(BodyParam::named(spec).resolve(n)?)
}

fn emit(report: &ReportRecord, text: &str, cfg: &RunConfig, json: bool) -> Result<(), CliError> {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
    } else {
        print!("{text}");
    }
    if let Some(out) = &cfg.out {
        report::write_jsonl(out, std::slice::from_ref(report))?;
    }
    Ok(())
}

fn estimate_json(e: &QuadratureEstimate) -> Value {
    json!({"value": e.value, "std_error": e.std_error, "samples": e.samples})
}

fn rule_for(n: usize, cfg: &RunConfig) -> Result<SphereRule, CliError> {
    Ok(SphereRule::default_for(n, cfg.samples, cfg.seed)?)
}

fn need_p(a: &EvalArgs) -> Result<f64, CliError> {
    a.p.ok_or_else(|| CliError::Usage(format!("--quantity {:?} needs --p", a.quantity)))
}

fn section_frame(a: &EvalArgs, n: usize) -> Result<SubspaceFrame, CliError> {
    let basis = match (&a.basis, a.m) {
        (Some(text), _) => {
            let rows: Vec<Vec<f64>> =
                serde_json::from_str(text).map_err(|e| CliError::Usage(format!("--basis: {e}")))?;
            let m = matrix_from_rows(&rows)?;
            if m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.ncols() }.into());
            }
            orthonormalize(&m.transpose())
        }
        (None, Some(m)) => DMatrix::<f64>::identity(n, n).columns(0, m.min(n)).into_owned(),
        (None, None) => return Err(CliError::Usage("--quantity section needs --basis or --m".into())),
    };
    Ok(SubspaceFrame::new(basis)?)
}

fn cmd_eval(a: &EvalArgs, cfg: &RunConfig, json: bool) -> Result<i32, CliError> {
    let start = Instant::now();
    let body = load_body(&a.body.body, cfg.dim)?;
    let n = body.dim();
    let rule = rule_for(n, cfg)?;
    let mut extra = Map::new();
    let estimate = match a.quantity {
        Quantity::Volume => volume(&body, &rule)?,
        Quantity::Mp => mean_norm(&body, need_p(a)?, &rule)?,
        Quantity::MRp => mean_radius(&body, need_p(a)?, &rule)?,
        Quantity::MstarP => mean_width(&body, need_p(a)?, &rule)?,
        Quantity::Lk => QuadratureEstimate::exact(crate::positions::isotropic_constant(&body, &rule)?),
        Quantity::Dmv => {
            let spec = a.body2.as_deref().ok_or_else(|| CliError::Usage("--quantity dmv needs --body2".into()))?;
            let other = load_body(spec, Some(n))?;
            extra.insert("body2_hash".into(), other.content_hash().into());
            dual_mixed_volume(&body, &other, need_p(a)?, &rule)?
        }
        Quantity::Section => {
            let frame = section_frame(a, n)?;
            extra.insert("basis".into(), json!(matrix_to_rows(&frame.basis().transpose())));
            let sub = default_subsphere_rule(frame.rank(), cfg.samples.min(1 << 12), cfg.seed ^ 0x5ec7);
            section_volume(&body, &frame, &sub)?
        }
        Quantity::Moment => {
            let theta = a.theta.clone().unwrap_or_else(|| {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                e
            });
            if theta.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: theta.len() }.into());
            }
            extra.insert("theta".into(), json!(theta));
            moment_p(&body, &theta, need_p(a)?, &rule)?
        }
    };
    let qname = a.quantity.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut rec = json!({
        "quantity": qname,
        "body": a.body.body,
        "body_kind": body.kind(),
        "body_hash": body.content_hash(),
        "dim": n,
        "p": a.p,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "estimate": estimate_json(&estimate),
    });
    rec.as_object_mut().expect("object").extend(extra);
    let text = format!(
        "{qname} of {} (n = {n}): {:.8} ± {:.2e}  [N = {}, seed = {}]\n",
        a.body.body, estimate.value, estimate.std_error, estimate.samples, cfg.seed
    );
    let report = ReportRecord::new(&format!("eval {qname}"), cfg, vec![rec], start.elapsed().as_secs_f64());
    emit(&report, &text, cfg, json)?;
    Ok(0)
}

fn position_text(kind: &str, p: &PositionResult, extra: &[(String, String)]) -> String {
    let mut s = format!("{kind} position: {} iterations, residual {:.3e}\nT =\n", p.iterations, p.residual);
    s.push_str(&report::format_matrix(&matrix_to_rows(&p.map)));
    s.push('\n');
    for (k, v) in extra {
        s.push_str(&format!("{k}: {v}\n"));
    }
    s
}

fn cmd_position(a: &PositionArgs, cfg: &RunConfig, json: bool) -> Result<i32, CliError> {
    let start = Instant::now();
    let body = load_body(&a.body.body, cfg.dim)?;
    let n = body.dim();
    let rule = rule_for(n, cfg)?;
    let mut extra: Vec<(String, String)> = Vec::new();
    let mut fields = Map::new();
    let result = match a.kind {
        PositionKind::Isotropic => {
            let rep = isotropic_position(&body, cfg.tol.max(1e-12), cfg.max_iter, &rule)?;
            extra.push(("isotropic_constant".into(), format!("{:.8}", rep.isotropic_constant)));
            fields.insert("isotropic_constant".into(), rep.isotropic_constant.into());
            rep.position
        }
        PositionKind::John => {
            let res = john_position(&body, &rule, cfg.tol)?;
            if let Ok(measure) = res.apply(&body).and_then(|b| john_decomposition(&b, 1e-6)) {
                extra.push(("contacts".into(), measure.atoms.len().to_string()));
                extra.push(("decomposition_residual".into(), format!("{:.3e}", measure.residual())));
                fields.insert("decomposition".into(), serde_json::to_value(&measure).expect("serializes"));
            }
            res
        }
        PositionKind::Lowner => lowner_position(&body, &rule, cfg.tol)?,
        PositionKind::Lewis => {
            let levy = LevyRepresentation::of_body(&body).map_err(|_| {
                CliError::Usage(format!(
                    "lewis position needs an l_p section (lp, ball, ellipsoid, cross, lp_section or a linear image); got {}",
                    body.kind()
                ))
            })?;
            let c: Vec<f64> = levy.atoms.iter().map(|x| x.weight).collect();
            let u: Vec<Vec<f64>> = levy.atoms.iter().map(|x| x.direction.clone()).collect();
            let res = lewis_position(&c, &u, levy.p, cfg.tol, cfg.max_iter.max(500))?;
            extra.push(("p".into(), levy.p.to_string()));
            extra.push(("total_weight".into(), format!("{:.8}", res.weights.iter().sum::<f64>())));
            fields.insert("p".into(), levy.p.into());
            fields.insert("weights".into(), json!(res.weights));
            fields.insert("directions".into(), json!(res.directions));
            fields.insert("alpha".into(), res.alpha.into());
            res.position
        }
        PositionKind::Minsurf => minimal_surface_position(&body, cfg.tol.max(1e-10), cfg.max_iter)?,
    };
    let kind = a.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut rec = json!({
        "kind": kind,
        "body": a.body.body,
        "body_hash": body.content_hash(),
        "dim": n,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "tol": cfg.tol,
        "position": serde_json::to_value(&result).expect("serializes"),
    });
    rec.as_object_mut().expect("object").extend(fields);
    let text = position_text(&kind, &result, &extra);
    let report = ReportRecord::new(&format!("position {kind}"), cfg, vec![rec], start.elapsed().as_secs_f64());
    emit(&report, &text, cfg, json)?;
    Ok(0)
}

fn list_text() -> String {
    let rows: Vec<Vec<String>> = verify::catalog()
        .iter()
        .map(|c| vec![c.id.to_string(), c.suites.join(","), c.summary.to_string()])
        .collect();
    // left-align everything here
    let w0 = rows.iter().map(|r| r[0].len()).max().unwrap_or(0).max(5);
    let w1 = rows.iter().map(|r| r[1].len()).max().unwrap_or(0).max(6);
    let mut s = format!("{:<w0$}  {:<w1$}  summary\n", "check", "suites");
    for r in rows {
        s.push_str(&format!("{:<w0$}  {:<w1$}  {}\n", r[0], r[1], r[2]));
    }
    s
}

/// Parameter overrides from `--params`, `--set`, `--n` and `--p`.
fn overrides(a: &VerifyArgs) -> Result<Map<String, Value>, CliError> {
    let mut map = match &a.params {
        Some(text) => match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(m)) => m,
            Ok(_) => return Err(CliError::Usage("--params must be a JSON object".into())),
            Err(e) => return Err(CliError::Usage(format!("--params: {e}"))),
        },
        None => Map::new(),
    };
    for kv in &a.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.to_string(), value);
    }
    if let Some(n) = a.n {
        map.insert("n".into(), n.into());
    }
    if let Some(p) = a.p {
        map.insert("p".into(), p.into());
    }
    Ok(map)
}

fn same_value(a: &Value, b: &Value) -> bool {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x == y,
        _ => a == b,
    }
}

/// Default cases matching every override; otherwise the first case with the overrides merged in.
pub fn select_cases(id: &str, over: &Map<String, Value>) -> Result<Vec<Value>, CliError> {
    let cases = verify::default_cases(id)?;
    if over.is_empty() {
        return Ok(cases);
    }
    let matching: Vec<Value> = cases
        .iter()
        .filter(|c| over.iter().all(|(k, v)| c.get(k).is_some_and(|cv| same_value(cv, v))))
        .cloned()
        .collect();
    if !matching.is_empty() {
        return Ok(matching);
    }
    let mut base = cases.into_iter().next().unwrap_or_else(|| json!({}));
    if let Value::Object(m) = &mut base {
        for (k, v) in over {
            m.insert(k.clone(), v.clone());
        }
    }
    Ok(vec![base])
}

fn cmd_verify(a: &VerifyArgs, cfg: &RunConfig, json: bool) -> Result<i32, CliError> {
    if a.list {
        let report = ReportRecord::new(
            "verify --list",
            cfg,
            verify::catalog().iter().map(|c| serde_json::to_value(c).expect("serializes")).collect(),
            0.0,
        );
        emit(&report, &list_text(), cfg, json)?;
        return Ok(0);
    }
    let vcfg = cfg.verify_config();
    let start = Instant::now();
    let (command, records) = match (&a.check, &a.suite) {
        (Some(id), _) => {
            let over = overrides(a)?;
            let cases = select_cases(id, &over)?;
            let mut records = Vec::new();
            for c in &cases {
                records.extend(verify::run_check(id, Some(c), &vcfg)?);
            }
            (format!("verify {id}"), records)
        }
        (None, Some(suite)) => {
            if a.params.is_some() || !a.set.is_empty() || a.n.is_some() || a.p.is_some() {
                return Err(CliError::Usage("parameter overrides need a single check id".into()));
            }
            (format!("verify --suite {suite}"), verify::run_suite(suite, &vcfg)?)
        }
        (None, None) => return Err(CliError::Usage("give a check id, --suite NAME or --list".into())),
    };
    let wall = start.elapsed().as_secs_f64();
    let failed = records.iter().filter(|r| r.verdict == Verdict::Fail).count();
    let reported = records.iter().filter(|r| r.verdict == Verdict::ReportOnly).count();
    let mut text: String = records.iter().map(|r| format!("{}\n", summary_line(r))).collect();
    text.push_str(&format!(
        "{} records: {} pass, {failed} fail, {reported} report-only ({wall:.1} s)\n",
        records.len(),
        records.len() - failed - reported
    ));
    let reports: Vec<ReportRecord> = records
        .iter()
        .map(|r| ReportRecord::new(&command, cfg, vec![serde_json::to_value(r).expect("serializes")], r.runtime_ms / 1e3))
        .collect();
    if json {
        for r in &reports {
            println!("{}", serde_json::to_string(r).expect("serializes"));
        }
    } else {
        print!("{text}");
    }
    if let Some(out) = &cfg.out {
        report::write_jsonl(out, &reports)?;
        report::write_csv(&report::csv_path(out), &records)?;
    }
    Ok(if failed > 0 { 1 } else { 0 })
}

/// Records of one check, for library callers mirroring `cgx verify ID`.
pub fn verify_records(id: &str, over: &Map<String, Value>, cfg: &RunConfig) -> Result<Vec<CheckRecord>, CliError> {
    let vcfg = cfg.verify_config();
    let mut out = Vec::new();
    for c in select_cases(id, over)? {
        out.extend(verify::run_check(id, Some(&c), &vcfg)?);
    }
    Ok(out)
}
