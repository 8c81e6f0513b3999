//! The check catalog: named, parameterized, seeded verifications that each emit
//! a [`CheckRecord`] with observed quantities, asserted windows and a verdict.

mod corpus;
mod identities;
mod levy;
mod profiles;
mod sandwich;
mod sections;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quadra::QuadratureEstimate;

pub use corpus::{p0, BodyParam};
pub use levy::LevyRepresentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

/// How an observed number was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    SphereQuadrature,
    InteriorSampling,
    GrassmannMonteCarlo,
    ClosedForm,
    Solver,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
    pub estimator: Estimator,
}

/// An asserted window `lower <= value <= upper` (either side optional).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub params: Value,
    pub observed: Vec<Observation>,
    pub bounds: Vec<Bound>,
    pub verdict: Verdict,
    /// Wall time set by the runner; excluded from [`CheckRecord::fingerprint`].
    pub runtime_ms: f64,
}

impl CheckRecord {
    pub fn observation(&self, name: &str) -> Option<f64> {
        self.observed.iter().find(|o| o.name == name).map(|o| o.value)
    }

    pub fn bound(&self, name: &str) -> Option<&Bound> {
        self.bounds.iter().find(|b| b.name == name)
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Canonical JSON with the runtime zeroed, for reproducibility comparisons.
    pub fn fingerprint(&self) -> String {
        let mut copy = self.clone();
        copy.runtime_ms = 0.0;
        serde_json::to_string(&copy).expect("records serialize")
    }
}

/// Settings shared by all checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Sphere-rule size.
    pub samples: usize,
    /// `script L_k`, the assumed maximal isotropic constant in dimension `k`, for every `k`.
    pub script_l: f64,
    /// Default window for unknown universal constants.
    pub window: [f64; 2],
    /// Per-bound overrides keyed `"<check_id>.<bound>"`.
    pub windows: BTreeMap<String, [f64; 2]>,
    /// Allowed max/min spread of a normalized ratio across a sweep.
    pub stability_factor: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1 << 15,
            script_l: 1.0,
            window: [0.1, 5.0],
            windows: BTreeMap::new(),
            stability_factor: 3.0,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 16 {
            return Err(Error::InvalidArgument("samples must be >= 16".into()));
        }
        if !(self.script_l > 0.0) || !(self.stability_factor > 1.0) {
            return Err(Error::InvalidArgument("script_l must be > 0 and stability_factor > 1".into()));
        }
        for (k, w) in std::iter::once((&"window".to_string(), &self.window)).chain(self.windows.iter()) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!("window `{k}` must satisfy lower < upper")));
            }
        }
        Ok(())
    }

    /// Reference type-2 constant of `l_p`: `sqrt(p)` for `p >= 2`, else 1.
    pub fn t2_reference(&self, p: f64) -> f64 {
        if p >= 2.0 {
            p.sqrt()
        } else {
            1.0
        }
    }

    pub(crate) fn window_for(&self, check: &str, bound: &str, default: [f64; 2]) -> [f64; 2] {
        self.windows.get(&format!("{check}.{bound}")).copied().unwrap_or(default)
    }
}

/// Accumulates a record for one check case.
pub(crate) struct RecordBuilder<'a> {
    id: &'static str,
    cfg: &'a VerifyConfig,
    params: Value,
    observed: Vec<Observation>,
    bounds: Vec<Bound>,
    report_only: bool,
}

impl<'a> RecordBuilder<'a> {
    pub(crate) fn new(id: &'static str, params: &impl Serialize, cfg: &'a VerifyConfig) -> Self {
        let mut params = serde_json::to_value(params).expect("params serialize");
        if let Value::Object(map) = &mut params {
            map.insert("seed".into(), cfg.seed.into());
            map.insert("samples".into(), cfg.samples.into());
        }
        Self { id, cfg, params, observed: Vec::new(), bounds: Vec::new(), report_only: false }
    }

    pub(crate) fn report_only(&mut self) {
        self.report_only = true;
    }

    pub(crate) fn param(&mut self, key: &str, value: impl Into<Value>) {
        if let Value::Object(map) = &mut self.params {
            map.insert(key.into(), value.into());
        }
    }

    pub(crate) fn estimate(&mut self, name: &str, e: QuadratureEstimate, estimator: Estimator) {
        self.observed.push(Observation { name: name.into(), value: e.value, std_error: Some(e.std_error), estimator });
    }

    pub(crate) fn value(&mut self, name: &str, v: f64, estimator: Estimator) {
        self.observed.push(Observation { name: name.into(), value: v, std_error: None, estimator });
    }

    pub(crate) fn bound(&mut self, name: &str, value: f64, lower: Option<f64>, upper: Option<f64>) {
        let holds = value.is_finite() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        self.bounds.push(Bound { name: name.into(), value, lower, upper, holds });
    }

    /// Window bound with a configurable override.
    pub(crate) fn window(&mut self, name: &str, value: f64, default: [f64; 2]) {
        let w = self.cfg.window_for(self.id, name, default);
        self.bound(name, value, Some(w[0]), Some(w[1]));
    }

    pub(crate) fn upper(&mut self, name: &str, value: f64, default: f64) {
        let w = self.cfg.window_for(self.id, name, [f64::NEG_INFINITY, default]);
        self.bound(name, value, None, Some(w[1]));
    }

    pub(crate) fn lower(&mut self, name: &str, value: f64, default: f64) {
        let w = self.cfg.window_for(self.id, name, [default, f64::INFINITY]);
        self.bound(name, value, Some(w[0]), None);
    }

    pub(crate) fn finish(self) -> CheckRecord {
        let verdict = if self.report_only {
            Verdict::ReportOnly
        } else if self.bounds.iter().all(|b| b.holds) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckRecord {
            check_id: self.id.into(),
            params: self.params,
            observed: self.observed,
            bounds: self.bounds,
            verdict,
            runtime_ms: 0.0,
        }
    }
}

pub(crate) fn parse_params<P: DeserializeOwned>(id: &str, v: &Value) -> Result<P> {
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidArgument(format!("parameters for `{id}`: {e}")))
}

type RunFn = fn(&Value, &VerifyConfig) -> Result<CheckRecord>;
type CasesFn = fn() -> Vec<Value>;

/// Catalog metadata for one check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub suites: &'static [&'static str],
}

struct Entry {
    info: CheckInfo,
    run: RunFn,
    cases: CasesFn,
}

pub const SUITES: &[&str] = &["smoke", "identities", "sandwich", "sections", "profiles", "full"];

fn entries() -> Vec<Entry> {
    macro_rules! entry {
        ($id:literal, $summary:literal, [$($s:literal),*], $module:ident :: $run:ident, $cases:ident) => {
            Entry {
                info: CheckInfo { id: $id, summary: $summary, suites: &[$($s),*] },
                run: $module::$run,
                cases: $module::$cases,
            }
        };
    }
    vec![
        entry!("avg_sections", "E_nu Vol(A ∩ E) <= min over T of max over E of Vol(TA ∩ E) on G(n, m)",
            ["sections", "full"], sections::avg_sections, avg_sections_cases),
        entry!("bobkov_nazarov", "containment ratios of an unconditional isotropic body between the volume-one cube and l_1 ball",
            ["profiles", "full"], profiles::bobkov_nazarov, bobkov_nazarov_cases),
        entry!("fubini1", "Ṽ_{-p}(L, G) = (n+p)/n sum mu_i ∫_G |<x, theta_i>|^p dx for a Levy representation of L",
            ["smoke", "identities", "full"], identities::fubini1, fubini1_cases),
        entry!("fubini2", "Ṽ_k(L, G) = Vol(D_n)/Vol(D_{n-k}) ∫ Vol(G ∩ E) dmu_L(E) for a Busemann-Petty density body",
            ["identities", "full"], identities::fubini2, fubini2_cases),
        entry!("grinberg_invariance", "(E_nu Vol(A ∩ E)^n)^{1/n} is invariant under SL(n) and maximal for ellipsoids",
            ["sections", "full"], sections::grinberg_invariance, grinberg_cases),
        entry!("kv_meanradius", "MR_1(Q_n) M(Q_n) ~ 1 and k(Q_n) = n (M/b)^2 growth for the volume-one cube",
            ["profiles", "full"], profiles::kv_meanradius, kv_cases),
        entry!("lewis_bound", "after Lewis positioning of an l_p section, a(K) <= n^{1/2 - 1/p}",
            ["sandwich", "full"], sandwich::lewis_bound, lewis_bound_cases),
        entry!("main1_sandwich", "L_K (Ṽ_{-p}(L, D) / Ṽ_{-p}(L, K))^{1/p} within [c/sqrt(p0), C sqrt(p0)] for L a section of L_p",
            ["smoke", "sandwich", "full"], sandwich::main1_sandwich, main1_cases),
        entry!("main2_sandwich", "L_K (Ṽ_k(L, D) / Ṽ_k(L, K))^{1/k} within [c, C script_L_k] for L a k-Busemann-Petty body",
            ["sandwich", "full"], sandwich::main2_sandwich, main2_cases),
        entry!("mean_bounds", "M_p(K) <= C sqrt(p0) for isotropic l_p balls and C/script_L_k <= MR_k(K) <= 1 for the l_1 ball",
            ["sandwich", "full"], sandwich::mean_bounds, mean_bounds_cases),
        entry!("polytope_sweep", "L_P / sqrt(log(1+m)) (2m facets) or L_P / log(1+m) (2m vertices) is stable in m",
            ["profiles", "full"], profiles::polytope_sweep, polytope_cases),
        entry!("psi_profile", "(∫_K |<x, theta>|^p)^{1/p} / L_K grows at most linearly in p and is flat for p < 1",
            ["profiles", "full"], profiles::psi_profile, psi_cases),
        entry!("santalo", "c <= (Vol K Vol K° / Vol(D_n)^2)^{1/n} and Vol K Vol K° <= Vol(D_n)^2",
            ["smoke", "profiles", "full"], profiles::santalo, santalo_cases),
        entry!("theorem1", "L_K M_p(L) / sqrt(p0) <= C for K ⊆ L with L a section of L_p",
            ["smoke", "sandwich", "full"], sandwich::theorem1, theorem1_cases),
        entry!("theorem2", "L_K / (script_L_k MR_k(L)) <= C for K ⊆ L with L a k-Busemann-Petty body",
            ["smoke", "sandwich", "full"], sandwich::theorem2, theorem2_cases),
        entry!("theorem3", "L_K / (sqrt(p0) M*_p(T L)) <= C for K ⊆ L with L a quotient of L_q and T from the Lewis position of L°",
            ["smoke", "sandwich", "full"], sandwich::theorem3, theorem3_cases),
        entry!("theorem4", "L_K MR_k(T L) / script_L_{2k}^2 <= C for L ⊆ K° a k-Busemann-Petty body, k <= n/3",
            ["smoke", "sandwich", "full"], sandwich::theorem4, theorem4_cases),
    ]
}

/// The catalog, sorted by id.
pub fn catalog() -> Vec<CheckInfo> {
    entries().into_iter().map(|e| e.info).collect()
}

fn lookup(id: &str) -> Result<Entry> {
    let id = id.strip_prefix("check_").unwrap_or(id);
    entries().into_iter().find(|e| e.info.id == id).ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

/// Default parameter sets of a check; the smoke suite uses only the first of each.
pub fn default_cases(id: &str) -> Result<Vec<Value>> {
    Ok((lookup(id)?.cases)())
}

/// Runs one check: the given parameters (merged over the defaults), or every default case.
pub fn run_check(id: &str, params: Option<&Value>, cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let entry = lookup(id)?;
    let cases = match params {
        Some(p) => vec![p.clone()],
        None => (entry.cases)(),
    };
    cases.par_iter().map(|c| timed(entry.run, c, cfg)).collect()
}

fn timed(run: RunFn, case: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let start = Instant::now();
    let mut rec = run(case, cfg)?;
    rec.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rec)
}

/// Runs a named suite in parallel; records come back ordered by check id, then case.
pub fn run_suite(suite: &str, cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    if !SUITES.contains(&suite) {
        return Err(Error::UnknownCheck(format!("suite `{suite}`")));
    }
    let mut jobs: Vec<(RunFn, Value)> = Vec::new();
    for e in entries() {
        if !e.info.suites.contains(&suite) {
            continue;
        }
        let cases = (e.cases)();
        let cases = if suite == "smoke" { smoke_cases(cases) } else { cases };
        jobs.extend(cases.into_iter().map(|c| (e.run, c)));
    }
    jobs.par_iter().map(|(run, c)| timed(*run, c, cfg)).collect()
}

/// Ball-only trivial cases for the smoke suite.
fn smoke_cases(cases: Vec<Value>) -> Vec<Value> {
    let ball = |v: &Value| v.to_string().contains("\"ball\"") && !v.to_string().contains("cube");
    let mut picked: Vec<Value> = cases.iter().filter(|c| ball(c)).take(1).cloned().collect();
    if picked.is_empty() {
        picked = cases.into_iter().take(1).collect();
    }
    picked
}

/// Summary line per record: id, verdict and the bound values.
pub fn summary_line(r: &CheckRecord) -> String {
    let bounds: Vec<String> = r
        .bounds
        .iter()
        .map(|b| {
            let lo = b.lower.map_or(String::new(), |l| format!("{} <= ", fmt_value(l)));
            let hi = b.upper.map_or(String::new(), |u| format!(" <= {}", fmt_value(u)));
            format!("{}: {lo}{}{hi}", b.name, fmt_value(b.value))
        })
        .collect();
    let verdict = match r.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::ReportOnly => "report",
    };
    let detail = if bounds.is_empty() {
        r.observed.iter().map(|o| format!("{}={}", o.name, fmt_value(o.value))).collect::<Vec<_>>().join("; ")
    } else {
        bounds.join("; ")
    };
    format!("{:<20} {:<6} {}", r.check_id, verdict, detail)
}

fn fmt_value(v: f64) -> String {
    if v != 0.0 && v.is_finite() && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

/// Max over min of positive values.
pub fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::MIN, f64::max);
    let lo = values.iter().copied().fold(f64::MAX, f64::min);
    hi / lo
}
