use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::Body;
use crate::linalg::{matrix_from_rows, random_direction, rng};
use crate::positions::isotropic_constant;
use crate::quadra::{ball_volume, circumradius_inradius, mean_norm, mean_radius, RadialProfile, SphereRule};

use super::corpus::{isotropic_at_volume, rule, BodyParam};
use super::{parse_params, spread, CheckRecord, Estimator, RecordBuilder, VerifyConfig};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct PsiParams {
    n: usize,
    k: BodyParam,
    /// Unit direction in the positioned frame; `e_1` when absent.
    direction: Option<Vec<f64>>,
    p_grid: Vec<f64>,
}

impl Default for PsiParams {
    fn default() -> Self {
        Self { n: 3, k: BodyParam::named("cube"), direction: None, p_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0, 6.0] }
    }
}

pub(crate) fn psi_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "k": "ball"}),
        json!({"n": 3, "k": "cube"}),
        json!({"n": 3, "k": "cross"}),
        json!({"n": 4, "k": "cross", "p_grid": [0.5, 1.0, 2.0, 4.0, 8.0]}),
        json!({"n": 4, "k": "lp:3"}),
    ]
}

/// `(∫_K |<x, theta>|^p)^{1/p} / L_K` for isotropic `K` of volume one.
pub(crate) fn psi_profile(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: PsiParams = parse_params("psi_profile", v)?;
    let n = prm.n;
    if prm.p_grid.iter().any(|p| !(*p > 0.0 && *p <= 2.0 * n as f64)) {
        return Err(Error::InvalidArgument(format!("p_grid must lie in (0, {}]", 2 * n)));
    }
    let theta = match &prm.direction {
        Some(d) => {
            let len = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if d.len() != n || !(len > 0.0) {
                return Err(Error::InvalidArgument("direction must be a nonzero vector of length n".into()));
            }
            d.iter().map(|x| x / len).collect()
        }
        None => {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        }
    };
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_at_volume(&prm.k.resolve(n)?, &r, 1.0)?;
    let profile = RadialProfile::new(&k, &r)?;
    let mut rec = RecordBuilder::new("psi_profile", &prm, cfg);
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    let (mut growth, mut lo, mut hi) = (0.0_f64, f64::INFINITY, 0.0_f64);
    for &p in &prm.p_grid {
        let m = profile.moment(&theta, p)?;
        let ratio = m.value / lk;
        rec.estimate(&format!("moment_{p}"), m, Estimator::SphereQuadrature);
        rec.value(&format!("ratio_{p}"), ratio, Estimator::Derived);
        if p >= 1.0 {
            growth = growth.max(ratio / p);
        } else {
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    rec.upper("growth_over_p", growth, 3.0);
    if hi > 0.0 {
        rec.lower("small_p_min", lo, 0.3);
        rec.upper("small_p_max", hi, 3.0);
    }
    Ok(rec.finish())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct BodyCase {
    n: usize,
    k: BodyParam,
}

pub(crate) fn santalo_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "k": "ball"}),
        json!({"n": 4, "k": "cube"}),
        json!({"n": 4, "k": "cross"}),
        json!({"n": 4, "k": "ellipsoid"}),
        json!({"n": 3, "k": "lp:3"}),
        json!({"n": 5, "k": "sheared_cube"}),
    ]
}

/// `s = Vol K Vol K° / Vol(D_n)^2` on one rule.
pub(crate) fn santalo(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: BodyCase = parse_params("santalo", v)?;
    let n = prm.n;
    let k = prm.k.resolve(n)?;
    let kp = k.polar()?;
    let r = rule(n, cfg.samples, cfg.seed)?;
    // Vol K Vol K° / Vol D^2 = E[rho_K^n] E[h_K^{-n}]
    let a = RadialProfile::new(&k, &r)?.volume();
    let b = RadialProfile::new(&kp, &r)?.volume();
    let s = a.value * b.value / ball_volume(n).powi(2);
    let rel = a.relative_error() + b.relative_error();
    let mut rec = RecordBuilder::new("santalo", &prm, cfg);
    rec.param("body_hash", k.content_hash());
    rec.estimate("volume", a, Estimator::SphereQuadrature);
    rec.estimate("polar_volume", b, Estimator::SphereQuadrature);
    rec.value("santalo_product", s, Estimator::Derived);
    rec.value("relative_error", rel, Estimator::Derived);
    rec.upper("product_over_tolerance", s / (1.0 + 3.0 * rel), 1.0);
    rec.lower("product_root", s.powf(1.0 / n as f64), 0.5);
    Ok(rec.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub(crate) enum PolytopeKind {
    Facets,
    Vertices,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct PolytopeParams {
    n: usize,
    m_list: Vec<usize>,
    trials: usize,
    kind: PolytopeKind,
    /// Sphere-rule size per polytope; vertex polytopes need an LP per direction.
    rule_samples: usize,
}

impl Default for PolytopeParams {
    fn default() -> Self {
        Self { n: 4, m_list: vec![8, 16, 32], trials: 20, kind: PolytopeKind::Facets, rule_samples: 4096 }
    }
}

pub(crate) fn polytope_cases() -> Vec<Value> {
    vec![
        json!({"n": 4, "m_list": [8, 16, 32], "trials": 20, "kind": "facets"}),
        json!({"n": 4, "m_list": [8, 16, 32], "trials": 20, "kind": "vertices", "rule_samples": 2048}),
    ]
}

const RETRIES: usize = 10;

/// `m` seeded unit vectors spanning `R^n`, redrawn up to [`RETRIES`] times.
fn spanning_directions<R: rand::Rng>(n: usize, m: usize, g: &mut R, retries: &mut usize) -> Result<Vec<Vec<f64>>> {
    for _ in 0..=RETRIES {
        let rows: Vec<Vec<f64>> = (0..m).map(|_| random_direction(g, n).iter().copied().collect()).collect();
        let sv = matrix_from_rows(&rows)?.singular_values();
        if sv.min() > 1e-6 * sv.max() {
            return Ok(rows);
        }
        *retries += 1;
    }
    Err(Error::DegeneratePolytope { retries: RETRIES })
}

fn polytope_constant(kind: PolytopeKind, rows: Vec<Vec<f64>>, r: &SphereRule) -> Result<f64> {
    let body = match kind {
        PolytopeKind::Facets => Body::h_polytope(rows)?,
        PolytopeKind::Vertices => Body::v_polytope(rows)?,
    };
    isotropic_constant(&body, r)
}

/// `max_trials L_P / sqrt(log(1+m))` (facets) or `/ log(1+m)` (vertices) across `m`.
pub(crate) fn polytope_sweep(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: PolytopeParams = parse_params("polytope_sweep", v)?;
    let n = prm.n;
    if n > 6 || prm.m_list.iter().any(|m| *m < n || *m > 64) || prm.trials == 0 || prm.m_list.is_empty() {
        return Err(Error::InvalidArgument("polytope sweep needs n <= 6, n <= m <= 64 and trials >= 1".into()));
    }
    let r = rule(n, prm.rule_samples, cfg.seed)?;
    let mut rec = RecordBuilder::new("polytope_sweep", &prm, cfg);
    let mut normalized = Vec::with_capacity(prm.m_list.len());
    let mut retries = 0;
    for (idx, &m) in prm.m_list.iter().enumerate() {
        let mut g = rng(cfg.seed, 500 + idx as u64);
        let mut samples = Vec::with_capacity(prm.trials);
        for _ in 0..prm.trials {
            samples.push(spanning_directions(n, m, &mut g, &mut retries)?);
        }
        let values: Vec<f64> = {
            use rayon::prelude::*;
            samples.into_par_iter().map(|rows| polytope_constant(prm.kind, rows, &r)).collect::<Result<_>>()?
        };
        let max = values.iter().copied().fold(0.0, f64::max);
        let lg = (1.0 + m as f64).ln();
        let norm = match prm.kind {
            PolytopeKind::Facets => max / lg.sqrt(),
            PolytopeKind::Vertices => max / lg,
        };
        rec.value(&format!("max_lk_m{m}"), max, Estimator::SphereQuadrature);
        rec.value(&format!("normalized_m{m}"), norm, Estimator::Derived);
        normalized.push(norm);
    }
    rec.value("degenerate_retries", retries as f64, Estimator::Derived);
    rec.upper("spread", spread(&normalized), cfg.stability_factor);
    Ok(rec.finish())
}

pub(crate) fn kv_cases() -> Vec<Value> {
    let mut v: Vec<Value> = (2..=10).map(|n| json!({"n": n, "k": "unit_cube"})).collect();
    v.push(json!({"n": 4, "k": "ball"}));
    v
}

/// `MR_1 M`, `k(K) = n (M / b)^2` and the mean-radius growth for the volume-one cube.
pub(crate) fn kv_meanradius(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: BodyCase = parse_params("kv_meanradius", v)?;
    let n = prm.n;
    let nf = n as f64;
    let k = prm.k.resolve(n)?;
    let r = rule(n, cfg.samples, cfg.seed)?;
    let m = mean_norm(&k, 1.0, &r)?;
    let mr = mean_radius(&k, 1.0, &r)?;
    let b = circumradius_inradius(&k, &r)?.b();
    let kk = nf * (m.value / b).powi(2);
    let lg = (1.0 + nf).ln();
    let mut rec = RecordBuilder::new("kv_meanradius", &prm, cfg);
    rec.estimate("mean_norm", m, Estimator::SphereQuadrature);
    rec.estimate("mean_radius", mr, Estimator::SphereQuadrature);
    rec.value("b", b, Estimator::ClosedForm);
    rec.value("k_of_k", kk, Estimator::Derived);
    rec.value("k_over_log", kk / lg, Estimator::Derived);
    rec.window("mean_radius_times_mean_norm", mr.value * m.value, [0.5, 2.0]);
    if matches!(&prm.k, BodyParam::Named(s) if s == "unit_cube") {
        rec.window("k_over_sqrt_log", kk / lg.sqrt(), [0.3, 3.0]);
        rec.window("mean_radius_growth", mr.value * lg.sqrt() / nf.sqrt(), [0.4, 3.0]);
    }
    Ok(rec.finish())
}

pub(crate) fn bobkov_nazarov_cases() -> Vec<Value> {
    vec![
        json!({"n": 4, "k": "unit_cube"}),
        json!({"n": 4, "k": "ball"}),
        json!({"n": 4, "k": "cross"}),
        json!({"n": 4, "k": "lp:4"}),
        json!({"n": 3, "k": "box_sum"}),
    ]
}

/// `min rho_K / rho_{Q_n}` and `min rho_{P_n} / rho_K` for isotropic `K` of volume one,
/// with `P_n` the `l_1` ball of volume one.
pub(crate) fn bobkov_nazarov(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: BodyCase = parse_params("bobkov_nazarov", v)?;
    let n = prm.n;
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_at_volume(&prm.k.resolve(n)?, &r, 1.0)?;
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    let q = Body::unit_volume_cube(n);
    let p = Body::cross_polytope(n, factorial.powf(1.0 / n as f64) / 2.0);
    let rk = RadialProfile::new(&k, &r)?;
    let rq = RadialProfile::new(&q, &r)?;
    let rp = RadialProfile::new(&p, &r)?;
    let inner = rk.rho().iter().zip(rq.rho()).map(|(a, b)| a / b).fold(f64::INFINITY, f64::min);
    let outer = rp.rho().iter().zip(rk.rho()).map(|(a, b)| a / b).fold(f64::INFINITY, f64::min);
    let mut rec = RecordBuilder::new("bobkov_nazarov", &prm, cfg);
    rec.report_only();
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    rec.value("inner_ratio", inner, Estimator::SphereQuadrature);
    rec.value("outer_ratio", outer, Estimator::SphereQuadrature);
    Ok(rec.finish())
}
