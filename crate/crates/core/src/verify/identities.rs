use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::Body;
use crate::quadra::{
    ball_volume, default_subsphere_rule, dual_mixed_volume, grassmann_sample, sample_interior, sample_mean,
    section_volume, volume, QuadratureEstimate, SamplingMethod,
};
use crate::radon::{bp_body_from_density, DensityBodyOptions, GrassmannDensity};

use super::corpus::{rule, BodyParam};
use super::{parse_params, CheckRecord, Estimator, LevyRepresentation, RecordBuilder, VerifyConfig};

/// `|a - b| / (k (SE_a + SE_b) + rel |b|)`; at most 1 when the two agree.
fn agreement(a: &QuadratureEstimate, b: &QuadratureEstimate, k: f64, rel: f64) -> f64 {
    (a.value - b.value).abs() / (k * (a.std_error + b.std_error) + rel * b.value.abs())
}

/// `X Y` with independent relative errors.
fn product(a: QuadratureEstimate, b: QuadratureEstimate) -> QuadratureEstimate {
    let value = a.value * b.value;
    let rel = (a.relative_error().powi(2) + b.relative_error().powi(2)).sqrt();
    QuadratureEstimate { value, std_error: rel * value.abs(), samples: a.samples.min(b.samples) }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Fubini1Params {
    n: usize,
    /// Exponent; required when `levy` is the bare name `lp`.
    p: Option<f64>,
    levy: BodyParam,
    g: BodyParam,
    interior: usize,
}

impl Default for Fubini1Params {
    fn default() -> Self {
        Self { n: 3, p: Some(1.0), levy: BodyParam::named("lp"), g: BodyParam::named("cube"), interior: 40_000 }
    }
}

pub(crate) fn levy_for(param: &BodyParam, p: Option<f64>, n: usize) -> Result<LevyRepresentation> {
    let body = match (param, p) {
        (BodyParam::Named(s), Some(p)) if s == "lp" => Body::lp_ball(n, p, 1.0),
        (BodyParam::Named(s), None) if s == "lp" => {
            return Err(Error::InvalidArgument("`lp` needs an exponent `p`".into()));
        }
        _ => param.resolve(n)?,
    };
    let levy = LevyRepresentation::of_body(&body)?;
    if let Some(p) = p {
        if (levy.p - p).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("body has a Levy exponent {} but p = {p}", levy.p)));
        }
    }
    Ok(levy)
}

pub(crate) fn fubini1_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "p": null, "levy": "ball", "g": "ball"}),
        json!({"n": 3, "p": 1.0, "levy": "lp", "g": "cube"}),
        json!({"n": 4, "p": 3.0, "levy": "lp", "g": "ellipsoid"}),
        json!({"n": 2, "p": 2.0, "levy": "lp", "g": "cross"}),
    ]
}

/// Polar quadrature on one side; interior sampling and an independent volume rule on the other.
pub(crate) fn fubini1(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: Fubini1Params = parse_params("fubini1", v)?;
    let n = prm.n;
    let levy = levy_for(&prm.levy, prm.p, n)?;
    let p = levy.p;
    let l = levy.body()?;
    let g = prm.g.resolve(n)?;
    let mut rec = RecordBuilder::new("fubini1", &prm, cfg);
    rec.param("p_effective", p);
    rec.param("g_hash", g.content_hash());
    let r = rule(n, cfg.samples, cfg.seed)?;
    let lhs = dual_mixed_volume(&l, &g, -p, &r)?;
    let vol = volume(&g, &rule(n, cfg.samples, cfg.seed.wrapping_add(1))?)?;
    let pts = sample_interior(&g, prm.interior, cfg.seed.wrapping_add(2), SamplingMethod::Rejection)?;
    let vals: Vec<f64> = pts.iter().map(|x| levy.gauge_pow(x)).collect();
    let mean = sample_mean(&vals);
    let rhs = product(vol, mean).scale((n as f64 + p) / n as f64);
    rec.estimate("lhs_dual_mixed_volume", lhs, Estimator::SphereQuadrature);
    rec.estimate("rhs_moment_sum", rhs, Estimator::InteriorSampling);
    rec.value("relative_gap", (lhs.value - rhs.value).abs() / rhs.value, Estimator::Derived);
    rec.upper("agreement", agreement(&lhs, &rhs, 3.0, 0.01), 1.0);
    Ok(rec.finish())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct Fubini2Params {
    n: usize,
    k: usize,
    density: GrassmannDensity,
    g: BodyParam,
    grassmann: usize,
    sub_samples: usize,
    radon_samples: usize,
}

impl Default for Fubini2Params {
    fn default() -> Self {
        Self {
            n: 3,
            k: 1,
            density: GrassmannDensity::constant(1.0),
            g: BodyParam::named("cube"),
            grassmann: 4096,
            sub_samples: 256,
            radon_samples: 256,
        }
    }
}

pub(crate) fn fubini2_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "k": 1, "density": {"kind": "constant", "value": 1.0}, "g": "cube"}),
        json!({"n": 4, "k": 2, "density": {"kind": "exp_trace", "matrix": [[1.0,0,0,0],[0,0.5,0,0],[0,0,0,0],[0,0,0,-0.5]]}, "g": "cube"}),
        json!({"n": 4, "k": 1, "density": {"kind": "mixture", "terms": [
            {"weight": 0.5, "density": {"kind": "constant", "value": 1.0}},
            {"weight": 0.5, "density": {"kind": "exp_trace", "matrix": [[0,0.8,0,0],[0.8,0,0,0],[0,0,0,0],[0,0,0,0]]}}]},
            "g": "ellipsoid"}),
    ]
}

/// `Vol(D_n)/Vol(D_{n-k}) E_nu[g(E) Vol(G ∩ E)] / E_nu[g]` on fresh Grassmann samples.
pub(crate) fn grassmann_side(
    g: &GrassmannDensity,
    normalizer: f64,
    body: &Body,
    k: usize,
    count: usize,
    sub_samples: usize,
    seed: u64,
) -> Result<QuadratureEstimate> {
    let n = body.dim();
    let m = n - k;
    let frames = grassmann_sample(n, m, count, seed)?;
    let sub = default_subsphere_rule(m, sub_samples, seed ^ 0x5ec7);
    let mut vals = Vec::with_capacity(count);
    for f in &frames {
        vals.push(g.eval(f.basis()) * section_volume(body, f, &sub)?.value);
    }
    Ok(sample_mean(&vals).scale(ball_volume(n) / ball_volume(m) / normalizer))
}

pub(crate) fn density_body(n: usize, k: usize, g: &GrassmannDensity, samples: usize, seed: u64) -> Result<(Body, f64)> {
    let body = bp_body_from_density(n, k, g.clone(), DensityBodyOptions { samples, seed, ..Default::default() })?;
    let z = match &body {
        Body::BusemannPettyDensity { normalizer, .. } => *normalizer,
        _ => unreachable!("density constructor returns a density body"),
    };
    Ok((body, z))
}

pub(crate) fn fubini2(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: Fubini2Params = parse_params("fubini2", v)?;
    let (n, k) = (prm.n, prm.k);
    let g = prm.g.resolve(n)?;
    let (l, z) = density_body(n, k, &prm.density, prm.radon_samples, cfg.seed)?;
    let mut rec = RecordBuilder::new("fubini2", &prm, cfg);
    rec.param("g_hash", g.content_hash());
    let r = rule(n, cfg.samples.min(1 << 13), cfg.seed)?;
    let lhs = dual_mixed_volume(&l, &g, k as f64, &r)?;
    let rhs = grassmann_side(&prm.density, z, &g, k, prm.grassmann, prm.sub_samples, cfg.seed.wrapping_add(17))?;
    rec.value("normalizer", z, Estimator::GrassmannMonteCarlo);
    rec.estimate("lhs_dual_mixed_volume", lhs, Estimator::SphereQuadrature);
    rec.estimate("rhs_grassmann", rhs, Estimator::GrassmannMonteCarlo);
    rec.value("relative_gap", (lhs.value - rhs.value).abs() / rhs.value, Estimator::Derived);
    rec.upper("agreement", agreement(&lhs, &rhs, 3.0, 0.01), 1.0);
    Ok(rec.finish())
}
