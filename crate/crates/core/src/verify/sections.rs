use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::Body;
use crate::linalg::{orthonormalize, rng};
use crate::positions::isotropic_position;
use crate::quadra::{
    ball_volume, default_subsphere_rule, grassmann_sample, sample_mean, section_volume, volume, QuadratureEstimate,
    SphereRule, SubspaceFrame,
};

use super::corpus::{random_sl, rule, BodyParam};
use super::{parse_params, spread, CheckRecord, Estimator, RecordBuilder, VerifyConfig};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct SectionParams {
    n: usize,
    m: usize,
    a: BodyParam,
    /// Haar subspaces for the averages.
    grassmann: usize,
    /// Points per subsphere rule.
    sub_samples: usize,
    /// Random unit-determinant maps.
    t_samples: usize,
    /// Random subspaces per map in the `sup` search, before local refinement.
    e_samples: usize,
}

impl Default for SectionParams {
    fn default() -> Self {
        Self {
            n: 3,
            m: 2,
            a: BodyParam::named("cube"),
            grassmann: 4096,
            sub_samples: 256,
            t_samples: 10,
            e_samples: 128,
        }
    }
}

impl SectionParams {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m >= self.n {
            return Err(Error::BadRank { n: self.n, m: self.m });
        }
        Ok(())
    }
}

fn section_values(body: &Body, frames: &[SubspaceFrame], sub: &SphereRule) -> Result<Vec<f64>> {
    frames.iter().map(|f| section_volume(body, f, sub).map(|e| e.value)).collect()
}

/// Sampled `sup_E Vol(A ∩ E)` followed by random-rotation hill climbing.
fn max_section(body: &Body, m: usize, count: usize, sub: &SphereRule, seed: u64) -> Result<f64> {
    let n = body.dim();
    let frames = grassmann_sample(n, m, count, seed)?;
    let vals = section_values(body, &frames, sub)?;
    let (mut best_i, mut best) = (0, f64::MIN);
    for (i, v) in vals.iter().enumerate() {
        if *v > best {
            best = *v;
            best_i = i;
        }
    }
    let mut basis = frames[best_i].basis().clone();
    let mut g = rng(seed, 41);
    let mut step = 0.3;
    for _ in 0..6 {
        for _ in 0..12 {
            let noise = crate::linalg::gaussian_matrix(&mut g, n, m) * step;
            let cand = SubspaceFrame::new(orthonormalize(&(&basis + noise)))?;
            let v = section_volume(body, &cand, sub)?.value;
            if v > best {
                best = v;
                basis = cand.basis().clone();
            }
        }
        step *= 0.5;
    }
    Ok(best)
}

pub(crate) fn avg_sections_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "m": 2, "a": "ball"}),
        json!({"n": 3, "m": 2, "a": "cube"}),
        json!({"n": 3, "m": 1, "a": "ellipsoid"}),
        json!({"n": 4, "m": 2, "a": "cross"}),
    ]
}

/// `E_nu Vol(A ∩ E)` against `min_T sup_E Vol(T A ∩ E)` over the identity, the
/// isotropic map and random unit-determinant maps.
pub(crate) fn avg_sections(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: SectionParams = parse_params("avg_sections", v)?;
    prm.validate()?;
    let (n, m) = (prm.n, prm.m);
    let a = prm.a.resolve(n)?;
    let sub = default_subsphere_rule(m, prm.sub_samples, cfg.seed ^ 0x5ec7);
    let frames = grassmann_sample(n, m, prm.grassmann, cfg.seed)?;
    let lhs = sample_mean(&section_values(&a, &frames, &sub)?);

    let r = rule(n, cfg.samples.min(1 << 14), cfg.seed)?;
    let mut maps: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
    maps.push(isotropic_position(&a, 1e-6, 40, &r)?.position.map);
    let mut g = rng(cfg.seed, 43);
    for _ in 0..prm.t_samples {
        maps.push(random_sl(n, &mut g, 0.2)?);
    }
    let mut sups = Vec::with_capacity(maps.len());
    for (i, t) in maps.iter().enumerate() {
        let ta = a.apply_matrix(t)?;
        sups.push(max_section(&ta, m, prm.e_samples, &sub, cfg.seed.wrapping_add(100 + i as u64))?);
    }
    let (arg, rhs) = sups.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
    let mut rec = RecordBuilder::new("avg_sections", &prm, cfg);
    rec.param("a_hash", a.content_hash());
    rec.estimate("average_section", lhs, Estimator::GrassmannMonteCarlo);
    rec.value("sup_section_identity", sups[0], Estimator::GrassmannMonteCarlo);
    rec.value("sup_section_isotropic", sups[1], Estimator::GrassmannMonteCarlo);
    rec.value("min_sup_section", rhs, Estimator::GrassmannMonteCarlo);
    rec.value("argmin_map", arg as f64, Estimator::Derived);
    rec.upper("average_over_min_sup", lhs.value / (rhs * (1.0 + 3.0 * lhs.relative_error() + 1e-9)), 1.0);
    Ok(rec.finish())
}

pub(crate) fn grinberg_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "m": 2, "a": "ball"}),
        json!({"n": 3, "m": 2, "a": "cube"}),
        json!({"n": 3, "m": 1, "a": "cube"}),
        json!({"n": 4, "m": 1, "a": "cube"}),
        json!({"n": 4, "m": 2, "a": "cube"}),
        json!({"n": 4, "m": 2, "a": "cross"}),
        json!({"n": 3, "m": 2, "a": "box_sum"}),
    ]
}

/// `Phi = (E_nu Vol(A ∩ E)^n)^{1/n}` with its standard error.
fn phi(body: &Body, frames: &[SubspaceFrame], sub: &SphereRule) -> Result<QuadratureEstimate> {
    let n = body.dim() as i32;
    let vals: Vec<f64> = section_values(body, frames, sub)?.into_iter().map(|v| v.powi(n)).collect();
    Ok(sample_mean(&vals).powf(1.0 / n as f64))
}

/// `Phi` for `A` and random unit-determinant images, plus the comparison with the ball of equal volume.
pub(crate) fn grinberg_invariance(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: SectionParams = parse_params("grinberg_invariance", v)?;
    prm.validate()?;
    let (n, m) = (prm.n, prm.m);
    let a = prm.a.resolve(n)?;
    let sub = default_subsphere_rule(m, prm.sub_samples, cfg.seed ^ 0x5ec7);
    let mut g = rng(cfg.seed, 47);
    let mut phis = Vec::with_capacity(prm.t_samples + 1);
    for i in 0..=prm.t_samples {
        let body = if i == 0 { a.clone() } else { a.apply_matrix(&random_sl(n, &mut g, 0.25)?)? };
        let frames = grassmann_sample(n, m, prm.grassmann, cfg.seed.wrapping_add(i as u64))?;
        phis.push(phi(&body, &frames, &sub)?);
    }
    let values: Vec<f64> = phis.iter().map(|p| p.value).collect();
    let rel = phis.iter().map(QuadratureEstimate::relative_error).fold(0.0, f64::max);
    let vol = volume(&a, &rule(n, cfg.samples, cfg.seed)?)?;
    // every section of the ball of equal volume is Vol(D_m) r^m
    let radius = (vol.value / ball_volume(n)).powf(1.0 / n as f64);
    let phi_ball = ball_volume(m) * radius.powi(m as i32);
    let mut rec = RecordBuilder::new("grinberg_invariance", &prm, cfg);
    rec.param("a_hash", a.content_hash());
    for (i, p) in phis.iter().enumerate() {
        rec.estimate(&format!("phi_{i}"), *p, Estimator::GrassmannMonteCarlo);
    }
    rec.estimate("volume", vol, Estimator::SphereQuadrature);
    rec.value("phi_equal_volume_ball", phi_ball, Estimator::ClosedForm);
    let spread_rel = spread(&values) - 1.0;
    rec.value("relative_spread", spread_rel, Estimator::Derived);
    rec.upper("spread_over_tolerance", spread_rel / (3.0 * rel + 0.02), 1.0);
    let tol = 3.0 * (phis[0].relative_error() + vol.relative_error() * m as f64 / n as f64);
    rec.upper("phi_over_ball", phis[0].value / phi_ball, 1.0 + tol + 1e-9);
    Ok(rec.finish())
}
