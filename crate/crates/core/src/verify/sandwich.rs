use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::{Atom, Body};
use crate::linalg::{matrix_from_rows, random_direction, rng};
use crate::positions::lewis_position;
use crate::quadra::{
    ball_volume, circumradius_inradius, dual_mixed_volume, mean_norm, mean_radius, volume, QuadratureEstimate,
    SphereRule,
};
use crate::radon::GrassmannDensity;

use super::corpus::{isotropic_ball_volume, require_contains, rule, scale_to_contain, BodyParam};
use super::identities::{density_body, grassmann_side, levy_for};
use super::{p0, parse_params, CheckRecord, Estimator, LevyRepresentation, RecordBuilder, VerifyConfig};

/// `L` side of a sandwich: `same` reuses the positioned `K`.
fn levy_side(l: &BodyParam, p: Option<f64>, k: &Body) -> Result<LevyRepresentation> {
    match l {
        BodyParam::Named(s) if s == "same" => LevyRepresentation::of_body(k),
        _ => levy_for(l, p, k.dim()),
    }
}

/// `t L` with `K ⊆ t L` when `fit`, otherwise `L` after checking `K ⊆ L`.
fn fit_around(l: &Body, k: &Body, fit: bool, r: &SphereRule) -> Result<f64> {
    if fit {
        scale_to_contain(l, k, r)
    } else {
        require_contains(l, k, r)?;
        Ok(1.0)
    }
}

fn default_rank() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct LevySandwichParams {
    n: usize,
    k: BodyParam,
    l: BodyParam,
    #[serde(default)]
    p: Option<f64>,
    /// Rescale `L` to the smallest multiple containing `K`.
    #[serde(default = "yes")]
    fit: bool,
}

pub(crate) fn main1_cases() -> Vec<Value> {
    let mut v = vec![json!({"n": 3, "k": "ball", "l": "ball"})];
    for p in [1.0, 2.0, 4.0] {
        v.push(json!({"n": 4, "k": "cube", "l": "lp", "p": p}));
    }
    for n in [2, 3, 5, 6] {
        v.push(json!({"n": n, "k": "cube", "l": "lp", "p": 2.0}));
    }
    v.push(json!({"n": 3, "k": "cross", "l": "lp", "p": 5.0}));
    v
}

/// `r = L_K (Ṽ_{-p}(L, D) / Ṽ_{-p}(L, K))^{1/p}` for isotropic `K` with `Vol K = Vol D`.
pub(crate) fn main1_sandwich(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: LevySandwichParams = parse_params("main1_sandwich", v)?;
    let n = prm.n;
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_ball_volume(&prm.k.resolve(n)?, &r)?;
    let levy = levy_side(&prm.l, prm.p, &k)?;
    let p = levy.p;
    let pz = p0(p, n);
    let l = levy.body()?;
    let mut rec = RecordBuilder::new("main1_sandwich", &prm, cfg);
    rec.param("p_effective", p);
    rec.param("p0", pz);
    let d = Body::ball(n, 1.0);
    let vd = dual_mixed_volume(&l, &d, -p, &r)?;
    let vk = dual_mixed_volume(&l, &k, -p, &r)?;
    let ratio = div(vd, vk).powf(1.0 / p).scale(lk);
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    rec.estimate("dmv_l_ball", vd, Estimator::SphereQuadrature);
    rec.estimate("dmv_l_k", vk, Estimator::SphereQuadrature);
    rec.estimate("r", ratio, Estimator::Derived);
    rec.upper("r_over_sqrt_p0", ratio.value / pz.sqrt(), cfg.window[1]);
    rec.lower("r_times_sqrt_p0", ratio.value * pz.sqrt(), cfg.window[0]);
    Ok(rec.finish())
}

/// `a / b`; errors are perfectly correlated for estimates on one rule, so this is conservative.
fn div(a: QuadratureEstimate, b: QuadratureEstimate) -> QuadratureEstimate {
    let value = a.value / b.value;
    let rel = a.relative_error() + b.relative_error();
    QuadratureEstimate { value, std_error: rel * value.abs(), samples: a.samples.min(b.samples) }
}

pub(crate) fn theorem1_cases() -> Vec<Value> {
    let mut v = vec![json!({"n": 3, "k": "ball", "l": "ball"})];
    for (n, p) in [(2, 1.0), (3, 4.0), (4, 2.0)] {
        v.push(json!({"n": n, "k": format!("lp:{p}"), "l": "same"}));
    }
    for n in 2..=6 {
        let p = (n as f64).ln().max(1.0);
        v.push(json!({"n": n, "k": "cube", "l": "lp", "p": p}));
    }
    v
}

/// `L_K M_p(L) / sqrt(p0)` for `K ⊆ L`.
pub(crate) fn theorem1(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: LevySandwichParams = parse_params("theorem1", v)?;
    let n = prm.n;
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_ball_volume(&prm.k.resolve(n)?, &r)?;
    let base = levy_side(&prm.l, prm.p, &k)?;
    let t = fit_around(&base.body()?, &k, prm.fit, &r)?;
    let levy = base.scaled(t)?;
    let p = levy.p;
    let pz = p0(p, n);
    let mut rec = RecordBuilder::new("theorem1", &prm, cfg);
    rec.param("p_effective", p);
    rec.param("p0", pz);
    rec.param("l_scale", t);
    let mp = mean_norm(&levy.body()?, p, &r)?;
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    rec.estimate("mean_norm_l", mp, Estimator::SphereQuadrature);
    rec.upper("ratio", lk * mp.value / pz.sqrt(), cfg.window[1]);
    Ok(rec.finish())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct BpSandwichParams {
    n: usize,
    #[serde(default = "default_rank")]
    rank: usize,
    k: BodyParam,
    /// A `rank`-Busemann-Petty body; ignored when `density` is given.
    #[serde(default = "ball_param")]
    l: BodyParam,
    #[serde(default)]
    density: Option<GrassmannDensity>,
    #[serde(default = "yes")]
    fit: bool,
    #[serde(default)]
    map: Option<Vec<Vec<f64>>>,
}

fn ball_param() -> BodyParam {
    BodyParam::named("ball")
}

struct BpSide {
    body: Body,
    normalizer: Option<f64>,
}

fn bp_side(prm: &BpSandwichParams, seed: u64) -> Result<BpSide> {
    let (n, k) = (prm.n, prm.rank);
    if k == 0 || k >= n {
        return Err(Error::BadRank { n, m: k });
    }
    if let Some(g) = &prm.density {
        let (body, z) = density_body(n, k, g, 256, seed)?;
        return Ok(BpSide { body, normalizer: Some(z) });
    }
    let body = prm.l.resolve(n)?;
    let ok = match &body {
        Body::EuclideanBall { .. } | Body::Ellipsoid { .. } => true,
        Body::RadialPowerSum { k: kk, .. } => *kk as usize == k,
        Body::BusemannPettyDensity { k: kk, .. } => *kk == k,
        _ => false,
    };
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "`{}` is not a known member of BP_{k}; use ball, ellipsoid, bp_ellipsoids:{k} or a density",
            prm.l.label()
        )));
    }
    Ok(BpSide { body, normalizer: None })
}

pub(crate) fn main2_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "rank": 1, "k": "ball", "l": "ball"}),
        json!({"n": 4, "rank": 1, "k": "cube", "l": "bp_ellipsoids:1"}),
        json!({"n": 4, "rank": 2, "k": "cube", "l": "bp_ellipsoids:2"}),
        json!({"n": 4, "rank": 2, "k": "cross",
               "density": {"kind": "exp_trace", "matrix": [[0.8,0,0,0],[0,0.3,0,0],[0,0,0,0],[0,0,0,-0.6]]}}),
        json!({"n": 3, "rank": 1, "k": "cube", "density": {"kind": "constant", "value": 1.0}}),
    ]
}

/// `L_K (Ṽ_k(L, D) / Ṽ_k(L, K))^{1/k}`, plus the Grassmann cross-check when `L` comes from a density.
pub(crate) fn main2_sandwich(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: BpSandwichParams = parse_params("main2_sandwich", v)?;
    let (n, kr) = (prm.n, prm.rank);
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_ball_volume(&prm.k.resolve(n)?, &r)?;
    let side = bp_side(&prm, cfg.seed)?;
    let mut rec = RecordBuilder::new("main2_sandwich", &prm, cfg);
    let d = Body::ball(n, 1.0);
    let kf = kr as f64;
    let vd = dual_mixed_volume(&side.body, &d, kf, &r)?;
    let vk = dual_mixed_volume(&side.body, &k, kf, &r)?;
    let ratio = div(vd, vk).powf(1.0 / kf).scale(lk);
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    rec.estimate("dmv_l_ball", vd, Estimator::SphereQuadrature);
    rec.estimate("dmv_l_k", vk, Estimator::SphereQuadrature);
    rec.estimate("r", ratio, Estimator::Derived);
    rec.window("r", ratio.value, [0.05, cfg.window[1] * cfg.script_l]);
    if let (Some(g), Some(z)) = (&prm.density, side.normalizer) {
        let rhs = grassmann_side(g, z, &k, kr, 2048, 256, cfg.seed.wrapping_add(23))?;
        rec.estimate("dmv_l_k_grassmann", rhs, Estimator::GrassmannMonteCarlo);
        let gap = (vk.value - rhs.value).abs() / (3.0 * (vk.std_error + rhs.std_error) + 0.01 * rhs.value);
        rec.upper("grassmann_agreement", gap, 1.0);
    }
    Ok(rec.finish())
}

pub(crate) fn theorem2_cases() -> Vec<Value> {
    let mut v = vec![json!({"n": 3, "rank": 1, "k": "ball", "l": "ball"})];
    for rank in [1, 2] {
        v.push(json!({"n": 4, "rank": rank, "k": "cube", "l": format!("bp_ellipsoids:{rank}")}));
    }
    for n in [2, 3, 5, 6] {
        v.push(json!({"n": n, "rank": 1, "k": "cube", "l": "bp_ellipsoids:1"}));
    }
    v.push(json!({"n": 3, "rank": 1, "k": "cross", "l": "ellipsoid"}));
    v
}

/// `L_K / (script_L_k MR_k(L))` for `K ⊆ L`.
pub(crate) fn theorem2(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: BpSandwichParams = parse_params("theorem2", v)?;
    let n = prm.n;
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_ball_volume(&prm.k.resolve(n)?, &r)?;
    let side = bp_side(&prm, cfg.seed)?;
    let t = fit_around(&side.body, &k, prm.fit, &r)?;
    let l = side.body.scaled(t)?;
    let mut rec = RecordBuilder::new("theorem2", &prm, cfg);
    rec.param("l_scale", t);
    let mr = mean_radius(&l, prm.rank as f64, &r)?;
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    rec.estimate("mean_radius_l", mr, Estimator::SphereQuadrature);
    rec.upper("ratio", lk / (cfg.script_l * mr.value), cfg.window[1]);
    Ok(rec.finish())
}

pub(crate) fn theorem4_cases() -> Vec<Value> {
    let mut v = vec![json!({"n": 3, "rank": 1, "k": "ball", "l": "ball"})];
    v.push(json!({"n": 6, "rank": 2, "k": "unit_cube", "l": "ellipsoid"}));
    for n in [3, 4, 5, 6] {
        v.push(json!({"n": n, "rank": 1, "k": "cube", "l": "bp_ellipsoids:1"}));
    }
    v.push(json!({"n": 3, "rank": 1, "k": "cross", "l": "ball"}));
    v
}

/// `L_K MR_k(T L) / script_L^2` for the largest multiple of `L` inside `K°`.
pub(crate) fn theorem4(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: BpSandwichParams = parse_params("theorem4", v)?;
    let (n, kr) = (prm.n, prm.rank);
    if kr == 0 || kr > n / 3 {
        return Err(Error::RankOutOfRange { k: kr, max: n / 3 });
    }
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_ball_volume(&prm.k.resolve(n)?, &r)?;
    let kp = k.polar()?;
    let side = bp_side(&prm, cfg.seed)?;
    let s = if prm.fit {
        1.0 / scale_to_contain(&kp, &side.body, &r)?
    } else {
        require_contains(&kp, &side.body, &r)?;
        1.0
    };
    let l = side.body.scaled(s)?;
    let tl = match &prm.map {
        Some(rows) => {
            let m: DMatrix<f64> = matrix_from_rows(rows)?;
            if (m.determinant() - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidArgument("`map` must have determinant one".into()));
            }
            l.apply_matrix(&m)?
        }
        None => l,
    };
    let mut rec = RecordBuilder::new("theorem4", &prm, cfg);
    rec.param("l_scale", s);
    let mr = mean_radius(&tl, kr as f64, &r)?;
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    rec.estimate("mean_radius_tl", mr, Estimator::SphereQuadrature);
    rec.upper("ratio", lk * mr.value / cfg.script_l.powi(2), 2.0 * cfg.window[1]);
    Ok(rec.finish())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Theorem3Params {
    n: usize,
    k: BodyParam,
    /// `L°`, a section of `L_p`; `random` draws `atoms` seeded directions.
    polar: BodyParam,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    atoms: Option<usize>,
    #[serde(default = "yes")]
    fit: bool,
}

pub(crate) fn theorem3_cases() -> Vec<Value> {
    vec![
        json!({"n": 3, "k": "ball", "polar": "ball"}),
        json!({"n": 4, "k": "cross", "polar": "random", "p": 2.0, "atoms": 8}),
        json!({"n": 4, "k": "cube", "polar": "random", "p": 3.0, "atoms": 10}),
        json!({"n": 4, "k": "cube", "polar": "random", "p": 2.0, "atoms": 10}),
        json!({"n": 3, "k": "cube", "polar": "cross"}),
        json!({"n": 2, "k": "cube", "polar": "random", "p": 2.0, "atoms": 5}),
        json!({"n": 5, "k": "cube", "polar": "random", "p": 2.0, "atoms": 12}),
        json!({"n": 6, "k": "cube", "polar": "random", "p": 2.0, "atoms": 14}),
    ]
}

/// Seeded unit directions with weights in `[0.5, 1.5]`.
pub(crate) fn random_atoms(n: usize, m: usize, seed: u64, stream: u64) -> Vec<Atom> {
    use rand::Rng;
    let mut g = rng(seed, stream);
    (0..m)
        .map(|_| {
            let d = random_direction(&mut g, n);
            Atom { weight: g.random_range(0.5..1.5), direction: d.iter().copied().collect() }
        })
        .collect()
}

/// `L_K / (sqrt(p0) M*_p(T L))` with `T L = (S L°)°` for the Lewis position `S` of `L°`.
pub(crate) fn theorem3(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: Theorem3Params = parse_params("theorem3", v)?;
    let n = prm.n;
    let r = rule(n, cfg.samples, cfg.seed)?;
    let (k, lk) = isotropic_ball_volume(&prm.k.resolve(n)?, &r)?;
    let base = match &prm.polar {
        BodyParam::Named(s) if s == "random" => {
            let p = prm.p.ok_or_else(|| Error::InvalidArgument("`random` needs an exponent `p`".into()))?;
            LevyRepresentation::new(p, random_atoms(n, prm.atoms.unwrap_or(2 * n), cfg.seed, 301))?
        }
        other => levy_for(other, prm.p, n)?,
    };
    let p = base.p;
    if p < 1.0 {
        return Err(Error::InvalidArgument(format!("L° must be convex, got p = {p}")));
    }
    let pz = p0(p, n);
    // K ⊆ s P° iff P/s ⊆ K°
    let pb = base.body()?;
    let s = if prm.fit {
        scale_to_contain(&k.polar()?, &pb, &r)?
    } else {
        require_contains(&k.polar()?, &pb, &r)?;
        1.0
    };
    let c: Vec<f64> = base.atoms.iter().map(|a| a.weight).collect();
    let u: Vec<Vec<f64>> = base.atoms.iter().map(|a| a.direction.clone()).collect();
    let lewis = lewis_position(&c, &u, p, 1e-10, 500)?;
    let positioned = Body::lp_section(p, lewis.atoms())?;
    let mut rec = RecordBuilder::new("theorem3", &prm, cfg);
    rec.param("p_effective", p);
    rec.param("q", if p == 1.0 { f64::INFINITY.to_string().into() } else { Value::from(p / (p - 1.0)) });
    rec.param("p0", pz);
    rec.param("l_scale", s);
    // M_p(S (P / s)) = s M_p(S P)
    let mstar = mean_norm(&positioned, p, &r)?.scale(s);
    let vol_l = volume(&Body::polar_of(pb), &r)?.scale(s.powi(n as i32));
    let volrad = (vol_l.value / ball_volume(n)).powf(1.0 / n as f64);
    rec.value("isotropic_constant", lk, Estimator::SphereQuadrature);
    rec.value("lewis_residual", lewis.position.residual, Estimator::Solver);
    rec.estimate("mean_width_tl", mstar, Estimator::SphereQuadrature);
    rec.estimate("volume_l", vol_l, Estimator::SphereQuadrature);
    rec.upper("ratio", lk / (pz.sqrt() * mstar.value), cfg.window[1]);
    rec.upper("mean_width_over_volume_radius", mstar.value / (pz.sqrt() * volrad), cfg.window[1]);
    Ok(rec.finish())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct LewisBoundParams {
    n: usize,
    p: f64,
    atoms: usize,
}

pub(crate) fn lewis_bound_cases() -> Vec<Value> {
    vec![
        json!({"n": 4, "p": 3.0, "atoms": 10}),
        json!({"n": 4, "p": 4.0, "atoms": 12}),
        json!({"n": 3, "p": 2.0, "atoms": 6}),
        json!({"n": 5, "p": 3.0, "atoms": 15}),
        json!({"n": 4, "p": 1.5, "atoms": 10}),
    ]
}

/// `a(K)` against `n^{max(0, 1/2 - 1/p)}` after Lewis positioning of a random section.
pub(crate) fn lewis_bound(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: LewisBoundParams = parse_params("lewis_bound", v)?;
    let (n, p) = (prm.n, prm.p);
    let atoms = random_atoms(n, prm.atoms, cfg.seed, 302);
    let c: Vec<f64> = atoms.iter().map(|a| a.weight).collect();
    let u: Vec<Vec<f64>> = atoms.iter().map(|a| a.direction.clone()).collect();
    let lewis = lewis_position(&c, &u, p, 1e-11, 1000)?;
    let body = Body::lp_section(p, lewis.atoms())?;
    let r = rule(n, cfg.samples, cfg.seed)?;
    let radii = circumradius_inradius(&body, &r)?;
    let limit = (n as f64).powf((0.5 - 1.0 / p).max(0.0));
    let mut rec = RecordBuilder::new("lewis_bound", &prm, cfg);
    rec.value("lewis_residual", lewis.position.residual, Estimator::Solver);
    rec.value("iterations", lewis.position.iterations as f64, Estimator::Solver);
    rec.value("total_weight", lewis.weights.iter().sum(), Estimator::Solver);
    rec.value("circumradius", radii.a(), Estimator::Solver);
    rec.value("b", radii.b(), Estimator::Solver);
    rec.value("limit", limit, Estimator::ClosedForm);
    rec.upper("lewis_residual", lewis.position.residual, 1e-8);
    rec.upper("circumradius_over_limit", radii.a() / limit, 1.0 + 1e-3);
    Ok(rec.finish())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub(crate) enum MeanBoundsParams {
    /// `1 <= M_p(K) <= C sqrt(p0)` for the isotropic `l_p` ball, `Vol K = Vol D_n`.
    LpMeanNorm { n: usize, p: f64 },
    /// `C / script_L_k <= MR_k(K) <= 1` for the isotropic `l_1` ball.
    L1MeanRadius { n: usize, k: usize },
    /// `M(Q_n) sqrt(n) / sqrt(log(1+n))` for the volume-one cube.
    CubeMeanNorm { n: usize },
}

pub(crate) fn mean_bounds_cases() -> Vec<Value> {
    let mut v = Vec::new();
    for p in [1.0, 2.0, 4.0, 8.0] {
        v.push(json!({"family": "lp_mean_norm", "n": 4, "p": p}));
    }
    for k in [1, 2] {
        v.push(json!({"family": "l1_mean_radius", "n": 4, "k": k}));
    }
    for n in 2..=10 {
        v.push(json!({"family": "cube_mean_norm", "n": n}));
    }
    v
}

pub(crate) fn mean_bounds(v: &Value, cfg: &VerifyConfig) -> Result<CheckRecord> {
    let prm: MeanBoundsParams = parse_params("mean_bounds", v)?;
    let mut rec = RecordBuilder::new("mean_bounds", &prm, cfg);
    match prm {
        MeanBoundsParams::LpMeanNorm { n, p } => {
            let r = rule(n, cfg.samples, cfg.seed)?;
            let (k, _) = isotropic_ball_volume(&Body::lp_ball(n, p, 1.0), &r)?;
            let mp = mean_norm(&k, p, &r)?;
            let pz = p0(p, n);
            rec.param("p0", pz);
            rec.estimate("mean_norm", mp, Estimator::SphereQuadrature);
            rec.lower("mean_norm_lower", mp.value + 3.0 * mp.std_error, 1.0);
            rec.upper("mean_norm_over_sqrt_p0", mp.value / pz.sqrt(), cfg.window[1]);
        }
        MeanBoundsParams::L1MeanRadius { n, k } => {
            let r = rule(n, cfg.samples, cfg.seed)?;
            let (body, _) = isotropic_ball_volume(&Body::cross_polytope(n, 1.0), &r)?;
            let mr = mean_radius(&body, k as f64, &r)?;
            rec.estimate("mean_radius", mr, Estimator::SphereQuadrature);
            rec.window("mean_radius_times_script_l", mr.value * cfg.script_l, [cfg.window[0], f64::INFINITY]);
            rec.upper("mean_radius", mr.value - 3.0 * mr.std_error, 1.0);
        }
        MeanBoundsParams::CubeMeanNorm { n } => {
            let r = rule(n, cfg.samples, cfg.seed)?;
            let m = mean_norm(&Body::unit_volume_cube(n), 1.0, &r)?;
            let nf = n as f64;
            rec.estimate("mean_norm", m, Estimator::SphereQuadrature);
            rec.window("normalized", m.value * nf.sqrt() / (1.0 + nf).ln().sqrt(), [0.4, 3.0]);
        }
    }
    Ok(rec.finish())
}
