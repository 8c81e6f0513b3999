use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{contains, Body};
use crate::linalg::{gaussian_matrix, normalize_det, orthonormalize, rng, symmetrize};
use crate::positions::isotropic_position;
use crate::quadra::{ball_volume, volume, SphereRule};
use crate::radon::bp_body_from_ellipsoids;

/// `max(1, min(p, n))`
pub fn p0(p: f64, n: usize) -> f64 {
    p.min(n as f64).max(1.0)
}

/// A body in check parameters: a corpus name resolved in the requested dimension,
/// or a full body spec.
///
/// Names: `ball`, `cube` (`[-1,1]^n`), `unit_cube` (volume one), `cross`, `lp:<p>`,
/// `ellipsoid` (a fixed anisotropic ellipsoid), `sheared_cube`, `box_sum`
/// (radial sum of two boxes), `bp_ellipsoids:<k>` (a `k`-radial sum of three ellipsoids).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodyParam {
    Named(String),
    Spec(Body),
}

impl BodyParam {
    pub fn named(s: &str) -> Self {
        BodyParam::Named(s.to_string())
    }

    pub fn label(&self) -> String {
        match self {
            BodyParam::Named(s) => s.clone(),
            BodyParam::Spec(b) => format!("{}#{}", b.kind(), b.content_hash()),
        }
    }

    pub fn resolve(&self, n: usize) -> Result<Body> {
        let body = match self {
            BodyParam::Spec(b) => {
                if b.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
                }
                return Ok(b.clone());
            }
            BodyParam::Named(name) => {
                let (head, arg) = match name.split_once(':') {
                    Some((h, a)) => (h, Some(a)),
                    None => (name.as_str(), None),
                };
                let num = |what: &str| -> Result<f64> {
                    arg.ok_or_else(|| Error::InvalidArgument(format!("`{head}` needs `:{what}`")))?
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad `{name}`: {e}")))
                };
                match head {
                    "ball" => Body::ball(n, 1.0),
                    "cube" => Body::cube(n, 1.0),
                    "unit_cube" => Body::unit_volume_cube(n),
                    "cross" => Body::cross_polytope(n, 1.0),
                    "lp" => Body::lp_ball(n, num("p")?, 1.0),
                    "ellipsoid" => fixed_ellipsoid(n)?,
                    "sheared_cube" => Body::cube(n, 1.0).apply_matrix(&shear(n))?,
                    "box_sum" => box_sum(n)?,
                    "bp_ellipsoids" => bp_ellipsoids(n, num("k")? as u32)?,
                    _ => return Err(Error::InvalidArgument(format!("unknown corpus body `{name}`"))),
                }
            }
        };
        Ok(body)
    }
}

/// Unit upper shear `I + 0.6 e_1 e_2^T + 0.3 e_2 e_3^T ...`.
pub(crate) fn shear(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = if i == 0 { 0.6 } else { 0.3 };
    }
    m
}

/// Axes `1, 1.5, 2, ...` in a fixed rotated frame.
pub(crate) fn fixed_ellipsoid(n: usize) -> Result<Body> {
    let q = orthonormalize(&gaussian_matrix(&mut rng(0xe111, 0), n, n));
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| (1.0 + 0.5 * i as f64).powi(-2)));
    Body::ellipsoid(symmetrize(&(&q * d * q.transpose())))
}

/// `rho = rho_{B1} + rho_{B2}` for two perpendicular boxes; unconditional, not convex.
fn box_sum(n: usize) -> Result<Body> {
    let a = Body::h_polytope((0..n).map(|i| axis_row(n, i, if i == 0 { 0.5 } else { 1.0 })).collect())?;
    let b = Body::h_polytope((0..n).map(|i| axis_row(n, i, if i == 0 { 1.0 } else { 0.7 })).collect())?;
    Body::radial_power_sum(1, vec![
        crate::geom::PowerTerm { weight: 1.0, body: a },
        crate::geom::PowerTerm { weight: 1.0, body: b },
    ])
}

fn axis_row(n: usize, i: usize, v: f64) -> Vec<f64> {
    let mut r = vec![0.0; n];
    r[i] = v;
    r
}

/// `rho^k = sum_j rho_{E_j}^k` for three fixed ellipsoids.
pub(crate) fn bp_ellipsoids(n: usize, k: u32) -> Result<Body> {
    let mut terms = Vec::new();
    for j in 0..3 {
        let q = orthonormalize(&gaussian_matrix(&mut rng(0xb9 + j, 0), n, n));
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| (0.8 + 0.4 * ((i + j as usize) % 3) as f64).powi(-2)));
        terms.push((1.0 / 3.0, Body::ellipsoid(symmetrize(&(&q * d * q.transpose())))?));
    }
    bp_body_from_ellipsoids(k, terms)
}

pub(crate) fn rule(n: usize, samples: usize, seed: u64) -> Result<SphereRule> {
    SphereRule::default_for(n, samples, seed)
}

/// `body` in isotropic position, rescaled to volume `target`, with its `L_K`.
pub(crate) fn isotropic_at_volume(body: &Body, rule: &SphereRule, target: f64) -> Result<(Body, f64)> {
    let n = body.dim();
    let report = isotropic_position(body, 1e-9, 60, rule)?;
    let positioned = report.position.apply(body)?;
    let vol = volume(&positioned, rule)?.value;
    Ok((positioned.scaled((target / vol).powf(1.0 / n as f64))?, report.isotropic_constant))
}

pub(crate) fn isotropic_ball_volume(body: &Body, rule: &SphereRule) -> Result<(Body, f64)> {
    isotropic_at_volume(body, rule, ball_volume(body.dim()))
}

/// Scale factor `t` with `inner ⊆ t outer` (with a small margin), verified on the rule.
pub(crate) fn scale_to_contain(outer: &Body, inner: &Body, rule: &SphereRule) -> Result<f64> {
    let c = contains(outer, inner, rule)?;
    let t = (1.0 + 1e-4) / c.worst_ratio;
    if !t.is_finite() {
        return Err(Error::ContainmentViolated { worst_ratio: c.worst_ratio });
    }
    Ok(t)
}

/// `inner ⊆ outer` on the rule, else `ContainmentViolated`.
pub(crate) fn require_contains(outer: &Body, inner: &Body, rule: &SphereRule) -> Result<()> {
    let c = contains(outer, inner, rule)?;
    if !c.contained {
        return Err(Error::ContainmentViolated { worst_ratio: c.worst_ratio });
    }
    Ok(())
}

/// A random determinant-one map `Q exp(S)`, with `S` symmetric of entry scale `spread`.
pub(crate) fn random_sl<R: Rng + ?Sized>(n: usize, r: &mut R, spread: f64) -> Result<DMatrix<f64>> {
    let q = orthonormalize(&gaussian_matrix(r, n, n));
    let g = gaussian_matrix(r, n, n);
    let s = symmetrize(&g) * spread;
    let e = s.symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f64::exp));
    normalize_det(&(q * &e.eigenvectors * d * e.eigenvectors.transpose()))
}
