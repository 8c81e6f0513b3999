//! Spherical Radon transforms, intersection bodies and Busemann-Petty constructions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geom::{Body, PowerTerm, RadialCache};
use crate::linalg::{gaussian_matrix, orthogonal_complement, orthonormalize, pairwise_sum, rng};
use crate::quadra::{ball_volume, grassmann_sample, rule_mean, sample_mean, QuadratureEstimate, SphereRule, SubspaceFrame};

use super::density::GrassmannDensity;

/// `R_m f(E) = E_xi[f(F xi)]` with `sub_rule` on `S^{m-1}`.
pub fn radon_m<F>(f: F, frame: &SubspaceFrame, sub_rule: &SphereRule) -> Result<QuadratureEstimate>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if sub_rule.dim() != frame.rank() {
        return Err(Error::BadRank { n: frame.dim(), m: sub_rule.dim() });
    }
    let values = sub_rule.map_points(|xi| f(&frame.embed(xi)))?;
    Ok(rule_mean(sub_rule, &values))
}

/// `R*_m g(theta)`: mean of `g` over `count` random `m`-subspaces containing `theta`.
pub fn dual_radon_m(g: &GrassmannDensity, theta: &[f64], m: usize, count: usize, seed: u64) -> Result<QuadratureEstimate> {
    dual_radon_with_frames(g, theta, m, count, seed, 0)
}

/// As [`dual_radon_m`] with an explicit random stream.
pub fn dual_radon_with_frames(
    g: &GrassmannDensity,
    theta: &[f64],
    m: usize,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<QuadratureEstimate> {
    let n = theta.len();
    if m == 0 || m > n {
        return Err(Error::BadRank { n, m });
    }
    if count == 0 {
        return Err(Error::InvalidArgument("dual Radon transform needs >= 1 sample".into()));
    }
    let mut frame = DMatrix::zeros(n, m);
    for i in 0..n {
        frame[(i, 0)] = theta[i];
    }
    if m == 1 || m == n {
        // the subspace is determined by theta
        if m == n {
            frame = DMatrix::identity(n, n);
        }
        return Ok(QuadratureEstimate { value: g.eval(&frame), std_error: 0.0, samples: 1 });
    }
    let complement = orthogonal_complement(theta);
    let mut r = rng(seed, stream);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let q = orthonormalize(&gaussian_matrix(&mut r, n - 1, m - 1));
        let cols = &complement * q;
        frame.columns_mut(1, m - 1).copy_from(&cols);
        values.push(g.eval(&frame));
    }
    Ok(sample_mean(&values))
}

/// `E_nu[g]` over `G(n, m)`.
pub fn density_mean(g: &GrassmannDensity, n: usize, m: usize, count: usize, seed: u64) -> Result<QuadratureEstimate> {
    if let GrassmannDensity::Constant { value } = g {
        return Ok(QuadratureEstimate { value: *value, std_error: 0.0, samples: 1 });
    }
    let frames = grassmann_sample(n, m, count, seed)?;
    let values: Vec<f64> = frames.iter().map(|f| g.eval(f.basis())).collect();
    Ok(sample_mean(&values))
}

/// `Vol_{n-1}(L ∩ theta^perp)` with a deterministic frame of `theta^perp`.
pub fn intersection_radius(body: &Body, theta: &[f64], sub_rule: &SphereRule) -> Result<QuadratureEstimate> {
    let n = body.dim();
    if n < 2 {
        return Err(Error::InvalidArgument("intersection radius needs n >= 2".into()));
    }
    if sub_rule.dim() != n - 1 {
        return Err(Error::BadRank { n, m: sub_rule.dim() });
    }
    let frame = SubspaceFrame::new(orthogonal_complement(theta))?;
    crate::quadra::section_volume(body, &frame, sub_rule)
}

pub(crate) fn intersection_radius_with_rule(body: &Body, theta: &[f64], sub_rule: &SphereRule) -> Result<f64> {
    let n = body.dim();
    let frame = orthogonal_complement(theta);
    let e = (n - 1) as i32;
    let mut values = Vec::with_capacity(sub_rule.len());
    let mut x = vec![0.0; n];
    for xi in sub_rule.points() {
        for (i, xv) in x.iter_mut().enumerate() {
            *xv = (0..n - 1).map(|j| frame[(i, j)] * xi[j]).sum();
        }
        values.push(body.radial_unchecked(&x)?.powi(e) * sub_rule.weight(0));
    }
    Ok(ball_volume(n - 1) * pairwise_sum(&values))
}

/// `k`-radial sum of ellipsoids, `rho^k = sum_j w_j rho_{E_j}^k`; `k = n` is allowed.
pub fn bp_body_from_ellipsoids(k: u32, terms: Vec<(f64, Body)>) -> Result<Body> {
    let n = terms.first().map_or(0, |t| t.1.dim());
    if k == 0 || k as usize > n {
        return Err(Error::RankOutOfRange { k: k as usize, max: n });
    }
    for (_, b) in &terms {
        if !is_ellipsoidal(b) {
            return Err(Error::InvalidBody(format!("expected an ellipsoid term, got {}", b.kind())));
        }
    }
    Body::radial_power_sum(k, terms.into_iter().map(|(weight, body)| PowerTerm { weight, body }).collect())
}

fn is_ellipsoidal(b: &Body) -> bool {
    match b {
        Body::EuclideanBall { .. } | Body::Ellipsoid { .. } => true,
        Body::LinearImage { inner, .. } => is_ellipsoidal(inner),
        _ => false,
    }
}

/// Options for [`bp_body_from_density`].
#[derive(Clone, Copy, Debug)]
pub struct DensityBodyOptions {
    /// Subspaces per direction in the dual transform.
    pub samples: usize,
    /// Grassmann samples for the normalizer `E_nu[g]`.
    pub normalizer_samples: usize,
    pub seed: u64,
}

impl Default for DensityBodyOptions {
    fn default() -> Self {
        Self { samples: 256, normalizer_samples: 1 << 14, seed: 0 }
    }
}

/// Star body with `rho^k = R*_{n-k}(g) / E_nu[g]`, memoized per direction.
pub fn bp_body_from_density(n: usize, k: usize, g: GrassmannDensity, opts: DensityBodyOptions) -> Result<Body> {
    if k == 0 || k >= n {
        return Err(Error::RankOutOfRange { k, max: n.saturating_sub(1) });
    }
    g.validate(n)?;
    let normalizer = density_mean(&g, n, n - k, opts.normalizer_samples, opts.seed ^ 0x9e37_79b9)?.value;
    let body = Body::BusemannPettyDensity {
        dim: n,
        k,
        density: g,
        normalizer,
        samples: opts.samples,
        seed: opts.seed,
        cache: std::sync::Arc::new(RadialCache::default()),
    };
    body.validate()?;
    Ok(body)
}
