use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::Body;
use crate::linalg::{normalize_det, spd_power, symmetrize};
use crate::quadra::SphereRule;

use super::PositionResult;

const MVEE_MAX_ITER: usize = 100_000;
const BOUNDARY_POINTS: usize = 20_000;

#[derive(Clone, Debug)]
pub struct MveeResult {
    /// `{x : x^T M x <= 1}`
    pub matrix: DMatrix<f64>,
    pub iterations: usize,
    /// `max_j kappa_j / n - 1`, the duality gap of the barycentric ascent.
    pub gap: f64,
    pub trace: Vec<f64>,
}

impl MveeResult {
    pub fn ellipsoid(&self) -> Result<Body> {
        Body::ellipsoid(self.matrix.clone())
    }
}

/// Minimum-volume centered ellipsoid containing `±points`, by the barycentric
/// ascent with Todd-Yildirim away steps and rank-one inverse updates.
pub fn mvee(points: &[Vec<f64>], tol: f64) -> Result<MveeResult> {
    let n = points.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::DegeneratePoints("empty point set".into()));
    }
    let m = points.len();
    let v: Vec<DVector<f64>> = points.iter().map(|p| DVector::from_column_slice(p)).collect();
    let mut u = vec![1.0 / m as f64; m];
    let build = |u: &[f64]| -> DMatrix<f64> {
        let mut x = DMatrix::zeros(n, n);
        for (vj, uj) in v.iter().zip(u) {
            x.ger(*uj, vj, vj, 1.0);
        }
        x
    };
    let x = build(&u);
    let sv = x.singular_values();
    if sv.min() < 1e-12 * sv.max() {
        return Err(Error::DegeneratePoints("points do not span R^n".into()));
    }
    let mut xinv = symmetrize(&x.try_inverse().ok_or_else(|| {
        Error::DegeneratePoints("points do not span R^n".into())
    })?);
    let nf = n as f64;
    let mut trace = Vec::new();
    let mut kappa: Vec<f64> = v.iter().map(|vj| vj.dot(&(&xinv * vj))).collect();
    for it in 0..MVEE_MAX_ITER {
        if it % 64 == 63 {
            // refresh against drift of the rank-one updates
            xinv = symmetrize(&build(&u).try_inverse().ok_or_else(|| {
                Error::DegeneratePoints("weights collapsed to a subspace".into())
            })?);
            kappa = v.iter().map(|vj| vj.dot(&(&xinv * vj))).collect();
        }
        let (jmax, kmax) = kappa.iter().enumerate().fold((0, f64::MIN), |acc, (j, k)| if *k > acc.1 { (j, *k) } else { acc });
        let gap = kmax / nf - 1.0;
        if it % 16 == 0 {
            trace.push(gap);
        }
        if gap <= tol {
            let matrix = &xinv / kmax;
            return Ok(MveeResult { matrix: symmetrize(&matrix), iterations: it, gap: gap.max(0.0), trace });
        }
        let (jmin, kmin) = kappa
            .iter()
            .enumerate()
            .filter(|(j, _)| u[*j] > 0.0)
            .fold((0, f64::MAX), |acc, (j, k)| if *k < acc.1 { (j, *k) } else { acc });
        // pick the larger of the toward and away improvements
        let toward = kmax / nf - 1.0;
        let away = 1.0 - kmin / nf;
        let (j, alpha) = if toward >= away || u[jmin] >= 1.0 {
            (jmax, (kmax - nf) / (nf * (kmax - 1.0)))
        } else {
            let raw = (kmin - nf) / (nf * (kmin - 1.0));
            let bound = -u[jmin] / (1.0 - u[jmin]);
            (jmin, raw.max(bound))
        };
        if alpha == 0.0 {
            break;
        }
        // X' = (1 - alpha) X + alpha v v^T
        let vj = &v[j];
        let s = alpha / (1.0 - alpha);
        let y = &xinv * vj;
        let denom = 1.0 + s * kappa[j];
        let mut next = xinv.clone();
        next.ger(-s / denom, &y, &y, 1.0);
        xinv = next / (1.0 - alpha);
        for uk in u.iter_mut() {
            *uk *= 1.0 - alpha;
        }
        u[j] += alpha;
        if u[j] < 1e-300 {
            u[j] = 0.0;
        }
        let scale = 1.0 / (1.0 - alpha);
        for (kj, vk) in kappa.iter_mut().zip(&v) {
            let d = vk.dot(&y);
            *kj = scale * (*kj - s * d * d / denom);
        }
    }
    let last = trace.last().copied().unwrap_or(f64::NAN);
    Err(Error::NoConvergence { iterations: MVEE_MAX_ITER, last, trace })
}

/// Vertices whose symmetric hull is the body, when they are known exactly.
pub(crate) fn explicit_vertices(body: &Body) -> Option<Vec<Vec<f64>>> {
    match body {
        Body::VPolytope { vertices } => Some(vertices.clone()),
        Body::CrossPolytope { dim, radius } => Some(
            (0..*dim)
                .map(|i| {
                    let mut v = vec![0.0; *dim];
                    v[i] = *radius;
                    v
                })
                .collect(),
        ),
        Body::Cube { dim, half_side } if *dim <= 16 => {
            let n = *dim;
            // one representative of each ± pair
            Some(
                (0..1usize << (n - 1))
                    .map(|mask| {
                        (0..n)
                            .map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -half_side } else { *half_side })
                            .collect()
                    })
                    .collect(),
            )
        }
        Body::LinearImage { map, inner } => {
            explicit_vertices(inner).map(|vs| vs.iter().map(|v| map.apply(v)).collect())
        }
        _ => None,
    }
}

/// Quadratic form of the body when it is an ellipsoid.
fn ellipsoid_form(body: &Body) -> Option<DMatrix<f64>> {
    match body {
        Body::EuclideanBall { dim, radius } => Some(DMatrix::identity(*dim, *dim) / (radius * radius)),
        Body::Ellipsoid { matrix } => Some(matrix.matrix().clone()),
        Body::LinearImage { map, inner } => {
            ellipsoid_form(inner).map(|m| map.inverse().transpose() * m * map.inverse())
        }
        _ => None,
    }
}

fn lowner_matrix(body: &Body, rule: &SphereRule, tol: f64) -> Result<(DMatrix<f64>, usize, f64, Vec<f64>)> {
    if let Some(m) = ellipsoid_form(body) {
        return Ok((symmetrize(&m), 0, 0.0, vec![0.0]));
    }
    let points = match explicit_vertices(body) {
        Some(v) => v,
        None => {
            let count = rule.len().min(BOUNDARY_POINTS);
            let mut pts = Vec::with_capacity(count);
            for theta in rule.points().take(count) {
                let r = body.radial_unchecked(theta)?;
                pts.push(theta.iter().map(|t| t * r).collect());
            }
            pts
        }
    };
    let res = mvee(&points, tol)?;
    Ok((res.matrix, res.iterations, res.gap, res.trace))
}

/// Maps the minimal circumscribed ellipsoid `{x^T M x <= 1}` to a round ball: `T = M^{1/2}`, normalized.
pub fn lowner_position(body: &Body, rule: &SphereRule, tol: f64) -> Result<PositionResult> {
    if !body.is_convex() {
        return Err(Error::NonConvexBody(body.kind()));
    }
    let (m, iterations, gap, trace) = lowner_matrix(body, rule, tol)?;
    let t = normalize_det(&spd_power(&m, 0.5)?)?;
    Ok(PositionResult { map: t, iterations, residual: gap, trace })
}

/// John position through the polar: the Löwner ellipsoid `{x^T M x <= 1}` of `K°`
/// has polar `{x^T M^{-1} x <= 1}`, the maximal inscribed ellipsoid of `K`, so `T = M^{-1/2}`.
pub fn john_position(body: &Body, rule: &SphereRule, tol: f64) -> Result<PositionResult> {
    let polar = body.polar()?;
    let (m, iterations, gap, trace) = lowner_matrix(&polar, rule, tol)?;
    let t = normalize_det(&spd_power(&m, -0.5)?)?;
    Ok(PositionResult { map: t, iterations, residual: gap, trace })
}
