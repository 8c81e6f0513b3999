//! Polarity, linear images and numerical containment.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::orthogonal_complement;
use crate::quadra::SphereRule;

use super::body::{mat_vec, Atom, Body, LinearMap};
use super::eval::norm2;

impl Body {
    /// Polar body `K°`, structural whenever the type allows.
    pub fn polar(&self) -> Result<Body> {
        if !self.is_convex() {
            return Err(Error::NonConvexPolar(self.kind()));
        }
        Ok(match self {
            Body::EuclideanBall { dim, radius } => Body::EuclideanBall { dim: *dim, radius: 1.0 / radius },
            Body::Ellipsoid { matrix } => Body::Ellipsoid { matrix: matrix.inverted() },
            Body::LpBall { dim, p, radius } => Body::LpBall { dim: *dim, p: p.conjugate(), radius: 1.0 / radius },
            Body::Cube { dim, half_side } => Body::CrossPolytope { dim: *dim, radius: 1.0 / half_side },
            Body::CrossPolytope { dim, radius } => Body::Cube { dim: *dim, half_side: 1.0 / radius },
            Body::HPolytope { rows } => Body::VPolytope { vertices: rows.clone() },
            Body::VPolytope { vertices } => Body::HPolytope { rows: vertices.clone() },
            Body::LinearImage { map, inner } => Body::LinearImage {
                map: map.inverse_transpose(),
                inner: Box::new(inner.polar()?),
            },
            Body::Polar { inner } => (**inner).clone(),
            Body::LpSection { .. } => Body::Polar { inner: Box::new(self.clone()) },
            _ => return Err(Error::NonConvexPolar(self.kind())),
        })
    }

    /// `T(K)`, pushing the map into the representation when that keeps evaluation cheap.
    pub fn apply_map(&self, t: &LinearMap) -> Result<Body> {
        if t.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: t.dim() });
        }
        Ok(match self {
            Body::EuclideanBall { radius, .. } => {
                // gauge^2 = |T^{-1}x|^2 / r^2
                let inv = t.inverse();
                let m = inv.transpose() * inv / (radius * radius);
                Body::Ellipsoid { matrix: super::body::SpdMatrix::new(crate::linalg::symmetrize(&m))? }
            }
            Body::Ellipsoid { matrix } => {
                let inv = t.inverse();
                let m = inv.transpose() * matrix.matrix() * inv;
                Body::Ellipsoid { matrix: super::body::SpdMatrix::new(crate::linalg::symmetrize(&m))? }
            }
            Body::HPolytope { rows } => {
                // |<a, T^{-1}x>| = |<T^{-T}a, x>|
                let inv_t = t.inverse().transpose();
                Body::HPolytope { rows: rows.iter().map(|a| mat_vec(&inv_t, a)).collect() }
            }
            Body::VPolytope { vertices } => {
                Body::VPolytope { vertices: vertices.iter().map(|v| t.apply(v)).collect() }
            }
            Body::LpSection { p, atoms } => {
                let inv_t = t.inverse().transpose();
                Body::LpSection { p: *p, atoms: push_atoms(atoms, &inv_t, *p) }
            }
            Body::LinearImage { map, inner } => {
                Body::LinearImage { map: t.compose(map)?, inner: inner.clone() }
            }
            _ => Body::LinearImage { map: t.clone(), inner: Box::new(self.clone()) },
        })
    }

    /// `T(K)` from a raw matrix.
    pub fn apply_matrix(&self, t: &DMatrix<f64>) -> Result<Body> {
        self.apply_map(&LinearMap::new(t.clone())?)
    }

    /// `s K`
    pub fn scaled(&self, s: f64) -> Result<Body> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {s}")));
        }
        Ok(match self {
            Body::EuclideanBall { dim, radius } => Body::EuclideanBall { dim: *dim, radius: radius * s },
            Body::LpBall { dim, p, radius } => Body::LpBall { dim: *dim, p: *p, radius: radius * s },
            Body::Cube { dim, half_side } => Body::Cube { dim: *dim, half_side: half_side * s },
            Body::CrossPolytope { dim, radius } => Body::CrossPolytope { dim: *dim, radius: radius * s },
            _ => self.apply_map(&LinearMap::new(DMatrix::identity(self.dim(), self.dim()) * s)?)?,
        })
    }
}

/// `|<x, u>|` becomes `|<x, m u>|`; directions are renormalized and lengths move into weights.
pub(crate) fn push_atoms(atoms: &[Atom], m: &DMatrix<f64>, p: f64) -> Vec<Atom> {
    atoms
        .iter()
        .map(|a| {
            let v = mat_vec(m, &a.direction);
            let len = norm2(&v);
            Atom { weight: a.weight * len.powf(p), direction: v.iter().map(|x| x / len).collect() }
        })
        .collect()
}

/// A unit vector in `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `x`; fails for the zero vector.
    pub fn new(x: Vec<f64>) -> Result<Self> {
        let r = norm2(&x);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self(x.into_iter().map(|v| v / r).collect()))
    }

    pub fn axis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for Direction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Result of a numerical containment test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Containment {
    pub contained: bool,
    /// `min rho_outer / rho_inner` over the probed directions.
    pub worst_ratio: f64,
    pub worst_direction: Vec<f64>,
}

pub const DEFAULT_CONTAINMENT_TOL: f64 = 1e-9;

/// Tests `inner ⊆ outer` on the rule points, then refines the worst few
/// directions by a local pattern search on the sphere.
pub fn contains(outer: &Body, inner: &Body, rule: &SphereRule) -> Result<Containment> {
    contains_with_tol(outer, inner, rule, DEFAULT_CONTAINMENT_TOL)
}

pub fn contains_with_tol(outer: &Body, inner: &Body, rule: &SphereRule, tol: f64) -> Result<Containment> {
    let n = outer.dim();
    if inner.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: inner.dim() });
    }
    if rule.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rule.dim() });
    }
    let ratio = |theta: &[f64]| -> Result<f64> {
        Ok(outer.radial_unchecked(theta)? / inner.radial_unchecked(theta)?)
    };
    let ratios = rule.map_points(|theta| ratio(theta))?;
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| ratios[a].total_cmp(&ratios[b]).then(a.cmp(&b)));
    let mut best = (ratios[order[0]], rule.point(order[0]).to_vec());
    if n >= 2 {
        for &idx in order.iter().take(6) {
            let (r, dir) = refine_min(&ratio, rule.point(idx), ratios[idx])?;
            if r < best.0 {
                best = (r, dir);
            }
        }
    }
    Ok(Containment { contained: best.0 >= 1.0 - tol, worst_ratio: best.0, worst_direction: best.1 })
}

/// Pattern search for a local minimum of `f` on the sphere starting at `start`.
pub(crate) fn refine_min(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    start: &[f64],
    start_value: f64,
) -> Result<(f64, Vec<f64>)> {
    let n = start.len();
    let mut x = start.to_vec();
    let mut fx = start_value;
    let mut step = 0.05;
    while step > 1e-7 {
        let frame = orthogonal_complement(&x);
        let mut moved = false;
        for j in 0..n - 1 {
            for sign in [1.0, -1.0] {
                let cand: Vec<f64> = (0..n).map(|i| x[i] + sign * step * frame[(i, j)]).collect();
                let r = norm2(&cand);
                let cand: Vec<f64> = cand.iter().map(|v| v / r).collect();
                let fc = f(&cand)?;
                if fc < fx {
                    x = cand;
                    fx = fc;
                    moved = true;
                    break;
                }
            }
            if moved {
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok((fx, x))
}

/// `max` counterpart of [`refine_min`].
pub(crate) fn refine_max(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    start: &[f64],
    start_value: f64,
) -> Result<(f64, Vec<f64>)> {
    let neg = |t: &[f64]| f(t).map(|v| -v);
    let (v, x) = refine_min(&neg, start, -start_value)?;
    Ok((-v, x))
}
