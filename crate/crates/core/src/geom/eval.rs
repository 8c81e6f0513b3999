//! Gauge, radial and support functions.

use crate::error::{Error, Result};
use crate::lp::{solve_standard, symmetric_hull_gauge};
use crate::radon::{dual_radon_with_frames, intersection_radius_with_rule};

use super::body::{Atom, Body};

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `(sum |x_i|^p)^(1/p)` with scaling to avoid overflow and underflow.
pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return max_abs(x);
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return norm2(x);
    }
    let m = max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

fn check_dim(body: &Body, x: &[f64]) -> Result<()> {
    let n = body.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    Ok(())
}

impl Body {
    /// Minkowski functional `||x||_K`.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        check_dim(self, x)?;
        if x.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite point".into()));
        }
        self.gauge_unchecked(x)
    }

    fn gauge_unchecked(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Body::EuclideanBall { radius, .. } => norm2(x) / radius,
            Body::Ellipsoid { matrix } => matrix.quadratic(x).max(0.0).sqrt(),
            Body::LpBall { p, radius, .. } => lp_norm(x, p.0) / radius,
            Body::Cube { half_side, .. } => max_abs(x) / half_side,
            Body::CrossPolytope { radius, .. } => lp_norm(x, 1.0) / radius,
            Body::HPolytope { rows } => rows.iter().fold(0.0_f64, |acc, a| acc.max(dot(a, x).abs())),
            Body::VPolytope { vertices } => symmetric_hull_gauge(vertices, x)?,
            Body::LpSection { p, atoms } => lp_section_gauge(atoms, *p, x),
            Body::LinearImage { map, inner } => inner.gauge_unchecked(&map.apply_inverse(x))?,
            Body::Polar { inner } => inner.support_unchecked(x)?,
            Body::RadialPowerSum { .. }
            | Body::IntersectionBodyOf { .. }
            | Body::BusemannPettyDensity { .. } => {
                let r = norm2(x);
                let theta: Vec<f64> = x.iter().map(|v| v / r).collect();
                r / self.radial_unchecked(&theta)?
            }
        })
    }

    /// Radial function `rho_K(theta)` for a unit vector `theta`.
    pub fn radial(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self, theta)?;
        let r = norm2(theta);
        if !((r - 1.0).abs() <= 1e-9) {
            return Err(Error::InvalidArgument(format!("direction has norm {r}, expected 1")));
        }
        self.radial_unchecked(theta)
    }

    pub(crate) fn radial_unchecked(&self, theta: &[f64]) -> Result<f64> {
        match self {
            Body::RadialPowerSum { k, terms } => {
                let k = *k as i32;
                let mut acc = 0.0;
                for t in terms {
                    acc += t.weight * t.body.radial_unchecked(theta)?.powi(k);
                }
                Ok(acc.powf(1.0 / k as f64))
            }
            Body::IntersectionBodyOf { inner, samples, seed, cache } => {
                let n = inner.dim();
                let rule = cache.rule.get_or_init(|| {
                    crate::quadra::default_subsphere_rule(n - 1, *samples, *seed)
                });
                cache.get_or_compute(theta, |dir| intersection_radius_with_rule(inner, dir, rule))
            }
            Body::BusemannPettyDensity { dim, k, density, normalizer, samples, seed, cache } => {
                let m = dim - k;
                let kk = *k as f64;
                cache.get_or_compute(theta, |dir| {
                    let stream = crate::quadra::direction_stream(dir);
                    let r = dual_radon_with_frames(density, dir, m, *samples, *seed, stream)?;
                    Ok((r.value / normalizer).max(0.0).powf(1.0 / kk))
                })
            }
            _ => {
                let g = self.gauge_unchecked(theta)?;
                if !(g > 0.0) || !g.is_finite() {
                    return Err(Error::UnboundedGauge(format!(
                        "gauge {g} in direction {theta:?}"
                    )));
                }
                Ok(1.0 / g)
            }
        }
    }

    /// Support function `h_K(x) = sup_{y in K} |<x, y>|` (convex bodies only).
    pub fn support(&self, x: &[f64]) -> Result<f64> {
        check_dim(self, x)?;
        if !self.is_convex() {
            return Err(Error::NonConvexBody(self.kind()));
        }
        if x.iter().all(|v| *v == 0.0) {
            return Ok(0.0);
        }
        self.support_unchecked(x)
    }

    fn support_unchecked(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Body::EuclideanBall { radius, .. } => radius * norm2(x),
            Body::Ellipsoid { matrix } => matrix.inverse_quadratic(x).max(0.0).sqrt(),
            Body::LpBall { p, radius, .. } => {
                if p.0 < 1.0 {
                    return Err(Error::NonConvexBody("lp_ball with p < 1"));
                }
                radius * lp_norm(x, p.conjugate().0)
            }
            Body::Cube { half_side, .. } => half_side * lp_norm(x, 1.0),
            Body::CrossPolytope { radius, .. } => radius * max_abs(x),
            Body::HPolytope { rows } => symmetric_hull_gauge(rows, x)?,
            Body::VPolytope { vertices } => {
                vertices.iter().fold(0.0_f64, |acc, v| acc.max(dot(v, x).abs()))
            }
            Body::LpSection { p, atoms } => {
                if *p < 1.0 {
                    return Err(Error::NonConvexBody("lp_section with p < 1"));
                }
                lp_section_support(atoms, *p, x)?
            }
            Body::LinearImage { map, inner } => inner.support_unchecked(&map.apply_transpose(x))?,
            Body::Polar { inner } => inner.gauge_unchecked(x)?,
            Body::RadialPowerSum { .. }
            | Body::IntersectionBodyOf { .. }
            | Body::BusemannPettyDensity { .. } => return Err(Error::NonConvexBody(self.kind())),
        })
    }
}

fn lp_section_gauge(atoms: &[Atom], p: f64, x: &[f64]) -> f64 {
    let t: Vec<f64> = atoms.iter().map(|a| dot(&a.direction, x)).collect();
    let m = max_abs(&t);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = atoms.iter().zip(&t).map(|(a, ti)| a.weight * (ti.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// `max <theta, y>` over the unit ball of `sum w_i |<y, u_i>|^p`.
fn lp_section_support(atoms: &[Atom], p: f64, theta: &[f64]) -> Result<f64> {
    if p == 1.0 {
        return l1_section_support(atoms, theta);
    }
    let n = theta.len();
    let scale = norm2(theta);
    let th: Vec<f64> = theta.iter().map(|v| v / scale).collect();
    // minimizer of (1/p)||y||^p - <th, y> satisfies ||y||^p = <th, y>; then h = ||y||^(p-1)
    let g0 = lp_section_gauge(atoms, p, &th);
    let mut y: Vec<f64> = th.iter().map(|v| v * (1.0 / g0.powf(p)).powf(1.0 / (p - 1.0))).collect();
    let objective = |y: &[f64]| {
        let g = lp_section_gauge(atoms, p, y);
        g.powf(p) / p - dot(&th, y)
    };
    let mut f = objective(&y);
    for _ in 0..200 {
        let ynorm = norm2(&y).max(1e-300);
        let mut grad = vec![0.0; n];
        let mut hess = nalgebra::DMatrix::<f64>::zeros(n, n);
        for a in atoms {
            let t = dot(&a.direction, &y);
            let at = t.abs().max(1e-10 * ynorm * norm2(&a.direction));
            let psi = t.signum() * at.powf(p - 1.0);
            let curv = (p - 1.0) * at.powf(p - 2.0) * a.weight;
            for i in 0..n {
                grad[i] += a.weight * psi * a.direction[i];
                for j in 0..n {
                    hess[(i, j)] += curv * a.direction[i] * a.direction[j];
                }
            }
        }
        for i in 0..n {
            grad[i] -= th[i];
        }
        if norm2(&grad) < 1e-14 {
            break;
        }
        let Some(chol) = hess.clone().cholesky() else {
            break;
        };
        let step = chol.solve(&nalgebra::DVector::from_column_slice(&grad));
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = (0..n).map(|i| y[i] - t * step[i]).collect();
            let fc = objective(&cand);
            if fc < f || (fc <= f && t < 1.0) {
                let moved = t * step.norm();
                y = cand;
                f = fc;
                improved = moved > 1e-15 * ynorm;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let g = lp_section_gauge(atoms, p, &y);
    if !(g > 0.0) {
        return Err(Error::DegenerateBody("support solve collapsed".into()));
    }
    Ok(scale * dot(&th, &y) / g)
}

/// `p = 1`: the polar is the zonotope `sum [-w_i u_i, w_i u_i]`; its gauge is a small LP.
fn l1_section_support(atoms: &[Atom], theta: &[f64]) -> Result<f64> {
    let n = theta.len();
    let m = atoms.len();
    // variables: z+ (m), z- (m), t, slack (m)
    let nv = 3 * m + 1;
    let mut rows = Vec::with_capacity(n + m);
    for i in 0..n {
        let mut r = vec![0.0; nv];
        for (j, a) in atoms.iter().enumerate() {
            r[j] = a.weight * a.direction[i];
            r[m + j] = -a.weight * a.direction[i];
        }
        rows.push(r);
    }
    for j in 0..m {
        let mut r = vec![0.0; nv];
        r[j] = 1.0;
        r[m + j] = 1.0;
        r[2 * m] = -1.0;
        r[2 * m + 1 + j] = 1.0;
        rows.push(r);
    }
    let mut b = theta.to_vec();
    b.extend(std::iter::repeat_n(0.0, m));
    let mut c = vec![0.0; nv];
    c[2 * m] = 1.0;
    Ok(solve_standard(&rows, &b, &c)?.objective)
}
