use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geom::{dot, norm2, Body, LinearMap};
use crate::linalg::{normalize_det, spd_power, symmetrize};
use crate::quadra::{ball_volume, SphereRule};

use super::PositionResult;

const FACET_SAMPLES: usize = 1 << 17;
const FACET_SEED: u64 = 0x5eed_face;

/// Facet rows of bodies that are polytopes under another name.
fn facet_form(body: &Body) -> Option<Body> {
    let n = body.dim();
    let rows = match body {
        Body::HPolytope { .. } => return Some(body.clone()),
        Body::Cube { half_side, .. } => axis_rows(n, 1.0 / half_side),
        Body::LpBall { p, radius, .. } if p.is_infinite() => axis_rows(n, 1.0 / radius),
        // 2^{n-1} facet pairs
        Body::CrossPolytope { radius, .. } if n <= 16 => (0..1usize << (n - 1))
            .map(|mask| (0..n).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 } / radius).collect())
            .collect(),
        Body::LinearImage { map, inner } => {
            let Some(Body::HPolytope { rows }) = facet_form(inner) else { return None };
            let inv_t = map.inverse().transpose();
            rows.iter().map(|a| crate::geom::mat_vec(&inv_t, a)).collect()
        }
        _ => return None,
    };
    Some(Body::HPolytope { rows })
}

fn axis_rows(n: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = scale;
            e
        })
        .collect()
}

fn rows_of(body: &Body) -> Result<&[Vec<f64>]> {
    match body {
        Body::HPolytope { rows } => Ok(rows),
        other => Err(Error::UnsupportedKind { kind: other.kind(), n: other.dim() }),
    }
}

/// Length of `{x : <a_i, x> = 1, |<a_j, x>| <= 1}` in the plane.
fn facet_length(rows: &[Vec<f64>], i: usize) -> f64 {
    let a = &rows[i];
    let aa = dot(a, a);
    let x0 = [a[0] / aa, a[1] / aa];
    let d = [-a[1], a[0]];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (j, b) in rows.iter().enumerate() {
        if j == i {
            continue;
        }
        let c = b[0] * x0[0] + b[1] * x0[1];
        let s = b[0] * d[0] + b[1] * d[1];
        if s.abs() < 1e-15 * norm2(b) * norm2(&d) {
            if c.abs() > 1.0 + 1e-12 {
                return 0.0;
            }
            continue;
        }
        // -1 <= c + t s <= 1
        let (t1, t2) = ((-1.0 - c) / s, (1.0 - c) / s);
        lo = lo.max(t1.min(t2));
        hi = hi.min(t1.max(t2));
    }
    ((hi - lo).max(0.0)) * norm2(&d)
}

/// Sutherland-Hodgman clip of a convex polygon against `<g, y> <= h`.
fn clip(poly: &[[f64; 2]], g: [f64; 2], h: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let fp = g[0] * p[0] + g[1] * p[1] - h;
        let fq = g[0] * q[0] + g[1] * q[1] - h;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Area of the facet polygon `{x : <a_i, x> = 1, |<a_j, x>| <= 1}` in `R^3`.
fn facet_polygon_area(rows: &[Vec<f64>], i: usize, extent: f64) -> f64 {
    let a = &rows[i];
    let len = norm2(a);
    let nrm = [a[0] / len, a[1] / len, a[2] / len];
    let x0 = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
    // orthonormal frame of the facet plane
    let pick = if nrm[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let d = dot(&pick, &nrm);
        let v = [pick[0] - d * nrm[0], pick[1] - d * nrm[1], pick[2] - d * nrm[2]];
        let l = norm2(&v);
        [v[0] / l, v[1] / l, v[2] / l]
    };
    let e2 = [nrm[1] * e1[2] - nrm[2] * e1[1], nrm[2] * e1[0] - nrm[0] * e1[2], nrm[0] * e1[1] - nrm[1] * e1[0]];
    let r = extent;
    let mut poly = vec![[-r, -r], [r, -r], [r, r], [-r, r]];
    for (j, b) in rows.iter().enumerate() {
        if j == i {
            continue;
        }
        let c = dot(b, &x0);
        let g = [dot(b, &e1), dot(b, &e2)];
        poly = clip(&poly, g, 1.0 - c);
        poly = clip(&poly, [-g[0], -g[1]], 1.0 + c);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    let mut twice = 0.0;
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        twice += p[0] * q[1] - p[1] * q[0];
    }
    0.5 * twice.abs()
}

/// Area of the facet `{<a_i, x> = 1}` for each row; the facet `{<a_i, x> = -1}` is congruent.
///
/// Exact in dimensions 2 and 3. Otherwise each pair of facets gets the cone volume
/// `Vol_n({x in K : |<a_i, x>| = ||x||_K})` by quadrature, and `|F_i| = n |a_i| cone_i / 2`.
///
/// Cubes, cross-polytopes, `l_inf` balls and their linear images are converted to facet form first.
pub fn facet_areas(body: &Body) -> Result<Vec<f64>> {
    let converted = facet_form(body).ok_or(Error::UnsupportedKind { kind: body.kind(), n: body.dim() })?;
    let body = &converted;
    let rows = rows_of(body)?;
    let n = body.dim();
    let areas: Vec<f64> = match n {
        1 => rows.iter().map(|_| 1.0).collect(),
        2 => (0..rows.len()).map(|i| facet_length(rows, i)).collect(),
        3 => {
            let mut extent = 0.0_f64;
            for k in 0..3 {
                let mut e = vec![0.0; 3];
                e[k] = 1.0;
                extent = extent.max(body.support(&e)?);
            }
            (0..rows.len()).map(|i| facet_polygon_area(rows, i, 2.0 * extent)).collect()
        }
        _ => {
            let rule = SphereRule::default_for(n, FACET_SAMPLES, FACET_SEED)?;
            let per_point = rule.map_points(|theta| -> Result<(usize, f64)> {
                let (mut best, mut top) = (0, 0.0);
                for (j, a) in rows.iter().enumerate() {
                    let v = dot(a, theta).abs();
                    if v > top {
                        top = v;
                        best = j;
                    }
                }
                Ok((best, top.powi(-(n as i32))))
            })?;
            let mut cone = vec![0.0; rows.len()];
            for (i, (j, rho_n)) in per_point.into_iter().enumerate() {
                cone[j] += rule.weight(i) * rho_n;
            }
            let vol_ball = ball_volume(n);
            rows.iter()
                .zip(&cone)
                .map(|(a, e)| n as f64 * norm2(a) * vol_ball * e / 2.0)
                .collect()
        }
    };
    if areas.iter().any(|a| !a.is_finite()) || areas.iter().all(|a| *a <= 0.0) {
        return Err(Error::FacetAreaFailure("facet areas are not finite and positive".into()));
    }
    Ok(areas)
}

/// `(n / S) sum |F| n n^T` over all facets.
fn area_tensor(body: &Body) -> Result<DMatrix<f64>> {
    let rows = rows_of(body)?;
    let n = body.dim();
    let areas = facet_areas(body)?;
    let total: f64 = 2.0 * areas.iter().sum::<f64>();
    let mut a = DMatrix::zeros(n, n);
    for (row, area) in rows.iter().zip(&areas) {
        let len = norm2(row);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += 2.0 * area * row[i] * row[j] / (len * len);
            }
        }
    }
    Ok(symmetrize(&(a * (n as f64 / total))))
}

/// Fixed point `T <- A T`, damped to `A^{1/2}` when the residual `||A - I||_F` grows,
/// where `A` is the normalized area tensor of `T K`.
/// Accepts H-polytopes, cubes, cross-polytopes and their linear images.
pub fn minimal_surface_position(body: &Body, tol: f64, max_iter: usize) -> Result<PositionResult> {
    let converted = facet_form(body).ok_or(Error::UnsupportedKind { kind: body.kind(), n: body.dim() })?;
    let body = &converted;
    let n = body.dim();
    let mut t = DMatrix::<f64>::identity(n, n);
    let mut current = body.clone();
    let mut trace = Vec::new();
    let mut power = 1.0;
    let mut last = f64::INFINITY;
    for it in 0..=max_iter {
        let a = area_tensor(&current)?;
        let residual = (&a - DMatrix::identity(n, n)).norm();
        trace.push(residual);
        if residual < tol {
            return Ok(PositionResult { map: t, iterations: it, residual, trace });
        }
        if it == max_iter {
            break;
        }
        if residual > last {
            power = 0.5;
        }
        last = residual;
        let step = if power == 1.0 { a } else { spd_power(&a, power)? };
        t = normalize_det(&(step * &t))?;
        current = body.apply_map(&LinearMap::new(t.clone())?)?;
    }
    let last = *trace.last().unwrap_or(&f64::NAN);
    Err(Error::NoConvergence { iterations: max_iter, last, trace })
}
