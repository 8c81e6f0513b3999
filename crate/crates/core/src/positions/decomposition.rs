use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{mat_vec, norm2, Body};
use crate::linalg::{rng, sym_spectral_norm};
use crate::quadra::{mean_norm, SphereRule};

use super::IsotropicMeasure;

const DECOMPOSITION_TOL: f64 = 1e-6;

/// Rows `a_i` with `K = {x : |<a_i, x>| <= 1}`, when known exactly.
pub(crate) fn explicit_facets(body: &Body) -> Option<Vec<Vec<f64>>> {
    match body {
        Body::HPolytope { rows } => Some(rows.clone()),
        Body::Cube { dim, half_side } => Some(
            (0..*dim)
                .map(|i| {
                    let mut v = vec![0.0; *dim];
                    v[i] = 1.0 / half_side;
                    v
                })
                .collect(),
        ),
        Body::CrossPolytope { dim, radius } if *dim <= 16 => {
            let n = *dim;
            Some(
                (0..1usize << (n - 1))
                    .map(|mask| {
                        (0..n)
                            .map(|i| {
                                let s = if i > 0 && mask & (1 << (i - 1)) != 0 { -1.0 } else { 1.0 };
                                s / radius
                            })
                            .collect()
                    })
                    .collect(),
            )
        }
        Body::LinearImage { map, inner } => {
            let inv_t = map.inverse().transpose();
            explicit_facets(inner).map(|rows| rows.iter().map(|a| mat_vec(&inv_t, a)).collect())
        }
        _ => None,
    }
}

fn same_line(a: &[f64], b: &[f64]) -> bool {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (d.abs() - 1.0).abs() < 1e-10
}

/// Contact directions with the maximal inscribed centered ball, one per `±` pair.
fn contact_candidates(body: &Body, tol: f64) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |u: Vec<f64>| {
        if !out.iter().any(|w| same_line(w, &u)) {
            out.push(u);
        }
    };
    if let Some(rows) = explicit_facets(body) {
        let norms: Vec<f64> = rows.iter().map(|a| norm2(a)).collect();
        let top = norms.iter().copied().fold(0.0, f64::max);
        for (a, len) in rows.iter().zip(&norms) {
            if *len >= (1.0 - tol) * top {
                push(a.iter().map(|v| v / len).collect());
            }
        }
    } else {
        let n = body.dim();
        let rule = SphereRule::default_for(n, 1 << 15, 0xc0ffee)?;
        let rho = rule.map_points(|t| body.radial_unchecked(t))?;
        let low = rho.iter().copied().fold(f64::INFINITY, f64::min);
        for (i, r) in rho.iter().enumerate() {
            if *r <= (1.0 + tol) * low {
                push(rule.point(i).to_vec());
            }
        }
    }
    Ok(out)
}

/// `sum lambda_c u_c u_c^T = I` as a linear system over the upper triangle,
/// off-diagonal rows scaled by `sqrt 2` so the residual is the Frobenius norm.
fn moment_system(u: &[Vec<f64>]) -> (DMatrix<f64>, DVector<f64>) {
    let n = u[0].len();
    let rows = n * (n + 1) / 2;
    let mut a = DMatrix::zeros(rows, u.len());
    let mut b = DVector::zeros(rows);
    let mut r = 0;
    for i in 0..n {
        for j in i..n {
            let w = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
            for (c, uc) in u.iter().enumerate() {
                a[(r, c)] = w * uc[i] * uc[j];
            }
            b[r] = if i == j { 1.0 } else { 0.0 };
            r += 1;
        }
    }
    (a, b)
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(b, 1e-12 * smax.max(1e-300)).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Lawson-Hanson active-set NNLS for `min |A x - b|, x >= 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = a.ncols();
    let mut x = DVector::zeros(k);
    let mut passive = vec![false; k];
    let tol = 1e-12 * a.abs().max().max(1.0);
    for _ in 0..3 * k + 10 {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..k).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else {
            break;
        };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..k).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let z_sub = least_squares(&sub, b);
            if z_sub.iter().all(|v| *v > 0.0) {
                for (t, &j) in idx.iter().enumerate() {
                    x[j] = z_sub[t];
                }
                break;
            }
            // step back to the boundary of the feasible region
            let mut alpha = 1.0_f64;
            for (t, &j) in idx.iter().enumerate() {
                if z_sub[t] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - z_sub[t]));
                }
            }
            for (t, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z_sub[t] - x[j]);
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}

/// John's decomposition of the identity at the contact points of the maximal
/// inscribed centered ball, which is rescaled to the unit ball.
///
/// `tol` is the relative slack on `rho` admitted for a contact; `1e-4` is typical.
pub fn john_decomposition(body: &Body, tol: f64) -> Result<IsotropicMeasure> {
    let u = contact_candidates(body, tol)?;
    if u.is_empty() {
        return Err(Error::InsufficientContacts { residual: f64::INFINITY });
    }
    let (a, b) = moment_system(&u);
    let mut lambda = least_squares(&a, &b);
    if lambda.iter().any(|v| *v < -1e-12) {
        lambda = nnls(&a, &b);
    }
    let atoms: Vec<(Vec<f64>, f64)> = u
        .into_iter()
        .zip(lambda.iter())
        .filter(|(_, l)| **l > 1e-14)
        .map(|(v, l)| (v, *l))
        .collect();
    let measure = IsotropicMeasure { atoms };
    let residual = measure.residual();
    if !(residual <= DECOMPOSITION_TOL) {
        return Err(Error::InsufficientContacts { residual });
    }
    Ok(measure)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianMixtureReport {
    /// `||empirical covariance - I||_2`
    pub spectral_error: f64,
    /// `|empirical mean|`
    pub mean_norm: f64,
    pub samples: usize,
}

/// Empirical covariance of `sum_i g_i sqrt(lambda_i) v_i`, which is standard Gaussian
/// exactly when the measure is isotropic.
pub fn gaussian_mixture_check(measure: &IsotropicMeasure, count: usize, seed: u64) -> Result<GaussianMixtureReport> {
    measure.require_isotropic(1e-8)?;
    let n = measure.dim();
    let mut r = rng(seed, 7);
    let mut cov = DMatrix::<f64>::zeros(n, n);
    let mut mean = DVector::<f64>::zeros(n);
    let scaled: Vec<DVector<f64>> =
        measure.atoms.iter().map(|(v, l)| DVector::from_column_slice(v) * l.sqrt()).collect();
    for _ in 0..count {
        let mut x = DVector::<f64>::zeros(n);
        for v in &scaled {
            let g: f64 = r.sample(StandardNormal);
            x.axpy(g, v, 1.0);
        }
        cov.ger(1.0, &x, &x, 1.0);
        mean += &x;
    }
    cov /= count as f64;
    mean /= count as f64;
    Ok(GaussianMixtureReport {
        spectral_error: sym_spectral_norm(&(cov - DMatrix::identity(n, n))),
        mean_norm: mean.norm(),
        samples: count,
    })
}

/// `sqrt(n) M_2(K) / (sum lambda_i ||v_i||_K^2)^{1/2}` for an isotropic measure.
pub fn isotropic_prop_ratio(body: &Body, measure: &IsotropicMeasure, rule: &SphereRule) -> Result<f64> {
    measure.require_isotropic(1e-6)?;
    let n = body.dim() as f64;
    let m2 = mean_norm(body, 2.0, rule)?.value;
    let mut denom = 0.0;
    for (v, l) in &measure.atoms {
        denom += l * body.gauge(v)?.powi(2);
    }
    Ok(n.sqrt() * m2 / denom.sqrt())
}
