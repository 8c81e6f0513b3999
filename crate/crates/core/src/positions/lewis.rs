use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Atom;
use crate::linalg::{normalize_det, spd_power, symmetrize};

use super::{IsotropicMeasure, PositionResult};

/// Lewis position of `{x : sum c_i |<x, u_i>|^p <= 1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LewisResult {
    pub position: PositionResult,
    /// `lambda_i` with `sum lambda_i theta_i theta_i^T = I` and `sum lambda_i = n`.
    pub weights: Vec<f64>,
    /// Unit directions `theta_i` of the transformed vectors.
    pub directions: Vec<Vec<f64>>,
    /// The positioned norm is `alpha^{-1} sum lambda_i |<y, theta_i>|^p`.
    pub alpha: f64,
}

impl LewisResult {
    /// Atoms of the positioned body with `||y||^p = sum w_i |<y, theta_i>|^p`.
    pub fn atoms(&self) -> Vec<Atom> {
        self.weights
            .iter()
            .zip(&self.directions)
            .map(|(l, d)| Atom { weight: l / self.alpha, direction: d.clone() })
            .collect()
    }

    pub fn measure(&self) -> IsotropicMeasure {
        IsotropicMeasure { atoms: self.directions.iter().cloned().zip(self.weights.iter().copied()).collect() }
    }
}

fn lewis_matrix(c: &[f64], w: &[DVector<f64>], p: f64) -> DMatrix<f64> {
    let n = w[0].len();
    let mut a = DMatrix::zeros(n, n);
    for (ci, wi) in c.iter().zip(w) {
        let len = wi.norm();
        if len > 0.0 {
            a.ger(ci * len.powf(p - 2.0), wi, wi, 1.0);
        }
    }
    symmetrize(&a)
}

fn normalized_residual(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (a * (n as f64 / a.trace()) - DMatrix::identity(n, n)).norm()
}

/// Fixed point `S <- A^{-1/2} S` with `A = sum c_i |S u_i|^{p-2} (S u_i)(S u_i)^T`,
/// damped to `A^{-1/4}` whenever the residual grows. The position is `T = S^{-T}`.
pub fn lewis_position(c: &[f64], u: &[Vec<f64>], p: f64, tol: f64, max_iter: usize) -> Result<LewisResult> {
    let n = u.first().map_or(0, Vec::len);
    if n == 0 || c.len() != u.len() {
        return Err(Error::InvalidArgument("weights and vectors must be non-empty and of equal length".into()));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent must be finite and >= 1, got {p}")));
    }
    if c.iter().any(|ci| !(*ci > 0.0)) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    let vs: Vec<DVector<f64>> = u.iter().map(|v| DVector::from_column_slice(v)).collect();
    let sv = {
        let mut g = DMatrix::zeros(n, n);
        for v in &vs {
            g.ger(1.0, v, v, 1.0);
        }
        g.singular_values()
    };
    if sv.min() < 1e-12 * sv.max() {
        return Err(Error::DegeneratePoints("vectors do not span R^n".into()));
    }
    let mut s = DMatrix::<f64>::identity(n, n);
    let mut trace = Vec::new();
    let mut exponent = -0.5;
    let mut last = f64::INFINITY;
    for it in 0..=max_iter {
        let w: Vec<DVector<f64>> = vs.iter().map(|v| &s * v).collect();
        let a = lewis_matrix(c, &w, p);
        let residual = normalized_residual(&a);
        trace.push(residual);
        if residual < tol {
            let beta = a.trace() / n as f64;
            let weights = c.iter().zip(&w).map(|(ci, wi)| ci * wi.norm().powf(p) / beta).collect();
            let directions = w.iter().map(|wi| (wi / wi.norm()).as_slice().to_vec()).collect();
            let t = s.clone().try_inverse().ok_or(Error::SingularMap { det: 0.0 })?.transpose();
            let t = normalize_det(&t)?;
            // normalize_det rescales S by det^{1/n}; beta picks up the p-th power
            let scale = s.determinant().abs().powf(1.0 / n as f64);
            return Ok(LewisResult {
                position: PositionResult { map: t, iterations: it, residual, trace },
                weights,
                directions,
                alpha: scale.powf(p) / beta,
            });
        }
        if it == max_iter {
            break;
        }
        if residual > last && exponent < -0.2 {
            exponent = -0.25;
        }
        last = residual;
        let a = &a / (a.trace() / n as f64);
        s = spd_power(&a, exponent)? * s;
    }
    let last = *trace.last().unwrap_or(&f64::NAN);
    Err(Error::NoConvergence { iterations: max_iter, last, trace })
}
