use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Body, LinearMap};
use crate::linalg::{normalize_det, spd_power, sym_eigenvalues};
use crate::quadra::{RadialProfile, SphereRule};

use super::PositionResult;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropicReport {
    pub position: PositionResult,
    /// `L_K` of the volume-one rescaling.
    pub isotropic_constant: f64,
}

fn anisotropy(cov: &DMatrix<f64>) -> f64 {
    let n = cov.nrows();
    (cov * (n as f64 / cov.trace()) - DMatrix::identity(n, n)).norm()
}

fn check_conditioning(cov: &DMatrix<f64>) -> Result<()> {
    let eig = sym_eigenvalues(cov);
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    if !(lo > 1e-14 * hi) {
        return Err(Error::DegenerateBody(format!("inertia matrix is near-singular (eigenvalues {lo:e} .. {hi:e})")));
    }
    Ok(())
}

/// Whitening iteration `T <- normalize(Cov(T K)^{-1/2}) T` on a fixed rule, stopping
/// when `||n Cov / tr Cov - I||_F < tol`.
pub fn isotropic_position(body: &Body, tol: f64, max_iter: usize, rule: &SphereRule) -> Result<IsotropicReport> {
    let n = body.dim();
    let mut t = DMatrix::<f64>::identity(n, n);
    let mut trace = Vec::new();
    let mut current = body.clone();
    for it in 0..=max_iter {
        let profile = RadialProfile::new(&current, rule)?;
        let cov = profile.covariance().matrix;
        check_conditioning(&cov)?;
        let a = anisotropy(&cov);
        trace.push(a);
        if a < tol {
            let vol = profile.volume().value;
            let l = (cov.trace() / n as f64).sqrt() / vol.powf(0.5 + 1.0 / n as f64);
            return Ok(IsotropicReport {
                position: PositionResult { map: t, iterations: it, residual: a, trace },
                isotropic_constant: l,
            });
        }
        if it == max_iter {
            break;
        }
        let step = normalize_det(&spd_power(&cov, -0.5)?)?;
        t = normalize_det(&(step * &t))?;
        current = body.apply_map(&LinearMap::new(t.clone())?)?;
    }
    let last = *trace.last().unwrap_or(&f64::NAN);
    Err(Error::NoConvergence { iterations: max_iter, last, trace })
}

/// `L_K = det(Cov K)^{1/(2n)} / Vol(K)^{1/2 + 1/n}`, which needs no positioning.
///
/// Outer linear images are dropped first since `L_K` is affine invariant.
pub fn isotropic_constant(body: &Body, rule: &SphereRule) -> Result<f64> {
    let mut core = body;
    while let Body::LinearImage { inner, .. } = core {
        core = inner;
    }
    let n = core.dim() as f64;
    let profile = RadialProfile::new(core, rule)?;
    let cov = profile.covariance().matrix;
    check_conditioning(&cov)?;
    let vol = profile.volume().value;
    Ok(cov.determinant().powf(1.0 / (2.0 * n)) / vol.powf(0.5 + 1.0 / n))
}
