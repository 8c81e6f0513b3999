//! Catalog of nonnegative densities on Grassmannians.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One weighted component of a [`GrassmannDensity::Mixture`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub weight: f64,
    pub density: GrassmannDensity,
}

/// `g(E) >= 0` on `G(n, m)`, evaluated on an orthonormal frame of `E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrassmannDensity {
    Constant { value: f64 },
    /// `exp(trace(P_E M))` for a symmetric `M` (row-major).
    ExpTrace { matrix: Vec<Vec<f64>> },
    Mixture { terms: Vec<MixtureTerm> },
}

impl GrassmannDensity {
    pub fn constant(value: f64) -> Self {
        GrassmannDensity::Constant { value }
    }

    pub fn exp_trace(m: &DMatrix<f64>) -> Self {
        GrassmannDensity::ExpTrace { matrix: crate::linalg::matrix_to_rows(m) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GrassmannDensity::Constant { .. } => "constant",
            GrassmannDensity::ExpTrace { .. } => "exp_trace",
            GrassmannDensity::Mixture { .. } => "mixture",
        }
    }

    /// `g(E)` where the columns of `frame` are an orthonormal basis of `E`.
    pub fn eval(&self, frame: &DMatrix<f64>) -> f64 {
        match self {
            GrassmannDensity::Constant { value } => *value,
            GrassmannDensity::ExpTrace { matrix } => {
                // trace(P_E M) = sum_j f_j^T M f_j
                let (n, m) = frame.shape();
                let mut tr = 0.0;
                for j in 0..m {
                    for a in 0..n {
                        let fa = frame[(a, j)];
                        if fa == 0.0 {
                            continue;
                        }
                        let mut row = 0.0;
                        for b in 0..n {
                            row += matrix[a][b] * frame[(b, j)];
                        }
                        tr += fa * row;
                    }
                }
                tr.exp()
            }
            GrassmannDensity::Mixture { terms } => terms.iter().map(|t| t.weight * t.density.eval(frame)).sum(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            GrassmannDensity::Constant { value } => {
                if *value > 0.0 && value.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidBody(format!("constant density must be positive, got {value}")))
                }
            }
            GrassmannDensity::ExpTrace { matrix } => {
                let m = crate::linalg::matrix_from_rows(matrix)?;
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
                }
                if (&m - m.transpose()).abs().max() > 1e-12 * (1.0 + m.abs().max()) {
                    return Err(Error::InvalidBody("exp_trace matrix must be symmetric".into()));
                }
                Ok(())
            }
            GrassmannDensity::Mixture { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidBody("mixture needs at least one term".into()));
                }
                for t in terms {
                    if !(t.weight > 0.0) || !t.weight.is_finite() {
                        return Err(Error::InvalidBody("mixture weights must be positive".into()));
                    }
                    t.density.validate(n)?;
                }
                Ok(())
            }
        }
    }
}
