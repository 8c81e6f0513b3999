//! Position solvers, isotropic constants, John decompositions and type-2 estimates.

mod decomposition;
mod ellipsoid;
mod isotropic;
mod lewis;
mod minsurf;
mod type2;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{Body, LinearMap};
use crate::linalg::matrix_to_rows;

pub use decomposition::{
    gaussian_mixture_check, isotropic_prop_ratio, john_decomposition, GaussianMixtureReport,
};
pub use ellipsoid::{john_position, lowner_position, mvee, MveeResult};
pub use isotropic::{isotropic_constant, isotropic_position, IsotropicReport};
pub use lewis::{lewis_position, LewisResult};
pub use minsurf::{facet_areas, minimal_surface_position};
pub use type2::{lk_type2_bound_check, type2_lower_bound, LkPosition, TypeCotypeEstimate};

pub(crate) fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_to_rows(m).serialize(s)
}

/// A determinant-one linear map with convergence diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositionResult {
    #[serde(serialize_with = "serialize_matrix")]
    pub map: DMatrix<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub trace: Vec<f64>,
}

impl PositionResult {
    pub fn identity(n: usize) -> Self {
        Self { map: DMatrix::identity(n, n), iterations: 0, residual: 0.0, trace: vec![0.0] }
    }

    pub fn linear_map(&self) -> Result<LinearMap> {
        LinearMap::new(self.map.clone())
    }

    /// `T(K)`
    pub fn apply(&self, body: &Body) -> Result<Body> {
        body.apply_map(&self.linear_map()?)
    }
}

/// Discrete measure `sum lambda_i delta_{v_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropicMeasure {
    pub atoms: Vec<(Vec<f64>, f64)>,
}

impl IsotropicMeasure {
    pub fn dim(&self) -> usize {
        self.atoms.first().map_or(0, |a| a.0.len())
    }

    /// `sum lambda_i v_i v_i^T`
    pub fn second_moment(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (v, l) in &self.atoms {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += l * v[i] * v[j];
                }
            }
        }
        m
    }

    /// `||sum lambda v v^T - I||_F`
    pub fn residual(&self) -> f64 {
        let n = self.dim();
        (self.second_moment() - DMatrix::identity(n, n)).norm()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn require_isotropic(&self, tol: f64) -> Result<()> {
        let residual = self.residual();
        if residual > tol || self.atoms.is_empty() {
            return Err(Error::NotIsotropic { residual });
        }
        Ok(())
    }
}
