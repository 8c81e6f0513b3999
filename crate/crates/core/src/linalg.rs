//! Small dense linear-algebra helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Deterministic generator for `(seed, stream)`. Different streams of the same
/// seed are independent.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    // column-major fill keeps the draw order identical to nalgebra's storage
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// A uniformly random direction on `S^{n-1}` (normalized Gaussian).
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let g = gaussian_vector(rng, n);
        let norm = g.norm();
        if norm > 1e-300 {
            return g / norm;
        }
    }
}

/// Pairwise (tree) summation. The reduction order depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `m^power` for a symmetric positive-definite matrix.
pub fn spd_power(m: &DMatrix<f64>, power: f64) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::DegenerateBody(format!(
            "matrix is not positive definite (smallest eigenvalue {min:e})"
        )));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(power)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

pub fn sym_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    let mut vals = SymmetricEigen::new(symmetrize(m)).eigenvalues;
    vals.as_mut_slice().sort_by(|a, b| a.total_cmp(b));
    vals
}

/// Spectral norm of a symmetric matrix.
pub fn sym_spectral_norm(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Rescales `t` to determinant one; an orientation-reversing map also has its
/// first row negated.
pub fn normalize_det(t: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = t.nrows();
    let det = t.determinant();
    if !(det.abs() > 1e-300) || !det.is_finite() {
        return Err(Error::SingularMap { det });
    }
    let scale = det.abs().powf(-1.0 / n as f64);
    let mut out = t * scale;
    if det < 0.0 {
        out.row_mut(0).neg_mut();
    }
    Ok(out)
}

/// Orthonormal basis of `theta^perp` as the columns of an `n x (n-1)` matrix.
///
/// Built from the Householder reflection pinned to the largest coordinate of
/// `theta`, so the frame is a deterministic (piecewise smooth) function of `theta`.
pub fn orthogonal_complement(theta: &[f64]) -> DMatrix<f64> {
    let n = theta.len();
    let k = (0..n)
        .max_by(|&a, &b| theta[a].abs().total_cmp(&theta[b].abs()))
        .unwrap_or(0);
    let sign = if theta[k] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = DVector::from_column_slice(theta);
    v[k] += sign;
    let vv = v.norm_squared();
    let mut frame = DMatrix::zeros(n, n - 1);
    let mut col = 0;
    for j in 0..n {
        if j == k {
            continue;
        }
        // H e_j = e_j - 2 v v_j / |v|^2
        let coef = 2.0 * v[j] / vv;
        for i in 0..n {
            frame[(i, col)] = if i == j { 1.0 } else { 0.0 } - coef * v[i];
        }
        col += 1;
    }
    frame
}

/// Thin QR with the positive-diagonal sign convention; returns the `Q` factor.
pub fn orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Row-major nested vectors to a matrix, validating shape and finiteness.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidBody("empty matrix".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidBody("ragged matrix".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidBody("non-finite matrix entry".into()));
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
