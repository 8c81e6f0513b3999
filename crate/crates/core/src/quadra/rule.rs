//! Point sets on spheres and Grassmannians.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, orthonormalize, random_direction, rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    MonteCarlo,
    /// Pairs `±theta`, stored adjacently.
    Antithetic,
    /// Deterministic grids for `n <= 3`.
    ProductLowdim,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::MonteCarlo => "monte_carlo",
            RuleKind::Antithetic => "antithetic",
            RuleKind::ProductLowdim => "product_lowdim",
        }
    }
}

impl std::str::FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monte_carlo" | "mc" => Ok(RuleKind::MonteCarlo),
            "antithetic" => Ok(RuleKind::Antithetic),
            "product_lowdim" | "product" => Ok(RuleKind::ProductLowdim),
            other => Err(Error::InvalidArgument(format!("unknown rule kind `{other}`"))),
        }
    }
}

/// Weighted directions on `S^{n-1}`; weights are uniform and sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereRule {
    dim: usize,
    coords: Vec<f64>,
    weight: f64,
    seed: u64,
    kind: RuleKind,
}

/// Work below this many points per task is not split further.
pub(crate) const MIN_CHUNK: usize = 256;

impl SphereRule {
    pub fn new(n: usize, count: usize, seed: u64, kind: RuleKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sphere dimension n must be >= 1".into()));
        }
        if count < 2 {
            return Err(Error::InvalidArgument("a sphere rule needs at least 2 points".into()));
        }
        let coords = if n == 1 {
            // S^0 = {±1}
            (0..count).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()
        } else {
            match kind {
                RuleKind::MonteCarlo => {
                    let mut r = rng(seed, 0);
                    let mut out = Vec::with_capacity(n * count);
                    for _ in 0..count {
                        out.extend(random_direction(&mut r, n).iter());
                    }
                    out
                }
                RuleKind::Antithetic => {
                    if count % 2 != 0 {
                        return Err(Error::InvalidArgument("antithetic rules need an even count".into()));
                    }
                    let mut r = rng(seed, 0);
                    let mut out = Vec::with_capacity(n * count);
                    for _ in 0..count / 2 {
                        let d = random_direction(&mut r, n);
                        out.extend(d.iter());
                        out.extend(d.iter().map(|v| -v));
                    }
                    out
                }
                RuleKind::ProductLowdim => match n {
                    2 => circle_grid(count),
                    3 => antipodal_spiral(count)?,
                    _ => return Err(Error::UnsupportedKind { kind: "product_lowdim", n }),
                },
            }
        };
        let count = coords.len() / n;
        Ok(Self { dim: n, coords, weight: 1.0 / count as f64, seed, kind })
    }

    /// Default rule: a product grid for `n <= 3`, antithetic Monte Carlo otherwise.
    pub fn default_for(n: usize, count: usize, seed: u64) -> Result<Self> {
        let kind = if (2..=3).contains(&n) { RuleKind::ProductLowdim } else { RuleKind::Antithetic };
        SphereRule::new(n, count + count % 2, seed, kind)
    }

    /// Builds a rule from explicit unit directions with equal weights.
    pub fn from_points(points: &[Vec<f64>], seed: u64, kind: RuleKind) -> Result<Self> {
        let n = points.first().map_or(0, Vec::len);
        if n == 0 || points.len() < 2 || points.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidArgument("need >= 2 points of a common dimension".into()));
        }
        let coords = points.iter().flatten().copied().collect();
        Ok(Self { dim: n, coords, weight: 1.0 / points.len() as f64, seed, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn weight(&self, _i: usize) -> f64 {
        self.weight
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Evaluates `f` at every point in parallel; output order is the rule order.
    pub fn map_points<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&[f64]) -> Result<T> + Sync,
    {
        self.coords
            .par_chunks_exact(self.dim)
            .with_min_len(MIN_CHUNK)
            .map(|c| f(c))
            .collect()
    }
}

fn circle_grid(count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * count);
    for i in 0..count {
        let t = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
        out.push(t.cos());
        out.push(t.sin());
    }
    out
}

/// Golden-angle spiral on the upper hemisphere together with its antipodes.
fn antipodal_spiral(count: usize) -> Result<Vec<f64>> {
    if count % 2 != 0 {
        return Err(Error::InvalidArgument("product_lowdim on S^2 needs an even count".into()));
    }
    let half = count / 2;
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    let mut out = Vec::with_capacity(3 * count);
    for i in 0..half {
        let z = 1.0 - (i as f64 + 0.5) / half as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        let p = [r * phi.cos(), r * phi.sin(), z];
        out.extend(p);
        out.extend(p.iter().map(|v| -v));
    }
    Ok(out)
}

/// Rule on `S^{m-1}` used inside subspaces: grids for `m <= 3`, antithetic otherwise.
pub fn default_subsphere_rule(m: usize, count: usize, seed: u64) -> SphereRule {
    let count = count.max(2);
    SphereRule::default_for(m, count, seed).expect("valid subsphere rule parameters")
}

/// Stable stream index for a direction, derived from its quantized coordinates.
pub fn direction_stream(theta: &[f64]) -> u64 {
    // FNV-1a over the quantized key
    let mut h: u64 = 0xcbf29ce484222325;
    for v in theta {
        let q = (v / crate::geom::RadialCache::GRID).round() as i64;
        for b in q.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Orthonormal basis of an `m`-dimensional subspace, as the columns of an `n x m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFrame {
    basis: DMatrix<f64>,
}

impl SubspaceFrame {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (n, m) = basis.shape();
        if m == 0 || m > n {
            return Err(Error::BadRank { n, m });
        }
        let gram = basis.transpose() * &basis;
        if (gram - DMatrix::identity(m, m)).abs().max() > 1e-10 {
            return Err(Error::InvalidArgument("frame columns are not orthonormal".into()));
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Self { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `F xi` for frame coordinates `xi`.
    pub fn embed(&self, xi: &[f64]) -> Vec<f64> {
        crate::geom::mat_vec(&self.basis, xi)
    }

    /// Orthogonal projector `P_E = F F^T`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

/// `count` Haar-distributed frames of `G(n, m)`.
pub fn grassmann_sample(n: usize, m: usize, count: usize, seed: u64) -> Result<Vec<SubspaceFrame>> {
    if m == 0 || m >= n {
        return Err(Error::BadRank { n, m });
    }
    let mut r = rng(seed, 1);
    Ok((0..count)
        .map(|_| SubspaceFrame::from_orthonormal(orthonormalize(&gaussian_matrix(&mut r, n, m))))
        .collect())
}
