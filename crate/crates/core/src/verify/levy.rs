use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{dot, norm2, Atom, Body};
use crate::linalg::{random_direction, rng, sym_eigenvalues};

/// `||x||^p = sum_i mu_i |<x, theta_i>|^p` with unit `theta_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyRepresentation {
    pub p: f64,
    pub atoms: Vec<Atom>,
}

fn normalized(atoms: Vec<Atom>, p: f64) -> Vec<Atom> {
    atoms
        .into_iter()
        .map(|a| {
            let len = norm2(&a.direction);
            Atom { weight: a.weight * len.powf(p), direction: a.direction.iter().map(|v| v / len).collect() }
        })
        .collect()
}

impl LevyRepresentation {
    pub fn new(p: f64, atoms: Vec<Atom>) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("Levy exponent must be finite and positive, got {p}")));
        }
        if atoms.is_empty() || atoms.iter().any(|a| !(a.weight > 0.0) || norm2(&a.direction) == 0.0) {
            return Err(Error::InvalidArgument("Levy atoms need positive weights and nonzero directions".into()));
        }
        Ok(Self { p, atoms: normalized(atoms, p) })
    }

    /// Finite representations of `l_p` balls, `l_p` sections, Euclidean balls and
    /// ellipsoids (`p = 2`), and their linear images.
    pub fn of_body(body: &Body) -> Result<Self> {
        let n = body.dim();
        let axes = |w: f64| -> Vec<Atom> {
            (0..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    Atom { weight: w, direction: e }
                })
                .collect()
        };
        match body {
            Body::LpBall { p, radius, .. } if !p.is_infinite() => Self::new(p.0, axes(radius.powf(-p.0))),
            Body::EuclideanBall { radius, .. } => Self::new(2.0, axes(radius.powi(-2))),
            Body::CrossPolytope { radius, .. } => Self::new(1.0, axes(1.0 / radius)),
            Body::LpSection { p, atoms } => Self::new(*p, atoms.clone()),
            Body::Ellipsoid { matrix } => {
                let eig = matrix.matrix().clone().symmetric_eigen();
                let atoms = (0..n)
                    .map(|i| Atom { weight: eig.eigenvalues[i], direction: eig.eigenvectors.column(i).iter().copied().collect() })
                    .collect();
                Self::new(2.0, atoms)
            }
            Body::LinearImage { map, inner } => {
                let base = Self::of_body(inner)?;
                let inv_t = map.inverse().transpose();
                let atoms = base
                    .atoms
                    .iter()
                    .map(|a| Atom { weight: a.weight, direction: crate::geom::mat_vec(&inv_t, &a.direction) })
                    .collect();
                Self::new(base.p, atoms)
            }
            other => Err(Error::UnsupportedKind { kind: other.kind(), n }),
        }
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].direction.len()
    }

    /// `(sum mu_i |<x, theta_i>|^p)^{1/p}`
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let s: f64 = self.atoms.iter().map(|a| a.weight * dot(&a.direction, x).abs().powf(self.p)).sum();
        s.powf(1.0 / self.p)
    }

    /// `sum mu_i |<x, theta_i>|^p`
    pub fn gauge_pow(&self, x: &[f64]) -> f64 {
        self.atoms.iter().map(|a| a.weight * dot(&a.direction, x).abs().powf(self.p)).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// The unit ball as an [`Body::LpSection`].
    pub fn body(&self) -> Result<Body> {
        Body::lp_section(self.p, self.atoms.clone())
    }

    /// `t L`, whose norm is `||x|| / t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let f = t.powf(-self.p);
        Self::new(self.p, self.atoms.iter().map(|a| Atom { weight: a.weight * f, direction: a.direction.clone() }).collect())
    }

    /// Largest relative gap to `body`'s gauge over `count` seeded directions.
    pub fn max_mismatch(&self, body: &Body, count: usize, seed: u64) -> Result<f64> {
        let n = body.dim();
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: n, got: self.dim() });
        }
        let mut r = rng(seed, 11);
        let mut worst = 0.0_f64;
        for _ in 0..count {
            let theta = random_direction(&mut r, n);
            let g = body.gauge(theta.as_slice())?;
            worst = worst.max((self.gauge(theta.as_slice()) - g).abs() / g);
        }
        Ok(worst)
    }

    /// `sum mu_i theta_i theta_i^T` spans `R^n`.
    pub fn is_spanning(&self) -> bool {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for a in &self.atoms {
            let v = nalgebra::DVector::from_column_slice(&a.direction);
            m.ger(a.weight, &v, &v, 1.0);
        }
        let eig = sym_eigenvalues(&m);
        eig[0] > 1e-12 * eig[n - 1]
    }
}
