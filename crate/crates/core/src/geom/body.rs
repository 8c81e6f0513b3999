//! Body descriptions and their validated building blocks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{matrix_from_rows, matrix_to_rows};
use crate::quadra::SphereRule;
use crate::radon::GrassmannDensity;

/// Invertible linear map with its inverse and determinant cached.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidBody("linear map must be square".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("non-finite entry in linear map".into()));
        }
        let det = matrix.determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::SingularMap { det });
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMap { det })?;
        Ok(Self { matrix, inverse, det })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: DMatrix::identity(n, n), inverse: DMatrix::identity(n, n), det: 1.0 }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        LinearMap::new(&self.matrix * &inner.matrix)
    }

    pub fn inverse_transpose(&self) -> LinearMap {
        Self {
            matrix: self.inverse.transpose(),
            inverse: self.matrix.transpose(),
            det: 1.0 / self.det,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, x)
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.inverse, x)
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        mat_t_vec(&self.matrix, x)
    }
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = vec![0.0; r];
    for j in 0..c {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * xj;
        }
    }
    out
}

pub(crate) fn mat_t_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let (r, c) = m.shape();
    (0..c).map(|j| (0..r).map(|i| m[(i, j)] * x[i]).sum()).collect()
}

impl Serialize for LinearMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(&self.matrix).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let m = matrix_from_rows(&rows).map_err(serde::de::Error::custom)?;
        LinearMap::new(m).map_err(serde::de::Error::custom)
    }
}

/// Symmetric positive-definite matrix together with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl SpdMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidBody("ellipsoid matrix must be square".into()));
        }
        let asym = (&matrix - matrix.transpose()).abs().max();
        if asym > 1e-9 * (1.0 + matrix.abs().max()) {
            return Err(Error::InvalidBody("ellipsoid matrix is not symmetric".into()));
        }
        let sym = crate::linalg::symmetrize(&matrix);
        let chol = sym
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidBody("ellipsoid matrix is not positive definite".into()))?;
        let inverse = crate::linalg::symmetrize(&chol.inverse());
        Ok(Self { matrix: sym, inverse })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `x^T M x`
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        quad_form(&self.matrix, x)
    }

    pub fn inverse_quadratic(&self, x: &[f64]) -> f64 {
        quad_form(&self.inverse, x)
    }

    pub fn inverted(&self) -> SpdMatrix {
        SpdMatrix { matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }
}

fn quad_form(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for j in 0..n {
        let mut col = 0.0;
        for i in 0..n {
            col += m[(i, j)] * x[i];
        }
        acc += col * x[j];
    }
    acc
}

impl Serialize for SpdMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(&self.matrix).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpdMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let m = matrix_from_rows(&rows).map_err(serde::de::Error::custom)?;
        SpdMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// `l_p` exponent in `(0, inf]`; serialized as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1` (requires `p >= 1`).
    pub fn conjugate(self) -> Exponent {
        let p = self.0;
        if p.is_infinite() {
            Exponent(1.0)
        } else if p == 1.0 {
            Exponent(f64::INFINITY)
        } else {
            Exponent(p / (p - 1.0))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Str(s) if s == "inf" || s == "infinity" => Ok(Exponent(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("invalid exponent `{s}`"))),
        }
    }
}

/// One term `|<x, direction>|^p` of an `l_p`-section norm, with its weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub direction: Vec<f64>,
}

/// One summand `weight * rho_body^k` of a radial power sum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerTerm {
    pub weight: f64,
    pub body: Body,
}

/// Per-direction memo for bodies whose radial function is itself an integral.
///
/// Values are computed at the quantized direction, so the stored value depends
/// only on the key and never on which caller filled it.
#[derive(Default)]
pub struct RadialCache {
    pub(crate) rule: OnceLock<SphereRule>,
    values: Mutex<HashMap<Vec<i64>, f64>>,
}

impl std::fmt::Debug for RadialCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let len = self.values.lock().map(|m| m.len()).unwrap_or(0);
        f.debug_struct("RadialCache").field("entries", &len).finish()
    }
}

impl RadialCache {
    /// Quantization step of the cache key.
    pub const GRID: f64 = 1e-6;

    pub(crate) fn key(theta: &[f64]) -> Vec<i64> {
        theta.iter().map(|v| (v / Self::GRID).round() as i64).collect()
    }

    pub(crate) fn key_direction(key: &[i64]) -> Vec<f64> {
        let raw: Vec<f64> = key.iter().map(|&k| k as f64 * Self::GRID).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        raw.into_iter().map(|v| v / norm).collect()
    }

    pub(crate) fn get_or_compute(
        &self,
        theta: &[f64],
        compute: impl FnOnce(&[f64]) -> Result<f64>,
    ) -> Result<f64> {
        let key = Self::key(theta);
        if let Some(v) = self.values.lock().expect("cache poisoned").get(&key) {
            return Ok(*v);
        }
        let value = compute(&Self::key_direction(&key))?;
        self.values.lock().expect("cache poisoned").insert(key, value);
        Ok(value)
    }

    pub fn len(&self) -> usize {
        self.values.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn default_section_samples() -> usize {
    4096
}

fn default_radon_samples() -> usize {
    256
}

/// A centrally symmetric star (or convex) body in `R^n`.
///
/// The JSON form is tagged by `"type"`; nested bodies live under `"inner"`,
/// `"terms"` or `"body"`. Matrices are row-major arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Body {
    EuclideanBall {
        dim: usize,
        radius: f64,
    },
    /// `{x : x^T M x <= 1}`
    Ellipsoid {
        matrix: SpdMatrix,
    },
    LpBall {
        dim: usize,
        p: Exponent,
        radius: f64,
    },
    Cube {
        dim: usize,
        half_side: f64,
    },
    CrossPolytope {
        dim: usize,
        radius: f64,
    },
    /// `{x : |<a_i, x>| <= 1 for all rows a_i}`
    HPolytope {
        rows: Vec<Vec<f64>>,
    },
    /// Symmetric hull `conv(±v_j)`; listing both signs is allowed but not needed.
    VPolytope {
        vertices: Vec<Vec<f64>>,
    },
    /// Unit ball of `||x||^p = sum_i w_i |<x, u_i>|^p`.
    LpSection {
        p: f64,
        atoms: Vec<Atom>,
    },
    LinearImage {
        map: LinearMap,
        inner: Box<Body>,
    },
    Polar {
        inner: Box<Body>,
    },
    /// `rho^k = sum_j w_j rho_j^k`
    RadialPowerSum {
        k: u32,
        terms: Vec<PowerTerm>,
    },
    /// `rho(theta) = Vol_{n-1}(inner ∩ theta^perp)`
    IntersectionBodyOf {
        inner: Box<Body>,
        #[serde(default = "default_section_samples")]
        samples: usize,
        #[serde(default)]
        seed: u64,
        #[serde(skip)]
        cache: Arc<RadialCache>,
    },
    /// `rho^k = R*_{n-k}(g) / E[g]` for a catalog density `g` on `G(n, n-k)`.
    BusemannPettyDensity {
        dim: usize,
        k: usize,
        density: GrassmannDensity,
        normalizer: f64,
        #[serde(default = "default_radon_samples")]
        samples: usize,
        #[serde(default)]
        seed: u64,
        #[serde(skip)]
        cache: Arc<RadialCache>,
    },
}

impl Body {
    pub fn ball(dim: usize, radius: f64) -> Body {
        Body::EuclideanBall { dim, radius }
    }

    pub fn cube(dim: usize, half_side: f64) -> Body {
        Body::Cube { dim, half_side }
    }

    /// The volume-one cube `[-1/2, 1/2]^n`.
    pub fn unit_volume_cube(dim: usize) -> Body {
        Body::Cube { dim, half_side: 0.5 }
    }

    pub fn cross_polytope(dim: usize, radius: f64) -> Body {
        Body::CrossPolytope { dim, radius }
    }

    pub fn lp_ball(dim: usize, p: f64, radius: f64) -> Body {
        Body::LpBall { dim, p: Exponent(p), radius }
    }

    pub fn ellipsoid(matrix: DMatrix<f64>) -> Result<Body> {
        Ok(Body::Ellipsoid { matrix: SpdMatrix::new(matrix)? })
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn ellipsoid_axes(semi_axes: &[f64]) -> Result<Body> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            semi_axes.len(),
            semi_axes.iter().map(|a| 1.0 / (a * a)),
        ));
        Body::ellipsoid(d)
    }

    pub fn h_polytope(rows: Vec<Vec<f64>>) -> Result<Body> {
        let b = Body::HPolytope { rows };
        b.validate()?;
        Ok(b)
    }

    pub fn v_polytope(vertices: Vec<Vec<f64>>) -> Result<Body> {
        let b = Body::VPolytope { vertices };
        b.validate()?;
        Ok(b)
    }

    pub fn lp_section(p: f64, atoms: Vec<Atom>) -> Result<Body> {
        let b = Body::LpSection { p, atoms };
        b.validate()?;
        Ok(b)
    }

    pub fn radial_power_sum(k: u32, terms: Vec<PowerTerm>) -> Result<Body> {
        let b = Body::RadialPowerSum { k, terms };
        b.validate()?;
        Ok(b)
    }

    pub fn intersection_body(inner: Body) -> Result<Body> {
        Body::intersection_body_with(inner, default_section_samples(), 0)
    }

    pub fn intersection_body_with(inner: Body, samples: usize, seed: u64) -> Result<Body> {
        let b = Body::IntersectionBodyOf {
            inner: Box::new(inner),
            samples,
            seed,
            cache: Arc::default(),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn polar_of(inner: Body) -> Body {
        Body::Polar { inner: Box::new(inner) }
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::EuclideanBall { dim, .. }
            | Body::LpBall { dim, .. }
            | Body::Cube { dim, .. }
            | Body::CrossPolytope { dim, .. }
            | Body::BusemannPettyDensity { dim, .. } => *dim,
            Body::Ellipsoid { matrix } => matrix.dim(),
            Body::HPolytope { rows } => rows.first().map_or(0, Vec::len),
            Body::VPolytope { vertices } => vertices.first().map_or(0, Vec::len),
            Body::LpSection { atoms, .. } => atoms.first().map_or(0, |a| a.direction.len()),
            Body::LinearImage { map, .. } => map.dim(),
            Body::Polar { inner } | Body::IntersectionBodyOf { inner, .. } => inner.dim(),
            Body::RadialPowerSum { terms, .. } => terms.first().map_or(0, |t| t.body.dim()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Body::EuclideanBall { .. } => "euclidean_ball",
            Body::Ellipsoid { .. } => "ellipsoid",
            Body::LpBall { .. } => "lp_ball",
            Body::Cube { .. } => "cube",
            Body::CrossPolytope { .. } => "cross_polytope",
            Body::HPolytope { .. } => "h_polytope",
            Body::VPolytope { .. } => "v_polytope",
            Body::LpSection { .. } => "lp_section",
            Body::LinearImage { .. } => "linear_image",
            Body::Polar { .. } => "polar",
            Body::RadialPowerSum { .. } => "radial_power_sum",
            Body::IntersectionBodyOf { .. } => "intersection_body_of",
            Body::BusemannPettyDensity { .. } => "busemann_petty_density",
        }
    }

    /// Whether the body is known to be convex (so support and polar exist).
    pub fn is_convex(&self) -> bool {
        match self {
            Body::LpBall { p, .. } => p.0 >= 1.0,
            Body::LpSection { p, .. } => *p >= 1.0,
            Body::LinearImage { inner, .. } => inner.is_convex(),
            Body::Polar { inner } => inner.is_convex(),
            Body::RadialPowerSum { .. }
            | Body::IntersectionBodyOf { .. }
            | Body::BusemannPettyDensity { .. } => false,
            _ => true,
        }
    }

    /// Checks every structural invariant recursively.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::InvalidBody(format!("{}: dimension must be >= 1", self.kind())));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidBody(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            Body::EuclideanBall { radius, .. } | Body::CrossPolytope { radius, .. } => {
                positive("radius", *radius)
            }
            Body::Cube { half_side, .. } => positive("half_side", *half_side),
            Body::LpBall { p, radius, .. } => {
                if !(p.0 > 0.0) {
                    return Err(Error::InvalidBody(format!("p must be in (0, inf], got {}", p.0)));
                }
                positive("radius", *radius)
            }
            Body::Ellipsoid { .. } => Ok(()),
            Body::HPolytope { rows } => check_spanning("rows", rows, n),
            Body::VPolytope { vertices } => check_spanning("vertices", vertices, n),
            Body::LpSection { p, atoms } => {
                positive("p", *p)?;
                for a in atoms {
                    positive("atom weight", a.weight)?;
                }
                let dirs: Vec<Vec<f64>> = atoms.iter().map(|a| a.direction.clone()).collect();
                check_spanning("atom directions", &dirs, n)
            }
            Body::LinearImage { map, inner } => {
                if inner.dim() != map.dim() {
                    return Err(Error::DimensionMismatch { expected: map.dim(), got: inner.dim() });
                }
                inner.validate()
            }
            Body::Polar { inner } => {
                if !inner.is_convex() {
                    return Err(Error::NonConvexPolar(inner.kind()));
                }
                inner.validate()
            }
            Body::RadialPowerSum { k, terms } => {
                if *k < 1 {
                    return Err(Error::InvalidBody("radial power k must be >= 1".into()));
                }
                if terms.is_empty() {
                    return Err(Error::InvalidBody("radial power sum needs at least one term".into()));
                }
                for t in terms {
                    positive("term weight", t.weight)?;
                    if t.body.dim() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: t.body.dim() });
                    }
                    t.body.validate()?;
                }
                Ok(())
            }
            Body::IntersectionBodyOf { inner, samples, .. } => {
                if n < 2 {
                    return Err(Error::InvalidBody("intersection body needs n >= 2".into()));
                }
                if *samples < 2 {
                    return Err(Error::InvalidBody("intersection body needs >= 2 samples".into()));
                }
                inner.validate()
            }
            Body::BusemannPettyDensity { k, normalizer, samples, density, .. } => {
                if *k < 1 || *k >= n {
                    return Err(Error::RankOutOfRange { k: *k, max: n - 1 });
                }
                if *samples < 1 {
                    return Err(Error::InvalidBody("density body needs >= 1 sample".into()));
                }
                density.validate(n)?;
                positive("normalizer", *normalizer)
            }
        }
    }

    /// Stable content hash of the JSON description (hex sha-256 prefix).
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).unwrap_or_default();
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn from_json(text: &str) -> Result<Body> {
        // syntax errors carry a line; structural ones the path of the failing node
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let body: Body = serde_json::from_value(value.clone()).map_err(|_| {
            let (path, message) = failing_node(&value, "$".to_string());
            Error::Parse { location: path, message }
        })?;
        body.validate()?;
        Ok(body)
    }
}

/// Deepest nested body spec under `value` that fails to deserialize.
fn failing_node(value: &serde_json::Value, path: String) -> (String, String) {
    let mut children: Vec<(String, &serde_json::Value)> = Vec::new();
    if let Some(obj) = value.as_object() {
        for key in ["inner", "body"] {
            if let Some(v) = obj.get(key) {
                children.push((format!("{path}.{key}"), v));
            }
        }
        if let Some(terms) = obj.get("terms").and_then(|t| t.as_array()) {
            for (i, t) in terms.iter().enumerate() {
                if let Some(b) = t.get("body") {
                    children.push((format!("{path}.terms[{i}].body"), b));
                }
            }
        }
    }
    for (p, child) in children {
        if serde_json::from_value::<Body>(child.clone()).is_err() {
            return failing_node(child, p);
        }
    }
    let message = serde_json::from_value::<Body>(value.clone()).err().map_or_else(String::new, |e| e.to_string());
    (path, message)
}

fn check_spanning(what: &str, vectors: &[Vec<f64>], n: usize) -> Result<()> {
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidBody(format!("{what} have inconsistent lengths")));
    }
    if vectors.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidBody(format!("{what} contain non-finite values")));
    }
    if vectors.len() < n {
        return Err(Error::InvalidBody(format!("{what} do not span R^{n}")));
    }
    let m = DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
    let sv = m.singular_values();
    let max = sv.max();
    let rank = sv.iter().filter(|s| **s > 1e-10 * max.max(1e-300)).count();
    if rank < n {
        return Err(Error::InvalidBody(format!("{what} do not span R^{n} (rank {rank})")));
    }
    Ok(())
}
