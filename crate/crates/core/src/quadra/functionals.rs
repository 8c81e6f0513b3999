//! Scalar functionals of bodies by polar integration over a sphere rule.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geom::{dot, refine_max, refine_min, Body};
use crate::linalg::sym_eigenvalues;

use super::integrate::{rule_mean, QuadratureEstimate};
use super::rule::{SphereRule, SubspaceFrame};

/// `Vol(D_n) = pi^{n/2} / Gamma(n/2 + 1)`.
pub fn ball_volume(n: usize) -> f64 {
    if n <= 40 {
        // V_n = (2 pi / n) V_{n-2}
        let (mut v, start) = if n % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
        let mut k = start;
        while k <= n {
            v *= std::f64::consts::TAU / k as f64;
            k += 2;
        }
        return v;
    }
    let nf = n as f64;
    (0.5 * nf * std::f64::consts::PI.ln() - ln_gamma(0.5 * nf + 1.0)).exp()
}

/// Surface area of `S^{n-1}`, `n Vol(D_n)`.
///
/// This is the only place where an integral against Lebesgue surface measure
/// is converted to the normalized measure: `\int_{S^{n-1}} f = surface_area(n) E_sigma[f]`.
pub fn surface_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

fn check_rule(body: &Body, rule: &SphereRule) -> Result<()> {
    if body.dim() != rule.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: rule.dim() });
    }
    Ok(())
}

/// Radial function tabulated on a rule, shared by every functional below.
#[derive(Clone, Debug)]
pub struct RadialProfile<'a> {
    rule: &'a SphereRule,
    rho: Vec<f64>,
}

impl<'a> RadialProfile<'a> {
    pub fn new(body: &Body, rule: &'a SphereRule) -> Result<Self> {
        check_rule(body, rule)?;
        let rho = rule.map_points(|theta| body.radial_unchecked(theta))?;
        Ok(Self { rule, rho })
    }

    pub fn rule(&self) -> &SphereRule {
        self.rule
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    fn dim(&self) -> usize {
        self.rule.dim()
    }

    fn mean_of(&self, f: impl Fn(usize, f64) -> f64) -> QuadratureEstimate {
        let values: Vec<f64> = self.rho.iter().enumerate().map(|(i, r)| f(i, *r)).collect();
        rule_mean(self.rule, &values)
    }

    /// `Vol(K) = Vol(D_n) E[rho^n]`
    pub fn volume(&self) -> QuadratureEstimate {
        let n = self.dim() as i32;
        self.mean_of(|_, r| r.powi(n)).scale(ball_volume(self.dim()))
    }

    /// `MR_p = (E[rho^p])^{1/p}`
    pub fn mean_radius(&self, p: f64) -> Result<QuadratureEstimate> {
        if !(p > 0.0) {
            return Err(Error::InvalidArgument(format!("mean radius needs p > 0, got {p}")));
        }
        Ok(self.mean_of(|_, r| r.powf(p)).powf(1.0 / p))
    }

    /// `M_p = (E[rho^{-p}])^{1/p}`; `p = 0` is the geometric mean.
    pub fn mean_norm(&self, p: f64) -> Result<QuadratureEstimate> {
        if p < 0.0 {
            return Err(Error::InvalidArgument(format!("mean norm needs p >= 0, got {p}")));
        }
        if p == 0.0 {
            if let Some(i) = self.rho.iter().position(|r| !r.is_finite()) {
                return Err(Error::LogOfZero { direction: self.rule.point(i).to_vec() });
            }
            return Ok(self.mean_of(|_, r| -r.ln()).exp());
        }
        Ok(self.mean_of(|_, r| r.powf(-p)).powf(1.0 / p))
    }

    /// `\int_K |<x, theta>|^p dx`, before taking the `1/p` power.
    pub fn absolute_moment(&self, theta: &[f64], p: f64) -> Result<QuadratureEstimate> {
        if !(p > 0.0) {
            return Err(Error::InvalidArgument(format!("moment needs p > 0, got {p}")));
        }
        let n = self.dim();
        let e = n as f64 + p;
        let rule = self.rule;
        Ok(self
            .mean_of(|i, r| dot(rule.point(i), theta).abs().powf(p) * r.powf(e))
            .scale(surface_area(n) / e))
    }

    /// `(\int_K |<x, theta>|^p dx)^{1/p}`
    pub fn moment(&self, theta: &[f64], p: f64) -> Result<QuadratureEstimate> {
        Ok(self.absolute_moment(theta, p)?.powf(1.0 / p))
    }

    /// Inertia matrix `\int_K x x^T dx`.
    pub fn covariance(&self) -> CovarianceEstimate {
        let n = self.dim();
        let c = surface_area(n) / (n as f64 + 2.0);
        let e = n as i32 + 2;
        let mut matrix = DMatrix::zeros(n, n);
        let mut std_error = DMatrix::zeros(n, n);
        let rule = self.rule;
        for i in 0..n {
            for j in i..n {
                let est = self
                    .mean_of(|t, r| {
                        let u = rule.point(t);
                        u[i] * u[j] * r.powi(e)
                    })
                    .scale(c);
                matrix[(i, j)] = est.value;
                matrix[(j, i)] = est.value;
                std_error[(i, j)] = est.std_error;
                std_error[(j, i)] = est.std_error;
            }
        }
        CovarianceEstimate { matrix, std_error, samples: self.rho.len() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceEstimate {
    pub matrix: DMatrix<f64>,
    pub std_error: DMatrix<f64>,
    pub samples: usize,
}

impl CovarianceEstimate {
    pub fn max_std_error(&self) -> f64 {
        self.std_error.max()
    }
}

pub fn volume(body: &Body, rule: &SphereRule) -> Result<QuadratureEstimate> {
    Ok(RadialProfile::new(body, rule)?.volume())
}

/// `Ṽ_p(L1, L2) = Vol(D_n) E[rho_1^p rho_2^{n-p}]`
pub fn dual_mixed_volume(l1: &Body, l2: &Body, p: f64, rule: &SphereRule) -> Result<QuadratureEstimate> {
    let a = RadialProfile::new(l1, rule)?;
    let b = RadialProfile::new(l2, rule)?;
    dual_mixed_volume_profiles(&a, &b, p)
}

pub fn dual_mixed_volume_profiles(
    a: &RadialProfile<'_>,
    b: &RadialProfile<'_>,
    p: f64,
) -> Result<QuadratureEstimate> {
    let rule = a.rule;
    if b.rule.len() != rule.len() || b.rule.dim() != rule.dim() {
        return Err(Error::InvalidArgument("profiles must share a rule".into()));
    }
    let n = rule.dim();
    let q = n as f64 - p;
    let mut values = Vec::with_capacity(rule.len());
    for (i, (r1, r2)) in a.rho.iter().zip(&b.rho).enumerate() {
        let v = r1.powf(p) * r2.powf(q);
        if !v.is_finite() {
            return Err(Error::NumericOverflow { direction: rule.point(i).to_vec() });
        }
        values.push(v);
    }
    Ok(rule_mean(rule, &values).scale(ball_volume(n)))
}

pub fn mean_norm(body: &Body, p: f64, rule: &SphereRule) -> Result<QuadratureEstimate> {
    RadialProfile::new(body, rule)?.mean_norm(p)
}

pub fn mean_radius(body: &Body, p: f64, rule: &SphereRule) -> Result<QuadratureEstimate> {
    RadialProfile::new(body, rule)?.mean_radius(p)
}

/// `M*_p(K) = M_p(K°)`
pub fn mean_width(body: &Body, p: f64, rule: &SphereRule) -> Result<QuadratureEstimate> {
    mean_norm(&body.polar()?, p, rule)
}

pub fn moment_p(body: &Body, theta: &[f64], p: f64, rule: &SphereRule) -> Result<QuadratureEstimate> {
    RadialProfile::new(body, rule)?.moment(theta, p)
}

pub fn covariance(body: &Body, rule: &SphereRule) -> Result<CovarianceEstimate> {
    Ok(RadialProfile::new(body, rule)?.covariance())
}

/// `Vol_m(K ∩ E) = Vol(D_m) E_xi[rho_K(F xi)^m]` with `sub_rule` on `S^{m-1}`.
pub fn section_volume(body: &Body, frame: &SubspaceFrame, sub_rule: &SphereRule) -> Result<QuadratureEstimate> {
    let m = frame.rank();
    if frame.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: frame.dim() });
    }
    if sub_rule.dim() != m {
        return Err(Error::BadRank { n: frame.dim(), m: sub_rule.dim() });
    }
    let mi = m as i32;
    let values = sub_rule.map_points(|xi| Ok(body.radial_unchecked(&frame.embed(xi))?.powi(mi)))?;
    Ok(rule_mean(sub_rule, &values).scale(ball_volume(m)))
}

/// Circumradius `a` and inradius `1/b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Radii {
    pub circumradius: f64,
    pub inradius: f64,
}

impl Radii {
    /// `a(K)`
    pub fn a(&self) -> f64 {
        self.circumradius
    }

    /// `b(K)`, the reciprocal of the inradius.
    pub fn b(&self) -> f64 {
        1.0 / self.inradius
    }
}

/// Exact for balls, ellipsoids, cubes, cross-polytopes and `l_p` balls, and for
/// the explicit side of H/V-polytopes; otherwise the rule extremes refined by
/// local search.
pub fn circumradius_inradius(body: &Body, rule: &SphereRule) -> Result<Radii> {
    let n = body.dim();
    let nf = n as f64;
    let exact = match body {
        Body::EuclideanBall { radius, .. } => Some((*radius, *radius)),
        Body::Ellipsoid { matrix } => {
            let eig = sym_eigenvalues(matrix.matrix());
            Some((1.0 / eig[0].sqrt(), 1.0 / eig[n - 1].sqrt()))
        }
        Body::Cube { half_side, .. } => Some((half_side * nf.sqrt(), *half_side)),
        Body::CrossPolytope { radius, .. } => Some((*radius, radius / nf.sqrt())),
        Body::LpBall { p, radius, .. } => {
            let e = 0.5 - 1.0 / p.0;
            let s = nf.powf(e);
            Some(if e >= 0.0 { (radius * s, *radius) } else { (*radius, radius * s) })
        }
        _ => None,
    };
    if let Some((a, r)) = exact {
        return Ok(Radii { circumradius: a, inradius: r });
    }
    check_rule(body, rule)?;
    let rho = rule.map_points(|t| body.radial_unchecked(t))?;
    let radial = |t: &[f64]| body.radial_unchecked(t);
    let mut order: Vec<usize> = (0..rho.len()).collect();
    order.sort_by(|&x, &y| rho[x].total_cmp(&rho[y]).then(x.cmp(&y)));
    let explicit_in = match body {
        Body::HPolytope { rows } => {
            Some(1.0 / rows.iter().map(|a| crate::geom::norm2(a)).fold(0.0, f64::max))
        }
        _ => None,
    };
    let explicit_out = match body {
        Body::VPolytope { vertices } => {
            Some(vertices.iter().map(|v| crate::geom::norm2(v)).fold(0.0, f64::max))
        }
        _ => None,
    };
    let inradius = match explicit_in {
        Some(v) => v,
        None => {
            let mut best = rho[order[0]];
            if n >= 2 {
                for &i in order.iter().take(6) {
                    best = best.min(refine_min(&radial, rule.point(i), rho[i])?.0);
                }
            }
            best
        }
    };
    let circumradius = match explicit_out {
        Some(v) => v,
        None => {
            let mut best = rho[*order.last().expect("non-empty rule")];
            if n >= 2 {
                for &i in order.iter().rev().take(6) {
                    best = best.max(refine_max(&radial, rule.point(i), rho[i])?.0);
                }
            }
            best
        }
    };
    Ok(Radii { circumradius, inradius })
}
