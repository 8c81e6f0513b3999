//! Approximation-of-unity ellipsoids and the mean-radius ratio probe.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dot, norm2, Body};
use crate::linalg::orthogonal_complement;
use crate::quadra::{default_subsphere_rule, SphereRule};

/// `||x||^2 = <x, xi>^2 / a^2 + (|x|^2 - <x, xi>^2) / b^2`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxUnityParams {
    pub xi: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl ApproxUnityParams {
    pub fn new(xi: &[f64], a: f64, b: f64) -> Result<Self> {
        let r = norm2(xi);
        if !(r > 0.0) {
            return Err(Error::InvalidArgument("xi must be nonzero".into()));
        }
        if !(a >= 1.0 && b > 0.0 && b <= 1.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!("need a >= 1 >= b > 0, got a = {a}, b = {b}")));
        }
        Ok(Self { xi: xi.iter().map(|v| v / r).collect(), a, b })
    }

    /// `rho(theta)` in closed form.
    pub fn radial(&self, theta: &[f64]) -> f64 {
        let c = dot(theta, &self.xi);
        let s2 = (1.0 - c * c).max(0.0);
        1.0 / (c * c / (self.a * self.a) + s2 / (self.b * self.b)).sqrt()
    }
}

/// The default four-step schedule.
pub const DEFAULT_SCHEDULE: [(f64, f64); 4] = [(2.0, 0.5), (4.0, 0.25), (8.0, 0.12), (16.0, 0.06)];

/// The default schedule continued by halving `b` and doubling `a`. The kernel
/// error decays like `1 / log(a/b)`, so the endpoints need `a/b` near `10^5`.
pub const EXTENDED_SCHEDULE: [(f64, f64); 9] = [
    (2.0, 0.5),
    (4.0, 0.25),
    (8.0, 0.12),
    (16.0, 0.06),
    (32.0, 0.03),
    (64.0, 0.015),
    (128.0, 0.0075),
    (256.0, 0.00375),
    (512.0, 0.001875),
];

pub fn approx_unity_ellipsoid(params: &ApproxUnityParams) -> Result<Body> {
    let n = params.xi.len();
    let xi = DVector::from_column_slice(&params.xi);
    let p = &xi * xi.transpose();
    let m = &p / (params.a * params.a) + (DMatrix::identity(n, n) - &p) / (params.b * params.b);
    Body::ellipsoid(m)
}

/// Log-spaced angular nodes for the geodesic polar rule about `xi`.
const ANGLE_NODES: usize = 600;
const SUBSPHERE_POINTS: usize = 96;

/// `\int f rho^{n-1} dsigma / \int rho^{n-1} dsigma` for the kernel of `params`.
///
/// Integrates in geodesic polar coordinates `theta = cos(phi) xi + sin(phi) eta`
/// with `phi` on a logarithmic grid, since the kernel mass is spread over many scales.
pub fn kernel_average<F>(f: F, params: &ApproxUnityParams) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = params.xi.len();
    if n < 2 {
        return Err(Error::InvalidArgument("kernel needs n >= 2".into()));
    }
    let frame = orthogonal_complement(&params.xi);
    let sub: SphereRule = default_subsphere_rule(n - 1, SUBSPHERE_POINTS, 0x6b65726e);
    let etas: Vec<Vec<f64>> = sub.points().map(|z| crate::geom::mat_vec(&frame, z)).collect();
    let ne = n as i32 - 1;
    // phi in (0, pi/2] on a log grid, mirrored to [pi/2, pi) through theta -> -cos, +sin
    let lo = (1e-6 * params.b / params.a).ln();
    let hi = std::f64::consts::FRAC_PI_2.ln();
    let h = (hi - lo) / (ANGLE_NODES - 1) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut log_scale: Option<f64> = None;
    for k in 0..ANGLE_NODES {
        let phi = (lo + h * k as f64).exp();
        let tw = if k == 0 || k == ANGLE_NODES - 1 { 0.5 } else { 1.0 };
        let (s, c) = phi.sin_cos();
        // kernel factor rho^{n-1} sin^{n-2}(phi) phi (log-variable Jacobian), in log form
        let rho = 1.0 / (c * c / (params.a * params.a) + s * s / (params.b * params.b)).sqrt();
        let lw = (ne as f64) * rho.ln() + (n as f64 - 2.0) * s.ln() + phi.ln();
        let base = *log_scale.get_or_insert(lw);
        let w = tw * (lw - base).exp();
        for sign in [1.0, -1.0] {
            let mut acc = 0.0;
            for eta in &etas {
                let theta: Vec<f64> = params.xi.iter().zip(eta).map(|(x, e)| sign * c * x + s * e).collect();
                acc += f(&theta)?;
            }
            acc /= etas.len() as f64;
            num += w * acc;
            den += w;
        }
    }
    if !(den > 0.0) || !num.is_finite() {
        return Err(Error::NumericOverflow { direction: params.xi.clone() });
    }
    Ok(num / den)
}

/// One row of the mean-radius ratio table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MrRatioRow {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
    pub target: f64,
    pub relative_error: f64,
}

/// Kernel-weighted ratio `\int rho_D rho^{n-1} / \int rho_Q rho^{n-1}` for the
/// volume-one cube `Q` and its circumscribed ball `D`, per schedule step.
pub fn mr_ratio_demo(n: usize, xi: &[f64], schedule: &[(f64, f64)]) -> Result<Vec<MrRatioRow>> {
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.len() });
    }
    let cube = Body::unit_volume_cube(n);
    let rho_d = (n as f64).sqrt() / 2.0;
    let xi_unit: Vec<f64> = {
        let r = norm2(xi);
        xi.iter().map(|v| v / r).collect()
    };
    let target = rho_d / cube.radial(&xi_unit)?;
    schedule
        .iter()
        .map(|&(a, b)| {
            let params = ApproxUnityParams::new(xi, a, b)?;
            let q = kernel_average(|t| cube.radial_unchecked(t), &params)?;
            let ratio = rho_d / q;
            Ok(MrRatioRow { a, b, ratio, target, relative_error: (ratio - target).abs() / target })
        })
        .collect()
}
