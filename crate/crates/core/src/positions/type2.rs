use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_direction, rng};
use crate::geom::Body;
use crate::quadra::{mean_norm, volume, SphereRule};

use super::{isotropic_constant, isotropic_position, lowner_position};

/// Lower bounds only: the constants are suprema over all finite sequences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeCotypeEstimate {
    pub lower_bound_t2: f64,
    pub lower_bound_c2: f64,
    pub trials: usize,
    pub seed: u64,
}

/// `(E ||sum g_i x_i||_K^2)^{1/2} / (sum ||x_i||_K^2)^{1/2}` maximized over trial sequences.
///
/// Trial 0 uses the coordinate vectors (cycled when `m > n`); the rest use random
/// boundary points `rho(theta) theta`. The cotype bound uses the reciprocal ratio.
pub fn type2_lower_bound(body: &Body, m: usize, trials: usize, gaussian_n: usize, seed: u64) -> Result<TypeCotypeEstimate> {
    if m == 0 || trials == 0 || gaussian_n == 0 {
        return Err(Error::InvalidArgument("m, trials and gaussian_n must be >= 1".into()));
    }
    let n = body.dim();
    let mut t2 = 1.0_f64;
    let mut c2 = 1.0_f64;
    for trial in 0..trials {
        let mut r = rng(seed, 100 + trial as u64);
        let xs: Vec<Vec<f64>> = (0..m)
            .map(|i| -> Result<Vec<f64>> {
                if trial == 0 {
                    let mut e = vec![0.0; n];
                    e[i % n] = 1.0;
                    Ok(e)
                } else {
                    let theta = random_direction(&mut r, n);
                    let rho = body.radial_unchecked(theta.as_slice())?;
                    Ok(theta.iter().map(|t| t * rho).collect())
                }
            })
            .collect::<Result<_>>()?;
        let mut denom = 0.0;
        for x in &xs {
            denom += body.gauge(x)?.powi(2);
        }
        let mut num = 0.0;
        let mut sum = vec![0.0; n];
        for _ in 0..gaussian_n {
            sum.iter_mut().for_each(|s| *s = 0.0);
            for x in &xs {
                let g: f64 = r.sample(StandardNormal);
                for (s, xi) in sum.iter_mut().zip(x) {
                    *s += g * xi;
                }
            }
            num += body.gauge(&sum)?.powi(2);
        }
        let ratio = (num / gaussian_n as f64).sqrt() / denom.sqrt();
        t2 = t2.max(ratio);
        c2 = c2.max(1.0 / ratio);
    }
    Ok(TypeCotypeEstimate { lower_bound_t2: t2, lower_bound_c2: c2, trials, seed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LkPosition {
    Isotropic,
    Lowner,
}

/// `L_K sqrt(n) M_2(K) / T_2` with `K` positioned and scaled to volume one.
pub fn lk_type2_bound_check(body: &Body, t2: f64, rule: &SphereRule, position: LkPosition) -> Result<f64> {
    if !(t2 > 0.0) {
        return Err(Error::InvalidArgument(format!("type-2 reference must be positive, got {t2}")));
    }
    let n = body.dim();
    let map = match position {
        LkPosition::Isotropic => isotropic_position(body, 1e-9, 50, rule)?.position,
        LkPosition::Lowner => lowner_position(body, rule, 1e-7)?,
    };
    let positioned = map.apply(body)?;
    let vol = volume(&positioned, rule)?.value;
    let unit = positioned.scaled(vol.powf(-1.0 / n as f64))?;
    let l = isotropic_constant(body, rule)?;
    let m2 = mean_norm(&unit, 2.0, rule)?.value;
    Ok(l * (n as f64).sqrt() * m2 / t2)
}
