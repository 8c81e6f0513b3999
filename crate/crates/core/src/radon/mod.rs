//! Spherical Radon transforms and Busemann-Petty bodies.

mod density;
mod kernel;
mod transforms;

pub use density::{GrassmannDensity, MixtureTerm};
pub use kernel::{
    approx_unity_ellipsoid, kernel_average, mr_ratio_demo, ApproxUnityParams, MrRatioRow, DEFAULT_SCHEDULE,
    EXTENDED_SCHEDULE,
};
pub use transforms::{
    bp_body_from_density, bp_body_from_ellipsoids, density_mean, dual_radon_m, dual_radon_with_frames,
    intersection_radius, radon_m, DensityBodyOptions,
};

pub(crate) use transforms::intersection_radius_with_rule;
