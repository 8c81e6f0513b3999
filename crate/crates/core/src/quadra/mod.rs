//! Seeded integration over spheres, subspheres, Grassmannians and body interiors.

mod functionals;
mod integrate;
mod rule;
mod sampling;

pub use functionals::{
    ball_volume, circumradius_inradius, covariance, dual_mixed_volume, dual_mixed_volume_profiles,
    mean_norm, mean_radius, mean_width, moment_p, section_volume, surface_area, volume,
    CovarianceEstimate, RadialProfile, Radii,
};
pub use integrate::{rule_mean, sample_mean, QuadratureEstimate};
pub use rule::{
    default_subsphere_rule, direction_stream, grassmann_sample, RuleKind, SphereRule, SubspaceFrame,
};
pub use sampling::{bounding_radius, sample_interior, SamplingMethod};
