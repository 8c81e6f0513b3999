//! Volumes, mean norms and inertia from one sphere rule.

use cgx::geom::Body;
use cgx::positions::isotropic_constant;
use cgx::quadra::{ball_volume, RadialProfile, SphereRule};

fn main() -> cgx::Result<()> {
    let n = 5;
    let rule = SphereRule::default_for(n, 1 << 16, 0)?;
    for body in [Body::ball(n, 1.0), Body::unit_volume_cube(n), Body::cross_polytope(n, 1.0), Body::lp_ball(n, 4.0, 1.0)] {
        let profile = RadialProfile::new(&body, &rule)?;
        let vol = profile.volume();
        let m1 = profile.mean_norm(1.0)?;
        let mr = profile.mean_radius(n as f64)?;
        let cov = profile.covariance();
        println!(
            "{:<16} vol {:.5} ± {:.1e}  M_1 {:.4}  MR_n {:.4}  Cov_11 {:.4}  L_K {:.4}",
            body.kind(),
            vol.value,
            vol.std_error,
            m1.value,
            mr.value,
            cov.matrix[(0, 0)],
            isotropic_constant(&body, &rule)?,
        );
    }
    // MR_n(K) is the volume radius times Vol(D_n)^{-1/n}
    println!("Vol(D_{n}) = {:.6}", ball_volume(n));
    Ok(())
}
