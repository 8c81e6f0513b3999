//! Spherical Radon transforms, intersection bodies and Busemann-Petty bodies.

use cgx::geom::Body;
use cgx::quadra::{default_subsphere_rule, volume, SphereRule, SubspaceFrame};
use cgx::radon::{
    bp_body_from_density, bp_body_from_ellipsoids, dual_radon_m, intersection_radius, radon_m, DensityBodyOptions,
    GrassmannDensity,
};
use nalgebra::DMatrix;

fn main() -> cgx::Result<()> {
    let n = 4;
    let frame = SubspaceFrame::new(DMatrix::identity(n, 2))?;
    let r = radon_m(|x| Ok(x[0].powi(4)), &frame, &default_subsphere_rule(2, 4096, 0))?;
    println!("R_2(x_1^4)(span e_1, e_2) = {:.5} (exact 3/8)", r.value);

    let g = GrassmannDensity::exp_trace(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])));
    let theta = [0.0, 1.0, 0.0, 0.0];
    println!("R*_2 g(e_2) = {:.5}", dual_radon_m(&g, &theta, 2, 4096, 0)?.value);

    // the intersection body of the ball is a ball of radius Vol(D_{n-1})
    let sub = default_subsphere_rule(n - 1, 4096, 0);
    println!("Vol_3(D_4 ∩ e_1^perp) = {:.5}", intersection_radius(&Body::ball(n, 1.0), &[1.0, 0.0, 0.0, 0.0], &sub)?.value);
    let ib = Body::intersection_body(Body::cube(3, 1.0))?;
    println!("rho_IQ(e_3) = {:.4}", ib.radial(&[0.0, 0.0, 1.0])?);

    let terms = vec![(0.5, Body::ellipsoid_axes(&[2.0, 1.0, 1.0, 0.5])?), (0.5, Body::ball(n, 1.0))];
    let bp = bp_body_from_ellipsoids(2, terms)?;
    let rule = SphereRule::default_for(n, 1 << 14, 0)?;
    println!("2-radial sum of ellipsoids: volume {:.5}", volume(&bp, &rule)?.value);

    let density_body = bp_body_from_density(n, 1, g, DensityBodyOptions::default())?;
    println!("density body rho(e_1) = {:.4}, rho(e_4) = {:.4}", density_body.radial(&[1.0, 0.0, 0.0, 0.0])?, density_body.radial(&[0.0, 0.0, 0.0, 1.0])?);
    Ok(())
}
