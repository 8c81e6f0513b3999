//! Whitening a sheared cube into isotropic position.

use cgx::geom::Body;
use cgx::positions::isotropic_position;
use cgx::quadra::{covariance, SphereRule};
use nalgebra::DMatrix;

fn main() -> cgx::Result<()> {
    let n = 3;
    let mut shear = DMatrix::identity(n, n);
    shear[(0, 1)] = 0.9;
    shear[(1, 2)] = -0.5;
    let body = Body::unit_volume_cube(n).apply_matrix(&shear)?;
    let rule = SphereRule::default_for(n, 1 << 15, 0)?;

    let report = isotropic_position(&body, 1e-6, 50, &rule)?;
    println!("iterations {} residual {:.2e}", report.position.iterations, report.position.residual);
    println!("L_K = {:.6} (cube: {:.6})", report.isotropic_constant, 1.0 / 12f64.sqrt());
    println!("T = {:.4}", report.position.map);
    let positioned = report.position.apply(&body)?;
    println!("Cov(TK) = {:.5}", covariance(&positioned, &rule)?.matrix);
    Ok(())
}
