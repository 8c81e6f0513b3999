//! Dual mixed volumes and their SL(n) invariance.

use cgx::geom::Body;
use cgx::linalg::{gaussian_matrix, normalize_det, rng};
use cgx::quadra::{dual_mixed_volume, volume, SphereRule};
use nalgebra::DMatrix;

fn main() -> cgx::Result<()> {
    let n = 4;
    let rule = SphereRule::default_for(n, 1 << 16, 1)?;
    let l = Body::lp_ball(n, 3.0, 1.0);
    let k = Body::cross_polytope(n, 1.5);

    // Ṽ_n(L, K) = Vol(L) and Ṽ_0(L, K) = Vol(K)
    println!("Vol(L) = {:.5}, Ṽ_n = {:.5}", volume(&l, &rule)?.value, dual_mixed_volume(&l, &k, n as f64, &rule)?.value);
    println!("Vol(K) = {:.5}, Ṽ_0 = {:.5}", volume(&k, &rule)?.value, dual_mixed_volume(&l, &k, 0.0, &rule)?.value);

    let mut r = rng(7, 0);
    let t = normalize_det(&(DMatrix::identity(n, n) + gaussian_matrix(&mut r, n, n) * 0.4))?;
    for p in [-1.0, 1.0, 2.5] {
        let a = dual_mixed_volume(&l, &k, p, &rule)?;
        let b = dual_mixed_volume(&l.apply_matrix(&t)?, &k.apply_matrix(&t)?, p, &rule)?;
        println!("p = {p:>4}: Ṽ_p = {:.5} ± {:.1e}, after T: {:.5} ± {:.1e}", a.value, a.std_error, b.value, b.std_error);
    }
    Ok(())
}
