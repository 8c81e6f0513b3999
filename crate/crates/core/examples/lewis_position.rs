//! Lewis position of a finite l_p sum and the resulting isotropic measure.

use cgx::linalg::{random_direction, rng};
use cgx::positions::lewis_position;

fn main() -> cgx::Result<()> {
    let (n, m, p) = (4, 10, 3.0);
    let mut r = rng(3, 0);
    let u: Vec<Vec<f64>> = (0..m).map(|_| random_direction(&mut r, n).iter().map(|v| v * 1.5).collect()).collect();
    let c = vec![1.0; m];

    let res = lewis_position(&c, &u, p, 1e-12, 1000)?;
    println!("iterations {} residual {:.2e}", res.position.iterations, res.position.residual);
    let measure = res.measure();
    println!("sum λ_i = {:.8} (n = {n}), |sum λ θθ^T - I| = {:.2e}", measure.total_weight(), measure.residual());
    for (w, d) in res.weights.iter().zip(&res.directions).take(3) {
        println!("λ = {w:.5}  θ = {d:.4?}");
    }
    Ok(())
}
