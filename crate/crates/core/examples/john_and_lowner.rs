//! John and Löwner positions, contact decompositions and the MVEE solver.

use cgx::geom::Body;
use cgx::linalg::{random_direction, rng};
use cgx::positions::{gaussian_mixture_check, john_decomposition, john_position, lowner_position, mvee};
use cgx::quadra::SphereRule;
use nalgebra::DMatrix;

fn main() -> cgx::Result<()> {
    let n = 3;
    let rule = SphereRule::default_for(n, 8192, 0)?;
    let body = Body::cube(n, 1.0).apply_matrix(&DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]))?;

    let lowner = lowner_position(&body, &rule, 1e-9)?;
    let john = john_position(&body, &rule, 1e-9)?;
    println!("Löwner map (gap {:.1e}) = {:.4}", lowner.residual, lowner.map);
    println!("John map (gap {:.1e}) = {:.4}", john.residual, john.map);

    let measure = john_decomposition(&Body::cube(4, 1.0), 1e-4)?;
    println!("cube contacts: {} atoms, total weight {:.6}, residual {:.1e}", measure.atoms.len(), measure.total_weight(), measure.residual());
    let g = gaussian_mixture_check(&measure, 50_000, 1)?;
    println!("sum g_i sqrt(λ_i) v_i: |Cov - I| = {:.4}, |mean| = {:.4}", g.spectral_error, g.mean_norm);

    let mut r = rng(2, 0);
    let axes = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 0.25]));
    let points: Vec<Vec<f64>> = (0..500).map(|_| (&axes * random_direction(&mut r, n)).iter().copied().collect()).collect();
    let fit = mvee(&points, 1e-10)?;
    println!("MVEE of 500 boundary points: {} iterations, diag = {:.4?}", fit.iterations, fit.matrix.diagonal().as_slice());
    Ok(())
}
