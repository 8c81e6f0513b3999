//! Central sections through random subspaces.

use cgx::geom::Body;
use cgx::quadra::{default_subsphere_rule, grassmann_sample, sample_mean, section_volume};

fn main() -> cgx::Result<()> {
    let (n, m) = (5, 2);
    let cube = Body::unit_volume_cube(n);
    let sub = default_subsphere_rule(m, 2048, 0);
    let frames = grassmann_sample(n, m, 400, 11)?;
    let vols: Vec<f64> = frames.iter().map(|f| section_volume(&cube, f, &sub).map(|e| e.value)).collect::<cgx::Result<_>>()?;
    let mean = sample_mean(&vols);
    let max = vols.iter().copied().fold(0.0, f64::max);
    let min = vols.iter().copied().fold(f64::INFINITY, f64::min);
    println!("Vol_2(Q_5 ∩ E) over {} subspaces: mean {:.4} ± {:.4}, range [{min:.4}, {max:.4}]", vols.len(), mean.value, mean.std_error);
    Ok(())
}
