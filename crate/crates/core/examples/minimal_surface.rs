//! Minimal surface-area position of polytopes.

use cgx::geom::Body;
use cgx::positions::{facet_areas, minimal_surface_position};
use nalgebra::DMatrix;

fn main() -> cgx::Result<()> {
    let stretch = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 0.0, 1.0 / 3.0]);
    let body = Body::cube(2, 1.0).apply_matrix(&stretch)?;
    println!("facet lengths before: {:.4?}", facet_areas(&body)?);
    let t = minimal_surface_position(&body, 1e-10, 500)?;
    let after = t.apply(&body)?;
    println!("facet lengths after:  {:.4?}", facet_areas(&after)?);
    println!("iterations {} residual {:.2e}", t.iterations, t.residual);

    let cross = Body::cross_polytope(4, 1.0);
    let areas = facet_areas(&cross)?;
    println!("cross-polytope in R^4: {} facet pairs, area {:.4}", areas.len(), areas[0]);
    Ok(())
}
