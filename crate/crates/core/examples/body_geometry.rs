//! Gauges, radial and support functions, polars and JSON specs.

use cgx::geom::{contains, Body};
use cgx::quadra::SphereRule;

fn main() -> cgx::Result<()> {
    let cube = Body::cube(3, 1.0);
    let x = [0.5, -0.25, 0.75];
    println!("||x||_Q = {:.4}", cube.gauge(&x)?);
    println!("h_Q(x)  = {:.4}", cube.support(&x)?);

    let theta = [1.0 / 3f64.sqrt(); 3];
    println!("rho_Q(theta) = {:.4}", cube.radial(&theta)?);

    // the polar of the cube is the cross-polytope
    let polar = cube.polar()?;
    println!("rho_Q°(e_1) = {:.4}", polar.radial(&[1.0, 0.0, 0.0])?);

    let rule = SphereRule::default_for(3, 4096, 0)?;
    let inside = contains(&cube, &Body::ball(3, 1.0), &rule)?;
    println!("D_3 in Q: {} (worst ratio {:.4})", inside.contained, inside.worst_ratio);

    let spec = r#"{"type": "linear_image", "map": [[2, 0, 0], [0, 1, 0], [0, 0, 0.5]],
                   "inner": {"type": "lp_ball", "dim": 3, "p": 3, "radius": 1}}"#;
    let body = Body::from_json(spec)?;
    println!("{} with hash {}", body.kind(), body.content_hash());
    println!("{}", serde_json::to_string(&body).expect("bodies serialize"));
    Ok(())
}
