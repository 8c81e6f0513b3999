//! Lower bounds for type-2 and cotype-2 constants of l_p balls.

use cgx::geom::Body;
use cgx::positions::type2_lower_bound;

fn main() -> cgx::Result<()> {
    let n = 4;
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        let est = type2_lower_bound(&Body::lp_ball(n, p, 1.0), 2 * n, 64, 4096, 0)?;
        println!("l_{p:<3} T_2 >= {:.4}  C_2 >= {:.4}", est.lower_bound_t2, est.lower_bound_c2);
    }
    Ok(())
}
