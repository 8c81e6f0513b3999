//! Kernel ellipsoids concentrating at a direction, and the mean-radius ratio table.

use cgx::radon::{kernel_average, mr_ratio_demo, ApproxUnityParams, DEFAULT_SCHEDULE, EXTENDED_SCHEDULE};

fn main() -> cgx::Result<()> {
    let xi = [1.0, 0.0, 0.0];
    let f = |x: &[f64]| Ok(x[0] * x[0] + x[1]);
    for (a, b) in DEFAULT_SCHEDULE {
        let params = ApproxUnityParams::new(&xi, a, b)?;
        println!("a = {a:>5}, b = {b:<6} kernel average of f: {:.5} (f(xi) = 1)", kernel_average(f, &params)?);
    }

    let n = 3;
    let dir = [1.0, 1.0, 1.0];
    println!("{:>6} {:>9} {:>8} {:>8} {:>8}", "a", "b", "ratio", "target", "rel err");
    for row in mr_ratio_demo(n, &dir, &EXTENDED_SCHEDULE)? {
        println!("{:>6} {:>9} {:>8.4} {:>8.4} {:>8.4}", row.a, row.b, row.ratio, row.target, row.relative_error);
    }
    Ok(())
}
