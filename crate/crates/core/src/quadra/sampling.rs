//! Uniform samples from body interiors.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Body;
use crate::linalg::{random_direction, rng};

use super::functionals::circumradius_inradius;
use super::rule::SphereRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    Rejection,
    HitAndRun,
}

const BLOCK: usize = 1024;
const HIT_AND_RUN_CHAINS: usize = 8;
const MIN_ACCEPTANCE: f64 = 1e-5;

/// Radius of a ball certainly containing `body`.
pub fn bounding_radius(body: &Body) -> Result<f64> {
    let n = body.dim();
    let rule = SphereRule::default_for(n, 4096, 0x5eed)?;
    let radii = circumradius_inradius(body, &rule)?;
    let exact = matches!(
        body,
        Body::EuclideanBall { .. }
            | Body::Ellipsoid { .. }
            | Body::Cube { .. }
            | Body::CrossPolytope { .. }
            | Body::LpBall { .. }
            | Body::VPolytope { .. }
    );
    // sampled maxima can miss a vertex spike
    Ok(if exact { radii.circumradius } else { 1.25 * radii.circumradius })
}

/// `count` points, uniform in `body` (exactly for rejection, approximately for hit-and-run).
pub fn sample_interior(body: &Body, count: usize, seed: u64, method: SamplingMethod) -> Result<Vec<Vec<f64>>> {
    match method {
        SamplingMethod::Rejection => rejection(body, count, seed),
        SamplingMethod::HitAndRun => hit_and_run(body, count, seed),
    }
}

fn uniform_in_ball<R: Rng + ?Sized>(r: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let d = random_direction(r, n);
    let u: f64 = r.random();
    let s = radius * u.powf(1.0 / n as f64);
    d.iter().map(|v| v * s).collect()
}

fn rejection(body: &Body, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = body.dim();
    let radius = bounding_radius(body)?;
    let blocks = count.div_ceil(BLOCK);
    let out: Vec<Vec<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let want = BLOCK.min(count - b * BLOCK);
            let mut r = rng(seed, 1000 + b as u64);
            let mut got = Vec::with_capacity(want);
            let mut tries = 0usize;
            while got.len() < want {
                let x = uniform_in_ball(&mut r, n, radius);
                tries += 1;
                if body.gauge(&x)? <= 1.0 {
                    got.push(x);
                }
                if tries >= 1_000_000 && (got.len() as f64) < MIN_ACCEPTANCE * tries as f64 {
                    return Err(Error::RejectionTooSlow { acceptance: got.len() as f64 / tries as f64 });
                }
            }
            Ok(got)
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

/// Largest `t >= 0` with `x + t d` in `body` (convex, `x` interior).
fn chord_end(body: &Body, x: &[f64], d: &[f64], limit: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, limit);
    let at = |t: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + t * b).collect() };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if body.gauge(&at(mid))? <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn hit_and_run(body: &Body, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !body.is_convex() {
        return Err(Error::InvalidArgument("hit-and-run requires a convex body".into()));
    }
    let n = body.dim();
    let limit = 2.0 * bounding_radius(body)?;
    let burn_in = 50 * n;
    let thin = n;
    let per_chain = count.div_ceil(HIT_AND_RUN_CHAINS);
    let chains: Vec<Vec<Vec<f64>>> = (0..HIT_AND_RUN_CHAINS)
        .into_par_iter()
        .map(|c| {
            let want = per_chain.min(count.saturating_sub(c * per_chain));
            let mut r = rng(seed, 5000 + c as u64);
            let mut x = vec![0.0; n];
            let mut got = Vec::with_capacity(want);
            let mut step = 0usize;
            while got.len() < want {
                let d: Vec<f64> = random_direction(&mut r, n).iter().copied().collect();
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                let t_plus = chord_end(body, &x, &d, limit)?;
                let t_minus = chord_end(body, &x, &neg, limit)?;
                let u: f64 = r.random();
                let t = -t_minus + u * (t_plus + t_minus);
                for (xi, di) in x.iter_mut().zip(&d) {
                    *xi += t * di;
                }
                step += 1;
                if step > burn_in && (step - burn_in) % thin == 0 {
                    got.push(x.clone());
                }
            }
            Ok(got)
        })
        .collect::<Result<_>>()?;
    Ok(chains.into_iter().flatten().collect())
}
