//! The eleven acceptance criteria at their stated tolerances.
//!
//! Runs without the libtest harness so the per-criterion lines always reach
//! stdout; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use cgx::geom::Body;
use cgx::linalg::{gaussian_matrix, normalize_det, rng};
use cgx::positions::{isotropic_constant, isotropic_position, john_decomposition, lewis_position};
use cgx::quadra::{
    ball_volume, covariance, default_subsphere_rule, dual_mixed_volume, grassmann_sample, mean_norm, mean_radius,
    volume, RadialProfile, SamplingMethod, SphereRule,
};
use nalgebra::DMatrix;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

const N17: usize = 1 << 17;

fn rule(n: usize, samples: usize, seed: u64) -> SphereRule {
    SphereRule::default_for(n, samples, seed).expect("rule")
}

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn e(err: cgx::Error) -> String {
    err.to_string()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn records(id: &str, cases: Option<Vec<Value>>) -> Result<Vec<cgx::verify::CheckRecord>, String> {
    let cfg = cgx::verify::VerifyConfig::default();
    match cases {
        None => cgx::verify::run_check(id, None, &cfg).map_err(e),
        Some(cs) => {
            let mut out = Vec::new();
            for c in &cs {
                out.extend(cgx::verify::run_check(id, Some(c), &cfg).map_err(e)?);
            }
            Ok(out)
        }
    }
}

fn all_pass(recs: &[cgx::verify::CheckRecord]) -> std::result::Result<(), String> {
    for r in recs {
        if !r.passed() {
            return Err(cgx::verify::summary_line(r));
        }
    }
    Ok(())
}

fn worst(recs: &[cgx::verify::CheckRecord], bound: &str) -> f64 {
    recs.iter().filter_map(|r| r.bound(bound)).map(|b| b.value).fold(f64::MIN, f64::max)
}

/// Volumes, isotropic constants and the cube inertia against closed forms.
fn criterion_1() -> Outcome {
    let worst_err = std::cell::Cell::new(0.0f64);
    let worst_z = std::cell::Cell::new(0.0f64);
    let check = |what: &str, got: f64, want: f64| -> std::result::Result<(), String> {
        let r = rel(got, want);
        worst_err.set(worst_err.get().max(r));
        ensure(r < 0.01, format!("{what}: {got} vs {want}"))
    };
    check("Vol(D_2)", volume(&Body::ball(2, 1.0), &rule(2, N17, 1)).map_err(e)?.value, std::f64::consts::PI)?;
    check("Vol(D_3)", volume(&Body::ball(3, 1.0), &rule(3, N17, 1)).map_err(e)?.value, 4.0 * std::f64::consts::PI / 3.0)?;
    for n in 2..=6 {
        let r = rule(n, N17, 7);
        let nf = n as f64;
        check("Vol(cube)", volume(&Body::cube(n, 1.0), &r).map_err(e)?.value, 2f64.powi(n as i32))?;
        let cross_vol = 2f64.powi(n as i32) / factorial(n);
        check("Vol(cross)", volume(&Body::cross_polytope(n, 1.0), &r).map_err(e)?.value, cross_vol)?;
        check("L_ball", isotropic_constant(&Body::ball(n, 1.0), &r).map_err(e)?, ball_volume(n).powf(-1.0 / nf) / (nf + 2.0).sqrt())?;
        check("L_cube", isotropic_constant(&Body::cube(n, 1.0), &r).map_err(e)?, 1.0 / 12f64.sqrt())?;
        // int_K x_1^2 = Vol K * 2 / ((n+1)(n+2)) on the unit l_1 ball
        let l_cross = (cross_vol.powf(-2.0 / nf) * 2.0 / ((nf + 1.0) * (nf + 2.0))).sqrt();
        check("L_cross", isotropic_constant(&Body::cross_polytope(n, 1.0), &r).map_err(e)?, l_cross)?;
        let cov = covariance(&Body::unit_volume_cube(n), &r).map_err(e)?;
        let diff = (&cov.matrix - DMatrix::<f64>::identity(n, n) / 12.0).abs();
        if n <= 3 {
            let dev = diff.max() * 12.0;
            worst_err.set(worst_err.get().max(dev));
            ensure(dev < 0.01, format!("Cov(Q_{n}) deviates by {dev:.4} of 1/12"))?;
        } else {
            // antithetic Monte Carlo: each entry carries about 0.5% standard error at 2^17
            let z = diff.zip_map(&cov.std_error, |d, s| d / s).max();
            worst_z.set(worst_z.get().max(z));
            ensure(z <= 3.0, format!("Cov(Q_{n}) entry off by {z:.2} SE"))?;
        }
    }
    Ok(format!(
        "worst relative error {:.2e}; Cov(Q_n), n >= 4, within {:.2} SE",
        worst_err.get(),
        worst_z.get()
    ))
}

fn random_unimodular(n: usize, seed: u64, stream: u64) -> DMatrix<f64> {
    let g = gaussian_matrix(&mut rng(seed, stream), n, n);
    let mut t = DMatrix::identity(n, n) + g * 0.3;
    if t.determinant() < 0.0 {
        t.column_mut(0).neg_mut();
    }
    normalize_det(&t).expect("nonsingular")
}

/// `Ṽ_p(L, L) = Vol L` per sample, SL(n) invariance, and both Fubini identities.
fn criterion_2() -> Outcome {
    let bodies = ["cube", "cross", "ellipsoid", "lp:3", "box_sum"];
    for n in [3, 4] {
        let r = rule(n, 1 << 15, 11);
        for name in bodies {
            let l = cgx::verify::BodyParam::named(name).resolve(n).map_err(e)?;
            let vol = volume(&l, &r).map_err(e)?.value;
            for p in [-2.0, 1.0, 2.5] {
                let d = dual_mixed_volume(&l, &l, p, &r).map_err(e)?.value;
                ensure(rel(d, vol) < 1e-12, format!("Ṽ_{p}({name}, {name}) = {d} vs Vol = {vol}"))?;
            }
        }
    }
    let n = 3;
    let r = rule(n, 1 << 15, 13);
    let (l1, l2) = (Body::cube(n, 1.0), cgx::verify::BodyParam::named("ellipsoid").resolve(n).map_err(e)?);
    let mut worst_z: f64 = 0.0;
    for p in [-1.0, 1.0, 2.0] {
        let base = dual_mixed_volume(&l1, &l2, p, &r).map_err(e)?;
        for i in 0..20 {
            let t = random_unimodular(n, 17, i);
            let (a, b) = (l1.apply_matrix(&t).map_err(e)?, l2.apply_matrix(&t).map_err(e)?);
            let moved = dual_mixed_volume(&a, &b, p, &r).map_err(e)?;
            let z = (moved.value - base.value).abs() / (base.std_error.hypot(moved.std_error));
            worst_z = worst_z.max(z);
            ensure(z <= 3.0, format!("Ṽ_{p} moved by {z:.2} SE under T_{i}"))?;
        }
    }
    let f1 = records("fubini1", None)?;
    all_pass(&f1)?;
    let f2 = records("fubini2", None)?;
    all_pass(&f2)?;
    Ok(format!(
        "invariance worst {worst_z:.2} SE; fubini1 agreement {:.2}, fubini2 {:.2} (of 3 SE + 1%)",
        worst(&f1, "agreement"),
        worst(&f2, "agreement")
    ))
}

/// `1/M_p ≤ MR_k ≤ (Vol L / Vol D_n)^{1/n}`; pairs with `k > n` are outside the chain.
fn criterion_3() -> Outcome {
    let corpus = ["ball", "cube", "cross", "lp:3", "ellipsoid", "sheared_cube", "box_sum", "bp_ellipsoids:1"];
    let mut count = 0;
    for n in [2, 3, 4] {
        let r = rule(n, 1 << 15, 19);
        for name in corpus {
            let body = cgx::verify::BodyParam::named(name).resolve(n).map_err(e)?;
            let vol = volume(&body, &r).map_err(e)?;
            let volrad = vol.powf(1.0 / n as f64).scale(ball_volume(n).powf(-1.0 / n as f64));
            for p in [1.0, 2.0, 4.0] {
                let m = mean_norm(&body, p, &r).map_err(e)?;
                let inv = m.powf(-1.0);
                for k in [1.0f64, 2.0, 4.0] {
                    if k > n as f64 {
                        continue;
                    }
                    let mr = mean_radius(&body, k, &r).map_err(e)?;
                    ensure(
                        inv.value <= mr.value + 3.0 * (inv.std_error + mr.std_error),
                        format!("{name} n={n}: 1/M_{p} = {} > MR_{k} = {}", inv.value, mr.value),
                    )?;
                    ensure(
                        // the ball is the equality case
                        mr.value <= volrad.value * (1.0 + 1e-12) + 3.0 * (mr.std_error + volrad.std_error),
                        format!("{name} n={n}: MR_{k} = {} > volume radius {}", mr.value, volrad.value),
                    )?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} (body, n, p, k) chains hold"))
}

/// Polar-quadrature moments and inertia against uniform interior samples.
fn criterion_4() -> Outcome {
    let n = 3;
    let r = rule(n, N17, 23);
    let theta = {
        let v = [1.0, 2.0, -0.5];
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.map(|x| x / s)
    };
    let mut worst_z: f64 = 0.0;
    for name in ["cube", "cross", "lp:3", "ellipsoid", "sheared_cube"] {
        let body = cgx::verify::BodyParam::named(name).resolve(n).map_err(e)?;
        let prof = RadialProfile::new(&body, &r).map_err(e)?;
        let vol = prof.volume();
        let pts = cgx::quadra::sample_interior(&body, 40_000, 29, SamplingMethod::Rejection).map_err(e)?;
        let count = pts.len() as f64;
        let mut compare = |what: String, polar: f64, polar_se: f64, vals: &[f64]| -> std::result::Result<(), String> {
            let mean = vals.iter().sum::<f64>() / count;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
            let z = (polar - mean).abs() / polar_se.hypot((var / count).sqrt());
            worst_z = worst_z.max(z);
            ensure(z <= 3.0, format!("{name} {what}: polar {polar:.6} vs interior {mean:.6} ({z:.2} SE)"))
        };
        for p in [1.0, 2.0, 3.0] {
            let m = prof.absolute_moment(&theta, p).map_err(e)?;
            // per unit volume; the two relative errors are added
            let v = m.value / vol.value;
            let se = v * (m.relative_error() + vol.relative_error());
            let vals: Vec<f64> =
                pts.iter().map(|x| x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>().abs().powf(p)).collect();
            compare(format!("moment p={p}"), v, se, &vals)?;
        }
        let cov = prof.covariance();
        for i in 0..n {
            for j in i..n {
                let v = cov.matrix[(i, j)] / vol.value;
                let se = cov.std_error[(i, j)] / vol.value + v.abs() * vol.relative_error();
                let vals: Vec<f64> = pts.iter().map(|x| x[i] * x[j]).collect();
                compare(format!("inertia ({i},{j})"), v, se, &vals)?;
            }
        }
    }
    Ok(format!("worst discrepancy {worst_z:.2} combined SE over 5 bodies"))
}

/// Isotropic, John and Lewis solvers, and the circumradius bound after Lewis positioning.
fn criterion_5() -> Outcome {
    let mut iso_worst: f64 = 0.0;
    let mut iso_iters = 0;
    for n in [3, 4] {
        let r = rule(n, N17, 31);
        let sheared = |name: &str| -> Result<Body, String> {
            let shear = random_unimodular(n, 37, n as u64);
            cgx::verify::BodyParam::named(name).resolve(n).map_err(e)?.apply_matrix(&shear).map_err(e)
        };
        for body in [
            cgx::verify::BodyParam::named("sheared_cube").resolve(n).map_err(e)?,
            sheared("cross")?,
            sheared("lp:3")?,
            sheared("box_sum")?,
        ] {
            let rep = isotropic_position(&body, 1e-6, 20, &r).map_err(e)?;
            iso_worst = iso_worst.max(rep.position.residual);
            iso_iters = iso_iters.max(rep.position.iterations);
            ensure(rep.position.residual < 1e-3, format!("isotropic residual {:.2e} on {}", rep.position.residual, body.kind()))?;
        }
    }
    let mut john_worst: f64 = 0.0;
    for n in 2..=6 {
        for body in [Body::cube(n, 1.0), Body::cross_polytope(n, 1.0)] {
            let m = john_decomposition(&body, 1e-9).map_err(e)?;
            john_worst = john_worst.max(m.residual());
            ensure(m.residual() < 1e-6, format!("John residual {:.2e} on {} n={n}", m.residual(), body.kind()))?;
            ensure(rel(m.total_weight(), n as f64) < 1e-6, "John weights do not sum to n")?;
        }
    }
    let mut lewis_worst: f64 = 0.0;
    for (n, m, seed) in [(3, 7, 41), (4, 10, 43), (5, 12, 47), (6, 15, 53)] {
        let mut g = rng(seed, 0);
        use rand::Rng;
        let u: Vec<Vec<f64>> = (0..m).map(|_| cgx::linalg::gaussian_vector(&mut g, n).iter().copied().collect()).collect();
        let c: Vec<f64> = (0..m).map(|_| g.random_range(0.5..1.5)).collect();
        let res = lewis_position(&c, &u, 3.0, 1e-12, 2000).map_err(e)?;
        lewis_worst = lewis_worst.max(res.position.residual);
        ensure(res.position.residual < 1e-8, format!("Lewis residual {:.2e} at n={n}", res.position.residual))?;
    }
    let lb = records("lewis_bound", None)?;
    all_pass(&lb)?;
    Ok(format!(
        "isotropic {iso_worst:.1e} in <= {iso_iters} it; John {john_worst:.1e}; Lewis {lewis_worst:.1e}; a/limit <= {:.3}",
        worst(&lb, "circumradius_over_limit")
    ))
}

fn param<'a>(r: &'a cgx::verify::CheckRecord, key: &str) -> Option<&'a Value> {
    r.params.get(key)
}

/// Max over min of a ratio across the dimension sweep of one family.
fn family_spread(recs: &[cgx::verify::CheckRecord], bound: &str, keep: impl Fn(&cgx::verify::CheckRecord) -> bool) -> (f64, usize) {
    let vals: Vec<f64> = recs.iter().filter(|r| keep(r)).filter_map(|r| r.bound(bound)).map(|b| b.value).collect();
    (cgx::verify::spread(&vals), vals.len())
}

/// The five sandwich checks inside their windows and stable across `n = 2..6`.
fn criterion_6() -> Outcome {
    let cube = |r: &cgx::verify::CheckRecord| param(r, "k") == Some(&json!("cube"));
    let rank1 = |r: &cgx::verify::CheckRecord| param(r, "rank").and_then(Value::as_u64) == Some(1);
    let p2 = |r: &cgx::verify::CheckRecord| param(r, "p").and_then(Value::as_f64) == Some(2.0);
    let mut parts = Vec::new();
    let families: [(&str, &str, Box<dyn Fn(&cgx::verify::CheckRecord) -> bool>); 5] = [
        ("main1_sandwich", "r_over_sqrt_p0", Box::new(move |r| cube(r) && p2(r))),
        ("theorem1", "ratio", Box::new(cube)),
        ("theorem2", "ratio", Box::new(move |r| cube(r) && rank1(r))),
        ("theorem3", "ratio", Box::new(move |r| cube(r) && p2(r))),
        ("theorem4", "ratio", Box::new(move |r| cube(r) && rank1(r))),
    ];
    for (id, bound, keep) in families {
        let recs = records(id, None)?;
        all_pass(&recs)?;
        let (s, count) = family_spread(&recs, bound, keep);
        ensure(count >= 4, format!("{id}: only {count} cases in the dimension sweep"))?;
        ensure(s < 3.0, format!("{id}: {bound} varies by a factor {s:.2} across n"))?;
        parts.push(format!("{id} {s:.2}"));
    }
    Ok(format!("all in window; spread over n: {}", parts.join(", ")))
}

/// Mean norm and mean radius bounds, and `M(Q_n) sqrt(n / log(1+n))` in [0.4, 3].
fn criterion_7() -> Outcome {
    let recs = records("mean_bounds", None)?;
    all_pass(&recs)?;
    Ok(format!(
        "{} cases; M_p/sqrt(p0) <= {:.2}, cube normalized <= {:.2}",
        recs.len(),
        worst(&recs, "mean_norm_over_sqrt_p0"),
        worst(&recs, "normalized")
    ))
}

fn criterion_8() -> Outcome {
    let recs = records("polytope_sweep", None)?;
    all_pass(&recs)?;
    let spreads: Vec<String> = recs
        .iter()
        .map(|r| format!("{} {:.2}", param(r, "kind").and_then(Value::as_str).unwrap_or("?"), r.bound("spread").map_or(f64::NAN, |b| b.value)))
        .collect();
    Ok(format!("spread across m (limit 3): {}", spreads.join(", ")))
}

fn criterion_9() -> Outcome {
    let cases: Vec<Value> = [(3, 1), (3, 2), (4, 1), (4, 2)].iter().map(|(n, m)| json!({"n": n, "m": m, "a": "cube"})).collect();
    let g = records("grinberg_invariance", Some(cases))?;
    all_pass(&g)?;
    let a = records("avg_sections", None)?;
    all_pass(&a)?;
    Ok(format!(
        "spread/tolerance <= {:.2}; average/min-sup <= {:.3}",
        worst(&g, "spread_over_tolerance"),
        worst(&a, "average_over_min_sup")
    ))
}

/// Radon transforms, the intersection body of the ball and the approximation of unity.
fn criterion_10() -> Outcome {
    use cgx::radon::{dual_radon_m, intersection_radius, mr_ratio_demo, radon_m, GrassmannDensity, DEFAULT_SCHEDULE, EXTENDED_SCHEDULE};
    let n = 4;
    let m = 2;
    let one = GrassmannDensity::constant(1.0);
    let dirs = rule(n, 64, 59);
    for theta in dirs.points() {
        let v = dual_radon_m(&one, theta, m, 64, 61).map_err(e)?.value;
        ensure((v - 1.0).abs() < 1e-12, format!("R*(1) = {v}"))?;
    }
    // <R f, g>_nu = <f, R* g>_sigma with f = theta_1^2 + theta_1 theta_2
    let mut mmat = DMatrix::<f64>::zeros(n, n);
    mmat[(0, 0)] = 0.9;
    mmat[(1, 1)] = -0.4;
    mmat[(0, 2)] = 0.3;
    mmat[(2, 0)] = 0.3;
    let g = GrassmannDensity::exp_trace(&mmat);
    let f = |x: &[f64]| -> cgx::Result<f64> { Ok(x[0] * x[0] + x[0] * x[1]) };
    let sub = default_subsphere_rule(m, 256, 67);
    let frames = grassmann_sample(n, m, 8192, 71).map_err(e)?;
    let lhs_vals: Vec<f64> = frames
        .iter()
        .map(|fr| radon_m(f, fr, &sub).map(|v| v.value * g.eval(fr.basis())))
        .collect::<cgx::Result<_>>()
        .map_err(e)?;
    let lhs = cgx::quadra::sample_mean(&lhs_vals);
    let sphere = rule(n, 8192, 73);
    let rhs_vals: Vec<f64> = sphere
        .points()
        .map(|t| Ok(f(t)? * dual_radon_m(&g, t, m, 64, 79)?.value))
        .collect::<cgx::Result<_>>()
        .map_err(e)?;
    let rhs = cgx::quadra::sample_mean(&rhs_vals);
    let z = (lhs.value - rhs.value).abs() / lhs.std_error.hypot(rhs.std_error);
    ensure(z <= 3.0, format!("duality pairing {:.5} vs {:.5} ({z:.2} SE)", lhs.value, rhs.value))?;
    let ball = Body::ball(3, 1.0);
    let sub2 = default_subsphere_rule(2, 512, 83);
    for theta in rule(3, 32, 89).points() {
        let v = intersection_radius(&ball, theta, &sub2).map_err(e)?.value;
        ensure(rel(v, std::f64::consts::PI) < 1e-12, format!("intersection radius of D_3 = {v}"))?;
    }
    let mut endpoints = Vec::new();
    for nn in [3, 4] {
        let e1: Vec<f64> = (0..nn).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let diag = vec![1.0; nn];
        for xi in [&e1, &diag] {
            let rows = mr_ratio_demo(nn, xi, &DEFAULT_SCHEDULE).map_err(e)?;
            ensure(
                rows.windows(2).all(|w| w[1].relative_error < w[0].relative_error),
                format!("approximation error not decreasing at n={nn}: {:?}", rows.iter().map(|r| r.relative_error).collect::<Vec<_>>()),
            )?;
            let last = mr_ratio_demo(nn, xi, &EXTENDED_SCHEDULE).map_err(e)?.pop().expect("rows");
            let target = if xi[1] == 0.0 { (nn as f64).sqrt() } else { 1.0 };
            ensure(rel(last.target, target) < 1e-12, "unexpected endpoint target")?;
            ensure(last.relative_error < 0.1, format!("endpoint {target:.3} reached only to {:.1}%", 100.0 * last.relative_error))?;
            endpoints.push(format!("{:.1}%", 100.0 * last.relative_error));
        }
    }
    Ok(format!("pairing {z:.2} SE; mr_ratio endpoint errors {}", endpoints.join(" ")))
}

fn fingerprints(threads: usize) -> Result<Vec<String>, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|x| x.to_string())?;
    pool.install(|| {
        let mut out = Vec::new();
        let r = rule(4, 1 << 14, 97);
        for name in ["cube", "bp_ellipsoids:1", "box_sum"] {
            let body = cgx::verify::BodyParam::named(name).resolve(4).map_err(e)?;
            let v = volume(&body, &r).map_err(e)?;
            let c = covariance(&body, &r).map_err(e)?;
            out.push(format!("{:?} {:?}", v, c.matrix.as_slice()));
        }
        let cases = [
            ("fubini1", json!({"n": 3, "levy": "lp", "p": 3.0})),
            ("main2_sandwich", json!({"n": 4, "rank": 2, "k": "cross",
                "density": {"kind": "exp_trace", "matrix": [[0.8,0,0,0],[0,0.3,0,0],[0,0,0,0],[0,0,0,-0.6]]}})),
            ("theorem3", json!({"n": 4, "k": "cube", "polar": "random", "p": 3.0, "atoms": 10})),
            ("polytope_sweep", json!({"n": 4, "m_list": [8, 16], "trials": 6, "kind": "facets", "rule_samples": 1024})),
            ("grinberg_invariance", json!({"n": 3, "m": 2, "a": "cube", "t_samples": 3, "grassmann": 512})),
        ];
        for (id, c) in cases {
            for r in cgx::verify::run_check(id, Some(&c), &cgx::verify::VerifyConfig::default()).map_err(e)? {
                out.push(r.fingerprint());
            }
        }
        Ok(out)
    })
}

fn criterion_11() -> Outcome {
    let one = fingerprints(1)?;
    for threads in [2, 4] {
        let other = fingerprints(threads)?;
        if let Some(i) = (0..one.len()).find(|&i| one[i] != other[i]) {
            return Err(format!("record {i} differs between 1 and {threads} threads"));
        }
    }
    ensure(one == fingerprints(1)?, "rerun on one thread differs")?;
    Ok(format!("{} records bit-identical on 1, 2 and 4 threads", one.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("closed-form goldens", criterion_1),
        ("identity suite", criterion_2),
        ("Jensen chain", criterion_3),
        ("oracle equivalence", criterion_4),
        ("position solvers", criterion_5),
        ("sandwich stability", criterion_6),
        ("mean norm and radius bounds", criterion_7),
        ("polytope sweep", criterion_8),
        ("Grinberg invariance and average sections", criterion_9),
        ("Radon suite", criterion_10),
        ("determinism", criterion_11),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
