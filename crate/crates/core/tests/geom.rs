use approx::assert_relative_eq;
use cgx::geom::{contains, Atom, Body, PowerTerm};
use cgx::linalg::{gaussian_matrix, random_direction, rng};
use cgx::quadra::SphereRule;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

fn unit(v: &[f64]) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / r).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn gauge_examples() {
    assert_relative_eq!(Body::cube(3, 1.0).gauge(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
    let x = [0.3, -1.2, 2.0];
    assert_relative_eq!(Body::ball(3, 1.0).gauge(&x).unwrap(), norm(&x), epsilon = 1e-14);
    assert_relative_eq!(Body::cross_polytope(4, 1.0).gauge(&[0.25; 4]).unwrap(), 1.0, epsilon = 1e-14);
    assert_eq!(Body::cube(3, 1.0).gauge(&[0.0; 3]).unwrap(), 0.0);
}

#[test]
fn radial_examples() {
    let t = unit(&[1.0, 1.0]);
    assert_relative_eq!(Body::lp_ball(2, 1.0, 1.0).radial(&t).unwrap(), 1.0 / 2f64.sqrt(), epsilon = 1e-14);
    let e = Body::ellipsoid(diag(&[0.25, 1.0])).unwrap();
    assert_relative_eq!(e.radial(&[1.0, 0.0]).unwrap(), 2.0, epsilon = 1e-14);
    let sum = Body::radial_power_sum(1, vec![
        PowerTerm { weight: 1.0, body: Body::ball(3, 1.0) },
        PowerTerm { weight: 1.0, body: Body::ball(3, 2.0) },
    ])
    .unwrap();
    assert_relative_eq!(sum.radial(&unit(&[0.2, -0.7, 0.4])).unwrap(), 3.0, epsilon = 1e-14);
}

#[test]
fn support_examples() {
    assert_relative_eq!(Body::cube(5, 1.0).support(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 1.0, epsilon = 1e-12);
    assert_relative_eq!(Body::ball(3, 2.5).support(&unit(&[1.0, 2.0, 3.0])).unwrap(), 2.5, epsilon = 1e-14);
    let v = Body::v_polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert_relative_eq!(v.support(&unit(&[1.0, 1.0])).unwrap(), 1.0 / 2f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn star_bodies_have_no_support() {
    let star = Body::lp_ball(3, 0.5, 1.0);
    assert!(matches!(star.support(&[1.0, 0.0, 0.0]), Err(cgx::Error::NonConvexBody(_))));
    assert!(matches!(star.polar(), Err(cgx::Error::NonConvexPolar(_))));
}

#[test]
fn polar_examples() {
    let p = Body::cube(4, 1.0).polar().unwrap();
    let cross = Body::cross_polytope(4, 1.0);
    let mut g = rng(5, 0);
    for _ in 0..100 {
        let t = random_direction(&mut g, 4);
        assert_relative_eq!(p.radial(t.as_slice()).unwrap(), cross.radial(t.as_slice()).unwrap(), epsilon = 1e-12);
    }
    let l3 = Body::lp_ball(3, 3.0, 1.0);
    let back = l3.polar().unwrap().polar().unwrap();
    for _ in 0..100 {
        let t = random_direction(&mut g, 3);
        assert_relative_eq!(back.radial(t.as_slice()).unwrap(), l3.radial(t.as_slice()).unwrap(), epsilon = 1e-12);
    }
}

#[test]
fn polar_of_linear_image_of_ball() {
    let n = 3;
    let t = DMatrix::identity(n, n) + gaussian_matrix(&mut rng(9, 0), n, n) * 0.4;
    let body = Body::ball(n, 1.0).apply_matrix(&t).unwrap();
    let polar = body.polar().unwrap();
    // T^{-T} D: rho(theta) = 1 / |T^T theta|
    let tt = t.transpose();
    let mut g = rng(9, 1);
    for _ in 0..100 {
        let th = random_direction(&mut g, n);
        let expect = 1.0 / (&tt * &th).norm();
        assert_relative_eq!(polar.radial(th.as_slice()).unwrap(), expect, max_relative = 1e-12);
    }
}

#[test]
fn apply_map_examples() {
    let k = Body::cross_polytope(3, 1.0);
    let same = k.apply_matrix(&DMatrix::identity(3, 3)).unwrap();
    let mut g = rng(13, 0);
    for _ in 0..50 {
        let t = random_direction(&mut g, 3);
        assert_eq!(same.radial(t.as_slice()).unwrap(), k.radial(t.as_slice()).unwrap());
    }
    let stretched = Body::ball(2, 1.0).apply_matrix(&diag(&[2.0, 0.5])).unwrap();
    let e = Body::ellipsoid_axes(&[2.0, 0.5]).unwrap();
    for _ in 0..50 {
        let t = random_direction(&mut g, 2);
        assert_relative_eq!(stretched.radial(t.as_slice()).unwrap(), e.radial(t.as_slice()).unwrap(), max_relative = 1e-12);
    }
}

#[test]
fn nested_linear_images_flatten() {
    let a = diag(&[2.0, 1.0, 0.5]);
    let b = DMatrix::identity(3, 3) + gaussian_matrix(&mut rng(3, 3), 3, 3) * 0.2;
    let twice = Body::cube(3, 1.0).apply_matrix(&a).unwrap().apply_matrix(&b).unwrap();
    match &twice {
        Body::LinearImage { inner, .. } => assert!(matches!(**inner, Body::Cube { .. })),
        other => panic!("expected a single linear image, got {}", other.kind()),
    }
}

#[test]
fn singular_maps_are_rejected() {
    let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
    assert!(matches!(Body::ball(2, 1.0).apply_matrix(&s), Err(cgx::Error::SingularMap { .. })));
}

#[test]
fn containment_examples() {
    let r = SphereRule::default_for(3, 4096, 1).unwrap();
    let c = contains(&Body::ball(3, 2.0), &Body::ball(3, 1.0), &r).unwrap();
    assert!(c.contained);
    assert_relative_eq!(c.worst_ratio, 2.0, epsilon = 1e-12);
    let c = contains(&Body::cube(3, 1.0), &Body::ball(3, 1.0), &r).unwrap();
    assert!(c.contained);
    assert!(c.worst_ratio >= 1.0 && c.worst_ratio < 1.01);
    let c = contains(&Body::ball(3, 1.0), &Body::cube(3, 1.0), &r).unwrap();
    assert!(!c.contained);
    assert_relative_eq!(c.worst_ratio, 1.0 / 3f64.sqrt(), max_relative = 0.01);
    let r2 = SphereRule::default_for(2, 64, 1).unwrap();
    assert!(matches!(contains(&Body::ball(3, 1.0), &Body::ball(2, 1.0), &r2), Err(cgx::Error::DimensionMismatch { .. })));
}

#[test]
fn validation_rejects_malformed_specs() {
    assert!(Body::h_polytope(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).is_err());
    assert!(Body::v_polytope(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
    assert!(Body::radial_power_sum(1, vec![PowerTerm { weight: -1.0, body: Body::ball(2, 1.0) }]).is_err());
    assert!(Body::radial_power_sum(1, vec![
        PowerTerm { weight: 1.0, body: Body::ball(2, 1.0) },
        PowerTerm { weight: 1.0, body: Body::ball(3, 1.0) },
    ])
    .is_err());
    assert!(Body::lp_section(3.0, vec![Atom { weight: 1.0, direction: vec![1.0, 0.0] }]).is_err());
}

#[test]
fn json_round_trip_and_errors() {
    let text = r#"{"type": "linear_image", "map": [[2, 0], [0, 0.5]], "inner": {"type": "cube", "dim": 2, "half_side": 1}}"#;
    let body = Body::from_json(text).unwrap();
    assert_relative_eq!(body.radial(&[1.0, 0.0]).unwrap(), 2.0, epsilon = 1e-14);
    let again = Body::from_json(&serde_json::to_string(&body).unwrap()).unwrap();
    assert_eq!(again.content_hash(), body.content_hash());
    match Body::from_json("{\"type\": \"cube\",\n \"dim\": 2,\n}") {
        Err(cgx::Error::Parse { location, .. }) => assert!(location.contains("line 3"), "{location}"),
        other => panic!("expected a syntax error, got {other:?}"),
    }
    let nested = r#"{"type": "linear_image", "map": [[1, 0], [0, 1]], "inner": {"type": "cube", "dim": 2}}"#;
    match Body::from_json(nested) {
        Err(cgx::Error::Parse { location, message }) => {
            assert_eq!(location, "$.inner");
            assert!(message.contains("half_side"), "{message}");
        }
        other => panic!("expected a missing-field error, got {other:?}"),
    }
    assert!(matches!(Body::from_json(r#"{"type": "ellipsoid", "matrix": [[1, 0], [0, -1]]}"#), Err(_)));
}

#[test]
fn lp_infinity_serializes_as_string() {
    let b = Body::lp_ball(3, f64::INFINITY, 1.0);
    let s = serde_json::to_string(&b).unwrap();
    assert!(s.contains("\"inf\""), "{s}");
    assert_relative_eq!(Body::from_json(&s).unwrap().gauge(&[0.5, -0.9, 0.1]).unwrap(), 0.9);
}

fn convex_bodies(n: usize) -> Vec<Body> {
    let m = DMatrix::identity(n, n) + gaussian_matrix(&mut rng(21, n as u64), n, n) * 0.3;
    let spd = &m * m.transpose();
    let rows: Vec<Vec<f64>> = (0..n + 2)
        .map(|i| {
            let mut v = vec![0.3; n];
            v[i % n] = 1.0 + 0.1 * i as f64;
            v
        })
        .collect();
    vec![
        Body::ball(n, 1.5),
        Body::cube(n, 0.7),
        Body::cross_polytope(n, 1.3),
        Body::lp_ball(n, 3.0, 1.0),
        Body::lp_ball(n, 1.5, 2.0),
        Body::ellipsoid(spd).unwrap(),
        Body::h_polytope(rows.clone()).unwrap(),
        Body::v_polytope(rows).unwrap(),
        Body::cube(n, 1.0).apply_matrix(&m).unwrap(),
        Body::lp_section(3.0, (0..2 * n).map(|i| Atom { weight: 1.0, direction: unit(&(0..n).map(|j| ((i * 7 + j * 3) % 5) as f64 - 1.7).collect::<Vec<_>>()) }).collect()).unwrap(),
    ]
}

fn star_bodies(n: usize) -> Vec<Body> {
    let mut v = convex_bodies(n);
    v.push(Body::lp_ball(n, 0.6, 1.0));
    v.push(
        Body::radial_power_sum(2, vec![
            PowerTerm { weight: 0.5, body: Body::cube(n, 1.0) },
            PowerTerm { weight: 2.0, body: Body::ellipsoid_axes(&vec![0.4; n]).unwrap() },
        ])
        .unwrap(),
    );
    v
}

fn dir(n: usize, seed: u64) -> Vec<f64> {
    random_direction(&mut rng(seed, 77), n).iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauge_is_homogeneous(n in 2usize..6, seed in any::<u64>(), t in 0.0f64..50.0) {
        let x: Vec<f64> = dir(n, seed).iter().map(|v| v * 1.7).collect();
        let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
        for b in star_bodies(n) {
            let (g, gt) = (b.gauge(&x).unwrap(), b.gauge(&tx).unwrap());
            prop_assert!((gt - t * g).abs() <= 1e-10 * (1.0 + t * g), "{}: {} vs {}", b.kind(), gt, t * g);
        }
    }

    #[test]
    fn radial_times_gauge_is_one(n in 2usize..6, seed in any::<u64>()) {
        let th = dir(n, seed);
        for b in star_bodies(n) {
            let p = b.radial(&th).unwrap() * b.gauge(&th).unwrap();
            prop_assert!((p - 1.0).abs() < 1e-10, "{}: {}", b.kind(), p);
        }
    }

    #[test]
    fn radial_is_even(n in 2usize..6, seed in any::<u64>()) {
        let th = dir(n, seed);
        let neg: Vec<f64> = th.iter().map(|v| -v).collect();
        for b in star_bodies(n) {
            let (a, c) = (b.radial(&th).unwrap(), b.radial(&neg).unwrap());
            prop_assert!((a - c).abs() <= 1e-12 * a, "{}", b.kind());
        }
    }

    #[test]
    fn polar_is_an_involution(n in 2usize..5, seed in any::<u64>()) {
        let th = dir(n, seed);
        for b in convex_bodies(n) {
            let back = b.polar().unwrap().polar().unwrap();
            let (a, c) = (b.radial(&th).unwrap(), back.radial(&th).unwrap());
            prop_assert!((a - c).abs() <= 1e-9 * a, "{}: {} vs {}", b.kind(), a, c);
        }
    }

    #[test]
    fn polar_gauge_is_support(n in 2usize..5, seed in any::<u64>(), scale in 0.1f64..10.0) {
        let x: Vec<f64> = dir(n, seed).iter().map(|v| v * scale).collect();
        for b in convex_bodies(n) {
            let g = b.polar().unwrap().gauge(&x).unwrap();
            let h = b.support(&unit(&x)).unwrap() * norm(&x);
            prop_assert!((g - h).abs() <= 1e-9 * h, "{}: {} vs {}", b.kind(), g, h);
        }
    }

    #[test]
    fn linear_images_transform_the_radial_function(n in 2usize..5, seed in any::<u64>()) {
        let t = DMatrix::identity(n, n) + gaussian_matrix(&mut rng(seed, 5), n, n) * 0.4;
        prop_assume!(t.determinant().abs() > 1e-3);
        let tinv = t.clone().try_inverse().unwrap();
        let th = nalgebra::DVector::from_vec(dir(n, seed));
        let y = &tinv * &th;
        let yn = y.norm();
        let yu: Vec<f64> = y.iter().map(|v| v / yn).collect();
        for b in star_bodies(n) {
            let moved = b.apply_matrix(&t).unwrap();
            let lhs = moved.radial(th.as_slice()).unwrap() * yn;
            let rhs = b.radial(&yu).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{}: {} vs {}", b.kind(), lhs, rhs);
        }
    }
}

#[test]
fn documented_specs_parse() {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/bodyspec.md")).unwrap();
    let blocks: Vec<&str> = doc.split("```json").skip(1).map(|b| b.split("```").next().unwrap()).collect();
    assert!(blocks.len() >= 13);
    for b in blocks {
        let body = Body::from_json(b).unwrap_or_else(|e| panic!("{e}\n{b}"));
        let again = Body::from_json(&serde_json::to_string(&body).unwrap()).unwrap();
        assert_eq!(body.content_hash(), again.content_hash());
    }
}
