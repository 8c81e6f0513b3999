use approx::assert_relative_eq;
use cgx::geom::Body;
use cgx::linalg::{gaussian_matrix, normalize_det, random_direction, rng};
use cgx::positions::{
    facet_areas, gaussian_mixture_check, isotropic_constant, isotropic_position, john_decomposition, john_position,
    lewis_position, lowner_position, minimal_surface_position, mvee, IsotropicMeasure,
};
use cgx::quadra::{covariance, SphereRule};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}

/// `T^T T` up to the orthogonal factor a position is defined modulo.
fn gram(t: &DMatrix<f64>) -> DMatrix<f64> {
    t.transpose() * t
}

fn shear(n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::identity(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = 0.8;
    }
    a[(0, 0)] = 1.5;
    normalize_det(&a).unwrap()
}

#[test]
fn isotropic_position_of_a_sheared_cube() {
    let n = 3;
    let rule = SphereRule::default_for(n, 1 << 14, 0).unwrap();
    let body = Body::cube(n, 0.5).apply_matrix(&shear(n)).unwrap();
    let report = isotropic_position(&body, 1e-3, 50, &rule).unwrap();
    assert!(report.position.residual < 1e-3);
    assert_relative_eq!(report.position.map.determinant(), 1.0, max_relative = 1e-10);
    let c = covariance(&report.position.apply(&body).unwrap(), &rule).unwrap().matrix;
    let scale = c.trace() / n as f64;
    assert!((c / scale - DMatrix::identity(n, n)).norm() < 1e-3);
    assert_relative_eq!(report.isotropic_constant, 1.0 / 12f64.sqrt(), max_relative = 1e-2);
    // already positioned bodies need no steps
    let again = isotropic_position(&report.position.apply(&body).unwrap(), 1e-3, 50, &rule).unwrap();
    assert_eq!(again.position.iterations, 0);
}

#[test]
fn isotropic_constant_ignores_linear_images() {
    let n = 4;
    let rule = SphereRule::default_for(n, 1 << 14, 2).unwrap();
    let plain = isotropic_constant(&Body::cross_polytope(n, 1.0), &rule).unwrap();
    let mapped = isotropic_constant(&Body::cross_polytope(n, 1.0).apply_matrix(&shear(n)).unwrap(), &rule).unwrap();
    assert_eq!(plain, mapped);
}

#[test]
fn john_and_lowner_round_an_ellipsoid() {
    let m = diag(&[4.0, 1.0, 0.25]);
    let e = Body::ellipsoid(m.clone()).unwrap();
    let rule = SphereRule::default_for(3, 4096, 0).unwrap();
    // T E is a ball iff T^T T is proportional to M
    for t in [lowner_position(&e, &rule, 1e-9).unwrap(), john_position(&e, &rule, 1e-9).unwrap()] {
        let g = gram(&t.map);
        assert!((g / m.determinant().powf(-1.0 / 3.0) - &m).amax() < 1e-6 * m.amax());
    }
}

#[test]
fn cube_and_cross_are_already_in_john_and_lowner_position() {
    for n in 2..6 {
        let rule = SphereRule::default_for(n, 2048, 0).unwrap();
        for body in [Body::cube(n, 1.0), Body::cross_polytope(n, 1.0)] {
            for t in [lowner_position(&body, &rule, 1e-9).unwrap(), john_position(&body, &rule, 1e-9).unwrap()] {
                assert!((gram(&t.map) - DMatrix::identity(n, n)).amax() < 1e-6, "{} n={n}", body.kind());
            }
        }
    }
}

#[test]
fn john_decomposition_of_the_cube() {
    for n in 2..6 {
        let measure = john_decomposition(&Body::cube(n, 1.0), 1e-4).unwrap();
        assert!(measure.residual() < 1e-10);
        assert_relative_eq!(measure.total_weight(), n as f64, max_relative = 1e-10);
        for (v, _) in &measure.atoms {
            assert_eq!(v.iter().filter(|x| x.abs() > 1e-12).count(), 1, "{v:?}");
        }
    }
}

#[test]
fn gaussian_mixture_of_an_isotropic_measure() {
    let measure = john_decomposition(&Body::cube(4, 1.0), 1e-4).unwrap();
    let report = gaussian_mixture_check(&measure, 20000, 3).unwrap();
    assert!(report.spectral_error < 0.05, "{report:?}");
    assert!(report.mean_norm < 0.05, "{report:?}");
    let skewed = IsotropicMeasure { atoms: vec![(vec![1.0, 0.0], 2.0), (vec![0.0, 1.0], 1.0)] };
    assert!(gaussian_mixture_check(&skewed, 100, 0).is_err());
}

#[test]
fn lewis_position_of_random_vectors() {
    let n = 3;
    let mut r = rng(11, 0);
    let u: Vec<Vec<f64>> = (0..2 * n).map(|_| random_direction(&mut r, n).iter().copied().collect()).collect();
    let c = vec![1.0; 2 * n];
    let p = 3.0;
    let res = lewis_position(&c, &u, p, 1e-10, 500).unwrap();
    let measure = res.measure();
    assert!(measure.residual() < 1e-8, "{}", measure.residual());
    assert_relative_eq!(measure.total_weight(), n as f64, max_relative = 1e-8);
    // the positioned norm is the original one pulled back through T
    let t_inv = res.position.map.clone().try_inverse().unwrap();
    let atoms = res.atoms();
    for _ in 0..5 {
        let y: Vec<f64> = random_direction(&mut r, n).iter().copied().collect();
        let x = &t_inv * DVector::from_column_slice(&y);
        let want: f64 = c.iter().zip(&u).map(|(ci, ui)| ci * x.dot(&DVector::from_column_slice(ui)).abs().powf(p)).sum();
        let got: f64 = atoms.iter().map(|a| a.weight * a.direction.iter().zip(&y).map(|(d, v)| d * v).sum::<f64>().abs().powf(p)).sum();
        assert_relative_eq!(got, want, max_relative = 1e-8);
    }
}

#[test]
fn lewis_rejects_mismatched_input() {
    assert!(lewis_position(&[1.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], 3.0, 1e-9, 10).is_err());
    assert!(lewis_position(&[], &[], 3.0, 1e-9, 10).is_err());
}

#[test]
fn minimal_surface_position_undoes_a_stretch() {
    let body = Body::cube(2, 1.0).apply_matrix(&diag(&[2.0, 0.5])).unwrap();
    let t = minimal_surface_position(&body, 1e-9, 200).unwrap();
    let want = gram(&diag(&[0.5, 2.0]));
    assert!((gram(&t.map) - &want).amax() < 0.01 * want.amax(), "{}", t.map);
    let areas = facet_areas(&t.apply(&body).unwrap()).unwrap();
    let (lo, hi) = areas.iter().fold((f64::INFINITY, 0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(hi / lo < 1.01, "{areas:?}");
}

#[test]
fn minimal_surface_rejects_smooth_bodies() {
    assert!(minimal_surface_position(&Body::ball(3, 1.0), 1e-9, 10).is_err());
}

#[test]
fn mvee_recovers_an_ellipsoid() {
    let n = 3;
    let m = diag(&[4.0, 1.0, 0.25]);
    let root = diag(&[0.5, 1.0, 2.0]);
    let mut r = rng(5, 0);
    let pts: Vec<Vec<f64>> = (0..400).map(|_| (&root * random_direction(&mut r, n)).iter().copied().collect()).collect();
    let res = mvee(&pts, 1e-10).unwrap();
    assert!(res.gap < 1e-8);
    assert!((&res.matrix - &m).amax() < 1e-4 * m.amax(), "{}", res.matrix);
    assert!(mvee(&[], 1e-9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn isotropic_constant_is_affine_invariant(seed in any::<u64>(), n in 2usize..5) {
        let rule = SphereRule::default_for(n, 4096, 1).unwrap();
        let mut r = rng(seed, 0);
        let a = DMatrix::identity(n, n) + gaussian_matrix(&mut r, n, n) * 0.3;
        prop_assume!(a.determinant().abs() > 0.1);
        let body = Body::lp_ball(n, 3.0, 1.0);
        let mapped = body.apply_matrix(&a).unwrap();
        prop_assert_eq!(isotropic_constant(&body, &rule).unwrap(), isotropic_constant(&mapped, &rule).unwrap());
    }

    #[test]
    fn lowner_maps_have_unit_determinant(seed in any::<u64>()) {
        let n = 3;
        let mut r = rng(seed, 0);
        let a = DMatrix::identity(n, n) + gaussian_matrix(&mut r, n, n) * 0.3;
        prop_assume!(a.determinant().abs() > 0.1);
        let rule = SphereRule::default_for(n, 1024, 0).unwrap();
        let body = Body::cross_polytope(n, 1.0).apply_matrix(&a).unwrap();
        let t = lowner_position(&body, &rule, 1e-9).unwrap();
        prop_assert!((t.map.determinant() - 1.0).abs() < 1e-9);
        // T A is orthogonal up to scale
        let g = gram(&(&t.map * &a));
        let s = g.trace() / n as f64;
        prop_assert!((g / s - DMatrix::identity(n, n)).amax() < 1e-5);
    }
}
