use std::collections::BTreeSet;

use approx::assert_relative_eq;
use cgx::geom::{Atom, Body};
use cgx::verify::{
    catalog, default_cases, p0, run_check, run_suite, spread, summary_line, BodyParam, LevyRepresentation,
    Verdict, VerifyConfig, SUITES,
};
use cgx::Error;
use proptest::prelude::*;
use serde_json::json;

fn quick() -> VerifyConfig {
    VerifyConfig { samples: 4096, ..VerifyConfig::default() }
}

#[test]
fn catalog_is_sorted_unique_and_complete() {
    let ids: Vec<&str> = catalog().iter().map(|c| c.id).collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted);
    assert_eq!(ids.iter().collect::<BTreeSet<_>>().len(), ids.len());
    for info in catalog() {
        assert!(!info.summary.is_empty());
        assert!(info.suites.contains(&"full"), "{} missing from full", info.id);
        assert!(info.suites.iter().all(|s| SUITES.contains(s)));
        assert!(!default_cases(info.id).unwrap().is_empty(), "{} has no cases", info.id);
    }
    for suite in SUITES {
        assert!(catalog().iter().any(|c| c.suites.contains(suite)), "empty suite {suite}");
    }
}

#[test]
fn ids_accept_the_check_prefix() {
    assert_eq!(default_cases("check_santalo").unwrap(), default_cases("santalo").unwrap());
}

#[test]
fn unknown_names_are_reported() {
    assert!(matches!(default_cases("nope"), Err(Error::UnknownCheck(_))));
    assert!(matches!(run_check("nope", None, &quick()), Err(Error::UnknownCheck(_))));
    assert!(matches!(run_suite("bogus", &quick()), Err(Error::UnknownCheck(_))));
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        VerifyConfig { samples: 4, ..VerifyConfig::default() },
        VerifyConfig { window: [2.0, 1.0], ..VerifyConfig::default() },
        VerifyConfig { stability_factor: 1.0, ..VerifyConfig::default() },
        VerifyConfig { script_l: 0.0, ..VerifyConfig::default() },
    ];
    for cfg in bad {
        assert!(cfg.validate().is_err(), "{cfg:?}");
        assert!(run_check("santalo", None, &cfg).is_err());
    }
}

#[test]
fn records_reproduce_and_fingerprints_ignore_runtime() {
    let params = json!({"k": "cross", "n": 3});
    let a = run_check("santalo", Some(&params), &quick()).unwrap();
    let b = run_check("santalo", Some(&params), &quick()).unwrap();
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].fingerprint(), b[0].fingerprint());
    let mut c = a[0].clone();
    c.runtime_ms += 123.0;
    assert_eq!(c.fingerprint(), a[0].fingerprint());
    let other = run_check("santalo", Some(&params), &VerifyConfig { seed: 1, ..quick() }).unwrap();
    assert_ne!(other[0].fingerprint(), a[0].fingerprint());
}

#[test]
fn santalo_holds_with_equality_for_the_ball() {
    let rec = &run_check("santalo", Some(&json!({"k": "ball", "n": 4})), &quick()).unwrap()[0];
    assert_eq!(rec.verdict, Verdict::Pass);
    assert!(rec.bounds.iter().all(|b| b.holds));
    let line = summary_line(rec);
    assert!(line.starts_with("santalo"), "{line}");
    assert!(line.contains("pass"), "{line}");
}

#[test]
fn verdicts_follow_bounds() {
    let recs = run_check("fubini1", None, &quick()).unwrap();
    for r in recs {
        match r.verdict {
            Verdict::Pass => assert!(!r.bounds.is_empty() && r.bounds.iter().all(|b| b.holds)),
            Verdict::Fail => assert!(r.bounds.iter().any(|b| !b.holds)),
            Verdict::ReportOnly => assert!(r.passed()),
        }
    }
}

#[test]
fn smoke_suite_passes() {
    let recs = run_suite("smoke", &quick()).unwrap();
    assert!(!recs.is_empty());
    let failed: Vec<String> = recs.iter().filter(|r| !r.passed()).map(summary_line).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    let ids: Vec<&str> = recs.iter().map(|r| r.check_id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn corpus_names_resolve() {
    for name in ["ball", "cube", "unit_cube", "cross", "lp:3", "ellipsoid", "sheared_cube", "box_sum", "bp_ellipsoids:2"] {
        let body = BodyParam::named(name).resolve(4).unwrap();
        assert_eq!(body.dim(), 4, "{name}");
    }
    assert!(BodyParam::named("lp").resolve(3).is_err());
    assert!(BodyParam::named("dodecahedron").resolve(3).is_err());
    assert!(matches!(
        BodyParam::Spec(Body::ball(2, 1.0)).resolve(3),
        Err(Error::DimensionMismatch { expected: 3, got: 2 })
    ));
}

#[test]
fn levy_representation_of_lp_balls() {
    for p in [1.0, 1.5, 3.0] {
        let body = Body::lp_ball(3, p, 1.0);
        let levy = LevyRepresentation::of_body(&body).unwrap();
        assert!(levy.max_mismatch(&body, 200, 0).unwrap() < 1e-12);
        assert_relative_eq!(levy.total_mass(), 3.0, max_relative = 1e-12);
    }
    assert!(LevyRepresentation::new(0.0, vec![Atom { weight: 1.0, direction: vec![1.0] }]).is_err());
    assert!(LevyRepresentation::new(2.0, vec![]).is_err());
}

#[test]
fn effective_exponent() {
    assert_eq!(p0(0.5, 4), 1.0);
    assert_eq!(p0(3.0, 4), 3.0);
    assert_eq!(p0(10.0, 4), 4.0);
}

proptest! {
    #[test]
    fn spread_is_scale_free_and_at_least_one(v in prop::collection::vec(0.01f64..100.0, 1..20), s in 0.01f64..100.0) {
        let a = spread(&v);
        prop_assert!(a >= 1.0);
        let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
        prop_assert!((spread(&scaled) - a).abs() <= 1e-12 * a);
    }
}
