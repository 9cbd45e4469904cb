use mkorders::catalog::{self, KEYS};
use mkorders::pingpong::{self, Certificate};
use mkorders::Realization;

#[test]
fn every_catalog_system_is_certified() {
    for key in KEYS {
        let p = catalog::by_key(key).unwrap();
        assert!(p.report().is_valid(), "{key}");
        let r = Realization::build(&p).unwrap();
        assert!(r.check_conditions().is_empty(), "{key}: {:?}", r.check_conditions());
        let data = pingpong::omega_sets(&r);
        assert!(pingpong::check_strict_inclusions(&r, &data).passed(), "{key}");
        let cert = pingpong::certify(&r, pingpong::DEFAULT_MAX_LEVEL).unwrap();
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(pingpong::verify(&r, &back), Ok(cert.slack.clone()), "{key}");
        assert_eq!(r.extract_pattern(3).unwrap(), p.canonicalize(), "{key}");
    }
}

#[test]
fn lifts_of_both_families() {
    for k in [5, 7, 11, 13, 17, 19] {
        let p = catalog::lift(k).unwrap();
        assert_eq!(p.k(), k);
        assert!(catalog::lift_checks(&p).unwrap().is_empty(), "k = {k}");
        assert_eq!(p.principal_cycle().f1.len(), 2 * k);
    }
    for k in [3, 9, 15] {
        assert!(catalog::lift(k).is_err(), "k = {k}");
    }
}

#[test]
fn degree9_display_agrees() {
    assert!(catalog::degree9_checks().is_empty());
    assert_eq!(catalog::degree9().word_string(), catalog::DEGREE9_GROUPS.concat());
}
