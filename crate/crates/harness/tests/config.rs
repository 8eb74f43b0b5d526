//! Scenario text form and the check registry.

use std::collections::HashSet;

use proptest::prelude::*;
use spt_harness::config::parse_seed_range;
use spt_harness::registry::{self, Suite};
use spt_harness::{HarnessError, Scenario};

#[test]
fn empty_text_gives_defaults() {
    assert_eq!(Scenario::from_text("").unwrap(), Scenario::default());
}

#[test]
fn defaults_round_trip() {
    let d = Scenario::default();
    assert_eq!(Scenario::from_text(&d.to_text()).unwrap(), d);
    // The commented tolerance list does not change the scenario.
    assert_eq!(Scenario::from_text(&Scenario::defaults_text()).unwrap(), d);
}

#[test]
fn overrides_are_applied() {
    let text = "[model]\ntorus_points = 48\n[seeds]\nstart = 3\nend = 7\n[geodesic]\neps = 1e-2, 5e-3\n[tolerances]\nma.full-mass = 1e-6\n";
    let s = Scenario::from_text(text).unwrap();
    assert_eq!(s.torus_points, 48);
    assert_eq!(s.seeds().collect::<Vec<_>>(), vec![3, 4, 5, 6, 7]);
    assert_eq!(s.eps, vec![1e-2, 5e-3]);
    assert_eq!(s.tolerance("ma.full-mass", 1e-8), 1e-6);
    assert_eq!(s.tolerance("ma.comparison", 1e-6), 1e-6);
    assert_eq!(Scenario::from_text(&s.to_text()).unwrap(), s);
}

#[test]
fn bad_configs_are_config_errors() {
    for text in [
        "[model]\ncolour = blue\n",
        "[tolerances]\nno.such-check = 1\n",
        "[generator]\ndelta = 0\n",
        "[geodesic]\neps = 1e-3, 2e-3\n",
        "[seeds]\nstart = 5\nend = 1\n",
        "[model]\ntorus_points = many\n",
        "[model]\ntorus_n = 3\n",
        "[geodesic]\nslices = 4\n",
    ] {
        let e = Scenario::from_text(text).unwrap_err();
        assert!(matches!(e, HarnessError::Config(_)), "{text}: {e}");
        assert_eq!(e.exit_code(), 2);
    }
}

#[test]
fn seed_ranges() {
    assert_eq!(parse_seed_range("1:10").unwrap(), (1, 10));
    assert_eq!(parse_seed_range("4").unwrap(), (4, 4));
    for bad in ["10:1", "a:b", "1:", ""] {
        assert!(matches!(parse_seed_range(bad), Err(HarnessError::Usage(_))), "{bad}");
    }
}

#[test]
fn registry_is_well_formed() {
    let checks = registry::checks();
    let ids: HashSet<&str> = checks.iter().map(|c| c.id).collect();
    assert_eq!(ids.len(), checks.len(), "check ids must be unique");
    for s in Suite::ALL {
        assert!(!registry::select(Some(s)).is_empty(), "{} has no checks", s.name());
        assert_eq!(Suite::parse(s.name()), Some(Some(s)));
    }
    assert_eq!(registry::select(None).len(), checks.len());
    assert!(checks.iter().all(|c| !c.statement.is_empty() && c.tol.is_finite()));
    assert!(registry::find("metric.pythagoras").is_some());
    assert!(Suite::parse("everything").is_none());
}

proptest! {
    #[test]
    fn scenario_text_round_trips(
        points in 8usize..100,
        start in 0u64..50,
        len in 0u64..20,
        delta in 0.01f64..1.0,
        e0 in 1e-4f64..1e-1,
        tol in 1e-12f64..1.0,
    ) {
        let mut s = Scenario { torus_points: points, seed_start: start, seed_end: start + len, delta, ..Scenario::default() };
        s.eps = vec![e0, e0 / 3.0, e0 / 7.0];
        s.tolerances.insert("energy.cocycle".into(), tol);
        prop_assert_eq!(Scenario::from_text(&s.to_text()).unwrap(), s);
    }
}
