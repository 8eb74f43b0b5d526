//! Plurisubharmonicity margins, cutoffs, mollifiers and seeded families.

use std::f64::consts::PI;

use proptest::prelude::*;
use spt_core::psh::{self, Lift, SingularPrototype};
use spt_core::{BasicFunction, SasakiModel, SptError};

fn torus(points: usize) -> std::sync::Arc<SasakiModel> {
    SasakiModel::torus(1, points).unwrap()
}

#[test]
fn zero_has_unit_margin() {
    assert_eq!(psh::psh_margin(&BasicFunction::zero(&torus(32))), 1.0);
}

#[test]
fn sine_margin_matches_its_laplacian() {
    let m = torus(64);
    let u = BasicFunction::from_fn(&m, |x| 0.1 * (2.0 * PI * x[0]).sin());
    // ¼ of the five-point Laplacian of sin(2πx) at its peak.
    let h = 1.0 / 64.0;
    let discrete = 1.0 - 0.1 * (2.0 - 2.0 * (2.0 * PI * h).cos()) / (4.0 * h * h);
    let margin = psh::psh_margin(&u);
    assert!((margin - discrete).abs() < 1e-3);
    assert!((margin - (1.0 - 0.1 * PI * PI)).abs() < 2e-3, "margin {margin}");
    let big = BasicFunction::from_fn(&m, |x| 3.0 * (2.0 * PI * x[0]).sin());
    assert!(matches!(psh::require_tpsh(&big), Err(SptError::NotPlurisubharmonic { .. })));
}

#[test]
fn cutoff_cases() {
    let m = torus(16);
    let u = psh::random_tpsh(&m, 2, 0.5, 2).unwrap();
    assert_eq!(psh::canonical_cutoff(&u, 10.0).unwrap().values(), u.values());
    let c = psh::canonical_cutoff(&BasicFunction::constant(&m, -5.0), 3.0).unwrap();
    assert!(c.values().iter().all(|&x| x == -3.0));
}

#[test]
fn prototype_cap_matches_profile_inversion() {
    let m = torus(128);
    let p = SingularPrototype::new(&[0.5, 0.5], 0.5, 0.3).unwrap().with_admissible_scale(&m, 0.2).unwrap();
    let level = 0.5 * -p.sample(&m).unwrap().inf();
    let cut = psh::canonical_cutoff(&p.sample(&m).unwrap(), level).unwrap();
    let r = p.level_radius(level).unwrap();
    let cell = 1.0 / (128.0 * 128.0);
    let capped = cut.values().iter().filter(|&&x| x <= -level + 1e-15).count() as f64 * cell;
    let exact = psh::ball_volume(1, r);
    assert!((capped - exact).abs() < 0.05 * exact + 4.0 * r / 128.0, "{capped} vs {exact}");
}

#[test]
fn mollifying_constants_only_lifts() {
    let m = torus(16);
    let c = BasicFunction::constant(&m, -0.25);
    let out = psh::mollify(&c, 0.05, Lift::Fixed(0.125)).unwrap();
    assert!(out.values().iter().all(|&x| (x + 0.125).abs() < 1e-14));
}

#[test]
fn mollifier_converges_at_first_order_or_better() {
    let m = torus(64);
    let u = psh::random_tpsh(&m, 5, 0.3, 2).unwrap();
    let gaps: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&s| psh::mollify(&u, s, Lift::Fixed(0.0)).unwrap().sup_dist(&u))
        .collect();
    assert!(gaps[1] <= 0.5 * gaps[0] * 1.05 && gaps[2] <= 0.5 * gaps[1] * 1.05, "{gaps:?}");
}

#[test]
fn mollified_max_decreases() {
    let m = torus(64);
    let a = psh::random_tpsh(&m, 6, 0.3, 2).unwrap();
    let b = psh::random_tpsh(&m, 7, 0.3, 2).unwrap();
    let u = a.max_with(&b);
    let ladder = psh::mollify_ladder(&u, 0.05, 4).unwrap();
    for w in ladder.windows(2) {
        assert!(w[1].sub(&w[0]).sup() <= 1e-12);
    }
    for v in &ladder {
        assert!(psh::psh_margin(v) >= -1e-6);
    }
}

#[test]
fn sup_mean_gap_cases() {
    let m = torus(64);
    let g = psh::sup_mean_gap(&BasicFunction::constant(&m, 2.0)).unwrap();
    assert!((g.sup - g.mean).abs() < 1e-14 && g.holds());
    let s = BasicFunction::from_fn(&m, |x| 0.1 * (2.0 * PI * x[0]).sin());
    let g = psh::sup_mean_gap(&s).unwrap();
    assert!((g.sup - g.mean - 0.1).abs() < 1e-12);
    assert!(g.bound >= 0.1 && g.holds());
}

#[test]
fn unit_margin_gives_zero() {
    let m = torus(16);
    let u = psh::random_tpsh(&m, 1, 1.0, 3).unwrap();
    assert!(u.values().iter().all(|&x| x == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn seeded_margin_is_the_requested_one(seed in 0u64..10_000, delta in 0.05f64..0.95, freq in 1usize..5) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, delta, freq).unwrap();
        let margin = psh::psh_margin(&u);
        prop_assert!(margin >= delta - 1e-9 && margin <= 1.0);
        prop_assert!(psh::is_tpsh(&u));
        let again = psh::random_tpsh(&m, seed, delta, freq).unwrap();
        prop_assert_eq!(u.values(), again.values());
    }

    #[test]
    fn seeded_family_satisfies_sup_mean_bound(seed in 0u64..10_000) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, 0.1, 4).unwrap();
        prop_assert!(psh::sup_mean_gap(&u).unwrap().holds());
    }

    #[test]
    fn cutoffs_are_monotone_in_depth(seed in 0u64..1000, h in 0.01f64..0.2) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, 0.2, 3).unwrap();
        let a = psh::canonical_cutoff(&u, h).unwrap();
        let b = psh::canonical_cutoff(&u, 2.0 * h).unwrap();
        prop_assert!(b.sub(&a).sup() <= 0.0);
        prop_assert!(u.sub(&b).sup() <= 0.0);
    }
}
