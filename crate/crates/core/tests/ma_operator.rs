//! Monge–Ampère measures, maximum identities, comparison and capacity.

use std::f64::consts::PI;

use proptest::prelude::*;
use spt_core::measure::{self, InequalityCheck};
use spt_core::psh::{self, SingularPrototype};
use spt_core::{BasicFunction, SasakiModel, SptError};

fn torus(points: usize) -> std::sync::Arc<SasakiModel> {
    SasakiModel::torus(1, points).unwrap()
}

#[test]
fn sine_density_closed_form() {
    let m = torus(64);
    let u = BasicFunction::from_fn(&m, |x| 0.1 * (2.0 * PI * x[0]).sin());
    let mu = measure::ma_measure(&u).unwrap();
    let h = 1.0 / 64.0;
    let lam = (2.0 - 2.0 * (2.0 * PI * h).cos()) / (4.0 * h * h);
    for (i, d) in mu.density.iter().enumerate() {
        let x = m.coords(i)[0];
        assert!((d - (1.0 - 0.1 * lam * (2.0 * PI * x).sin())).abs() < 1e-12);
    }
    assert!((mu.mass - 1.0).abs() <= 1e-10);
}

#[test]
fn mixed_measure_endpoints() {
    let m = SasakiModel::torus(2, 12).unwrap();
    let u = psh::random_tpsh(&m, 1, 0.4, 2).unwrap();
    let v = psh::random_tpsh(&m, 2, 0.4, 2).unwrap();
    let ma_u = measure::ma_measure(&u).unwrap().density;
    let ma_v = measure::ma_measure(&v).unwrap().density;
    let k0 = measure::mixed_measure(&u, &v, 0).unwrap().density;
    let k2 = measure::mixed_measure(&u, &v, 2).unwrap().density;
    for i in 0..m.len() {
        assert!((k0[i] - ma_v[i]).abs() < 1e-12 && (k2[i] - ma_u[i]).abs() < 1e-12);
    }
    assert!(matches!(measure::mixed_measure(&u, &v, 3), Err(SptError::BadExponent { .. })));
}

#[test]
fn mixed_measure_polarizes_the_determinant() {
    // det(sA + tB) = s²·mixed₂ + 2st·mixed₁ + t²·mixed₀ with binomial weights.
    let m = SasakiModel::torus(2, 12).unwrap();
    let u = psh::random_tpsh(&m, 3, 0.4, 2).unwrap();
    let v = psh::random_tpsh(&m, 4, 0.4, 2).unwrap();
    let mix: Vec<Vec<f64>> = (0..=2).map(|k| measure::mixed_measure(&u, &v, k).unwrap().density).collect();
    let (s, t) = (0.3, 0.7);
    let blend = u.lin(s, &v, t);
    let direct = measure::ma_measure(&blend).unwrap().density;
    for i in 0..m.len() {
        let poly = s * s * mix[2][i] + 2.0 * s * t * mix[1][i] + t * t * mix[0][i];
        assert!((poly - direct[i]).abs() < 1e-10);
    }
}

#[test]
fn maximum_identity_trivial_cases() {
    let m = torus(32);
    let u = psh::random_tpsh(&m, 5, 0.3, 2).unwrap();
    assert!(measure::bt_identity_residual(&u, &u.add_const(-1.0)).unwrap() <= 1e-10);
    assert_eq!(measure::bt_identity_residual(&u, &u).unwrap(), 0.0);
    let d = measure::gbt_max_mass(&u, &BasicFunction::constant(&m, -1e3)).unwrap();
    assert!((d.u_side - 1.0).abs() < 1e-10 && d.residual < 1e-10);
}

#[test]
fn maximum_decomposition_mirrors_under_swap() {
    let m = torus(32);
    let u = psh::random_tpsh(&m, 8, 0.3, 2).unwrap();
    let v = psh::random_tpsh(&m, 9, 0.3, 2).unwrap();
    let a = measure::gbt_max_mass(&u, &v).unwrap();
    let b = measure::gbt_max_mass(&v, &u).unwrap();
    assert!((a.u_side - b.v_side).abs() < 1e-10 && (a.v_side - b.u_side).abs() < 1e-10);
    assert!((a.kink - b.kink).abs() < 1e-10);
}

#[test]
fn cutoff_masses_grow_with_depth() {
    let m = torus(64);
    let p = SingularPrototype::new(&[0.3, 0.6], 0.4, 0.3).unwrap().with_admissible_scale(&m, 0.2).unwrap();
    let u = p.sample(&m).unwrap();
    let mut last = 0.0;
    for h in [0.25, 0.5, 1.0, 2.0].map(|f| f * -u.inf() / 2.0) {
        let uh = psh::canonical_cutoff(&u, h).unwrap();
        let mask: Vec<bool> = u.values().iter().map(|&x| x > -h).collect();
        let mass = measure::ma_measure(&uh).unwrap().mass_on(&mask);
        assert!(mass >= last - 1e-12);
        last = mass;
    }
}

#[test]
fn comparison_trivial_cases() {
    let m = torus(32);
    let u = psh::random_tpsh(&m, 10, 0.3, 2).unwrap();
    assert_eq!(measure::comparison_residual(&u, &u).unwrap(), 0.0);
    assert!(measure::comparison_residual(&u.add_const(1.0), &u).unwrap() <= 1e-12);
}

#[test]
fn capacity_trivial_cases() {
    let m = torus(32);
    let zero = BasicFunction::zero(&m);
    let all = measure::capacity_lower(&vec![true; m.len()], std::slice::from_ref(&zero)).unwrap();
    assert!(all.lower >= 1.0 - 1e-12);
    let none = measure::capacity_lower(&vec![false; m.len()], std::slice::from_ref(&zero)).unwrap();
    assert_eq!(none.lower, 0.0);
    let est = measure::capacity_lower(&vec![false; m.len()], std::slice::from_ref(&zero)).unwrap();
    assert!(measure::capacity_bound_check(&zero, 1.0, &est).unwrap().pass);
    let two = BasicFunction::constant(&m, -2.0);
    let full = measure::capacity_lower(&vec![true; m.len()], &[zero]).unwrap();
    let c = measure::capacity_bound_check(&two, 1.0, &full).unwrap();
    assert!((c.rhs - 3.0).abs() < 1e-12 && c.pass);
}

#[test]
fn prototype_capacity_bounds_hold() {
    let m = torus(64);
    let p = SingularPrototype::new(&[0.5, 0.25], 0.5, 0.3).unwrap().with_admissible_scale(&m, 0.2).unwrap();
    let u = p.sample(&m).unwrap();
    // Clipped, scaled bumps centred on the singularity.
    let family: Vec<BasicFunction> = (1..=16)
        .map(|k| {
            let a = 0.01 * k as f64;
            BasicFunction::from_fn(&m, |x| {
                a * ((2.0 * PI * (x[0] - 0.5)).cos() + (2.0 * PI * (x[1] - 0.25)).cos() + 2.0) / 4.0
            })
        })
        .collect();
    for t in [0.5, 1.0, 2.0] {
        let mask: Vec<bool> = u.values().iter().map(|&x| x < -t).collect();
        let est = measure::capacity_lower(&mask, &family).unwrap();
        let c = measure::capacity_bound_check(&u, t, &est).unwrap();
        assert!(c.pass && c.slack > 0.0, "t={t}: {c:?}");
    }
}

#[test]
fn invalid_candidates_are_named() {
    let m = torus(16);
    let bad = BasicFunction::constant(&m, 2.0);
    let r = measure::capacity_lower(&vec![true; m.len()], &[BasicFunction::zero(&m), bad]);
    assert!(matches!(r, Err(SptError::InvalidCandidate { index: 1, .. })));
}

#[test]
fn cln_inequality_for_constants_and_seeds() {
    let m = SasakiModel::torus(2, 10).unwrap();
    let psi = BasicFunction::constant(&m, -0.5);
    let phi = BasicFunction::constant(&m, 0.2);
    let r = measure::cln_check(&psi, &phi, &[]).unwrap();
    assert!((r.lhs - r.rhs).abs() < 1e-12 && r.pass);
    let psi = psh::random_tpsh(&m, 1, 0.3, 2).unwrap();
    let phi = psh::random_tpsh(&m, 2, 0.3, 2).unwrap();
    let t = psh::random_tpsh(&m, 3, 0.3, 2).unwrap();
    assert!(measure::cln_check(&psi, &phi, &[]).unwrap().pass);
    assert!(matches!(measure::cln_check(&psi, &phi, &[t.clone(), t]), Err(SptError::BadExponent { .. })));
}

#[test]
fn inequality_helpers() {
    assert!(InequalityCheck::new(1.0, 1.0, 0.0).pass);
    assert!(!InequalityCheck::new(1.1, 1.0, 0.05).pass);
    assert!(InequalityCheck::relative(1.01, 1.0, 0.02).pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn full_mass_for_seeded_potentials(seed in 0u64..100_000, delta in 0.02f64..0.99, freq in 1usize..6) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, delta, freq).unwrap();
        let mu = measure::ma_measure(&u).unwrap();
        prop_assert!((mu.mass - 1.0).abs() <= 1e-8);
        prop_assert!(mu.min_density() >= delta - 1e-9);
    }

    #[test]
    fn maximum_identity_off_the_kink(seed in 0u64..100_000) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, 0.3, 3).unwrap();
        let v = psh::random_tpsh(&m, seed + 1, 0.3, 3).unwrap();
        prop_assert!(measure::bt_identity_residual(&u, &v).unwrap() <= 1e-6);
        prop_assert!(measure::comparison_residual(&u, &v).unwrap() <= 1e-6);
    }
}
