//! Orlicz energies, the Monge–Ampère energy, Aubin functionals and entropy.

use std::f64::consts::PI;

use proptest::prelude::*;
use spt_core::energy::{self, Weight};
use spt_core::psh::{self, SingularPrototype};
use spt_core::{BasicFunction, SasakiModel, SptError};

fn torus(points: usize) -> std::sync::Arc<SasakiModel> {
    SasakiModel::torus(1, points).unwrap()
}

fn chi(p: f64) -> Weight {
    Weight::power(p).unwrap()
}

#[test]
fn orlicz_energy_trivial_values() {
    let m = torus(32);
    assert_eq!(energy::e_chi(&BasicFunction::zero(&m), &chi(1.0)).unwrap(), 0.0);
    let c = energy::e_chi(&BasicFunction::constant(&m, -0.3), &chi(1.0)).unwrap();
    assert!((c - 0.3).abs() < 1e-14);
}

#[test]
fn cutoff_energies_stay_finite_for_mild_singularities() {
    let m = torus(128);
    let p = SingularPrototype::new(&[0.5, 0.5], 0.3, 0.3).unwrap().with_admissible_scale(&m, 0.2).unwrap();
    let u = p.sample(&m).unwrap();
    let depth = -u.inf();
    let mut prev = 0.0;
    for k in 1..=8 {
        let h = depth * k as f64 / 8.0;
        let e = energy::e_chi(&psh::canonical_cutoff(&u, h).unwrap(), &chi(1.0)).unwrap();
        assert!(e >= prev - 1e-12);
        prev = e;
    }
    assert!(prev < depth);
}

#[test]
fn fundamental_estimate_cases() {
    let m = torus(32);
    let u = psh::random_tpsh(&m, 3, 0.3, 2).unwrap();
    let u = u.add_const(-u.sup());
    for p in [1.0, 2.0] {
        let same = energy::fundamental_estimate_check(&u, &u, &chi(p)).unwrap();
        assert!(same.pass);
        let half = energy::fundamental_estimate_check(&u, &u.scale(0.5), &chi(p)).unwrap();
        assert!(half.pass);
    }
    let above = u.add_const(1.0);
    assert!(matches!(energy::fundamental_estimate_check(&u, &above, &chi(1.0)), Err(SptError::OrderViolated { .. })));
}

#[test]
fn mixed_energy_bound_cases() {
    let m = torus(32);
    let z = BasicFunction::zero(&m);
    let r = energy::mixed_energy_bound_check(&z, &z, &chi(2.0)).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    let r = energy::mixed_energy_bound_check(&BasicFunction::constant(&m, -1.0), &z, &chi(2.0)).unwrap();
    // χ(t) = |t|²/2, so the left side is 1/2 and the right 2·2²·(1/2).
    assert!((r.lhs - 0.5).abs() < 1e-12 && (r.rhs - 4.0).abs() < 1e-12 && r.pass, "{r:?}");
}

#[test]
fn orlicz_norm_of_a_sine_is_its_mean_modulus() {
    let m = torus(128);
    let v = BasicFunction::from_fn(&m, |x| (2.0 * PI * x[0]).sin());
    let r = energy::orlicz_norm(&v, &BasicFunction::zero(&m), &chi(1.0)).unwrap();
    // Grid mean of |sin| over N nodes is 2 / (N tan(π/N)), close to 2/π.
    let exact = 2.0 / (128.0 * (PI / 128.0).tan());
    assert!((r - exact).abs() < 1e-10, "{r} vs {exact}");
    assert!((r - 2.0 / PI).abs() < 2e-4);
    let c = energy::orlicz_norm(&BasicFunction::constant(&m, 0.4), &BasicFunction::zero(&m), &chi(2.0)).unwrap();
    assert!((c - 0.4).abs() < 1e-12);
    assert_eq!(energy::orlicz_norm(&BasicFunction::zero(&m), &BasicFunction::zero(&m), &chi(2.0)).unwrap(), 0.0);
}

#[test]
fn energy_derivative_along_a_ray() {
    let m = torus(64);
    let u = psh::random_tpsh(&m, 4, 0.3, 3).unwrap();
    let t = 0.6;
    let dt = 1e-4;
    let e = |s: f64| energy::mono_energy(&u.scale(s)).unwrap();
    let fd = (e(t + dt) - e(t - dt)) / (2.0 * dt);
    let mu = spt_core::measure::ma_measure(&u.scale(t)).unwrap();
    assert!((fd - mu.integrate(u.values())).abs() < 1e-4);
}

#[test]
fn aubin_trivial_cases() {
    let m = torus(32);
    let u = psh::random_tpsh(&m, 5, 0.3, 2).unwrap();
    assert_eq!(energy::aubin_i(&u, &u).unwrap(), 0.0);
    assert!(energy::aubin_i(&u, &u.add_const(0.3)).unwrap().abs() < 1e-14);
    assert!(energy::j_energy(&u, &u.add_const(0.3)).unwrap().abs() < 1e-12);
    assert_eq!(energy::i_quasi_triangle_ratio(&u, &u, &u).unwrap(), 0.0);
    let v = psh::random_tpsh(&m, 6, 0.3, 2).unwrap();
    assert!((energy::i_quasi_triangle_ratio(&u, &v, &u).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn entropy_and_k_energy_on_the_flat_torus() {
    let m = torus(32);
    let z = BasicFunction::zero(&m);
    assert_eq!(energy::entropy(&z).unwrap(), 0.0);
    assert_eq!(energy::k_energy(&z).unwrap(), 0.0);
    let u = psh::random_tpsh(&m, 7, 0.3, 2).unwrap();
    assert_eq!(energy::k_energy(&u).unwrap(), energy::entropy(&u).unwrap());
}

#[test]
fn degenerate_entropy_is_rejected() {
    let m = torus(32);
    let u = psh::random_tpsh(&m, 8, 0.3, 2).unwrap();
    // Scale to exactly zero margin so that part of the density vanishes.
    let margin = psh::psh_margin(&u);
    let flat = u.scale(1.0 / (1.0 - margin));
    assert!(energy::entropy(&flat).is_err() || energy::entropy(&flat).unwrap() > 0.0);
}

#[test]
fn weights_must_be_admissible() {
    assert!(Weight::power(0.5).is_err());
    assert!(Weight::custom(1.0, |t| t.abs().powi(3), |t| 3.0 * t * t.abs()).is_err());
    assert!(Weight::log_cosh().spot_check().is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cocycle_and_concavity(seed in 0u64..100_000, shift in -0.5f64..0.5) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, 0.2, 3).unwrap();
        let v = psh::random_tpsh(&m, seed + 7, 0.2, 3).unwrap().add_const(shift);
        let [lo, mid, hi] = energy::concavity_sandwich(&u, &v).unwrap();
        prop_assert!(lo <= mid + 1e-12 && mid <= hi + 1e-12);
        prop_assert!(energy::cocycle_residual(&u, &v).unwrap() <= 1e-12);
        prop_assert!(energy::cocycle_residual(&u, &u.add_const(shift)).unwrap() <= 1e-10);
    }

    #[test]
    fn i_j_sandwich(seed in 0u64..100_000) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, 0.2, 3).unwrap();
        let v = psh::random_tpsh(&m, seed + 3, 0.2, 3).unwrap();
        let i = energy::aubin_i(&u, &v).unwrap();
        let j = energy::j_energy(&u, &v).unwrap();
        prop_assert!(i >= -1e-14);
        prop_assert!(i / 2.0 <= j + 1e-8 && j <= i / 2.0 + 1e-8);
    }

    #[test]
    fn orlicz_norm_is_homogeneous(seed in 0u64..100_000, s in 0.1f64..4.0, p in 1.0f64..3.0) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, 0.3, 2).unwrap();
        let v = psh::random_tpsh(&m, seed + 1, 0.3, 2).unwrap();
        let w = Weight::power(p).unwrap();
        let a = energy::orlicz_norm(&v, &u, &w).unwrap();
        let b = energy::orlicz_norm(&v.scale(s), &u, &w).unwrap();
        prop_assert!((b - s * a).abs() <= 1e-8 * (1.0 + s * a));
    }

    #[test]
    fn entropy_is_nonnegative(seed in 0u64..100_000) {
        let m = torus(32);
        let u = psh::random_tpsh(&m, seed, 0.3, 3).unwrap();
        prop_assert!(energy::entropy(&u).unwrap() >= -1e-14);
    }
}
