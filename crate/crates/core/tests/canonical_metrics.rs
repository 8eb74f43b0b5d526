//! Scalar curvature, Futaki invariants, the Futaki–Mabuchi form and
//! extremal fields on the sphere quotient.

use std::f64::consts::PI;

use spt_core::canonical::{self, FieldKind, HolomorphicFieldBasis};
use spt_core::{psh, BasicFunction, SasakiModel, SptError};

fn sphere() -> std::sync::Arc<SasakiModel> {
    SasakiModel::sphere(64).unwrap()
}

#[test]
fn fubini_study_has_constant_curvature() {
    let m = sphere();
    let r = canonical::scalar_curvature(&BasicFunction::zero(&m)).unwrap();
    let worst = (0..m.len()).filter(|&i| r.values[i] != 0.0).map(|i| (r.values[i] - 2.0 * PI).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-4, "{worst}");
    assert!((r.mean - 2.0 * PI).abs() <= 1e-4);
}

#[test]
fn flat_torus_curvature_vanishes() {
    let t = SasakiModel::torus(1, 32).unwrap();
    let r = canonical::scalar_curvature(&BasicFunction::zero(&t)).unwrap();
    assert!(r.values.iter().all(|x| x.abs() < 1e-12));
    let k = canonical::modified_k_integrand(&BasicFunction::zero(&t), None).unwrap();
    assert!(k.sup < 1e-12);
}

#[test]
fn average_curvature_is_cohomological() {
    let m = sphere();
    let u = psh::random_tpsh(&m, 2, 0.3, 3).unwrap();
    let r = canonical::scalar_curvature(&u).unwrap();
    assert!((r.mean - r.cohomological).abs() <= 1e-4, "{} vs {}", r.mean, r.cohomological);
}

#[test]
fn futaki_vanishes_on_the_reference() {
    let m = sphere();
    let z = BasicFunction::zero(&m);
    for k in HolomorphicFieldBasis::standard().fields {
        assert!(canonical::futaki(k, &z).unwrap().value.abs() < 1e-10);
    }
    let u = psh::random_tpsh(&m, 3, 0.3, 3).unwrap();
    assert!(canonical::futaki(FieldKind::Reeb, &u).unwrap().value.abs() < 1e-10);
}

#[test]
fn futaki_is_potential_independent() {
    let m = sphere();
    let u = psh::random_tpsh(&m, 4, 0.3, 3).unwrap();
    for k in HolomorphicFieldBasis::rotations().fields {
        let f = canonical::futaki(k, &u).unwrap();
        assert!(f.value.abs() <= 1e-3);
        assert!((f.value - f.potential_form).abs() <= 1e-3);
    }
}

#[test]
fn futaki_mabuchi_form() {
    let m = sphere();
    let z = BasicFunction::zero(&m);
    assert!((canonical::fm_bilinear(FieldKind::Reeb, FieldKind::Reeb, &z).unwrap() - 1.0).abs() < 1e-6);
    let u = psh::random_tpsh(&m, 5, 0.3, 3).unwrap();
    let d = canonical::CanonicalData::new(&u).unwrap();
    let d0 = canonical::CanonicalData::new(&z).unwrap();
    for y in HolomorphicFieldBasis::standard().fields {
        for w in HolomorphicFieldBasis::standard().fields {
            assert_eq!(d.bilinear(y, w), d.bilinear(w, y));
            assert!((d.bilinear(y, w).re - d0.bilinear(y, w).re).abs() <= 1e-3);
        }
    }
    // Rotation potentials are first spherical harmonics: B = 1/(12π²).
    let b = d0.bilinear(FieldKind::RotZ, FieldKind::RotZ).re;
    assert!((b - 1.0 / (12.0 * PI * PI)).abs() < 1e-5);
}

#[test]
fn extremal_fields() {
    let m = sphere();
    let z = BasicFunction::zero(&m);
    let e = canonical::extremal_field(&HolomorphicFieldBasis::standard(), &z).unwrap();
    assert!(e.coefficients.iter().all(|c| c.abs() < 1e-10));
    let r = canonical::extremal_field(&HolomorphicFieldBasis::reeb_only(), &z).unwrap();
    assert!(r.coefficients[0].abs() < 1e-10);
    let u = psh::random_tpsh(&m, 6, 0.3, 3).unwrap();
    let basis = HolomorphicFieldBasis { fields: vec![FieldKind::RotX, FieldKind::RotY, FieldKind::RotZ] };
    let e = canonical::extremal_field(&basis, &u).unwrap();
    assert!(e.residual <= 1e-8);
    let k = canonical::modified_k_integrand(&u, Some(&e)).unwrap();
    assert!(k.mean.abs() <= 1e-6);
    let k0 = canonical::modified_k_integrand(&z, None).unwrap();
    assert!(k0.sup <= 1e-4);
}

#[test]
fn degenerate_requests_fail() {
    let coarse = SasakiModel::sphere(32).unwrap();
    assert!(matches!(canonical::CanonicalData::new(&BasicFunction::zero(&coarse)), Err(SptError::BadGrid(_))));
    let m = sphere();
    let twice = HolomorphicFieldBasis { fields: vec![FieldKind::RotZ, FieldKind::RotZ] };
    assert!(matches!(canonical::extremal_field(&twice, &BasicFunction::zero(&m)), Err(SptError::SingularGram { .. })));
    let rhs = vec![1.0; m.len()];
    let w = m.ref_weights().to_vec();
    assert!(matches!(canonical::poisson_solve(&m, &rhs, &w), Err(SptError::PoissonNotSolvable { .. })));
}
