//! Models, cone charts, Type-I deformations and grid files.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use spt_core::geometry::{
    build_model, chart, contact_checks, cone_chart, cr_residual, typei, typei_deform, ChartDomain, LocalPotential,
};
use spt_core::{io, measure, psh, BasicFunction, GridSpec, ModelKind, SasakiModel, SptError};

#[test]
fn flat_torus_has_unit_volume() {
    let m = SasakiModel::torus(1, 64).unwrap();
    assert!((m.volume() - 1.0).abs() <= 1e-10);
    assert_eq!(m.margin(), 1.0);
}

#[test]
fn volume_ignores_an_exact_perturbation() {
    let m = SasakiModel::torus(1, 64).unwrap();
    let psi = m.sample(|x| 0.05 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin());
    let pm = build_model(ModelKind::Torus { n: 1 }, GridSpec::torus(1, 64), Some(psi)).unwrap();
    let mass = measure::ma_measure(&BasicFunction::zero(&pm)).unwrap().mass;
    assert!((mass - 1.0).abs() <= 1e-8, "mass {mass}");
}

#[test]
fn torus_in_two_dimensions() {
    let m = SasakiModel::torus(2, 24).unwrap();
    assert!((m.volume() - 1.0).abs() <= 1e-10);
    assert!((m.margin() - 1.0).abs() <= 1e-12);
    assert_eq!(m.len(), 24usize.pow(4));
}

#[test]
fn sphere_quadrature_converges() {
    let coarse = SasakiModel::sphere(64).unwrap();
    let fine = SasakiModel::sphere(128).unwrap();
    assert!((coarse.volume() - 1.0).abs() < 1e-6);
    assert!((fine.volume() - 1.0).abs() < (coarse.volume() - 1.0).abs().max(1e-8));
}

#[test]
fn bad_grids_are_rejected() {
    assert!(matches!(SasakiModel::torus(1, 2), Err(SptError::BadGrid(_))));
    assert!(matches!(SasakiModel::torus(3, 8), Err(SptError::BadGrid(_)) | Err(SptError::Unsupported(_))));
}

#[test]
fn flat_chart_values() {
    let c = cone_chart(1, LocalPotential::flat(1), ChartDomain::ball(1, 0.5)).unwrap();
    let w = c.eval(1.0, 0.0, &[0.0, 0.0]);
    assert!((w[0] - Complex64::new(0.0, 0.0)).norm() < 1e-15);
    let w = c.eval(std::f64::consts::E, FRAC_PI_2, &[0.0, 0.0]);
    assert!((w[0] - Complex64::new(1.0, FRAC_PI_2)).norm() < 1e-15);
}

#[test]
fn quadratic_charts_are_exactly_holomorphic() {
    for (n, seed) in [(1, 1), (2, 2)] {
        let c = cone_chart(n, LocalPotential::seeded_quadratic(n, seed, 0.1), ChartDomain::ball(n, 0.5)).unwrap();
        assert!(cr_residual(&c, &[16, 32, 64]).max_residual() <= 1e-12);
    }
}

#[test]
fn quartic_defect_decreases_at_second_order() {
    let c = cone_chart(1, LocalPotential::seeded_quartic(1, 11, 0.1), ChartDomain::ball(1, 0.5)).unwrap();
    let t = cr_residual(&c, &[16, 32, 64]);
    assert!(t.levels.windows(2).all(|w| w[1].residual < w[0].residual));
    let o = t.min_order().unwrap();
    assert!((o - 2.0).abs() < 0.2, "order {o}");
}

#[test]
fn concave_potential_is_not_a_chart() {
    let mut h = LocalPotential::flat(1);
    for t in &mut h.terms {
        t.1 = -t.1;
    }
    assert!(matches!(chart::cone_chart(1, h, ChartDomain::ball(1, 0.5)), Err(SptError::NotPlurisubharmonic { .. })));
}

fn s3(a1: f64, a2: f64) -> std::sync::Arc<SasakiModel> {
    build_model(ModelKind::WeightedContactS3 { a1, a2 }, GridSpec::torus(1, 32), None).unwrap()
}

#[test]
fn parallel_deformation_rescales_eta() {
    let d = typei_deform(&s3(1.0, 1.0), [0.2, 0.2]).unwrap();
    for p in typei::sample_points(50, 3) {
        let (a, b) = (d.eta(&p), d.eta_base(&p));
        for k in 0..3 {
            assert!((a[k] - b[k] / 1.2).abs() < 1e-14);
        }
    }
}

#[test]
fn typei_needs_the_contact_sphere() {
    let t = SasakiModel::torus(1, 16).unwrap();
    assert!(matches!(typei_deform(&t, [0.1, 0.0]), Err(SptError::Unsupported(_))));
}

#[test]
fn margin_scan_trivial_cases() {
    let m = s3(1.0, 2.0);
    let zero = |_: f64, _: f64, _: f64| 0.0;
    let d = typei_deform(&m, [0.1, -0.05]).unwrap();
    assert_eq!(typei::typei_psh_margin(&d, zero, 1.0).unwrap().eps_required, 0.0);
    let prof = typei::InvariantProfile::seeded(4, 3, 0.05);
    let id = typei_deform(&m, [0.0, 0.0]).unwrap();
    assert_eq!(typei::typei_psh_margin(&id, prof.as_fn(), 1e6).unwrap().eps_required, 0.0);
    let twisted = |s: f64, t1: f64, _: f64| s.cos() * t1.sin();
    assert!(matches!(typei::typei_psh_margin(&d, twisted, 1e6), Err(SptError::NotBasic { .. })));
}

#[test]
fn grid_files_reject_malformed_input() {
    assert!(io::decode_sptg(b"NOPE\x01\0\0\0").is_err());
    assert!(io::decode_csv("1\n2\n").is_err());
    let m = SasakiModel::torus(1, 8).unwrap();
    assert!(io::decode_csv("# dims=4,4\n").is_err());
    let good = io::RawGrid { dims: vec![4, 4], values: vec![0.0; 16] };
    assert!(good.into_function(&m).is_err());
}

#[test]
fn grid_files_round_trip_on_disk() {
    let m = SasakiModel::torus(1, 16).unwrap();
    let u = psh::random_tpsh(&m, 9, 0.4, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for name in ["u.sptg", "u.csv"] {
        let path = dir.path().join(name);
        io::write_grid(&path, &u).unwrap();
        assert_eq!(io::read_grid(&path, &m).unwrap().values(), u.values());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn deformed_contact_identities_hold(r1 in -0.4f64..0.4, r2 in -0.4f64..0.4, a2 in 1.0f64..3.0, seed in 0u64..1000) {
        let d = typei_deform(&s3(1.0, a2), [r1, r2]).unwrap();
        let rep = contact_checks(&d, &typei::sample_points(200, seed));
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn sptg_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 12)) {
        let bytes = io::encode_sptg(&[3, 4], &values);
        let back = io::decode_sptg(&bytes).unwrap();
        prop_assert_eq!(back.dims, vec![3, 4]);
        prop_assert_eq!(back.values, values);
    }

    #[test]
    fn csv_round_trip(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 6)) {
        let back = io::decode_csv(&io::encode_csv(&[6], &values)).unwrap();
        prop_assert_eq!(back.values, values);
    }

    #[test]
    fn sphere_points_are_on_the_unit_sphere(i in 0usize..2 * 64 * 64) {
        let m = SasakiModel::sphere(64).unwrap();
        if let Some(p) = m.sphere_point(i) {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            prop_assert!((r - 1.0).abs() < 1e-12);
        }
    }
}
