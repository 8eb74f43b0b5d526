//! ε-geodesics, weak geodesics and the Orlicz–Finsler distances, on a
//! 32² torus to keep the solves short.

use spt_core::energy::Weight;
use spt_core::geodesic::{self, GeodesicOptions, MetricContext, WeakOptions};
use spt_core::{psh, BasicFunction, SasakiModel, SptError};

fn torus() -> std::sync::Arc<SasakiModel> {
    SasakiModel::torus(1, 32).unwrap()
}

fn ctx() -> MetricContext {
    MetricContext::new(WeakOptions::default())
}

// Extrapolating the ε ladder leaves an error of a few barrier widths.
const PATH_TOL: f64 = 5e-5;

fn w(p: f64) -> Weight {
    Weight::power(p).unwrap()
}

#[test]
fn shifted_endpoints_give_the_linear_path() {
    let m = torus();
    let u = psh::random_tpsh(&m, 1, 0.3, 2).unwrap();
    let c = 0.05;
    let ctx = ctx();
    let g = ctx.geodesic(&u, &u.add_const(c)).unwrap();
    for j in 0..=g.path.m() {
        let t = j as f64 / g.path.m() as f64;
        assert!(g.path.slice(j).sup_dist(&u.add_const(t * c)) < PATH_TOL, "{}", g.path.slice(j).sup_dist(&u.add_const(t * c)));
    }
    let prof = geodesic::speed_profile(&g, &w(1.0));
    assert!(prof.speeds.iter().all(|s| (s - c).abs() < PATH_TOL));
    let d = ctx.distance(&u, &u.add_const(c), &w(1.0)).unwrap();
    assert!((d.value - c).abs() < PATH_TOL);
    assert!((geodesic::ip_functional(&u, &u.add_const(c), 1.0).unwrap() - 2.0 * c).abs() < 1e-10);
}

#[test]
fn equal_endpoints_give_a_constant_path() {
    let m = torus();
    let u = psh::random_tpsh(&m, 2, 0.3, 2).unwrap();
    let g = ctx().geodesic(&u, &u).unwrap();
    for j in 0..=g.path.m() {
        assert!(g.path.slice(j).sup_dist(&u) < PATH_TOL, "{}", g.path.slice(j).sup_dist(&u));
    }
    assert_eq!(geodesic::ip_functional(&u, &u, 2.0).unwrap(), 0.0);
}

#[test]
fn eps_geodesic_solves_and_obeys_the_bounds() {
    let m = torus();
    let u0 = psh::random_tpsh(&m, 3, 0.3, 2).unwrap();
    let u1 = psh::random_tpsh(&m, 4, 0.3, 2).unwrap();
    let c = u0.sup_dist(&u1);
    for eps in [1e-2, 1e-3] {
        let p = geodesic::eps_geodesic(&u0, &u1, eps, &GeodesicOptions::default()).unwrap();
        assert!(p.residual <= 1e-8);
        assert_eq!(p.slices[0], u0.values());
        assert_eq!(p.slices[p.m()], u1.values());
        assert!(p.min_second_difference() >= -1e-6);
        let vmax = (0..=p.m()).map(|j| p.velocity(j).iter().fold(0.0f64, |a, v| a.max(v.abs()))).fold(0.0, f64::max);
        assert!(vmax <= c + 10.0 * eps, "{vmax} vs {c}");
    }
}

#[test]
fn invalid_geodesic_requests() {
    let m = torus();
    let u = psh::random_tpsh(&m, 5, 0.3, 2).unwrap();
    let opts = GeodesicOptions::default();
    assert!(matches!(geodesic::eps_geodesic(&u, &u, 0.0, &opts), Err(SptError::InvalidArgument(_))));
    let short = GeodesicOptions { m: 4, ..opts };
    assert!(matches!(geodesic::eps_geodesic(&u, &u, 1e-2, &short), Err(SptError::InvalidArgument(_))));
    let bad = BasicFunction::from_fn(&m, |x| 3.0 * (std::f64::consts::TAU * x[0]).sin());
    assert!(matches!(
        geodesic::eps_geodesic(&u, &bad, 1e-2, &opts),
        Err(SptError::EndpointNotPlurisubharmonic { which: 1, .. })
    ));
    let s = SasakiModel::sphere(32).unwrap();
    let z = BasicFunction::zero(&s);
    assert!(matches!(geodesic::eps_geodesic(&z, &z, 1e-2, &opts), Err(SptError::Unsupported(_))));
}

#[test]
fn weak_geodesic_of_a_crossing_pair() {
    let m = torus();
    let u0 = psh::random_tpsh(&m, 6, 0.3, 2).unwrap();
    let u1 = psh::random_tpsh(&m, 7, 0.3, 2).unwrap();
    let ctx = ctx();
    let g = ctx.geodesic(&u0, &u1).unwrap();
    assert!(g.barriers_ok && g.velocity_ok);
    assert!(g.min_convexity >= -1e-6);
    for p in [1.0, 2.0] {
        assert!(geodesic::speed_profile(&g, &w(p)).max_deviation <= 0.01);
    }
    let d1 = ctx.distance(&u0, &u1, &w(1.0)).unwrap().value;
    let d2 = ctx.distance(&u0, &u1, &w(2.0)).unwrap().value;
    assert!(d2 >= d1 * (1.0 - 1e-9));
    assert!(geodesic::symmetry_residual(&ctx, &u0, &u1, &w(2.0)).unwrap() <= 1e-4);
    assert_eq!(ctx.cached(), 2);
}

#[test]
fn metric_identities_on_simple_configurations() {
    let m = torus();
    let u = psh::random_tpsh(&m, 8, 0.3, 2).unwrap();
    let ctx = ctx();
    // Constants: a genuine triangle inequality on the line.
    let (a, b, c) = (u.add_const(-0.02), u.add_const(0.01), u.add_const(0.05));
    assert!(geodesic::triangle_check(&ctx, &a, &b, &c, 1.0).unwrap().pass);
    assert!(geodesic::pythagoras_residual(&ctx, &u, &u.add_const(0.03), 1.0).unwrap().residual <= 1e-3);
    let [x, y, z] = geodesic::sandwich_check(&ctx, &u, &u.add_const(0.04), 2.0).unwrap();
    assert!(x.pass && y.pass && z.pass);
    assert!(geodesic::rooftop_formula_residual(&ctx, &u, &u.add_const(0.02), -1.0).unwrap() <= 1e-6);
    assert!(geodesic::rooftop_formula_residual(&ctx, &u, &u.add_const(0.02), 0.0).unwrap() <= 1e-6);
    let huge = BasicFunction::constant(&m, u.sup() + 1.0);
    let k = geodesic::contractivity_check(&ctx, &u, &u.add_const(0.03), &huge, 1.0).unwrap();
    assert!(k.pass);
}

#[test]
fn order_violations_are_reported() {
    let m = torus();
    let u = psh::random_tpsh(&m, 9, 0.3, 2).unwrap();
    let r = geodesic::sandwich_check(&ctx(), &u.add_const(0.1), &u, 1.0);
    assert!(matches!(r, Err(SptError::OrderViolated { .. })));
}

#[test]
fn mollifier_ladders_converge_jointly() {
    let m = torus();
    let u = psh::random_tpsh(&m, 10, 0.3, 2).unwrap();
    let steps = geodesic::mollifier_convergence(&ctx(), &u, 0.04, 3).unwrap();
    for s in steps.windows(2) {
        assert!(s[1].d1 <= s[0].d1 && s[1].l1 <= s[0].l1 && s[1].energy_gap <= s[0].energy_gap + 1e-12);
    }
}
