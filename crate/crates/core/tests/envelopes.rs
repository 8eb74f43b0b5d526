//! Plurisubharmonic envelopes, rooftops and the contact decomposition.

use spt_core::envelope::{self, EnvelopeMethod};
use spt_core::{psh, BasicFunction, SasakiModel, SptError};

fn torus(points: usize) -> std::sync::Arc<SasakiModel> {
    SasakiModel::torus(1, points).unwrap()
}

#[test]
fn tpsh_obstacles_are_their_own_envelope() {
    let m = torus(32);
    let f = psh::random_tpsh(&m, 1, 0.3, 2).unwrap();
    let beta = envelope::envelope(&f, &EnvelopeMethod::default_beta()).unwrap();
    assert!(beta.envelope.sup_dist(&f) <= 2.0 / 2f64.powi(22) + 1e-9);
    let sweep = envelope::envelope(&f, &EnvelopeMethod::sweep()).unwrap();
    assert!(sweep.envelope.sup_dist(&f) < 1e-12);
}

#[test]
fn constant_obstacle() {
    let m = torus(32);
    let c = BasicFunction::constant(&m, 0.7);
    let r = envelope::envelope(&c, &EnvelopeMethod::sweep()).unwrap();
    assert!(r.envelope.sup_dist(&c) < 1e-12);
}

#[test]
fn spike_is_shaved_locally() {
    let m = torus(32);
    let f = BasicFunction::from_fn(&m, |x| {
        let d2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
        if d2 < 0.0025 {
            -0.2
        } else {
            0.0
        }
    });
    let sweep = envelope::envelope(&f, &EnvelopeMethod::sweep()).unwrap();
    let beta = envelope::envelope(&f, &EnvelopeMethod::default_beta()).unwrap();
    assert!(sweep.envelope.sup_dist(&beta.envelope) < 1e-5);
    let (e, fv) = (sweep.envelope.values(), f.values());
    let centre = m.len() / 2 + 16;
    assert!(e[centre] <= fv[centre] + 1e-12);
    // Near the spike the envelope drops below the obstacle; far away it touches.
    let near = (0..m.len()).filter(|&i| {
        let x = m.coords(i);
        let d2 = (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2);
        d2 > 0.0036 && d2 < 0.01
    });
    assert!(near.into_iter().any(|i| e[i] < fv[i] - 1e-4));
    assert!(sweep.contacts[0][0] && (e[0] - fv[0]).abs() < 1e-6);
}

#[test]
fn rooftop_trivial_cases() {
    let m = torus(32);
    let u = psh::random_tpsh(&m, 3, 0.3, 2).unwrap();
    let p = envelope::rooftop_with(&u, &u.add_const(0.2), &EnvelopeMethod::sweep()).unwrap();
    assert!(p.envelope.sup_dist(&u) < 1e-12);
    assert!(p.contacts[0].iter().all(|&c| c));
    let same = envelope::rooftop_with(&u, &u, &EnvelopeMethod::sweep()).unwrap();
    assert!(same.envelope.sup_dist(&u) < 1e-12);
    let r = envelope::contact_decomposition_residual(&u, &u.add_const(1.0), &p).unwrap();
    assert!(r.residual <= 1e-8 && r.pass);
}

#[test]
fn rooftop_is_the_envelope_of_the_minimum() {
    let m = torus(32);
    let a = psh::random_tpsh(&m, 4, 0.3, 2).unwrap();
    let b = psh::random_tpsh(&m, 5, 0.3, 2).unwrap();
    let roof = envelope::rooftop_with(&a, &b, &EnvelopeMethod::sweep()).unwrap();
    let env = envelope::envelope(&a.min_with(&b), &EnvelopeMethod::sweep()).unwrap();
    assert!(roof.envelope.sup_dist(&env.envelope) < 1e-12);
    assert!(roof.envelope.sub(&a.min_with(&b)).sup() <= 1e-12);
    assert!(roof.margin >= -1e-8);
}

#[test]
fn crossing_pair_decomposition() {
    for points in [32, 64] {
        let m = torus(points);
        let a = psh::random_tpsh(&m, 6, 0.3, 2).unwrap();
        let b = psh::random_tpsh(&m, 7, 0.3, 2).unwrap();
        let roof = envelope::rooftop_with(&a, &b, &EnvelopeMethod::sweep()).unwrap();
        let r = envelope::contact_decomposition_residual(&a, &b, &roof).unwrap();
        assert!(r.noncontact_mass <= envelope::TOL_NONCONTACT && r.pass);
        assert!(r.residual <= 1e-10, "{points}: {}", r.residual);
    }
}

#[test]
fn envelopes_need_a_torus() {
    let s = SasakiModel::sphere(32).unwrap();
    let f = BasicFunction::zero(&s);
    assert!(matches!(envelope::envelope(&f, &EnvelopeMethod::sweep()), Err(SptError::Unsupported(_))));
}
