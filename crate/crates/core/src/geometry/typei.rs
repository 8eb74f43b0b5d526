//! Type-I deformations of the weighted contact 3-sphere.
//!
//! Points of `S³ ⊂ C²` are written `z_j = r_j e^{iθ_j}` with
//! `(r1, r2) = (cos s, sin s)`, `s ∈ [0, π/2]`. Every structure here is
//! invariant under the 2-torus, so 1-forms are recorded by their components
//! on `(ds, dθ1, dθ2)`. The reference contact form is `η₀ = Σ r_j² dθ_j` and
//! the structure with Reeb field `ξ = c1∂θ1 + c2∂θ2` has `η = η₀/η₀(ξ)`.
//! A Type-I deformation by `ρ` keeps the CR structure and moves the Reeb
//! field to `ξ + ρ`, with `η_ρ = η / (1 + η(ρ))`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::geometry::model::{ModelKind, SasakiModel};

/// Smallest admissible value of `1 + η(ρ)`.
pub const TOL_DEFORM: f64 = 1e-6;
/// Contact identities must hold to this accuracy.
pub const TOL_CONTACT: f64 = 1e-8;
/// Largest torus-invariance defect accepted for a basic function.
pub const TOL_BASIC: f64 = 1e-10;

/// A point of `S³` in Hopf coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S3Point {
    pub s: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Seeded points with `s` uniform in `(0, π/2)` and angles uniform.
pub fn sample_points(count: usize, seed: u64) -> Vec<S3Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| S3Point {
            s: rng.gen_range(1e-3..FRAC_PI_2 - 1e-3),
            t1: rng.gen_range(0.0..2.0 * PI),
            t2: rng.gen_range(0.0..2.0 * PI),
        })
        .collect()
}

/// `η₀(c1∂θ1 + c2∂θ2)` at Hopf angle `s`, and its `s`-derivative.
fn pairing(c: [f64; 2], s: f64) -> (f64, f64) {
    let (sn, cs) = s.sin_cos();
    (c[0] * cs * cs + c[1] * sn * sn, 2.0 * sn * cs * (c[1] - c[0]))
}

/// Weighted structure `a` deformed by `ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeIDeformation {
    pub a: [f64; 2],
    pub rho: [f64; 2],
    /// Smallest `1 + η(ρ)` over the sample set.
    pub min_factor: f64,
}

/// Deform the Reeb field of a weighted 3-sphere model by `ρ`.
pub fn typei_deform(model: &SasakiModel, rho: [f64; 2]) -> Result<TypeIDeformation> {
    let ModelKind::WeightedContactS3 { a1, a2 } = model.kind else {
        return Err(SptError::Unsupported("Type-I deformations need the weighted 3-sphere".into()));
    };
    deform_weights([a1, a2], rho)
}

/// As `typei_deform`, from the weights directly.
pub fn deform_weights(a: [f64; 2], rho: [f64; 2]) -> Result<TypeIDeformation> {
    if !(a[0] > 0.0 && a[1] > 0.0) || !rho.iter().all(|r| r.is_finite()) {
        return Err(SptError::InvalidArgument("weights must be positive and finite".into()));
    }
    let mut def = TypeIDeformation { a, rho, min_factor: f64::INFINITY };
    // 1 + η(ρ) depends on s only; sample the closed interval, poles included.
    let m = 1024;
    for k in 0..=m {
        def.min_factor = def.min_factor.min(def.factor(k as f64 * FRAC_PI_2 / m as f64));
    }
    if !(def.min_factor > TOL_DEFORM) {
        return Err(SptError::DegenerateDeformation { value: def.min_factor });
    }
    Ok(def)
}

impl TypeIDeformation {
    /// Reeb field `ξ + ρ` as coefficients of `(∂θ1, ∂θ2)`.
    pub fn reeb(&self) -> [f64; 2] {
        [self.a[0] + self.rho[0], self.a[1] + self.rho[1]]
    }

    pub fn rho_norm(&self) -> f64 {
        self.rho[0].hypot(self.rho[1])
    }

    /// `1 + η(ρ)` at Hopf angle `s`.
    pub fn factor(&self, s: f64) -> f64 {
        1.0 + pairing(self.rho, s).0 / pairing(self.a, s).0
    }

    /// Undeformed contact form at `p`.
    pub fn eta_base(&self, p: &S3Point) -> [f64; 3] {
        let (sn, cs) = p.s.sin_cos();
        let da = pairing(self.a, p.s).0;
        [0.0, cs * cs / da, sn * sn / da]
    }

    /// Deformed contact form `η / (1 + η(ρ))` at `p`.
    pub fn eta(&self, p: &S3Point) -> [f64; 3] {
        let e = self.eta_base(p);
        let f = self.factor(p.s);
        [e[0] / f, e[1] / f, e[2] / f]
    }

    /// `dη_ρ` at `p` as an antisymmetric matrix on `(∂s, ∂θ1, ∂θ2)`.
    ///
    /// With `η_ρ = Σ f_j dθ_j`, `dη_ρ = Σ f_j' ds ∧ dθ_j`; each `f_j' ` is the
    /// quotient-rule derivative of `r_j² / (η₀(ξ)·(1 + η(ρ)))`.
    pub fn d_eta(&self, p: &S3Point) -> [[f64; 3]; 3] {
        let (sn, cs) = p.s.sin_cos();
        let (da, dda) = pairing(self.a, p.s);
        let (pr, dpr) = pairing(self.rho, p.s);
        let f = 1.0 + pr / da;
        let df = (dpr * da - pr * dda) / (da * da);
        let den = da * f;
        let dden = dda * f + da * df;
        let num = [cs * cs, sn * sn];
        let dnum = [-2.0 * sn * cs, 2.0 * sn * cs];
        let mut m = [[0.0; 3]; 3];
        for j in 0..2 {
            let g = (dnum[j] * den - num[j] * dden) / (den * den);
            m[0][j + 1] = g;
            m[j + 1][0] = -g;
        }
        m
    }

    /// `ds ∘ Φ_ρ` at `p`, where `Φ_ρ = Φ − (Φ ξ_ρ) ⊗ η_ρ` and `Φ` is the
    /// complex structure of `C²` restricted to the contact distribution.
    pub fn phi_ds(&self, p: &S3Point) -> [f64; 3] {
        let sigma = p.s.sin() * p.s.cos();
        let c = self.reeb();
        let e = self.eta(p);
        let phi_xi = sigma * (c[0] - c[1]);
        [0.0, sigma - phi_xi * e[1], -sigma - phi_xi * e[2]]
    }
}

/// Worst violations of the contact identities over a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub points: usize,
    /// `max |η_ρ(ξ_ρ) − 1|`.
    pub normalization: f64,
    /// `max |ι_{ξ_ρ} dη_ρ|`.
    pub reeb_interior: f64,
    /// `max |ds(Φ_ρ ξ_ρ)|`.
    pub phi_reeb: f64,
    pub pass: bool,
}

/// Evaluate the contact identities of a deformation at the given points.
pub fn contact_checks(def: &TypeIDeformation, points: &[S3Point]) -> ContactReport {
    let c = def.reeb();
    let xi = [0.0, c[0], c[1]];
    let mut rep = ContactReport { points: points.len(), normalization: 0.0, reeb_interior: 0.0, phi_reeb: 0.0, pass: true };
    for p in points {
        let e = def.eta(p);
        let ev: f64 = e.iter().zip(&xi).map(|(a, b)| a * b).sum();
        rep.normalization = rep.normalization.max((ev - 1.0).abs());
        let m = def.d_eta(p);
        for row in &m {
            let v: f64 = row.iter().zip(&xi).map(|(a, b)| a * b).sum();
            rep.reeb_interior = rep.reeb_interior.max(v.abs());
        }
        let ph = def.phi_ds(p);
        let v: f64 = ph.iter().zip(&xi).map(|(a, b)| a * b).sum();
        rep.phi_reeb = rep.phi_reeb.max(v.abs());
    }
    rep.pass = rep.normalization <= TOL_CONTACT && rep.reeb_interior <= TOL_CONTACT && rep.phi_reeb <= TOL_CONTACT;
    rep
}

/// Torus-invariant function on `S³` given as a polynomial in `cos 2s`
/// (hence smooth at both Hopf circles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantProfile {
    pub coeffs: Vec<f64>,
}

impl InvariantProfile {
    /// Random profile of the given degree with coefficients in `[−amp, amp]`.
    pub fn seeded(seed: u64, degree: usize, amp: f64) -> InvariantProfile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        InvariantProfile { coeffs: (0..=degree).map(|k| if k == 0 { 0.0 } else { rng.gen_range(-amp..=amp) }).collect() }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let t = (2.0 * s).cos();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn scale(&self, k: f64) -> InvariantProfile {
        InvariantProfile { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// As a function of `(s, θ1, θ2)`.
    pub fn as_fn(&self) -> impl Fn(f64, f64, f64) -> f64 + '_ {
        move |s, _, _| self.eval(s)
    }
}

/// Outcome of the deformed plurisubharmonicity scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeIMargin {
    pub rho_norm: f64,
    /// Smallest `ε ∈ [0, 1)` for which `(1−ε)u` is TPSH for `ξ + ρ`.
    pub eps_required: f64,
    /// Minimum of `ω_u/ω` for the undeformed structure.
    pub base_margin: f64,
    /// Minimum of `ω_u/ω` for the deformed structure.
    pub deformed_margin: f64,
    /// `sup |dΦ du|` measured against the undeformed transverse form.
    pub hessian_bound: f64,
}

/// Hopf-angle samples used by the margin scan.
const SCAN_POINTS: usize = 512;
/// Step of the fourth-order difference quotients.
const SCAN_STEP: f64 = 1e-3;

fn d4<F: Fn(f64) -> f64>(f: F, s: f64) -> f64 {
    let h = SCAN_STEP;
    (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h)
}

/// `ω_u/ω − 1` for the structure with Reeb coefficients `c` at `s`.
///
/// For an invariant `u(s)` both forms are multiples of
/// `ds ∧ (c2 dθ1 − c1 dθ2)`: `ω^T = −σ/D² ·` and `½ d(du∘Φ) = ½(u'σ/D)' ·`
/// with `σ = sin s cos s`, `D = η₀(ξ)`. Orientation is fixed so that a
/// local maximum of `u` lowers the ratio.
fn hessian_ratio<U: Fn(f64) -> f64>(u: &U, c: [f64; 2], s: f64) -> f64 {
    let g = |t: f64| {
        let sigma = t.sin() * t.cos();
        d4(u, t) * sigma / pairing(c, t).0
    };
    let d = pairing(c, s).0;
    let sigma = s.sin() * s.cos();
    d * d / (2.0 * sigma) * d4(g, s)
}

/// Smallest `ε` making `(1−ε)u` plurisubharmonic for the deformed
/// structure, verified on a grid of Hopf angles.
///
/// `u` must be torus invariant; `bound_c0` caps `|dΦ du|` relative to the
/// undeformed transverse form.
pub fn typei_psh_margin<U>(def: &TypeIDeformation, u: U, bound_c0: f64) -> Result<TypeIMargin>
where
    U: Fn(f64, f64, f64) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e1);
    let mut defect: f64 = 0.0;
    for k in 0..64 {
        let s = (k as f64 + 0.5) * FRAC_PI_2 / 64.0;
        let u0 = u(s, 0.0, 0.0);
        for _ in 0..8 {
            let v = u(s, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
            defect = defect.max((v - u0).abs());
        }
    }
    if defect > TOL_BASIC {
        return Err(SptError::NotBasic { defect });
    }
    let profile = |s: f64| u(s, 0.0, 0.0);
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|k| (k as f64 + 0.5) * FRAC_PI_2 / SCAN_POINTS as f64).collect();
    let base: Vec<f64> = grid.iter().map(|&s| hessian_ratio(&profile, def.a, s)).collect();
    let hessian_bound = base.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    if hessian_bound > bound_c0 {
        return Err(SptError::InvalidArgument(format!("|dΦdu| = {hessian_bound:.3e} exceeds the bound {bound_c0:.3e}")));
    }
    let deformed: Vec<f64> = grid.iter().map(|&s| hessian_ratio(&profile, def.reeb(), s)).collect();
    let min_base = base.iter().copied().fold(f64::INFINITY, f64::min);
    let min_def = deformed.iter().copied().fold(f64::INFINITY, f64::min);
    let mut eps = if min_def >= -1.0 { 0.0 } else { 1.0 + 1.0 / min_def };
    // Grid verification: nudge up until every sample is nonnegative.
    while eps > 0.0 && deformed.iter().any(|k| 1.0 + (1.0 - eps) * k < 0.0) {
        eps = (eps * (1.0 + 1e-12)).min(1.0 - f64::EPSILON);
    }
    Ok(TypeIMargin {
        rho_norm: def.rho_norm(),
        eps_required: eps,
        base_margin: 1.0 + min_base,
        deformed_margin: 1.0 + min_def,
        hessian_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rho_is_identity() {
        let d = deform_weights([1.0, 2.0], [0.0, 0.0]).unwrap();
        let p = S3Point { s: 0.7, t1: 0.1, t2: 2.0 };
        assert_eq!(d.eta(&p), d.eta_base(&p));
    }

    #[test]
    fn degenerate_rho_rejected() {
        assert!(matches!(deform_weights([1.0, 1.0], [-1.0, 0.0]), Err(SptError::DegenerateDeformation { .. })));
    }

    #[test]
    fn round_sphere_maximum_lowers_margin() {
        // u = cos 2s peaks at s = 0; the ratio there must drop below 1.
        let u = |s: f64| (2.0 * s).cos();
        assert!(hessian_ratio(&u, [1.0, 1.0], 0.05) < 0.0);
    }
}
