//! Orlicz–Finsler distances along weak geodesics and the metric identities
//! and inequalities they satisfy.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::energy::{self, Weight};
use crate::envelope;
use crate::error::{Result, SptError};
use crate::field::BasicFunction;
use crate::measure::{self, InequalityCheck};
use crate::psh;

use super::solver::GeodesicPath;
use super::weak::{extrapolate, weak_geodesic, WeakGeodesic, WeakOptions};

/// Default relative slack for metric inequalities.
pub const METRIC_SLACK: f64 = 0.02;

/// Per-slice Orlicz speeds of a weak geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    /// ε-extrapolated speeds at `t_j = j/m`.
    pub speeds: Vec<f64>,
    /// Speeds on each ε-geodesic of the ladder.
    pub per_eps: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
    pub mean: f64,
    /// `max_j |speed_j − mean| / mean` of the extrapolated speeds.
    pub max_deviation: f64,
    /// The same deviation on each ε-geodesic.
    pub eps_deviation: Vec<f64>,
}

/// Distance with its consistency diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub weight: String,
    pub p: f64,
    /// Length `∫₀¹ ‖φ̇_t‖ dt` of the weak geodesic (trapezoid rule).
    pub value: f64,
    /// Endpoint formulas `‖φ̇₀‖_{φ₀}` and `‖φ̇₁‖_{φ₁}` and the mid-slice speed.
    pub start_speed: f64,
    pub end_speed: f64,
    pub mid_speed: f64,
    pub max_deviation: f64,
    /// `(ε, length)` for every geodesic of the ladder.
    pub ladder: Vec<(f64, f64)>,
}

fn slice_speeds(path: &GeodesicPath, chi: &Weight) -> Vec<f64> {
    (0..=path.m())
        .map(|j| {
            let phi = path.slice(j);
            let mu = measure::ma_measure_unchecked(&phi);
            energy::orlicz_norm_measure(&path.velocity(j), &mu, chi)
        })
        .collect()
}

fn deviation(s: &[f64]) -> (f64, f64) {
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    if mean <= 1e-14 {
        return (mean, 0.0);
    }
    (mean, s.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max) / mean)
}

fn trapezoid(s: &[f64]) -> f64 {
    let m = s.len() - 1;
    let inner: f64 = s[1..m].iter().sum();
    (inner + 0.5 * (s[0] + s[m])) / m as f64
}

/// Speeds `‖φ̇_{t_j}‖_{χ,φ_{t_j}}` along a weak geodesic.
pub fn speed_profile(geo: &WeakGeodesic, chi: &Weight) -> SpeedProfile {
    let per_eps: Vec<Vec<f64>> = geo.ladder.iter().map(|p| slice_speeds(p, chi)).collect();
    let eps: Vec<f64> = geo.ladder.iter().map(|p| p.eps).collect();
    let k = per_eps.len();
    let speeds: Vec<f64> = per_eps[k - 2]
        .iter()
        .zip(&per_eps[k - 1])
        .map(|(&a, &b)| extrapolate(eps[k - 2], a, eps[k - 1], b))
        .collect();
    let (mean, max_deviation) = deviation(&speeds);
    let eps_deviation = per_eps.iter().map(|s| deviation(s).1).collect();
    SpeedProfile { speeds, per_eps, eps, mean, max_deviation, eps_deviation }
}

/// Distance along an already solved weak geodesic.
pub fn distance_along(geo: &WeakGeodesic, chi: &Weight) -> DistanceReport {
    let prof = speed_profile(geo, chi);
    let ladder = prof.eps.iter().zip(&prof.per_eps).map(|(&e, s)| (e, trapezoid(s))).collect();
    let m = prof.speeds.len() - 1;
    DistanceReport {
        weight: chi.name(),
        p: chi.p,
        value: trapezoid(&prof.speeds),
        start_speed: prof.speeds[0],
        end_speed: prof.speeds[m],
        mid_speed: prof.speeds[m / 2],
        max_deviation: prof.max_deviation,
        ladder,
    }
}

fn fingerprint(u: &BasicFunction) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for v in u.values() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Weak-geodesic options, inequality slack and a cache of solved pairs.
#[derive(Debug, Default)]
pub struct MetricContext {
    pub opts: WeakOptions,
    pub slack: f64,
    cache: Mutex<HashMap<(u64, u64), Arc<WeakGeodesic>>>,
}

impl MetricContext {
    pub fn new(opts: WeakOptions) -> MetricContext {
        MetricContext { opts, slack: METRIC_SLACK, cache: Mutex::new(HashMap::new()) }
    }

    /// Weak geodesic from `u0` to `u1`, solved once per ordered pair.
    pub fn geodesic(&self, u0: &BasicFunction, u1: &BasicFunction) -> Result<Arc<WeakGeodesic>> {
        let key = (fingerprint(u0), fingerprint(u1));
        if let Some(g) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(g));
        }
        let g = Arc::new(weak_geodesic(u0, u1, &self.opts)?);
        self.cache.lock().expect("cache lock").insert(key, Arc::clone(&g));
        Ok(g)
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    /// `d_χ(u0, u1)` with diagnostics.
    pub fn distance(&self, u0: &BasicFunction, u1: &BasicFunction, chi: &Weight) -> Result<DistanceReport> {
        Ok(distance_along(&*self.geodesic(u0, u1)?, chi))
    }

    fn d(&self, u0: &BasicFunction, u1: &BasicFunction, p: f64) -> Result<f64> {
        Ok(self.distance(u0, u1, &Weight::power(p)?)?.value)
    }
}

/// `d_χ(u0, u1)` with default options.
pub fn distance(u0: &BasicFunction, u1: &BasicFunction, chi: &Weight) -> Result<DistanceReport> {
    MetricContext::new(WeakOptions::default()).distance(u0, u1, chi)
}

/// `I_p(u, v) = ‖u − v‖_{p,u} + ‖u − v‖_{p,v}`.
pub fn ip_functional(u0: &BasicFunction, u1: &BasicFunction, p: f64) -> Result<f64> {
    let chi = Weight::power(p)?;
    let diff = u0.sub(u1);
    Ok(energy::orlicz_norm(&diff, u0, &chi)? + energy::orlicz_norm(&diff, u1, &chi)?)
}

/// Both sides of the Pythagorean formula and, for `p = 1` on `n = 1`, the
/// energy identity `d₁ = 𝕀(u₀) + 𝕀(u₁) − 2𝕀(P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PythagorasReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub energy_residual: Option<f64>,
}

fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d <= 1e-12 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

/// Relative residual of `d_p(u₀,u₁)^p = d_p(u₀,P)^p + d_p(u₁,P)^p`.
pub fn pythagoras_residual(ctx: &MetricContext, u0: &BasicFunction, u1: &BasicFunction, p: f64) -> Result<PythagorasReport> {
    let roof = envelope::rooftop(u0, u1)?.envelope;
    let lhs = ctx.d(u0, u1, p)?.powf(p);
    let rhs = ctx.d(u0, &roof, p)?.powf(p) + ctx.d(u1, &roof, p)?.powf(p);
    let energy_residual = if p == 1.0 && u0.model().n == 1 {
        let e = energy::mono_energy_unchecked(u0) + energy::mono_energy_unchecked(u1) - 2.0 * energy::mono_energy_unchecked(&roof);
        Some(rel(lhs, e))
    } else {
        None
    };
    Ok(PythagorasReport { lhs, rhs, residual: rel(lhs, rhs), energy_residual })
}

/// Pointwise minimum over `t` of `φ_t − tτ`, refined between slices by the
/// parabola through the smallest sample and its neighbours.
pub fn time_infimum(path: &GeodesicPath, tau: f64) -> Vec<f64> {
    let m = path.m();
    let dt = path.dt();
    let len = path.slices[0].len();
    (0..len)
        .map(|i| {
            let g = |j: usize| path.slices[j][i] - j as f64 * dt * tau;
            let (mut jmin, mut vmin) = (0, g(0));
            for j in 1..=m {
                let v = g(j);
                if v < vmin {
                    jmin = j;
                    vmin = v;
                }
            }
            if jmin == 0 || jmin == m {
                return vmin;
            }
            let (a, b, c) = (g(jmin - 1), vmin, g(jmin + 1));
            let curv = a - 2.0 * b + c;
            if curv <= 0.0 {
                return vmin;
            }
            let s = 0.5 * (a - c) / curv;
            (b - 0.25 * (a - c) * s).min(vmin)
        })
        .collect()
}

/// `sup |inf_t(φ_t − tτ) − P(u₀, u₁ − τ)|`.
pub fn rooftop_formula_residual(ctx: &MetricContext, u0: &BasicFunction, u1: &BasicFunction, tau: f64) -> Result<f64> {
    let geo = ctx.geodesic(u0, u1)?;
    let inf = time_infimum(&geo.path, tau);
    let roof = envelope::rooftop(u0, &u1.add_const(-tau))?.envelope;
    Ok(inf.iter().zip(roof.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `d_p(P(u₀,v), P(u₁,v)) ≤ d_p(u₀,u₁)`.
pub fn contractivity_check(ctx: &MetricContext, u0: &BasicFunction, u1: &BasicFunction, v: &BasicFunction, p: f64) -> Result<InequalityCheck> {
    let a = envelope::rooftop(u0, v)?.envelope;
    let b = envelope::rooftop(u1, v)?.envelope;
    Ok(InequalityCheck::relative(ctx.d(&a, &b, p)?, ctx.d(u0, u1, p)?, ctx.slack))
}

/// The three order inequalities for `u ≤ v`:
/// `2^{−(n+p)}∫|u−v|^p ω_u^n ≤ d_p^p`, `∫|u−v|^p ω_v^n ≤ d_p^p` and
/// `d_p^p ≤ ∫|u−v|^p ω_u^n`.
pub fn sandwich_check(ctx: &MetricContext, u: &BasicFunction, v: &BasicFunction, p: f64) -> Result<[InequalityCheck; 3]> {
    u.same_model(v)?;
    let excess = u.sub(v).sup();
    if excess > 1e-12 {
        return Err(SptError::OrderViolated { excess });
    }
    let n = u.model().n as i32;
    let diff = u.sub(v);
    let a = measure::ma_measure(u)?.integrate_fn(&diff, |x| x.abs().powf(p));
    let b = measure::ma_measure(v)?.integrate_fn(&diff, |x| x.abs().powf(p));
    let dp = ctx.d(u, v, p)?.powf(p);
    Ok([
        InequalityCheck::relative(a / 2f64.powf(n as f64 + p), dp, ctx.slack),
        InequalityCheck::relative(b, dp, ctx.slack),
        InequalityCheck::relative(dp, a, ctx.slack),
    ])
}

/// `d_p(u, w) ≤ d_p(u, v) + d_p(v, w)`.
pub fn triangle_check(ctx: &MetricContext, u: &BasicFunction, v: &BasicFunction, w: &BasicFunction, p: f64) -> Result<InequalityCheck> {
    let uw = ctx.d(u, w, p)?;
    let uv = ctx.d(u, v, p)?;
    let vw = ctx.d(v, w, p)?;
    Ok(InequalityCheck::relative(uw, uv + vw, ctx.slack))
}

/// For `u ≤ v ≤ w`: `d_p(u,v) ≤ d_p(u,w)` and `d_p(v,w) ≤ d_p(u,w)`.
pub fn order_monotonicity_check(ctx: &MetricContext, u: &BasicFunction, v: &BasicFunction, w: &BasicFunction, p: f64) -> Result<[InequalityCheck; 2]> {
    for (a, b) in [(u, v), (v, w)] {
        let excess = a.sub(b).sup();
        if excess > 1e-12 {
            return Err(SptError::OrderViolated { excess });
        }
    }
    let uw = ctx.d(u, w, p)?;
    Ok([
        InequalityCheck::relative(ctx.d(u, v, p)?, uw, ctx.slack),
        InequalityCheck::relative(ctx.d(v, w, p)?, uw, ctx.slack),
    ])
}

/// `d_p(u, (u+v)/2)^p ≤ 2^{n+p+1} d_p(u, v)^p`.
pub fn midpoint_check(ctx: &MetricContext, u: &BasicFunction, v: &BasicFunction, p: f64) -> Result<InequalityCheck> {
    let mid = u.lin(0.5, v, 0.5);
    let n = u.model().n as f64;
    let lhs = ctx.d(u, &mid, p)?.powf(p);
    let rhs = 2f64.powf(n + p + 1.0) * ctx.d(u, v, p)?.powf(p);
    Ok(InequalityCheck::relative(lhs, rhs, ctx.slack))
}

/// Swap asymmetry `|d(u₀,u₁) − d(u₁,u₀)| / max` with independent solves.
pub fn symmetry_residual(ctx: &MetricContext, u0: &BasicFunction, u1: &BasicFunction, chi: &Weight) -> Result<f64> {
    let a = ctx.distance(u0, u1, chi)?.value;
    let b = ctx.distance(u1, u0, chi)?.value;
    Ok(rel(a, b))
}

/// One rung of a mollifier ladder converging down to `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStep {
    pub sigma: f64,
    pub d1: f64,
    pub l1: f64,
    pub energy_gap: f64,
}

/// `d₁(u_k, u)`, `∫|u_k − u|` and `𝕀(u_k) − 𝕀(u)` along a heat-mollifier
/// ladder `u_k ↓ u`.
pub fn mollifier_convergence(ctx: &MetricContext, u: &BasicFunction, sigma: f64, levels: usize) -> Result<Vec<ConvergenceStep>> {
    let chi = Weight::power(1.0)?;
    let base = energy::mono_energy(u)?;
    let ladder = psh::mollify_ladder(u, sigma, levels)?;
    let mut out = Vec::with_capacity(levels);
    for (k, uk) in ladder.iter().enumerate() {
        let d1 = ctx.distance(uk, u, &chi)?.value;
        let l1 = uk.sub(u).integrate_ref(f64::abs);
        let energy_gap = energy::mono_energy_unchecked(uk) - base;
        out.push(ConvergenceStep { sigma: sigma / 2f64.powi(k as i32), d1, l1, energy_gap });
    }
    Ok(out)
}
