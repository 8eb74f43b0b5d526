//! Weak geodesics as `ε → 0` limits of ε-geodesics.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::field::BasicFunction;
use crate::psh;

use super::solver::{eps_geodesic_warm, GeodesicOptions, GeodesicPath};

/// Controls for the ε-continuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakOptions {
    /// Decreasing ε ladder; the last two values are extrapolated.
    pub eps: Vec<f64>,
    pub geodesic: GeodesicOptions,
    /// Endpoints whose margin is below this are blended with this much of
    /// the reference potential.
    pub nudge: f64,
    /// Slack for the barrier bounds (the Lipschitz constant of the lower
    /// barrier also carries `velocity_slack`).
    pub barrier_tol: f64,
    /// Slack for the sharp velocity bound.
    pub velocity_slack: f64,
}

impl Default for WeakOptions {
    fn default() -> Self {
        WeakOptions {
            eps: vec![2.5e-3, 1.25e-3, 6.25e-4],
            geodesic: GeodesicOptions::default(),
            nudge: 1e-6,
            barrier_tol: 1e-5,
            velocity_slack: 1e-3,
        }
    }
}

/// A weak geodesic with the ε-ladder it was extrapolated from.
#[derive(Debug, Clone)]
pub struct WeakGeodesic {
    /// Extrapolated slices (`eps = 0`).
    pub path: GeodesicPath,
    pub ladder: Vec<GeodesicPath>,
    /// `sup |φ^{ε₁} − φ^{ε₂}|` of the two extrapolated solutions: the size
    /// of the removed first-order term.
    pub extrapolation_change: f64,
    /// `sup_t ‖φ̇_t‖_∞ − ‖u₀ − u₁‖_∞`.
    pub velocity_excess: f64,
    /// Largest violation of the lower and upper barriers.
    pub barrier_violation: f64,
    /// Smallest second time difference over the ladder.
    pub min_convexity: f64,
    pub velocity_ok: bool,
    pub barriers_ok: bool,
}

/// Linear extrapolation of `(ε, value)` pairs to `ε = 0`.
pub fn extrapolate(e1: f64, v1: f64, e2: f64, v2: f64) -> f64 {
    (e1 * v2 - e2 * v1) / (e1 - e2)
}

fn nudged(u: &BasicFunction, s: f64, threshold: f64) -> (BasicFunction, f64) {
    if psh::psh_margin(u) >= threshold {
        (u.clone(), 0.0)
    } else {
        let mut v = u.scale(1.0 - s);
        v.label = u.label.clone();
        (v, s)
    }
}

/// How many times a failed stage may double ε to find a warm start.
const CONTINUATION_DEPTH: usize = 6;

/// One ladder stage. When Newton stalls (typically a cold start between
/// endpoints that are degenerate on overlapping sets) the stage is first
/// solved at `2ε` and used as the starting path.
fn solve_stage(
    a: &BasicFunction,
    b: &BasicFunction,
    eps: f64,
    opts: &GeodesicOptions,
    start: Option<&GeodesicPath>,
    depth: usize,
) -> Result<GeodesicPath> {
    match eps_geodesic_warm(a, b, eps, opts, start) {
        Err(SptError::NewtonDiverged { .. }) if depth > 0 && 2.0 * eps <= 1.0 => {
            let coarse = solve_stage(a, b, 2.0 * eps, opts, start, depth - 1)?;
            eps_geodesic_warm(a, b, eps, opts, Some(&coarse))
        }
        other => other,
    }
}

/// Solve the ε-ladder with warm starts and extrapolate the last two
/// solutions linearly in ε.
pub fn weak_geodesic(u0: &BasicFunction, u1: &BasicFunction, opts: &WeakOptions) -> Result<WeakGeodesic> {
    u0.same_model(u1)?;
    if opts.eps.len() < 2 || opts.eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(SptError::InvalidArgument("ε ladder must have two or more decreasing values".into()));
    }
    let (a, na) = nudged(u0, opts.nudge, opts.nudge);
    let (b, nb) = nudged(u1, opts.nudge, opts.nudge);
    let mut ladder: Vec<GeodesicPath> = Vec::with_capacity(opts.eps.len());
    for &eps in &opts.eps {
        let path = solve_stage(&a, &b, eps, &opts.geodesic, ladder.last(), CONTINUATION_DEPTH)?;
        ladder.push(path);
    }
    let k = ladder.len();
    let (p1, p2) = (&ladder[k - 2], &ladder[k - 1]);
    let (e1, e2) = (p1.eps, p2.eps);
    let slices: Vec<Vec<f64>> = p1
        .slices
        .iter()
        .zip(&p2.slices)
        .map(|(s1, s2)| s1.iter().zip(s2).map(|(&x, &y)| extrapolate(e1, x, e2, y)).collect())
        .collect();
    let extrapolation_change = p1
        .slices
        .iter()
        .zip(&p2.slices)
        .map(|(s1, s2)| s1.iter().zip(s2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let path = GeodesicPath {
        model: p2.model.clone(),
        slices,
        eps: 0.0,
        residual: p2.residual,
        newton_iterations: ladder.iter().map(|p| p.newton_iterations).sum(),
        krylov_iterations: ladder.iter().map(|p| p.krylov_iterations).sum(),
        endpoint_labels: (u0.label.clone(), u1.label.clone()),
        nudge: na.max(nb),
    };
    let (ua, ub) = (a.values(), b.values());
    let c = a.sup_dist(&b);
    // The Lipschitz barrier uses the same slack as the velocity bound.
    let lip = c + opts.velocity_slack;
    let m = path.m();
    let mut vmax: f64 = 0.0;
    let mut barrier: f64 = 0.0;
    for j in 0..=m {
        let v = path.velocity(j);
        vmax = vmax.max(v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())));
        let t = j as f64 / m as f64;
        let s = &path.slices[j];
        let viol = exec::max(s.len(), |i| {
            let lower = (ua[i] - lip * t).max(ub[i] - lip * (1.0 - t));
            let upper = (1.0 - t) * ua[i] + t * ub[i];
            (lower - s[i]).max(s[i] - upper).max(0.0)
        });
        barrier = barrier.max(viol);
    }
    let min_convexity = ladder.iter().map(|p| p.min_second_difference()).fold(f64::INFINITY, f64::min);
    Ok(WeakGeodesic {
        velocity_ok: vmax <= c + opts.velocity_slack,
        barriers_ok: barrier <= opts.barrier_tol,
        path,
        ladder,
        extrapolation_change,
        velocity_excess: vmax - c,
        barrier_violation: barrier,
        min_convexity,
    })
}
