//! Transverse plurisubharmonic functions: positivity margins, cutoffs,
//! mollification, the sub-mean-value gap, random generators and singular
//! prototypes with zero Lelong number.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::field::BasicFunction;
use crate::geometry::{ModelKind, SasakiModel};
use crate::hessian;
use crate::linalg::Herm;
use crate::spectral::{laplacian_symbol, Spectral};

/// Acceptance threshold for plurisubharmonicity on density-normalized
/// eigenvalues.
pub const TOL_POS: f64 = 1e-8;

/// Pointwise complex Hessian of a function with its cached positivity margin.
#[derive(Debug, Clone)]
pub struct HessianField {
    pub hessian: Vec<Herm>,
    pub margin: f64,
}

impl HessianField {
    pub fn compute(u: &BasicFunction) -> HessianField {
        let m = u.model();
        let d = u.values();
        let hessian: Vec<Herm> = (0..m.len()).map(|i| hessian::at(m, d, i)).collect();
        let margin = exec::min(m.len(), |i| {
            if m.active(i) {
                m.ref_metric(i).add(&hessian[i]).min_eig_rel(m.ref_metric(i))
            } else {
                f64::INFINITY
            }
        });
        HessianField { hessian, margin }
    }
}

/// Smallest eigenvalue of `ω^T + i∂∂̄u` relative to `ω^T` over the grid.
pub fn psh_margin(u: &BasicFunction) -> f64 {
    let m = u.model();
    let d = u.values();
    exec::min(m.len(), |i| {
        if m.active(i) {
            hessian::metric_at(m, d, i).min_eig_rel(m.ref_metric(i))
        } else {
            f64::INFINITY
        }
    })
}

/// Whether `u` passes the plurisubharmonicity threshold.
pub fn is_tpsh(u: &BasicFunction) -> bool {
    psh_margin(u) >= -TOL_POS
}

/// Error unless `u` is plurisubharmonic within [`TOL_POS`].
pub fn require_tpsh(u: &BasicFunction) -> Result<f64> {
    let margin = psh_margin(u);
    if margin >= -TOL_POS {
        Ok(margin)
    } else {
        Err(SptError::NotPlurisubharmonic { margin })
    }
}

/// Canonical cutoff `max(u, −h)`.
pub fn canonical_cutoff(u: &BasicFunction, h: f64) -> Result<BasicFunction> {
    if !(h >= 0.0) {
        return Err(SptError::InvalidArgument(format!("cutoff level {h} must be nonnegative")));
    }
    let mut out = u.map(|x| x.max(-h));
    out.label = format!("max({},-{h})", u.label);
    Ok(out)
}

/// How the mollified function is lifted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lift {
    /// Add a fixed constant.
    Fixed(f64),
    /// Add `sup |u − u_σ|`.
    SupGap,
    /// Add `2σ²·max tr(ω^T)`: the heat-semigroup drift bound, which makes
    /// the lifted family decrease as `σ ↓ 0` for every plurisubharmonic `u`.
    Heat,
}

/// Smooth `u` by the discrete heat semigroup at time `σ²/2` (a Gaussian of
/// standard deviation `σ` per real axis) and add a lift. Torus models only.
pub fn mollify(u: &BasicFunction, sigma: f64, lift: Lift) -> Result<BasicFunction> {
    let m = u.model();
    if !m.is_torus() {
        return Err(SptError::Unsupported("mollification is implemented on torus models".into()));
    }
    if !(sigma > 0.0) {
        return Err(SptError::InvalidArgument(format!("sigma {sigma} must be positive")));
    }
    let t = 0.5 * sigma * sigma;
    let sym: Vec<f64> = laplacian_symbol(&m.grid).iter().map(|l| (t * l).exp()).collect();
    let smooth = Spectral::new(&m.grid.dims).apply_symbol(u.values(), &sym);
    let delta = match lift {
        Lift::Fixed(d) => d,
        Lift::SupGap => {
            let d = u.values();
            exec::max(d.len(), |i| (d[i] - smooth[i]).abs())
        }
        Lift::Heat => {
            let tr = exec::max(m.len(), |i| m.ref_metric(i).trace());
            // ¼Δ_h u ≥ −tr(ω^T) ⇒ d/dt e^{tΔ_h}u ≥ −4 tr(ω^T).
            4.0 * t * tr
        }
    };
    let mut out = BasicFunction::new(m, smooth.iter().map(|x| x + delta).collect())?;
    out.label = format!("mollify({},{sigma})", u.label);
    Ok(out)
}

/// Mollified ladder `σ_k = σ/2^k`, `k = 0..levels`, with heat lifts.
pub fn mollify_ladder(u: &BasicFunction, sigma: f64, levels: usize) -> Result<Vec<BasicFunction>> {
    (0..levels).map(|k| mollify(u, sigma / f64::powi(2.0, k as i32), Lift::Heat)).collect()
}

/// Result of the sub-mean-value comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupMeanGap {
    pub sup: f64,
    pub mean: f64,
    pub bound: f64,
}

impl SupMeanGap {
    pub fn holds(&self) -> bool {
        self.sup <= self.mean + self.bound + 1e-12
    }
}

/// Green-function constant `C` with `sup u ≤ mean(u) + C` for every
/// plurisubharmonic `u`: `C = max tr(ω^T) · (−min G)` where `G` is the
/// mean-zero Green function of `¼Δ_h`.
pub fn green_bound(model: &SasakiModel) -> Result<f64> {
    if !model.is_torus() {
        return Err(SptError::Unsupported("Green bound is implemented on torus models".into()));
    }
    let g = &model.grid;
    let sym = laplacian_symbol(g);
    let inv: Vec<f64> = sym.iter().enumerate().map(|(i, &l)| if i == 0 { 0.0 } else { 4.0 / l }).collect();
    let mut delta = vec![0.0; g.len()];
    delta[0] = 1.0 / (g.cell() * model.reeb_length);
    let green = Spectral::new(&g.dims).apply_symbol(&delta, &inv);
    let gmin = green.iter().cloned().fold(f64::INFINITY, f64::min);
    let tr = exec::max(model.len(), |i| model.ref_metric(i).trace());
    Ok(tr * (-gmin) * model.volume())
}

/// `sup u`, its reference average and the Green bound.
pub fn sup_mean_gap(u: &BasicFunction) -> Result<SupMeanGap> {
    Ok(SupMeanGap { sup: u.sup(), mean: u.mean(), bound: green_bound(u.model())? })
}

/// Deterministic low-frequency plurisubharmonic function with margin `delta`.
///
/// Torus: a sum of six random Fourier modes with `|k|_∞ ≤ max_freq`.
/// Sphere: a random polynomial of degree `≤ min(max_freq, 3)` in the
/// ambient coordinates. The result is rescaled so that its margin equals
/// `delta` (to rounding); `delta = 1` yields the zero function.
pub fn random_tpsh(model: &Arc<SasakiModel>, seed: u64, delta: f64, max_freq: usize) -> Result<BasicFunction> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(SptError::InvalidArgument(format!("margin {delta} outside (0, 1]")));
    }
    let raw = random_shape(model, seed, max_freq.max(1))?;
    let mu = {
        let d = raw.values();
        let m = raw.model();
        exec::min(m.len(), |i| {
            if m.active(i) {
                hessian::at(m, d, i).min_eig_rel(m.ref_metric(i))
            } else {
                f64::INFINITY
            }
        })
    };
    let s = if mu < 0.0 { (1.0 - delta) / (-mu) * (1.0 - 1e-12) } else { 0.0 };
    let mut out = raw.scale(s);
    out.label = format!("tpsh(seed={seed},delta={delta})");
    out.seed = Some(seed);
    Ok(out)
}

fn random_shape(model: &Arc<SasakiModel>, seed: u64, max_freq: usize) -> Result<BasicFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match model.kind {
        ModelKind::Torus { n } => {
            let axes = 2 * n;
            let k = max_freq as i64;
            let modes: Vec<(Vec<f64>, f64, f64)> = (0..6)
                .map(|_| {
                    let mut kv: Vec<i64> = (0..axes).map(|_| rng.gen_range(-k..=k)).collect();
                    if kv.iter().all(|&x| x == 0) {
                        kv[0] = 1;
                    }
                    let k2: f64 = kv.iter().map(|&x| (x * x) as f64).sum();
                    let amp = rng.gen_range(0.5..1.0) / (1.0 + k2);
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    (kv.into_iter().map(|x| x as f64).collect(), amp, phase)
                })
                .collect();
            Ok(BasicFunction::from_fn(model, |x| {
                modes
                    .iter()
                    .map(|(kv, a, p)| {
                        let dot: f64 = kv.iter().zip(x).map(|(k, x)| k * x).sum();
                        a * (std::f64::consts::TAU * dot + p).cos()
                    })
                    .sum()
            }))
        }
        ModelKind::SphereQuotient => {
            let deg = max_freq.min(3);
            let mut monos: Vec<([usize; 3], f64)> = Vec::new();
            for a in 0..=deg {
                for b in 0..=deg - a {
                    for c in 0..=deg - a - b {
                        if a + b + c == 0 {
                            continue;
                        }
                        monos.push(([a, b, c], rng.gen_range(-1.0..1.0)));
                    }
                }
            }
            let data = (0..model.len())
                .map(|i| {
                    let p = model.sphere_point(i).expect("sphere node");
                    monos.iter().map(|(e, c)| c * p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32)).sum()
                })
                .collect();
            BasicFunction::new(model, data)
        }
        ModelKind::WeightedContactS3 { .. } => Err(SptError::Unsupported("no transverse grid on the weighted 3-sphere".into())),
    }
}

/// Potential `−c·L(r)^α·κ(r)` with `L(r) = log(1 + R²/r²)` centred at `z₀`,
/// where `κ` is a smooth cutoff equal to 1 for `r ≤ 0.2` and 0 for
/// `r ≥ 0.45`. It has zero Lelong number at `z₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPrototype {
    pub center: [f64; 4],
    pub alpha: f64,
    pub scale: f64,
    pub radius: f64,
}

const CUT_IN: f64 = 0.2;
const CUT_OUT: f64 = 0.45;

fn cutoff(r: f64) -> f64 {
    if r <= CUT_IN {
        1.0
    } else if r >= CUT_OUT {
        0.0
    } else {
        let s = (r - CUT_IN) / (CUT_OUT - CUT_IN);
        let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
        f(1.0 - s) / (f(1.0 - s) + f(s))
    }
}

fn torus_dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter()
        .zip(c)
        .map(|(a, b)| {
            let d = (a - b).rem_euclid(1.0);
            let d = d.min(1.0 - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

impl SingularPrototype {
    pub fn new(center: &[f64], alpha: f64, radius: f64) -> Result<SingularPrototype> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(SptError::InvalidArgument(format!("exponent {alpha} outside (0,1)")));
        }
        if !(radius > 0.0) {
            return Err(SptError::InvalidArgument("radius must be positive".into()));
        }
        let mut c = [0.0; 4];
        for (k, v) in center.iter().take(4).enumerate() {
            c[k] = *v;
        }
        Ok(SingularPrototype { center: c, alpha, scale: 1.0, radius })
    }

    /// Unscaled profile `L(r)^α κ(r)` (nonnegative, decreasing in `r`).
    pub fn shape(&self, r: f64) -> f64 {
        let l = (1.0 + self.radius * self.radius / (r * r)).ln();
        l.powf(self.alpha) * cutoff(r)
    }

    /// Radial profile value `−c·shape(r)`.
    pub fn profile(&self, r: f64) -> f64 {
        -self.scale * self.shape(r)
    }

    /// Sample on the model, clamped at the value at half a grid step.
    pub fn sample(&self, model: &Arc<SasakiModel>) -> Result<BasicFunction> {
        if !model.is_torus() {
            return Err(SptError::Unsupported("prototypes live on torus models".into()));
        }
        let axes = model.grid.axes();
        let r_min = 0.5 * model.grid.spacing[0];
        let floor = self.profile(r_min);
        let c = self.center;
        let mut out = BasicFunction::from_fn(model, |x| {
            let r = torus_dist(x, &c[..axes]);
            if r <= r_min {
                floor
            } else {
                self.profile(r).max(floor)
            }
        });
        out.label = format!("proto(alpha={},c={:.4})", self.alpha, self.scale);
        Ok(out)
    }

    /// Largest scale keeping the sampled prototype at margin `delta`.
    pub fn with_admissible_scale(mut self, model: &Arc<SasakiModel>, delta: f64) -> Result<SingularPrototype> {
        self.scale = 1.0;
        let unit = self.sample(model)?;
        let d = unit.values();
        let mu = exec::min(model.len(), |i| hessian::at(model, d, i).min_eig_rel(model.ref_metric(i)));
        self.scale = if mu < 0.0 { (1.0 - delta) / (-mu) } else { 1.0 };
        Ok(self)
    }

    /// Radius where the profile equals `−level` (bisection on the monotone
    /// profile); `None` when the level is never reached.
    pub fn level_radius(&self, level: f64) -> Option<f64> {
        let (mut lo, mut hi) = (1e-12, CUT_OUT);
        if self.profile(lo) > -level {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.profile(mid) < -level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Volume of the Euclidean ball of radius `r` in real dimension `2n`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    let pi = std::f64::consts::PI;
    match n {
        1 => pi * r * r,
        _ => 0.5 * pi * pi * r.powi(4),
    }
}
