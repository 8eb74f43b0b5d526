//! Plurisubharmonic envelopes `P(f)` and rooftops `P(u₀, u₁)`.
//!
//! Two independent solvers: a projected over-relaxed Gauss–Seidel sweep
//! that enforces the discrete positivity constraint pointwise under the
//! obstacle, and a penalty continuation that solves
//! `ω_u^n∧η = e^{β(u−f)} ω_T^n∧η` by Newton for growing `β` and
//! extrapolates in `1/β`. Torus models only.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::field::BasicFunction;
use crate::geometry::SasakiModel;
use crate::hessian;
use crate::linalg::{self, Herm};
use crate::measure;
use crate::psh::{self, TOL_POS};

/// Admissible obstacle overshoot.
pub const TOL_OBST: f64 = 1e-6;
/// Contact-set threshold `|P − obstacle| ≤ CONTACT_FACTOR · TOL_OBST`.
pub const CONTACT_FACTOR: f64 = 10.0;
/// Admissible Monge–Ampère mass on the non-contact set.
pub const TOL_NONCONTACT: f64 = 1e-4;

/// Solver selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EnvelopeMethod {
    Sweep { max_iters: usize },
    Beta { schedule: Vec<f64> },
}

impl EnvelopeMethod {
    pub fn sweep() -> EnvelopeMethod {
        EnvelopeMethod::Sweep { max_iters: 200_000 }
    }

    /// Geometric schedule `2^lo, …, 2^hi`.
    pub fn beta(lo: i32, hi: i32) -> EnvelopeMethod {
        EnvelopeMethod::Beta { schedule: (lo..=hi).map(|k| 2f64.powi(k)).collect() }
    }

    /// `2^4 … 2^22`: the last penalty solution is within about `3/β` of the
    /// envelope, below the obstacle tolerance.
    pub fn default_beta() -> EnvelopeMethod {
        EnvelopeMethod::beta(4, 22)
    }

    /// The β values, empty for the sweep.
    pub fn schedule(&self) -> Vec<f64> {
        match self {
            EnvelopeMethod::Beta { schedule } => schedule.clone(),
            EnvelopeMethod::Sweep { .. } => Vec::new(),
        }
    }
}

/// An envelope with its contact sets and solver record.
#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    pub envelope: BasicFunction,
    /// One mask per obstacle: `Λ_f`, or `Λ_{u₀}` and `Λ_{u₁}` for rooftops.
    pub contacts: Vec<Vec<bool>>,
    pub method: String,
    /// Sweeps, or Newton steps summed over the schedule.
    pub iterations: usize,
    pub schedule: Vec<f64>,
    /// `sup max(0, P − f)`.
    pub residual: f64,
    pub margin: f64,
    /// Linear extrapolation of the last two penalty solutions to `β = ∞`.
    /// More accurate than `envelope` but not plurisubharmonic in general.
    pub extrapolated: Option<BasicFunction>,
}

fn require_torus(m: &SasakiModel) -> Result<()> {
    if m.is_torus() {
        Ok(())
    } else {
        Err(SptError::Unsupported("envelopes are implemented on torus models".into()))
    }
}

/// Negative of the Hessian of a unit spike at its own node: a positive
/// diagonal matrix, the same at every node.
fn spike_scale(m: &SasakiModel) -> Herm {
    let h = &m.grid.spacing;
    let s = |a: usize, b: usize| 0.5 * (1.0 / (h[a] * h[a]) + 1.0 / (h[b] * h[b]));
    match m.n {
        1 => Herm::scalar(s(0, 1)),
        _ => Herm::two(s(0, 1), s(2, 3), Default::default()),
    }
}

fn contact_mask(p: &BasicFunction, f: &BasicFunction) -> Vec<bool> {
    let thr = CONTACT_FACTOR * TOL_OBST;
    p.values().iter().zip(f.values()).map(|(a, b)| (a - b).abs() <= thr).collect()
}

fn overshoot(p: &BasicFunction, f: &BasicFunction) -> f64 {
    let (a, b) = (p.values(), f.values());
    exec::max(a.len(), |i| (a[i] - b[i]).max(0.0))
}

/// Nodes grouped so that no stencil couples two nodes of one group.
fn colors(m: &SasakiModel) -> Result<Vec<Vec<usize>>> {
    let g = &m.grid;
    if g.dims.iter().any(|d| d % 2 != 0) {
        return Err(SptError::BadGrid("the sweep needs even grid dimensions".into()));
    }
    let axes = g.axes();
    let mut out = vec![Vec::new(); 1 << axes];
    for i in 0..g.len() {
        let c = (0..axes).fold(0, |acc, a| acc | ((g.coord(i, a) & 1) << a));
        out[c].push(i);
    }
    Ok(out)
}

/// `P(f)` by projected over-relaxed Gauss–Seidel.
///
/// Each update moves `u_i` to the largest value keeping the local metric
/// semipositive given its neighbours (exact, since the centre enters the
/// stencil through a positive diagonal matrix), over-relaxes, and clamps to
/// the obstacle. Colour classes are updated together, so the result does
/// not depend on the execution mode.
pub fn envelope_sweep(f: &BasicFunction, max_iters: usize) -> Result<EnvelopeResult> {
    let m = f.model();
    require_torus(m)?;
    let classes = colors(m)?;
    let spike = spike_scale(m);
    let nb = m.neighbors().expect("torus neighbours");
    let side = m.grid.dims[0] as f64;
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / side).sin());
    let obst = f.values();
    let mut u = obst.to_vec();
    let mut iters = 0;
    loop {
        let mut change: f64 = 0.0;
        for class in &classes {
            let new: Vec<f64> = {
                let cur = &u;
                let upd = |k: usize| {
                    let i = class[k];
                    let metric = m.ref_metric(i).add(&hessian::torus_at(&m.grid, nb, m.n, cur, i));
                    let raise = metric.min_eig_rel(&spike);
                    (cur[i] + omega * raise).min(obst[i])
                };
                exec::collect(class.len(), upd)
            };
            for (k, &i) in class.iter().enumerate() {
                change = change.max((new[k] - u[i]).abs());
                u[i] = new[k];
            }
        }
        iters += 1;
        if change <= 1e-12 {
            break;
        }
        if iters >= max_iters {
            return Err(SptError::IterationLimit { iters, change });
        }
    }
    let mut env = BasicFunction::new(m, u)?;
    env.label = format!("P({})", f.label);
    let margin = psh::psh_margin(&env);
    Ok(EnvelopeResult {
        contacts: vec![contact_mask(&env, f)],
        residual: overshoot(&env, f),
        envelope: env,
        method: "sweep".into(),
        iterations: iters,
        schedule: Vec::new(),
        margin,
        extrapolated: None,
    })
}

struct Penalty<'a> {
    m: &'a Arc<SasakiModel>,
    f: &'a [f64],
    beta: f64,
}

impl Penalty<'_> {
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let m = self.m;
        exec::collect(u.len(), |i| {
            let g = m.ref_metric(i);
            hessian::metric_at(m, u, i).det() / g.det() - (self.beta * (u[i] - self.f[i])).exp()
        })
    }

    /// `−F′(u)δ`: a positive operator for `n = 1`.
    fn neg_jacobian(&self, u: &[f64], adj: &[Herm], x: &[f64], out: &mut [f64]) {
        let m = self.m;
        let nb = m.neighbors().expect("torus neighbours");
        exec::fill(out, |i| {
            let h = hessian::torus_at(&m.grid, nb, m.n, x, i);
            let dd = adj[i].trace_prod(&h) / m.ref_metric(i).det();
            -dd + self.beta * (self.beta * (u[i] - self.f[i])).exp() * x[i]
        });
    }
}

/// Solutions `u_β` of the penalty equation along an increasing schedule,
/// each warm-started from the previous one.
pub fn penalty_solutions(f: &BasicFunction, schedule: &[f64]) -> Result<(Vec<Vec<f64>>, usize)> {
    let m = f.model();
    require_torus(m)?;
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] <= 0.0 {
        return Err(SptError::InvalidArgument("β schedule must be positive and increasing".into()));
    }
    let spike = spike_scale(m);
    let mut u: Vec<f64> = vec![f.inf() - 1.0; f.len()];
    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut total = 0;
    for &beta in schedule {
        let pen = Penalty { m, f: f.values(), beta };
        let mut res = pen.residual(&u);
        let mut rnorm = linalg::norm2(&res);
        let mut steps = 0;
        // Rounding in `u` is amplified by `β` in the exponential.
        let target = 1e-10 + 1e-14 * beta;
        while linalg::norm_inf(&res) > target {
            if steps >= 60 {
                return Err(SptError::NewtonDiverged { stage: format!("beta={beta}"), residual: linalg::norm_inf(&res) });
            }
            let adj: Vec<Herm> = (0..u.len()).map(|i| hessian::metric_at(m, &u, i).adj()).collect();
            let diag: Vec<f64> = (0..u.len())
                .map(|i| adj[i].trace_prod(&spike) / m.ref_metric(i).det() + beta * (beta * (u[i] - f.values()[i])).exp())
                .collect();
            let mut delta = vec![0.0; u.len()];
            let tol = (1e-3 * target / linalg::norm_inf(&res)).clamp(1e-13, 1e-4);
            let op = |x: &[f64], out: &mut [f64]| pen.neg_jacobian(&u, &adj, x, out);
            let pc = |r: &[f64], z: &mut [f64]| {
                for i in 0..r.len() {
                    z[i] = r[i] / diag[i];
                }
            };
            if m.n == 1 {
                linalg::cg(op, pc, &res, &mut delta, tol, 4000);
            } else {
                linalg::bicgstab(op, pc, &res, &mut delta, tol, 4000);
            }
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
                let tr = pen.residual(&trial);
                let tn = linalg::norm2(&tr);
                if tn.is_finite() && tn < rnorm {
                    u = trial;
                    res = tr;
                    rnorm = tn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            steps += 1;
            if !accepted {
                return Err(SptError::NewtonDiverged { stage: format!("beta={beta}"), residual: linalg::norm_inf(&res) });
            }
        }
        total += steps;
        history.push(u.clone());
    }
    Ok((history, total))
}

/// `P(f)` by penalty continuation in `β`.
///
/// The envelope is the last penalty solution, which is strictly
/// plurisubharmonic; the extrapolation in `1/β` is reported alongside.
pub fn envelope_beta(f: &BasicFunction, schedule: &[f64]) -> Result<EnvelopeResult> {
    let m = f.model();
    let (history, total) = penalty_solutions(f, schedule)?;
    let k = history.len();
    let extrapolated = if k >= 2 {
        let (b1, b2) = (schedule[k - 2], schedule[k - 1]);
        let (u1, u2) = (&history[k - 2], &history[k - 1]);
        let data = u1.iter().zip(u2).map(|(a, b)| (b2 * b - b1 * a) / (b2 - b1)).collect();
        Some(BasicFunction::new(m, data)?.with_label(format!("Pextrap({})", f.label)))
    } else {
        None
    };
    let last = history.into_iter().next_back().unwrap_or_default();
    let env = BasicFunction::new(m, last)?.with_label(format!("Pbeta({})", f.label));
    let residual = overshoot(&env, f);
    if residual > TOL_OBST {
        return Err(SptError::ObstacleViolated { excess: residual });
    }
    let margin = psh::psh_margin(&env);
    Ok(EnvelopeResult {
        contacts: vec![contact_mask(&env, f)],
        residual,
        envelope: env,
        method: "beta".into(),
        iterations: total,
        schedule: schedule.to_vec(),
        margin,
        extrapolated,
    })
}

/// `P(f)` with the chosen solver.
pub fn envelope(f: &BasicFunction, method: &EnvelopeMethod) -> Result<EnvelopeResult> {
    match method {
        EnvelopeMethod::Sweep { max_iters } => envelope_sweep(f, *max_iters),
        EnvelopeMethod::Beta { schedule } => envelope_beta(f, schedule),
    }
}

/// Rooftop `P(u₀, u₁) = P(min(u₀, u₁))` with both contact masks.
pub fn rooftop_with(u0: &BasicFunction, u1: &BasicFunction, method: &EnvelopeMethod) -> Result<EnvelopeResult> {
    u0.same_model(u1)?;
    psh::require_tpsh(u0)?;
    psh::require_tpsh(u1)?;
    let mut lo = u0.min_with(u1);
    lo.label = format!("min({},{})", u0.label, u1.label);
    let mut r = envelope(&lo, method)?;
    r.envelope.label = format!("P({},{})", u0.label, u1.label);
    r.contacts = vec![contact_mask(&r.envelope, u0), contact_mask(&r.envelope, u1)];
    Ok(r)
}

/// Rooftop by the sweep solver.
pub fn rooftop(u0: &BasicFunction, u1: &BasicFunction) -> Result<EnvelopeResult> {
    rooftop_with(u0, u1, &EnvelopeMethod::sweep())
}

/// Partition-of-mass check for a rooftop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// `L¹` defect of `ω_P^n = χ_{Λ₀}ω_{u₀}^n + χ_{Λ₁∖Λ₀}ω_{u₁}^n` off the
    /// contact-boundary layer.
    pub residual: f64,
    /// Mass of `ω_P^n∧η` on `{P < min(u₀,u₁) − δ_nc}`.
    pub noncontact_mass: f64,
    /// Reference volume of the excluded layer.
    pub layer_volume: f64,
    pub pass: bool,
}

fn closed_stencil(m: &SasakiModel, i: usize) -> Vec<usize> {
    let nb = m.neighbors().expect("torus neighbours");
    let axes = m.grid.axes();
    let mut out = vec![i];
    for a in 0..axes {
        let (p, q) = (nb.p(a, i), nb.m(a, i));
        out.push(p);
        out.push(q);
        for b in a + 1..axes {
            out.extend([nb.p(b, p), nb.m(b, p), nb.p(b, q), nb.m(b, q)]);
        }
    }
    out
}

/// Mass partition of a rooftop over its contact sets.
pub fn contact_decomposition_residual(u0: &BasicFunction, u1: &BasicFunction, roof: &EnvelopeResult) -> Result<DecompositionReport> {
    u0.same_model(u1)?;
    let m = u0.model();
    require_torus(m)?;
    let p = &roof.envelope;
    let (l0, l1) = (&roof.contacts[0], &roof.contacts[1]);
    let class: Vec<u8> = (0..m.len()).map(|i| if l0[i] { 0 } else if l1[i] { 1 } else { 2 }).collect();
    let mp = measure::ma_measure_unchecked(p);
    let m0 = measure::ma_measure_unchecked(u0);
    let m1 = measure::ma_measure_unchecked(u1);
    let w = m.ref_weights();
    let interior: Vec<bool> = (0..m.len()).map(|i| closed_stencil(m, i).iter().all(|&j| class[j] == class[i])).collect();
    let residual = exec::sum(m.len(), |i| {
        if !interior[i] {
            return 0.0;
        }
        let target = match class[i] {
            0 => m0.density[i],
            1 => m1.density[i],
            _ => 0.0,
        };
        (mp.density[i] - target).abs() * w[i]
    });
    let layer_volume = exec::sum(m.len(), |i| if interior[i] { 0.0 } else { w[i] });
    let dnc = CONTACT_FACTOR * TOL_OBST;
    let (a, b, pv) = (u0.values(), u1.values(), p.values());
    let noncontact_mass = exec::sum(m.len(), |i| if pv[i] < a[i].min(b[i]) - dnc { mp.density[i].max(0.0) * w[i] } else { 0.0 });
    Ok(DecompositionReport {
        residual,
        noncontact_mass,
        layer_volume,
        pass: noncontact_mass <= TOL_NONCONTACT && roof.margin >= -TOL_POS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psh_obstacle_is_fixed() {
        let m = SasakiModel::torus(1, 16).unwrap();
        let f = psh::random_tpsh(&m, 3, 0.3, 2).unwrap();
        let r = envelope_sweep(&f, 10_000).unwrap();
        assert!(r.envelope.sup_dist(&f) < 1e-12);
        assert!(r.contacts[0].iter().all(|&c| c));
    }

    #[test]
    fn constant_obstacle() {
        let m = SasakiModel::torus(1, 16).unwrap();
        let f = BasicFunction::constant(&m, -0.4);
        let r = envelope_beta(&f, &EnvelopeMethod::default_beta().schedule()).unwrap();
        assert!(r.envelope.sup_dist(&f) < 1e-8);
    }
}
