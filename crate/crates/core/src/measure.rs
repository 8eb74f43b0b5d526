//! Discrete transverse Monge–Ampère and mixed measures, the Bedford–Taylor
//! identities, the comparison principle, capacity and the
//! Chern–Levine–Nirenberg inequality.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::field::BasicFunction;
use crate::geometry::SasakiModel;
use crate::hessian;
use crate::linalg::Herm;
use crate::psh::{self, TOL_POS};

/// Mass tolerance for full-mass statements.
pub const TOL_MASS: f64 = 1e-8;
/// Default slack for inequalities (relative to a unit volume).
pub const TOL_INEQ: f64 = 1e-6;

/// A positive measure given by a density relative to `(ω^T)^n ∧ η`.
#[derive(Debug, Clone)]
pub struct MAMeasure {
    pub model: Arc<SasakiModel>,
    pub density: Vec<f64>,
    pub mass: f64,
    pub tag: String,
}

impl MAMeasure {
    fn from_density(model: &Arc<SasakiModel>, density: Vec<f64>, tag: String) -> MAMeasure {
        let w = model.ref_weights();
        let mass = exec::sum(density.len(), |i| density[i] * w[i]);
        MAMeasure { model: Arc::clone(model), density, mass, tag }
    }

    /// `∫ f dμ` for a function given per node.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let w = self.model.ref_weights();
        let d = &self.density;
        exec::sum(d.len(), |i| if w[i] != 0.0 { f[i] * d[i] * w[i] } else { 0.0 })
    }

    /// `∫ g(u) dμ`.
    pub fn integrate_fn<F>(&self, u: &BasicFunction, g: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let w = self.model.ref_weights();
        let d = &self.density;
        let v = u.values();
        exec::sum(d.len(), |i| if w[i] != 0.0 { g(v[i]) * d[i] * w[i] } else { 0.0 })
    }

    /// Mass of the nodes selected by `mask`.
    pub fn mass_on(&self, mask: &[bool]) -> f64 {
        let w = self.model.ref_weights();
        let d = &self.density;
        exec::sum(d.len(), |i| if mask[i] { d[i] * w[i] } else { 0.0 })
    }

    pub fn min_density(&self) -> f64 {
        let w = self.model.ref_weights();
        let d = &self.density;
        exec::min(d.len(), |i| if w[i] != 0.0 { d[i] } else { f64::INFINITY })
    }
}

fn metric_field(u: &BasicFunction) -> Vec<Herm> {
    let m = u.model();
    let d = u.values();
    (0..m.len()).map(|i| hessian::metric_at(m, d, i)).collect()
}

/// `ω_u^n ∧ η` without the plurisubharmonicity check.
pub fn ma_measure_unchecked(u: &BasicFunction) -> MAMeasure {
    let m = u.model();
    let d = u.values();
    let density = exec::collect(m.len(), |i| {
        if m.active(i) {
            hessian::metric_at(m, d, i).det() / m.ref_metric(i).det()
        } else {
            0.0
        }
    });
    MAMeasure::from_density(m, density, format!("MA({})", u.label))
}

/// Monge–Ampère measure `ω_u^n ∧ η` of a plurisubharmonic function.
pub fn ma_measure(u: &BasicFunction) -> Result<MAMeasure> {
    psh::require_tpsh(u)?;
    Ok(ma_measure_unchecked(u))
}

/// Mixed measure `ω_u^k ∧ ω_v^{n−k} ∧ η`.
pub fn mixed_measure(u: &BasicFunction, v: &BasicFunction, k: usize) -> Result<MAMeasure> {
    u.same_model(v)?;
    let m = u.model();
    if k > m.n {
        return Err(SptError::BadExponent { k, n: m.n });
    }
    psh::require_tpsh(u)?;
    psh::require_tpsh(v)?;
    Ok(mixed_measure_unchecked(u, v, k))
}

pub(crate) fn mixed_measure_unchecked(u: &BasicFunction, v: &BasicFunction, k: usize) -> MAMeasure {
    let m = u.model();
    let gu = metric_field(u);
    let gv = metric_field(v);
    let density = exec::collect(m.len(), |i| {
        if m.active(i) {
            gu[i].mixed_det(&gv[i], k) / m.ref_metric(i).det()
        } else {
            0.0
        }
    });
    MAMeasure::from_density(m, density, format!("MIX({},{},{k})", u.label, v.label))
}

/// Mixed measure of `ω_u^k ∧ (ω^T)^{n−k} ∧ η` (the second factor is the
/// reference form).
pub fn reference_mixed(u: &BasicFunction, k: usize) -> Result<MAMeasure> {
    let zero = BasicFunction::zero(u.model());
    mixed_measure(u, &zero, k)
}

/// Largest one-sided difference of `w` along any grid edge, divided by
/// the edge length.
pub fn max_edge_slope(w: &BasicFunction) -> f64 {
    let m = w.model();
    let d = w.values();
    if let Some(nb) = m.neighbors() {
        let axes = m.grid.axes();
        exec::max(m.len(), |i| {
            (0..axes).map(|a| (d[nb.p(a, i)] - d[i]).abs() / m.grid.spacing[a]).fold(0.0, f64::max)
        })
    } else if let Some(ch) = m.sphere_charts() {
        let pts = ch.points;
        exec::max(m.len(), |i| {
            let local = i % (pts * pts);
            let (ix, iy) = (local / pts, local % pts);
            let mut s: f64 = 0.0;
            if ix + 1 < pts {
                s = s.max((d[i + pts] - d[i]).abs() / ch.h);
            }
            if iy + 1 < pts {
                s = s.max((d[i + 1] - d[i]).abs() / ch.h);
            }
            s
        })
    } else {
        0.0
    }
}

/// Kink-layer width `2·h·sup|∇(u − v)|` (edge slopes).
pub fn separation_layer(u: &BasicFunction, v: &BasicFunction) -> f64 {
    let h = u.model().grid.spacing.iter().cloned().fold(0.0, f64::max);
    let stencil_reach = if u.model().is_sphere() { 2.0 } else { 1.0 };
    2.0 * stencil_reach * h * max_edge_slope(&u.sub(v))
}

/// `L¹` norm of `ω^n_{max(u,v)} − ω^n_u` on `{u > v + δ_sep}`.
pub fn bt_identity_residual(u: &BasicFunction, v: &BasicFunction) -> Result<f64> {
    u.same_model(v)?;
    let delta = separation_layer(u, v);
    let mx = u.max_with(v);
    let a = ma_measure_unchecked(&mx);
    let b = ma_measure_unchecked(u);
    let w = u.model().ref_weights();
    let (uu, vv) = (u.values(), v.values());
    Ok(exec::sum(uu.len(), |i| {
        if uu[i] > vv[i] + delta {
            (a.density[i] - b.density[i]).abs() * w[i]
        } else {
            0.0
        }
    }))
}

/// Masses of `ω^n_{max(u,v)} ∧ η` split by which argument is larger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassDecomposition {
    /// Mass on `{u > v + δ_sep}`.
    pub u_side: f64,
    /// Mass on `{v > u + δ_sep}`.
    pub v_side: f64,
    /// Mass on the kink layer `{|u − v| ≤ δ_sep}`.
    pub kink: f64,
    /// `L¹` defect of the identity on both sides.
    pub residual: f64,
    pub layer: f64,
}

/// Generalized Bedford–Taylor decomposition of `ω^n_{max(u,v)} ∧ η`.
pub fn gbt_max_mass(u: &BasicFunction, v: &BasicFunction) -> Result<MassDecomposition> {
    u.same_model(v)?;
    let delta = separation_layer(u, v);
    let mx = ma_measure_unchecked(&u.max_with(v));
    let mu = ma_measure_unchecked(u);
    let mv = ma_measure_unchecked(v);
    let w = u.model().ref_weights();
    let (uu, vv) = (u.values(), v.values());
    let n = uu.len();
    let side = |i: usize| -> i8 {
        if uu[i] > vv[i] + delta {
            1
        } else if vv[i] > uu[i] + delta {
            -1
        } else {
            0
        }
    };
    let u_side = exec::sum(n, |i| if side(i) == 1 { mx.density[i] * w[i] } else { 0.0 });
    let v_side = exec::sum(n, |i| if side(i) == -1 { mx.density[i] * w[i] } else { 0.0 });
    let kink = exec::sum(n, |i| if side(i) == 0 { mx.density[i] * w[i] } else { 0.0 });
    let residual = exec::sum(n, |i| match side(i) {
        1 => (mx.density[i] - mu.density[i]).abs() * w[i],
        -1 => (mx.density[i] - mv.density[i]).abs() * w[i],
        _ => 0.0,
    });
    Ok(MassDecomposition { u_side, v_side, kink, residual, layer: delta })
}

/// `max(0, ∫_{v<u−δ} ω_u^n∧η − ∫_{v<u−δ} ω_v^n∧η)`.
pub fn comparison_residual(u: &BasicFunction, v: &BasicFunction) -> Result<f64> {
    u.same_model(v)?;
    let delta = separation_layer(u, v);
    let mu = ma_measure_unchecked(u);
    let mv = ma_measure_unchecked(v);
    let (uu, vv) = (u.values(), v.values());
    let mask: Vec<bool> = (0..uu.len()).map(|i| vv[i] < uu[i] - delta).collect();
    Ok((mu.mass_on(&mask) - mv.mass_on(&mask)).max(0.0))
}

/// Certified lower bound for the capacity of a node set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub mask_id: String,
    pub lower: f64,
    /// Index of the best candidate in the supplied family; `None` when the
    /// best value came from the ascent.
    pub candidate: Option<usize>,
    pub ascent_gain: f64,
    pub upper: Option<f64>,
}

fn validate_candidate(index: usize, phi: &BasicFunction) -> Result<()> {
    let (lo, hi) = (phi.inf(), phi.sup());
    if lo < -1e-12 || hi > 1.0 + 1e-12 {
        return Err(SptError::InvalidCandidate { index, reason: format!("range [{lo:.3e}, {hi:.3e}] not in [0,1]") });
    }
    let margin = psh::psh_margin(phi);
    if margin < -TOL_POS {
        return Err(SptError::InvalidCandidate { index, reason: format!("margin {margin:.3e}") });
    }
    Ok(())
}

/// `max_k ∫_mask ω_{φ_k}^n ∧ η` over a family of admissible candidates.
pub fn capacity_lower(mask: &[bool], family: &[BasicFunction]) -> Result<CapacityEstimate> {
    let mut best = 0.0;
    let mut arg = None;
    for (k, phi) in family.iter().enumerate() {
        validate_candidate(k, phi)?;
        let val = ma_measure_unchecked(phi).mass_on(mask);
        if arg.is_none() || val > best {
            best = val;
            arg = Some(k);
        }
    }
    Ok(CapacityEstimate { mask_id: String::new(), lower: best, candidate: arg, ascent_gain: 0.0, upper: None })
}

/// Projected hill-climb from a candidate: seeded smooth perturbations,
/// clipped to `[0,1]`, accepted only if the margin stays nonnegative and
/// the mass on `mask` increases; failed steps are halved.
pub fn capacity_ascent(mask: &[bool], start: &BasicFunction, steps: usize, seed: u64) -> Result<(BasicFunction, f64)> {
    validate_candidate(0, start)?;
    let model = start.model();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start.clone();
    let mut val = ma_measure_unchecked(&cur).mass_on(mask);
    // Ascent direction of the linearized functional: the Hessian trace
    // operator applied to the mask indicator, smoothed.
    let ind = BasicFunction::new(model, mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())?;
    let grad = if model.is_torus() {
        psh::mollify(&ind, 2.0 * model.grid.spacing[0], psh::Lift::Fixed(0.0))?
    } else {
        ind.clone()
    };
    let gnorm = grad.sup().abs().max(grad.inf().abs()).max(1e-300);
    let mut step = 0.5;
    for _ in 0..steps {
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let mix: f64 = rng.gen_range(0.0..0.3);
        let coords_dir = BasicFunction::from_fn(model, |x| (std::f64::consts::TAU * x[0] + phase).cos());
        let dir = grad.lin(1.0 / gnorm, &coords_dir, mix);
        let trial = cur.lin(1.0, &dir, step).map(|x| x.clamp(0.0, 1.0));
        if psh::psh_margin(&trial) >= 0.0 {
            let tv = ma_measure_unchecked(&trial).mass_on(mask);
            if tv > val {
                val = tv;
                cur = trial;
                continue;
            }
        }
        step *= 0.5;
        if step < 1e-8 {
            step = 0.25;
        }
    }
    Ok((cur, val))
}

/// `(1/t)(∫(−u)(ω^T)^n∧η + n·Vol)`.
pub fn capacity_upper(u: &BasicFunction, t: f64) -> f64 {
    let m = u.model();
    (u.integrate_ref(|x| -x) + m.n as f64 * m.volume()) / t
}

/// Outcome of an inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl InequalityCheck {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> InequalityCheck {
        InequalityCheck { lhs, rhs, slack: rhs - lhs, pass: lhs <= rhs + tol }
    }

    /// `lhs ≤ (1 + rel)·rhs`, with a tiny absolute floor for zero sides.
    pub fn relative(lhs: f64, rhs: f64, rel: f64) -> InequalityCheck {
        InequalityCheck { lhs, rhs, slack: rhs - lhs, pass: lhs <= rhs + rel * rhs.abs() + 1e-12 }
    }
}

/// Compare a capacity lower bound on `{u < −t}` with the theoretical bound.
pub fn capacity_bound_check(u: &BasicFunction, t: f64, estimate: &CapacityEstimate) -> Result<InequalityCheck> {
    if !(t > 0.0) {
        return Err(SptError::InvalidArgument(format!("threshold {t} must be positive")));
    }
    if u.sup() > 1e-12 {
        return Err(SptError::SignViolated { max: u.sup() });
    }
    let bound = capacity_upper(u, t);
    Ok(InequalityCheck::new(estimate.lower, bound, TOL_INEQ * u.model().volume()))
}

/// Both sides of the Chern–Levine–Nirenberg inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClnReport {
    pub lhs: f64,
    pub rhs: f64,
    pub mass_t: f64,
    pub mass_t_phi: f64,
    pub pass: bool,
}

/// Check `‖ψ‖_{L¹(T∧ω_φ)} ≤ ‖ψ‖_{L¹(T)} + (2max(sup ψ,0) + sup φ − inf φ)‖T‖`
/// for `T = ω_{t_1} ∧ … ∧ ω_{t_p}` (`p ≤ n − 1`) and the mass identity
/// `‖ω_φ ∧ T‖ = ‖T‖`.
pub fn cln_check(psi: &BasicFunction, phi: &BasicFunction, t_spec: &[BasicFunction]) -> Result<ClnReport> {
    psi.same_model(phi)?;
    let m = psi.model();
    let n = m.n;
    if t_spec.len() + 1 > n {
        return Err(SptError::BadExponent { k: t_spec.len(), n: n - 1 });
    }
    for t in t_spec {
        psh::require_tpsh(t)?;
    }
    psh::require_tpsh(phi)?;
    let gref = |i: usize| *m.ref_metric(i);
    let gphi = metric_field(phi);
    let gt: Vec<Vec<Herm>> = t_spec.iter().map(metric_field).collect();
    // Density of T ∧ A ∧ (ω^T)^{n−p−1} for n ≤ 2.
    let dens = |i: usize, a: &Herm| -> f64 {
        let r = gref(i);
        match (n, gt.len()) {
            (1, _) => a.det() / r.det(),
            (_, 0) => a.polar(&r) / r.det(),
            _ => gt[0][i].polar(a) / r.det(),
        }
    };
    let w = m.ref_weights();
    let p = psi.values();
    let len = m.len();
    let mass_t = exec::sum(len, |i| dens(i, &gref(i)) * w[i]);
    let mass_t_phi = exec::sum(len, |i| dens(i, &gphi[i]) * w[i]);
    let l1_t = exec::sum(len, |i| p[i].abs() * dens(i, &gref(i)) * w[i]);
    let l1_tphi = exec::sum(len, |i| p[i].abs() * dens(i, &gphi[i]) * w[i]);
    let rhs = l1_t + (2.0 * psi.sup().max(0.0) + phi.sup() - phi.inf()) * mass_t;
    let pass = l1_tphi <= rhs + TOL_INEQ * m.volume() && (mass_t - mass_t_phi).abs() <= 1e-6 * mass_t.max(1.0);
    Ok(ClnReport { lhs: l1_tphi, rhs, mass_t, mass_t_phi, pass })
}
