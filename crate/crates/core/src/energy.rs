//! χ-energies, Orlicz norms, the Monge–Ampère energy 𝕀, Aubin's I and J,
//! the entropy and the K-energy.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::field::BasicFunction;
use crate::geometry::SasakiModel;
use crate::measure::{self, InequalityCheck, MAMeasure, TOL_INEQ};
use crate::psh;

/// Densities below this are treated as degenerate by the entropy.
pub const TOL_DENSITY: f64 = 1e-10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Profile {
    Power,
    LogCosh,
    Custom { f: ScalarFn, df: ScalarFn },
}

/// Convex even weight `χ` with `χ(0) = 0` and growth `tχ′(t) ≤ pχ(t)`.
#[derive(Clone)]
pub struct Weight {
    pub p: f64,
    profile: Profile,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({}, p={})", self.name(), self.p)
    }
}

impl Weight {
    /// `χ_p(t) = |t|^p / p`.
    pub fn power(p: f64) -> Result<Weight> {
        if !(p >= 1.0) {
            return Err(SptError::InvalidArgument(format!("exponent {p} must be ≥ 1")));
        }
        Ok(Weight { p, profile: Profile::Power })
    }

    /// `log cosh t`, a smooth weight of growth exponent 2.
    pub fn log_cosh() -> Weight {
        Weight { p: 2.0, profile: Profile::LogCosh }
    }

    /// A user weight given on `t ≥ 0`, spot-checked for convexity,
    /// monotonicity, `χ(0) = 0` and the growth condition on 1000 points
    /// of `[0, 10]`.
    pub fn custom<F, D>(p: f64, f: F, df: D) -> Result<Weight>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let w = Weight { p, profile: Profile::Custom { f: Arc::new(f), df: Arc::new(df) } };
        w.spot_check()?;
        Ok(w)
    }

    pub fn name(&self) -> String {
        match self.profile {
            Profile::Power => format!("chi_{}", self.p),
            Profile::LogCosh => "logcosh".into(),
            Profile::Custom { .. } => "custom".into(),
        }
    }

    pub fn is_standard(&self) -> bool {
        matches!(self.profile, Profile::Power)
    }

    /// `χ(t)`, extended evenly.
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        match &self.profile {
            Profile::Power => a.powf(self.p) / self.p,
            Profile::LogCosh => a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2,
            Profile::Custom { f, .. } => f(a),
        }
    }

    /// `χ′(t)`.
    pub fn deriv(&self, t: f64) -> f64 {
        let a = t.abs();
        let d = match &self.profile {
            Profile::Power => a.powf(self.p - 1.0),
            Profile::LogCosh => a.tanh(),
            Profile::Custom { df, .. } => df(a),
        };
        d.copysign(t)
    }

    /// Verify the structural conditions on a 1000-point grid.
    pub fn spot_check(&self) -> Result<()> {
        let bad = |why: String| Err(SptError::InvalidArgument(format!("weight {}: {why}", self.name())));
        if self.p < 1.0 {
            return bad(format!("exponent {} below 1", self.p));
        }
        if self.eval(0.0).abs() > 1e-12 {
            return bad("χ(0) ≠ 0".into());
        }
        let ts: Vec<f64> = (0..1000).map(|k| 10.0 * k as f64 / 999.0).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| self.eval(t)).collect();
        for k in 1..ts.len() {
            if vals[k] < vals[k - 1] - 1e-12 {
                return bad(format!("decreasing near t = {}", ts[k]));
            }
            let t = ts[k];
            if t * self.deriv(t) > self.p * vals[k] * (1.0 + 1e-9) + 1e-12 {
                return bad(format!("growth condition fails at t = {t}"));
            }
            if k + 1 < ts.len() && vals[k + 1] - 2.0 * vals[k] + vals[k - 1] < -1e-10 {
                return bad(format!("not convex near t = {t}"));
            }
        }
        Ok(())
    }
}

/// One evaluated functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub name: String,
    pub value: f64,
    pub operands: Vec<String>,
    pub tol: f64,
}

impl EnergyReport {
    pub fn csv_header() -> &'static str {
        "name,operands,value,tol"
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{:.17e},{:e}", self.name, self.operands.join(";"), self.value, self.tol)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `E_χ(u) = ∫ χ(u) ω_u^n ∧ η`.
pub fn e_chi(u: &BasicFunction, chi: &Weight) -> Result<f64> {
    let mu = measure::ma_measure(u)?;
    Ok(mu.integrate_fn(u, |x| chi.eval(x)))
}

/// `E_χ(v) ≤ (p+1)^n E_χ(u)` for `u ≤ v ≤ 0`.
pub fn fundamental_estimate_check(u: &BasicFunction, v: &BasicFunction, chi: &Weight) -> Result<InequalityCheck> {
    u.same_model(v)?;
    let excess = exec::max(u.len(), |i| {
        let (a, b) = (u.values()[i], v.values()[i]);
        (a - b).max(b).max(0.0)
    });
    if excess > 1e-12 {
        return Err(SptError::OrderViolated { excess });
    }
    let ev = e_chi(v, chi)?;
    let eu = e_chi(u, chi)?;
    let n = u.model().n as i32;
    Ok(InequalityCheck::new(ev, (chi.p + 1.0).powi(n) * eu, TOL_INEQ * u.model().volume()))
}

/// `∫ χ(u) ω_v^n ∧ η ≤ p 2^p (E_χ(u) + E_χ(v))`.
pub fn mixed_energy_bound_check(u: &BasicFunction, v: &BasicFunction, chi: &Weight) -> Result<InequalityCheck> {
    u.same_model(v)?;
    for f in [u, v] {
        if f.sup() > 1e-12 {
            return Err(SptError::SignViolated { max: f.sup() });
        }
    }
    let lhs = measure::ma_measure(v)?.integrate_fn(u, |x| chi.eval(x));
    let rhs = chi.p * 2f64.powf(chi.p) * (e_chi(u, chi)? + e_chi(v, chi)?);
    Ok(InequalityCheck::new(lhs, rhs, TOL_INEQ * u.model().volume()))
}

/// Orlicz norm of `v` with respect to `ω_u^n ∧ η`: the `r` solving
/// `Vol⁻¹ ∫ χ(v/r) ω_u^n∧η = χ(1)`.
pub fn orlicz_norm(v: &BasicFunction, u: &BasicFunction, chi: &Weight) -> Result<f64> {
    v.same_model(u)?;
    let mu = measure::ma_measure_unchecked(u);
    Ok(orlicz_norm_measure(v.values(), &mu, chi))
}

/// Orlicz norm against an already computed measure.
pub fn orlicz_norm_measure(v: &[f64], mu: &MAMeasure, chi: &Weight) -> f64 {
    let vol = mu.model.volume();
    let w = mu.model.ref_weights();
    let d = &mu.density;
    let vmax = exec::max(v.len(), |i| if w[i] != 0.0 { v[i].abs() } else { 0.0 });
    if vmax == 0.0 {
        return 0.0;
    }
    let target = chi.eval(1.0);
    let g = |r: f64| exec::sum(v.len(), |i| if w[i] != 0.0 { chi.eval(v[i] / r) * d[i] * w[i] } else { 0.0 }) / vol;
    let (mut lo, mut hi) = (1e-12, f64::max(1.0, 2.0 * vmax));
    // Rescale the bracket to the size of `v` so that 80 halvings reach
    // relative precision for tiny inputs as well.
    if vmax < 1.0 {
        lo = 1e-12 * vmax;
        hi = 2.0 * vmax;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ref_mixed_sum(u: &BasicFunction) -> Vec<f64> {
    let n = u.model().n;
    let zero = BasicFunction::zero(u.model());
    let mut acc = vec![0.0; u.len()];
    for k in 0..=n {
        let m = measure::mixed_measure_unchecked(u, &zero, k);
        for (a, d) in acc.iter_mut().zip(&m.density) {
            *a += d;
        }
    }
    acc
}

fn pair_mixed_sum(u: &BasicFunction, v: &BasicFunction) -> Vec<f64> {
    let n = u.model().n;
    let mut acc = vec![0.0; u.len()];
    for k in 0..=n {
        let m = measure::mixed_measure_unchecked(u, v, k);
        for (a, d) in acc.iter_mut().zip(&m.density) {
            *a += d;
        }
    }
    acc
}

fn weighted(model: &SasakiModel, f: &[f64], dens: &[f64]) -> f64 {
    let w = model.ref_weights();
    exec::sum(f.len(), |i| if w[i] != 0.0 { f[i] * dens[i] * w[i] } else { 0.0 })
}

/// Monge–Ampère energy without the positivity precondition.
pub fn mono_energy_unchecked(u: &BasicFunction) -> f64 {
    let m = u.model();
    weighted(m, u.values(), &ref_mixed_sum(u)) / factorial(m.n + 1)
}

/// `𝕀(u) = 1/(n+1)! ∫ u Σ_k ω_u^k ∧ (ω^T)^{n−k} ∧ η`.
pub fn mono_energy(u: &BasicFunction) -> Result<f64> {
    psh::require_tpsh(u)?;
    Ok(mono_energy_unchecked(u))
}

/// `1/(n+1)! Σ_k ∫ (u − v) ω_u^k ∧ ω_v^{n−k} ∧ η`.
pub fn energy_difference(u: &BasicFunction, v: &BasicFunction) -> Result<f64> {
    u.same_model(v)?;
    let m = u.model();
    let diff = u.sub(v);
    Ok(weighted(m, diff.values(), &pair_mixed_sum(u, v)) / factorial(m.n + 1))
}

/// `|𝕀(u) − 𝕀(v) − 1/(n+1)! Σ_k ∫(u−v) ω_u^k∧ω_v^{n−k}∧η|`.
pub fn cocycle_residual(u: &BasicFunction, v: &BasicFunction) -> Result<f64> {
    let d = energy_difference(u, v)?;
    Ok((mono_energy_unchecked(u) - mono_energy_unchecked(v) - d).abs())
}

/// Both sides of the concavity sandwich
/// `(1/n!)∫(u−v)ω_u^n ≤ 𝕀(u)−𝕀(v) ≤ (1/n!)∫(u−v)ω_v^n`.
pub fn concavity_sandwich(u: &BasicFunction, v: &BasicFunction) -> Result<[f64; 3]> {
    u.same_model(v)?;
    let nf = factorial(u.model().n);
    let diff = u.sub(v);
    let lo = measure::ma_measure_unchecked(u).integrate(diff.values()) / nf;
    let hi = measure::ma_measure_unchecked(v).integrate(diff.values()) / nf;
    Ok([lo, mono_energy_unchecked(u) - mono_energy_unchecked(v), hi])
}

/// Aubin's `I(u, v) = 1/n! ∫ (v − u)(ω_u^n − ω_v^n) ∧ η`.
pub fn aubin_i(u: &BasicFunction, v: &BasicFunction) -> Result<f64> {
    u.same_model(v)?;
    let m = u.model();
    let mu = measure::ma_measure_unchecked(u);
    let mv = measure::ma_measure_unchecked(v);
    let (a, b) = (u.values(), v.values());
    let w = m.ref_weights();
    let s = exec::sum(a.len(), |i| if w[i] != 0.0 { (b[i] - a[i]) * (mu.density[i] - mv.density[i]) * w[i] } else { 0.0 });
    Ok(s / factorial(m.n))
}

/// `J(u, v) = 1/n! ∫ (v − u) ω_u^n ∧ η − 𝕀_{ω_u}(v)` with the based energy
/// `𝕀_{ω_u}(v) = 1/(n+1)! ∫ (v − u) Σ_k ω_u^k ∧ ω_v^{n−k} ∧ η`.
pub fn j_energy(u: &BasicFunction, v: &BasicFunction) -> Result<f64> {
    u.same_model(v)?;
    let m = u.model();
    let diff = v.sub(u);
    let first = measure::ma_measure_unchecked(u).integrate(diff.values()) / factorial(m.n);
    let based = weighted(m, diff.values(), &pair_mixed_sum(u, v)) / factorial(m.n + 1);
    Ok(first - based)
}

/// `I(u,v) / (I(u,w) + I(v,w))`, infinite when the denominator vanishes
/// but the numerator does not.
pub fn i_quasi_triangle_ratio(u: &BasicFunction, v: &BasicFunction, w: &BasicFunction) -> Result<f64> {
    let num = aubin_i(u, v)?;
    let den = aubin_i(u, w)? + aubin_i(v, w)?;
    if den < 1e-14 {
        return Ok(if num > 1e-12 { f64::INFINITY } else { 0.0 });
    }
    Ok(num / den)
}

/// `H(u) = ∫ log(ω_u^n∧η / ω_T^n∧η) ω_u^n∧η`.
pub fn entropy(u: &BasicFunction) -> Result<f64> {
    let mu = measure::ma_measure(u)?;
    entropy_of(&mu)
}

/// Entropy of a measure given by its relative density.
pub fn entropy_of(mu: &MAMeasure) -> Result<f64> {
    let w = mu.model.ref_weights();
    let d = &mu.density;
    let bad = exec::sum(d.len(), |i| if w[i] != 0.0 && d[i] < TOL_DENSITY { w[i] } else { 0.0 });
    if bad > 1e-6 {
        return Err(SptError::DegenerateDensity { mass: bad });
    }
    Ok(exec::sum(d.len(), |i| {
        let x = d[i];
        if w[i] != 0.0 && x > 0.0 {
            x * x.ln() * w[i]
        } else {
            0.0
        }
    }))
}

/// Ricci form of the reference metric relative to `ω^T` and the average
/// scalar curvature, for models with a Kähler–Einstein reference.
pub fn reference_ricci(model: &SasakiModel) -> Result<(f64, f64)> {
    if model.is_torus() {
        Ok((0.0, 0.0))
    } else if model.is_sphere() {
        let r = 2.0 * std::f64::consts::PI;
        Ok((r, r))
    } else {
        Err(SptError::Unsupported("reference Ricci form is not available for this model".into()))
    }
}

/// The pluri-linear part
/// `nR̄/(n+1)! ∫φ Σ_k ω_T^k∧ω_φ^{n−k}∧η − 1/n! ∫φ Σ_{k<n} Ric∧ω_T^k∧ω_φ^{n−1−k}∧η`.
pub fn ricci_energy(u: &BasicFunction) -> Result<f64> {
    let m = u.model();
    let n = m.n;
    let (ric, rbar) = reference_ricci(m)?;
    if ric == 0.0 && rbar == 0.0 {
        return Ok(0.0);
    }
    let first = n as f64 * rbar / factorial(n + 1) * weighted(m, u.values(), &ref_mixed_sum(u));
    // With Ric = ric·ω^T the second sum reduces to mixed densities of one
    // lower degree, which for n ≤ 2 are `1` (n=1) and `1 + tr-part` (n=2).
    let zero = BasicFunction::zero(m);
    let lower: Vec<f64> = match n {
        1 => vec![1.0; u.len()],
        _ => {
            let one = measure::mixed_measure_unchecked(u, &zero, 1).density;
            one.iter().map(|d| 1.0 + d).collect()
        }
    };
    let second = ric * weighted(m, u.values(), &lower) / factorial(n);
    Ok(first - second)
}

/// `K(u) = H(u) + 𝕁_{−Ric}(u)`.
pub fn k_energy(u: &BasicFunction) -> Result<f64> {
    Ok(entropy(u)? + ricci_energy(u)?)
}
