//! Scalar curvature, the Sasaki–Futaki invariant, the Futaki–Mabuchi
//! bilinear form, the extremal field and the modified K-energy integrand.
//!
//! Everything but the scalar curvature lives on the sphere quotient, whose
//! transverse space is the projective line sampled on two stereographic
//! charts. Densities are relative to `dx dy` in the node's own chart, so
//! `ω_u = ρ_u dx dy` with `ρ_u = ρ + ¼Δu` and `ρ` the Fubini–Study density.
//! A holomorphic field `X = f ∂_z` has the complex potential
//! `θ^u_X = θ_X − i f u_z`, characterized by `∂̄θ^u_X = −i ρ_u f dz̄`. Its real
//! part is `η_u(Y) = θ_Y + d^c u(Y)` for the real field `Y = Re X` and
//! `d^c u = ½(−u_y dx + u_x dy)`; the imaginary part `−½Y(u)` vanishes for
//! `Y`-invariant potentials. Integrals of potentials are taken with these
//! complex values, which keeps them independent of `u`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::field::BasicFunction;
use crate::geometry::model::{fubini_study_density, SasakiModel, SphereCharts};
use crate::hessian;
use crate::linalg::{self, Herm};

/// Densities below this ratio to the reference count as degenerate.
pub const TOL_METRIC: f64 = 1e-10;
/// Largest admissible mean of a Poisson right-hand side.
pub const TOL_POISSON_MEAN: f64 = 1e-8;
/// Relative tolerance of the inner conjugate-gradient solves.
pub const TOL_CG: f64 = 1e-10;
/// Gram matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Radius of the disc each chart solves on in the Schwarz iteration.
const SCHWARZ_RADIUS: f64 = 1.6;
const SCHWARZ_TOL: f64 = 1e-11;
const SCHWARZ_MAX: usize = 100;

/// Generators of the automorphisms used on the projective line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    /// The Reeb field; potential `1`.
    Reeb,
    /// Rotation about the first axis of `R³`; holomorphic part `i(1−z²)/2 ∂_z`.
    RotX,
    /// Rotation about the second axis; `(1+z²)/2 ∂_z`.
    RotY,
    /// Rotation about the third axis; `iz ∂_z`.
    RotZ,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Reeb => "reeb",
            FieldKind::RotX => "rot_x",
            FieldKind::RotY => "rot_y",
            FieldKind::RotZ => "rot_z",
        }
    }

    /// Real vector field `(Y^x, Y^y)` at chart point `(x, y)`.
    ///
    /// Chart 2 uses `w = 1/z`, where `f(z)∂_z` becomes `−w² f(1/w) ∂_w`.
    pub fn vector(self, second_chart: bool, x: f64, y: f64) -> (f64, f64) {
        // z² = x2 + i·y2.
        let (x2, y2) = (x * x - y * y, 2.0 * x * y);
        // Complex coefficient (re, im).
        let (re, im) = match (self, second_chart) {
            (FieldKind::Reeb, _) => (0.0, 0.0),
            (FieldKind::RotZ, false) => (-y, x),
            (FieldKind::RotZ, true) => (y, -x),
            (FieldKind::RotY, false) => (0.5 * (1.0 + x2), 0.5 * y2),
            (FieldKind::RotY, true) => (-0.5 * (1.0 + x2), -0.5 * y2),
            (FieldKind::RotX, _) => (0.5 * y2, 0.5 * (1.0 - x2)),
        };
        (re, im)
    }

    /// Reference potential at a point `p` of the unit sphere.
    pub fn reference_potential(self, p: [f64; 3]) -> f64 {
        match self {
            FieldKind::Reeb => 1.0,
            FieldKind::RotX => p[0] / (2.0 * PI),
            FieldKind::RotY => -p[1] / (2.0 * PI),
            FieldKind::RotZ => p[2] / (2.0 * PI),
        }
    }
}

/// Finite list of fields with potentials; the Reeb field has `θ ≡ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicFieldBasis {
    pub fields: Vec<FieldKind>,
}

impl HolomorphicFieldBasis {
    /// The Reeb field and the three rotations.
    pub fn standard() -> HolomorphicFieldBasis {
        HolomorphicFieldBasis { fields: vec![FieldKind::Reeb, FieldKind::RotX, FieldKind::RotY, FieldKind::RotZ] }
    }

    pub fn rotations() -> HolomorphicFieldBasis {
        HolomorphicFieldBasis { fields: vec![FieldKind::RotX, FieldKind::RotY, FieldKind::RotZ] }
    }

    pub fn reeb_only() -> HolomorphicFieldBasis {
        HolomorphicFieldBasis { fields: vec![FieldKind::Reeb] }
    }
}

fn sphere_parts(u: &BasicFunction) -> Result<(&SasakiModel, &SphereCharts)> {
    let m = u.model();
    match m.sphere_charts() {
        Some(ch) => Ok((m.as_ref(), ch)),
        None => Err(SptError::Unsupported("needs the sphere quotient model".into())),
    }
}

/// Densities `ρ_u` of `ω_u` on nodes with a valid stencil (NaN elsewhere)
/// and the quadrature weights of `ω_u^n ∧ η`.
struct Metric {
    density: Vec<f64>,
    weight: Vec<f64>,
}

fn metric(u: &BasicFunction) -> Result<Metric> {
    let m = u.model();
    let v = u.values();
    let len = m.len();
    let interior = |i: usize| m.sphere_charts().is_none_or(|c| c.interior[i]);
    let herm: Vec<Herm> = exec::map_items(len, |i| if interior(i) { hessian::metric_at(m, v, i) } else { Herm::zero(m.n) });
    let density: Vec<f64> = (0..len).map(|i| if interior(i) { herm[i].det() } else { f64::NAN }).collect();
    let min = (0..len)
        .filter(|&i| m.active(i))
        .map(|i| herm[i].min_eig_rel(m.ref_metric(i)))
        .fold(f64::INFINITY, f64::min);
    if !(min > TOL_METRIC) {
        return Err(SptError::DegenerateMetric { min });
    }
    let weight = (0..len)
        .map(|i| if m.active(i) { m.ref_weight(i) * density[i] / m.ref_metric(i).det() } else { 0.0 })
        .collect();
    Ok(Metric { density, weight })
}

fn weighted_sum(w: &[f64], f: &[f64]) -> f64 {
    exec::sum(w.len(), |i| if w[i] != 0.0 { w[i] * f[i] } else { 0.0 })
}

/// Transverse scalar curvature of `ω_u` and its average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    /// `R^T` per node, also off the quadrature support where the stencil
    /// fits (0 elsewhere).
    pub values: Vec<f64>,
    /// `Vol⁻¹ ∫ R^T ω_u^n ∧ η`.
    pub mean: f64,
    /// Cohomological value of the average (`2π` on the sphere, `0` on the torus).
    pub cohomological: f64,
    /// Volume of `ω_u`.
    pub volume: f64,
}

/// Nodes whose curvature stencil (two fourth-order stencils deep) fits.
fn deep(ch: &SphereCharts, i: usize) -> bool {
    let n = ch.points;
    let (ix, iy) = ((i % (n * n)) / n, i % n);
    ix >= 4 && iy >= 4 && ix + 4 < n && iy + 4 < n
}

/// `R^T = −tr(g_u^{−1} ∂∂̄ log det g_u)`.
///
/// On the sphere the reference part is analytic: with `L = log(ρ_u/ρ)`,
/// `R^T = (2πρ − ¼ΔL)/ρ_u`. On the torus the whole expression is differenced.
pub fn scalar_curvature(u: &BasicFunction) -> Result<Curvature> {
    let m = u.model();
    let met = metric(u)?;
    let len = m.len();
    let values: Vec<f64> = if let Some(ch) = m.sphere_charts() {
        let fs: Vec<f64> = ch.z.iter().map(|&(x, y)| fubini_study_density(x, y)).collect();
        let log_ratio: Vec<f64> =
            (0..len).map(|i| if ch.interior[i] { (met.density[i] / fs[i]).ln() } else { 0.0 }).collect();
        (0..len)
            .map(|i| {
                if !deep(ch, i) {
                    return 0.0;
                }
                let ric = 2.0 * PI * fs[i] - 0.25 * hessian::sphere_laplacian(ch, &log_ratio, i);
                ric / met.density[i]
            })
            .collect()
    } else if let Some(nb) = m.neighbors() {
        let v = u.values();
        let log_det: Vec<f64> = met.density.iter().map(|d| d.ln()).collect();
        exec::collect(len, |i| {
            let g = hessian::metric_at(m, v, i);
            let ric = hessian::torus_at(&m.grid, nb, m.n, &log_det, i);
            -g.adj().trace_prod(&ric) / g.det()
        })
    } else {
        return Err(SptError::Unsupported("no transverse grid on this model".into()));
    };
    let volume = met.weight.iter().sum::<f64>();
    let mean = weighted_sum(&met.weight, &values) / volume;
    let cohomological = if m.is_sphere() { 2.0 * PI } else { 0.0 };
    Ok(Curvature { values, mean, cohomological, volume })
}

/// Complex potential `θ^u_X = θ_X − i f u_z` per node (0 off the stencil).
pub fn field_potential(kind: FieldKind, u: &BasicFunction) -> Result<Vec<Complex64>> {
    let (m, ch) = sphere_parts(u)?;
    let per = m.grid.len();
    let v = u.values();
    Ok((0..m.len())
        .map(|i| {
            if !ch.interior[i] {
                return Complex64::new(0.0, 0.0);
            }
            let p = m.sphere_point(i).expect("sphere node");
            let theta = kind.reference_potential(p);
            let (a, b) = kind.vector(i >= per, ch.z[i].0, ch.z[i].1);
            let (ux, uy) = hessian::sphere_gradient(ch, v, i);
            let f_uz = Complex64::new(a, b) * Complex64::new(0.5 * ux, -0.5 * uy);
            theta - Complex64::i() * f_uz
        })
        .collect())
}

/// Cubic Lagrange weights at offsets −1, 0, 1, 2 for fractional position `t`.
fn lagrange4(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Bicubic interpolation of chart `c` values at chart point `(x, y)`.
fn interpolate(ch: &SphereCharts, f: &[f64], c: usize, x: f64, y: f64) -> f64 {
    let n = ch.points;
    let half = 0.5 * ch.h * (n - 1) as f64;
    let fx = (x + half) / ch.h;
    let fy = (y + half) / ch.h;
    let (ix, iy) = (fx.floor() as isize, fy.floor() as isize);
    let (wx, wy) = (lagrange4(fx - ix as f64), lagrange4(fy - iy as f64));
    let mut acc = 0.0;
    for (a, wa) in wx.iter().enumerate() {
        for (b, wb) in wy.iter().enumerate() {
            let px = (ix - 1 + a as isize) as usize;
            let py = (iy - 1 + b as isize) as usize;
            acc += wa * wb * f[c * n * n + px * n + py];
        }
    }
    acc
}

/// Solution of `¼Δf = rhs` on the projective line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonSolution {
    /// Solution per node, normalized to zero mean against `weights`.
    pub values: Vec<f64>,
    pub schwarz_sweeps: usize,
    pub cg_iterations: usize,
    /// Largest Schwarz update in the last sweep.
    pub last_change: f64,
}

/// Solve `¼Δf = rhs` where `rhs` is a density relative to `dx dy` per chart.
///
/// Alternating Schwarz iteration between the two charts: each chart solves
/// a Dirichlet problem for the fourth-order Laplacian on the disc
/// `|z| < 1.6` by conjugate gradients, with boundary values interpolated
/// bicubically from the other chart. The result has zero mean against
/// `weights`.
pub fn poisson_solve(model: &SasakiModel, rhs: &[f64], weights: &[f64]) -> Result<PoissonSolution> {
    let ch = model.sphere_charts().ok_or_else(|| SptError::Unsupported("Poisson solve needs the sphere quotient".into()))?;
    let n = ch.points;
    let per = n * n;
    let h = ch.h;
    let total = weights.iter().sum::<f64>();
    let mean = {
        let mut acc = exec::Neumaier::default();
        for i in 0..model.len() {
            if model.active(i) {
                acc.add(ch.chi[i] * rhs[i] * h * h);
            }
        }
        acc.value()
    };
    if mean.abs() > TOL_POISSON_MEAN {
        return Err(SptError::PoissonNotSolvable { mean });
    }
    let r2 = |i: usize| {
        let (x, y) = ch.z[i % per];
        x * x + y * y
    };
    // Unknowns: chart nodes inside the Schwarz disc.
    let unknown: Vec<bool> = (0..per).map(|i| r2(i) < SCHWARZ_RADIUS * SCHWARZ_RADIUS).collect();
    let index: Vec<usize> = (0..per).filter(|&i| unknown[i]).collect();
    let mut slot = vec![usize::MAX; per];
    for (k, &i) in index.iter().enumerate() {
        slot[i] = k;
    }
    // Dirichlet ring: stencil neighbours of unknowns that are not unknown.
    let offsets: [isize; 8] = [-2, -1, 1, 2, -2 * n as isize, -(n as isize), n as isize, 2 * n as isize];
    let mut ring: Vec<usize> = Vec::new();
    let mut in_ring = vec![false; per];
    for &i in &index {
        for o in offsets {
            let j = (i as isize + o) as usize;
            if !unknown[j] && !in_ring[j] {
                in_ring[j] = true;
                ring.push(j);
            }
        }
    }
    let c4 = [-1.0 / 12.0, 16.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
    let stencil = [-2isize, -1, 1, 2];
    let scale = 0.25 / (h * h);
    // A = −¼Δ_h restricted to unknowns (symmetric positive definite).
    let apply = |x: &[f64], y: &mut [f64]| {
        for (k, &i) in index.iter().enumerate() {
            let mut acc = 2.0 * 30.0 / 12.0 * x[k];
            for (c, s) in c4.iter().zip(stencil) {
                for step in [1isize, n as isize] {
                    let j = (i as isize + s * step) as usize;
                    if unknown[j] {
                        acc -= c * x[slot[j]];
                    }
                }
            }
            y[k] = scale * acc;
        }
    };
    let mut f = vec![0.0; model.len()];
    let mut sol = [vec![0.0; index.len()], vec![0.0; index.len()]];
    let mut cg_iterations = 0;
    let mut last_change = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < SCHWARZ_MAX {
        sweeps += 1;
        let mut change: f64 = 0.0;
        for c in 0..2 {
            let other = 1 - c;
            for &j in &ring {
                let (x, y) = ch.z[j];
                let q = x * x + y * y;
                f[c * per + j] = interpolate(ch, &f, other, x / q, -y / q);
            }
            // b = −rhs + boundary coupling.
            let b: Vec<f64> = index
                .iter()
                .map(|&i| {
                    let mut acc = -rhs[c * per + i];
                    for (cc, s) in c4.iter().zip(stencil) {
                        for step in [1isize, n as isize] {
                            let j = (i as isize + s * step) as usize;
                            if !unknown[j] {
                                acc += scale * cc * f[c * per + j];
                            }
                        }
                    }
                    acc
                })
                .collect();
            let x = &mut sol[c];
            let stats = linalg::cg(
                |v: &[f64], out: &mut [f64]| apply(v, out),
                |r: &[f64], z: &mut [f64]| z.copy_from_slice(r),
                &b,
                x,
                TOL_CG,
                20 * n,
            );
            cg_iterations += stats.iterations;
            // The discrete problem is compatible only up to quadrature error,
            // so the additive constant may drift; gauge it out every solve.
            let shift = x.iter().sum::<f64>() / x.len() as f64;
            for (k, &i) in index.iter().enumerate() {
                x[k] -= shift;
                change = change.max((f[c * per + i] - x[k]).abs());
                f[c * per + i] = x[k];
            }
        }
        last_change = change;
        if change < SCHWARZ_TOL {
            break;
        }
    }
    let shift = if total > 0.0 { weighted_sum(weights, &f) / total } else { 0.0 };
    for v in &mut f {
        *v -= shift;
    }
    Ok(PoissonSolution { values: f, schwarz_sweeps: sweeps, cg_iterations, last_change })
}

/// Everything the canonical-metric quantities share for one potential.
#[derive(Debug, Clone)]
pub struct CanonicalData {
    pub curvature: Curvature,
    /// Quadrature weights of `ω_u ∧ η`.
    pub weights: Vec<f64>,
    /// `f` with `Δ_u f = R^T − R̄`.
    pub ricci_potential: PoissonSolution,
    potentials: Vec<(FieldKind, Vec<Complex64>)>,
}

impl CanonicalData {
    pub fn new(u: &BasicFunction) -> Result<CanonicalData> {
        let (_, ch) = sphere_parts(u)?;
        let half = 0.5 * ch.h * (ch.points - 1) as f64;
        if half - 4.0 * ch.h < SCHWARZ_RADIUS + 2.0 * ch.h {
            return Err(SptError::BadGrid("sphere charts too coarse for the curvature Poisson solve (need ≥ 64 points)".into()));
        }
        let curvature = scalar_curvature(u)?;
        let met = metric(u)?;
        let m = u.model();
        // ¼Δf = ρ_u (R − R̄).
        let rhs: Vec<f64> = (0..m.len())
            .map(|i| if deep(ch, i) { met.density[i] * (curvature.values[i] - curvature.mean) } else { 0.0 })
            .collect();
        let ricci_potential = poisson_solve(m, &rhs, &met.weight)?;
        let mut potentials = Vec::new();
        for k in HolomorphicFieldBasis::standard().fields {
            potentials.push((k, field_potential(k, u)?));
        }
        Ok(CanonicalData { curvature, weights: met.weight, ricci_potential, potentials })
    }

    pub fn potential(&self, kind: FieldKind) -> &[Complex64] {
        &self.potentials.iter().find(|(k, _)| *k == kind).expect("standard basis").1
    }

    /// Complex `∫ θ^u_Y θ^u_Z ω_u ∧ η`.
    pub fn bilinear(&self, y: FieldKind, z: FieldKind) -> Complex64 {
        let (a, b) = (self.potential(y), self.potential(z));
        let w = &self.weights;
        let re = exec::sum(w.len(), |i| if w[i] != 0.0 { w[i] * (a[i] * b[i]).re } else { 0.0 });
        let im = exec::sum(w.len(), |i| if w[i] != 0.0 { w[i] * (a[i] * b[i]).im } else { 0.0 });
        Complex64::new(re, im)
    }

    pub fn volume(&self) -> f64 {
        self.curvature.volume
    }
}

/// Futaki value with its potential-form cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FutakiValue {
    /// `Re ∫ i X(f) ω_u ∧ η = ½ ∫ JY(f) ω_u ∧ η`.
    pub value: f64,
    /// `Re ∫ θ^u_X (R^T − R̄) ω_u ∧ η`, equal to `value` after integration by parts.
    pub potential_form: f64,
    /// Imaginary part of `∫ i X(f) ω_u ∧ η`.
    pub imaginary: f64,
}

fn futaki_from(u: &BasicFunction, data: &CanonicalData, kind: FieldKind) -> FutakiValue {
    let m = u.model();
    let ch = m.sphere_charts().expect("sphere model");
    let per = m.grid.len();
    let f = &data.ricci_potential.values;
    // i X(f) = i (a + ib) f_z with f_z = ½(f_x − i f_y).
    let (re, im): (Vec<f64>, Vec<f64>) = (0..m.len())
        .map(|i| {
            if !m.active(i) {
                return (0.0, 0.0);
            }
            let (a, b) = kind.vector(i >= per, ch.z[i].0, ch.z[i].1);
            let (fx, fy) = hessian::sphere_gradient(ch, f, i);
            let v = Complex64::i() * Complex64::new(a, b) * Complex64::new(0.5 * fx, -0.5 * fy);
            (v.re, v.im)
        })
        .unzip();
    let theta = data.potential(kind);
    let r = &data.curvature;
    let pf: Vec<f64> = (0..m.len()).map(|i| theta[i].re * (r.values[i] - r.mean)).collect();
    FutakiValue {
        value: weighted_sum(&data.weights, &re),
        potential_form: weighted_sum(&data.weights, &pf),
        imaginary: weighted_sum(&data.weights, &im),
    }
}

/// Sasaki–Futaki invariant of `Y` computed with the metric `ω_u`.
pub fn futaki(kind: FieldKind, u: &BasicFunction) -> Result<FutakiValue> {
    let data = CanonicalData::new(u)?;
    Ok(futaki_from(u, &data, kind))
}

/// Futaki–Mabuchi form `B(Y, Z) = ∫ θ^u_Y θ^u_Z ω_u ∧ η` (real part; the
/// imaginary part vanishes in exact arithmetic and is available from
/// [`CanonicalData::bilinear`]).
pub fn fm_bilinear(y: FieldKind, z: FieldKind, u: &BasicFunction) -> Result<f64> {
    let data = CanonicalData::new(u)?;
    Ok(data.bilinear(y, z).re)
}

/// Extremal field `V = Σ c_j Y_j` solving `F(Y_i) = B(Y_i, V)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalField {
    pub basis: HolomorphicFieldBasis,
    pub coefficients: Vec<f64>,
    pub futaki: Vec<f64>,
    pub gram: Vec<Vec<f64>>,
    pub condition: f64,
    /// `max_i |F(Y_i) − B(Y_i, V)|`.
    pub residual: f64,
}

impl ExtremalField {
    pub fn zero(basis: HolomorphicFieldBasis) -> ExtremalField {
        let k = basis.fields.len();
        ExtremalField {
            basis,
            coefficients: vec![0.0; k],
            futaki: vec![0.0; k],
            gram: vec![vec![0.0; k]; k],
            condition: 1.0,
            residual: 0.0,
        }
    }
}

/// Solve for the extremal field in the span of `basis`.
pub fn extremal_field(basis: &HolomorphicFieldBasis, u: &BasicFunction) -> Result<ExtremalField> {
    let data = CanonicalData::new(u)?;
    extremal_from(basis, u, &data)
}

fn extremal_from(basis: &HolomorphicFieldBasis, u: &BasicFunction, data: &CanonicalData) -> Result<ExtremalField> {
    let k = basis.fields.len();
    if k == 0 {
        return Err(SptError::InvalidArgument("empty basis".into()));
    }
    let gram: Vec<Vec<f64>> = basis
        .fields
        .iter()
        .map(|&a| basis.fields.iter().map(|&b| data.bilinear(a, b).re).collect())
        .collect();
    let eig = linalg::symmetric_eigenvalues(gram.clone());
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(SptError::SingularGram { cond: condition });
    }
    let futaki: Vec<f64> = basis.fields.iter().map(|&f| futaki_from(u, data, f).value).collect();
    let coefficients = linalg::dense_solve(gram.clone(), futaki.clone()).ok_or(SptError::SingularGram { cond: condition })?;
    let residual = (0..k)
        .map(|i| (futaki[i] - (0..k).map(|j| gram[i][j] * coefficients[j]).sum::<f64>()).abs())
        .fold(0.0, f64::max);
    Ok(ExtremalField { basis: basis.clone(), coefficients, futaki, gram, condition, residual })
}

/// Integrand `R^T − R̄ − θ^u_V` of the modified K-energy variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KIntegrand {
    pub values: Vec<f64>,
    /// `Vol⁻¹ ∫ values ω_u ∧ η`.
    pub mean: f64,
    /// Largest modulus over weighted nodes.
    pub sup: f64,
}

/// Modified K-energy integrand for `u` and an optional extremal field.
///
/// Seeded potentials are not invariant under `JV` in general, so this is
/// the pointwise integrand only; no variational identity is claimed.
pub fn modified_k_integrand(u: &BasicFunction, v: Option<&ExtremalField>) -> Result<KIntegrand> {
    let m = u.model();
    let r = scalar_curvature(u)?;
    let met = metric(u)?;
    let mut values: Vec<f64> = r.values.iter().map(|x| x - r.mean).collect();
    if let Some(field) = v {
        for (&kind, &c) in field.basis.fields.iter().zip(&field.coefficients) {
            if c == 0.0 {
                continue;
            }
            let theta = field_potential(kind, u)?;
            for (x, t) in values.iter_mut().zip(&theta) {
                *x -= c * t.re;
            }
        }
    }
    for i in 0..values.len() {
        if met.weight[i] == 0.0 {
            values[i] = 0.0;
        }
    }
    let mean = weighted_sum(&met.weight, &values) / r.volume;
    let sup = (0..values.len()).filter(|&i| m.active(i)).map(|i| values[i].abs()).fold(0.0, f64::max);
    Ok(KIntegrand { values, mean, sup })
}

/// Futaki values, Gram matrix and extremal field over one basis, computed
/// from a single curvature and Poisson solve.
pub fn canonical_table(basis: &HolomorphicFieldBasis, u: &BasicFunction) -> Result<(CanonicalData, ExtremalField)> {
    let data = CanonicalData::new(u)?;
    let ext = extremal_from(basis, u, &data)?;
    Ok((data, ext))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagrange_weights_partition_unity() {
        for t in [0.0, 0.3, 0.9] {
            let w = lagrange4(t);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert_eq!(lagrange4(0.0), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn hamiltonian_relation_holds_for_reference() {
        // θ_x = 2ρ Y^y and θ_y = −2ρ Y^x in chart 1 for every rotation.
        let (x, y) = (0.3, -0.7);
        let eps = 1e-6;
        let point = |x: f64, y: f64| {
            let r2 = x * x + y * y;
            [2.0 * x / (1.0 + r2), 2.0 * y / (1.0 + r2), (r2 - 1.0) / (r2 + 1.0)]
        };
        let rho = crate::geometry::model::fubini_study_density(x, y);
        for k in [FieldKind::RotX, FieldKind::RotY, FieldKind::RotZ] {
            let tx = (k.reference_potential(point(x + eps, y)) - k.reference_potential(point(x - eps, y))) / (2.0 * eps);
            let ty = (k.reference_potential(point(x, y + eps)) - k.reference_potential(point(x, y - eps))) / (2.0 * eps);
            let (yx, yy) = k.vector(false, x, y);
            assert!((tx - 2.0 * rho * yy).abs() < 1e-8, "{k:?}");
            assert!((ty + 2.0 * rho * yx).abs() < 1e-8, "{k:?}");
        }
    }
}
