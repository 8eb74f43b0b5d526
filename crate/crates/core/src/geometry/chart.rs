//! Holomorphic charts on the Kähler cone built from a local transverse
//! potential.
//!
//! In a foliation chart with coordinates `(r, x, z)` the Sasaki structure is
//! determined by a local potential `h(z, z̄)`: the contact form is
//! `dx − i Σ (h_j dz_j − h_j̄ dz̄_j)` and the cone complex structure sends
//! `r∂_r` to the Reeb field `∂_x`. The functions `w₀ = log r − h + i x` and
//! `w_j = z_j` are then holomorphic, which `cr_residual` verifies by finite
//! differences against the exact anti-holomorphic frame.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::linalg::Herm;

/// Real polynomial in the `2n` variables `x1, y1, …, xn, yn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPotential {
    pub n: usize,
    /// Monomials as (exponent per variable, coefficient).
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl LocalPotential {
    /// `Σ |z_j|² / 2`, the flat potential.
    pub fn flat(n: usize) -> LocalPotential {
        let mut terms = Vec::with_capacity(2 * n);
        for v in 0..2 * n {
            let mut e = vec![0; 2 * n];
            e[v] = 2;
            terms.push((e, 0.5));
        }
        LocalPotential { n, terms }
    }

    /// Flat potential plus a general real quadratic form with coefficients
    /// of size at most `amp`.
    pub fn seeded_quadratic(n: usize, seed: u64, amp: f64) -> LocalPotential {
        Self::seeded(n, seed, amp, 2..=2)
    }

    /// Flat potential plus random cubic and quartic monomials with
    /// coefficients of size at most `amp`.
    pub fn seeded_quartic(n: usize, seed: u64, amp: f64) -> LocalPotential {
        Self::seeded(n, seed, amp, 3..=4)
    }

    fn seeded(n: usize, seed: u64, amp: f64, degrees: std::ops::RangeInclusive<u32>) -> LocalPotential {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::flat(n);
        let vars = 2 * n;
        for e in monomials(vars, *degrees.end()) {
            let deg: u32 = e.iter().sum();
            if degrees.contains(&deg) {
                p.terms.push((e, rng.gen_range(-amp..=amp)));
            }
        }
        p
    }

    /// Value, or a first or second partial derivative when `axes` lists one
    /// or two variable indices.
    pub fn partial(&self, p: &[f64], axes: &[usize]) -> f64 {
        let mut total = 0.0;
        for (e, c) in &self.terms {
            let mut e = e.clone();
            let mut coef = *c;
            for &a in axes {
                if e[a] == 0 {
                    coef = 0.0;
                    break;
                }
                coef *= e[a] as f64;
                e[a] -= 1;
            }
            if coef == 0.0 {
                continue;
            }
            let mono: f64 = e.iter().zip(p).map(|(&k, &x)| x.powi(k as i32)).product();
            total += coef * mono;
        }
        total
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        self.partial(p, &[])
    }

    /// `∂h/∂z̄_j = ½(h_{x_j} + i h_{y_j})`.
    pub fn dzbar(&self, p: &[f64], j: usize) -> Complex64 {
        Complex64::new(0.5 * self.partial(p, &[2 * j]), 0.5 * self.partial(p, &[2 * j + 1]))
    }

    /// Complex Hessian `h_{jk̄}`.
    pub fn complex_hessian(&self, p: &[f64]) -> Herm {
        let d = |a: usize, b: usize| self.partial(p, &[a, b]);
        let entry = |j: usize, k: usize| {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            Complex64::new(0.25 * (d(xj, xk) + d(yj, yk)), 0.25 * (d(xj, yk) - d(yj, xk)))
        };
        match self.n {
            1 => Herm::scalar(entry(0, 0).re),
            _ => Herm::two(entry(0, 0).re, entry(1, 1).re, entry(0, 1)),
        }
    }
}

/// All exponent vectors in `vars` variables of total degree at most `max`.
fn monomials(vars: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..vars {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for k in 0..=max - used {
                let mut f = e.clone();
                f.push(k);
                next.push(f);
            }
        }
        out = next;
    }
    out
}

/// Ball in `C^n ≅ R^{2n}` on which a chart is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartDomain {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl ChartDomain {
    pub fn ball(n: usize, radius: f64) -> ChartDomain {
        ChartDomain { center: vec![0.0; 2 * n], radius }
    }

    /// Lattice points with `per_axis` samples per real axis, kept if inside
    /// the ball shrunk by `shrink`.
    pub fn lattice(&self, per_axis: usize, shrink: f64) -> Vec<Vec<f64>> {
        let vars = self.center.len();
        let r = self.radius * shrink;
        let step = if per_axis > 1 { 2.0 * r / (per_axis - 1) as f64 } else { 0.0 };
        let total = per_axis.pow(vars as u32);
        let mut pts = Vec::new();
        for mut idx in 0..total {
            let mut p = Vec::with_capacity(vars);
            for a in 0..vars {
                let k = idx % per_axis;
                idx /= per_axis;
                let off = if per_axis > 1 { -r + k as f64 * step } else { 0.0 };
                p.push(self.center[a] + off);
            }
            let d2: f64 = p.iter().zip(&self.center).map(|(x, c)| (x - c) * (x - c)).sum();
            if d2 <= r * r * (1.0 + 1e-12) {
                pts.push(p);
            }
        }
        pts
    }
}

/// Holomorphic chart `(r, x, z) ↦ (log r − h(z) + i x, z)` on the cone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeChart {
    pub potential: LocalPotential,
    pub domain: ChartDomain,
    /// Smallest eigenvalue of `h_{jk̄}` over the domain samples.
    pub margin: f64,
}

/// Samples per axis used to certify plurisubharmonicity of `h`.
fn margin_lattice(n: usize) -> usize {
    if n == 1 {
        41
    } else {
        11
    }
}

/// Build a cone chart, rejecting potentials that are not strictly
/// plurisubharmonic on the domain.
pub fn cone_chart(n: usize, h: LocalPotential, domain: ChartDomain) -> Result<ConeChart> {
    if !(1..=2).contains(&n) || h.n != n || domain.center.len() != 2 * n {
        return Err(SptError::InvalidArgument("chart dimension mismatch".into()));
    }
    if h.terms.iter().any(|(e, _)| e.len() != 2 * n) {
        return Err(SptError::InvalidArgument("monomial arity mismatch".into()));
    }
    if !(domain.radius > 0.0) {
        return Err(SptError::InvalidArgument("chart radius must be positive".into()));
    }
    let ident = Herm::identity(n);
    let margin = domain
        .lattice(margin_lattice(n), 1.0)
        .iter()
        .map(|p| h.complex_hessian(p).min_eig_rel(&ident))
        .fold(f64::INFINITY, f64::min);
    if !(margin > 0.0) {
        return Err(SptError::NotPlurisubharmonic { margin });
    }
    Ok(ConeChart { potential: h, domain, margin })
}

impl ConeChart {
    pub fn n(&self) -> usize {
        self.potential.n
    }

    /// Chart coordinates `[w₀, w₁, …, w_n]` at the cone point `(r, x, z)`,
    /// with `z` given as real pairs `x1, y1, …`.
    pub fn eval(&self, r: f64, x: f64, z: &[f64]) -> Vec<Complex64> {
        let mut w = Vec::with_capacity(self.n() + 1);
        w.push(Complex64::new(r.ln() - self.potential.value(z), x));
        for j in 0..self.n() {
            w.push(Complex64::new(z[2 * j], z[2 * j + 1]));
        }
        w
    }
}

/// Cauchy–Riemann defect at one finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrLevel {
    pub resolution: usize,
    pub step: f64,
    pub residual: f64,
}

/// Defects per refinement level and observed convergence orders between
/// consecutive levels (absent when both defects sit at round-off).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrTable {
    pub levels: Vec<CrLevel>,
    pub orders: Vec<Option<f64>>,
}

impl CrTable {
    /// Smallest observed order, ignoring round-off pairs.
    pub fn min_order(&self) -> Option<f64> {
        self.orders.iter().flatten().copied().reduce(f64::min)
    }

    pub fn max_residual(&self) -> f64 {
        self.levels.iter().map(|l| l.residual).fold(0.0, f64::max)
    }
}

/// Below this the defect is treated as round-off when computing orders.
const ROUNDOFF: f64 = 1e-12;

/// Finite-difference Cauchy–Riemann defect of the chart map.
///
/// At resolution `N` the step is `2·radius/N`. Anti-holomorphic vector fields
/// of the cone are `∂_s + i∂_x` (with `s = log r`) and
/// `∂_{z̄_j} − i h_{z̄_j} ∂_x`; both are applied to every chart coordinate with
/// central differences, `h_{z̄_j}` taken exactly. The defect is the largest
/// modulus over a fixed probe set.
pub fn cr_residual(chart: &ConeChart, resolutions: &[usize]) -> CrTable {
    let n = chart.n();
    let probes = chart.domain.lattice(if n == 1 { 7 } else { 3 }, 0.8);
    let radii: [f64; 3] = [0.5, 1.0, 2.0];
    let fibre = [0.0, 1.0];
    let mut levels = Vec::with_capacity(resolutions.len());
    for &res in resolutions {
        let d = 2.0 * chart.domain.radius / res.max(1) as f64;
        let mut worst: f64 = 0.0;
        for z in &probes {
            for &r in &radii {
                let s = r.ln();
                for &x in &fibre {
                    let at = |ds: f64, dx: f64, dz: Option<(usize, f64)>| {
                        let mut zz = z.clone();
                        if let Some((a, v)) = dz {
                            zz[a] += v;
                        }
                        chart.eval((s + ds).exp(), x + dx, &zz)
                    };
                    let central = |p: Vec<Complex64>, m: Vec<Complex64>| -> Vec<Complex64> {
                        p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * d)).collect()
                    };
                    let d_s = central(at(d, 0.0, None), at(-d, 0.0, None));
                    let d_x = central(at(0.0, d, None), at(0.0, -d, None));
                    let i = Complex64::i();
                    for (a, b) in d_s.iter().zip(&d_x) {
                        worst = worst.max((a + i * b).norm());
                    }
                    for j in 0..n {
                        let d_xj = central(at(0.0, 0.0, Some((2 * j, d))), at(0.0, 0.0, Some((2 * j, -d))));
                        let d_yj = central(at(0.0, 0.0, Some((2 * j + 1, d))), at(0.0, 0.0, Some((2 * j + 1, -d))));
                        let hz = chart.potential.dzbar(z, j);
                        for k in 0..=n {
                            let v = 0.5 * (d_xj[k] + i * d_yj[k]) - i * hz * d_x[k];
                            worst = worst.max(v.norm());
                        }
                    }
                }
            }
        }
        levels.push(CrLevel { resolution: res, step: d, residual: worst });
    }
    let orders = levels
        .windows(2)
        .map(|w| {
            if w[0].residual <= ROUNDOFF || w[1].residual <= ROUNDOFF {
                None
            } else {
                Some((w[0].residual / w[1].residual).ln() / (w[0].step / w[1].step).ln())
            }
        })
        .collect();
    CrTable { levels, orders }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count() {
        // Degree ≤ 4 in 2 variables: C(6, 2) = 15.
        assert_eq!(monomials(2, 4).len(), 15);
    }

    #[test]
    fn flat_hessian_is_half() {
        let h = LocalPotential::flat(2);
        let m = h.complex_hessian(&[0.1, 0.2, -0.3, 0.4]);
        assert!((m.a - 0.5).abs() < 1e-15 && (m.d - 0.5).abs() < 1e-15 && m.b.norm() < 1e-15);
    }

    #[test]
    fn concave_potential_rejected() {
        let h = LocalPotential { n: 1, terms: vec![(vec![2, 0], -1.0)] };
        assert!(matches!(cone_chart(1, h, ChartDomain::ball(1, 0.5)), Err(SptError::NotPlurisubharmonic { .. })));
    }
}
