//! Sasaki models: the flat torus, the quasi-regular sphere quotient and the
//! weighted contact 3-sphere.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::geometry::grid::{GridSpec, Neighbors};
use crate::hessian;
use crate::linalg::Herm;

/// Which substrate a model represents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Regular Sasaki manifold over the flat complex torus of dimension `n`.
    Torus { n: usize },
    /// Quasi-regular Sasaki manifold over the projective line, sampled on
    /// two stereographic charts.
    SphereQuotient,
    /// The 3-sphere with Reeb field `a1 ∂θ1 + a2 ∂θ2`.
    WeightedContactS3 { a1: f64, a2: f64 },
}

/// Half-width of the square chart domains of the sphere model.
pub const SPHERE_CHART_HALF: f64 = 2.0;
/// Partition-of-unity transition: chart 1 weight falls from 1 to 0 as
/// `log|z|` goes from `-SPHERE_BLEND` to `SPHERE_BLEND`.
pub const SPHERE_BLEND: f64 = 0.405_465_108_108_164_4; // ln 1.5

/// Chart geometry of the sphere model; node `c·N² + ix·N + iy` of chart `c`
/// sits at `z = (−2 + ix·h) + i(−2 + iy·h)`.
#[derive(Debug, Clone)]
pub struct SphereCharts {
    pub points: usize,
    pub h: f64,
    /// Complex chart coordinate per node.
    pub z: Vec<(f64, f64)>,
    /// Partition-of-unity weight per node.
    pub chi: Vec<f64>,
    /// Nodes where the fourth-order stencils fit inside the chart.
    pub interior: Vec<bool>,
}

/// A computable Sasaki substrate with its reference transverse data.
#[derive(Debug, Clone)]
pub struct SasakiModel {
    pub kind: ModelKind,
    pub n: usize,
    pub grid: GridSpec,
    pub reeb_length: f64,
    reference_potential: Option<Vec<f64>>,
    ref_metric: Vec<Herm>,
    ref_weight: Vec<f64>,
    volume: f64,
    margin: f64,
    neighbors: Option<Neighbors>,
    sphere: Option<SphereCharts>,
}

fn smoothstep(s: f64) -> f64 {
    // C^∞ transition from 1 (s ≤ 0) to 0 (s ≥ 1).
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = f(1.0 - s);
    a / (a + f(s))
}

/// Partition-of-unity weight of chart 1 at `|z|`.
pub fn sphere_chart_weight(abs_z: f64) -> f64 {
    if abs_z <= 0.0 {
        return 1.0;
    }
    smoothstep((abs_z.ln() + SPHERE_BLEND) / (2.0 * SPHERE_BLEND))
}

/// Fubini–Study density `1/(π(1+|z|²)²)` (unit total mass).
pub fn fubini_study_density(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    1.0 / (std::f64::consts::PI * (1.0 + r2) * (1.0 + r2))
}

impl SasakiModel {
    /// Flat torus model of dimension `n` with `points` samples per real axis.
    pub fn torus(n: usize, points: usize) -> Result<Arc<SasakiModel>> {
        build_model(ModelKind::Torus { n }, GridSpec::torus(n, points), None)
    }

    /// Sphere quotient with `points` nodes per chart axis.
    pub fn sphere(points: usize) -> Result<Arc<SasakiModel>> {
        build_model(ModelKind::SphereQuotient, GridSpec::square(points, SPHERE_CHART_HALF), None)
    }

    /// Number of samples of a basic function on this model.
    pub fn len(&self) -> usize {
        match self.kind {
            ModelKind::SphereQuotient => 2 * self.grid.len(),
            _ => self.grid.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Shape written to grid files.
    pub fn file_dims(&self) -> Vec<usize> {
        match self.kind {
            ModelKind::SphereQuotient => {
                let mut d = vec![2];
                d.extend(&self.grid.dims);
                d
            }
            _ => self.grid.dims.clone(),
        }
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Smallest eigenvalue of the reference form relative to the flat
    /// (or Fubini–Study) background.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.kind, ModelKind::Torus { .. })
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self.kind, ModelKind::SphereQuotient)
    }

    pub fn reference_potential(&self) -> Option<&[f64]> {
        self.reference_potential.as_deref()
    }

    /// Reference transverse metric at node `i` in background coordinates.
    #[inline]
    pub fn ref_metric(&self, i: usize) -> &Herm {
        &self.ref_metric[i]
    }

    /// Quadrature weight of `(ω^T)^n ∧ η` at node `i`.
    #[inline]
    pub fn ref_weight(&self, i: usize) -> f64 {
        self.ref_weight[i]
    }

    pub fn ref_weights(&self) -> &[f64] {
        &self.ref_weight
    }

    pub fn neighbors(&self) -> Option<&Neighbors> {
        self.neighbors.as_ref()
    }

    pub fn sphere_charts(&self) -> Option<&SphereCharts> {
        self.sphere.as_ref()
    }

    /// Whether node `i` carries quadrature weight and a valid Hessian.
    #[inline]
    pub fn active(&self, i: usize) -> bool {
        match &self.sphere {
            Some(s) => s.interior[i] && s.chi[i] > 0.0,
            None => true,
        }
    }

    /// Background coordinates of node `i`: torus `(x1, y1, …)`, sphere `(x, y)`
    /// in the node's own chart.
    pub fn coords(&self, i: usize) -> Vec<f64> {
        match &self.sphere {
            Some(s) => vec![s.z[i].0, s.z[i].1],
            None => (0..self.grid.axes())
                .map(|a| self.grid.coord(i, a) as f64 * self.grid.spacing[a])
                .collect(),
        }
    }

    /// Point on the unit sphere in `R³` represented by node `i` of the
    /// sphere model (inverse stereographic projection; chart 2 uses `1/z`).
    pub fn sphere_point(&self, i: usize) -> Option<[f64; 3]> {
        let s = self.sphere.as_ref()?;
        let (x, y) = s.z[i];
        let (x, y) = if i >= self.grid.len() {
            let r2 = x * x + y * y;
            if r2 == 0.0 {
                return Some([0.0, 0.0, 1.0]);
            }
            (x / r2, -y / r2)
        } else {
            (x, y)
        };
        let r2 = x * x + y * y;
        Some([2.0 * x / (1.0 + r2), 2.0 * y / (1.0 + r2), (r2 - 1.0) / (r2 + 1.0)])
    }

    /// Evaluate a function of background coordinates at every node.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        exec::collect(self.len(), |i| f(&self.coords(i)))
    }
}

/// Construct a model, computing its reference metric, volume and margin.
///
/// `psi0` is an optional smooth perturbation of the reference potential,
/// sampled on the model grid.
pub fn build_model(kind: ModelKind, grid: GridSpec, psi0: Option<Vec<f64>>) -> Result<Arc<SasakiModel>> {
    match kind {
        ModelKind::Torus { n } => build_torus(n, grid, psi0),
        ModelKind::SphereQuotient => build_sphere(grid, psi0),
        ModelKind::WeightedContactS3 { a1, a2 } => build_s3(a1, a2, grid),
    }
}

fn build_torus(n: usize, grid: GridSpec, psi0: Option<Vec<f64>>) -> Result<Arc<SasakiModel>> {
    if !(1..=2).contains(&n) {
        return Err(SptError::BadGrid(format!("torus dimension {n} unsupported (1 or 2)")));
    }
    grid.validate()?;
    if grid.axes() != 2 * n || grid.periodic.iter().any(|p| !p) {
        return Err(SptError::BadGrid("torus needs 2n periodic axes".into()));
    }
    let len = grid.len();
    let nb = Neighbors::periodic(&grid);
    if let Some(p) = &psi0 {
        if p.len() != len {
            return Err(SptError::BadGrid(format!("reference potential has {} samples, grid {}", p.len(), len)));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(SptError::BadGrid("reference potential is not finite".into()));
        }
    }
    let ident = Herm::identity(n);
    let ref_metric: Vec<Herm> = match &psi0 {
        Some(p) => (0..len).map(|i| ident.add(&hessian::torus_at(&grid, &nb, n, p, i))).collect(),
        None => vec![ident; len],
    };
    let margin = exec::min(len, |i| ref_metric[i].min_eig_rel(&ident));
    if !(margin > 0.0) {
        return Err(SptError::NonPositiveReference { margin });
    }
    let cell = grid.cell();
    let reeb_length = 1.0;
    let ref_weight: Vec<f64> = exec::collect(len, |i| ref_metric[i].det() * cell * reeb_length);
    let volume = exec::sum(len, |i| ref_weight[i]);
    Ok(Arc::new(SasakiModel {
        kind: ModelKind::Torus { n },
        n,
        grid,
        reeb_length,
        reference_potential: psi0,
        ref_metric,
        ref_weight,
        volume,
        margin,
        neighbors: Some(nb),
        sphere: None,
    }))
}

fn build_sphere(grid: GridSpec, psi0: Option<Vec<f64>>) -> Result<Arc<SasakiModel>> {
    grid.validate()?;
    if grid.axes() != 2 || grid.dims[0] != grid.dims[1] {
        return Err(SptError::BadGrid("sphere charts need square 2-axis grids".into()));
    }
    let pts = grid.dims[0];
    let h = grid.spacing[0];
    let half = 0.5 * h * (pts - 1) as f64;
    if half < 1.5 + 2.0 * h {
        return Err(SptError::BadGrid("chart square too small to hold the blending annulus".into()));
    }
    let per = pts * pts;
    let len = 2 * per;
    let mut z = Vec::with_capacity(len);
    let mut chi = Vec::with_capacity(len);
    let mut interior = Vec::with_capacity(len);
    for _chart in 0..2 {
        for ix in 0..pts {
            for iy in 0..pts {
                let x = -half + ix as f64 * h;
                let y = -half + iy as f64 * h;
                z.push((x, y));
                let w1 = sphere_chart_weight((x * x + y * y).sqrt());
                // Chart 2 sits at w = 1/z; its weight 1 − w1(1/|w|) equals w1(|w|).
                chi.push(w1);
                interior.push(ix >= 2 && iy >= 2 && ix + 2 < pts && iy + 2 < pts);
            }
        }
    }
    let charts = SphereCharts { points: pts, h, z, chi, interior };
    if let Some(p) = &psi0 {
        if p.len() != len {
            return Err(SptError::BadGrid("reference potential size mismatch".into()));
        }
    }
    let fs: Vec<Herm> = (0..len).map(|i| Herm::scalar(fubini_study_density(charts.z[i].0, charts.z[i].1))).collect();
    let ref_metric: Vec<Herm> = match &psi0 {
        Some(p) => (0..len)
            .map(|i| {
                if charts.interior[i] {
                    fs[i].add(&hessian::sphere_at(&charts, p, i))
                } else {
                    fs[i]
                }
            })
            .collect(),
        None => fs.clone(),
    };
    let active = |i: usize| charts.interior[i] && charts.chi[i] > 0.0;
    let margin = exec::min(len, |i| if active(i) { ref_metric[i].a / fs[i].a } else { f64::INFINITY });
    if !(margin > 0.0) {
        return Err(SptError::NonPositiveReference { margin });
    }
    let reeb_length = 1.0;
    let ref_weight: Vec<f64> =
        (0..len).map(|i| if active(i) { charts.chi[i] * ref_metric[i].a * h * h * reeb_length } else { 0.0 }).collect();
    let volume = exec::sum(len, |i| ref_weight[i]);
    Ok(Arc::new(SasakiModel {
        kind: ModelKind::SphereQuotient,
        n: 1,
        grid,
        reeb_length,
        reference_potential: psi0,
        ref_metric,
        ref_weight,
        volume,
        margin,
        neighbors: None,
        sphere: Some(charts),
    }))
}

fn build_s3(a1: f64, a2: f64, grid: GridSpec) -> Result<Arc<SasakiModel>> {
    grid.validate()?;
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(SptError::NonPositiveReference { margin: a1.min(a2) });
    }
    // Torus-invariant volume density sin(s)cos(s)/(a1 cos² s + a2 sin² s)²
    // on the Hopf angle s ∈ [0, π/2]; composite Simpson rule.
    let m = 64 * grid.dims[0];
    let hs = std::f64::consts::FRAC_PI_2 / m as f64;
    let dens = |s: f64| {
        let (sn, cs) = s.sin_cos();
        let f = a1 * cs * cs + a2 * sn * sn;
        sn * cs / (f * f)
    };
    let mut acc = exec::Neumaier::default();
    for k in 0..=m {
        let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * dens(k as f64 * hs));
    }
    let reeb_length = 1.0;
    let two_pi = 2.0 * std::f64::consts::PI;
    let volume = acc.value() * hs / 3.0 * two_pi * two_pi * reeb_length;
    let margin = a1.min(a2) / a1.max(a2);
    Ok(Arc::new(SasakiModel {
        kind: ModelKind::WeightedContactS3 { a1, a2 },
        n: 1,
        grid,
        reeb_length,
        reference_potential: None,
        ref_metric: Vec::new(),
        ref_weight: Vec::new(),
        volume,
        margin,
        neighbors: None,
        sphere: None,
    }))
}
