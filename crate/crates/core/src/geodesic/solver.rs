//! Space-time Newton solver for the ε-regularized geodesic equation
//!
//! `(φ̈ − |∂φ̇|²_{ω_φ}) ω_φ^n ∧ η = ε (ω^T)^n ∧ η`
//!
//! on `m + 1` equally spaced time slices with Dirichlet endpoints. In matrix
//! form the residual at an interior node is
//! `F = det(G)·φ̈ − aᴴ adj(G) a − ε det(G_ref)`, normalized by `det(G_ref)`,
//! where `G = G_ref + H(φ)` and `a = ∂̄φ̇`.
//!
//! For `n = 1` the gradient term `|∂̄φ̇|²` is discretized as
//! `⅛ Σ_axes [(D⁺φ̇)² + (D⁻φ̇)²]`. This is the form that is adjoint to the
//! five-point Laplacian under summation by parts, so the discrete
//! `L²(ω_φ)` speed of an exact semi-discrete geodesic is conserved.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};
use crate::exec;
use crate::field::BasicFunction;
use crate::geometry::SasakiModel;
use crate::hessian;
use crate::linalg::{self, Herm};
use crate::psh;
use crate::spectral::{complex_direction_symbol, Spectral};

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicOptions {
    /// Number of time intervals.
    pub m: usize,
    /// Target sup-norm of the normalized residual.
    pub tol: f64,
    pub max_newton: usize,
    pub max_krylov: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions { m: 16, tol: 1e-8, max_newton: 60, max_krylov: 400 }
    }
}

/// Time-sliced solution with Dirichlet endpoints.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub model: Arc<SasakiModel>,
    /// `m + 1` slices, `slices[0] = u₀`, `slices[m] = u₁`.
    pub slices: Vec<Vec<f64>>,
    pub eps: f64,
    pub residual: f64,
    pub newton_iterations: usize,
    pub krylov_iterations: usize,
    pub endpoint_labels: (String, String),
    /// Blend weight of the reference used to nudge degenerate endpoints.
    pub nudge: f64,
}

impl GeodesicPath {
    pub fn m(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.m() as f64
    }

    pub fn slice(&self, j: usize) -> BasicFunction {
        BasicFunction::new(&self.model, self.slices[j].clone()).expect("slice matches model")
    }

    /// Time derivative at slice `j`: central differences inside, fourth-order
    /// one-sided differences at the endpoints.
    pub fn velocity(&self, j: usize) -> Vec<f64> {
        let m = self.m();
        let dt = self.dt();
        let s = &self.slices;
        let len = s[0].len();
        if j == 0 {
            // −25/12, 4, −3, 4/3, −1/4
            exec::collect(len, |i| {
                (-25.0 / 12.0 * s[0][i] + 4.0 * s[1][i] - 3.0 * s[2][i] + 4.0 / 3.0 * s[3][i] - 0.25 * s[4][i]) / dt
            })
        } else if j == m {
            exec::collect(len, |i| {
                (25.0 / 12.0 * s[m][i] - 4.0 * s[m - 1][i] + 3.0 * s[m - 2][i] - 4.0 / 3.0 * s[m - 3][i]
                    + 0.25 * s[m - 4][i])
                    / dt
            })
        } else {
            exec::collect(len, |i| (s[j + 1][i] - s[j - 1][i]) / (2.0 * dt))
        }
    }

    /// Minimum over interior nodes of the discrete second time difference.
    pub fn min_second_difference(&self) -> f64 {
        let m = self.m();
        let dt2 = self.dt() * self.dt();
        (1..m)
            .map(|j| {
                let s = &self.slices;
                exec::min(s[0].len(), |i| (s[j + 1][i] - 2.0 * s[j][i] + s[j - 1][i]) / dt2)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy)]
struct NodeState {
    g: Herm,
    adj: Herm,
    det: f64,
    phidd: f64,
    a: [Complex64; 2],
    /// One-sided differences of φ̇ (forward x, forward y, backward x, backward y), `n = 1`.
    d1: [f64; 4],
    /// Value of the gradient term `aᴴ adj(G) a`.
    q: f64,
    inv_ref: f64,
}

/// One-sided differences `[D⁺x, D⁺y, D⁻x, D⁻y]` of `next − prev` scaled by `s`.
#[inline]
fn one_sided(model: &SasakiModel, next: &[f64], prev: &[f64], s: f64, i: usize) -> [f64; 4] {
    let nb = model.neighbors().expect("torus");
    let h = &model.grid.spacing;
    let v = |k: usize| (next[k] - prev[k]) * s;
    let c = v(i);
    [
        (v(nb.p(0, i)) - c) / h[0],
        (v(nb.p(1, i)) - c) / h[1],
        (c - v(nb.m(0, i))) / h[0],
        (c - v(nb.m(1, i))) / h[1],
    ]
}

#[inline]
fn quad_one_sided(d: &[f64; 4]) -> f64 {
    0.125 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3])
}

struct Problem<'a> {
    model: &'a SasakiModel,
    n: usize,
    m: usize,
    len: usize,
    dt: f64,
    eps: f64,
    u0: &'a [f64],
    u1: &'a [f64],
}

impl<'a> Problem<'a> {
    fn slice<'b>(&'b self, x: &'b [f64], j: usize) -> &'b [f64] {
        if j == 0 {
            self.u0
        } else if j == self.m {
            self.u1
        } else {
            &x[(j - 1) * self.len..j * self.len]
        }
    }

    fn state_at(&self, x: &[f64], j: usize, i: usize) -> NodeState {
        let model = self.model;
        let nb = model.neighbors().expect("torus");
        let (prev, cur, next) = (self.slice(x, j - 1), self.slice(x, j), self.slice(x, j + 1));
        let g = model.ref_metric(i).add(&hessian::torus_at(&model.grid, nb, self.n, cur, i));
        let phidd = (next[i] - 2.0 * cur[i] + prev[i]) / (self.dt * self.dt);
        // ∂̄ of the central velocity, assembled from the two neighbours.
        let ap = hessian::dbar_at(&model.grid, nb, self.n, next, i);
        let am = hessian::dbar_at(&model.grid, nb, self.n, prev, i);
        let s = 1.0 / (2.0 * self.dt);
        let a = [(ap[0] - am[0]) * s, (ap[1] - am[1]) * s];
        let adj = g.adj();
        let (d1, q) = if self.n == 1 {
            let d1 = one_sided(model, next, prev, s, i);
            (d1, quad_one_sided(&d1))
        } else {
            ([0.0; 4], adj.quad(&a))
        };
        NodeState { g, adj, det: g.det(), phidd, a, d1, q, inv_ref: 1.0 / model.ref_metric(i).det() }
    }

    fn residual_node(&self, st: &NodeState) -> f64 {
        (st.det * st.phidd - st.q) * st.inv_ref - self.eps
    }

    fn states(&self, x: &[f64]) -> Vec<NodeState> {
        let mut out = Vec::with_capacity((self.m - 1) * self.len);
        for j in 1..self.m {
            for i in 0..self.len {
                out.push(self.state_at(x, j, i));
            }
        }
        out
    }

    /// Residual and admissibility (`G > 0` and positive complexified Hessian).
    fn residual(&self, x: &[f64], out: &mut [f64]) -> bool {
        let len = self.len;
        exec::for_each_chunk(out, len, |jj, chunk| {
            let j = jj + 1;
            for (i, o) in chunk.iter_mut().enumerate() {
                let st = self.state_at(x, j, i);
                let r = self.residual_node(&st);
                let ok = st.g.min_eig_rel(self.model.ref_metric(i)) > 0.0 && r + self.eps > 0.0;
                *o = if ok { r } else { f64::NAN };
            }
        });
        out.iter().all(|v| v.is_finite())
    }

    fn jacobian_apply(&self, states: &[NodeState], v: &[f64], out: &mut [f64]) {
        let len = self.len;
        let model = self.model;
        let nb = model.neighbors().expect("torus");
        let zero = vec![0.0; len];
        let dt = self.dt;
        let n = self.n;
        exec::for_each_chunk(out, len, |jj, chunk| {
            let j = jj + 1;
            let get = |k: usize| -> &[f64] {
                if k == 0 || k == self.m {
                    &zero
                } else {
                    &v[(k - 1) * len..k * len]
                }
            };
            let (prev, cur, next) = (get(j - 1), get(j), get(j + 1));
            for (i, o) in chunk.iter_mut().enumerate() {
                let st = &states[jj * len + i];
                let dh = hessian::torus_at(&model.grid, nb, n, cur, i);
                let ddd = (next[i] - 2.0 * cur[i] + prev[i]) / (dt * dt);
                let s = 1.0 / (2.0 * dt);
                let mut df = st.adj.trace_prod(&dh) * st.phidd + st.det * ddd;
                if n == 1 {
                    let dd = one_sided(model, next, prev, s, i);
                    df -= 0.25 * (st.d1[0] * dd[0] + st.d1[1] * dd[1] + st.d1[2] * dd[2] + st.d1[3] * dd[3]);
                } else {
                    let ap = hessian::dbar_at(&model.grid, nb, n, next, i);
                    let am = hessian::dbar_at(&model.grid, nb, n, prev, i);
                    let da = [(ap[0] - am[0]) * s, (ap[1] - am[1]) * s];
                    df -= 2.0 * st.adj.bilinear_re(&st.a, &da) + dh.adj().quad(&st.a);
                }
                *o = df * st.inv_ref;
            }
        });
    }
}

/// Frozen-coefficient preconditioner: per slice, the operator
/// `c_j ∂_tt + e_j Σ_k ¼Δ_{z_k}` with slice-averaged coefficients,
/// diagonalized by FFT in space and solved by tridiagonal sweeps in time.
struct Preconditioner {
    spectral: Spectral,
    lambda: Vec<f64>,
    c: Vec<f64>,
    e: Vec<f64>,
    m: usize,
    len: usize,
    dt: f64,
}

impl Preconditioner {
    fn new(p: &Problem, states: &[NodeState], spectral: Spectral, lambda: &[f64]) -> Preconditioner {
        let len = p.len;
        let mut c = Vec::with_capacity(p.m - 1);
        let mut e = Vec::with_capacity(p.m - 1);
        for jj in 0..p.m - 1 {
            let sl = &states[jj * len..(jj + 1) * len];
            let cj = exec::sum(len, |i| sl[i].det * sl[i].inv_ref) / len as f64;
            let ej = exec::sum(len, |i| sl[i].phidd * sl[i].adj.trace() * sl[i].inv_ref) / (len as f64 * p.n as f64);
            c.push(cj);
            e.push(ej.max(1e-3 * cj));
        }
        Preconditioner { spectral, lambda: lambda.to_vec(), c, e, m: p.m, len, dt: p.dt }
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let len = self.len;
        let k = self.m - 1;
        let spec: Vec<Vec<Complex64>> = (0..k).map(|j| self.spectral.forward(&r[j * len..(j + 1) * len])).collect();
        let dt2 = self.dt * self.dt;
        let mut lower = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut re = vec![0.0; k];
        let mut im = vec![0.0; k];
        let mut scratch = vec![0.0; k];
        let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); len]; k];
        for f in 0..len {
            for j in 0..k {
                lower[j] = self.c[j] / dt2;
                upper[j] = self.c[j] / dt2;
                diag[j] = -2.0 * self.c[j] / dt2 + self.e[j] * 0.25 * self.lambda[f];
                re[j] = spec[j][f].re;
                im[j] = spec[j][f].im;
            }
            linalg::thomas(&lower, &diag, &upper, &mut re, &mut scratch);
            linalg::thomas(&lower, &diag, &upper, &mut im, &mut scratch);
            for j in 0..k {
                out[j][f] = Complex64::new(re[j], im[j]);
            }
        }
        for (j, o) in out.into_iter().enumerate() {
            let back = self.spectral.inverse(o);
            z[j * len..(j + 1) * len].copy_from_slice(&back);
        }
    }
}

/// Convex initial guess: linear interpolation plus `a·t(t−1)` with `a` large
/// enough to make the guess admissible.
fn initial_guess(p: &Problem) -> Vec<f64> {
    let len = p.len;
    let model = p.model;
    let nb = model.neighbors().expect("torus");
    let diff: Vec<f64> = (0..len).map(|i| p.u1[i] - p.u0[i]).collect();
    let zero = vec![0.0; len];
    let mut worst: f64 = 0.0;
    for j in 1..p.m {
        let t = j as f64 * p.dt;
        let phi: Vec<f64> = (0..len).map(|i| (1.0 - t) * p.u0[i] + t * p.u1[i]).collect();
        for i in 0..len {
            let g = model.ref_metric(i).add(&hessian::torus_at(&model.grid, nb, p.n, &phi, i));
            let q = if p.n == 1 {
                quad_one_sided(&one_sided(model, &diff, &zero, 1.0, i))
            } else {
                g.adj().quad(&hessian::dbar_at(&model.grid, nb, p.n, &diff, i))
            };
            let need = (p.eps * model.ref_metric(i).det() + q) / g.det();
            worst = worst.max(need);
        }
    }
    let a = 0.5 * worst * 1.1 + 1e-12;
    let mut x = vec![0.0; (p.m - 1) * len];
    for j in 1..p.m {
        let t = j as f64 * p.dt;
        for i in 0..len {
            x[(j - 1) * len + i] = (1.0 - t) * p.u0[i] + t * p.u1[i] + a * t * (t - 1.0);
        }
    }
    x
}

/// Solve the ε-geodesic equation between `u0` and `u1`.
pub fn eps_geodesic(u0: &BasicFunction, u1: &BasicFunction, eps: f64, opts: &GeodesicOptions) -> Result<GeodesicPath> {
    eps_geodesic_warm(u0, u1, eps, opts, None)
}

/// As [`eps_geodesic`], starting from an admissible path (for example the
/// solution at a larger ε).
pub fn eps_geodesic_warm(
    u0: &BasicFunction,
    u1: &BasicFunction,
    eps: f64,
    opts: &GeodesicOptions,
    start: Option<&GeodesicPath>,
) -> Result<GeodesicPath> {
    u0.same_model(u1)?;
    let model = u0.model();
    if !model.is_torus() {
        return Err(SptError::Unsupported("geodesics are solved on torus models".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(SptError::InvalidArgument(format!("eps {eps} outside (0, 1]")));
    }
    if opts.m < 8 {
        return Err(SptError::InvalidArgument(format!("need at least 8 time slices, got {}", opts.m)));
    }
    for (which, u) in [(0, u0), (1, u1)] {
        let margin = psh::psh_margin(u);
        if !(margin > 0.0) {
            return Err(SptError::EndpointNotPlurisubharmonic { which, margin });
        }
    }
    let len = model.len();
    let p = Problem {
        model,
        n: model.n,
        m: opts.m,
        len,
        dt: 1.0 / opts.m as f64,
        eps,
        u0: u0.values(),
        u1: u1.values(),
    };
    let mut x = match start {
        Some(s) if s.m() == opts.m => {
            let mut x = Vec::with_capacity((opts.m - 1) * len);
            for j in 1..opts.m {
                x.extend_from_slice(&s.slices[j]);
            }
            x
        }
        _ => initial_guess(&p),
    };
    let mut f = vec![0.0; x.len()];
    if !p.residual(&x, &mut f) {
        x = initial_guess(&p);
        if !p.residual(&x, &mut f) {
            return Err(SptError::NewtonDiverged { stage: "initial guess".into(), residual: f64::NAN });
        }
    }
    let spectral_dims = model.grid.dims.clone();
    let lambda: Vec<f64> = {
        let parts: Vec<Vec<f64>> = (0..p.n).map(|k| complex_direction_symbol(&model.grid, k)).collect();
        (0..len).map(|i| parts.iter().map(|v| v[i]).sum()).collect()
    };
    let mut res = linalg::norm_inf(&f);
    let mut newton = 0;
    let mut krylov = 0;
    let mut trial = vec![0.0; x.len()];
    let mut ftrial = vec![0.0; x.len()];
    while res > opts.tol {
        if newton >= opts.max_newton {
            return Err(SptError::NewtonDiverged { stage: format!("eps={eps}"), residual: res });
        }
        newton += 1;
        let states = p.states(&x);
        let pre = Preconditioner::new(&p, &states, Spectral::new(&spectral_dims), &lambda);
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let mut dx = vec![0.0; x.len()];
        let ktol = (0.1 * opts.tol / res.max(1e-300)).clamp(1e-12, 1e-3);
        let stats = linalg::bicgstab(
            |v, o| p.jacobian_apply(&states, v, o),
            |r, z| pre.apply(r, z),
            &rhs,
            &mut dx,
            ktol,
            opts.max_krylov,
        );
        krylov += stats.iterations;
        let old = linalg::norm2(&f);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            for k in 0..x.len() {
                trial[k] = x[k] + alpha * dx[k];
            }
            if p.residual(&trial, &mut ftrial) && linalg::norm2(&ftrial) < (1.0 - 1e-4 * alpha) * old {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(SptError::NewtonDiverged { stage: format!("eps={eps} line search"), residual: res });
        }
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut f, &mut ftrial);
        res = linalg::norm_inf(&f);
    }
    let mut slices = Vec::with_capacity(opts.m + 1);
    slices.push(u0.values().to_vec());
    for j in 1..opts.m {
        slices.push(x[(j - 1) * len..j * len].to_vec());
    }
    slices.push(u1.values().to_vec());
    Ok(GeodesicPath {
        model: Arc::clone(model),
        slices,
        eps,
        residual: res,
        newton_iterations: newton,
        krylov_iterations: krylov,
        endpoint_labels: (u0.label.clone(), u1.label.clone()),
        nudge: 0.0,
    })
}
