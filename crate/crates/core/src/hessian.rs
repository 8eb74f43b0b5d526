//! Discrete complex Hessians `u_{j k̄}` on the model grids.
//!
//! Torus: centered second differences with periodic wrap; the mixed entries
//! use four-point cross differences so every matrix is Hermitian by
//! construction. Sphere charts: fourth-order centered stencils.

use num_complex::Complex64;

use crate::geometry::grid::{GridSpec, Neighbors};
use crate::geometry::model::{SasakiModel, SphereCharts};
use crate::linalg::Herm;

#[inline]
fn second(u: &[f64], nb: &Neighbors, a: usize, i: usize, h: f64) -> f64 {
    (u[nb.p(a, i)] - 2.0 * u[i] + u[nb.m(a, i)]) / (h * h)
}

#[inline]
fn cross(u: &[f64], nb: &Neighbors, a: usize, b: usize, i: usize, ha: f64, hb: f64) -> f64 {
    let pa = nb.p(a, i);
    let ma = nb.m(a, i);
    (u[nb.p(b, pa)] - u[nb.m(b, pa)] - u[nb.p(b, ma)] + u[nb.m(b, ma)]) / (4.0 * ha * hb)
}

/// Complex Hessian of `u` at node `i` of a torus grid of dimension `n`.
pub fn torus_at(grid: &GridSpec, nb: &Neighbors, n: usize, u: &[f64], i: usize) -> Herm {
    let h = &grid.spacing;
    if n == 1 {
        return Herm::scalar(0.25 * (second(u, nb, 0, i, h[0]) + second(u, nb, 1, i, h[1])));
    }
    let a = 0.25 * (second(u, nb, 0, i, h[0]) + second(u, nb, 1, i, h[1]));
    let d = 0.25 * (second(u, nb, 2, i, h[2]) + second(u, nb, 3, i, h[3]));
    let re = cross(u, nb, 0, 2, i, h[0], h[2]) + cross(u, nb, 1, 3, i, h[1], h[3]);
    let im = cross(u, nb, 0, 3, i, h[0], h[3]) - cross(u, nb, 1, 2, i, h[1], h[2]);
    Herm::two(a, d, Complex64::new(0.25 * re, 0.25 * im))
}

/// `u_{z z̄} = ¼Δu` at an interior node of a sphere chart (fourth order).
pub fn sphere_at(charts: &SphereCharts, u: &[f64], i: usize) -> Herm {
    Herm::scalar(0.25 * sphere_laplacian(charts, u, i))
}

/// Fourth-order five-point-per-axis Laplacian at an interior chart node.
pub fn sphere_laplacian(charts: &SphereCharts, u: &[f64], i: usize) -> f64 {
    let n = charts.points;
    let h2 = charts.h * charts.h;
    let d2 = |s: usize| {
        (-u[i + 2 * s] + 16.0 * u[i + s] - 30.0 * u[i] + 16.0 * u[i - s] - u[i - 2 * s]) / (12.0 * h2)
    };
    d2(n) + d2(1)
}

/// Fourth-order centered gradient `(∂x u, ∂y u)` at an interior chart node.
pub fn sphere_gradient(charts: &SphereCharts, u: &[f64], i: usize) -> (f64, f64) {
    let n = charts.points;
    let h = charts.h;
    let d1 = |s: usize| (-u[i + 2 * s] + 8.0 * u[i + s] - 8.0 * u[i - s] + u[i - 2 * s]) / (12.0 * h);
    (d1(n), d1(1))
}

/// Complex Hessian of `u` at node `i` in the model's background frame.
/// Nodes without a valid stencil (sphere chart rims) return zero.
pub fn at(model: &SasakiModel, u: &[f64], i: usize) -> Herm {
    if let Some(nb) = model.neighbors() {
        torus_at(&model.grid, nb, model.n, u, i)
    } else if let Some(ch) = model.sphere_charts() {
        if ch.interior[i] {
            sphere_at(ch, u, i)
        } else {
            Herm::scalar(0.0)
        }
    } else {
        Herm::zero(model.n)
    }
}

/// `ω^T + i∂∂̄u` at node `i` in the background frame.
#[inline]
pub fn metric_at(model: &SasakiModel, u: &[f64], i: usize) -> Herm {
    model.ref_metric(i).add(&at(model, u, i))
}

/// First-order central differences `∂_{z̄_k} v = ½(∂_{x_k} + i∂_{y_k}) v` on
/// the torus.
pub fn dbar_at(grid: &GridSpec, nb: &Neighbors, n: usize, v: &[f64], i: usize) -> [Complex64; 2] {
    let h = &grid.spacing;
    let d = |a: usize| (v[nb.p(a, i)] - v[nb.m(a, i)]) / (2.0 * h[a]);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for k in 0..n {
        out[k] = Complex64::new(0.5 * d(2 * k), 0.5 * d(2 * k + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trigonometric_hessian_n2() {
        // u = sin(2π(x1 + x2)): u_{1 2̄} = ¼(u_{x1x2} + u_{y1y2}) = ¼·u_{x1x2}.
        let pts = 16;
        let g = GridSpec::torus(2, pts);
        let nb = Neighbors::periodic(&g);
        let u: Vec<f64> = (0..g.len())
            .map(|i| {
                let x1 = g.coord(i, 0) as f64 / pts as f64;
                let x2 = g.coord(i, 2) as f64 / pts as f64;
                (2.0 * PI * (x1 + x2)).sin()
            })
            .collect();
        let h = 1.0 / pts as f64;
        let k2 = (2.0 * (1.0 - (2.0 * PI * h).cos())) / (h * h);
        let kc = ((2.0 * PI * h).sin() / h).powi(2);
        for i in [0, 37, 1000] {
            let m = torus_at(&g, &nb, 2, &u, i);
            assert!((m.a + 0.25 * k2 * u[i]).abs() < 1e-12);
            assert!((m.b.re + 0.25 * kc * u[i]).abs() < 1e-12);
            assert!(m.b.im.abs() < 1e-12);
        }
    }
}
