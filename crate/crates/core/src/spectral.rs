//! Fourier transforms on periodic torus grids.
//!
//! Used for the discrete heat semigroup (mollification), discrete Green
//! functions and the frozen-coefficient preconditioner of the geodesic
//! solver. Symbols are those of the finite-difference operators, so results
//! are exact for the discrete problems.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::geometry::GridSpec;

/// Forward/inverse multi-dimensional FFT plans for one grid shape.
pub struct Spectral {
    dims: Vec<usize>,
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
}

impl Spectral {
    pub fn new(dims: &[usize]) -> Spectral {
        let mut planner = FftPlanner::new();
        Spectral {
            dims: dims.to_vec(),
            fwd: dims.iter().map(|&d| planner.plan_fft_forward(d)).collect(),
            inv: dims.iter().map(|&d| planner.plan_fft_inverse(d)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        let axes = self.dims.len();
        let mut line = Vec::new();
        for a in 0..axes {
            let d = self.dims[a];
            let stride: usize = self.dims[a + 1..].iter().product();
            let outer = data.len() / (d * stride);
            line.resize(d, Complex64::new(0.0, 0.0));
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * d * stride + s;
                    for k in 0..d {
                        line[k] = data[base + k * stride];
                    }
                    plans[a].process(&mut line);
                    for k in 0..d {
                        data[base + k * stride] = line[k];
                    }
                }
            }
        }
    }

    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let mut c: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut c, &self.fwd);
        c
    }

    /// Inverse transform including the `1/N` normalization; returns real parts.
    pub fn inverse(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut c, &self.inv);
        let s = 1.0 / self.len() as f64;
        c.iter().map(|z| z.re * s).collect()
    }

    /// Multiply the spectrum of `data` by a real symbol given per flat index.
    pub fn apply_symbol(&self, data: &[f64], symbol: &[f64]) -> Vec<f64> {
        let mut c = self.forward(data);
        for (z, s) in c.iter_mut().zip(symbol) {
            *z *= *s;
        }
        self.inverse(c)
    }
}

/// Symbol of the discrete second difference along each axis summed:
/// `Σ_a −(4/h_a²) sin²(π k_a / N_a)`, per flat index.
pub fn laplacian_symbol(grid: &GridSpec) -> Vec<f64> {
    let len = grid.len();
    let axes = grid.axes();
    let per_axis: Vec<Vec<f64>> = (0..axes)
        .map(|a| {
            let n = grid.dims[a];
            let h = grid.spacing[a];
            (0..n)
                .map(|k| {
                    let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
                    -4.0 * s * s / (h * h)
                })
                .collect()
        })
        .collect();
    (0..len).map(|i| (0..axes).map(|a| per_axis[a][grid.coord(i, a)]).sum()).collect()
}

/// Symbol of the laplacian restricted to the complex directions `z_k`
/// (axes `2k` and `2k+1`).
pub fn complex_direction_symbol(grid: &GridSpec, k: usize) -> Vec<f64> {
    let len = grid.len();
    (0..len)
        .map(|i| {
            [2 * k, 2 * k + 1]
                .iter()
                .map(|&a| {
                    let n = grid.dims[a];
                    let h = grid.spacing[a];
                    let s = (std::f64::consts::PI * grid.coord(i, a) as f64 / n as f64).sin();
                    -4.0 * s * s / (h * h)
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = GridSpec::torus(1, 16);
        let sp = Spectral::new(&g.dims);
        let data: Vec<f64> = (0..g.len()).map(|i| ((i * 7 % 13) as f64).sin()).collect();
        let back = sp.inverse(sp.forward(&data));
        for (a, b) in data.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn symbol_matches_stencil() {
        let g = GridSpec::torus(1, 16);
        let nb = crate::geometry::Neighbors::periodic(&g);
        let data: Vec<f64> = (0..g.len()).map(|i| ((i * 5 % 11) as f64).cos()).collect();
        let sym = laplacian_symbol(&g);
        let lap = Spectral::new(&g.dims).apply_symbol(&data, &sym);
        let h2 = g.spacing[0] * g.spacing[0];
        for i in 0..g.len() {
            let st: f64 = (0..2).map(|a| (data[nb.p(a, i)] - 2.0 * data[i] + data[nb.m(a, i)]) / h2).sum();
            assert!((st - lap[i]).abs() < 1e-9 * (1.0 + st.abs()));
        }
    }
}
