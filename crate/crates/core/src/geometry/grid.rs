//! Grid layout: axis sizes, spacing, periodicity and neighbor tables.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SptError};

/// Per-axis sampling of a model's parameter domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl GridSpec {
    /// Periodic grid on `[0,1)^{2n}` with `points` samples per axis,
    /// axes ordered `(x1, y1, x2, y2, ...)`.
    pub fn torus(n: usize, points: usize) -> GridSpec {
        let axes = 2 * n;
        GridSpec {
            dims: vec![points; axes],
            spacing: vec![1.0 / points as f64; axes],
            periodic: vec![true; axes],
        }
    }

    /// Node grid on the square `[-half, half]²` (both ends included).
    pub fn square(points: usize, half: f64) -> GridSpec {
        let h = 2.0 * half / (points.saturating_sub(1)).max(1) as f64;
        GridSpec { dims: vec![points; 2], spacing: vec![h; 2], periodic: vec![false; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty()
            || self.dims.len() != self.spacing.len()
            || self.dims.len() != self.periodic.len()
        {
            return Err(SptError::BadGrid("axis lists have inconsistent lengths".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 8) {
            return Err(SptError::BadGrid(format!("axis size {d} below minimum 8")));
        }
        if self.spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(SptError::BadGrid("spacing must be positive".into()));
        }
        Ok(())
    }

    pub fn axes(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major stride of an axis (last axis fastest).
    pub fn stride(&self, axis: usize) -> usize {
        self.dims[axis + 1..].iter().product()
    }

    /// Integer coordinate of flat index `i` along `axis`.
    pub fn coord(&self, i: usize, axis: usize) -> usize {
        (i / self.stride(axis)) % self.dims[axis]
    }

    /// Product of spacings: the cell volume.
    pub fn cell(&self) -> f64 {
        self.spacing.iter().product()
    }
}

/// Periodic neighbor tables for every axis.
#[derive(Debug, Clone)]
pub struct Neighbors {
    pub plus: Vec<Vec<u32>>,
    pub minus: Vec<Vec<u32>>,
}

impl Neighbors {
    pub fn periodic(grid: &GridSpec) -> Neighbors {
        let len = grid.len();
        let mut plus = Vec::with_capacity(grid.axes());
        let mut minus = Vec::with_capacity(grid.axes());
        for a in 0..grid.axes() {
            let s = grid.stride(a);
            let d = grid.dims[a];
            let mut p = vec![0u32; len];
            let mut m = vec![0u32; len];
            for i in 0..len {
                let c = (i / s) % d;
                let base = i - c * s;
                p[i] = (base + ((c + 1) % d) * s) as u32;
                m[i] = (base + ((c + d - 1) % d) * s) as u32;
            }
            plus.push(p);
            minus.push(m);
        }
        Neighbors { plus, minus }
    }

    #[inline]
    pub fn p(&self, axis: usize, i: usize) -> usize {
        self.plus[axis][i] as usize
    }

    #[inline]
    pub fn m(&self, axis: usize, i: usize) -> usize {
        self.minus[axis][i] as usize
    }
}
