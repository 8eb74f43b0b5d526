//! Small Hermitian matrices (size 1 or 2) and the Krylov / banded solvers
//! used by the Newton iterations.

use num_complex::Complex64;

use crate::exec;

/// Hermitian matrix of size 1 or 2: `[[a, b], [conj(b), d]]`.
///
/// For size 1 only `a` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herm {
    pub n: usize,
    pub a: f64,
    pub d: f64,
    pub b: Complex64,
}

impl Herm {
    pub fn scalar(a: f64) -> Herm {
        Herm { n: 1, a, d: 0.0, b: Complex64::new(0.0, 0.0) }
    }

    pub fn two(a: f64, d: f64, b: Complex64) -> Herm {
        Herm { n: 2, a, d, b }
    }

    pub fn identity(n: usize) -> Herm {
        match n {
            1 => Herm::scalar(1.0),
            _ => Herm::two(1.0, 1.0, Complex64::new(0.0, 0.0)),
        }
    }

    pub fn zero(n: usize) -> Herm {
        Herm { n, a: 0.0, d: 0.0, b: Complex64::new(0.0, 0.0) }
    }

    pub fn det(&self) -> f64 {
        match self.n {
            1 => self.a,
            _ => self.a * self.d - self.b.norm_sqr(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self.n {
            1 => self.a,
            _ => self.a + self.d,
        }
    }

    pub fn add(&self, o: &Herm) -> Herm {
        Herm { n: self.n, a: self.a + o.a, d: self.d + o.d, b: self.b + o.b }
    }

    pub fn sub(&self, o: &Herm) -> Herm {
        Herm { n: self.n, a: self.a - o.a, d: self.d - o.d, b: self.b - o.b }
    }

    pub fn scale(&self, s: f64) -> Herm {
        Herm { n: self.n, a: self.a * s, d: self.d * s, b: self.b * s }
    }

    /// Adjugate; for size 1 this is the scalar 1.
    pub fn adj(&self) -> Herm {
        match self.n {
            1 => Herm::scalar(1.0),
            _ => Herm::two(self.d, self.a, -self.b),
        }
    }

    /// `tr(A B)` for Hermitian `A`, `B`.
    pub fn trace_prod(&self, o: &Herm) -> f64 {
        match self.n {
            1 => self.a * o.a,
            _ => self.a * o.a + self.d * o.d + 2.0 * (self.b * o.b.conj()).re,
        }
    }

    /// Polarized determinant `½(det(A+B) − det A − det B)` for size 2.
    /// For size 1 the only mixed product of degree one is the matrix itself,
    /// so this returns `½(a + a')`; callers use [`Herm::mixed_det`] instead.
    pub fn polar(&self, o: &Herm) -> f64 {
        match self.n {
            1 => 0.5 * (self.a + o.a),
            _ => 0.5 * (self.a * o.d + self.d * o.a) - (self.b * o.b.conj()).re,
        }
    }

    /// Density of `A^k ∧ B^(n−k)` normalized so that `k = n` gives `det A`.
    pub fn mixed_det(&self, o: &Herm, k: usize) -> f64 {
        match (self.n, k) {
            (_, 0) => o.det(),
            (1, _) => self.a,
            (_, 1) => self.polar(o),
            _ => self.det(),
        }
    }

    /// `aᴴ M a` for a vector of length `n`.
    pub fn quad(&self, v: &[Complex64; 2]) -> f64 {
        match self.n {
            1 => self.a * v[0].norm_sqr(),
            _ => {
                self.a * v[0].norm_sqr()
                    + self.d * v[1].norm_sqr()
                    + 2.0 * (v[0].conj() * self.b * v[1]).re
            }
        }
    }

    /// Real part of `xᴴ M y`.
    pub fn bilinear_re(&self, x: &[Complex64; 2], y: &[Complex64; 2]) -> f64 {
        match self.n {
            1 => self.a * (x[0].conj() * y[0]).re,
            _ => {
                let m0 = self.b * y[1] + y[0] * self.a;
                let m1 = self.b.conj() * y[0] + y[1] * self.d;
                (x[0].conj() * m0 + x[1].conj() * m1).re
            }
        }
    }

    /// Smallest eigenvalue of `A` relative to the positive matrix `r`,
    /// i.e. the smallest root of `det(A − λ r) = 0`.
    pub fn min_eig_rel(&self, r: &Herm) -> f64 {
        match self.n {
            1 => self.a / r.a,
            _ => {
                let dr = r.det();
                let p = self.polar(r);
                let da = self.det();
                let disc = (p * p - dr * da).max(0.0);
                let s = disc.sqrt();
                // Stable root selection.
                if p > 0.0 {
                    da / (p + s)
                } else {
                    (p - s) / dr
                }
            }
        }
    }
}

/// Euclidean inner product with deterministic compensated summation.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    exec::sum(x.len(), |i| x[i] * y[i])
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    exec::max(x.len(), |i| x[i].abs()).max(0.0)
}

/// Outcome of an iterative linear solve.
#[derive(Debug, Clone, Copy)]
pub struct KrylovStats {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Preconditioned conjugate gradients for a symmetric positive definite
/// operator. Stops when `‖r‖₂ ≤ tol·‖b‖₂`.
pub fn cg<A, P>(a: A, precond: P, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> KrylovStats
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    a(x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = norm2(&r);
    let mut it = 0;
    while it < max_iter && res > tol * bnorm {
        a(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = norm2(&r);
        it += 1;
    }
    KrylovStats { iterations: it, residual: res / bnorm, converged: res <= tol * bnorm }
}

/// Right-preconditioned BiCGSTAB for a general nonsingular operator.
/// Stops when `‖r‖₂ ≤ tol·‖b‖₂`.
pub fn bicgstab<A, P>(a: A, precond: P, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> KrylovStats
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut r = vec![0.0; n];
    a(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let r_hat = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut sh = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
    let mut res = norm2(&r);
    let mut it = 0;
    while it < max_iter && res > tol * bnorm {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&p, &mut ph);
        a(&ph, &mut v);
        let den = dot(&r_hat, &v);
        if den == 0.0 || !den.is_finite() {
            break;
        }
        alpha = rho / den;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        let snorm = norm2(&s);
        if snorm <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * ph[i];
            }
            res = snorm;
            it += 1;
            break;
        }
        precond(&s, &mut sh);
        a(&sh, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            break;
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        res = norm2(&r);
        it += 1;
        if omega == 0.0 {
            break;
        }
    }
    KrylovStats { iterations: it, residual: res / bnorm, converged: res <= tol * bnorm }
}

/// Thomas algorithm for a tridiagonal system, overwriting `rhs` with the
/// solution. `lower[0]` and `upper[n-1]` are ignored.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    scratch[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Dense solve by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `1e-14` times the largest entry.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-14 * scale {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h2(a: f64, d: f64, br: f64, bi: f64) -> Herm {
        Herm::two(a, d, Complex64::new(br, bi))
    }

    #[test]
    fn min_eig_matches_characteristic_roots() {
        let a = h2(2.0, 3.0, 0.5, -0.25);
        // Relative to the identity: roots of λ² − 5λ + (6 − 0.3125).
        let tr: f64 = 5.0;
        let det = 6.0 - 0.3125;
        let expect = 0.5 * (tr - (tr * tr - 4.0 * det).sqrt());
        assert!((a.min_eig_rel(&Herm::identity(2)) - expect).abs() < 1e-14);
    }

    #[test]
    fn polarization_extracts_cross_coefficient() {
        let a = h2(1.2, 0.7, 0.1, 0.3);
        let b = h2(0.4, 1.9, -0.2, 0.05);
        // det(sA + tB) at s = t = 1 minus the pure terms is 2·polar.
        let full = a.add(&b).det();
        assert!((full - a.det() - b.det() - 2.0 * a.polar(&b)).abs() < 1e-14);
    }

    #[test]
    fn thomas_solves_tridiagonal() {
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let upper = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, 2.0, 3.0, 4.0];
        let mut rhs: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x[i]
                    + if i > 0 { lower[i] * x[i - 1] } else { 0.0 }
                    + if i < 3 { upper[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        let mut scratch = vec![0.0; 4];
        thomas(&lower, &diag, &upper, &mut rhs, &mut scratch);
        for i in 0..4 {
            assert!((rhs[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn krylov_solvers_agree_on_spd_system() {
        let n = 50;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                y[i] = 3.0 * x[i] - l - r;
            }
        };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let id = |x: &[f64], y: &mut [f64]| y.copy_from_slice(x);
        let mut x1 = vec![0.0; n];
        let mut x2 = vec![0.0; n];
        assert!(cg(apply, id, &b, &mut x1, 1e-12, 500).converged);
        assert!(bicgstab(apply, id, &b, &mut x2, 1e-12, 500).converged);
        for i in 0..n {
            assert!((x1[i] - x2[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobi_eigenvalues() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let mut e = symmetric_eigenvalues(a);
        e.sort_by(f64::total_cmp);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
    }
}
