//! Execution mode and deterministic reductions.
//!
//! Every reduction splits its index range into fixed-size chunks, sums each
//! chunk with Neumaier compensation and then folds the chunk totals in index
//! order. The chunk layout does not depend on the execution mode, so
//! sequential and parallel runs produce bitwise-identical results.

use std::sync::atomic::{AtomicU8, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: usize = 1024;

/// How data-parallel loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

static MODE: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") { 1 } else { 0 });

impl Exec {
    /// Process-wide mode used by all grid loops.
    pub fn current() -> Exec {
        match MODE.load(Ordering::Relaxed) {
            1 if cfg!(feature = "parallel") => Exec::Parallel,
            _ => Exec::Sequential,
        }
    }

    /// Select the process-wide mode. `Parallel` silently degrades to
    /// `Sequential` when the crate is built without the `parallel` feature.
    pub fn set_current(mode: Exec) {
        MODE.store(matches!(mode, Exec::Parallel) as u8, Ordering::Relaxed);
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn chunk_sum<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    let mut acc = Neumaier::default();
    for i in lo..hi {
        acc.add(f(i));
    }
    acc.value()
}

/// Deterministic compensated sum of `f(i)` over `0..n`.
pub fn sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = if Exec::current().is_parallel() && chunks > 1 {
        #[cfg(feature = "parallel")]
        {
            (0..chunks)
                .into_par_iter()
                .map(|c| chunk_sum(c * CHUNK, ((c + 1) * CHUNK).min(n), &f))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        unreachable!()
    } else {
        (0..chunks)
            .map(|c| chunk_sum(c * CHUNK, ((c + 1) * CHUNK).min(n), &f))
            .collect()
    };
    let mut acc = Neumaier::default();
    for p in partials {
        acc.add(p);
    }
    acc.value()
}

/// Maximum of `f(i)` over `0..n` (`-inf` for an empty range).
pub fn max<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if Exec::current().is_parallel() && n > CHUNK {
        #[cfg(feature = "parallel")]
        {
            return (0..n)
                .into_par_iter()
                .with_min_len(CHUNK)
                .map(&f)
                .reduce(|| f64::NEG_INFINITY, f64::max);
        }
    }
    (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
}

/// Minimum of `f(i)` over `0..n` (`+inf` for an empty range).
pub fn min<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    -max(n, |i| -f(i))
}

/// Fill `out[i] = f(i)`.
pub fn fill<F>(out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if Exec::current().is_parallel() && out.len() > CHUNK {
        #[cfg(feature = "parallel")]
        {
            out.par_iter_mut()
                .with_min_len(CHUNK)
                .enumerate()
                .for_each(|(i, o)| *o = f(i));
            return;
        }
    }
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}

/// Build a vector with `f(i)` for `i in 0..n`.
pub fn collect<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let mut out = vec![0.0; n];
    fill(&mut out, f);
    out
}

/// Map an index range to arbitrary results, preserving order. Used for
/// scenario batteries where each item is an independent problem.
pub fn map_items<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if Exec::current().is_parallel() && n > 1 {
        #[cfg(feature = "parallel")]
        {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// Apply `f` to disjoint mutable chunks of `data` of length `len`.
pub fn for_each_chunk<F>(data: &mut [f64], len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if Exec::current().is_parallel() && data.len() / len.max(1) > 1 {
        #[cfg(feature = "parallel")]
        {
            data.par_chunks_mut(len)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
    }
    for (i, c) in data.chunks_mut(len).enumerate() {
        f(i, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut acc = Neumaier::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            acc.add(x);
        }
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn modes_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        Exec::set_current(Exec::Sequential);
        let a = sum(100_000, f);
        Exec::set_current(Exec::Parallel);
        let b = sum(100_000, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn empty_reductions() {
        assert_eq!(sum(0, |_| 1.0), 0.0);
        assert_eq!(max(0, |_| 1.0), f64::NEG_INFINITY);
    }
}
