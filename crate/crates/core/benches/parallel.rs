//! Sequential against parallel execution for the grid kernels that dominate
//! a run: Monge–Ampère measures, Orlicz energies, the sweep envelope and a
//! single ε-geodesic solve.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spt_core::energy::{self, Weight};
use spt_core::envelope::{self, EnvelopeMethod};
use spt_core::geodesic::{self, GeodesicOptions};
use spt_core::{measure, psh, Exec, SasakiModel};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kernels(c: &mut Criterion) {
    let m = SasakiModel::torus(1, 128).unwrap();
    let u = psh::random_tpsh(&m, 1, 0.3, 3).unwrap();
    let v = psh::random_tpsh(&m, 2, 0.3, 3).unwrap();
    let chi = Weight::power(2.0).unwrap();
    let mut g = c.benchmark_group("kernels-128");
    for (name, mode) in MODES {
        Exec::set_current(mode);
        g.bench_function(BenchmarkId::new("ma_measure", name), |b| b.iter(|| measure::ma_measure(&u).unwrap()));
        g.bench_function(BenchmarkId::new("e_chi", name), |b| b.iter(|| energy::e_chi(&u, &chi).unwrap()));
        g.bench_function(BenchmarkId::new("orlicz_norm", name), |b| {
            b.iter(|| energy::orlicz_norm(&u.sub(&v), &u, &chi).unwrap())
        });
    }
    g.finish();
}

fn solvers(c: &mut Criterion) {
    let m = SasakiModel::torus(1, 32).unwrap();
    let u = psh::random_tpsh(&m, 3, 0.3, 2).unwrap();
    let v = psh::random_tpsh(&m, 4, 0.3, 2).unwrap();
    let opts = GeodesicOptions::default();
    let mut g = c.benchmark_group("solvers-32");
    g.sample_size(10);
    for (name, mode) in MODES {
        Exec::set_current(mode);
        g.bench_function(BenchmarkId::new("rooftop", name), |b| {
            b.iter(|| envelope::rooftop_with(&u, &v, &EnvelopeMethod::sweep()).unwrap())
        });
        g.bench_function(BenchmarkId::new("eps_geodesic", name), |b| {
            b.iter(|| geodesic::eps_geodesic(&u, &v, 1e-2, &opts).unwrap())
        });
    }
    g.finish();
    Exec::set_current(Exec::Parallel);
}

criterion_group!(benches, kernels, solvers);
criterion_main!(benches);
