//! The check registry.
//!
//! Every invariant of the core library appears here exactly once. A check
//! maps one seeded scenario to a single number `value`; it passes when
//! `value ≤ tol`. Inequalities `lhs ≤ rhs` are recorded as `lhs − rhs` (or
//! the relative excess), so negative values are slack.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;
use spt_core::canonical::{self, HolomorphicFieldBasis};
use spt_core::energy::{self, Weight};
use spt_core::envelope::{self, EnvelopeMethod};
use spt_core::geodesic::{self, GeodesicOptions, MetricContext, WeakGeodesic, WeakOptions};
use spt_core::geometry::chart::{self, ChartDomain, LocalPotential};
use spt_core::geometry::typei::{self, InvariantProfile};
use spt_core::geometry::{build_model, GridSpec, ModelKind};
use spt_core::psh::{self, Lift, SingularPrototype};
use spt_core::{measure, BasicFunction, Result, SasakiModel};

use crate::config::Scenario;

/// Check families, one per library area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Psh,
    Measures,
    Energies,
    Envelopes,
    Geodesics,
    MetricSpace,
    Canonical,
    Typei,
    Charts,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Psh,
        Suite::Measures,
        Suite::Energies,
        Suite::Envelopes,
        Suite::Geodesics,
        Suite::MetricSpace,
        Suite::Canonical,
        Suite::Typei,
        Suite::Charts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Psh => "psh",
            Suite::Measures => "measures",
            Suite::Energies => "energies",
            Suite::Envelopes => "envelopes",
            Suite::Geodesics => "geodesics",
            Suite::MetricSpace => "metric-space",
            Suite::Canonical => "canonical",
            Suite::Typei => "typei",
            Suite::Charts => "charts",
        }
    }

    /// `None` stands for `all`.
    pub fn parse(name: &str) -> Option<Option<Suite>> {
        if name == "all" {
            return Some(None);
        }
        Suite::ALL.into_iter().find(|s| s.name() == name).map(Some)
    }
}

/// One registered invariant.
pub struct Check {
    pub id: &'static str,
    pub suite: Suite,
    /// Short quotation of the statement being tested.
    pub statement: &'static str,
    /// Operands, for the report.
    pub inputs: &'static str,
    pub tol: f64,
    pub run: fn(&SeedContext) -> Result<f64>,
}

/// Models shared by every seed of a run.
pub struct Models {
    pub torus: Arc<SasakiModel>,
    pub sphere: Option<Arc<SasakiModel>>,
    pub s3: Option<Arc<SasakiModel>>,
}

impl Models {
    pub fn build(s: &Scenario, sphere: bool, s3: bool) -> Result<Models> {
        Ok(Models {
            torus: SasakiModel::torus(s.torus_n, s.torus_points)?,
            sphere: if sphere { Some(SasakiModel::sphere(s.sphere_points)?) } else { None },
            s3: if s3 {
                Some(build_model(ModelKind::WeightedContactS3 { a1: 1.0, a2: 2.0 }, GridSpec::torus(1, 64), None)?)
            } else {
                None
            },
        })
    }
}

#[derive(Clone, Copy)]
struct CanonicalSummary {
    curvature_gap: f64,
    futaki_drift: f64,
    bilinear_drift: f64,
    extremal_fs: f64,
    k_mean: f64,
}

#[derive(Clone, Copy)]
struct TypeISummary {
    contact: f64,
    increase: f64,
    finest: f64,
}

/// Operands and lazily computed intermediate results for one seed. A seed
/// runs on a single worker, so the caches need no locking.
pub struct SeedContext<'a> {
    pub scenario: &'a Scenario,
    pub models: &'a Models,
    pub seed: u64,
    pub u: BasicFunction,
    pub v: BasicFunction,
    pub w: BasicFunction,
    pub metric: MetricContext,
    roof: RefCell<Option<BasicFunction>>,
    canonical: RefCell<Option<CanonicalSummary>>,
    typei: RefCell<Option<TypeISummary>>,
}

fn cached<T: Clone>(cell: &RefCell<Option<T>>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    if let Some(v) = cell.borrow().as_ref() {
        return Ok(v.clone());
    }
    let v = f()?;
    *cell.borrow_mut() = Some(v.clone());
    Ok(v)
}

impl<'a> SeedContext<'a> {
    pub fn new(scenario: &'a Scenario, models: &'a Models, seed: u64) -> Result<SeedContext<'a>> {
        let gen = |offset: u64, name: &str| {
            psh::random_tpsh(&models.torus, seed + offset, scenario.delta, scenario.max_freq)
                .map(|f| f.with_label(format!("{name}{seed}")))
        };
        let opts = WeakOptions {
            eps: scenario.eps.clone(),
            geodesic: GeodesicOptions { m: scenario.slices, ..GeodesicOptions::default() },
            ..WeakOptions::default()
        };
        Ok(SeedContext {
            scenario,
            models,
            seed,
            u: gen(0, "u")?,
            v: gen(1000, "v")?,
            w: gen(2000, "w")?,
            metric: MetricContext::new(opts),
            roof: RefCell::new(None),
            canonical: RefCell::new(None),
            typei: RefCell::new(None),
        })
    }

    fn model(&self) -> &Arc<SasakiModel> {
        &self.models.torus
    }

    /// Sweep rooftop of `u` and `v`.
    fn roof(&self) -> Result<BasicFunction> {
        cached(&self.roof, || Ok(envelope::rooftop_with(&self.u, &self.v, &EnvelopeMethod::sweep())?.envelope))
    }

    fn geodesic(&self) -> Result<Arc<WeakGeodesic>> {
        self.metric.geodesic(&self.u, &self.v)
    }

    /// `u_lo ≤ v_hi ≤ 0`, built from `u` and `w`.
    fn ordered_pair(&self) -> (BasicFunction, BasicFunction) {
        let hi = self.w.add_const(-self.w.sup() - 0.02);
        let lo = self.u.add_const(-self.u.sub(&hi).sup());
        (lo, hi)
    }

    fn canonical(&self) -> Result<CanonicalSummary> {
        cached(&self.canonical, || {
            let m = self.models.sphere.as_ref().expect("sphere model is built for canonical checks");
            let basis = HolomorphicFieldBasis::standard();
            let u = psh::random_tpsh(m, self.seed, self.scenario.delta, 3)?;
            let (d0, e0) = canonical::canonical_table(&basis, &BasicFunction::zero(m))?;
            let (du, eu) = canonical::canonical_table(&basis, &u)?;
            let futaki_drift = eu.futaki.iter().zip(&e0.futaki).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let mut bilinear_drift: f64 = 0.0;
            for &y in &basis.fields {
                for &z in &basis.fields {
                    bilinear_drift = bilinear_drift.max((du.bilinear(y, z) - d0.bilinear(y, z)).norm());
                }
            }
            Ok(CanonicalSummary {
                curvature_gap: (du.curvature.mean - du.curvature.cohomological).abs(),
                futaki_drift,
                bilinear_drift,
                extremal_fs: e0.coefficients.iter().fold(0.0, |a, c| a.max(c.abs())),
                k_mean: canonical::modified_k_integrand(&u, Some(&eu))?.mean.abs(),
            })
        })
    }

    fn typei(&self) -> Result<TypeISummary> {
        cached(&self.typei, || {
            let m = self.models.s3.as_ref().expect("contact model is built for type-I checks");
            let angle = self.seed as f64 * PI * (3.0 - 5f64.sqrt());
            let rho = [0.1 * angle.cos(), 0.1 * angle.sin()];
            let points = typei::sample_points(self.scenario.typei_points, self.seed);
            let rep = typei::contact_checks(&typei::typei_deform(m, rho)?, &points);
            let prof = InvariantProfile::seeded(self.seed, 3, 1.0);
            let base = typei::typei_psh_margin(&typei::typei_deform(m, [0.0, 0.0])?, prof.as_fn(), 1e6)?;
            let prof = prof.scale(1.0 / (1.0 - base.base_margin));
            let (mut prev, mut increase) = (f64::INFINITY, f64::NEG_INFINITY);
            for level in 0..6 {
                let s = 0.5f64.powi(level);
                let e = typei::typei_psh_margin(&typei::typei_deform(m, [rho[0] * s, rho[1] * s])?, prof.as_fn(), 1e6)?
                    .eps_required;
                if prev.is_finite() {
                    increase = increase.max(e - prev);
                }
                prev = e;
            }
            Ok(TypeISummary { contact: rep.normalization.max(rep.reeb_interior).max(rep.phi_reeb), increase, finest: prev })
        })
    }
}

fn chi(p: f64) -> Weight {
    Weight::power(p).expect("p ≥ 1")
}

fn rel_excess(lhs: f64, rhs: f64) -> f64 {
    if rhs.abs() < 1e-12 {
        lhs - rhs
    } else {
        (lhs - rhs) / rhs.abs()
    }
}

// psh

fn margin_floor(c: &SeedContext) -> Result<f64> {
    Ok(c.scenario.delta - psh::psh_margin(&c.u))
}

fn sup_mean(c: &SeedContext) -> Result<f64> {
    let g = psh::sup_mean_gap(&c.u)?;
    Ok(g.sup - g.mean - g.bound)
}

fn cutoff_levels(c: &SeedContext) -> (BasicFunction, f64) {
    let u = c.u.add_const(-c.u.sup() - 0.05);
    let depth = -u.inf();
    (u, depth)
}

fn cutoff_monotone(c: &SeedContext) -> Result<f64> {
    let (u, depth) = cutoff_levels(c);
    let cuts = [0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|f| psh::canonical_cutoff(&u, f * depth))
        .collect::<Result<Vec<_>>>()?;
    Ok(cuts.windows(2).map(|w| w[1].sub(&w[0]).sup()).fold(f64::NEG_INFINITY, f64::max))
}

fn cutoff_exhausts(c: &SeedContext) -> Result<f64> {
    let (u, depth) = cutoff_levels(c);
    Ok(psh::canonical_cutoff(&u, 1.01 * depth)?.sup_dist(&u))
}

fn mollify_constant(c: &SeedContext) -> Result<f64> {
    let k = BasicFunction::constant(c.model(), 0.3 + 0.01 * c.seed as f64);
    let h = c.model().grid.spacing[0];
    Ok(psh::mollify(&k, 2.0 * h, Lift::Fixed(0.0))?.sup_dist(&k))
}

fn mollify_converges(c: &SeedContext) -> Result<f64> {
    let h = c.model().grid.spacing[0];
    let d = |s: f64| psh::mollify(&c.u, s, Lift::Fixed(0.0)).map(|m| m.sup_dist(&c.u));
    Ok(d(h)? - d(2.0 * h)?)
}

// measures

fn full_mass(c: &SeedContext) -> Result<f64> {
    Ok((measure::ma_measure(&c.u)?.mass - c.model().volume()).abs())
}

fn density_floor(c: &SeedContext) -> Result<f64> {
    Ok(c.scenario.delta.powi(c.model().n as i32) - measure::ma_measure(&c.u)?.min_density())
}

fn max_identity(c: &SeedContext) -> Result<f64> {
    measure::bt_identity_residual(&c.u, &c.v)
}

fn comparison(c: &SeedContext) -> Result<f64> {
    measure::comparison_residual(&c.u, &c.v)
}

fn mixed_endpoints(c: &SeedContext) -> Result<f64> {
    let n = c.model().n;
    let pairs = [(0, measure::ma_measure(&c.v)?), (n, measure::ma_measure(&c.u)?)];
    let mut worst: f64 = 0.0;
    for (k, full) in pairs {
        let mixed = measure::mixed_measure(&c.u, &c.v, k)?;
        for (a, b) in mixed.density.iter().zip(&full.density) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn capacity_bound(c: &SeedContext) -> Result<f64> {
    let m = c.model();
    let centre: Vec<f64> = (0..2 * m.n).map(|k| (0.37 * (c.seed + k as u64) as f64 + 0.1).fract()).collect();
    let u = SingularPrototype::new(&centre, 0.3, 0.3)?.with_admissible_scale(m, 0.2)?.sample(m)?;
    let mut family = vec![BasicFunction::zero(m)];
    for f in [&c.u, &c.v, &c.w] {
        let range = f.sup() - f.inf();
        family.push(f.add_const(-f.inf()).scale((1.0 / range).min(1.0)));
    }
    let t = -0.5 * u.inf();
    let mask: Vec<bool> = u.values().iter().map(|&x| x < -t).collect();
    let est = measure::capacity_lower(&mask, &family)?;
    let check = measure::capacity_bound_check(&u, t, &est)?;
    Ok(check.lhs - check.rhs)
}

fn cln(c: &SeedContext) -> Result<f64> {
    let r = measure::cln_check(&c.u, &c.v, &[])?;
    Ok(r.lhs - r.rhs)
}

// energies

fn fundamental(c: &SeedContext, p: f64) -> Result<f64> {
    let (lo, hi) = c.ordered_pair();
    let r = energy::fundamental_estimate_check(&lo, &hi, &chi(p))?;
    Ok(r.lhs - r.rhs)
}

fn fundamental_p1(c: &SeedContext) -> Result<f64> {
    fundamental(c, 1.0)
}

fn fundamental_p2(c: &SeedContext) -> Result<f64> {
    fundamental(c, 2.0)
}

fn mixed_bound(c: &SeedContext) -> Result<f64> {
    let (lo, hi) = c.ordered_pair();
    let r = energy::mixed_energy_bound_check(&lo, &hi, &chi(2.0))?;
    Ok(r.lhs - r.rhs)
}

fn cocycle(c: &SeedContext) -> Result<f64> {
    energy::cocycle_residual(&c.u, &c.v)
}

fn concavity(c: &SeedContext) -> Result<f64> {
    let [lo, mid, hi] = energy::concavity_sandwich(&c.u, &c.v)?;
    Ok((lo - mid).max(mid - hi))
}

fn i_j_sandwich(c: &SeedContext) -> Result<f64> {
    let n = c.model().n as f64;
    let i = energy::aubin_i(&c.u, &c.v)?;
    let j = energy::j_energy(&c.u, &c.v)?;
    Ok((i / (n + 1.0) - j).max(j - n * i / (n + 1.0)))
}

fn quasi_triangle(c: &SeedContext) -> Result<f64> {
    energy::i_quasi_triangle_ratio(&c.u, &c.v, &c.w)
}

fn orlicz_homogeneity(c: &SeedContext) -> Result<f64> {
    let d = c.v.sub(&c.u);
    let a = energy::orlicz_norm(&d, &c.u, &chi(2.0))?;
    let b = energy::orlicz_norm(&d.scale(2.5), &c.u, &chi(2.0))?;
    Ok((b - 2.5 * a).abs() / (2.5 * a).max(1e-300))
}

fn entropy_sign(c: &SeedContext) -> Result<f64> {
    Ok(-energy::entropy(&c.u)?)
}

// envelopes

fn envelope_fixed(c: &SeedContext) -> Result<f64> {
    Ok(envelope::envelope(&c.u, &EnvelopeMethod::sweep())?.envelope.sup_dist(&c.u))
}

fn rooftop_below(c: &SeedContext) -> Result<f64> {
    Ok(c.roof()?.sub(&c.u.min_with(&c.v)).sup())
}

fn solver_agreement(c: &SeedContext) -> Result<f64> {
    let beta = envelope::rooftop_with(&c.u, &c.v, &EnvelopeMethod::default_beta())?;
    Ok(beta.envelope.sup_dist(&c.roof()?))
}

fn decomposition(c: &SeedContext) -> Result<envelope::DecompositionReport> {
    let roof = envelope::rooftop_with(&c.u, &c.v, &EnvelopeMethod::sweep())?;
    envelope::contact_decomposition_residual(&c.u, &c.v, &roof)
}

fn noncontact_mass(c: &SeedContext) -> Result<f64> {
    Ok(decomposition(c)?.noncontact_mass)
}

fn contact_decomposition(c: &SeedContext) -> Result<f64> {
    Ok(decomposition(c)?.residual)
}

// geodesics

fn eps_residual(c: &SeedContext) -> Result<f64> {
    let opts = GeodesicOptions { m: c.scenario.slices, ..GeodesicOptions::default() };
    Ok(geodesic::eps_geodesic(&c.u, &c.v, c.scenario.eps[0], &opts)?.residual)
}

fn constant_speed(c: &SeedContext) -> Result<f64> {
    Ok(geodesic::speed_profile(&*c.geodesic()?, &chi(2.0)).max_deviation)
}

fn velocity_bound(c: &SeedContext) -> Result<f64> {
    Ok(c.geodesic()?.velocity_excess)
}

fn barriers(c: &SeedContext) -> Result<f64> {
    Ok(c.geodesic()?.barrier_violation)
}

fn convexity(c: &SeedContext) -> Result<f64> {
    Ok(-c.geodesic()?.min_convexity)
}

// metric space

fn symmetry(c: &SeedContext) -> Result<f64> {
    geodesic::symmetry_residual(&c.metric, &c.u, &c.v, &chi(2.0))
}

fn triangle(c: &SeedContext) -> Result<f64> {
    let r = geodesic::triangle_check(&c.metric, &c.u, &c.w, &c.v, 1.0)?;
    Ok(rel_excess(r.lhs, r.rhs))
}

fn pythagoras(c: &SeedContext) -> Result<f64> {
    Ok(geodesic::pythagoras_residual(&c.metric, &c.u, &c.v, 1.0)?.residual)
}

fn rooftop_formula(c: &SeedContext) -> Result<f64> {
    geodesic::rooftop_formula_residual(&c.metric, &c.u, &c.v, 0.0)
}

fn order_sandwich(c: &SeedContext) -> Result<f64> {
    let checks = geodesic::sandwich_check(&c.metric, &c.roof()?, &c.u, 1.0)?;
    Ok(checks.iter().map(|r| rel_excess(r.lhs, r.rhs)).fold(f64::NEG_INFINITY, f64::max))
}

fn distance_bracket(c: &SeedContext) -> Result<f64> {
    let d = c.metric.distance(&c.u, &c.v, &chi(1.0))?.value;
    let ip = geodesic::ip_functional(&c.u, &c.v, 1.0)?;
    Ok((d / ip).max(ip / d))
}

// canonical metrics

fn curvature_average(c: &SeedContext) -> Result<f64> {
    Ok(c.canonical()?.curvature_gap)
}

fn futaki_invariance(c: &SeedContext) -> Result<f64> {
    Ok(c.canonical()?.futaki_drift)
}

fn bilinear_invariance(c: &SeedContext) -> Result<f64> {
    Ok(c.canonical()?.bilinear_drift)
}

fn extremal_reference(c: &SeedContext) -> Result<f64> {
    Ok(c.canonical()?.extremal_fs)
}

fn k_mean(c: &SeedContext) -> Result<f64> {
    Ok(c.canonical()?.k_mean)
}

// type-I deformations

fn contact_identities(c: &SeedContext) -> Result<f64> {
    Ok(c.typei()?.contact)
}

fn margin_monotone(c: &SeedContext) -> Result<f64> {
    Ok(c.typei()?.increase)
}

fn margin_vanishes(c: &SeedContext) -> Result<f64> {
    Ok(c.typei()?.finest)
}

// cone charts

fn chart_n(seed: u64) -> usize {
    1 + (seed % 2) as usize
}

fn cr_order(c: &SeedContext) -> Result<f64> {
    let n = chart_n(c.seed);
    let chart = chart::cone_chart(n, LocalPotential::seeded_quartic(n, c.seed, 0.1), ChartDomain::ball(n, 0.5))?;
    Ok(2.0 - chart::cr_residual(&chart, &c.scenario.chart_levels).min_order().unwrap_or(f64::NEG_INFINITY))
}

fn cr_quadratic(c: &SeedContext) -> Result<f64> {
    let n = chart_n(c.seed);
    let chart = chart::cone_chart(n, LocalPotential::seeded_quadratic(n, c.seed, 0.1), ChartDomain::ball(n, 0.5))?;
    Ok(chart::cr_residual(&chart, &c.scenario.chart_levels).max_residual())
}

macro_rules! check {
    ($id:literal, $suite:ident, $statement:literal, $inputs:literal, $tol:expr, $run:ident) => {
        Check { id: $id, suite: Suite::$suite, statement: $statement, inputs: $inputs, tol: $tol, run: $run }
    };
}

static REGISTRY: &[Check] = &[
    check!("psh.margin-floor", Psh, "generated potentials have plurisubharmonicity margin δ", "u", 1e-9, margin_floor),
    check!("psh.sup-mean", Psh, "sup u ≤ mean(u) + C for plurisubharmonic u", "u", 1e-12, sup_mean),
    check!("psh.cutoff-monotone", Psh, "max(u, −h) decreases as h grows", "u", 0.0, cutoff_monotone),
    check!("psh.cutoff-exhausts", Psh, "max(u, −h) = u once h exceeds −inf u", "u", 0.0, cutoff_exhausts),
    check!("psh.mollify-constant", Psh, "smoothing fixes constants", "constant", 1e-12, mollify_constant),
    check!("psh.mollify-converges", Psh, "smoothings converge to u as the width shrinks", "u", 1e-12, mollify_converges),
    check!("ma.full-mass", Measures, "(ω_u)^n ∧ η has the total volume", "u", 1e-8, full_mass),
    check!("ma.density-floor", Measures, "the Monge–Ampère density is at least δ^n", "u", 1e-9, density_floor),
    check!("ma.max-identity", Measures, "ω_{max(u,v)}^n = ω_u^n on {u > v}", "u, v", 1e-6, max_identity),
    check!("ma.comparison", Measures, "∫_{u<v} ω_v^n ≤ ∫_{u<v} ω_u^n", "u, v", 1e-6, comparison),
    check!("ma.mixed-endpoints", Measures, "mixed measures interpolate ω_v^n and ω_u^n", "u, v", 1e-12, mixed_endpoints),
    check!("ma.capacity-bound", Measures, "capacity of {u < −t} is at most (∫(−u) + n·Vol)/t", "prototype; u, v, w", 0.0, capacity_bound),
    check!("ma.cln", Measures, "Chern–Levine–Nirenberg L¹ bound", "u, v", 1e-10, cln),
    check!("energy.fundamental-p1", Energies, "E_χ(v) ≤ (p+1)^n E_χ(u) for u ≤ v ≤ 0, p = 1", "u, w", 1e-10, fundamental_p1),
    check!("energy.fundamental-p2", Energies, "E_χ(v) ≤ (p+1)^n E_χ(u) for u ≤ v ≤ 0, p = 2", "u, w", 1e-10, fundamental_p2),
    check!("energy.mixed-bound", Energies, "∫χ(u) ω_v^n ≤ p·2^p (E_χ(u) + E_χ(v))", "u, w", 1e-10, mixed_bound),
    check!("energy.cocycle", Energies, "𝕀(u) − 𝕀(v) is a cocycle", "u, v", 1e-10, cocycle),
    check!("energy.concavity", Energies, "∫(u−v)ω_u^n ≤ 𝕀(u) − 𝕀(v) ≤ ∫(u−v)ω_v^n", "u, v", 1e-12, concavity),
    check!("energy.i-j-sandwich", Energies, "I/(n+1) ≤ J ≤ n·I/(n+1)", "u, v", 1e-8, i_j_sandwich),
    check!("energy.quasi-triangle", Energies, "I(u, w) ≤ C (I(u, v) + I(v, w))", "u, v, w", 100.0, quasi_triangle),
    check!("energy.orlicz-homogeneity", Energies, "the Orlicz norm is positively homogeneous", "u, v", 1e-8, orlicz_homogeneity),
    check!("energy.entropy-sign", Energies, "the relative entropy is non-negative", "u", 1e-14, entropy_sign),
    check!("envelope.fixed-point", Envelopes, "a plurisubharmonic obstacle is its own envelope", "u", 1e-12, envelope_fixed),
    check!("envelope.below-obstacle", Envelopes, "P(u, v) ≤ min(u, v)", "u, v", 1e-6, rooftop_below),
    check!("envelope.solver-agreement", Envelopes, "penalty and sweep envelopes agree", "u, v", 1e-5, solver_agreement),
    check!("envelope.noncontact-mass", Envelopes, "ω_P^n vanishes off the contact set", "u, v", 1e-4, noncontact_mass),
    check!("envelope.decomposition", Envelopes, "ω_P^n splits over the two contact sets", "u, v", 1e-8, contact_decomposition),
    check!("geodesic.eps-residual", Geodesics, "the ε-geodesic equation is solved", "u, v", 1e-8, eps_residual),
    check!("geodesic.constant-speed", Geodesics, "weak geodesics have constant Orlicz speed", "u, v", 0.01, constant_speed),
    check!("geodesic.velocity-bound", Geodesics, "sup|φ̇| ≤ ‖u₀ − u₁‖_∞", "u, v", 1e-3, velocity_bound),
    check!("geodesic.barriers", Geodesics, "the geodesic stays between its barriers", "u, v", 1e-5, barriers),
    check!("geodesic.convexity", Geodesics, "t ↦ φ_t is convex", "u, v", 1e-6, convexity),
    check!("metric.symmetry", MetricSpace, "d_p(u, v) = d_p(v, u)", "u, v", 1e-4, symmetry),
    check!("metric.triangle", MetricSpace, "d_p(u, v) ≤ d_p(u, w) + d_p(w, v)", "u, v, w", 0.02, triangle),
    check!("metric.pythagoras", MetricSpace, "d_p^p(u, v) = d_p^p(u, P) + d_p^p(P, v)", "u, v", 0.02, pythagoras),
    check!("metric.rooftop-formula", MetricSpace, "inf_t(φ_t − tτ) = P(u₀, u₁ − τ)", "u, v", 1e-3, rooftop_formula),
    check!("metric.order-sandwich", MetricSpace, "d_p^p is comparable to ∫|u−v|^p ω^n for ordered pairs", "u, v", 0.02, order_sandwich),
    check!("metric.distance-bracket", MetricSpace, "d_p and I_p are equivalent", "u, v", 16.0, distance_bracket),
    check!("canonical.curvature-average", Canonical, "the average scalar curvature is cohomological", "sphere u", 1e-4, curvature_average),
    check!("canonical.futaki-invariance", Canonical, "the Futaki invariant is independent of the potential", "sphere u", 1e-3, futaki_invariance),
    check!("canonical.bilinear-invariance", Canonical, "the Futaki–Mabuchi form is independent of the potential", "sphere u", 1e-3, bilinear_invariance),
    check!("canonical.extremal-reference", Canonical, "the extremal field of the round metric vanishes", "sphere reference", 1e-10, extremal_reference),
    check!("canonical.k-mean", Canonical, "the modified scalar curvature has zero mean", "sphere u", 1e-6, k_mean),
    check!("typei.contact", Typei, "deformed forms satisfy η(ξ) = 1, ι_ξ dη = 0, Φξ = 0", "direction", 1e-8, contact_identities),
    check!("typei.margin-monotone", Typei, "ε(ρ/2^k) decreases in k", "direction, profile", 1e-10, margin_monotone),
    check!("typei.margin-vanishes", Typei, "ε(ρ/2^k) tends to zero", "direction, profile", 0.05, margin_vanishes),
    check!("chart.cr-order", Charts, "cone-chart coordinates are holomorphic to second order", "local potential", 0.2, cr_order),
    check!("chart.cr-quadratic", Charts, "quadratic potentials give exactly holomorphic charts", "local potential", 1e-12, cr_quadratic),
];

pub fn checks() -> &'static [Check] {
    REGISTRY
}

pub fn find(id: &str) -> Option<&'static Check> {
    REGISTRY.iter().find(|c| c.id == id)
}

pub fn select(suite: Option<Suite>) -> Vec<&'static Check> {
    REGISTRY.iter().filter(|c| suite.is_none_or(|s| c.suite == s)).collect()
}
