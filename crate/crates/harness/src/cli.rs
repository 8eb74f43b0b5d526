//! Command-line surface of `spt`.
//!
//! Potentials are given as a grid file (`.sptg` or `.csv`), `zero`, or
//! `random:SEED` / `random:SEED:DELTA` for a seeded plurisubharmonic
//! function. Reports go to `--out` as JSON, or to stdout when it is absent.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spt_core::canonical::{self, FieldKind, HolomorphicFieldBasis};
use spt_core::energy::{self, EnergyReport, Weight};
use spt_core::envelope::{self, EnvelopeMethod};
use spt_core::geodesic::{self, GeodesicOptions, WeakOptions};
use spt_core::geometry::chart::{self, ChartDomain, LocalPotential};
use spt_core::geometry::typei::{self, InvariantProfile};
use spt_core::geometry::{build_model, GridSpec, ModelKind};
use spt_core::{io, measure, psh, BasicFunction, SasakiModel};

use crate::config::{parse_seed_range, Scenario};
use crate::error::{HarnessError, Result};
use crate::suite;

#[derive(Debug, Parser)]
#[command(name = "spt", version, about = "Transverse pluripotential numerics on Sasaki models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an ε-geodesic, or a weak geodesic with --extrapolate.
    Geodesic(GeodesicArgs),
    /// Plurisubharmonic envelope of an obstacle or rooftop of two potentials.
    Envelope(EnvelopeArgs),
    /// Orlicz–Finsler distance d_p between two potentials.
    Distance(DistanceArgs),
    /// Evaluate an energy functional.
    Energy(EnergyArgs),
    /// Capacity lower bound of a sublevel set, checked against the upper bound.
    Capacity(CapacityArgs),
    /// Futaki invariants and the extremal field on the sphere model.
    Futaki(FutakiArgs),
    /// Contact identities and the plurisubharmonicity margin of a type-I deformation.
    TypeiCheck(TypeiArgs),
    /// Cauchy–Riemann defect of a cone chart under refinement.
    ChartCheck(ChartArgs),
    /// Run a check battery and write JSON and CSV reports.
    Suite(SuiteArgs),
    /// Print or validate scenario configuration.
    Config(ConfigArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelChoice {
    /// Flat torus of complex dimension 1.
    Torus1,
    /// Flat torus of complex dimension 2.
    Torus2,
    /// Quasi-regular quotient over the projective line.
    Sphere,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Substrate model.
    #[arg(long, value_enum, default_value = "torus1")]
    pub model: ModelChoice,
    /// Grid points per axis (per chart for the sphere).
    #[arg(long, default_value_t = 32)]
    pub points: usize,
}

impl ModelArgs {
    pub fn build(&self) -> Result<Arc<SasakiModel>> {
        Ok(match self.model {
            ModelChoice::Torus1 => SasakiModel::torus(1, self.points)?,
            ModelChoice::Torus2 => SasakiModel::torus(2, self.points)?,
            ModelChoice::Sphere => SasakiModel::sphere(self.points)?,
        })
    }
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Starting potential.
    #[arg(long)]
    pub u0: String,
    /// End potential.
    #[arg(long)]
    pub u1: String,
    /// Regularization ε of a single ε-geodesic; must be positive.
    #[arg(long, conflicts_with = "extrapolate")]
    pub eps: Option<f64>,
    /// Solve the ε ladder and extrapolate to the weak geodesic.
    #[arg(long)]
    pub extrapolate: bool,
    /// Decreasing ε ladder used with --extrapolate.
    #[arg(long, value_delimiter = ',', default_values_t = [2.5e-3, 1.25e-3, 6.25e-4])]
    pub ladder: Vec<f64>,
    /// Number of time intervals.
    #[arg(long, default_value_t = 16)]
    pub slices: usize,
    /// Directory for the time slices as SPTG files.
    #[arg(long)]
    pub slices_dir: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodChoice {
    /// Monotone sweep.
    Sweep,
    /// Penalized equations along the default β schedule.
    Beta,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Obstacle for a plain envelope.
    #[arg(long, conflicts_with_all = ["u0", "u1"], required_unless_present_all = ["u0", "u1"])]
    pub obstacle: Option<String>,
    /// First potential of a rooftop.
    #[arg(long, requires = "u1")]
    pub u0: Option<String>,
    /// Second potential of a rooftop.
    #[arg(long, requires = "u0")]
    pub u1: Option<String>,
    /// Solver.
    #[arg(long, value_enum, default_value = "sweep")]
    pub method: MethodChoice,
    /// Grid file for the envelope (.sptg or .csv).
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub u0: String,
    #[arg(long)]
    pub u1: String,
    /// Exponent of the power weight |t|^p/p.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Use the log cosh weight instead of a power.
    #[arg(long)]
    pub log_cosh: bool,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Functional {
    /// Orlicz energy E_χ(u).
    EChi,
    /// Monge–Ampère energy 𝕀(u).
    Mono,
    /// Aubin I(u, v).
    AubinI,
    /// Aubin J(u, v).
    J,
    /// Relative entropy of ω_u^n.
    Entropy,
    /// Mabuchi K-energy.
    KEnergy,
    /// Orlicz norm of v with respect to ω_u^n.
    OrliczNorm,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub functional: Functional,
    #[arg(long)]
    pub u: String,
    /// Second operand for aubin-i, j and orlicz-norm.
    #[arg(long)]
    pub v: Option<String>,
    /// Weight exponent for e-chi and orlicz-norm.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Non-positive potential whose sublevel set {u < −t} is measured.
    #[arg(long)]
    pub u: String,
    /// Level t > 0.
    #[arg(long)]
    pub threshold: f64,
    /// Candidate potentials with values in [0, 1]; the zero function is always included.
    #[arg(long, value_delimiter = ',')]
    pub candidates: Vec<String>,
    /// Projected-ascent steps from the best candidate.
    #[arg(long, default_value_t = 20)]
    pub ascent_steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FutakiArgs {
    /// Points per sphere chart.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Potential on the sphere model.
    #[arg(long, default_value = "zero")]
    pub u: String,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TypeiArgs {
    /// Reeb weights (a1, a2) of the contact 3-sphere.
    #[arg(long, default_value_t = 1.0)]
    pub a1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub a2: f64,
    /// Deformation vector ρ.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0.1, 0.0])]
    pub rho: Vec<f64>,
    /// Sample points for the contact identities.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Halvings of ρ for the margin scan.
    #[arg(long, default_value_t = 6)]
    pub halvings: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    /// Complex dimension of the chart.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Amplitude of the seeded local potential.
    #[arg(long, default_value_t = 0.1)]
    pub amp: f64,
    /// Use a quadratic potential (exactly holomorphic charts).
    #[arg(long)]
    pub quadratic: bool,
    /// Radius of the chart ball.
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    /// Finite-difference resolutions.
    #[arg(long, value_delimiter = ',', default_values_t = [16, 32, 64])]
    pub levels: Vec<usize>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// psh, measures, energies, envelopes, geodesics, metric-space, canonical, typei, charts or all.
    #[arg(long, default_value = "all")]
    pub name: String,
    /// Scenario file; defaults are used for missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Inclusive seed range `a:b`, overriding the scenario.
    #[arg(long)]
    pub seed_range: Option<String>,
    /// Worker threads, overriding the scenario (0 = all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Report directory.
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Print the embedded defaults.
    #[arg(long, conflicts_with = "check")]
    pub defaults: bool,
    /// Validate a scenario file and print its canonical form.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

/// Resolve a potential argument.
pub fn load_potential(source: &str, model: &Arc<SasakiModel>) -> Result<BasicFunction> {
    if source == "zero" {
        return Ok(BasicFunction::zero(model).with_label("zero"));
    }
    if let Some(rest) = source.strip_prefix("random:") {
        let bad = || HarnessError::Usage(format!("potential {source:?} must look like random:SEED or random:SEED:DELTA"));
        let mut parts = rest.split(':');
        let seed: u64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let delta: f64 = match parts.next() {
            Some(d) => d.parse().map_err(|_| bad())?,
            None => 0.3,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        return Ok(psh::random_tpsh(model, seed, delta, 2)?.with_label(source));
    }
    Ok(io::read_grid(Path::new(source), model)?.with_label(source))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

#[derive(Serialize)]
struct GeodesicReport {
    kind: &'static str,
    u0: String,
    u1: String,
    eps: Vec<f64>,
    slices: usize,
    residual: f64,
    newton_iterations: usize,
    krylov_iterations: usize,
    /// `sup |φ̇| − ‖u₀ − u₁‖_∞` (weak geodesics only).
    velocity_excess: Option<f64>,
    barrier_violation: Option<f64>,
    min_convexity: f64,
    /// Orlicz speeds for p = 1 at every slice (weak geodesics only).
    speeds_p1: Option<Vec<f64>>,
}

fn geodesic_cmd(a: &GeodesicArgs) -> Result<bool> {
    let model = a.model.build()?;
    let opts = GeodesicOptions { m: a.slices, ..GeodesicOptions::default() };
    let (u0, u1) = (load_potential(&a.u0, &model)?, load_potential(&a.u1, &model)?);
    let (path, report) = match (a.eps, a.extrapolate) {
        (Some(eps), false) => {
            if !(eps > 0.0) {
                return Err(usage(format!("--eps must be > 0 (got {eps}); use --extrapolate for weak geodesics")));
            }
            let p = geodesic::eps_geodesic(&u0, &u1, eps, &opts)?;
            let r = GeodesicReport {
                kind: "eps",
                u0: a.u0.clone(),
                u1: a.u1.clone(),
                eps: vec![eps],
                slices: a.slices,
                residual: p.residual,
                newton_iterations: p.newton_iterations,
                krylov_iterations: p.krylov_iterations,
                velocity_excess: None,
                barrier_violation: None,
                min_convexity: p.min_second_difference(),
                speeds_p1: None,
            };
            (p, r)
        }
        (None, true) => {
            let weak = WeakOptions { eps: a.ladder.clone(), geodesic: opts, ..WeakOptions::default() };
            let g = geodesic::weak_geodesic(&u0, &u1, &weak)?;
            let speeds = geodesic::speed_profile(&g, &Weight::power(1.0)?).speeds;
            let r = GeodesicReport {
                kind: "weak",
                u0: a.u0.clone(),
                u1: a.u1.clone(),
                eps: a.ladder.clone(),
                slices: a.slices,
                residual: g.path.residual,
                newton_iterations: g.path.newton_iterations,
                krylov_iterations: g.path.krylov_iterations,
                velocity_excess: Some(g.velocity_excess),
                barrier_violation: Some(g.barrier_violation),
                min_convexity: g.min_convexity,
                speeds_p1: Some(speeds),
            };
            (g.path.clone(), r)
        }
        _ => return Err(usage("give --eps E (E > 0) or --extrapolate")),
    };
    if let Some(dir) = &a.slices_dir {
        std::fs::create_dir_all(dir)?;
        for j in 0..=path.m() {
            io::write_grid(&dir.join(format!("slice_{j:03}.sptg")), &path.slice(j))?;
        }
    }
    emit(&report, a.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct EnvelopeReport {
    method: String,
    iterations: usize,
    /// `sup max(0, P − obstacle)`.
    residual: f64,
    margin: f64,
    /// Fraction of nodes in each contact set.
    contact_fraction: Vec<f64>,
    noncontact_mass: Option<f64>,
}

fn envelope_cmd(a: &EnvelopeArgs) -> Result<bool> {
    let model = a.model.build()?;
    let method = match a.method {
        MethodChoice::Sweep => EnvelopeMethod::sweep(),
        MethodChoice::Beta => EnvelopeMethod::default_beta(),
    };
    let (res, noncontact) = match (&a.obstacle, &a.u0, &a.u1) {
        (Some(f), _, _) => (envelope::envelope(&load_potential(f, &model)?, &method)?, None),
        (None, Some(u0), Some(u1)) => {
            let (u0, u1) = (load_potential(u0, &model)?, load_potential(u1, &model)?);
            let r = envelope::rooftop_with(&u0, &u1, &method)?;
            let d = envelope::contact_decomposition_residual(&u0, &u1, &r)?;
            (r, Some(d.noncontact_mass))
        }
        _ => return Err(usage("give --obstacle, or both --u0 and --u1")),
    };
    if let Some(path) = &a.grid_out {
        io::write_grid(path, &res.envelope)?;
    }
    let report = EnvelopeReport {
        method: res.method.clone(),
        iterations: res.iterations,
        residual: res.residual,
        margin: res.margin,
        contact_fraction: res.contacts.iter().map(|c| c.iter().filter(|&&b| b).count() as f64 / c.len() as f64).collect(),
        noncontact_mass: noncontact,
    };
    emit(&report, a.out.as_deref())?;
    Ok(true)
}

fn distance_cmd(a: &DistanceArgs) -> Result<bool> {
    let model = a.model.build()?;
    let chi = if a.log_cosh { Weight::log_cosh() } else { Weight::power(a.p).map_err(|e| usage(e.to_string()))? };
    let (u0, u1) = (load_potential(&a.u0, &model)?, load_potential(&a.u1, &model)?);
    emit(&geodesic::distance(&u0, &u1, &chi)?, a.out.as_deref())?;
    Ok(true)
}

fn energy_cmd(a: &EnergyArgs) -> Result<bool> {
    let model = a.model.build()?;
    let u = load_potential(&a.u, &model)?;
    let v = a.v.as_deref().map(|s| load_potential(s, &model)).transpose()?;
    let need_v = || v.as_ref().ok_or_else(|| usage("this functional needs --v"));
    let chi = || Weight::power(a.p).map_err(|e| usage(e.to_string()));
    let (name, value, operands) = match a.functional {
        Functional::EChi => ("e_chi", energy::e_chi(&u, &chi()?)?, vec![a.u.clone()]),
        Functional::Mono => ("mono_energy", energy::mono_energy(&u)?, vec![a.u.clone()]),
        Functional::AubinI => ("aubin_i", energy::aubin_i(&u, need_v()?)?, vec![a.u.clone(), a.v.clone().unwrap_or_default()]),
        Functional::J => ("j_energy", energy::j_energy(&u, need_v()?)?, vec![a.u.clone(), a.v.clone().unwrap_or_default()]),
        Functional::Entropy => ("entropy", energy::entropy(&u)?, vec![a.u.clone()]),
        Functional::KEnergy => ("k_energy", energy::k_energy(&u)?, vec![a.u.clone()]),
        Functional::OrliczNorm => {
            ("orlicz_norm", energy::orlicz_norm(need_v()?, &u, &chi()?)?, vec![a.u.clone(), a.v.clone().unwrap_or_default()])
        }
    };
    let report = EnergyReport { name: name.into(), value, operands, tol: 0.0 };
    emit(&report, a.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct CapacityReport {
    threshold: f64,
    nodes: usize,
    estimate: measure::CapacityEstimate,
    bound: measure::InequalityCheck,
}

fn capacity_cmd(a: &CapacityArgs) -> Result<bool> {
    if !(a.threshold > 0.0) {
        return Err(usage(format!("--threshold must be > 0 (got {})", a.threshold)));
    }
    let model = a.model.build()?;
    let u = load_potential(&a.u, &model)?;
    let mut family = vec![BasicFunction::zero(&model)];
    for c in &a.candidates {
        family.push(load_potential(c, &model)?);
    }
    let mask: Vec<bool> = u.values().iter().map(|&x| x < -a.threshold).collect();
    let mut est = measure::capacity_lower(&mask, &family)?;
    if a.ascent_steps > 0 {
        let start = &family[est.candidate.unwrap_or(0)];
        let (_, climbed) = measure::capacity_ascent(&mask, start, a.ascent_steps, a.seed)?;
        if climbed > est.lower {
            est.ascent_gain = climbed - est.lower;
            est.lower = climbed;
            est.candidate = None;
        }
    }
    let bound = measure::capacity_bound_check(&u, a.threshold, &est)?;
    let report = CapacityReport { threshold: a.threshold, nodes: mask.iter().filter(|&&b| b).count(), estimate: est, bound };
    emit(&report, a.out.as_deref())?;
    Ok(bound.pass)
}

#[derive(Serialize)]
struct FutakiRow {
    field: &'static str,
    value: f64,
    potential_form: f64,
}

#[derive(Serialize)]
struct FutakiReport {
    u: String,
    futaki: Vec<FutakiRow>,
    extremal: canonical::ExtremalField,
    modified_k_mean: f64,
}

fn futaki_cmd(a: &FutakiArgs) -> Result<bool> {
    let model = SasakiModel::sphere(a.points)?;
    let u = load_potential(&a.u, &model)?;
    let basis = HolomorphicFieldBasis::standard();
    let futaki = basis
        .fields
        .iter()
        .map(|&k: &FieldKind| {
            canonical::futaki(k, &u).map(|f| FutakiRow { field: k.name(), value: f.value, potential_form: f.potential_form })
        })
        .collect::<spt_core::Result<Vec<_>>>()?;
    let (_, extremal) = canonical::canonical_table(&basis, &u)?;
    let modified_k_mean = canonical::modified_k_integrand(&u, Some(&extremal))?.mean;
    emit(&FutakiReport { u: a.u.clone(), futaki, extremal, modified_k_mean }, a.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct TypeiReport {
    reeb: [f64; 2],
    rho: [f64; 2],
    contact: typei::ContactReport,
    /// Margin scan along ρ/2^k, k = 0, 1, …
    margins: Vec<typei::TypeIMargin>,
    monotone: bool,
}

fn typei_cmd(a: &TypeiArgs) -> Result<bool> {
    let model = build_model(ModelKind::WeightedContactS3 { a1: a.a1, a2: a.a2 }, GridSpec::torus(1, 64), None)?;
    let [r0, r1] = a.rho[..] else {
        return Err(HarnessError::Usage(format!("--rho takes two values, got {}", a.rho.len())));
    };
    let rho = [r0, r1];
    let def = typei::typei_deform(&model, rho)?;
    let contact = typei::contact_checks(&def, &typei::sample_points(a.points, a.seed));
    let prof = InvariantProfile::seeded(a.seed, 3, 1.0);
    let base = typei::typei_psh_margin(&typei::typei_deform(&model, [0.0, 0.0])?, prof.as_fn(), 1e6)?;
    let prof = prof.scale(1.0 / (1.0 - base.base_margin));
    let margins = (0..a.halvings)
        .map(|k| {
            let s = 0.5f64.powi(k as i32);
            typei::typei_psh_margin(&typei::typei_deform(&model, [rho[0] * s, rho[1] * s])?, prof.as_fn(), 1e6)
        })
        .collect::<spt_core::Result<Vec<_>>>()?;
    let monotone = margins.windows(2).all(|w| w[1].eps_required <= w[0].eps_required + 1e-10);
    let pass = contact.pass && monotone;
    emit(&TypeiReport { reeb: def.reeb(), rho, contact, margins, monotone }, a.out.as_deref())?;
    Ok(pass)
}

fn chart_cmd(a: &ChartArgs) -> Result<bool> {
    if a.levels.len() < 2 {
        return Err(usage("--levels needs two or more resolutions"));
    }
    let h = if a.quadratic {
        LocalPotential::seeded_quadratic(a.n, a.seed, a.amp)
    } else {
        LocalPotential::seeded_quartic(a.n, a.seed, a.amp)
    };
    let c = chart::cone_chart(a.n, h, ChartDomain::ball(a.n, a.radius))?;
    emit(&chart::cr_residual(&c, &a.levels), a.out.as_deref())?;
    Ok(true)
}

fn suite_cmd(a: &SuiteArgs) -> Result<bool> {
    let mut scenario = match &a.config {
        Some(path) => Scenario::from_text(&std::fs::read_to_string(path)?)?,
        None => Scenario::default(),
    };
    if let Some(r) = &a.seed_range {
        (scenario.seed_start, scenario.seed_end) = parse_seed_range(r)?;
    }
    if let Some(w) = a.workers {
        scenario.workers = w;
    }
    let report = suite::run_suite(&a.name, &scenario)?;
    let (json, csv) = report.write(&a.out)?;
    let s = &report.summary;
    for c in &s.checks {
        if c.passed < c.rows {
            println!("FAIL {:<32} {}/{} passed", c.check_id, c.passed, c.rows);
        }
    }
    println!("{}: {} rows, {} passed, {} failed ({} errors)", report.suite, s.rows, s.passed, s.failed, s.errors);
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(report.all_pass())
}

fn config_cmd(a: &ConfigArgs) -> Result<bool> {
    match &a.check {
        Some(path) => print!("{}", Scenario::from_text(&std::fs::read_to_string(path)?)?.to_text()),
        None if a.defaults => print!("{}", Scenario::defaults_text()),
        None => return Err(usage("give --defaults or --check FILE")),
    }
    Ok(true)
}

/// Run a parsed command. `Ok(false)` means the command ran but a check it
/// performs failed.
pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Geodesic(a) => geodesic_cmd(a),
        Command::Envelope(a) => envelope_cmd(a),
        Command::Distance(a) => distance_cmd(a),
        Command::Energy(a) => energy_cmd(a),
        Command::Capacity(a) => capacity_cmd(a),
        Command::Futaki(a) => futaki_cmd(a),
        Command::TypeiCheck(a) => typei_cmd(a),
        Command::ChartCheck(a) => chart_cmd(a),
        Command::Suite(a) => suite_cmd(a),
        Command::Config(a) => config_cmd(a),
    }
}
