//! Scenario configuration.
//!
//! The on-disk form is flat `key = value` text grouped under `[section]`
//! headers. Every key has an embedded default, so an empty file is a valid
//! scenario, and [`Scenario::to_text`] writes a file that parses back to the
//! identical scenario (floats use their shortest round-trip form).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use ini::Ini;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::registry;

/// Everything a suite run depends on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    /// Complex dimension of the torus model.
    pub torus_n: usize,
    /// Grid points per torus axis.
    pub torus_points: usize,
    /// Points per axis of each sphere chart.
    pub sphere_points: usize,
    pub seed_start: u64,
    pub seed_end: u64,
    /// Plurisubharmonicity margin of generated potentials.
    pub delta: f64,
    /// Highest Fourier mode of generated potentials.
    pub max_freq: usize,
    /// Time slices of every geodesic.
    pub slices: usize,
    /// Decreasing ε ladder for weak geodesics.
    pub eps: Vec<f64>,
    /// Sample points for the contact identities.
    pub typei_points: usize,
    /// Chart resolutions for the CR defect.
    pub chart_levels: Vec<usize>,
    /// Worker threads for seed-level parallelism; 0 uses every core.
    pub workers: usize,
    /// Per-check tolerance overrides keyed by check id.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            torus_n: 1,
            torus_points: 32,
            sphere_points: 64,
            seed_start: 1,
            seed_end: 5,
            delta: 0.3,
            max_freq: 2,
            slices: 16,
            eps: vec![2.5e-3, 1.25e-3, 6.25e-4],
            typei_points: 1000,
            chart_levels: vec![16, 32, 64],
            workers: 0,
            tolerances: BTreeMap::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(section: &str, key: &str, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| HarnessError::Config(format!("[{section}] {key}: cannot parse {raw:?}")))
}

fn parse_list<T: std::str::FromStr>(section: &str, key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',').map(|s| parse(section, key, s)).collect()
}

fn join<T: std::fmt::Debug>(xs: &[T]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

impl Scenario {
    /// Parse the `key = value` form, starting from the defaults.
    pub fn from_text(text: &str) -> Result<Scenario> {
        let ini = Ini::load_from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut s = Scenario::default();
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            for (key, raw) in props.iter() {
                match (section, key) {
                    ("model", "torus_n") => s.torus_n = parse(section, key, raw)?,
                    ("model", "torus_points") => s.torus_points = parse(section, key, raw)?,
                    ("model", "sphere_points") => s.sphere_points = parse(section, key, raw)?,
                    ("seeds", "start") => s.seed_start = parse(section, key, raw)?,
                    ("seeds", "end") => s.seed_end = parse(section, key, raw)?,
                    ("generator", "delta") => s.delta = parse(section, key, raw)?,
                    ("generator", "max_freq") => s.max_freq = parse(section, key, raw)?,
                    ("geodesic", "slices") => s.slices = parse(section, key, raw)?,
                    ("geodesic", "eps") => s.eps = parse_list(section, key, raw)?,
                    ("typei", "points") => s.typei_points = parse(section, key, raw)?,
                    ("charts", "levels") => s.chart_levels = parse_list(section, key, raw)?,
                    ("run", "workers") => s.workers = parse(section, key, raw)?,
                    ("tolerances", id) => {
                        if registry::find(id).is_none() {
                            return Err(HarnessError::Config(format!("[tolerances] unknown check id {id:?}")));
                        }
                        s.tolerances.insert(id.to_string(), parse(section, key, raw)?);
                    }
                    _ => return Err(HarnessError::Config(format!("unknown key {key:?} in section [{section}]"))),
                }
            }
        }
        s.validate()?;
        Ok(s)
    }

    /// The canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "[model]\ntorus_n = {}\ntorus_points = {}\nsphere_points = {}\n\n\
             [seeds]\nstart = {}\nend = {}\n\n\
             [generator]\ndelta = {:?}\nmax_freq = {}\n\n\
             [geodesic]\nslices = {}\neps = {}\n\n\
             [typei]\npoints = {}\n\n\
             [charts]\nlevels = {}\n\n\
             [run]\nworkers = {}\n\n[tolerances]\n",
            self.torus_n,
            self.torus_points,
            self.sphere_points,
            self.seed_start,
            self.seed_end,
            self.delta,
            self.max_freq,
            self.slices,
            join(&self.eps),
            self.typei_points,
            join(&self.chart_levels),
            self.workers,
        );
        for (id, tol) in &self.tolerances {
            let _ = writeln!(out, "{id} = {tol:?}");
        }
        out
    }

    /// Defaults followed by a commented list of every check tolerance.
    pub fn defaults_text() -> String {
        let mut out = Scenario::default().to_text();
        for c in registry::checks() {
            let _ = writeln!(out, "# {} = {:?}", c.id, c.tol);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(1..=2).contains(&self.torus_n) {
            return bad(format!("torus_n must be 1 or 2, got {}", self.torus_n));
        }
        if self.torus_points < 8 || self.sphere_points < 64 {
            return bad("torus_points must be ≥ 8 and sphere_points ≥ 64".into());
        }
        if self.seed_end < self.seed_start {
            return bad(format!("empty seed range {}..={}", self.seed_start, self.seed_end));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("delta {} outside (0, 1]", self.delta));
        }
        if self.eps.len() < 2 || self.eps.iter().any(|&e| !(e > 0.0)) || self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps must list two or more positive, strictly decreasing values".into());
        }
        if self.slices < 8 {
            return bad(format!("need at least 8 geodesic slices, got {}", self.slices));
        }
        if self.chart_levels.len() < 2 {
            return bad("charts.levels needs two or more resolutions".into());
        }
        Ok(())
    }

    pub fn seeds(&self) -> RangeInclusive<u64> {
        self.seed_start..=self.seed_end
    }

    /// Tolerance of a check, honouring overrides.
    pub fn tolerance(&self, id: &str, default: f64) -> f64 {
        self.tolerances.get(id).copied().unwrap_or(default)
    }
}

/// Parse `a:b` (inclusive) or a single seed.
pub fn parse_seed_range(s: &str) -> Result<(u64, u64)> {
    let usage = || HarnessError::Usage(format!("seed range {s:?} must look like 1:10"));
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse().map_err(|_| usage())?, b.trim().parse().map_err(|_| usage())?),
        None => {
            let a = s.trim().parse().map_err(|_| usage())?;
            (a, a)
        }
    };
    if b < a {
        return Err(usage());
    }
    Ok((a, b))
}
