//! Sasaki substrates, cone charts and Type-I deformations.

pub mod chart;
pub mod grid;
pub mod model;
pub mod typei;

pub use chart::{cone_chart, cr_residual, ChartDomain, ConeChart, CrTable, LocalPotential};
pub use grid::{GridSpec, Neighbors};
pub use model::{build_model, ModelKind, SasakiModel};
pub use typei::{contact_checks, typei_deform, typei_psh_margin, TypeIDeformation};
