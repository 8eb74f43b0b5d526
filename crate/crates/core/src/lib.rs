//! Numerical laboratory for transverse pluripotential theory on Sasaki
//! manifolds: models, plurisubharmonic functions, Monge–Ampère measures,
//! energies, envelopes, geodesics and canonical-metric invariants.

// `!(x > 0.0)` is the idiom used throughout to reject NaN alongside bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod canonical;
pub mod energy;
pub mod envelope;
pub mod error;
pub mod exec;
pub mod field;
pub mod geodesic;
pub mod geometry;
pub mod hessian;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod psh;
pub mod spectral;

pub use error::{Result, SptError};
pub use exec::Exec;
pub use field::BasicFunction;
pub use geometry::{GridSpec, ModelKind, SasakiModel};
