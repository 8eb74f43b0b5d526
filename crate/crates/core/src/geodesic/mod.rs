//! Geodesics in the space of transverse Kähler potentials and the
//! Orlicz–Finsler metric structure.

pub mod metric;
pub mod solver;
pub mod weak;

pub use metric::*;
pub use solver::{eps_geodesic, eps_geodesic_warm, GeodesicOptions, GeodesicPath};
pub use weak::{extrapolate, weak_geodesic, WeakGeodesic, WeakOptions};
