//! Poincaré metrics on planar domains.
//!
//! The metric `e^{2u} |dz|^2` has curvature `-1` exactly when
//! `Δu - e^{2u} = 0`. The crate builds `u` by solving Dirichlet problems with
//! growing constant boundary data, checks the result against closed-form
//! metrics, and measures the geometry it encodes.

pub mod asymptotics;
pub mod cli;
pub mod discrete_ops;
pub mod error;
pub mod exact_metrics;
pub mod geometry;
pub mod hyperbolic;
pub mod linalg;
pub mod report;
pub mod riemann_map;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{build_grid, DomainSpec, Grid, Point, Rect, ScalarField};
