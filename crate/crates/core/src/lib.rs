//! Mean curvature flow and volume-preserving mean curvature flow of
//! star-shaped hypersurfaces in hyperbolic space.
//!
//! A hypersurface is stored as a radial graph `u ↦ exp_p(ρ(u) u)` over the
//! unit sphere of a fixed center `p`. The parameter sphere is either a
//! periodic circle (curves in the hyperbolic plane) or an axisymmetric
//! polar-angle interval (rotationally symmetric hypersurfaces, `n ≥ 2`).
//!
//! The crate is split into:
//! - [`hyptrig`]: curvature-scaled hyperbolic trigonometry and the inverse
//!   functions used by the inradius bounds;
//! - [`grid`]: sphere discretizations and finite-difference operators;
//! - [`geometry`]: extrinsic geometry of radial graphs;
//! - [`integrals`]: quadrature, area, enclosed volume, averaged curvature;
//! - [`flow`]: time integration of the graph evolution equation;
//! - [`diagnostics`]: bound checks, rate fits and an independent
//!   curvature oracle built on the hyperboloid model;
//! - [`presets`]: named initial conditions;
//! - [`io`]: configuration parsing, CSV time series and snapshots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod hyptrig;
pub mod integrals;
pub mod io;
pub mod presets;

pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowMode, FlowState, Scheme, Trajectory};
pub use geometry::{GeometryFields, RadialGraph};
pub use grid::{Grid, ScalarField, Topology};
pub use hyptrig::LambdaParams;
