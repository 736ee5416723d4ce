//! Solver and verifier for the principal infinity-eigenvalue problem on
//! finite metric graphs.
//!
//! The eigenvalue is the reciprocal of the inradius; eigenfunctions solve the
//! obstacle equation `min{ |grad u| - lambda u, -Delta_inf u } = 0` with zero
//! boundary data, normalized to 1 on (a subset of) the high ridge. The crate
//! computes the eigenvalue and ridge exactly (rational arithmetic when all
//! edge lengths are rational), solves for minimal eigenfunctions with a
//! monotone discrete scheme, and certifies solution properties (Monge eikonal
//! solutions, comparison with cones, Harnack) by exact piecewise-linear
//! calculus.

pub mod builtin;
pub mod cone;
pub mod eikonal;
pub mod field;
pub mod graph;
pub mod grid;
pub mod io;
pub mod num;
pub mod plf;
pub mod solver;

pub use field::{boundary_distance_field, inradius_and_ridge, metric_ball, RidgeSet, SubDomain};
pub use graph::{EdgeId, GraphPoint, MetricGraph, VertexId, Violation};
pub use num::{Rat, Scalar};
pub use plf::{cone_function, distance_field, PLFunction, ScalarMap, SlopeTriple};
