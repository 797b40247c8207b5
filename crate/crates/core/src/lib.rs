//! Hybrid feedback navigation of a spherical robot among convex obstacles in
//! three dimensions.
//!
//! The controller switches between a move-to-target mode (`u = −κ_s x`) and
//! an obstacle-avoidance mode that circulates around the nearest obstacle
//! inside a hyperplane through the target. The crate is organised as:
//!
//! - [`geometry`]: convex shapes, distances, projections, `R(a)`, `P(a)`.
//! - [`world`]: workspace, feasibility checks and nearest-obstacle queries.
//! - [`controller`]: control law, flow/jump sets and update laws.
//! - [`sensor`]: ray-cast boundary sensing and sensed membership tests.
//! - [`simulator`]: hybrid-time integration, event refinement and audits.

pub mod controller;
mod error;
pub mod geometry;
pub mod sensor;
pub mod simulator;
pub mod world;

pub use error::NavError;
pub use geometry::{ConvexShape, Mat3, Segment, Vec3};
