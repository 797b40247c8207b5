use thiserror::Error;

/// Errors raised by geometry, controller and sensor queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NavError {
    #[error("axis is not a unit vector (norm {0})")]
    NonUnitAxis(f64),
    #[error("projector axis has zero length")]
    ZeroAxis,
    #[error("robot center coincides with its projection on the obstacle (|x_pi| = {0})")]
    DegenerateProjection(f64),
    #[error("state lies at the target, no perpendicular axis is defined")]
    ZeroState,
    #[error("boundary cloud is empty")]
    EmptyCloud,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
}
