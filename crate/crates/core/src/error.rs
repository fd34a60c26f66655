use thiserror::Error;

/// Errors produced by the layerstack engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The material cannot be evaluated at the requested point
    /// (ideal mirrors, tables on the real axis, ...).
    #[error("unsupported evaluation: {0}")]
    UnsupportedEvaluation(String),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),

    /// `beta_j + gamma beta_k` vanishes at an interface.
    #[error("degenerate interface: {0}")]
    DegenerateInterface(String),

    /// The multiple-reflection denominator of a join fell below the floor.
    #[error("resonant singularity: |1 - r r e^(2i beta d)| = {magnitude:e} below floor {floor:e}")]
    Resonance { magnitude: f64, floor: f64 },

    /// Two stacks were chained across different media.
    #[error("medium mismatch: {0}")]
    MediumMismatch(String),

    /// An opaque coefficient source has no data for the requested mode.
    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undefined transmittance: {0}")]
    UndefinedTransmittance(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e} +/- {error_estimate:e} ({diagnostics})")]
    Convergence {
        estimate: f64,
        error_estimate: f64,
        diagnostics: String,
    },

    /// Malformed input data (CSV tables and the like).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
