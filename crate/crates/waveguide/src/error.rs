//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building bases or solving junction problems.
#[derive(Debug, Error)]
pub enum WgError {
    /// Cross-section widths must be strictly positive.
    #[error("invalid cross-section: width = {width} must be positive")]
    NegativeWidth { width: f64 },

    /// The transverse grid cannot resolve the requested eigenfunction.
    #[error(
        "transverse grid too coarse: mode {mode_index} needs at least {needed} points, grid has {actual}"
    )]
    GridTooCoarse {
        mode_index: usize,
        needed: usize,
        actual: usize,
    },

    /// A weight line Im λ = ±rate passes through (or too close to) a pencil point.
    #[error(
        "weight line Im λ = {rate} collides with the pencil point of transverse eigenvalue μ = {mu} (distance {distance:.3e} < tol {tol:.3e})"
    )]
    WeightLineCollision {
        rate: f64,
        mu: f64,
        distance: f64,
        tol: f64,
    },

    /// The pairing Gram matrix of a chain group is numerically singular,
    /// so no flux-normalized combination exists.
    #[error("pairing Gram matrix is numerically singular (min |eigenvalue| = {min_abs_eig:.3e})")]
    SingularGram { min_abs_eig: f64 },

    /// augmented combinations need a flux-dual pair, q(w, w_dual) = i.
    #[error("wave pair is not flux-dual: |q(w, w_dual) - i| = {deviation:.3e} exceeds 1e-6")]
    NotFluxDual { deviation: f64 },

    /// Mesh step must divide every rectangle dimension and attachment offset.
    #[error("mesh step h = {h} does not divide {what} = {value} (remainder {remainder:.3e})")]
    MeshAlignment {
        h: f64,
        what: &'static str,
        value: f64,
        remainder: f64,
    },

    /// Arm truncation must leave room for the one-sided derivative stencil.
    #[error("arm truncation R = {r} too short: needs at least {min_slices} mesh slices, has {slices}")]
    TruncationTooShort {
        r: f64,
        min_slices: usize,
        slices: usize,
    },

    /// Neumann-series iteration failed to contract; the blend position T is too small.
    #[error(
        "series did not contract after {iterations} iterations (ratio {ratio:.3}); blend position T = {t} is too small"
    )]
    NoContraction {
        t: f64,
        ratio: f64,
        iterations: usize,
    },

    /// A linear solve hit a numerically singular matrix.
    #[error("singular linear system in {context} (pivot magnitude {pivot:.3e})")]
    Singular { context: &'static str, pivot: f64 },

    /// A requested quantity needs data the caller did not provide.
    #[error("{0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, WgError>;
