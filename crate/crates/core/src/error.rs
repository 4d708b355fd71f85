use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the exponential-sum toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("an exponential sum needs at least two terms to be normalized")]
    DegenerateSum,

    /// The log-derivative denominator vanished; `z` is (numerically) a zero.
    #[error("log-derivative denominator vanishes at z = {z}")]
    NearZeroDivide { z: Complex64 },

    /// A sample on an integration path came too close to a zero of f.
    #[error("f has a zero on the integration path near z = {z}")]
    ZeroOnPath { z: Complex64 },

    #[error("adaptive subdivision gave up after {points} sample points")]
    NoConvergence { points: usize },

    #[error("boundary perturbation failed after {attempts} attempts; shrink the rectangle")]
    PerturbationExhausted { attempts: usize },

    #[error("f vanishes at the anchor point z1 = {z}")]
    ZeroAtAnchor { z: Complex64 },

    #[error("radius R = {radius} must exceed the segment length T = {length} > 0")]
    InvalidRadius { radius: f64, length: f64 },

    #[error("frequencies are not commensurable: {0}")]
    NotCommensurable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
