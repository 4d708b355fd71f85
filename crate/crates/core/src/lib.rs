//! Zero distribution of normalized exponential sums
//! `f(z) = 1 + H_1 e^{w_1 z} + ... + H_n e^{w_n z}`, `0 < w_1 < ... < w_n`.
//!
//! The crate splits the work into:
//!
//! - [`sum`] and [`eval`]: the data model and overflow-safe evaluation;
//! - [`strips`]: zero-free regions, critical strips and the real-part
//!   membership test;
//! - [`winding`]: certified argument-principle counting on rectangles and
//!   Backlund's bound;
//! - [`zeros`]: zero localization by subdivision, plus an exact oracle for
//!   commensurable frequencies;
//! - [`density`]: counting-law experiments (per-strip counts, Langer's bound,
//!   real-part closure, the disc-avoidance series).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod eval;
pub mod poly;
mod search;
pub mod strips;
pub mod sum;
pub mod winding;
pub mod zeros;

pub use error::{Error, Result};
pub use eval::{eval, eval_logderiv, eval_scaled, LogScaledValue};
pub use num_complex::Complex64;
pub use strips::{decompose, CriticalStrip, StripDecomposition, ZeroFreeRegion};
pub use sum::{ExpSum, ExpTerm, Normalized};
pub use winding::{backlund_bound, count_zeros, phase_change, BacklundBound, Rectangle, WindingResult};
pub use zeros::{find_zeros, find_zeros_in_rect, oracle_zeros_commensurable, ZeroMethod, ZeroRecord};
pub use density::{disc_experiment, langer_check, real_part_closure, strip_density, unit_band_counts, DensityReport, DiscExperiment};
