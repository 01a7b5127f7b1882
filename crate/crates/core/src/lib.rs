//! Numerics for Gaussian log-moment-generating-function convexity and its
//! consequences: transport-map concavity, Rényi divergence comparisons,
//! conic intrinsic volume concentration, Wills-functional bounds and
//! exponential-sum zero structure.
//!
//! Monte Carlo loops run chunk-parallel through rayon when the default
//! `parallel` feature is enabled and sequentially otherwise; both paths
//! produce bit-identical results for a given [`gauss::SeededStream`].

// `!(x > 0.0)` style guards are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conic;
pub mod error;
pub mod expsum;
pub mod gauss;
pub mod mgf;
pub mod oracle;
pub mod par;
pub mod renyi;
pub mod transport;
pub mod wills;

pub use error::{Error, Result};

/// Library version, recorded in report headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
