//! Fibonacci networks: chains of small coordinate MLPs in which every block sees
//! the raw coordinate together with the outputs of the two blocks before it,
//! trained block-by-block against low-pass filtered (or pure-tone) targets.
//!
//! The crate is organised bottom-up:
//!
//! - [`nn`]: dense ReLU networks with exact backpropagation, Adam and a
//!   finite-difference gradient checker.
//! - [`signals`]: sampled 1-D signals, natural cubic splines, noise and the
//!   DFT low-pass filter.
//! - [`encodings`]: identity, sinusoidal, Gaussian and auxiliary-frequency
//!   input feature maps.
//! - [`fibnet`]: the block chain, its targets, composite loss and gradients.
//! - [`experiments`]: seeded experiment runners and CSV/JSON reporting.

pub mod encodings;
pub mod error;
pub mod experiments;
pub mod fibnet;
pub mod nn;
pub mod signals;
pub mod train;

pub use error::{Error, Result};
