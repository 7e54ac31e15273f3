//! Numerical analysis of global Hölderian error bounds for real polynomials.
//!
//! For a polynomial `f` the crate estimates the set `H(f)` of levels `t` at
//! which the sublevel set `[f <= t]` admits a global Hölderian error bound,
//! its threshold `h(f)`, and the stability label of any level. The pipeline
//! lives in [`assembler::analyze`]; the lower layers are usable on their own.

pub mod assembler;
pub mod asymptotics;
pub mod config;
pub mod error;
pub mod newton;
pub mod optim;
pub mod poly;
pub mod rng;
pub mod serde_ext;
pub mod spectrum;

pub use config::ToleranceConfig;
pub use error::{Error, Result};
