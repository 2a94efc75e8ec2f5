//! Exact pure-dephasing dynamics for an N-level system coupled to a bath of
//! harmonic modes through a population-conserving interaction.
//!
//! Units are natural: `ħ = k_B = 1`, so temperatures and frequencies share a scale.
//!
//! ```
//! use dephasim::benchmarks;
//! use dephasim::decoherence::decoherence_factor;
//!
//! let model = benchmarks::one_mode_vacuum();
//! let pair = model.pair(1, 0).unwrap();
//! let d = decoherence_factor(&model, pair, 0.0).unwrap();
//! assert_eq!(d.total, 1.0);
//! ```

// `!(x > 0.0)` is used on purpose so NaN is rejected; quadrature nodes keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod benchmarks;
pub mod cli;
pub mod decoherence;
pub mod error;
pub mod kernels;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{validate_config, BathInitialState, BathMode, BathSpec, Level, LevelPair, SystemSpec, ValidatedModel};
