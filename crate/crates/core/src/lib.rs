//! Pilot selection from coded symbols for systematic polar codes.
//!
//! This crate holds the algorithmic core: GF(2) matrix structure of the
//! polar generator `G_N = F^{⊗n}`, information-set construction, the UEPS
//! and EPS pilot selections, pilot-aware systematic encoding with
//! successive-cancellation decoding, and a correlated Rayleigh channel with
//! LS/MMSE pilot estimation. Everything here is `no_std` + `alloc`; file IO,
//! worker pools and the command line live in the `polar-pilot` crate.
//!
//! Positions inside a code block (bit channels, codeword symbols, pilots)
//! are 1-based wherever they cross a public boundary, see [`IndexSet`].
//! Matrix entries of [`BitMatrix`] are addressed 0-based like any other
//! matrix type.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod codec;
pub mod construction;
pub mod error;
pub mod estimation;
pub mod gf2;
pub mod pilots;
pub mod sim;

pub use channel::{ChannelRealization, FadingGenerator, FadingScenario};
pub use codec::{LlrMode, LlrWord, ScDecoder};
pub use construction::{CodeSpec, ConstructionMethod};
pub use error::{Error, Result};
pub use estimation::{EstimatorConfig, EstimatorKind};
pub use gf2::{BitMatrix, IndexSet};
pub use pilots::{PilotPlan, Scheme, ThroughputReport};

/// Clamp applied to every log-likelihood ratio; stands in for "certain".
pub const LLR_MAX: f64 = 300.0;
