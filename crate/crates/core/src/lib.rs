//! Shaping codes and distribution-matching codes for noiseless, memoryless
//! costly channels.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation. File formats, the command-line driver and randomized
//! experiments live in the `shapecode` companion crate.
//!
//! Layout:
//!
//! - [`model`]: cost vectors, pmfs, code books, entropy and divergence.
//! - [`optimizer`]: cost-minimizing symbol distributions, optimal expansion
//!   factors, cost/rate curves and their closed-form derivatives.
//! - [`varn`]: minimum-cost code trees for uniform sources (Varn and
//!   modified Varn codes) with tree decoding.
//! - [`gsf`]: generalized Shannon–Fano codes for arbitrary i.i.d. sources.
//! - [`lz78`]: the lossless front-end used by the separation pipeline.
//! - [`pipeline`]: compress-then-shape encoding and its design report.
//! - [`metrics`]: occurrence probabilities, generalized expansion factor,
//!   I-divergence and serial KL statistics.
//!
//! All logarithms are base 2.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bits;
mod error;
mod float;
pub mod gsf;
pub mod lz78;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod pipeline;
mod root;
pub mod varn;

pub use error::{Error, Result};
pub use model::{CodeBook, CostVector, Pmf, SourceSpec};
