//! Gaussian-state simulation of pumped-up SU(1,1) interferometers.
//!
//! States are described by a displacement vector and covariance matrix in
//! the `x = a + a†`, `p = i(a† − a)` convention, so the vacuum has `σ = I`.
//! Mode 0 is the pump and modes 1 and 2 are the side modes.

// `!(x > 0.0)` is the NaN-rejecting form throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod diff;
pub mod error;
pub mod expm;
pub mod fock;
pub mod gaussian;
pub mod gw;
pub mod metrology;
pub mod pipeline;

pub use channels::{ChannelKind, ChannelSpec};
pub use error::{Error, Result};
pub use gaussian::{GaussianState, SymplecticOp};
pub use metrology::{MetrologyReport, Regime};
pub use pipeline::InterferometerConfig;
