//! Steady states, dynamics and observables of two bosonic modes coupled by
//! both resonant (beam-splitter) and antiresonant (pair-creation) terms and
//! damped into local or common reservoirs.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod liouvillian;
pub mod observables;
pub mod output;
pub mod params;
pub mod statespace;
pub mod steadystate;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
pub use params::SystemParams;
pub use statespace::XDensityMatrix;
