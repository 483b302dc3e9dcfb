//! Weichselberger channel model for massive MIMO: sampling, closed-form
//! hardening and favorable-propagation moments, Monte Carlo checks and the
//! experiment sweeps built on them.

pub mod channel;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod moments;
pub mod montecarlo;
pub mod numerics;
pub mod sweep;

pub use error::{Error, Result};
