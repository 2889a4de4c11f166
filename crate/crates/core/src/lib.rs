//! Locally stationary time series toolkit: time-varying ARMA simulation,
//! pre-periodogram based spectral-mean functionals, global and local Whittle
//! estimation, and Monte Carlo checks of the associated limit theory.

pub mod cli;
pub mod error;
pub mod kernel;
pub mod numeric;
pub mod process;
pub mod rng;
pub mod spectral;
pub mod verify;
pub mod whittle;

pub use error::{Error, Result};
