//! Time-varying ARMA models: construction, stability validation, simulation,
//! spectral density, covariances and MA(infinity) coefficients.

mod curve;
mod model;
mod simulate;
mod transfer;

pub use curve::{CoefficientCurve, CurveSpec};
pub use model::{
    decay_weight, validate_model, Innovation, ModelSpec, StabilityPoint, TvArmaModel, DEFAULT_DELTA,
    DEFAULT_GRID_SIZE,
};
pub(crate) use model::poly_on_circle;
pub use simulate::{default_burn_in, simulate, simulate_stream, Sample};
pub use transfer::{limit_transfer, representation_gap, transfer_coefficients, TransferCoefficients};
pub(crate) use transfer::transfer_raw;

/// Free-function form of [`TvArmaModel::spectral_density`].
pub fn tv_spectral_density(model: &TvArmaModel, u: f64, lambda: f64) -> f64 {
    model.spectral_density(u, lambda)
}

/// Free-function form of [`TvArmaModel::covariance`].
pub fn tv_covariance(model: &TvArmaModel, u: f64, k: i64) -> f64 {
    model.covariance(u, k)
}
