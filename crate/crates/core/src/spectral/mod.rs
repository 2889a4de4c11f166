//! Pre-periodogram, tapers, spectral-mean functionals and their population
//! counterparts, norms of test functions and the limit covariance of the
//! empirical spectral process.

mod clt;
mod functional;
mod grid;
mod mean;
mod norms;
mod periodogram;
mod taper;

pub use clt::{clt_covariance, clt_covariance_matrix};
pub use functional::{menu, FrequencyPart, FunctionalTerm, ModelComponent, SpectralFunctional, TimeWeight};
pub use grid::FrequencyGrid;
pub use mean::{
    empirical_process, expected_spectral_mean, spectral_mean_freq, spectral_mean_lag, theoretical_functional,
    ExactCovariance, QuadConfig, QuadValue,
};
pub use norms::{norms, Norms};
pub use periodogram::{
    classical_periodogram, lag_pair, lag_products, periodogram_identity_gap, pre_periodogram, pre_periodogram_all,
};
pub(crate) use periodogram::weighted_lag_sums;
pub use taper::{Taper, TaperSpec};

/// `phi_hat(u, k)` for each `k` in `ks`.
pub fn fourier_coefficients(phi: &SpectralFunctional, u: f64, ks: &[i64]) -> Vec<num_complex::Complex64> {
    phi.fourier_coefficients(u, ks)
}

pub(crate) fn u_rule_for(model: &crate::process::TvArmaModel, taper: &TaperSpec, points: usize) -> crate::numeric::QuadRule {
    mean::u_rule(&[], model, taper, points)
}
