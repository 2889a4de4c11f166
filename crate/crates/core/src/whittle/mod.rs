//! Parametric spectral families, Whittle likelihoods and local estimators.

mod family;
mod likelihood;
mod local;
mod optimize;

pub use crate::kernel::SmoothingKernel;
pub use family::{FamilyKind, FamilySpec, SpectralFamily};
pub use likelihood::{
    asymptotic_kl, fisher_information, fit_whittle, r_log_term, whittle_likelihood, whittle_score, FisherInformation,
    WhittleFit, YuleWalker,
};
pub use local::{
    band_grid, default_bandwidth, fit_local_whittle, local_covariance, local_covariances, local_weights,
    local_whittle_likelihood, local_yule_walker, local_yule_walker_curve, Bandwidth, LocalFitResult, LocalPoint,
    LocalYuleWalker,
};
pub use optimize::OptimizerConfig;
