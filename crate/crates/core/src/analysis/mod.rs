//! Null-result data reduction: Gaussian peak fits to scan traces, the
//! parameter error budget, and the bounds on the rate ratio `R` and the
//! mixing angle `γ`.

mod budget;
mod calibration;
mod fit;
mod model;
mod pipeline;

pub use budget::{
    error_factor, ratio_bound, BoundResult, ExperimentParams, Measured, CONFIDENCE_LABEL,
    TABLE_ONE_JSON,
};
pub use calibration::{null_noise_for_peak_sigma, peak_sigma_per_unit_noise};
pub use fit::{fit_gaussian, fit_gaussian_with, FitOptions, FitParam, FitResult, ParamSigma};
pub use model::GaussianModel;
pub use pipeline::{full_pipeline, PipelineReport};
