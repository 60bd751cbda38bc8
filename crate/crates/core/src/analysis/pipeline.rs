use super::budget::{error_factor, ratio_bound, BoundResult, ExperimentParams};
use super::fit::{fit_gaussian, fit_gaussian_with, FitOptions, FitResult};
use super::model::GaussianModel;
use crate::error::Result;
use crate::trace::ScanTrace;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub fit_780: FitResult,
    pub fit_1560: FitResult,
    /// Input parameters with `v_780` and `v_1560` replaced by the fit values.
    pub params: ExperimentParams,
    pub bound: BoundResult,
}

/// Elastic trace fitted with a free width; the inelastic trace is fitted at
/// that width and center, leaving peak and baseline free. The one-sigma
/// uncertainty of its peak (not the peak, which is consistent with zero)
/// becomes `V₁₅₆₀`.
pub fn full_pipeline(
    trace_780: &ScanTrace,
    trace_1560: &ScanTrace,
    params: &ExperimentParams,
) -> Result<PipelineReport> {
    params.validate()?;
    let fit_780 = fit_gaussian(trace_780, &GaussianModel::initial_guess(trace_780), None)?;
    let fit_1560 = fit_gaussian_with(
        trace_1560,
        &GaussianModel::initial_guess(trace_1560),
        &FitOptions {
            fixed_width: Some(fit_780.model.width),
            fixed_center: Some(fit_780.model.center),
            ..FitOptions::default()
        },
    )?;

    let mut used = params.clone();
    used.v_780.value = fit_780.model.peak;
    used.v_1560.value = fit_1560.sigma.peak;
    used.validate()?;
    let bound = ratio_bound(&used, error_factor(&used))?;
    Ok(PipelineReport {
        fit_780,
        fit_1560,
        params: used,
        bound,
    })
}
