use super::fit::{fit_gaussian_with, FitOptions};
use super::model::GaussianModel;
use crate::error::{Error, Result};
use crate::trace::{generate_trace, TraceSpec};

/// Median fitted one-sigma peak uncertainty per unit white-noise level for
/// a signal-free trace fitted at `width`, with the center held at `center`
/// when given.
///
/// The fit is equivariant under voltage scaling, so multiplying the result
/// by a noise level gives the expected peak uncertainty at that level. Each
/// calibration trace uses seed `seed_base + k`.
pub fn peak_sigma_per_unit_noise(
    n_samples: usize,
    span: f64,
    width: f64,
    center: Option<f64>,
    n_seeds: usize,
    seed_base: u64,
) -> Result<f64> {
    if n_seeds == 0 {
        return Err(Error::InvalidTrace(
            "calibration needs at least one seed".into(),
        ));
    }
    let null = GaussianModel::new(0.0, 0.0, width, 0.0)?;
    let options = FitOptions {
        fixed_width: Some(width),
        fixed_center: center,
        ..FitOptions::default()
    };
    let mut sigmas = Vec::with_capacity(n_seeds);
    for k in 0..n_seeds as u64 {
        let mut spec = TraceSpec::new(null, 1.0, n_samples, seed_base.wrapping_add(k));
        spec.span = span;
        let trace = generate_trace(&spec)?;
        let fit = fit_gaussian_with(&trace, &GaussianModel::initial_guess(&trace), &options)?;
        sigmas.push(fit.sigma.peak);
    }
    sigmas.sort_by(f64::total_cmp);
    let mid = sigmas.len() / 2;
    Ok(if sigmas.len() % 2 == 1 {
        sigmas[mid]
    } else {
        0.5 * (sigmas[mid - 1] + sigmas[mid])
    })
}

/// White-noise level whose fitted peak uncertainty has median `target`.
pub fn null_noise_for_peak_sigma(
    target: f64,
    n_samples: usize,
    span: f64,
    width: f64,
    center: Option<f64>,
    n_seeds: usize,
    seed_base: u64,
) -> Result<f64> {
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::InvalidTrace(format!("target {target} must be >= 0")));
    }
    Ok(target / peak_sigma_per_unit_noise(n_samples, span, width, center, n_seeds, seed_base)?)
}
