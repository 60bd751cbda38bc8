//! Damped least-squares (Levenberg–Marquardt) Gaussian fit with a
//! forward-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use super::model::GaussianModel;
use crate::error::{Error, Result};
use crate::trace::ScanTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitParam {
    Peak,
    Center,
    Width,
    Baseline,
}

impl FitParam {
    pub fn name(self) -> &'static str {
        match self {
            FitParam::Peak => "peak",
            FitParam::Center => "center",
            FitParam::Width => "width",
            FitParam::Baseline => "baseline",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            FitParam::Peak | FitParam::Baseline => "V",
            FitParam::Center | FitParam::Width => "GHz",
        }
    }

    fn get(self, m: &GaussianModel) -> f64 {
        match self {
            FitParam::Peak => m.peak,
            FitParam::Center => m.center,
            FitParam::Width => m.width,
            FitParam::Baseline => m.baseline,
        }
    }

    fn set(self, m: &mut GaussianModel, v: f64) {
        match self {
            FitParam::Peak => m.peak = v,
            FitParam::Center => m.center = v,
            FitParam::Width => m.width = v,
            FitParam::Baseline => m.baseline = v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Clamp the width and drop it from the free parameters.
    pub fixed_width: Option<f64>,
    /// Hold the center at this detuning and drop it from the free parameters.
    pub fixed_center: Option<f64>,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub cost_tolerance: f64,
    pub relative_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            fixed_width: None,
            fixed_center: None,
            max_iterations: 200,
            gradient_tolerance: 1e-10,
            cost_tolerance: 1e-12,
            relative_step: 1e-6,
        }
    }
}

/// One-standard-deviation uncertainties; zero for a fixed parameter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamSigma {
    pub peak: f64,
    pub center: f64,
    pub width: f64,
    pub baseline: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: GaussianModel,
    pub sigma: ParamSigma,
    pub residual_rms: f64,
    /// `σ² (JᵀJ)⁻¹` over [`FitResult::free`], in that order.
    pub covariance: DMatrix<f64>,
    pub free: Vec<FitParam>,
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm of `Jᵀr` at the returned parameters.
    pub gradient_norm: f64,
    /// Sum of squared residuals.
    pub cost: f64,
}

pub const MIN_SAMPLES: usize = 8;

pub fn fit_gaussian(
    trace: &ScanTrace,
    initial: &GaussianModel,
    fixed_width: Option<f64>,
) -> Result<FitResult> {
    fit_gaussian_with(
        trace,
        initial,
        &FitOptions {
            fixed_width,
            ..FitOptions::default()
        },
    )
}

struct Problem<'a> {
    detuning: Vec<f64>,
    voltage: Vec<f64>,
    template: GaussianModel,
    free: Vec<FitParam>,
    // per-parameter magnitude used to floor the difference step
    scale: Vec<f64>,
    bounds: (f64, f64),
    options: &'a FitOptions,
}

impl Problem<'_> {
    fn model(&self, p: &DVector<f64>) -> GaussianModel {
        let mut m = self.template;
        for (k, param) in self.free.iter().enumerate() {
            param.set(&mut m, p[k]);
        }
        m
    }

    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        let m = self.model(p);
        DVector::from_iterator(
            self.detuning.len(),
            self.detuning
                .iter()
                .zip(&self.voltage)
                .map(|(&d, &v)| v - m.eval(d)),
        )
    }

    fn jacobian(&self, p: &DVector<f64>, r: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.detuning.len(), self.free.len());
        for k in 0..self.free.len() {
            let h = self.options.relative_step * p[k].abs().max(self.scale[k]);
            let mut shifted = p.clone();
            shifted[k] += h;
            let step = shifted[k] - p[k];
            let r_shift = self.residuals(&shifted);
            for i in 0..r.len() {
                jac[(i, k)] = (r_shift[i] - r[i]) / step;
            }
        }
        jac
    }

    /// Parameters held on a bound because descent points outward.
    fn pinned(&self, p: &DVector<f64>, grad: &DVector<f64>) -> Vec<bool> {
        self.free
            .iter()
            .enumerate()
            .map(|(k, param)| {
                *param == FitParam::Center
                    && ((p[k] <= self.bounds.0 && grad[k] > 0.0)
                        || (p[k] >= self.bounds.1 && grad[k] < 0.0))
            })
            .collect()
    }

    fn admissible(&self, p: &mut DVector<f64>) -> bool {
        for (k, param) in self.free.iter().enumerate() {
            match param {
                FitParam::Width if p[k] <= 0.0 => return false,
                FitParam::Center => p[k] = p[k].clamp(self.bounds.0, self.bounds.1),
                _ => {}
            }
        }
        p.iter().all(|v| v.is_finite())
    }
}

fn cost_of(r: &DVector<f64>) -> f64 {
    r.norm_squared()
}

pub fn fit_gaussian_with(
    trace: &ScanTrace,
    initial: &GaussianModel,
    options: &FitOptions,
) -> Result<FitResult> {
    initial.validate()?;
    let mut template = *initial;
    if let Some(w) = options.fixed_width {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidModel(format!(
                "fixed width must be > 0, got {w}"
            )));
        }
        template.width = w;
    }
    if let Some(c) = options.fixed_center {
        if !c.is_finite() {
            return Err(Error::InvalidModel(format!(
                "fixed center must be finite, got {c}"
            )));
        }
        template.center = c;
    }
    if trace.len() < MIN_SAMPLES {
        return Err(Error::InvalidTrace(format!(
            "fit needs at least {MIN_SAMPLES} samples, got {}",
            trace.len()
        )));
    }
    if trace.span() <= 2.0 * template.width {
        return Err(Error::InvalidTrace(format!(
            "scan range {} GHz must exceed twice the width {} GHz",
            trace.span(),
            template.width
        )));
    }

    let free: Vec<FitParam> = [
        (FitParam::Peak, true),
        (FitParam::Center, options.fixed_center.is_none()),
        (FitParam::Width, options.fixed_width.is_none()),
        (FitParam::Baseline, true),
    ]
    .into_iter()
    .filter_map(|(p, is_free)| is_free.then_some(p))
    .collect();
    let detuning: Vec<f64> = trace.detunings().collect();
    let voltage: Vec<f64> = trace.voltages().collect();
    let (vmin, vmax) = voltage
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let mut volt_scale = (vmax - vmin).max(vmax.abs()).max(vmin.abs());
    if volt_scale == 0.0 {
        volt_scale = 1.0;
    }
    let scale = free
        .iter()
        .map(|p| match p {
            FitParam::Peak | FitParam::Baseline => volt_scale,
            FitParam::Center | FitParam::Width => template.width,
        })
        .collect();
    let problem = Problem {
        bounds: (detuning[0], detuning[detuning.len() - 1]),
        detuning,
        voltage,
        template,
        free,
        scale,
        options,
    };

    let n_free = problem.free.len();
    let mut p = DVector::from_iterator(n_free, problem.free.iter().map(|f| f.get(&template)));
    if !problem.admissible(&mut p) {
        return Err(Error::InvalidModel(
            "initial guess outside the admissible region".into(),
        ));
    }
    let mut r = problem.residuals(&p);
    let mut cost = cost_of(&r);
    let mut lambda = 1e-3;
    let mut nu = 2.0;
    let mut damping_scale = DVector::<f64>::zeros(n_free);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        let jac = problem.jacobian(&p, &r);
        let grad = jac.transpose() * &r;
        let pinned = problem.pinned(&p, &grad);
        let projected = (0..n_free)
            .filter(|k| !pinned[*k])
            .fold(0.0f64, |acc, k| acc.max(grad[k].abs()));
        if cost == 0.0 || projected < options.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let mut normal = jac.transpose() * &jac;
        let mut rhs = -&grad;
        for k in (0..n_free).filter(|k| pinned[*k]) {
            normal.row_mut(k).fill(0.0);
            normal.column_mut(k).fill(0.0);
            normal[(k, k)] = 1.0;
            rhs[k] = 0.0;
        }
        // MINPACK-style scaling: damping per parameter never shrinks
        for k in (0..n_free).filter(|k| !pinned[*k]) {
            damping_scale[k] = damping_scale[k].max(normal[(k, k)]);
        }
        let diag_floor = 1e-12 * damping_scale.amax().max(f64::MIN_POSITIVE);

        let mut accepted = false;
        let mut stalled = false;
        for _ in 0..60 {
            let mut damped = normal.clone();
            for k in 0..n_free {
                damped[(k, k)] += lambda * damping_scale[k].max(diag_floor);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= nu;
                nu *= 2.0;
                continue;
            };
            let delta = chol.solve(&rhs);
            let mut trial = &p + &delta;
            if !problem.admissible(&mut trial) {
                lambda *= nu;
                nu *= 2.0;
                continue;
            }
            let step = &trial - &p;
            let r_trial = problem.residuals(&trial);
            let trial_cost = cost_of(&r_trial);
            if trial_cost < cost {
                // gain ratio against the linearized model ‖r + Jδ‖²
                let predicted = -(2.0 * step.dot(&grad) + step.dot(&(&normal * &step)));
                let rho = if predicted > 0.0 {
                    (cost - trial_cost) / predicted
                } else {
                    0.0
                };
                let relative_decrease = (cost - trial_cost) / cost;
                p = trial;
                r = r_trial;
                cost = trial_cost;
                lambda *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                lambda = lambda.max(1e-15);
                nu = 2.0;
                accepted = true;
                if relative_decrease < options.cost_tolerance {
                    converged = true;
                }
                break;
            }
            let negligible = (0..n_free)
                .all(|k| step[k].abs() <= 4.0 * f64::EPSILON * p[k].abs().max(problem.scale[k]));
            if negligible {
                stalled = true;
                break;
            }
            lambda *= nu;
            nu *= 2.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // no downhill step exists at working precision
            converged = stalled || lambda > 1e30;
            if converged {
                break;
            }
        }
    }
    if !converged {
        return Err(Error::FitNotConverged { iterations });
    }

    let model = problem.model(&p);
    let jac = problem.jacobian(&p, &r);
    let gradient_norm = (jac.transpose() * &r).amax();
    let n = problem.detuning.len();
    let dof = n.saturating_sub(n_free).max(1);
    let variance = cost / dof as f64;
    let covariance = if variance == 0.0 {
        DMatrix::zeros(n_free, n_free)
    } else {
        let normal = jac.transpose() * &jac;
        let inv = normal
            .cholesky()
            .ok_or_else(|| Error::DegenerateFit("normal equations are singular".into()))?
            .inverse();
        let cov = inv * variance;
        (&cov + cov.transpose()) * 0.5
    };
    if covariance.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("covariance is not finite".into()));
    }
    let mut sigma = ParamSigma::default();
    for (k, param) in problem.free.iter().enumerate() {
        let s = covariance[(k, k)].max(0.0).sqrt();
        match param {
            FitParam::Peak => sigma.peak = s,
            FitParam::Center => sigma.center = s,
            FitParam::Width => sigma.width = s,
            FitParam::Baseline => sigma.baseline = s,
        }
    }

    Ok(FitResult {
        model,
        sigma,
        residual_rms: (cost / n as f64).sqrt(),
        covariance,
        free: problem.free,
        converged,
        iterations,
        gradient_norm,
        cost,
    })
}
