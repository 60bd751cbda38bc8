use crate::error::{Error, Result};
use crate::trace::ScanTrace;

/// `V(δ) = peak · exp(−(δ − center)² / (2 width²)) + baseline`
///
/// Voltages in V, detuning and width (the Gaussian σ) in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    pub peak: f64,
    pub center: f64,
    pub width: f64,
    pub baseline: f64,
}

impl GaussianModel {
    pub fn new(peak: f64, center: f64, width: f64, baseline: f64) -> Result<Self> {
        let m = Self {
            peak,
            center,
            width,
            baseline,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.peak, self.center, self.width, self.baseline]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        if self.width <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "width must be > 0, got {}",
                self.width
            )));
        }
        Ok(())
    }

    /// Unit-height Gaussian factor at `detuning`.
    pub fn shape(&self, detuning: f64) -> f64 {
        let z = (detuning - self.center) / self.width;
        (-0.5 * z * z).exp()
    }

    pub fn eval(&self, detuning: f64) -> f64 {
        self.peak * self.shape(detuning) + self.baseline
    }

    /// Starting point for a single-line trace: baseline = median, center at
    /// whichever extremum lies further from the median, peak = that
    /// extremum − median (negative for a dip), width = span / 8.
    pub fn initial_guess(trace: &ScanTrace) -> Self {
        let mut volts: Vec<f64> = trace.voltages().collect();
        volts.sort_by(f64::total_cmp);
        let n = volts.len();
        let median = if n % 2 == 1 {
            volts[n / 2]
        } else {
            0.5 * (volts[n / 2 - 1] + volts[n / 2])
        };
        let samples = trace.samples();
        let top = samples.iter().fold(
            samples[0],
            |best, s| if s.voltage > best.voltage { *s } else { best },
        );
        let bottom =
            samples.iter().fold(
                samples[0],
                |best, s| if s.voltage < best.voltage { *s } else { best },
            );
        let top = if median - bottom.voltage > top.voltage - median {
            bottom
        } else {
            top
        };
        Self {
            peak: top.voltage - median,
            center: top.detuning,
            width: trace.span() / 8.0,
            baseline: median,
        }
    }
}
