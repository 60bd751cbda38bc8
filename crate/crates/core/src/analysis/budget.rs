use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering::gamma_from_ratio;

/// Packaged experimental parameter set (detector outputs, attenuation,
/// loss, quantum efficiency and gain at 780 and 1560 nm).
pub const TABLE_ONE_JSON: &str = include_str!("../../data/table_one.json");

/// The confidence multiplier 3 is read as three standard deviations and
/// labelled 99%, although a two-sided Gaussian 3σ interval is 99.73%.
pub const CONFIDENCE_LABEL: &str = "99% (3 sigma convention)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub rel_uncertainty: f64,
}

impl Measured {
    pub fn new(value: f64, rel_uncertainty: f64) -> Self {
        Self {
            value,
            rel_uncertainty,
        }
    }
}

fn default_confidence() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentParams {
    pub v_780: Measured,
    pub v_1560: Measured,
    pub a_780: Measured,
    pub a_1560: Measured,
    pub l_780: Measured,
    pub l_1560: Measured,
    pub eta_780: Measured,
    pub eta_1560: Measured,
    pub g_780: Measured,
    pub g_1560: Measured,
    #[serde(default = "default_confidence")]
    pub confidence_multiplier: f64,
}

impl ExperimentParams {
    pub fn table_one() -> Self {
        Self::from_json(TABLE_ONE_JSON).expect("packaged parameter file is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self =
            serde_json::from_str(text).map_err(|e| Error::ParamsFormat(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// All ten entries with their keys, in file order.
    pub fn entries(&self) -> [(&'static str, Measured); 10] {
        [
            ("v_780", self.v_780),
            ("v_1560", self.v_1560),
            ("a_780", self.a_780),
            ("a_1560", self.a_1560),
            ("l_780", self.l_780),
            ("l_1560", self.l_1560),
            ("eta_780", self.eta_780),
            ("eta_1560", self.eta_1560),
            ("g_780", self.g_780),
            ("g_1560", self.g_1560),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (key, m) in self.entries() {
            if !(m.value.is_finite() && m.rel_uncertainty.is_finite()) {
                return Err(Error::InvalidParameter(format!("{key} is not finite")));
            }
            if m.rel_uncertainty < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{key} relative uncertainty is negative"
                )));
            }
            let ok = if key == "v_1560" {
                m.value >= 0.0
            } else {
                m.value > 0.0
            };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "{key} = {} out of range",
                    m.value
                )));
            }
        }
        if !(self.confidence_multiplier.is_finite() && self.confidence_multiplier > 0.0) {
            return Err(Error::InvalidParameter(
                "confidence_multiplier must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// `f_e = 1 + √(Σ rel_uncertainty²)` over all ten entries.
pub fn error_factor(params: &ExperimentParams) -> f64 {
    1.0 + params
        .entries()
        .iter()
        .map(|(_, m)| m.rel_uncertainty * m.rel_uncertainty)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub f_e: f64,
    pub r_bound: f64,
    pub gamma_bound: f64,
    pub confidence_label: String,
}

/// Upper bound on the inelastic/elastic ratio
///
/// `R ≤ k (V₁₅₆₀/V₇₈₀)(A₁₅₆₀/A₇₈₀)(L₁₅₆₀/L₇₈₀)(η₇₈₀/η₁₅₆₀)(g₇₈₀/g₁₅₆₀) f_e`
///
/// with `k` the confidence multiplier, and the matching `|γ| ≤ √(R/4)`.
pub fn ratio_bound(params: &ExperimentParams, f_e: f64) -> Result<BoundResult> {
    for (key, m) in [
        ("v_780", params.v_780),
        ("a_780", params.a_780),
        ("l_780", params.l_780),
        ("eta_1560", params.eta_1560),
        ("g_1560", params.g_1560),
    ] {
        if !(m.value.is_finite() && m.value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{key} = {} cannot be a denominator",
                m.value
            )));
        }
    }
    if !(f_e.is_finite() && f_e >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "error factor {f_e} must be >= 1"
        )));
    }
    let r_bound = params.confidence_multiplier
        * (params.v_1560.value / params.v_780.value)
        * (params.a_1560.value / params.a_780.value)
        * (params.l_1560.value / params.l_780.value)
        * (params.eta_780.value / params.eta_1560.value)
        * (params.g_780.value / params.g_1560.value)
        * f_e;
    if !(r_bound.is_finite() && r_bound >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bound {r_bound} is not a valid ratio"
        )));
    }
    Ok(BoundResult {
        f_e,
        r_bound,
        gamma_bound: gamma_from_ratio(r_bound)?,
        confidence_label: CONFIDENCE_LABEL.to_string(),
    })
}
