//! Elastic and pair-creating channels of the mixed photon creation operator,
//! the `R = 4γ²` rate-ratio prediction, and pair-creation kinematics.
//!
//! The overall constant 4 of `R = 4γ²` comes from a rate calculation outside
//! this crate and is used as given. What is computed here is the operator
//! content: substituting the bare oscillaton operators
//! `ĉ_n = β(cos γ ĉ′_n − sin γ ĉ′†_n)` into `a′† = Σ √(n+1) ĉ†_{n+1} ĉ_n`
//! splits it into a number-conserving part (`β² cos²γ` per term) and a
//! pair-creating part (`−β² cos γ sin γ` per term), whose amplitudes are
//! reported per final state.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{build_annihilation, build_creation, MixingParams, ModeSpace, OperatorMatrix};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;

/// Predicted inelastic/elastic rate ratio `R = 4γ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPrediction {
    pub gamma: f64,
    pub ratio: f64,
}

pub fn predicted_ratio(gamma: f64) -> Result<RatioPrediction> {
    if !gamma.is_finite() || gamma.abs() >= FRAC_PI_4 {
        return Err(Error::MixingAngleOutOfDomain(gamma.abs()));
    }
    Ok(RatioPrediction {
        gamma,
        ratio: 4.0 * gamma * gamma,
    })
}

/// Non-negative `γ` with `4γ² = ratio`.
pub fn gamma_from_ratio(ratio: f64) -> Result<f64> {
    if ratio.is_nan() || ratio < 0.0 {
        return Err(Error::NegativeRatio(ratio));
    }
    Ok((ratio / 4.0).sqrt())
}

/// One final state reached by the pair-creating part.
#[derive(Debug, Clone, PartialEq)]
pub struct PairChannel {
    pub final_state: usize,
    pub occupation: Vec<u32>,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDecomposition {
    pub gamma: f64,
    pub initial_level: usize,
    pub initial_state: usize,
    pub elastic_state: usize,
    pub elastic_amplitude: f64,
    pub pair_amplitudes: Vec<PairChannel>,
}

impl ChannelDecomposition {
    /// `|pair amplitude|² / |elastic amplitude|²` for every pair channel.
    pub fn channel_ratios(&self) -> Vec<(&PairChannel, f64)> {
        let elastic = self.elastic_amplitude * self.elastic_amplitude;
        self.pair_amplitudes
            .iter()
            .map(|ch| (ch, ch.amplitude * ch.amplitude / elastic))
            .collect()
    }

    pub fn channel(&self, occupation: &[u32]) -> Option<&PairChannel> {
        self.pair_amplitudes
            .iter()
            .find(|ch| ch.occupation == occupation)
    }

    /// Channel where the pair occupies the initial level and the one above,
    /// e.g. `(m_0 = 2, m_1 = 1)` for a ground-level initial oscillaton.
    pub fn lowest_pair_channel(&self) -> Option<&PairChannel> {
        let levels = self.pair_amplitudes.first()?.occupation.len();
        let mut occ = vec![0u32; levels];
        occ[self.initial_level] = 2;
        occ[self.initial_level + 1] += 1;
        self.channel(&occ)
    }

    pub fn ratio_for(&self, channel: &PairChannel) -> f64 {
        (channel.amplitude / self.elastic_amplitude).powi(2)
    }
}

/// Matrix elements of the mixed `a′†` from one oscillaton at `initial_level`.
pub fn decompose_channels(
    space: &ModeSpace,
    params: &MixingParams,
    initial_level: usize,
) -> Result<ChannelDecomposition> {
    let levels = space.level_cutoff();
    if initial_level + 2 > levels {
        return Err(Error::InsufficientHeadroom(format!(
            "initial level {initial_level} needs level cutoff >= {}, have {levels}",
            initial_level + 2
        )));
    }
    if space.osc_cutoff() < 3 {
        return Err(Error::InsufficientHeadroom(format!(
            "pair final states hold 3 oscillatons, osc cutoff is {}",
            space.osc_cutoff()
        )));
    }

    let (cos, sin, beta) = (params.cos(), params.sin(), params.beta());
    let dim = space.dim();

    // bare ĉ_n expressed through dressed ladder matrices
    let mut bare = Vec::with_capacity(levels + 1);
    let mut pair_pattern = OperatorMatrix::zeros(dim);
    let mut dressed_up = Vec::with_capacity(levels + 1);
    for n in 0..=levels {
        let down = build_annihilation(space, n)?;
        let up = build_creation(space, n)?;
        bare.push(
            down.scale_real(cos)
                .sub(&up.scale_real(sin))?
                .scale_real(beta),
        );
        dressed_up.push(up);
    }
    let mut photon_up = OperatorMatrix::zeros(dim);
    for n in 0..levels {
        let weight = ((n + 1) as f64).sqrt();
        let term = bare[n + 1].adjoint().matmul(&bare[n])?;
        photon_up = photon_up.add(&term.scale_real(weight))?;
        // γ-independent support of the pair-creating part
        let pair = dressed_up[n + 1].matmul(&dressed_up[n])?;
        pair_pattern = pair_pattern.add(&pair.scale_real(weight))?;
    }

    let initial_state = space.single(initial_level)?;
    let elastic_state = space.single(initial_level + 1)?;
    let column: Vec<(usize, Complex64)> = photon_up.column(initial_state);
    let amplitude_at = |row: usize| {
        column
            .iter()
            .find(|(r, _)| *r == row)
            .map_or(0.0, |(_, v)| v.re)
    };
    let initial_total = space.total(initial_state);
    let pair_amplitudes = pair_pattern
        .column(initial_state)
        .into_iter()
        .filter(|(row, _)| space.total(*row) == initial_total + 2)
        .map(|(row, _)| PairChannel {
            final_state: row,
            occupation: space.occupation(row).to_vec(),
            amplitude: amplitude_at(row),
        })
        .collect();

    Ok(ChannelDecomposition {
        gamma: params.gamma(),
        initial_level,
        initial_state,
        elastic_state,
        elastic_amplitude: amplitude_at(elastic_state),
        pair_amplitudes,
    })
}

/// Incident photon and oscillaton mass for the inelastic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub omega_in: f64,
    pub mass: f64,
    pub c_light: f64,
    pub hbar: f64,
}

impl Kinematics {
    /// SI constants for `c` and `ħ`.
    pub fn new(omega_in: f64, mass: f64) -> Result<Self> {
        Self::with_constants(omega_in, mass, SPEED_OF_LIGHT, HBAR)
    }

    pub fn with_constants(omega_in: f64, mass: f64, c_light: f64, hbar: f64) -> Result<Self> {
        if !(omega_in.is_finite() && omega_in > 0.0) {
            return Err(Error::InvalidKinematics(format!(
                "omega must be > 0, got {omega_in}"
            )));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidKinematics(format!(
                "mass must be >= 0, got {mass}"
            )));
        }
        if !(c_light > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidKinematics(
                "physical constants must be positive".into(),
            ));
        }
        Ok(Self {
            omega_in,
            mass,
            c_light,
            hbar,
        })
    }

    pub fn photon_energy(&self) -> f64 {
        self.hbar * self.omega_in
    }

    pub fn pair_rest_energy(&self) -> f64 {
        2.0 * self.mass * self.c_light * self.c_light
    }
}

/// `ω′ = ω/2 − mc²/ħ`, defined only above the pair threshold `ħω > 2mc²`.
pub fn inelastic_frequency(k: &Kinematics) -> Result<f64> {
    let photon_energy = k.photon_energy();
    let pair_energy = k.pair_rest_energy();
    if photon_energy <= pair_energy {
        return Err(Error::BelowThreshold {
            photon_energy,
            pair_energy,
        });
    }
    Ok(0.5 * k.omega_in - k.mass * k.c_light * k.c_light / k.hbar)
}

/// `ω = 2πc/λ`.
pub fn angular_frequency_from_wavelength(wavelength_m: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / wavelength_m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ratio_values() {
        assert_eq!(predicted_ratio(0.0).unwrap().ratio, 0.0);
        assert_relative_eq!(
            predicted_ratio(0.01).unwrap().ratio,
            4e-4,
            max_relative = 1e-15
        );
        // |γ| ≤ 1.93e-4 ↔ R ≤ 1.48e-7, equal up to the published rounding
        let r = predicted_ratio(1.93e-4).unwrap().ratio;
        assert!((r - 1.48e-7).abs() / 1.48e-7 < 0.01, "{r}");
        assert!(predicted_ratio(0.8).is_err());
    }

    #[test]
    fn gamma_inversion() {
        assert_eq!(gamma_from_ratio(0.0).unwrap(), 0.0);
        assert_eq!(gamma_from_ratio(4.0).unwrap(), 1.0);
        let g = gamma_from_ratio(1.48e-7).unwrap();
        assert_relative_eq!(g, 1.923_538_406_167_134_8e-4, max_relative = 1e-12);
        assert!(matches!(
            gamma_from_ratio(-1e-9),
            Err(Error::NegativeRatio(_))
        ));
    }

    #[test]
    fn zero_angle_has_no_pair_amplitude() {
        let s = ModeSpace::new(6, 4).unwrap();
        for level in 0..=4 {
            let d = decompose_channels(&s, &MixingParams::new(0.0).unwrap(), level).unwrap();
            assert!(!d.pair_amplitudes.is_empty());
            assert!(d.pair_amplitudes.iter().all(|c| c.amplitude == 0.0));
            assert_relative_eq!(
                d.elastic_amplitude,
                ((level + 1) as f64).sqrt(),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn headroom_is_enforced() {
        let s = ModeSpace::new(6, 4).unwrap();
        let p = MixingParams::new(0.01).unwrap();
        assert!(matches!(
            decompose_channels(&s, &p, 5),
            Err(Error::InsufficientHeadroom(_))
        ));
        let shallow = ModeSpace::new(6, 2).unwrap();
        assert!(decompose_channels(&shallow, &p, 0).is_err());
    }

    #[test]
    fn massless_gives_half_frequency() {
        let k = Kinematics::new(2.4e15, 0.0).unwrap();
        assert_eq!(inelastic_frequency(&k).unwrap(), 1.2e15);
    }

    #[test]
    fn threshold_boundary_is_excluded() {
        let k = Kinematics::with_constants(4.0, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(k.photon_energy(), k.pair_rest_energy());
        assert!(matches!(
            inelastic_frequency(&k),
            Err(Error::BelowThreshold { .. })
        ));
    }

    #[test]
    fn telecom_conversion() {
        let omega = angular_frequency_from_wavelength(780e-9);
        let k = Kinematics::new(omega, 0.0).unwrap();
        let out = inelastic_frequency(&k).unwrap();
        assert_relative_eq!(
            out,
            angular_frequency_from_wavelength(1560e-9),
            max_relative = 1e-15
        );
        assert_relative_eq!(omega, 2.414_937_906_806_222e15, max_relative = 1e-14);
    }

    #[test]
    fn invalid_kinematics() {
        assert!(Kinematics::new(0.0, 0.0).is_err());
        assert!(Kinematics::new(1.0, -1.0).is_err());
    }
}
