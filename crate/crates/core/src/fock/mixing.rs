use std::f64::consts::FRAC_PI_4;

use super::operator::OperatorMatrix;
use crate::error::{Error, Result};

/// Mixing angle `γ` and its normalization `β = (cos²γ − sin²γ)^(−1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingParams {
    gamma: f64,
    beta: f64,
}

impl MixingParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma.abs() >= FRAC_PI_4 {
            return Err(Error::MixingAngleOutOfDomain(gamma.abs()));
        }
        let beta = 1.0 / (2.0 * gamma).cos().sqrt();
        Ok(Self { gamma, beta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn cos(&self) -> f64 {
        self.gamma.cos()
    }

    pub fn sin(&self) -> f64 {
        self.gamma.sin()
    }
}

// Entrywise tolerance when checking that a supplied partner is the adjoint.
const ADJOINT_TOLERANCE: f64 = 1e-12;

/// Bogoliubov mixing
///
/// `ĉ′ = β(cos γ ĉ + sin γ ĉ†)`, `ĉ′† = β(sin γ ĉ + cos γ ĉ†)`.
///
/// The second line is evaluated as written and then checked against the
/// adjoint of the first; for real `γ` they must agree.
pub fn bogoliubov_transform(
    c: &OperatorMatrix,
    c_dagger: &OperatorMatrix,
    params: &MixingParams,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if c.dim() != c_dagger.dim() {
        return Err(Error::DimensionMismatch {
            left: c.dim(),
            right: c_dagger.dim(),
        });
    }
    check_adjoint(c, c_dagger)?;

    let (cos, sin, beta) = (params.cos(), params.sin(), params.beta());
    let mixed = c
        .scale_real(cos)
        .add(&c_dagger.scale_real(sin))?
        .scale_real(beta);
    let mixed_dagger = c
        .scale_real(sin)
        .add(&c_dagger.scale_real(cos))?
        .scale_real(beta);

    check_adjoint(&mixed, &mixed_dagger)?;
    Ok((mixed, mixed_dagger))
}

fn check_adjoint(op: &OperatorMatrix, partner: &OperatorMatrix) -> Result<()> {
    let scale = op.entries().fold(1.0f64, |acc, (_, v)| acc.max(v.norm()));
    let deviation = op.adjoint().max_abs_diff(partner)?;
    if deviation > ADJOINT_TOLERANCE * scale {
        return Err(Error::AdjointMismatch { deviation });
    }
    Ok(())
}
