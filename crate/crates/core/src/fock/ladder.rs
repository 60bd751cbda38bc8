use num_complex::Complex64;

use super::hermite::eigenfunctions_upto;
use super::operator::OperatorMatrix;
use super::space::ModeSpace;
use crate::error::Result;

/// Oscillaton annihilation operator `ĉ_n`: `|.., m_n = k, ..⟩ → √k |.., k−1, ..⟩`.
pub fn build_annihilation(space: &ModeSpace, level: usize) -> Result<OperatorMatrix> {
    space.check_level(level)?;
    let entries = (0..space.dim()).filter_map(|col| {
        let occ = space.occupation(col);
        let k = occ[level];
        if k == 0 {
            return None;
        }
        let mut lowered = occ.to_vec();
        lowered[level] -= 1;
        let row = space
            .index_of(&lowered)
            .expect("lowering stays inside the space");
        Some(((row, col), Complex64::new((k as f64).sqrt(), 0.0)))
    });
    OperatorMatrix::from_entries(space.dim(), entries)
}

/// `ĉ†_n`, the adjoint of [`build_annihilation`].
pub fn build_creation(space: &ModeSpace, level: usize) -> Result<OperatorMatrix> {
    Ok(build_annihilation(space, level)?.adjoint())
}

/// Generalized photon operators `a′ = Σ_{n=1}^{L} √n ĉ†_{n−1} ĉ_n` and its adjoint.
///
/// Each term preserves the total oscillaton number and lowers a level, so
/// both operators are exact on the whole truncated space.
pub fn build_photon_ops(space: &ModeSpace) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let mut a = OperatorMatrix::zeros(space.dim());
    for n in 1..=space.level_cutoff() {
        let hop = build_creation(space, n - 1)?.matmul(&build_annihilation(space, n)?)?;
        a = a.add(&hop.scale_real((n as f64).sqrt()))?;
    }
    let a_dagger = a.adjoint();
    Ok((a, a_dagger))
}

/// Third-quantized field operator `ψ̂(x) = Σ_n φ_n(x) ĉ_n`.
pub fn field_operator(space: &ModeSpace, x: f64) -> Result<OperatorMatrix> {
    let phi = eigenfunctions_upto(space.level_cutoff(), x)?;
    let mut psi = OperatorMatrix::zeros(space.dim());
    for (n, &p) in phi.iter().enumerate() {
        psi = psi.add(&build_annihilation(space, n)?.scale_real(p))?;
    }
    Ok(psi)
}
