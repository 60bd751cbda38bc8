//! Truncated single-mode oscillaton Fock space and its operator algebra.
//!
//! Basis states are occupation vectors `(m_0, ..., m_L)` over the harmonic
//! oscillator levels of one field mode. Operators are exact on every basis
//! state whose image stays inside the cutoffs; identities that truncation
//! necessarily breaks at the boundary are checked on an [`InteriorProjector`].

mod hermite;
mod ladder;
mod mixing;
mod operator;
mod space;

pub use hermite::{
    eigenfunctions_upto, oscillator_eigenfunction, oscillator_eigenfunction_with_limit,
    GaussHermite, DEFAULT_MAX_ORDER,
};
pub use ladder::{build_annihilation, build_creation, build_photon_ops, field_operator};
pub use mixing::{bogoliubov_transform, MixingParams};
pub use operator::{commutator, OperatorMatrix};
pub use space::{InteriorProjector, ModeSpace, DEFAULT_LEVEL_CUTOFF, DEFAULT_OSC_CUTOFF};
