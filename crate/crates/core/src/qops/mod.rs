//! Quantum objects and the three channel representations.
//!
//! A channel is held either as the superoperator tensor `G_ij^kl`
//! ([`SuperoperatorG`]), as the process matrix χ against an operator basis
//! ([`ChiMatrix`]), or as Kraus operators ([`KrausSet`]). Against the standard
//! basis `Ã_{N·i+j} = |i⟩⟨j|` the first two are the same numbers with
//! `G_ij^kl = χ_{iN+k, jN+l}`, so those conversions are exact copies.
//!
//! Complete positivity is `χ ⪰ 0` ([`psd_margin`]); trace preservation is
//! `Σ_i G_ii^kl = δ_kl` ([`tp_residual`]).

mod basis;
mod kraus;
mod state;
mod superop;

pub use basis::{standard_basis, OperatorBasis};
pub use kraus::{kraus_from_chi, KrausSet};
pub use state::{DensityMatrix, Povm, PovmElement};
pub use superop::{
    apply_channel, apply_channel_chi, chi_to_g, g_to_chi, g_to_param_vector, psd_margin,
    tp_residual, ChiMatrix, ParamVector, SuperoperatorG, PARAM_NAMES,
};

pub(crate) use superop::tp_contraction;
