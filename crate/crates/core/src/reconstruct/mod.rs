//! Process reconstruction from frequency data.
//!
//! [`maxlik_reconstruct`] runs the likelihood fixed point built from
//! [`lambda_update`] and [`g_update`]; [`linear_inversion`] is the
//! unconstrained baseline. [`closure_residual`] and
//! [`renormalized_povm_gap`] check the identities that hold at an interior
//! maximum: `Σ_m (f_m/p_m) Π^(m) = I`, and `p'_m = f_m` for the rescaled
//! effects `(f_m/p_m) Π^(m)`.

mod fixed_point;
mod linear;
mod projection;
mod terms;

use nalgebra::DMatrix;

pub use fixed_point::{g_update, lambda_update, maxlik_reconstruct, LagrangeMatrix};
pub use linear::linear_inversion;
pub use projection::physicality_projection;

use crate::experiment::{ExperimentDesign, FrequencyTable};
use crate::linalg;
use crate::qops::{ChiMatrix, SuperoperatorG};
use crate::{Error, Result};
use terms::Terms;

/// Probability floor used by the free-standing diagnostics.
pub const DEFAULT_PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop when no element of G moves by more than this in one iteration.
    pub convergence_tol: f64,
    /// Floor ε on p_m inside f_m / p_m and ln p_m.
    pub prob_floor: f64,
    /// Iterates with an eigenvalue of χ below `-psd_repair_tol` are projected.
    pub psd_repair_tol: f64,
    /// Keep a detailed [`IterationRecord`] every `log_every` iterations; 0
    /// disables the detailed trace.
    pub log_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            convergence_tol: 1e-10,
            prob_floor: DEFAULT_PROB_FLOOR,
            psd_repair_tol: 1e-10,
            log_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_iterations > 0
            && self.convergence_tol > 0.0
            && self.prob_floor > 0.0
            && self.psd_repair_tol > 0.0;
        if !positive {
            return Err(Error::InvalidParameter(
                "solver tolerances and iteration limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One row of the iteration trace.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub log_likelihood: f64,
    pub tp_residual: f64,
    pub psd_margin: f64,
    pub closure_residual: f64,
    pub max_change: f64,
    pub projected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub closure_residual: f64,
    pub tp_residual: f64,
    pub psd_margin: f64,
    pub lambda_trace: f64,
    pub lambda_hermiticity_defect: f64,
    pub lambda_min_eigenvalue: f64,
    /// `max |(I ⊗ λᵀ − K) χ|`; zero at any constrained maximum.
    pub stationarity_residual: f64,
    /// Smallest eigenvalue of `I ⊗ λᵀ − K`; nonnegative at a maximum. The
    /// closure relation additionally requires this matrix to vanish, which
    /// only happens when χ has full rank.
    pub dual_margin: f64,
    /// Number of iterates repaired by the physicality projection.
    pub projections: usize,
    /// Rank of the linear map from χ to the event probabilities.
    pub design_rank: usize,
    pub parameter_count: usize,
    /// Log-likelihood never decreased between iterations (reported only).
    pub loglik_monotone: bool,
    pub loglik_trace: Vec<f64>,
    pub records: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub g_hat: SuperoperatorG,
    pub chi_hat: ChiMatrix,
    pub lambda: LagrangeMatrix,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostics: Diagnostics,
}

fn check_dims(g: &SuperoperatorG, design: &ExperimentDesign) -> Result<()> {
    if g.dim() != design.dim() {
        return Err(Error::DimensionMismatch {
            expected: design.dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

/// `Σ_m f_m ln p_m`; events with `f_m = 0` are skipped and `p_m` is floored at
/// [`DEFAULT_PROB_FLOOR`].
pub fn log_likelihood(
    g: &SuperoperatorG,
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
) -> Result<f64> {
    check_dims(g, design)?;
    Ok(Terms::new(freqs, design)?.log_likelihood(g.layout_matrix(), DEFAULT_PROB_FLOOR))
}

/// `max |Σ_m (f_m/p_m) Π^(m) − I|`.
pub fn closure_residual(
    g: &SuperoperatorG,
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
) -> Result<f64> {
    check_dims(g, design)?;
    Ok(Terms::new(freqs, design)?.closure_residual(g.layout_matrix(), DEFAULT_PROB_FLOOR))
}

/// `p'_m − f_m` per (setting, outcome), where `p'_m` is the probability of the
/// rescaled effect `(f_m/p_m) Π^(m)`.
pub fn renormalized_povm_gap(
    g: &SuperoperatorG,
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
) -> Result<Vec<Vec<f64>>> {
    check_dims(g, design)?;
    let terms = Terms::new(freqs, design)?;
    let probabilities = terms.probabilities(g.layout_matrix());
    let mut gaps: Vec<Vec<f64>> = freqs
        .rows()
        .iter()
        .map(|row| vec![0.0; row.len()])
        .collect();
    for (t, p) in terms.terms.iter().zip(probabilities) {
        if t.f == 0.0 {
            continue;
        }
        let weight = t.f / p.max(DEFAULT_PROB_FLOOR);
        let renormalized = t.effect.clone() * num_complex::Complex64::new(weight, 0.0);
        let out = g.apply_matrix(&design.input_of(t.setting).matrix().clone())?;
        let p_prime = trace_re(&renormalized, &out);
        gaps[t.setting][t.outcome] = p_prime - t.f;
    }
    Ok(gaps)
}

fn trace_re(a: &DMatrix<num_complex::Complex64>, b: &DMatrix<num_complex::Complex64>) -> f64 {
    (a * b).trace().re
}

/// Rank of the real linear map from Hermitian χ to event probabilities.
fn design_rank(terms: &Terms) -> usize {
    let basis = linalg::hermitian_basis(terms.dim * terms.dim);
    let a = DMatrix::from_fn(terms.terms.len(), basis.len(), |r, c| {
        trace_re(&terms.terms[r].op, &basis[c])
    });
    linalg::numerical_rank(a, 1e-10)
}
