//! The Lagrange-multiplier fixed-point iteration.
//!
//! Stationarity of `Σ_m f_m ln p_m − Σ_mn λ_mn Σ_p G_pp^mn` gives, for the
//! multiplier matrix,
//!
//! ```text
//! λ_ij = Σ_m (f_m/p_m) Σ_{a,k,p} Π_ka G_ak^{pi} ϱ_pj
//! ```
//!
//! and the update
//!
//! ```text
//! G'_bc^np = Σ_m (f_m/p_m) Σ_{a,k,l} Π_ba ϱ_kl (λ⁻¹)_ln G_ac^kp.
//! ```
//!
//! In the χ layout these are `λᵀ = Tr_out(K χ)` and `χ' = (I ⊗ λ⁻ᵀ) K χ`
//! with `K = Σ_m (f_m/p_m) Π^(m) ⊗ ϱ^(m)ᵀ`. Taking the output trace of `χ'`
//! gives `λᵀ λ⁻ᵀ = I`, so every step is exactly trace preserving when `λ` comes
//! from the same `G`. `λ` is used as computed: it is a sum of products of
//! Hermitian matrices and only becomes Hermitian at the fixed point.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::projection::physicality_projection;
use super::terms::Terms;
use super::{IterationRecord, ReconstructionResult, SolverConfig};
use crate::experiment::{ExperimentDesign, FrequencyTable};
use crate::linalg::{self, CMat};
use crate::qops::{g_to_chi, tp_residual, ChiMatrix, SuperoperatorG};
use crate::{Error, Result};

const MAX_CONDITION: f64 = 1e12;

/// The multiplier matrix `λ_mn` enforcing trace preservation.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeMatrix {
    lam: CMat,
}

impl LagrangeMatrix {
    pub fn dim(&self) -> usize {
        self.lam.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.lam
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.lam)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.lam)
    }

    pub fn hermitian_part(&self) -> DMatrix<Complex64> {
        linalg::hermitian_part(&self.lam)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.lam)
    }

    pub(crate) fn from_transposed(lam_t: CMat) -> Self {
        Self {
            lam: lam_t.transpose(),
        }
    }
}

fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let (max, min) = (sv.max(), sv.min());
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `λᵀ = Tr_out(K χ)` for a precomputed `K`.
fn lambda_transposed(k: &CMat, chi: &CMat, dim: usize) -> Result<CMat> {
    let lam_t = linalg::trace_out_leading(&(k * chi), dim);
    let cond = condition_number(&lam_t);
    if cond > MAX_CONDITION {
        return Err(Error::DegenerateLagrange(cond));
    }
    Ok(lam_t)
}

/// `χ' = herm((I ⊗ λ⁻ᵀ) K χ)`.
fn step(k: &CMat, chi: &CMat, lam_t: &CMat, dim: usize) -> Result<CMat> {
    let lam_t_inv = lam_t
        .clone()
        .try_inverse()
        .ok_or(Error::DegenerateLagrange(f64::INFINITY))?;
    let m = CMat::identity(dim, dim).kronecker(&lam_t_inv) * k;
    Ok(linalg::hermitian_part(&(m * chi)))
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

/// `λ_ij = Σ_m (f_m/p_m) Σ_{a,k,p} Π_ka G_ak^{pi} ϱ_pj` with `p_m` floored.
pub fn lambda_update(
    g: &SuperoperatorG,
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
    floor: f64,
) -> Result<LagrangeMatrix> {
    check_dims(g, design)?;
    let terms = Terms::new(freqs, design)?;
    let chi = g.layout_matrix();
    let k = terms.weighted_sum(chi, floor);
    lambda_transposed(&k, chi, terms.dim).map(LagrangeMatrix::from_transposed)
}

/// `G'_bc^np = Σ_m (f_m/p_m) Σ_{a,k,l} Π_ba ϱ_kl (λ⁻¹)_ln G_ac^kp`, then
/// averaged with its Hermiticity pair `conj(G'_cb^pn)`.
pub fn g_update(
    g: &SuperoperatorG,
    lambda: &LagrangeMatrix,
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
    floor: f64,
) -> Result<SuperoperatorG> {
    check_dims(g, design)?;
    if lambda.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: lambda.dim(),
        });
    }
    let terms = Terms::new(freqs, design)?;
    let chi = g.layout_matrix();
    let k = terms.weighted_sum(chi, floor);
    let next = step(&k, chi, &lambda.lam.transpose(), g.dim())?;
    SuperoperatorG::from_layout_matrix(g.dim(), next)
}

/// Maximizes the likelihood over completely positive, trace-preserving maps.
///
/// Starts from the fully depolarizing channel `χ⁰ = I/N` and alternates the
/// multiplier and tensor updates until the largest change of any element of
/// `G` drops below `cfg.convergence_tol`. An iterate whose χ has an eigenvalue
/// below `-cfg.psd_repair_tol` is replaced by its
/// [`physicality_projection`](super::physicality_projection); such repairs are
/// counted in the diagnostics.
pub fn maxlik_reconstruct(
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
    cfg: &SolverConfig,
) -> Result<ReconstructionResult> {
    cfg.validate()?;
    let freqs = FrequencyTable::new(freqs.rows().to_vec())?;
    let terms = Terms::new(&freqs, design)?;
    let n = design.dim();
    let floor = cfg.prob_floor;

    let mut chi = CMat::identity(n * n, n * n).unscale(n as f64);
    let mut loglik_trace = Vec::new();
    let mut records = Vec::new();
    let mut projections = 0usize;
    let mut converged = false;
    let mut iterations = 0usize;

    for iteration in 1..=cfg.max_iterations {
        iterations = iteration;
        let k = terms.weighted_sum(&chi, floor);
        let lam_t = lambda_transposed(&k, &chi, n)?;
        let mut next = step(&k, &chi, &lam_t, n)?;

        let mut projected = false;
        if !next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::SolverFailure {
                iteration,
                trace: records,
            });
        }
        let mut margin = linalg::min_eigenvalue(&next);
        if margin < -cfg.psd_repair_tol {
            let repaired = physicality_projection(&ChiMatrix::new(n, next)?, cfg.psd_repair_tol)?;
            next = repaired.into_matrix();
            margin = linalg::min_eigenvalue(&next);
            projections += 1;
            projected = true;
        }

        let change = linalg::max_abs_diff(&next, &chi);
        chi = next;
        let loglik = terms.log_likelihood(&chi, floor);
        if !loglik.is_finite() {
            return Err(Error::SolverFailure {
                iteration,
                trace: records,
            });
        }
        loglik_trace.push(loglik);

        let done = change < cfg.convergence_tol;
        if cfg.log_every > 0 && (iteration % cfg.log_every == 0 || done || iteration == 1) {
            let g = SuperoperatorG::from_layout_matrix(n, chi.clone())?;
            records.push(IterationRecord {
                iteration,
                log_likelihood: loglik,
                tp_residual: tp_residual(&g),
                psd_margin: margin,
                closure_residual: terms.closure_residual(&chi, floor),
                max_change: change,
                projected,
            });
        }
        if done {
            converged = true;
            break;
        }
    }

    let g_hat = SuperoperatorG::from_layout_matrix(n, chi.clone())?;
    let k = terms.weighted_sum(&chi, floor);
    let lam_t = lambda_transposed(&k, &chi, n)?;
    let lambda = LagrangeMatrix::from_transposed(lam_t.clone());

    // (I ⊗ λᵀ − K) χ = 0 and I ⊗ λᵀ − K ⪰ 0 characterize the constrained
    // maximum, including maxima on the boundary of the PSD cone.
    let slack = CMat::identity(n, n).kronecker(&lam_t) - &k;
    let stationarity_residual = linalg::max_abs(&(&slack * &chi));
    let dual_margin = linalg::min_eigenvalue(&slack);

    let log_likelihood = terms.log_likelihood(&chi, floor);
    let monotone = loglik_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let chi_hat = g_to_chi(&g_hat);
    let diagnostics = super::Diagnostics {
        closure_residual: terms.closure_residual(&chi, floor),
        tp_residual: tp_residual(&g_hat),
        psd_margin: linalg::min_eigenvalue(&chi),
        lambda_trace: lambda.trace().re,
        lambda_hermiticity_defect: lambda.hermiticity_defect(),
        lambda_min_eigenvalue: lambda.min_eigenvalue(),
        stationarity_residual,
        dual_margin,
        projections,
        design_rank: super::design_rank(&terms),
        parameter_count: n.pow(4),
        loglik_monotone: monotone,
        loglik_trace,
        records,
    };
    Ok(ReconstructionResult {
        g_hat,
        chi_hat,
        lambda,
        log_likelihood,
        iterations,
        converged,
        diagnostics,
    })
}
