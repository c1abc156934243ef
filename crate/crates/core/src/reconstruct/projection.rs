use crate::linalg::{self, CMat};
use crate::qops::{tp_contraction, ChiMatrix, OperatorBasis};
use crate::{Error, Result};

/// Pulls a Hermitian χ (standard basis) back into the physical set.
///
/// Negative eigenvalues are clipped to zero. If the most negative one was
/// below `-tol`, trace preservation is then restored by replacing every Kraus
/// operator `A_i` with `A_i S^{-1/2}`, `S = Σ_jk χ_jk Ã_k†Ã_j`, which acts on χ
/// as the congruence `χ ↦ C χ C†` with `C = I ⊗ (S^{-1/2})ᵀ`.
pub fn physicality_projection(chi: &ChiMatrix, tol: f64) -> Result<ChiMatrix> {
    let defect = chi.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NotHermitian(defect));
    }
    let n = chi.dim();
    let (values, vectors) = linalg::eigh(chi.matrix());
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let clipped = linalg::from_spectrum(&values, &vectors, |mu| mu.max(0.0));
    let clipped = ChiMatrix::new(n, linalg::hermitian_part(&clipped))?;
    if min >= -tol {
        return Ok(clipped);
    }
    let s = tp_contraction(&clipped, &OperatorBasis::standard(n)?)?;
    let s_inv_sqrt = linalg::inv_sqrt_hermitian(&s, 1e-14).ok_or(Error::SingularNormalization)?;
    let c = CMat::identity(n, n).kronecker(&s_inv_sqrt.transpose());
    let out = &c * clipped.matrix() * c.adjoint();
    ChiMatrix::new(n, linalg::hermitian_part(&out))
}
