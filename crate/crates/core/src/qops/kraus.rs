use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::OperatorBasis;
use super::state::DensityMatrix;
use super::superop::ChiMatrix;
use crate::linalg::{self, CMat};
use crate::{Error, Result};

/// Kraus operators `A_i` with `ϱ ↦ Σ_i A_i ϱ A_i†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<CMat>,
}

impl KrausSet {
    pub fn new(ops: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let dim = ops
            .first()
            .map(|a| a.nrows())
            .ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        for a in &ops {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.nrows().max(a.ncols()),
                });
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[DMatrix<Complex64>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `max |Σ_i A_i†A_i − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let mut s = CMat::zeros(self.dim, self.dim);
        for a in &self.ops {
            s += a.adjoint() * a;
        }
        linalg::max_abs_diff(&s, &CMat::identity(self.dim, self.dim))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        let mut out = CMat::zeros(self.dim, self.dim);
        for a in &self.ops {
            out += a * rho.matrix() * a.adjoint();
        }
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// The process matrix of this set against `basis`, `χ = Σ_i c_i c_i†`
    /// where `c_i` are the expansion coefficients of `A_i`.
    pub fn to_chi(&self, basis: &OperatorBasis) -> Result<ChiMatrix> {
        if basis.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: basis.dim(),
            });
        }
        let n2 = self.dim * self.dim;
        // Columns of `b` are the vectorized basis operators.
        let b = CMat::from_fn(n2, n2, |row, col| {
            basis.ops()[col][(row / self.dim, row % self.dim)]
        });
        let lu = b.lu();
        let mut chi = CMat::zeros(n2, n2);
        for a in &self.ops {
            let v = nalgebra::DVector::from_fn(n2, |row, _| a[(row / self.dim, row % self.dim)]);
            let coeffs = lu.solve(&v).ok_or(Error::DependentBasis {
                rank: 0,
                required: n2,
            })?;
            chi += &coeffs * coeffs.adjoint();
        }
        ChiMatrix::new(self.dim, chi)
    }
}

/// Kraus operators from the eigen-decomposition `χ = Σ_i μ_i v_i v_i†`:
/// `A_i = √μ_i Σ_j (v_i)_j Ã_j`. Eigenvalues below `tol` are dropped; an
/// eigenvalue below `-tol` means χ is not completely positive.
pub fn kraus_from_chi(chi: &ChiMatrix, basis: &OperatorBasis, tol: f64) -> Result<KrausSet> {
    if chi.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: chi.dim(),
            found: basis.dim(),
        });
    }
    let defect = chi.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NotHermitian(defect));
    }
    let (values, vectors) = linalg::eigh(chi.matrix());
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NotCompletelyPositive(min));
    }
    let n = chi.dim();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ops = Vec::new();
    for k in order {
        let mu = values[k];
        if mu < tol {
            continue;
        }
        let scale = mu.sqrt();
        let mut a = CMat::zeros(n, n);
        for (j, basis_op) in basis.ops().iter().enumerate() {
            let coeff = vectors[(j, k)] * scale;
            if coeff == linalg::ZERO {
                continue;
            }
            a += basis_op * coeff;
        }
        ops.push(a);
    }
    if ops.is_empty() {
        return Err(Error::InvalidParameter(
            "chi has no eigenvalue above tolerance".into(),
        ));
    }
    KrausSet::new(ops)
}
