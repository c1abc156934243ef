//! Density matrices and POVMs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{self, CMat};
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;
const POVM_SUM_TOL: f64 = 1e-10;

/// A quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and eigenvalues
    /// (≥ -1e-10).
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        check_square(&mat)?;
        let defect = linalg::hermiticity_defect(&mat);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = linalg::trace(&mat);
        if (tr - linalg::ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = linalg::min_eigenvalue(&mat);
        if min < -EIGEN_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { mat })
    }

    /// The projector onto `psi`, normalized.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        if psi.len() < 2 {
            return Err(Error::InvalidDimension(psi.len()));
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Ok(Self {
            mat: outer(psi, norm),
        })
    }

    /// `|index⟩⟨index|` in the computational basis.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut mat = CMat::zeros(dim, dim);
        mat[(index, index)] = linalg::ONE;
        Ok(Self { mat })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            mat: CMat::identity(dim, dim).unscale(dim as f64),
        })
    }

    /// Wraps a matrix without validation. Used for channel outputs, which are
    /// valid states exactly when the channel is physical.
    pub(crate) fn from_matrix_unchecked(mat: CMat) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.mat)
    }

    /// Tr ϱ².
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.mat)
    }
}

/// One effect Π of a POVM: Hermitian with spectrum in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct PovmElement {
    mat: CMat,
}

impl PovmElement {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        check_square(&mat)?;
        let defect = linalg::hermiticity_defect(&mat);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let (values, _) = linalg::eigh(&mat);
        for &mu in values.iter() {
            if !(-EIGEN_TOL..=1.0 + EIGEN_TOL).contains(&mu) {
                return Err(Error::InvalidEffect(mu));
            }
        }
        Ok(Self { mat })
    }

    /// Rank-one projector `|psi⟩⟨psi|` (normalized).
    pub fn projector(psi: &[Complex64]) -> Result<Self> {
        DensityMatrix::pure(psi).map(|rho| Self { mat: rho.mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Tr[Π X] for an arbitrary operator `X`.
    pub fn expectation(&self, x: &DMatrix<Complex64>) -> Complex64 {
        let n = self.dim();
        let mut acc = linalg::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.mat[(i, j)] * x[(j, i)];
            }
        }
        acc
    }
}

/// An ordered POVM whose effects sum to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidParameter("POVM with no elements".into()))?;
        let dim = first.dim();
        let mut sum = CMat::zeros(dim, dim);
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            sum += &e.mat;
        }
        let deviation = linalg::max_abs_diff(&sum, &CMat::identity(dim, dim));
        if deviation > POVM_SUM_TOL {
            return Err(Error::IncompletePovm(deviation));
        }
        Ok(Self { elements })
    }

    /// Projective measurement in the orthonormal basis given by `vectors`.
    pub fn projective(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let elements = vectors
            .iter()
            .map(|v| PovmElement::projector(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }
}

fn check_square(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() < 2 {
        return Err(Error::InvalidDimension(m.nrows()));
    }
    Ok(())
}

fn outer(psi: &[Complex64], norm: f64) -> CMat {
    let n = psi.len();
    CMat::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm))
}
