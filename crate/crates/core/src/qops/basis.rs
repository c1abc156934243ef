use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{self, CMat};
use crate::{Error, Result};

/// N² operators `Ã_j` used to expand Kraus operators and index χ.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    ops: Vec<CMat>,
    standard: bool,
}

impl OperatorBasis {
    /// The matrix units, `Ã_{N·i+j} = |i⟩⟨j|`, row-major in `(i, j)`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let ops = (0..dim * dim)
            .map(|idx| {
                let mut m = CMat::zeros(dim, dim);
                m[(idx / dim, idx % dim)] = linalg::ONE;
                m
            })
            .collect();
        Ok(Self {
            dim,
            ops,
            standard: true,
        })
    }

    /// Any N² linearly independent N×N operators.
    pub fn from_ops(dim: usize, ops: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if ops.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: ops.len(),
            });
        }
        for op in &ops {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.nrows().max(op.ncols()),
                });
            }
        }
        // Vectorized ops as real columns; independence over C is independence of
        // the stacked [Re; Im] columns of (v, i·v).
        let n2 = dim * dim;
        let mut a = DMatrix::<f64>::zeros(2 * n2, 2 * n2);
        for (col, op) in ops.iter().enumerate() {
            for (row, z) in op.iter().enumerate() {
                a[(row, 2 * col)] = z.re;
                a[(n2 + row, 2 * col)] = z.im;
                a[(row, 2 * col + 1)] = -z.im;
                a[(n2 + row, 2 * col + 1)] = z.re;
            }
        }
        let rank = linalg::numerical_rank(a, 1e-12) / 2;
        if rank < n2 {
            return Err(Error::DependentBasis { rank, required: n2 });
        }
        let standard = ops == Self::standard(dim)?.ops;
        Ok(Self { dim, ops, standard })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[DMatrix<Complex64>] {
        &self.ops
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }
}

/// `Ã_{N·i+j} = |i⟩⟨j|`.
pub fn standard_basis(dim: usize) -> Result<OperatorBasis> {
    OperatorBasis::standard(dim)
}
