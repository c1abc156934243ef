//! Small dense complex linear-algebra helpers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub(crate) type CMat = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest element of `m - m†`.
pub(crate) fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigen-decomposition of the Hermitian part of `m`.
pub(crate) fn eigh(m: &CMat) -> (DVector<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    (eig.eigenvalues, eig.eigenvectors)
}

pub(crate) fn min_eigenvalue(m: &CMat) -> f64 {
    eigh(m).0.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Rebuild `V diag(f(μ)) V†` from an eigen-decomposition.
pub(crate) fn from_spectrum(values: &DVector<f64>, vectors: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let n = vectors.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &mu) in values.iter().enumerate() {
        let w = f(mu);
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        for i in 0..n {
            let vi = v[i] * w;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    out
}

/// `m^{-1/2}` for a Hermitian positive definite `m`, or `None` when an
/// eigenvalue is not above `floor`.
pub(crate) fn inv_sqrt_hermitian(m: &CMat, floor: f64) -> Option<CMat> {
    let (values, vectors) = eigh(m);
    if values.iter().any(|&mu| mu <= floor) {
        return None;
    }
    Some(from_spectrum(&values, &vectors, |mu| 1.0 / mu.sqrt()))
}

/// Sums `m[(b*n + r, b*n + c)]` over the leading (output) index `b`, for a
/// matrix laid out on the product index `b*n + r`.
pub(crate) fn trace_out_leading(m: &CMat, n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    for b in 0..n {
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] += m[(b * n + r, b * n + c)];
            }
        }
    }
    out
}

/// Orthogonal basis of the real vector space of `d × d` Hermitian matrices.
pub(crate) fn hermitian_basis(d: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(d * d);
    for a in 0..d {
        let mut e = CMat::zeros(d, d);
        e[(a, a)] = ONE;
        basis.push(e);
        for b in (a + 1)..d {
            let mut sym = CMat::zeros(d, d);
            sym[(a, b)] = ONE;
            sym[(b, a)] = ONE;
            basis.push(sym);
            let mut anti = CMat::zeros(d, d);
            anti[(a, b)] = Complex64::new(0.0, 1.0);
            anti[(b, a)] = Complex64::new(0.0, -1.0);
            basis.push(anti);
        }
    }
    basis
}

/// Least-squares solution of a real system with an SVD rank check.
pub(crate) fn lstsq(
    a: DMatrix<f64>,
    b: &DVector<f64>,
    rank_tol: f64,
) -> Result<DVector<f64>, (usize, usize)> {
    let required = a.ncols();
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let rank = sv.iter().filter(|&&s| s > rank_tol * smax.max(1.0)).count();
    if rank < required || a.nrows() < required {
        return Err((rank, required));
    }
    // Full column rank: Householder QR is accurate where the SVD solve of
    // these sparse, structured systems is not.
    let qr = a.qr();
    let qtb = qr.q().transpose() * b;
    qr.r().solve_upper_triangular(&qtb).ok_or((rank, required))
}

pub(crate) fn numerical_rank(a: DMatrix<f64>, rel_tol: f64) -> usize {
    let svd = a.svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * smax)
        .count()
}
