#![allow(dead_code)]

use nalgebra::DMatrix;
use qpt_core::experiment::{ExperimentDesign, FrequencyTable};
use qpt_core::qops::chi_to_g;
use qpt_core::qops::{standard_basis, ChiMatrix, DensityMatrix, KrausSet, SuperoperatorG};
use qpt_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Hermitian `S^{-1/2}` by eigendecomposition.
pub fn inv_sqrt(s: &CMat) -> CMat {
    let eig = s.clone().symmetric_eigen();
    let d = eig.eigenvalues.map(|x| Complex64::new(1.0 / x.sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// `r` random operators rescaled so that `Σ A†A = I`.
pub fn random_kraus(rng: &mut ChaCha8Rng, n: usize, r: usize) -> KrausSet {
    let raw: Vec<CMat> = (0..r).map(|_| random_matrix(rng, n)).collect();
    let s: CMat = raw.iter().map(|a| a.adjoint() * a).sum();
    let norm = inv_sqrt(&s);
    KrausSet::new(raw.into_iter().map(|a| a * &norm).collect()).unwrap()
}

pub fn random_channel(rng: &mut ChaCha8Rng, n: usize) -> (KrausSet, SuperoperatorG) {
    let r = rng.random_range(1..=n * n);
    let kraus = random_kraus(rng, n, r);
    let basis = standard_basis(n).unwrap();
    let chi: ChiMatrix = kraus.to_chi(&basis).unwrap();
    let g = chi_to_g(&chi, &basis).unwrap();
    (kraus, g)
}

/// Generic output of the Kraus construction: `N²` operators, full-rank χ.
pub fn random_full_rank_channel(rng: &mut ChaCha8Rng, n: usize) -> SuperoperatorG {
    let kraus = random_kraus(rng, n, n * n);
    let basis = standard_basis(n).unwrap();
    chi_to_g(&kraus.to_chi(&basis).unwrap(), &basis).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let a = random_matrix(rng, n);
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

/// Strictly positive frequencies with random weights.
pub fn random_frequencies(rng: &mut ChaCha8Rng, design: &ExperimentDesign) -> FrequencyTable {
    let rows = (0..design.settings().len())
        .map(|s| {
            (0..design.outcome_count(s))
                .map(|_| rng.random_range(0.05..1.0))
                .collect()
        })
        .collect();
    FrequencyTable::new(rows).unwrap()
}

pub fn inverse_2x2(m: &CMat) -> CMat {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let det = a * d - b * c;
    DMatrix::from_row_slice(2, 2, &[d / det, -b / det, -c / det, a / det])
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn g_diff(a: &SuperoperatorG, b: &SuperoperatorG) -> f64 {
    a.max_abs_diff(b)
}
