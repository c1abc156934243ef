use nalgebra::{DMatrix, DVector};

use crate::experiment::{ExperimentDesign, FrequencyTable};
use crate::linalg::{self, CMat};
use crate::qops::SuperoperatorG;
use crate::{Error, Result};

const RANK_TOL: f64 = 1e-10;

/// Linear inversion baseline, with no physicality constraint.
///
/// First every input's output state is estimated by least squares from its
/// per-setting outcome frequencies (for the qubit fixtures this is exactly
/// `½(I + Σ_j ⟨σ_j⟩ σ_j)` with `⟨σ_j⟩ = (n_↑ − n_↓)/(n_↑ + n_↓)`). Then
/// `ϱ_out = G ϱ_in` is solved for `G` by least squares over the real
/// parameters of a Hermitian χ, so the result always satisfies the
/// Hermiticity pairing but may fail to be positive.
pub fn linear_inversion(
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
) -> Result<SuperoperatorG> {
    freqs.check_against(design)?;
    let n = design.dim();
    let per_setting = freqs.per_setting();

    let state_basis = linalg::hermitian_basis(n);
    let mut pairs: Vec<(CMat, CMat)> = Vec::new();
    for (input_index, rho_in) in design.inputs().iter().enumerate() {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for (s, setting) in design.settings().iter().enumerate() {
            if setting.input_index != input_index {
                continue;
            }
            let Some(fhat) = &per_setting[s] else {
                continue;
            };
            for (effect, &f) in design.povms()[setting.povm_index]
                .elements()
                .iter()
                .zip(fhat)
            {
                rows.push(
                    state_basis
                        .iter()
                        .map(|e| effect.expectation(e).re)
                        .collect(),
                );
                rhs.push(f);
            }
        }
        if rows.is_empty() {
            continue;
        }
        let a = DMatrix::from_fn(rows.len(), state_basis.len(), |r, c| rows[r][c]);
        let x = linalg::lstsq(a, &DVector::from_vec(rhs), RANK_TOL)
            .map_err(|(rank, required)| Error::RankDeficient { rank, required })?;
        let rho_out: CMat = state_basis
            .iter()
            .zip(x.iter())
            .map(|(e, &w)| e * num_complex::Complex64::new(w, 0.0))
            .sum();
        pairs.push((rho_in.matrix().clone(), rho_out));
    }

    let chi_basis = linalg::hermitian_basis(n * n);
    let maps: Vec<SuperoperatorG> = chi_basis
        .iter()
        .map(|e| SuperoperatorG::from_layout_matrix(n, e.clone()))
        .collect::<Result<_>>()?;
    let rows_per_pair = 2 * n * n;
    let mut a = DMatrix::<f64>::zeros(pairs.len() * rows_per_pair, chi_basis.len());
    let mut b = DVector::<f64>::zeros(pairs.len() * rows_per_pair);
    for (p, (rho_in, rho_out)) in pairs.iter().enumerate() {
        let base = p * rows_per_pair;
        for (q, map) in maps.iter().enumerate() {
            let image = map.apply_matrix(rho_in)?;
            for (e, z) in image.iter().enumerate() {
                a[(base + 2 * e, q)] = z.re;
                a[(base + 2 * e + 1, q)] = z.im;
            }
        }
        for (e, z) in rho_out.iter().enumerate() {
            b[base + 2 * e] = z.re;
            b[base + 2 * e + 1] = z.im;
        }
    }
    let x = linalg::lstsq(a, &b, RANK_TOL)
        .map_err(|(rank, required)| Error::RankDeficient { rank, required })?;
    let chi: CMat = chi_basis
        .iter()
        .zip(x.iter())
        .map(|(e, &w)| e * num_complex::Complex64::new(w, 0.0))
        .sum();
    SuperoperatorG::from_layout_matrix(n, chi)
}
