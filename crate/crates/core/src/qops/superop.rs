//! The superoperator tensor G and the process matrix χ.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::OperatorBasis;
use super::state::DensityMatrix;
use crate::linalg::{self, CMat};
use crate::{Error, Result};

/// The linear map `ϱ_out,ij = Σ_kl G_ij^kl ϱ_in,kl`.
///
/// Stored in the layout `G_ij^kl = m[(i·N + k, j·N + l)]`, which coincides with
/// χ against the standard operator basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperoperatorG {
    dim: usize,
    m: CMat,
}

impl SuperoperatorG {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            m: CMat::zeros(dim * dim, dim * dim),
        })
    }

    /// Builds `G_ij^kl = f(i, j, k, l)`.
    pub fn from_fn(
        dim: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut g = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        g.m[(i * dim + k, j * dim + l)] = f(i, j, k, l);
                    }
                }
            }
        }
        Ok(g)
    }

    /// Wraps a matrix in the `(i·N + k, j·N + l)` layout.
    pub fn from_layout_matrix(dim: usize, m: DMatrix<Complex64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if m.nrows() != dim * dim || m.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: m.nrows(),
            });
        }
        Ok(Self { dim, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.m[(i * self.dim + k, j * self.dim + l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: Complex64) {
        let n = self.dim;
        self.m[(i * n + k, j * n + l)] = value;
    }

    /// The tensor in the `(i·N + k, j·N + l)` layout.
    pub fn layout_matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// Applies the map to an arbitrary operator.
    pub fn apply_matrix(&self, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let n = self.dim;
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.nrows(),
            });
        }
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = linalg::ZERO;
                for k in 0..n {
                    for l in 0..n {
                        acc += self.m[(i * n + k, j * n + l)] * x[(k, l)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &SuperoperatorG) -> Result<SuperoperatorG> {
        check_dims(self.dim, inner.dim)?;
        let n = self.dim;
        Self::from_fn(n, |i, j, k, l| {
            let mut acc = linalg::ZERO;
            for a in 0..n {
                for b in 0..n {
                    acc += self.get(i, j, a, b) * inner.get(a, b, k, l);
                }
            }
            acc
        })
    }

    /// Largest violation of `G_ij^kl = conj(G_ji^lk)`.
    pub fn hermiticity_pairing_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.m)
    }

    pub fn max_abs_diff(&self, other: &SuperoperatorG) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        linalg::max_abs_diff(&self.m, &other.m)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Process matrix χ (N²×N²), indexed against an [`OperatorBasis`] supplied by
/// the caller. Values produced by this crate use the standard basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix {
    dim: usize,
    m: CMat,
}

impl ChiMatrix {
    /// Checks the shape only; Hermiticity is reported by
    /// [`ChiMatrix::hermiticity_defect`] and enforced by [`psd_margin`].
    pub fn new(dim: usize, m: DMatrix<Complex64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if m.nrows() != dim * dim || m.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: m.nrows(),
            });
        }
        Ok(Self { dim, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.m)
    }

    /// Residual of `Σ_jk χ_jk Ã_k†Ã_j = I`, the trace-preservation constraint
    /// written against `basis`.
    pub fn tp_residual_in(&self, basis: &OperatorBasis) -> Result<f64> {
        let s = tp_contraction(self, basis)?;
        Ok(linalg::max_abs_diff(
            &s,
            &CMat::identity(self.dim, self.dim),
        ))
    }
}

/// `S = Σ_jk χ_jk Ã_k†Ã_j`; equal to the identity for trace-preserving maps.
pub(crate) fn tp_contraction(chi: &ChiMatrix, basis: &OperatorBasis) -> Result<CMat> {
    check_dims(chi.dim, basis.dim())?;
    let n = chi.dim;
    if basis.is_standard() {
        // Ã_k†Ã_j = δ_ca |d⟩⟨b| for Ã_j = |a⟩⟨b|, Ã_k = |c⟩⟨d|.
        return Ok(linalg::trace_out_leading(&chi.m, n).transpose());
    }
    let ops = basis.ops();
    let mut s = CMat::zeros(n, n);
    for (j, aj) in ops.iter().enumerate() {
        for (k, ak) in ops.iter().enumerate() {
            let c = chi.m[(j, k)];
            if c == linalg::ZERO {
                continue;
            }
            s += (ak.adjoint() * aj) * c;
        }
    }
    Ok(s)
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `G_ij^kl = Σ_mn ⟨i|Ã_m|k⟩ ⟨l|Ã_n†|j⟩ χ_mn`. Against the standard basis this
/// is the exact relabeling `G_ij^kl = χ_{iN+k, jN+l}`.
pub fn chi_to_g(chi: &ChiMatrix, basis: &OperatorBasis) -> Result<SuperoperatorG> {
    check_dims(chi.dim, basis.dim())?;
    let n = chi.dim;
    if basis.is_standard() {
        return SuperoperatorG::from_layout_matrix(n, chi.m.clone());
    }
    let ops = basis.ops();
    let mut g = SuperoperatorG::zeros(n)?;
    for (mi, am) in ops.iter().enumerate() {
        for (ni, an) in ops.iter().enumerate() {
            let c = chi.m[(mi, ni)];
            if c == linalg::ZERO {
                continue;
            }
            for i in 0..n {
                for k in 0..n {
                    let left = am[(i, k)];
                    if left == linalg::ZERO {
                        continue;
                    }
                    for j in 0..n {
                        for l in 0..n {
                            // ⟨l|Ã_n†|j⟩ = conj(⟨j|Ã_n|l⟩)
                            let right = an[(j, l)].conj();
                            let cur = g.get(i, j, k, l);
                            g.set(i, j, k, l, cur + left * right * c);
                        }
                    }
                }
            }
        }
    }
    Ok(g)
}

/// `χ_{iN+k, jN+l} = G_ij^kl` against the standard basis.
pub fn g_to_chi(g: &SuperoperatorG) -> ChiMatrix {
    ChiMatrix {
        dim: g.dim,
        m: g.m.clone(),
    }
}

/// `ϱ_out,ij = Σ_kl G_ij^kl ϱ_in,kl`.
///
/// The output is a valid state whenever `g` is completely positive and trace
/// preserving; it is not re-validated.
pub fn apply_channel(g: &SuperoperatorG, rho: &DensityMatrix) -> Result<DensityMatrix> {
    g.apply_matrix(rho.matrix())
        .map(DensityMatrix::from_matrix_unchecked)
}

/// `ϱ_out = Σ_jk χ_jk Ã_j ϱ_in Ã_k†`.
pub fn apply_channel_chi(
    chi: &ChiMatrix,
    basis: &OperatorBasis,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    check_dims(chi.dim, basis.dim())?;
    check_dims(chi.dim, rho.dim())?;
    let n = chi.dim;
    let ops = basis.ops();
    let left: Vec<CMat> = ops.iter().map(|a| a * rho.matrix()).collect();
    let mut out = CMat::zeros(n, n);
    for (j, lj) in left.iter().enumerate() {
        for (k, ak) in ops.iter().enumerate() {
            let c = chi.m[(j, k)];
            if c == linalg::ZERO {
                continue;
            }
            out += (lj * ak.adjoint()) * c;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// `max_kl |Σ_i G_ii^kl − δ_kl|`.
pub fn tp_residual(g: &SuperoperatorG) -> f64 {
    let n = g.dim;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        for l in 0..n {
            let mut s = linalg::ZERO;
            for i in 0..n {
                s += g.get(i, i, k, l);
            }
            if k == l {
                s -= linalg::ONE;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// Minimum eigenvalue of χ; negative values measure how far the map is from
/// being completely positive.
pub fn psd_margin(chi: &ChiMatrix) -> Result<f64> {
    let defect = chi.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NotHermitian(defect));
    }
    Ok(linalg::min_eigenvalue(&chi.m))
}

/// Labels of the qubit parameter vector, in order.
pub const PARAM_NAMES: [&str; 12] = [
    "G_00^00",
    "G_00^11",
    "Re G_00^01",
    "Im G_00^01",
    "Re G_01^00",
    "Im G_01^00",
    "Re G_01^10",
    "Im G_01^10",
    "Re G_01^01",
    "Im G_01^01",
    "Re G_01^11",
    "Im G_01^11",
];

/// The 12 free real parameters of a trace-preserving qubit map.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub values: [f64; 12],
    pub tp_residual: f64,
    /// Set when the input violated trace preservation by more than 1e-8, in
    /// which case the `G_11` row cannot be recovered from these values.
    pub tp_warning: bool,
}

impl ParamVector {
    /// Rebuilds the map, filling `G_11^kl = δ_kl − G_00^kl` and the
    /// Hermiticity-paired entries.
    pub fn to_superoperator(&self) -> SuperoperatorG {
        let v = &self.values;
        let c = Complex64::new;
        let mut g = SuperoperatorG::zeros(2).expect("dim 2");
        let g00 = [
            [c(v[0], 0.0), c(v[2], v[3])],
            [c(v[2], -v[3]), c(v[1], 0.0)],
        ];
        let g01 = [
            [c(v[4], v[5]), c(v[8], v[9])],
            [c(v[6], v[7]), c(v[10], v[11])],
        ];
        for k in 0..2 {
            for l in 0..2 {
                let delta = if k == l { 1.0 } else { 0.0 };
                g.set(0, 0, k, l, g00[k][l]);
                g.set(1, 1, k, l, c(delta, 0.0) - g00[k][l]);
                g.set(0, 1, k, l, g01[k][l]);
                g.set(1, 0, l, k, g01[k][l].conj());
            }
        }
        g
    }
}

/// `(G00^00, G00^11, Re G00^01, Im G00^01, Re G01^00, Im G01^00, Re G01^10,
/// Im G01^10, Re G01^01, Im G01^01, Re G01^11, Im G01^11)`.
pub fn g_to_param_vector(g: &SuperoperatorG) -> Result<ParamVector> {
    if g.dim != 2 {
        return Err(Error::Unsupported(format!(
            "parameter vector is defined for qubits only (dim {})",
            g.dim
        )));
    }
    let tp = tp_residual(g);
    let (g0000, g0011, g0001) = (g.get(0, 0, 0, 0), g.get(0, 0, 1, 1), g.get(0, 0, 0, 1));
    let (g0100, g0110, g0101, g0111) = (
        g.get(0, 1, 0, 0),
        g.get(0, 1, 1, 0),
        g.get(0, 1, 0, 1),
        g.get(0, 1, 1, 1),
    );
    Ok(ParamVector {
        values: [
            g0000.re, g0011.re, g0001.re, g0001.im, g0100.re, g0100.im, g0110.re, g0110.im,
            g0101.re, g0101.im, g0111.re, g0111.im,
        ],
        tp_residual: tp,
        tp_warning: tp > 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::standard_basis;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn identity_chi() -> ChiMatrix {
        let mut m = CMat::zeros(4, 4);
        for &(r, cc) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(r, cc)] = linalg::ONE;
        }
        ChiMatrix::new(2, m).unwrap()
    }

    fn damping_chi() -> ChiMatrix {
        let (a, b) = ((-0.5f64).exp(), (-0.75f64).exp());
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = c(1.0);
        m[(1, 1)] = c(1.0 - a);
        m[(3, 3)] = c(a);
        m[(0, 3)] = c(b);
        m[(3, 0)] = c(b);
        ChiMatrix::new(2, m).unwrap()
    }

    #[test]
    fn depolarizing_chi_maps_to_trace_times_half_identity() {
        let chi = ChiMatrix::new(2, CMat::identity(4, 4).unscale(2.0)).unwrap();
        let g = chi_to_g(&chi, &standard_basis(2).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let want = if i == j && k == l { 0.5 } else { 0.0 };
                        assert_eq!(g.get(i, j, k, l), c(want));
                    }
                }
            }
        }
    }

    #[test]
    fn identity_chi_gives_identity_tensor() {
        let g = chi_to_g(&identity_chi(), &standard_basis(2).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let want = if i == k && j == l { 1.0 } else { 0.0 };
                        assert_eq!(g.get(i, j, k, l), c(want));
                    }
                }
            }
        }
        assert_eq!(tp_residual(&g), 0.0);
        assert!(psd_margin(&identity_chi()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn damping_tensor_entries() {
        let g = chi_to_g(&damping_chi(), &standard_basis(2).unwrap()).unwrap();
        assert!((g.get(0, 0, 1, 1).re - 0.393_469_340_287_366_6).abs() < 1e-15);
        assert!(tp_residual(&g) < 1e-15);
        let p = g_to_param_vector(&g).unwrap();
        let want = [1.0, 0.393469, 0., 0., 0., 0., 0., 0., 0.472367, 0., 0., 0.];
        for (x, w) in p.values.iter().zip(want.iter()) {
            assert!((x - w).abs() < 1e-6);
        }
        assert!(!p.tp_warning);
        // 2×2 block [[1, e^{-Γ⊥}], [e^{-Γ⊥}, e^{-Γ∥}]] is strictly positive here.
        assert!(psd_margin(&damping_chi()).unwrap() > -1e-15);
    }

    #[test]
    fn apply_matches_hand_expansion() {
        let g = chi_to_g(&damping_chi(), &standard_basis(2).unwrap()).unwrap();
        let plus = DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap();
        let out = apply_channel(&g, &plus).unwrap();
        let want = [
            [1.0 - 0.5 * (-0.5f64).exp(), 0.5 * (-0.75f64).exp()],
            [0.5 * (-0.75f64).exp(), 0.5 * (-0.5f64).exp()],
        ];
        for (i, row) in want.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                assert!((out.matrix()[(i, j)] - c(w)).norm() < 1e-15);
            }
        }
        let one = DensityMatrix::basis_state(2, 1).unwrap();
        let via_chi = apply_channel_chi(&damping_chi(), &standard_basis(2).unwrap(), &one).unwrap();
        assert!((via_chi.matrix()[(0, 0)].re - 0.393469).abs() < 1e-6);
        assert!((via_chi.matrix()[(1, 1)].re - 0.606531).abs() < 1e-6);
    }

    #[test]
    fn half_identity_chi_fully_depolarizes() {
        let chi = ChiMatrix::new(2, CMat::identity(4, 4).unscale(2.0)).unwrap();
        let rho = DensityMatrix::pure(&[c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let out = apply_channel_chi(&chi, &standard_basis(2).unwrap(), &rho).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), &CMat::identity(2, 2).unscale(2.0)) < 1e-15);
    }

    #[test]
    fn tp_residual_of_scaled_entry() {
        let mut g = chi_to_g(&identity_chi(), &standard_basis(2).unwrap()).unwrap();
        g.set(0, 0, 0, 0, c(0.9));
        assert!((tp_residual(&g) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn psd_margin_reports_negative_eigenvalue() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.),
            c(1.),
            c(1.),
            c(-0.2),
        ]));
        let chi = ChiMatrix::new(2, m).unwrap();
        assert!((psd_margin(&chi).unwrap() + 0.2).abs() < 1e-15);

        let mut skew = CMat::zeros(4, 4);
        skew[(0, 1)] = c(1.0);
        assert!(matches!(
            psd_margin(&ChiMatrix::new(2, skew).unwrap()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn param_vector_of_known_maps() {
        let id = chi_to_g(&identity_chi(), &standard_basis(2).unwrap()).unwrap();
        assert_eq!(
            g_to_param_vector(&id).unwrap().values,
            [1., 0., 0., 0., 0., 0., 0., 0., 1., 0., 0., 0.]
        );
        let dep = chi_to_g(
            &ChiMatrix::new(2, CMat::identity(4, 4).unscale(2.0)).unwrap(),
            &standard_basis(2).unwrap(),
        )
        .unwrap();
        assert_eq!(
            g_to_param_vector(&dep).unwrap().values,
            [0.5, 0.5, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.]
        );
        let qutrit = SuperoperatorG::zeros(3).unwrap();
        assert!(matches!(
            g_to_param_vector(&qutrit),
            Err(Error::Unsupported(_))
        ));

        let mut broken = id.clone();
        broken.set(0, 0, 0, 0, c(0.5));
        assert!(g_to_param_vector(&broken).unwrap().tp_warning);
    }

    #[test]
    fn param_vector_rebuilds_tp_map() {
        let g = chi_to_g(&damping_chi(), &standard_basis(2).unwrap()).unwrap();
        let back = g_to_param_vector(&g).unwrap().to_superoperator();
        assert!(back.max_abs_diff(&g) < 1e-15);
    }

    #[test]
    fn tp_residual_via_operator_constraint() {
        let basis = standard_basis(2).unwrap();
        assert!(damping_chi().tp_residual_in(&basis).unwrap() < 1e-15);
        let scaled = ChiMatrix::new(2, damping_chi().matrix().scale(0.5)).unwrap();
        assert!((scaled.tp_residual_in(&basis).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let chi = ChiMatrix::new(2, CMat::identity(4, 4)).unwrap();
        assert!(matches!(
            chi_to_g(&chi, &standard_basis(3).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
        let g = SuperoperatorG::zeros(2).unwrap();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(apply_channel(&g, &rho).is_err());
    }
}
