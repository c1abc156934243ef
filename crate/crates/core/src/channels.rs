//! Known channels and the qubit experiment fixtures.
//!
//! Channels are built directly as [`SuperoperatorG`] tensors from closed-form
//! expressions; χ forms follow from [`g_to_chi`](crate::qops::g_to_chi).
//!
//! Qubit convention: `|0⟩ = |↓z⟩`, `|1⟩ = |↑z⟩`, and
//! `|↑x⟩ = (|0⟩ + |1⟩)/√2`, `|↑y⟩ = (|0⟩ + i|1⟩)/√2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{self, CMat};
use crate::qops::{DensityMatrix, Povm, PovmElement, SuperoperatorG};
use crate::{Error, Result};

/// Longitudinal (`gamma_par`) and transversal (`gamma_perp`) decay exponents
/// of the qubit damping channel. Completely positive iff `2Γ⊥ ≥ Γ∥ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampingParams {
    pub gamma_par: f64,
    pub gamma_perp: f64,
}

impl DampingParams {
    pub fn new(gamma_par: f64, gamma_perp: f64) -> Result<Self> {
        if !(gamma_par.is_finite() && gamma_perp.is_finite()) || gamma_par < 0.0 || gamma_perp < 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "decay exponents must be finite and nonnegative (got {gamma_par}, {gamma_perp})"
            )));
        }
        if 2.0 * gamma_perp < gamma_par {
            return Err(Error::NotCompletelyPositive(
                (-gamma_par).exp() - (-2.0 * gamma_perp).exp(),
            ));
        }
        Ok(Self {
            gamma_par,
            gamma_perp,
        })
    }
}

/// `ϱ_00 ↦ ϱ_00 + (1 − e^{-Γ∥}) ϱ_11`, `ϱ_11 ↦ e^{-Γ∥} ϱ_11`,
/// `ϱ_01 ↦ e^{-Γ⊥} ϱ_01`.
pub fn damping_channel(params: DampingParams) -> SuperoperatorG {
    damping_tensor(params.gamma_par, params.gamma_perp)
}

/// The damping tensor without the complete-positivity check. Used to probe
/// the `2Γ⊥ < Γ∥` region.
pub fn damping_tensor(gamma_par: f64, gamma_perp: f64) -> SuperoperatorG {
    let keep = (-gamma_par).exp();
    let coherence = (-gamma_perp).exp();
    let mut g = SuperoperatorG::zeros(2).expect("dim 2");
    let c = |x: f64| Complex64::new(x, 0.0);
    g.set(0, 0, 0, 0, c(1.0));
    g.set(0, 0, 1, 1, c(1.0 - keep));
    g.set(1, 1, 1, 1, c(keep));
    g.set(0, 1, 0, 1, c(coherence));
    g.set(1, 0, 1, 0, c(coherence));
    g
}

/// `G_ij^kl = δ_ik δ_jl`.
pub fn identity_channel(dim: usize) -> Result<SuperoperatorG> {
    SuperoperatorG::from_fn(dim, |i, j, k, l| {
        if i == k && j == l {
            linalg::ONE
        } else {
            linalg::ZERO
        }
    })
}

/// `ϱ ↦ U ϱ U†`, i.e. `G_ij^kl = u_ik conj(u_jl)`.
pub fn unitary_channel(u: &DMatrix<Complex64>) -> Result<SuperoperatorG> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.ncols(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let deviation = linalg::max_abs_diff(&(u.adjoint() * u), &CMat::identity(n, n));
    if deviation > 1e-10 {
        return Err(Error::NotUnitary(deviation));
    }
    SuperoperatorG::from_fn(n, |i, j, k, l| u[(i, k)] * u[(j, l)].conj())
}

/// `ϱ ↦ (1 − p) ϱ + p Tr(ϱ) I / N`.
pub fn depolarizing_channel(p: f64, dim: usize) -> Result<SuperoperatorG> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "depolarizing probability {p} outside [0, 1]"
        )));
    }
    let mixed = p / dim as f64;
    SuperoperatorG::from_fn(dim, |i, j, k, l| {
        let mut v = 0.0;
        if i == k && j == l {
            v += 1.0 - p;
        }
        if i == j && k == l {
            v += mixed;
        }
        Complex64::new(v, 0.0)
    })
}

/// Channel names accepted by [`channel_by_name`].
pub const CHANNEL_NAMES: [&str; 4] = ["damping", "identity", "unitary", "depolarizing"];

/// Builds a channel from a name and a numeric parameter list:
///
/// - `damping Γ∥ Γ⊥`
/// - `identity [dim]` (default 2)
/// - `depolarizing p [dim]` (default dim 2)
/// - `unitary re00 im00 re01 im01 ...`: the 2N² row-major entries of U
pub fn channel_by_name(name: &str, params: &[f64]) -> Result<SuperoperatorG> {
    let dim_param = |x: f64| -> Result<usize> {
        if x.fract() != 0.0 || x < 2.0 || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid dimension {x}")));
        }
        Ok(x as usize)
    };
    match (name, params) {
        ("damping", &[a, b]) => Ok(damping_channel(DampingParams::new(a, b)?)),
        ("identity", &[]) => identity_channel(2),
        ("identity", &[d]) => identity_channel(dim_param(d)?),
        ("depolarizing", &[p]) => depolarizing_channel(p, 2),
        ("depolarizing", &[p, d]) => depolarizing_channel(p, dim_param(d)?),
        ("unitary", entries) if !entries.is_empty() && entries.len() % 2 == 0 => {
            let n2 = entries.len() / 2;
            let n = (n2 as f64).sqrt().round() as usize;
            if n * n != n2 {
                return Err(Error::InvalidParameter(format!(
                    "unitary needs 2N² entries, got {}",
                    entries.len()
                )));
            }
            let u = CMat::from_fn(n, n, |r, c| {
                let idx = 2 * (r * n + c);
                Complex64::new(entries[idx], entries[idx + 1])
            });
            unitary_channel(&u)
        }
        (known, _) if CHANNEL_NAMES.contains(&known) => Err(Error::InvalidParameter(format!(
            "wrong parameter count {} for channel '{known}'",
            params.len()
        ))),
        (other, _) => Err(Error::InvalidParameter(format!(
            "unknown channel '{other}' (expected one of {})",
            CHANNEL_NAMES.join(", ")
        ))),
    }
}

/// The six Pauli eigenstates as inputs and the three Stern-Gerlach axes as
/// two-outcome projective measurements.
#[derive(Clone, Debug)]
pub struct QubitFixtures {
    /// Ordered `↑x, ↓x, ↑y, ↓y, ↑z, ↓z`.
    pub inputs: Vec<DensityMatrix>,
    /// Ordered `x, y, z`, each with outcomes `(↑, ↓)`.
    pub povms: Vec<Povm>,
}

pub const INPUT_LABELS: [&str; 6] = ["up_x", "down_x", "up_y", "down_y", "up_z", "down_z"];
pub const AXIS_LABELS: [&str; 3] = ["x", "y", "z"];
pub const OUTCOME_LABELS: [&str; 2] = ["up", "down"];

pub fn qubit_fixtures() -> QubitFixtures {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new;
    let vectors: [[Complex64; 2]; 6] = [
        [c(s, 0.0), c(s, 0.0)],
        [c(s, 0.0), c(-s, 0.0)],
        [c(s, 0.0), c(0.0, s)],
        [c(s, 0.0), c(0.0, -s)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(1.0, 0.0), c(0.0, 0.0)],
    ];
    let inputs = vectors
        .iter()
        .map(|v| DensityMatrix::pure(v).expect("normalized fixture"))
        .collect();
    let povms = (0..3)
        .map(|axis| {
            let elements = vec![
                PovmElement::projector(&vectors[2 * axis]).expect("fixture projector"),
                PovmElement::projector(&vectors[2 * axis + 1]).expect("fixture projector"),
            ];
            Povm::new(elements).expect("fixture POVM is complete")
        })
        .collect();
    QubitFixtures { inputs, povms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{apply_channel, g_to_chi, g_to_param_vector, psd_margin, tp_residual};

    #[test]
    fn zero_decay_is_identity() {
        let g = damping_channel(DampingParams::new(0.0, 0.0).unwrap());
        assert_eq!(g.max_abs_diff(&identity_channel(2).unwrap()), 0.0);
    }

    #[test]
    fn damping_param_vector() {
        let g = damping_channel(DampingParams::new(0.5, 0.75).unwrap());
        let p = g_to_param_vector(&g).unwrap().values;
        let want = [1.0, 0.393469, 0., 0., 0., 0., 0., 0., 0.472367, 0., 0., 0.];
        for (x, w) in p.iter().zip(want.iter()) {
            assert!((x - w).abs() < 1e-6, "{p:?}");
        }
        let chi = g_to_chi(&g);
        let want_chi = [
            [1.0, 0.0, 0.0, 0.472367],
            [0.0, 0.393469, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.472367, 0.0, 0.0, 0.606531],
        ];
        for (r, row) in want_chi.iter().enumerate() {
            for (cc, &w) in row.iter().enumerate() {
                assert!((chi.matrix()[(r, cc)] - Complex64::new(w, 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn strong_damping_resets_to_ground() {
        let g = damping_channel(DampingParams::new(50.0, 25.0).unwrap());
        let ground = DensityMatrix::basis_state(2, 0).unwrap();
        for rho in qubit_fixtures().inputs {
            let out = apply_channel(&g, &rho).unwrap();
            assert!(linalg::max_abs_diff(out.matrix(), ground.matrix()) < 1e-10);
        }
    }

    #[test]
    fn invalid_damping_is_rejected() {
        assert!(matches!(
            DampingParams::new(1.0, 0.4),
            Err(Error::NotCompletelyPositive(_))
        ));
        assert!(DampingParams::new(-0.1, 0.0).is_err());
        assert!(DampingParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn identity_channel_properties() {
        let g = identity_channel(2).unwrap();
        let chi = g_to_chi(&g);
        let ones: Vec<(usize, usize)> = (0..4)
            .flat_map(|r| (0..4).map(move |c| (r, c)))
            .filter(|&(r, c)| chi.matrix()[(r, c)] != linalg::ZERO)
            .collect();
        assert_eq!(ones, vec![(0, 0), (0, 3), (3, 0), (3, 3)]);
        assert!(ones
            .iter()
            .all(|&(r, c)| chi.matrix()[(r, c)] == linalg::ONE));
        assert_eq!(tp_residual(&g), 0.0);
        let rho =
            DensityMatrix::pure(&[Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.9)]).unwrap();
        assert!(
            linalg::max_abs_diff(apply_channel(&g, &rho).unwrap().matrix(), rho.matrix()) < 1e-15
        );
    }

    #[test]
    fn unitary_channels() {
        let c = Complex64::new;
        let x = CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let g = unitary_channel(&x).unwrap();
        let out = apply_channel(&g, &DensityMatrix::basis_state(2, 0).unwrap()).unwrap();
        assert!(
            linalg::max_abs_diff(
                out.matrix(),
                DensityMatrix::basis_state(2, 1).unwrap().matrix()
            ) < 1e-15
        );

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMat::from_row_slice(2, 2, &[c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)]);
        let out = apply_channel(
            &unitary_channel(&h).unwrap(),
            &DensityMatrix::basis_state(2, 0).unwrap(),
        )
        .unwrap();
        let half = CMat::from_element(2, 2, c(0.5, 0.0));
        assert!(linalg::max_abs_diff(out.matrix(), &half) < 1e-15);

        assert_eq!(
            unitary_channel(&CMat::identity(2, 2))
                .unwrap()
                .max_abs_diff(&identity_channel(2).unwrap()),
            0.0
        );
        assert!(matches!(
            unitary_channel(&CMat::identity(2, 2).scale(2.0)),
            Err(Error::NotUnitary(_))
        ));
        let chi = g_to_chi(&unitary_channel(&h).unwrap());
        let (values, _) = linalg::eigh(chi.matrix());
        assert_eq!(values.iter().filter(|&&mu| mu.abs() > 1e-12).count(), 1);
    }

    #[test]
    fn depolarizing_channels() {
        assert_eq!(
            depolarizing_channel(0.0, 2)
                .unwrap()
                .max_abs_diff(&identity_channel(2).unwrap()),
            0.0
        );
        let full = depolarizing_channel(1.0, 2).unwrap();
        for rho in qubit_fixtures().inputs {
            let out = apply_channel(&full, &rho).unwrap();
            assert!(linalg::max_abs_diff(out.matrix(), &CMat::identity(2, 2).unscale(2.0)) < 1e-15);
        }
        let half = depolarizing_channel(0.5, 2).unwrap();
        let out = apply_channel(&half, &DensityMatrix::basis_state(2, 0).unwrap()).unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.75).abs() < 1e-15);
        assert!((out.matrix()[(1, 1)].re - 0.25).abs() < 1e-15);
        assert!(depolarizing_channel(1.5, 2).is_err());
        assert!(psd_margin(&g_to_chi(&half)).unwrap() > 0.0);
    }

    #[test]
    fn fixtures_follow_convention() {
        let fx = qubit_fixtures();
        assert_eq!(fx.inputs.len(), 6);
        assert_eq!(fx.povms.len(), 3);
        let c = Complex64::new;
        let up_y = CMat::from_row_slice(2, 2, &[c(0.5, 0.), c(0., -0.5), c(0., 0.5), c(0.5, 0.)]);
        assert!(linalg::max_abs_diff(fx.inputs[2].matrix(), &up_y) < 1e-15);
        assert!(
            linalg::max_abs_diff(
                fx.inputs[4].matrix(),
                DensityMatrix::basis_state(2, 1).unwrap().matrix()
            ) < 1e-15
        );
        for rho in &fx.inputs {
            assert!((rho.purity() - 1.0).abs() < 1e-12);
        }
        // Tr[Π_↑z ϱ_↑z] = 1, Tr[Π_↑x ϱ_↑z] = 1/2
        let up_z = fx.povms[2].elements()[0].expectation(fx.inputs[4].matrix());
        assert!((up_z.re - 1.0).abs() < 1e-15);
        let up_x = fx.povms[0].elements()[0].expectation(fx.inputs[4].matrix());
        assert!((up_x.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn channel_names() {
        assert!(channel_by_name("damping", &[0.5, 0.75]).is_ok());
        assert!(channel_by_name("damping", &[0.5]).is_err());
        assert!(channel_by_name("identity", &[3.0]).unwrap().dim() == 3);
        assert!(channel_by_name("depolarizing", &[0.2]).is_ok());
        assert!(channel_by_name("unitary", &[0., 0., 1., 0., 1., 0., 0., 0.]).is_ok());
        assert!(channel_by_name("unitary", &[1., 0., 0.]).is_err());
        assert!(channel_by_name("bitflip", &[]).is_err());
    }
}
