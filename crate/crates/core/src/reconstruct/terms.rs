//! Per-event operators shared by the likelihood, the fixed-point updates and
//! the diagnostics.
//!
//! With χ in the `(i·N + k, j·N + l)` layout, the probability of event `m` is
//! `p_m = Tr[F_m χ]` where `F_m = Π^(m) ⊗ (ϱ_in^(m))ᵀ`.

use crate::experiment::{ExperimentDesign, FrequencyTable};
use crate::linalg::{self, CMat};
use crate::Result;
use num_complex::Complex64;

pub(crate) struct Term {
    pub setting: usize,
    pub outcome: usize,
    pub f: f64,
    pub effect: CMat,
    pub op: CMat,
}

pub(crate) struct Terms {
    pub dim: usize,
    pub terms: Vec<Term>,
}

impl Terms {
    pub fn new(freqs: &FrequencyTable, design: &ExperimentDesign) -> Result<Self> {
        freqs.check_against(design)?;
        let terms = design
            .events()
            .map(|(s, o, rho, effect)| Term {
                setting: s,
                outcome: o,
                f: freqs.get(s, o),
                effect: effect.matrix().clone(),
                op: effect.matrix().kronecker(&rho.matrix().transpose()),
            })
            .collect();
        Ok(Self {
            dim: design.dim(),
            terms,
        })
    }

    /// Unfloored `Tr[F_m χ]` for every event.
    pub fn probabilities(&self, chi: &CMat) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| trace_product(&t.op, chi))
            .collect()
    }

    /// `K = Σ_m (f_m / p_m) F_m` with `p_m` floored at `floor`.
    pub fn weighted_sum(&self, chi: &CMat, floor: f64) -> CMat {
        let n2 = self.dim * self.dim;
        let mut k = CMat::zeros(n2, n2);
        for t in &self.terms {
            if t.f == 0.0 {
                continue;
            }
            let p = trace_product(&t.op, chi).max(floor);
            k += &t.op * Complex64::new(t.f / p, 0.0);
        }
        k
    }

    /// `Σ_m f_m ln max(p_m, floor)`, skipping `f_m = 0`.
    pub fn log_likelihood(&self, chi: &CMat, floor: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.f > 0.0)
            .map(|t| t.f * trace_product(&t.op, chi).max(floor).ln())
            .sum()
    }

    /// `max |Σ_m (f_m / p_m) Π^(m) − I|`.
    pub fn closure_residual(&self, chi: &CMat, floor: f64) -> f64 {
        let mut s = CMat::zeros(self.dim, self.dim);
        for t in &self.terms {
            if t.f == 0.0 {
                continue;
            }
            let p = trace_product(&t.op, chi).max(floor);
            s += &t.effect * Complex64::new(t.f / p, 0.0);
        }
        linalg::max_abs_diff(&s, &CMat::identity(self.dim, self.dim))
    }
}

/// `Re Tr[a b]`.
fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a[(i, j)], b[(j, i)]);
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}
