//! The optimized updates against literal index-loop evaluations.

mod common;

use common::{inverse_2x2, max_abs, random_channel, random_frequencies, rng, CMat};
use nalgebra::DMatrix;
use qpt_core::channels::{damping_channel, DampingParams};
use qpt_core::experiment::{exact_frequencies, ExperimentDesign, FrequencyTable};
use qpt_core::qops::SuperoperatorG;
use qpt_core::reconstruct::{g_update, lambda_update, log_likelihood, DEFAULT_PROB_FLOOR};
use qpt_core::Complex64;

const N: usize = 2;

fn naive_probabilities(
    g: &SuperoperatorG,
    design: &ExperimentDesign,
) -> Vec<(f64, CMat, CMat, usize, usize)> {
    design
        .events()
        .map(|(s, o, rho, effect)| {
            let (rho, pi) = (rho.matrix(), effect.matrix());
            let mut p = Complex64::new(0.0, 0.0);
            for a in 0..N {
                for b in 0..N {
                    for k in 0..N {
                        for l in 0..N {
                            p += pi[(b, a)] * g.get(a, b, k, l) * rho[(k, l)];
                        }
                    }
                }
            }
            (p.re, pi.clone(), rho.clone(), s, o)
        })
        .collect()
}

fn naive_lambda(g: &SuperoperatorG, freqs: &FrequencyTable, design: &ExperimentDesign) -> CMat {
    let mut lam = CMat::zeros(N, N);
    for (p, pi, rho, s, o) in naive_probabilities(g, design) {
        let f = freqs.get(s, o);
        if f == 0.0 {
            continue;
        }
        let w = f / p.max(DEFAULT_PROB_FLOOR);
        for i in 0..N {
            for j in 0..N {
                for a in 0..N {
                    for k in 0..N {
                        for q in 0..N {
                            lam[(i, j)] += pi[(k, a)] * g.get(a, k, q, i) * rho[(q, j)] * w;
                        }
                    }
                }
            }
        }
    }
    lam
}

fn naive_g_update(
    g: &SuperoperatorG,
    lam: &CMat,
    freqs: &FrequencyTable,
    design: &ExperimentDesign,
) -> SuperoperatorG {
    let inv = inverse_2x2(lam);
    let mut raw = vec![Complex64::new(0.0, 0.0); N.pow(4)];
    let idx = |b: usize, c: usize, n: usize, p: usize| ((b * N + c) * N + n) * N + p;
    for (prob, pi, rho, s, o) in naive_probabilities(g, design) {
        let f = freqs.get(s, o);
        if f == 0.0 {
            continue;
        }
        let w = f / prob.max(DEFAULT_PROB_FLOOR);
        for b in 0..N {
            for c in 0..N {
                for n in 0..N {
                    for p in 0..N {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a in 0..N {
                            for k in 0..N {
                                for l in 0..N {
                                    acc +=
                                        pi[(b, a)] * rho[(k, l)] * inv[(l, n)] * g.get(a, c, k, p);
                                }
                            }
                        }
                        raw[idx(b, c, n, p)] += acc * w;
                    }
                }
            }
        }
    }
    SuperoperatorG::from_fn(N, |i, j, k, l| {
        0.5 * (raw[idx(i, j, k, l)] + raw[idx(j, i, l, k)].conj())
    })
    .unwrap()
}

#[test]
fn lambda_matches_index_loops_on_random_instances() {
    let design = ExperimentDesign::qubit_fixtures();
    let mut r = rng(11);
    for _ in 0..100 {
        let (_, g) = random_channel(&mut r, N);
        let freqs = random_frequencies(&mut r, &design);
        let fast = lambda_update(&g, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
        let slow = naive_lambda(&g, &freqs, &design);
        assert!(max_abs(&(fast.matrix() - &slow)) <= 1e-12);
        assert!((fast.trace().re - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn g_update_matches_index_loops_on_random_instances() {
    let design = ExperimentDesign::qubit_fixtures();
    let mut r = rng(12);
    for _ in 0..100 {
        let (_, g) = random_channel(&mut r, N);
        let freqs = random_frequencies(&mut r, &design);
        let lam = lambda_update(&g, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
        let fast = g_update(&g, &lam, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
        let slow = naive_g_update(&g, lam.matrix(), &freqs, &design);
        assert!(fast.max_abs_diff(&slow) <= 1e-12);
    }
}

#[test]
fn every_step_is_trace_preserving() {
    let design = ExperimentDesign::qubit_fixtures();
    let mut r = rng(13);
    for _ in 0..100 {
        let (_, g) = random_channel(&mut r, N);
        let freqs = random_frequencies(&mut r, &design);
        let lam = lambda_update(&g, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
        let next = g_update(&g, &lam, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
        assert!(qpt_core::qops::tp_residual(&next) <= 1e-9);
        assert!(next.hermiticity_pairing_defect() <= 1e-12);
    }
}

#[test]
fn lambda_at_truth_is_half_identity() {
    let design = ExperimentDesign::qubit_fixtures();
    let g = damping_channel(DampingParams::new(0.5, 0.75).unwrap());
    let freqs = exact_frequencies(&g, &design).unwrap();
    let lam = lambda_update(&g, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
    let slow = naive_lambda(&g, &freqs, &design);
    assert!(max_abs(&(lam.matrix() - &slow)) <= 1e-12);
    let half = DMatrix::<Complex64>::identity(2, 2) * Complex64::new(0.5, 0.0);
    assert!(max_abs(&(lam.matrix() - half)) <= 1e-12);
    assert!(lam.hermiticity_defect() <= 1e-12);
    assert!((lam.trace().re - 1.0).abs() <= 1e-12);
}

#[test]
fn truth_is_a_fixed_point_of_exact_data() {
    let design = ExperimentDesign::qubit_fixtures();
    let g = damping_channel(DampingParams::new(0.5, 0.75).unwrap());
    let freqs = exact_frequencies(&g, &design).unwrap();
    let lam = lambda_update(&g, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
    let next = g_update(&g, &lam, &freqs, &design, DEFAULT_PROB_FLOOR).unwrap();
    assert!(next.max_abs_diff(&g) <= 1e-9);
}

#[test]
fn log_likelihood_matches_term_sum() {
    let design = ExperimentDesign::qubit_fixtures();
    let g = damping_channel(DampingParams::new(0.5, 0.75).unwrap());
    let freqs = exact_frequencies(&g, &design).unwrap();
    let expected: f64 = naive_probabilities(&g, &design)
        .into_iter()
        .map(|(p, _, _, s, o)| {
            let f = freqs.get(s, o);
            if f == 0.0 {
                0.0
            } else {
                f * p.ln()
            }
        })
        .sum();
    let value = log_likelihood(&g, &freqs, &design).unwrap();
    assert!(value.is_finite() && value < 0.0);
    assert!((value - expected).abs() <= 1e-12);
}
