use proptest::prelude::*;
use qpt_core::channels::{damping_tensor, depolarizing_channel};
use qpt_core::experiment::{
    born_probability, exact_frequencies, frequencies, simulate_counts, ExperimentDesign,
};
use qpt_core::io::{from_json_str, to_json_string, DatasetJson, Observations};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_setting_gets_exactly_its_shots(par in 0.0f64..2.0, extra in 0.0f64..2.0, shots in 1u64..200, seed in any::<u64>()) {
        let g = damping_tensor(par, par / 2.0 + extra);
        let design = ExperimentDesign::qubit_fixtures();
        let data = simulate_counts(&g, &design, shots, seed).unwrap();
        prop_assert!(data.counts().iter().all(|row| row.iter().sum::<u64>() == shots));
        prop_assert_eq!(data.total(), 18 * shots);
        prop_assert_eq!(simulate_counts(&g, &design, shots, seed).unwrap(), data);
    }

    #[test]
    fn born_probabilities_sum_to_one(p in 0.0f64..=1.0) {
        let g = depolarizing_channel(p, 2).unwrap();
        let design = ExperimentDesign::qubit_fixtures();
        for s in 0..design.settings().len() {
            let rho = design.input_of(s);
            let total: f64 = design
                .povm_of(s)
                .elements()
                .iter()
                .map(|e| born_probability(&g, rho, e).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn dataset_files_roundtrip_byte_for_byte(shots in 1u64..1000, seed in any::<u64>()) {
        let design = ExperimentDesign::qubit_fixtures();
        let data = simulate_counts(&damping_tensor(0.5, 0.75), &design, shots, seed).unwrap();
        let text = to_json_string(&DatasetJson::from_dataset(&data)).unwrap();
        let back = match from_json_str::<DatasetJson>(&text).unwrap().to_observations().unwrap() {
            Observations::Counts(d) => d,
            Observations::Exact { .. } => unreachable!(),
        };
        prop_assert_eq!(to_json_string(&DatasetJson::from_dataset(&back)).unwrap(), text);
        prop_assert_eq!(frequencies(&back).unwrap(), frequencies(&data).unwrap());
    }
}

#[test]
fn exact_frequencies_are_normalized_globally() {
    let design = ExperimentDesign::qubit_fixtures();
    let freqs = exact_frequencies(&damping_tensor(0.5, 0.75), &design).unwrap();
    let total: f64 = freqs.rows().iter().flatten().sum();
    assert!((total - 1.0).abs() <= 1e-15);
    for row in freqs.rows() {
        assert!((row.iter().sum::<f64>() - 1.0 / 18.0).abs() <= 1e-15);
    }
}
