//! Experiment designs, Born probabilities and Monte Carlo count generation.
//!
//! A design pairs input states with POVMs. Each pairing is a
//! [`MeasurementSetting`]; an event `m` of the likelihood is a setting together
//! with one of its POVM outcomes. Simulated data draws a fixed number of shots
//! per setting, so for the qubit fixtures with `N` shots each input is prepared
//! `3N` times and each axis is measured `N` times per input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{self, QubitFixtures};
use crate::qops::{DensityMatrix, Povm, PovmElement, SuperoperatorG};
use crate::{Error, Result};

const BOUNDARY_CLAMP: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-8;

/// One (input state, POVM) pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementSetting {
    pub input_index: usize,
    pub povm_index: usize,
}

/// Human-readable names used by CSV exports.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignLabels {
    pub inputs: Vec<String>,
    pub povms: Vec<String>,
    /// Per POVM, one label per outcome.
    pub outcomes: Vec<Vec<String>>,
}

impl DesignLabels {
    fn numbered(inputs: usize, povms: &[Povm]) -> Self {
        Self {
            inputs: (0..inputs).map(|i| format!("input{i}")).collect(),
            povms: (0..povms.len()).map(|i| format!("povm{i}")).collect(),
            outcomes: povms
                .iter()
                .map(|p| (0..p.len()).map(|o| o.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentDesign {
    inputs: Vec<DensityMatrix>,
    povms: Vec<Povm>,
    settings: Vec<MeasurementSetting>,
    labels: DesignLabels,
}

impl ExperimentDesign {
    pub fn new(
        inputs: Vec<DensityMatrix>,
        povms: Vec<Povm>,
        settings: Vec<MeasurementSetting>,
        labels: Option<DesignLabels>,
    ) -> Result<Self> {
        if inputs.is_empty() || povms.is_empty() || settings.is_empty() {
            return Err(Error::InvalidDesign(
                "inputs, POVMs and settings must be non-empty".into(),
            ));
        }
        let dim = inputs[0].dim();
        for d in inputs
            .iter()
            .map(|r| r.dim())
            .chain(povms.iter().map(|p| p.dim()))
        {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
        }
        for s in &settings {
            if s.input_index >= inputs.len() || s.povm_index >= povms.len() {
                return Err(Error::InvalidDesign(format!(
                    "setting ({}, {}) out of range",
                    s.input_index, s.povm_index
                )));
            }
        }
        let labels = labels.unwrap_or_else(|| DesignLabels::numbered(inputs.len(), &povms));
        let shapes_match = labels.inputs.len() == inputs.len()
            && labels.povms.len() == povms.len()
            && labels.outcomes.len() == povms.len()
            && labels
                .outcomes
                .iter()
                .zip(&povms)
                .all(|(l, p)| l.len() == p.len());
        if !shapes_match {
            return Err(Error::InvalidDesign(
                "labels do not match design shape".into(),
            ));
        }
        Ok(Self {
            inputs,
            povms,
            settings,
            labels,
        })
    }

    /// Every input paired with every POVM, input-major.
    pub fn full(
        inputs: Vec<DensityMatrix>,
        povms: Vec<Povm>,
        labels: Option<DesignLabels>,
    ) -> Result<Self> {
        let settings = (0..inputs.len())
            .flat_map(|i| {
                (0..povms.len()).map(move |p| MeasurementSetting {
                    input_index: i,
                    povm_index: p,
                })
            })
            .collect();
        Self::new(inputs, povms, settings, labels)
    }

    /// Six Pauli eigenstates × three axes: 18 settings, 36 events.
    pub fn qubit_fixtures() -> Self {
        let QubitFixtures { inputs, povms } = channels::qubit_fixtures();
        let labels = DesignLabels {
            inputs: channels::INPUT_LABELS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            povms: channels::AXIS_LABELS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            outcomes: vec![
                channels::OUTCOME_LABELS
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                3
            ],
        };
        Self::full(inputs, povms, Some(labels)).expect("fixture design is valid")
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].dim()
    }

    pub fn inputs(&self) -> &[DensityMatrix] {
        &self.inputs
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn settings(&self) -> &[MeasurementSetting] {
        &self.settings
    }

    pub fn labels(&self) -> &DesignLabels {
        &self.labels
    }

    pub fn outcome_count(&self, setting: usize) -> usize {
        self.povms[self.settings[setting].povm_index].len()
    }

    pub fn input_of(&self, setting: usize) -> &DensityMatrix {
        &self.inputs[self.settings[setting].input_index]
    }

    pub fn povm_of(&self, setting: usize) -> &Povm {
        &self.povms[self.settings[setting].povm_index]
    }

    /// All `(setting, outcome, input, effect)` events in table order.
    pub fn events(
        &self,
    ) -> impl Iterator<Item = (usize, usize, &DensityMatrix, &PovmElement)> + '_ {
        self.settings
            .iter()
            .enumerate()
            .flat_map(move |(s, setting)| {
                let rho = &self.inputs[setting.input_index];
                self.povms[setting.povm_index]
                    .elements()
                    .iter()
                    .enumerate()
                    .map(move |(o, e)| (s, o, rho, e))
            })
    }

    fn check_table_shape<T>(&self, table: &[Vec<T>]) -> Result<()> {
        if table.len() != self.settings.len() {
            return Err(Error::InvalidDesign(format!(
                "table has {} settings, design has {}",
                table.len(),
                self.settings.len()
            )));
        }
        for (s, row) in table.iter().enumerate() {
            if row.len() != self.outcome_count(s) {
                return Err(Error::InvalidDesign(format!(
                    "setting {s} has {} outcomes, table has {}",
                    self.outcome_count(s),
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome counts per setting, with a fixed number of shots per setting.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    design: ExperimentDesign,
    counts: Vec<Vec<u64>>,
    shots_per_setting: u64,
    seed: Option<u64>,
}

impl Dataset {
    pub fn new(
        design: ExperimentDesign,
        counts: Vec<Vec<u64>>,
        shots_per_setting: u64,
        seed: Option<u64>,
    ) -> Result<Self> {
        if shots_per_setting == 0 {
            return Err(Error::InvalidParameter(
                "shots_per_setting must be positive".into(),
            ));
        }
        design.check_table_shape(&counts)?;
        for (s, row) in counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            if total != shots_per_setting {
                return Err(Error::InvalidDesign(format!(
                    "setting {s} has {total} counts, expected {shots_per_setting}"
                )));
            }
        }
        Ok(Self {
            design,
            counts,
            shots_per_setting,
            seed,
        })
    }

    pub fn design(&self) -> &ExperimentDesign {
        &self.design
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn shots_per_setting(&self) -> u64 {
        self.shots_per_setting
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Relative frequencies `f_m`, normalized over all settings and outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTable {
    f: Vec<Vec<f64>>,
}

impl FrequencyTable {
    /// Rescales nonnegative weights so the whole table sums to one.
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let mut total = 0.0;
        for &w in weights.iter().flatten() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter(format!("invalid frequency {w}")));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::EmptyDataset);
        }
        let f = weights
            .into_iter()
            .map(|row| row.into_iter().map(|w| w / total).collect())
            .collect();
        Ok(Self { f })
    }

    pub fn get(&self, setting: usize, outcome: usize) -> f64 {
        self.f[setting][outcome]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.f
    }

    pub fn total(&self) -> f64 {
        self.f.iter().flatten().sum()
    }

    /// Frequencies within each setting, `n_o / Σ_o n_o`. Settings without
    /// any weight give `None`.
    pub fn per_setting(&self) -> Vec<Option<Vec<f64>>> {
        self.f
            .iter()
            .map(|row| {
                let t: f64 = row.iter().sum();
                (t > 0.0).then(|| row.iter().map(|x| x / t).collect())
            })
            .collect()
    }

    pub(crate) fn check_against(&self, design: &ExperimentDesign) -> Result<()> {
        design.check_table_shape(&self.f)
    }
}

/// `Tr[Π G(ϱ)]`, clamped to `[0, 1]` within 1e-10 of the boundary.
pub fn born_probability(
    g: &SuperoperatorG,
    input: &DensityMatrix,
    effect: &PovmElement,
) -> Result<f64> {
    if g.dim() != input.dim() || g.dim() != effect.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: if g.dim() != input.dim() {
                input.dim()
            } else {
                effect.dim()
            },
        });
    }
    let out = g.apply_matrix(input.matrix())?;
    let p = effect.expectation(&out).re;
    if !(-PROBABILITY_TOL..=1.0 + PROBABILITY_TOL).contains(&p) || !p.is_finite() {
        return Err(Error::UnphysicalProbability(p));
    }
    if p < BOUNDARY_CLAMP {
        Ok(p.max(0.0))
    } else if p > 1.0 - BOUNDARY_CLAMP {
        Ok(p.min(1.0))
    } else {
        Ok(p)
    }
}

/// Born probabilities of every event, one row per setting.
pub fn probability_table(g: &SuperoperatorG, design: &ExperimentDesign) -> Result<Vec<Vec<f64>>> {
    let mut table: Vec<Vec<f64>> = design
        .settings()
        .iter()
        .map(|s| Vec::with_capacity(design.povms()[s.povm_index].len()))
        .collect();
    for (s, _, rho, effect) in design.events() {
        table[s].push(born_probability(g, rho, effect)?);
    }
    Ok(table)
}

/// Draws `shots_per_setting` outcomes for every setting. Setting `s` uses a
/// ChaCha8 stream selected by `s` under the 64-bit `seed`, so results do not
/// depend on evaluation order.
pub fn simulate_counts(
    g: &SuperoperatorG,
    design: &ExperimentDesign,
    shots_per_setting: u64,
    seed: u64,
) -> Result<Dataset> {
    if shots_per_setting == 0 {
        return Err(Error::InvalidParameter(
            "shots_per_setting must be positive".into(),
        ));
    }
    let probabilities = probability_table(g, design)?;
    for row in &probabilities {
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::ProbabilityNormalization(total));
        }
    }
    let counts = probabilities
        .par_iter()
        .enumerate()
        .map(|(s, row)| sample_setting(row, shots_per_setting, seed, s as u64))
        .collect();
    Dataset::new(design.clone(), counts, shots_per_setting, Some(seed))
}

fn sample_setting(probabilities: &[f64], shots: u64, seed: u64, stream: u64) -> Vec<u64> {
    let total: f64 = probabilities.iter().sum();
    let mut cumulative = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for p in probabilities {
        acc += p / total;
        cumulative.push(acc);
    }
    // Rounding can leave the last cumulative value slightly below one.
    let fallback = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let outcome = cumulative
            .iter()
            .zip(probabilities)
            .position(|(&c, &p)| p > 0.0 && u < c)
            .unwrap_or(fallback);
        counts[outcome] += 1;
    }
    counts
}

/// `f_m = n_m / Σ n`, normalized over the whole dataset.
pub fn frequencies(data: &Dataset) -> Result<FrequencyTable> {
    if data.total() == 0 {
        return Err(Error::EmptyDataset);
    }
    FrequencyTable::new(
        data.counts
            .iter()
            .map(|row| row.iter().map(|&n| n as f64).collect())
            .collect(),
    )
}

/// The infinite-shot limit: `f_m = p_m / (number of settings)`.
pub fn exact_frequencies(g: &SuperoperatorG, design: &ExperimentDesign) -> Result<FrequencyTable> {
    let settings = design.settings().len() as f64;
    let table = probability_table(g, design)?
        .into_iter()
        .map(|row| row.into_iter().map(|p| p / settings).collect())
        .collect();
    FrequencyTable::new(table)
}
