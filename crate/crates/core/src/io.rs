//! JSON and CSV wire formats.
//!
//! Complex numbers are `[re, im]` pairs; matrices are arrays of rows. Channel
//! files carry `"kind"`, `"dim"` and `"basis": "standard"`. Floats use the
//! shortest representation that parses back to the same `f64`, so
//! write → read → write is byte-identical.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::experiment::{
    frequencies, Dataset, DesignLabels, ExperimentDesign, FrequencyTable, MeasurementSetting,
};
use crate::qops::{
    chi_to_g, g_to_chi, g_to_param_vector, standard_basis, ChiMatrix, DensityMatrix, KrausSet,
    Povm, PovmElement, SuperoperatorG,
};
use crate::reconstruct::{IterationRecord, ReconstructionResult};
use crate::{Error, Result};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

const STANDARD_BASIS: &str = "standard";

pub fn matrix_to_json(m: &DMatrix<Complex64>) -> MatrixJson {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<DMatrix<Complex64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format("matrix rows are empty or ragged".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| {
        Complex64::new(rows[r][c][0], rows[r][c][1])
    }))
}

/// A channel in one of its three representations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelJson {
    /// `g[i][j][k][l] = G_ij^kl`.
    Superoperator {
        dim: usize,
        basis: String,
        g: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    },
    Chi {
        dim: usize,
        basis: String,
        chi: MatrixJson,
    },
    Kraus {
        dim: usize,
        ops: Vec<MatrixJson>,
        /// `max |Σ A†A − I|` recomputed when the file was written.
        completeness_residual: f64,
    },
}

impl ChannelJson {
    pub fn from_g(g: &SuperoperatorG) -> Self {
        let n = g.dim();
        let tensor = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| {
                                (0..n)
                                    .map(|l| {
                                        let z = g.get(i, j, k, l);
                                        [z.re, z.im]
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ChannelJson::Superoperator {
            dim: n,
            basis: STANDARD_BASIS.into(),
            g: tensor,
        }
    }

    pub fn from_chi(chi: &ChiMatrix) -> Self {
        ChannelJson::Chi {
            dim: chi.dim(),
            basis: STANDARD_BASIS.into(),
            chi: matrix_to_json(chi.matrix()),
        }
    }

    pub fn from_kraus(kraus: &KrausSet) -> Self {
        ChannelJson::Kraus {
            dim: kraus.dim(),
            ops: kraus.ops().iter().map(matrix_to_json).collect(),
            completeness_residual: kraus.completeness_residual(),
        }
    }

    pub fn to_g(&self) -> Result<SuperoperatorG> {
        match self {
            ChannelJson::Superoperator { dim, basis, g } => {
                check_basis(basis)?;
                let n = *dim;
                let shape_ok = g.len() == n
                    && g.iter().all(|a| {
                        a.len() == n
                            && a.iter()
                                .all(|b| b.len() == n && b.iter().all(|c| c.len() == n))
                    });
                if !shape_ok {
                    return Err(Error::Format(format!("superoperator tensor is not {n}^4")));
                }
                SuperoperatorG::from_fn(n, |i, j, k, l| {
                    let [re, im] = g[i][j][k][l];
                    Complex64::new(re, im)
                })
            }
            ChannelJson::Chi { dim, basis, chi } => {
                check_basis(basis)?;
                let chi = ChiMatrix::new(*dim, matrix_from_json(chi)?)?;
                chi_to_g(&chi, &standard_basis(*dim)?)
            }
            ChannelJson::Kraus { dim, ops, .. } => {
                let ops = ops
                    .iter()
                    .map(matrix_from_json)
                    .collect::<Result<Vec<_>>>()?;
                let kraus = KrausSet::new(ops)?;
                if kraus.dim() != *dim {
                    return Err(Error::Format(
                        "Kraus operator size disagrees with dim".into(),
                    ));
                }
                let chi = kraus.to_chi(&standard_basis(*dim)?)?;
                chi_to_g(&chi, &standard_basis(*dim)?)
            }
        }
    }

    pub fn to_chi(&self) -> Result<ChiMatrix> {
        self.to_g().map(|g| g_to_chi(&g))
    }
}

fn check_basis(basis: &str) -> Result<()> {
    if basis != STANDARD_BASIS {
        return Err(Error::Format(format!("unsupported basis '{basis}'")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelsJson {
    pub inputs: Vec<String>,
    pub povms: Vec<String>,
    pub outcomes: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignJson {
    pub dim: usize,
    pub inputs: Vec<MatrixJson>,
    pub povms: Vec<Vec<MatrixJson>>,
    /// `[input_index, povm_index]` per setting.
    pub settings: Vec<[usize; 2]>,
    pub labels: LabelsJson,
}

impl DesignJson {
    pub fn from_design(design: &ExperimentDesign) -> Self {
        let labels = design.labels();
        Self {
            dim: design.dim(),
            inputs: design
                .inputs()
                .iter()
                .map(|r| matrix_to_json(r.matrix()))
                .collect(),
            povms: design
                .povms()
                .iter()
                .map(|p| {
                    p.elements()
                        .iter()
                        .map(|e| matrix_to_json(e.matrix()))
                        .collect()
                })
                .collect(),
            settings: design
                .settings()
                .iter()
                .map(|s| [s.input_index, s.povm_index])
                .collect(),
            labels: LabelsJson {
                inputs: labels.inputs.clone(),
                povms: labels.povms.clone(),
                outcomes: labels.outcomes.clone(),
            },
        }
    }

    pub fn to_design(&self) -> Result<ExperimentDesign> {
        let inputs = self
            .inputs
            .iter()
            .map(|m| DensityMatrix::new(matrix_from_json(m)?))
            .collect::<Result<Vec<_>>>()?;
        let povms = self
            .povms
            .iter()
            .map(|elements| {
                let elements = elements
                    .iter()
                    .map(|m| PovmElement::new(matrix_from_json(m)?))
                    .collect::<Result<Vec<_>>>()?;
                Povm::new(elements)
            })
            .collect::<Result<Vec<_>>>()?;
        if inputs.first().map(DensityMatrix::dim) != Some(self.dim) {
            return Err(Error::Format("design dim disagrees with its states".into()));
        }
        let settings = self
            .settings
            .iter()
            .map(|&[input_index, povm_index]| MeasurementSetting {
                input_index,
                povm_index,
            })
            .collect();
        let labels = DesignLabels {
            inputs: self.labels.inputs.clone(),
            povms: self.labels.povms.clone(),
            outcomes: self.labels.outcomes.clone(),
        };
        ExperimentDesign::new(inputs, povms, settings, Some(labels))
    }
}

/// Dataset file. Sampled data carries integer `counts`; the infinite-shot
/// mode carries `frequencies` instead and sets `exact`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetJson {
    pub design: DesignJson,
    pub shots_per_setting: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<[u64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
    pub seed: Option<u64>,
}

/// Parsed measurement record.
#[derive(Clone, Debug)]
pub enum Observations {
    Counts(Dataset),
    Exact {
        design: ExperimentDesign,
        freqs: FrequencyTable,
    },
}

impl Observations {
    pub fn design(&self) -> &ExperimentDesign {
        match self {
            Observations::Counts(d) => d.design(),
            Observations::Exact { design, .. } => design,
        }
    }

    pub fn frequency_table(&self) -> Result<FrequencyTable> {
        match self {
            Observations::Counts(d) => frequencies(d),
            Observations::Exact { freqs, .. } => Ok(freqs.clone()),
        }
    }
}

impl DatasetJson {
    pub fn from_dataset(data: &Dataset) -> Self {
        let counts = data
            .counts()
            .iter()
            .enumerate()
            .flat_map(|(s, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(o, &n)| [s as u64, o as u64, n])
            })
            .collect();
        Self {
            design: DesignJson::from_design(data.design()),
            shots_per_setting: data.shots_per_setting(),
            counts: Some(counts),
            frequencies: None,
            exact: false,
            seed: data.seed(),
        }
    }

    pub fn from_exact(
        design: &ExperimentDesign,
        freqs: &FrequencyTable,
        shots_per_setting: u64,
    ) -> Self {
        let entries = freqs
            .rows()
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().enumerate().map(move |(o, &f)| (s, o, f)))
            .collect();
        Self {
            design: DesignJson::from_design(design),
            shots_per_setting,
            counts: None,
            frequencies: Some(entries),
            exact: true,
            seed: None,
        }
    }

    pub fn to_observations(&self) -> Result<Observations> {
        let design = self.design.to_design()?;
        let mut table: Vec<Vec<Option<f64>>> = (0..design.settings().len())
            .map(|s| vec![None; design.outcome_count(s)])
            .collect();
        let mut place = |s: usize, o: usize, v: f64| -> Result<()> {
            let slot = table
                .get_mut(s)
                .and_then(|row| row.get_mut(o))
                .ok_or_else(|| Error::Format(format!("entry ({s}, {o}) out of range")))?;
            if slot.replace(v).is_some() {
                return Err(Error::Format(format!("duplicate entry ({s}, {o})")));
            }
            Ok(())
        };
        match (&self.counts, &self.frequencies) {
            (Some(counts), None) if !self.exact => {
                for &[s, o, n] in counts {
                    place(s as usize, o as usize, n as f64)?;
                }
            }
            (None, Some(freqs)) if self.exact => {
                for &(s, o, f) in freqs {
                    place(s, o, f)?;
                }
            }
            _ => {
                return Err(Error::Format(
                    "dataset needs either counts, or frequencies with exact = true".into(),
                ))
            }
        }
        let filled = table
            .into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<f64>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Format("dataset is missing entries".into()))?;
        if self.exact {
            let freqs = FrequencyTable::new(filled)?;
            return Ok(Observations::Exact { design, freqs });
        }
        let counts = filled
            .into_iter()
            .map(|row| row.into_iter().map(|x| x as u64).collect())
            .collect();
        Dataset::new(design, counts, self.shots_per_setting, self.seed).map(Observations::Counts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub closure_residual: f64,
    pub tp_residual: f64,
    pub psd_margin: f64,
    pub lambda_trace: f64,
    pub lambda_hermiticity_defect: f64,
    pub lambda_min_eigenvalue: f64,
    pub stationarity_residual: f64,
    pub dual_margin: f64,
    pub projections: usize,
    pub design_rank: usize,
    pub parameter_count: usize,
    pub loglik_monotone: bool,
    pub loglik_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionJson {
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
    pub g: ChannelJson,
    pub chi: ChannelJson,
    pub lambda: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_vector: Option<Vec<f64>>,
    pub diagnostics: DiagnosticsJson,
}

impl ReconstructionJson {
    pub fn from_result(result: &ReconstructionResult) -> Self {
        let d = &result.diagnostics;
        Self {
            converged: result.converged,
            iterations: result.iterations,
            log_likelihood: result.log_likelihood,
            g: ChannelJson::from_g(&result.g_hat),
            chi: ChannelJson::from_chi(&result.chi_hat),
            lambda: matrix_to_json(result.lambda.matrix()),
            param_vector: param_vector_of(&result.g_hat),
            diagnostics: DiagnosticsJson {
                closure_residual: d.closure_residual,
                tp_residual: d.tp_residual,
                psd_margin: d.psd_margin,
                lambda_trace: d.lambda_trace,
                lambda_hermiticity_defect: d.lambda_hermiticity_defect,
                lambda_min_eigenvalue: d.lambda_min_eigenvalue,
                stationarity_residual: d.stationarity_residual,
                dual_margin: d.dual_margin,
                projections: d.projections,
                design_rank: d.design_rank,
                parameter_count: d.parameter_count,
                loglik_monotone: d.loglik_monotone,
                loglik_trace: d.loglik_trace.clone(),
            },
        }
    }
}

/// The 12-vector for qubit maps, `None` otherwise.
pub fn param_vector_of(g: &SuperoperatorG) -> Option<Vec<f64>> {
    g_to_param_vector(g).ok().map(|p| p.values.to_vec())
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json_str<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

/// `input,axis,outcome,count` rows, using the design labels.
pub fn counts_csv(data: &Dataset) -> String {
    let design = data.design();
    let labels = design.labels();
    let mut out = String::from("input,axis,outcome,count\n");
    for (s, row) in data.counts().iter().enumerate() {
        let setting = design.settings()[s];
        for (o, n) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                labels.inputs[setting.input_index],
                labels.povms[setting.povm_index],
                labels.outcomes[setting.povm_index][o],
                n
            );
        }
    }
    out
}

/// `iteration,loglik,tp_residual,psd_margin,closure_residual` rows.
pub fn trace_csv(records: &[IterationRecord]) -> String {
    let mut out = String::from("iteration,loglik,tp_residual,psd_margin,closure_residual\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration, r.log_likelihood, r.tp_residual, r.psd_margin, r.closure_residual
        );
    }
    out
}
