use std::fmt::Write as _;

use qpt_core::io::{param_vector_of, ChannelJson, ReconstructionJson};
use qpt_core::qops::{g_to_chi, psd_margin, tp_residual, SuperoperatorG, PARAM_NAMES};
use serde::{Deserialize, Serialize};

use crate::config::ChannelSpec;
use crate::error::CliError;

/// Threshold on the linear-inversion PSD margin for counting a trial as
/// unphysical.
pub const UNPHYSICAL_MARGIN: f64 = -1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearJson {
    pub g: ChannelJson,
    pub chi: ChannelJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_vector: Option<Vec<f64>>,
    pub psd_margin: f64,
    pub tp_residual: f64,
}

impl LinearJson {
    pub fn from_g(g: &SuperoperatorG) -> Result<Self, CliError> {
        let chi = g_to_chi(g);
        Ok(Self {
            g: ChannelJson::from_g(g),
            chi: ChannelJson::from_chi(&chi),
            param_vector: param_vector_of(g),
            psd_margin: psd_margin(&chi)?,
            tp_residual: tp_residual(g),
        })
    }
}

/// Output of `reconstruct`: both estimators on one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub maxlik: ReconstructionJson,
    pub linear_inversion: LinearJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamTriple {
    pub param: String,
    pub maxlik: f64,
    pub linear: f64,
    pub truth: f64,
}

pub fn triples(maxlik: &[f64], linear: &[f64], truth: &[f64]) -> Vec<ParamTriple> {
    PARAM_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| ParamTriple {
            param: (*name).into(),
            maxlik: maxlik[i],
            linear: linear[i],
            truth: truth[i],
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    pub converged: bool,
    pub iterations: usize,
    pub projections: usize,
    pub log_likelihood: f64,
    pub log_likelihood_truth: f64,
    pub lambda_trace: f64,
    pub closure_residual: f64,
    pub maxlik_psd_margin: f64,
    pub maxlik_tp_residual: f64,
    pub linear_psd_margin: f64,
    pub maxlik_max_error: f64,
    pub linear_max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Mean absolute error per parameter, over trials.
    pub maxlik_mae: Vec<f64>,
    pub linear_mae: Vec<f64>,
    pub converged_trials: usize,
    pub total_projections: usize,
    pub maxlik_min_psd_margin: f64,
    pub maxlik_max_tp_residual: f64,
    pub linear_unphysical_threshold: f64,
    pub linear_unphysical_trials: usize,
    pub linear_unphysical_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureReport {
    pub channel: ChannelSpec,
    pub shots_per_setting: u64,
    pub trials: usize,
    pub seed: u64,
    pub exact: bool,
    /// Estimates from the first trial next to the true values.
    pub first_trial: Vec<ParamTriple>,
    pub summary: Summary,
    pub per_trial: Vec<TrialSummary>,
}

/// Per-trial vectors gathered by the demo.
pub struct TrialVectors {
    pub maxlik: Vec<f64>,
    pub linear: Vec<f64>,
}

pub fn summarize(truth: &[f64], vectors: &[TrialVectors], trials: &[TrialSummary]) -> Summary {
    let t = vectors.len() as f64;
    let mae = |pick: fn(&TrialVectors) -> &Vec<f64>| -> Vec<f64> {
        (0..truth.len())
            .map(|i| {
                vectors
                    .iter()
                    .map(|v| (pick(v)[i] - truth[i]).abs())
                    .sum::<f64>()
                    / t
            })
            .collect()
    };
    let unphysical = trials
        .iter()
        .filter(|s| s.linear_psd_margin < UNPHYSICAL_MARGIN)
        .count();
    Summary {
        maxlik_mae: mae(|v| &v.maxlik),
        linear_mae: mae(|v| &v.linear),
        converged_trials: trials.iter().filter(|s| s.converged).count(),
        total_projections: trials.iter().map(|s| s.projections).sum(),
        maxlik_min_psd_margin: trials
            .iter()
            .map(|s| s.maxlik_psd_margin)
            .fold(f64::INFINITY, f64::min),
        maxlik_max_tp_residual: trials
            .iter()
            .map(|s| s.maxlik_tp_residual)
            .fold(0.0, f64::max),
        linear_unphysical_threshold: UNPHYSICAL_MARGIN,
        linear_unphysical_trials: unphysical,
        linear_unphysical_fraction: unphysical as f64 / t,
    }
}

/// `param_name,maxlik,linear,truth`; an unknown truth is left empty.
pub fn comparison_csv(maxlik: &[f64], linear: &[f64], truth: Option<&[f64]>) -> String {
    let mut out = String::from("param_name,maxlik,linear,truth\n");
    for (i, name) in PARAM_NAMES.iter().enumerate() {
        let truth = truth.map(|t| t[i].to_string()).unwrap_or_default();
        let _ = writeln!(out, "{name},{},{},{truth}", maxlik[i], linear[i]);
    }
    out
}

/// `param_name,value` for the 12-vector.
pub fn params_csv(values: &[f64]) -> String {
    let mut out = String::from("param_name,value\n");
    for (name, v) in PARAM_NAMES.iter().zip(values) {
        let _ = writeln!(out, "{name},{v}");
    }
    out
}

pub fn parse_params_csv(text: &str) -> Result<[f64; 12], CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("param_name,value") {
        return Err(CliError::usage(
            "parameter CSV must start with 'param_name,value'",
        ));
    }
    let mut values = [0.0; 12];
    let mut seen = [false; 12];
    for line in lines {
        let (name, value) = line
            .split_once(',')
            .ok_or_else(|| CliError::usage(format!("bad CSV row '{line}'")))?;
        let idx = PARAM_NAMES
            .iter()
            .position(|p| *p == name.trim())
            .ok_or_else(|| CliError::usage(format!("unknown parameter '{name}'")))?;
        values[idx] = value
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad value '{value}' for {name}")))?;
        seen[idx] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(CliError::usage("parameter CSV must list all 12 parameters"));
    }
    Ok(values)
}
