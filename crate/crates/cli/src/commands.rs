use std::fs;
use std::path::{Path, PathBuf};

use qpt_core::experiment::{
    exact_frequencies, frequencies, simulate_counts, ExperimentDesign, FrequencyTable,
};
use qpt_core::io::{
    counts_csv, from_json_str, param_vector_of, to_json_string, trace_csv, ChannelJson,
    DatasetJson, ReconstructionJson,
};
use qpt_core::qops::{
    chi_to_g, g_to_chi, g_to_param_vector, kraus_from_chi, psd_margin, standard_basis, tp_residual,
    ParamVector, SuperoperatorG, PARAM_NAMES,
};
use qpt_core::reconstruct::{
    linear_inversion, log_likelihood, maxlik_reconstruct, ReconstructionResult, SolverConfig,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{
    comparison_csv, params_csv, parse_params_csv, summarize, triples, FigureReport, LinearJson,
    ResultFile, TrialSummary, TrialVectors,
};
use crate::svg::{bar_chart, Series};

pub const REPORT_FILE: &str = "report.json";
pub const COMPARISON_FILE: &str = "comparison.csv";
pub const FIGURE_FILE: &str = "figure.svg";
pub const DEFAULT_DEMO_DIR: &str = "qpt-demo";

/// Eigenvalues of χ below this are dropped when extracting Kraus operators,
/// matching the solver's PSD repair tolerance.
pub const KRAUS_TOL: f64 = 1e-10;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dataset_json(
    cfg: &RunConfig,
    truth: &SuperoperatorG,
    design: &ExperimentDesign,
    seed: u64,
) -> Result<DatasetJson, CliError> {
    if cfg.exact {
        let freqs = exact_frequencies(truth, design)?;
        return Ok(DatasetJson::from_exact(
            design,
            &freqs,
            cfg.shots_per_setting,
        ));
    }
    let data = simulate_counts(truth, design, cfg.shots_per_setting, seed)?;
    Ok(DatasetJson::from_dataset(&data))
}

/// `simulate`: writes a dataset file and, on request, the counts CSV.
pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let truth = cfg.channel.build()?;
    let design = cfg.design();
    if cfg.exact && cfg.outputs.csv.is_some() {
        return Err(CliError::usage("--csv needs sampled counts; drop --exact"));
    }
    let json = dataset_json(cfg, &truth, &design, cfg.seed)?;
    emit(cfg.outputs.out.as_deref(), &to_json_string(&json)?)?;
    if let Some(path) = &cfg.outputs.csv {
        let data = simulate_counts(&truth, &design, cfg.shots_per_setting, cfg.seed)?;
        write_text(path, &counts_csv(&data))?;
    }
    Ok(())
}

fn solver_config(cfg: &RunConfig, want_trace: bool) -> SolverConfig {
    let mut solver = cfg.solver.to_config();
    if want_trace && solver.log_every == 0 {
        solver.log_every = 1;
    }
    solver
}

/// `reconstruct`: both estimators on a dataset file. `truth` fills the
/// comparison CSV when the true channel is known.
pub fn reconstruct(
    cfg: &RunConfig,
    dataset: &Path,
    trace_path: Option<&Path>,
    truth: Option<&SuperoperatorG>,
) -> Result<(), CliError> {
    let parsed: DatasetJson = from_json_str(&read_text(dataset)?)?;
    let obs = parsed.to_observations()?;
    let freqs = obs.frequency_table()?;
    let design = obs.design();
    let solver = solver_config(cfg, trace_path.is_some());
    let maxlik = maxlik_reconstruct(&freqs, design, &solver)?;
    let linear = linear_inversion(&freqs, design)?;
    let file = ResultFile {
        maxlik: ReconstructionJson::from_result(&maxlik),
        linear_inversion: LinearJson::from_g(&linear)?,
    };
    emit(cfg.outputs.out.as_deref(), &to_json_string(&file)?)?;
    if let Some(path) = trace_path {
        write_text(path, &trace_csv(&maxlik.diagnostics.records))?;
    }
    if let Some(path) = &cfg.outputs.csv {
        let ml = param_vector_of(&maxlik.g_hat)
            .ok_or_else(|| CliError::usage("comparison CSV needs a qubit design"))?;
        let li = param_vector_of(&linear)
            .ok_or_else(|| CliError::usage("comparison CSV needs a qubit design"))?;
        let tv = truth.map(g_to_param_vector).transpose()?.map(|p| p.values);
        write_text(
            path,
            &comparison_csv(&ml, &li, tv.as_ref().map(|v| v.as_slice())),
        )?;
    }
    Ok(())
}

/// One simulated experiment with both estimates.
pub struct Trial {
    pub freqs: FrequencyTable,
    pub maxlik: ReconstructionResult,
    pub linear: SuperoperatorG,
}

pub fn run_trial(
    truth: &SuperoperatorG,
    design: &ExperimentDesign,
    shots: u64,
    seed: u64,
    exact: bool,
    solver: &SolverConfig,
) -> Result<Trial, qpt_core::Error> {
    let freqs = if exact {
        exact_frequencies(truth, design)?
    } else {
        frequencies(&simulate_counts(truth, design, shots, seed)?)?
    };
    let maxlik = maxlik_reconstruct(&freqs, design, solver)?;
    let linear = linear_inversion(&freqs, design)?;
    Ok(Trial {
        freqs,
        maxlik,
        linear,
    })
}

fn max_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Runs the damping study and builds the report; trial `t` uses seed
/// `seed + t`.
pub fn demo_report(cfg: &RunConfig) -> Result<FigureReport, CliError> {
    let truth = cfg.channel.build()?;
    let truth_vec = g_to_param_vector(&truth)?.values.to_vec();
    let design = cfg.design();
    let solver = solver_config(cfg, false);

    let outcomes: Vec<(TrialVectors, TrialSummary)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = cfg.seed.wrapping_add(t as u64);
            let trial = run_trial(
                &truth,
                &design,
                cfg.shots_per_setting,
                seed,
                cfg.exact,
                &solver,
            )?;
            let ml = g_to_param_vector(&trial.maxlik.g_hat)?.values.to_vec();
            let li = g_to_param_vector(&trial.linear)?.values.to_vec();
            let d = &trial.maxlik.diagnostics;
            let summary = TrialSummary {
                trial: t,
                seed,
                converged: trial.maxlik.converged,
                iterations: trial.maxlik.iterations,
                projections: d.projections,
                log_likelihood: trial.maxlik.log_likelihood,
                log_likelihood_truth: log_likelihood(&truth, &trial.freqs, &design)?,
                lambda_trace: d.lambda_trace,
                closure_residual: d.closure_residual,
                maxlik_psd_margin: d.psd_margin,
                maxlik_tp_residual: d.tp_residual,
                linear_psd_margin: psd_margin(&g_to_chi(&trial.linear))?,
                maxlik_max_error: max_error(&ml, &truth_vec),
                linear_max_error: max_error(&li, &truth_vec),
            };
            Ok((
                TrialVectors {
                    maxlik: ml,
                    linear: li,
                },
                summary,
            ))
        })
        .collect::<Result<_, qpt_core::Error>>()?;

    let (vectors, per_trial): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let first = &vectors[0];
    Ok(FigureReport {
        channel: cfg.channel.clone(),
        shots_per_setting: cfg.shots_per_setting,
        trials: cfg.trials,
        seed: cfg.seed,
        exact: cfg.exact,
        first_trial: triples(&first.maxlik, &first.linear, &truth_vec),
        summary: summarize(&truth_vec, &vectors, &per_trial),
        per_trial,
    })
}

pub fn figure_svg(report: &FigureReport) -> String {
    let pick = |f: fn(&crate::report::ParamTriple) -> f64| {
        report.first_trial.iter().map(f).collect::<Vec<_>>()
    };
    let (ml, li, tv) = (pick(|p| p.maxlik), pick(|p| p.linear), pick(|p| p.truth));
    let shots = if report.exact {
        "exact frequencies".to_string()
    } else {
        format!("N = {} per setting", report.shots_per_setting)
    };
    let title = format!(
        "{} {:?}, {shots}, seed {}",
        report.channel.name, report.channel.params, report.seed
    );
    bar_chart(
        &title,
        &PARAM_NAMES,
        &Series {
            maxlik: &ml,
            linear: &li,
            truth: &tv,
        },
    )
}

/// `demo`: writes the report JSON, comparison CSV and SVG into a directory.
pub fn demo(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg
        .outputs
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DEMO_DIR));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let report = demo_report(cfg)?;
    let (ml, li, tv): (Vec<f64>, Vec<f64>, Vec<f64>) = (
        report.first_trial.iter().map(|p| p.maxlik).collect(),
        report.first_trial.iter().map(|p| p.linear).collect(),
        report.first_trial.iter().map(|p| p.truth).collect(),
    );
    write_text(&dir.join(REPORT_FILE), &to_json_string(&report)?)?;
    write_text(
        &dir.join(COMPARISON_FILE),
        &comparison_csv(&ml, &li, Some(&tv)),
    )?;
    write_text(&dir.join(FIGURE_FILE), &figure_svg(&report))?;
    if let Some(path) = &cfg.outputs.csv {
        write_text(path, &comparison_csv(&ml, &li, Some(&tv)))?;
    }
    Ok(dir)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Superoperator,
    Chi,
    Kraus,
    ParamsCsv,
}

/// Reads a channel file, a `reconstruct` result (its Max-Lik estimate) or a
/// parameter CSV.
pub fn load_channel(path: &Path) -> Result<SuperoperatorG, CliError> {
    let text = read_text(path)?;
    match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(value) if value.get("maxlik").is_some() => {
            let file: ResultFile = from_json_str(&text)?;
            Ok(file.maxlik.g.to_g()?)
        }
        Ok(_) => Ok(from_json_str::<ChannelJson>(&text)?.to_g()?),
        Err(_) => {
            let values = parse_params_csv(&text)?;
            Ok(ParamVector {
                values,
                tp_residual: 0.0,
                tp_warning: false,
            }
            .to_superoperator())
        }
    }
}

pub fn convert_text(g: &SuperoperatorG, target: Target) -> Result<String, CliError> {
    let basis = standard_basis(g.dim())?;
    match target {
        Target::Superoperator => Ok(to_json_string(&ChannelJson::from_g(g))?),
        Target::Chi => Ok(to_json_string(&ChannelJson::from_chi(&g_to_chi(g)))?),
        Target::Kraus => {
            let kraus = kraus_from_chi(&g_to_chi(g), &basis, KRAUS_TOL)?;
            Ok(to_json_string(&ChannelJson::from_kraus(&kraus))?)
        }
        Target::ParamsCsv => {
            let p = g_to_param_vector(g)?;
            if p.tp_warning {
                eprintln!(
                    "warning: map is not trace preserving (residual {:e})",
                    tp_residual(g)
                );
            }
            Ok(params_csv(&p.values))
        }
    }
}

/// `convert`.
pub fn convert(input: &Path, target: Target, out: Option<&Path>) -> Result<(), CliError> {
    let g = load_channel(input)?;
    let g = chi_to_g(&g_to_chi(&g), &standard_basis(g.dim())?)?;
    emit(out, &convert_text(&g, target)?)
}
