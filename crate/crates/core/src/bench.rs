//! Repeated-estimation benchmark harness.
//!
//! A benchmark loads a Hamiltonian, obtains the state (lowest eigenvector by
//! default, or a state file), runs `R` independent estimations of `S` shots
//! each and compares the estimates with the exact energy of that state:
//!
//! * `rms_error = √( (1/R) Σ_r (Ê_r − E)² )`
//! * `mean_abs_error = (1/R) Σ_r |Ê_r − E|`
//! * `predicted_error = √(diagonal_cost / S)` for the product-distribution
//!   methods (uniform and locally-biased), the analytic figure of the
//!   inverse-probability estimator with cross terms dropped.
//!
//! Repetition `r` draws from a ChaCha8 stream seeded with
//! `SHA-256(master_seed_le ‖ r_le)`, so results never depend on the worker
//! count or scheduling.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::estimator::{exact_variance_oracle, run_estimation_timed, Strategy, ORACLE_MAX_QUBITS};
use crate::pauli::{Hamiltonian, HamiltonianError};
use crate::samplers::{
    diagonal_cost, lbcs_fit, uniform_distribution, ProductDistribution, DEFAULT_LBCS_MAX_SWEEPS,
    DEFAULT_LBCS_TOL,
};
use crate::state::{
    ground_state, load_state, StateError, StateVector, DEFAULT_GROUND_MAX_ITER, DEFAULT_GROUND_TOL,
};

pub const DEFAULT_SHOTS: usize = 1000;
pub const DEFAULT_REPETITIONS: usize = 10;

pub const RMS_DEFINITION: &str = "rms_error = sqrt((1/R) * sum_r (estimate_r - exact_energy)^2)";
pub const PREDICTED_DEFINITION: &str =
    "predicted_error = sqrt(diagonal_cost / shots), diagonal_cost = sum_P alpha_P^2 / Pr[P covered]";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("Hamiltonian {path}: {source}")]
    Hamiltonian {
        path: PathBuf,
        #[source]
        source: HamiltonianError,
    },
    #[error("state {path}: {source}")]
    StateFile {
        path: PathBuf,
        #[source]
        source: StateError,
    },
    #[error("ground state: {0}")]
    GroundState(#[source] StateError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cs,
    Lbcs,
    Aps,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cs, Method::Lbcs, Method::Aps];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cs => "cs",
            Method::Lbcs => "lbcs",
            Method::Aps => "aps",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cs" => Ok(Method::Cs),
            "lbcs" => Ok(Method::Lbcs),
            "aps" => Ok(Method::Aps),
            other => Err(format!(
                "unknown method {other:?} (expected cs, lbcs or aps)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSource {
    /// Lowest eigenvector of the Hamiltonian.
    GroundState,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub hamiltonian_path: PathBuf,
    pub state_source: StateSource,
    pub method: Method,
    pub shots: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    pub lbcs_tol: f64,
    /// Repetitions run concurrently on this many threads; results do not
    /// depend on it.
    pub workers: usize,
    pub output_format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(hamiltonian_path: impl Into<PathBuf>, method: Method) -> Self {
        Self {
            hamiltonian_path: hamiltonian_path.into(),
            state_source: StateSource::GroundState,
            method,
            shots: DEFAULT_SHOTS,
            repetitions: DEFAULT_REPETITIONS,
            master_seed: 0,
            lbcs_tol: DEFAULT_LBCS_TOL,
            workers: 1,
            output_format: OutputFormat::Json,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.shots == 0 {
            return Err(BenchError::Config("shots must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(BenchError::Config("repetitions must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(BenchError::Config("workers must be at least 1".into()));
        }
        if !(self.lbcs_tol > 0.0 && self.lbcs_tol.is_finite()) {
            return Err(BenchError::Config("lbcs tolerance must be positive".into()));
        }
        Ok(())
    }

    fn settings(&self) -> RunSettings {
        RunSettings {
            shots: self.shots,
            repetitions: self.repetitions,
            master_seed: self.master_seed,
            lbcs_tol: self.lbcs_tol,
            workers: self.workers,
        }
    }
}

/// The numeric knobs of a benchmark, independent of where inputs come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub shots: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    pub lbcs_tol: f64,
    pub workers: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            repetitions: DEFAULT_REPETITIONS,
            master_seed: 0,
            lbcs_tol: DEFAULT_LBCS_TOL,
            workers: 1,
        }
    }
}

/// A Hamiltonian, the state whose energy is estimated and that energy.
#[derive(Debug, Clone)]
pub struct Problem {
    pub hamiltonian: Hamiltonian,
    pub state: StateVector,
    pub exact_energy: f64,
    /// `"ground_state"` or the state file path.
    pub state_label: String,
}

impl Problem {
    /// Uses the lowest eigenvector as the state.
    pub fn ground(hamiltonian: Hamiltonian) -> Result<Self, BenchError> {
        let g = ground_state(&hamiltonian, DEFAULT_GROUND_TOL, DEFAULT_GROUND_MAX_ITER)
            .map_err(BenchError::GroundState)?;
        Ok(Self {
            hamiltonian,
            state: g.state,
            exact_energy: g.energy,
            state_label: "ground_state".into(),
        })
    }

    /// Uses a given state; the reference energy is ⟨ψ|H|ψ⟩.
    pub fn with_state(
        hamiltonian: Hamiltonian,
        state: StateVector,
        label: impl Into<String>,
    ) -> Self {
        let exact_energy = state.energy(&hamiltonian);
        Self {
            hamiltonian,
            state,
            exact_energy,
            state_label: label.into(),
        }
    }

    pub fn load(hamiltonian_path: &Path, source: &StateSource) -> Result<Self, BenchError> {
        let text = read(hamiltonian_path)?;
        let hamiltonian = Hamiltonian::parse(&text).map_err(|source| BenchError::Hamiltonian {
            path: hamiltonian_path.to_path_buf(),
            source,
        })?;
        match source {
            StateSource::GroundState => Self::ground(hamiltonian),
            StateSource::File(path) => {
                let state =
                    load_state(&read(path)?, hamiltonian.num_qubits()).map_err(|source| {
                        BenchError::StateFile {
                            path: path.clone(),
                            source,
                        }
                    })?;
                Ok(Self::with_state(
                    hamiltonian,
                    state,
                    path.display().to_string(),
                ))
            }
        }
    }
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Seed for repetition `index`: SHA-256 of the little-endian master seed
/// followed by the little-endian index.
pub fn repetition_seed(master_seed: u64, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(index.to_le_bytes());
    hasher.finalize().into()
}

pub fn repetition_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(repetition_seed(master_seed, index))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub wall_time_s: f64,
    pub basis_selection_ns_per_shot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub method: Method,
    pub num_qubits: usize,
    pub num_terms: usize,
    pub shots: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    pub state: String,
    pub exact_energy: f64,
    pub estimates: Vec<f64>,
    pub rms_error: f64,
    pub mean_abs_error: f64,
    /// `√(diagonal_cost/S)`; absent for the adaptive method or when the
    /// cost is infinite.
    pub predicted_error: Option<f64>,
    /// `√(var/S)` with the exact one-shot variance, for product methods on
    /// at most four qubits.
    pub exact_predicted_error: Option<f64>,
    pub diagonal_cost: Option<f64>,
    pub infinite_cost: bool,
    /// Terms left uncovered in each repetition.
    pub uncovered_terms: Vec<usize>,
    /// Per-qubit (p_X, p_Y, p_Z) of the product methods.
    pub distribution: Option<ProductDistribution>,
    pub lbcs_sweeps: Option<usize>,
    pub error_definition: &'static str,
    pub predicted_definition: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl BenchmarkReport {
    /// Copy with timing data removed, for byte-stable output.
    pub fn without_timings(&self) -> Self {
        Self {
            timings: None,
            ..self.clone()
        }
    }
}

pub fn rms_error(estimates: &[f64], exact: f64) -> f64 {
    (estimates.iter().map(|e| (e - exact).powi(2)).sum::<f64>() / estimates.len() as f64).sqrt()
}

pub fn mean_abs_error(estimates: &[f64], exact: f64) -> f64 {
    estimates.iter().map(|e| (e - exact).abs()).sum::<f64>() / estimates.len() as f64
}

/// Runs one method on an already-loaded problem.
pub fn benchmark_problem(
    problem: &Problem,
    method: Method,
    settings: &RunSettings,
) -> Result<BenchmarkReport, BenchError> {
    if settings.shots == 0 || settings.repetitions == 0 || settings.workers == 0 {
        return Err(BenchError::Config(
            "shots, repetitions and workers must be at least 1".into(),
        ));
    }
    let started = Instant::now();
    let h = &problem.hamiltonian;
    let n = h.num_qubits();

    let (strategy, distribution, lbcs_sweeps) = match method {
        Method::Cs => {
            let pd = uniform_distribution(n);
            (Strategy::Product(pd.clone()), Some(pd), None)
        }
        Method::Lbcs => {
            let fit = lbcs_fit(h, settings.lbcs_tol, DEFAULT_LBCS_MAX_SWEEPS);
            (
                Strategy::Product(fit.distribution.clone()),
                Some(fit.distribution),
                Some(fit.sweeps),
            )
        }
        Method::Aps => (Strategy::Adaptive, None, None),
    };

    let cost = distribution.as_ref().map(|pd| diagonal_cost(h, pd));
    let infinite_cost = cost.is_some_and(|c| !c.is_finite());
    let shots = settings.shots as f64;
    let predicted_error = cost.filter(|c| c.is_finite()).map(|c| (c / shots).sqrt());
    let exact_predicted_error = match &distribution {
        Some(pd) if n <= ORACLE_MAX_QUBITS => exact_variance_oracle(h, &problem.state, pd)
            .ok()
            .map(|v| (v / shots).sqrt()),
        _ => None,
    };

    let run_one = |index: usize| {
        let mut rng = repetition_rng(settings.master_seed, index as u64);
        run_estimation_timed(h, &problem.state, settings.shots, &strategy, &mut rng)
    };
    let runs: Vec<_> = if settings.workers == 1 {
        (0..settings.repetitions).map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(settings.workers)
            .build()
            .map_err(|e| BenchError::Pool(e.to_string()))?;
        pool.install(|| {
            (0..settings.repetitions)
                .into_par_iter()
                .map(run_one)
                .collect()
        })
    };

    let estimates: Vec<f64> = runs.iter().map(|(r, _)| r.energy).collect();
    let uncovered_terms = runs.iter().map(|(r, _)| r.uncovered_terms.len()).collect();
    let selecting: Duration = runs.iter().map(|(_, d)| *d).sum();
    let total_shots = (settings.shots * settings.repetitions) as f64;

    Ok(BenchmarkReport {
        method,
        num_qubits: n,
        num_terms: h.len(),
        shots: settings.shots,
        repetitions: settings.repetitions,
        master_seed: settings.master_seed,
        state: problem.state_label.clone(),
        exact_energy: problem.exact_energy,
        rms_error: rms_error(&estimates, problem.exact_energy),
        mean_abs_error: mean_abs_error(&estimates, problem.exact_energy),
        estimates,
        predicted_error,
        exact_predicted_error,
        diagonal_cost: cost.filter(|c| c.is_finite()),
        infinite_cost,
        uncovered_terms,
        distribution,
        lbcs_sweeps,
        error_definition: RMS_DEFINITION,
        predicted_definition: PREDICTED_DEFINITION,
        timings: Some(Timings {
            wall_time_s: started.elapsed().as_secs_f64(),
            basis_selection_ns_per_shot: selecting.as_nanos() as f64 / total_shots,
        }),
    })
}

/// Loads the inputs named by `cfg` and benchmarks `cfg.method`.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<BenchmarkReport, BenchError> {
    cfg.validate()?;
    let problem = Problem::load(&cfg.hamiltonian_path, &cfg.state_source)?;
    benchmark_problem(&problem, cfg.method, &cfg.settings())
}

/// Benchmarks every method on the same problem with the same seeds.
/// `cfg.method` is ignored.
pub fn compare_methods(cfg: &ExperimentConfig) -> Result<Vec<BenchmarkReport>, BenchError> {
    cfg.validate()?;
    let problem = Problem::load(&cfg.hamiltonian_path, &cfg.state_source)?;
    let settings = cfg.settings();
    Method::ALL
        .iter()
        .map(|&m| benchmark_problem(&problem, m, &settings))
        .collect()
}

pub const CSV_HEADER: &str =
    "method,shots,reps,exact_energy,rms_error,mean_abs_error,predicted_error,wall_time_s";

/// One CSV row per report; `predicted_error` is empty when unavailable.
pub fn reports_to_csv(reports: &[BenchmarkReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let predicted = r.predicted_error.map(|p| p.to_string()).unwrap_or_default();
        let wall = r
            .timings
            .as_ref()
            .map(|t| t.wall_time_s.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.method,
            r.shots,
            r.repetitions,
            r.exact_energy,
            r.rms_error,
            r.mean_abs_error,
            predicted,
            wall
        ));
    }
    out
}

/// Pretty JSON of one report (or an array for several). Timings are dropped
/// unless `include_timings`, which keeps the output byte-identical across
/// runs with the same configuration.
pub fn reports_to_json(reports: &[BenchmarkReport], include_timings: bool) -> String {
    let cleaned: Vec<BenchmarkReport> = reports
        .iter()
        .map(|r| {
            if include_timings {
                r.clone()
            } else {
                r.without_timings()
            }
        })
        .collect();
    let mut text = if cleaned.len() == 1 {
        serde_json::to_string_pretty(&cleaned[0])
    } else {
        serde_json::to_string_pretty(&cleaned)
    }
    .expect("reports serialize");
    text.push('\n');
    text
}
