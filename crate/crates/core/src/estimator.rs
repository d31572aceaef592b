//! The shot loop: choose a basis, measure, update per-term running means.
//!
//! Each term P keeps `(μ_P, s_P)`, the mean of the observed parities
//! `∏_{i : P_i ≠ I} σ_i` over the `s_P` shots whose basis covered P. The
//! estimate is `offset + Σ_P α_P μ_P`; terms never covered contribute zero
//! and are listed in [`EstimationResult::uncovered_terms`].

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::pauli::{Hamiltonian, MeasurementBasis, PauliOp};
use crate::samplers::{aps_choose_basis, ProductDistribution};
use crate::state::{ShotOutcome, StateVector};

/// Largest register [`exact_variance_oracle`] enumerates.
pub const ORACLE_MAX_QUBITS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("term {pauli} is never covered, the estimator variance is infinite")]
    InfiniteVariance { pauli: String },
    #[error("exact enumeration supports at most {max} qubits, got {n}")]
    TooManyQubits { n: usize, max: usize },
    #[error("estimator mean {mean} differs from the exact energy {exact}")]
    Biased { mean: f64, exact: f64 },
}

/// Running mean and hit count for one term.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TermEstimate {
    pub mu: f64,
    pub s: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    paulis: Vec<PauliOp>,
    estimates: Vec<TermEstimate>,
    index: HashMap<PauliOp, usize>,
}

impl Accumulator {
    /// One zeroed entry per term of `hamiltonian`.
    pub fn new(hamiltonian: &Hamiltonian) -> Self {
        Self::from_entries(
            hamiltonian
                .terms()
                .iter()
                .map(|t| (t.pauli.clone(), TermEstimate::default())),
        )
    }

    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (PauliOp, TermEstimate)>,
    {
        let (paulis, estimates): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let index = paulis
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        Self {
            paulis,
            estimates,
            index,
        }
    }

    pub fn get(&self, pauli: &PauliOp) -> Option<TermEstimate> {
        self.index.get(pauli).map(|&i| self.estimates[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliOp, &TermEstimate)> {
        self.paulis.iter().zip(&self.estimates)
    }

    /// Folds one shot into every covered entry.
    pub fn update(&mut self, basis: &MeasurementBasis, outcome: &ShotOutcome) {
        for (pauli, est) in self.paulis.iter().zip(self.estimates.iter_mut()) {
            if basis.covers(pauli) {
                let parity = f64::from(outcome.parity(pauli));
                let s = est.s as f64;
                est.mu = (s * est.mu + parity) / (s + 1.0);
                est.s += 1;
            }
        }
    }
}

pub fn update_accumulator(acc: &mut Accumulator, basis: &MeasurementBasis, outcome: &ShotOutcome) {
    acc.update(basis, outcome);
}

/// How each shot's measurement basis is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Every qubit X, Y or Z with probability 1/3.
    Uniform,
    /// Independent per-qubit letters from a fixed distribution.
    Product(ProductDistribution),
    /// Stage-wise adaptive choice with a fresh qubit ordering per shot.
    Adaptive,
}

impl Strategy {
    pub fn choose_basis<R: Rng + ?Sized>(
        &self,
        hamiltonian: &Hamiltonian,
        rng: &mut R,
    ) -> MeasurementBasis {
        match self {
            Strategy::Uniform => ProductDistribution::uniform(hamiltonian.num_qubits()).sample(rng),
            Strategy::Product(pd) => pd.sample(rng),
            Strategy::Adaptive => aps_choose_basis(hamiltonian, rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermReport {
    pub pauli: PauliOp,
    pub coeff: f64,
    pub mu: f64,
    pub s: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationResult {
    pub energy: f64,
    pub shots: usize,
    pub per_term: Vec<TermReport>,
    pub uncovered_terms: Vec<PauliOp>,
}

impl EstimationResult {
    fn from_accumulator(hamiltonian: &Hamiltonian, acc: &Accumulator, shots: usize) -> Self {
        let per_term: Vec<TermReport> = hamiltonian
            .terms()
            .iter()
            .zip(&acc.estimates)
            .map(|(t, est)| TermReport {
                pauli: t.pauli.clone(),
                coeff: t.coeff,
                mu: est.mu,
                s: est.s,
            })
            .collect();
        let energy = hamiltonian.offset() + per_term.iter().map(|t| t.coeff * t.mu).sum::<f64>();
        let uncovered_terms = per_term
            .iter()
            .filter(|t| t.s == 0)
            .map(|t| t.pauli.clone())
            .collect();
        Self {
            energy,
            shots,
            per_term,
            uncovered_terms,
        }
    }
}

/// Runs `shots` rounds of basis choice, simulated measurement and
/// accumulator update. Deterministic for a given rng state.
pub fn run_estimation<R: Rng + ?Sized>(
    hamiltonian: &Hamiltonian,
    state: &StateVector,
    shots: usize,
    strategy: &Strategy,
    rng: &mut R,
) -> EstimationResult {
    run_estimation_timed(hamiltonian, state, shots, strategy, rng).0
}

/// [`run_estimation`] that also reports wall time spent choosing bases.
pub fn run_estimation_timed<R: Rng + ?Sized>(
    hamiltonian: &Hamiltonian,
    state: &StateVector,
    shots: usize,
    strategy: &Strategy,
    rng: &mut R,
) -> (EstimationResult, Duration) {
    assert!(shots >= 1, "at least one shot is required");
    assert_eq!(
        hamiltonian.num_qubits(),
        state.num_qubits(),
        "qubit count mismatch"
    );
    let uniform = Strategy::Product(ProductDistribution::uniform(hamiltonian.num_qubits()));
    let strategy = match strategy {
        Strategy::Uniform => &uniform,
        other => other,
    };
    let mut acc = Accumulator::new(hamiltonian);
    let mut selecting = Duration::ZERO;
    for _ in 0..shots {
        let started = Instant::now();
        let basis = strategy.choose_basis(hamiltonian, rng);
        selecting += started.elapsed();
        let outcome = state.sample_measurement(&basis, rng);
        acc.update(&basis, &outcome);
    }
    (
        EstimationResult::from_accumulator(hamiltonian, &acc, shots),
        selecting,
    )
}

/// Exact variance of the one-shot inverse-probability estimator
/// `ê(B, σ) = offset + Σ_P α_P [B covers P] ∏σ / Pr[B covers P]`
/// with `B` drawn from `distribution` and `σ` from the state's outcome
/// distribution in `B`. Enumerates all 3^n bases and 2^n outcomes.
///
/// This is the variance behind the analytic `√(var/S)` error figure; the
/// running-mean estimator of [`run_estimation`] has the same mean but a
/// different variance.
pub fn exact_variance_oracle(
    hamiltonian: &Hamiltonian,
    state: &StateVector,
    distribution: &ProductDistribution,
) -> Result<f64, EstimatorError> {
    let n = hamiltonian.num_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(EstimatorError::TooManyQubits {
            n,
            max: ORACLE_MAX_QUBITS,
        });
    }
    assert_eq!(distribution.num_qubits(), n, "qubit count mismatch");
    let coverage: Vec<f64> = hamiltonian
        .terms()
        .iter()
        .map(|t| distribution.coverage_probability(&t.pauli))
        .collect();
    if let Some(t) = hamiltonian
        .terms()
        .iter()
        .zip(&coverage)
        .find(|(_, &c)| c == 0.0)
    {
        return Err(EstimatorError::InfiniteVariance {
            pauli: t.0.pauli.to_string(),
        });
    }

    let mut samples: Vec<(f64, f64)> = Vec::new();
    for basis in MeasurementBasis::enumerate(n) {
        let p_basis = distribution.basis_probability(&basis);
        if p_basis == 0.0 {
            continue;
        }
        let covered: Vec<usize> = (0..hamiltonian.len())
            .filter(|&i| basis.covers(&hamiltonian.terms()[i].pauli))
            .collect();
        for (outcome, p_outcome) in state.measurement_distribution(&basis).iter() {
            if p_outcome == 0.0 {
                continue;
            }
            let value = hamiltonian.offset()
                + covered
                    .iter()
                    .map(|&i| {
                        let t = &hamiltonian.terms()[i];
                        t.coeff * f64::from(outcome.parity(&t.pauli)) / coverage[i]
                    })
                    .sum::<f64>();
            samples.push((p_basis * p_outcome, value));
        }
    }
    let mean: f64 = samples.iter().map(|(p, v)| p * v).sum();
    let exact = state.energy(hamiltonian);
    let scale = 1.0
        + exact.abs()
        + hamiltonian
            .terms()
            .iter()
            .map(|t| t.coeff.abs())
            .sum::<f64>();
    if (mean - exact).abs() > 1e-9 * scale {
        return Err(EstimatorError::Biased { mean, exact });
    }
    Ok(samples.iter().map(|(p, v)| p * (v - mean).powi(2)).sum())
}
