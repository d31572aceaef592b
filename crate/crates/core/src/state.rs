//! Dense pure-state simulation.
//!
//! Amplitude index `k` encodes the computational basis state with qubit 0 as
//! the most significant bit, so qubit `q` of an `n`-qubit register lives at
//! bit `n - 1 - q`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::pauli::{Basis, Hamiltonian, MeasurementBasis, Pauli, PauliOp};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 20;

/// Norm tolerance for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest norm deviation that [`load_state`] silently repairs.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-4;

pub const DEFAULT_GROUND_TOL: f64 = 1e-8;
pub const DEFAULT_GROUND_MAX_ITER: usize = 500;

const LANCZOS_SEED: u64 = 0x5eed_1a9c_2b0f_7731;
const KRYLOV_DIM: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("{n} qubits exceeds the simulator capacity of {max}")]
    Capacity { n: usize, max: usize },
    #[error("expected {expected} amplitudes, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("state norm {norm} is not 1")]
    NotNormalized { norm: f64 },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("Lanczos did not converge after {iterations} iterations (best residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
}

fn check_capacity(n: usize) -> Result<(), StateError> {
    if n == 0 || n > MAX_QUBITS {
        Err(StateError::Capacity { n, max: MAX_QUBITS })
    } else {
        Ok(())
    }
}

/// Normalized pure state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within [`NORM_TOLERANCE`].
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        check_capacity(num_qubits)?;
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(StateError::WrongLength {
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales any nonzero finite vector to unit norm.
    pub fn normalized(
        num_qubits: usize,
        mut amplitudes: Vec<Complex64>,
    ) -> Result<Self, StateError> {
        check_capacity(num_qubits)?;
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(num_qubits, amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self, StateError> {
        check_capacity(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn zero(num_qubits: usize) -> Result<Self, StateError> {
        Self::basis_state(num_qubits, 0)
    }

    /// Haar-like random state from Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self, StateError> {
        check_capacity(num_qubits)?;
        let amplitudes = random_vector(1 << num_qubits, rng);
        Self::normalized(num_qubits, amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// P|ψ⟩.
    pub fn apply_pauli(&self, pauli: &PauliOp) -> StateVector {
        assert_eq!(pauli.num_qubits(), self.num_qubits, "qubit count mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        PauliMasks::new(pauli).accumulate(&self.amplitudes, Complex64::new(1.0, 0.0), &mut out);
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: out,
        }
    }

    /// ⟨ψ|P|ψ⟩.
    pub fn expectation(&self, pauli: &PauliOp) -> f64 {
        assert_eq!(pauli.num_qubits(), self.num_qubits, "qubit count mismatch");
        let masks = PauliMasks::new(pauli);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &amp) in self.amplitudes.iter().enumerate() {
            acc += self.amplitudes[k ^ masks.flip].conj() * amp * masks.phase(k);
        }
        acc.re
    }

    /// ⟨ψ|H|ψ⟩ including the constant offset.
    pub fn energy(&self, hamiltonian: &Hamiltonian) -> f64 {
        hamiltonian.offset()
            + hamiltonian
                .terms()
                .iter()
                .map(|t| t.coeff * self.expectation(&t.pauli))
                .sum::<f64>()
    }

    /// Amplitudes after rotating every qubit into the computational frame of
    /// its measurement letter.
    fn rotated(&self, basis: &MeasurementBasis) -> Vec<Complex64> {
        assert_eq!(basis.num_qubits(), self.num_qubits, "qubit count mismatch");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re, im| Complex64::new(re * s, im * s);
        // H and H·S†, row-major
        let hadamard = [c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
        let hadamard_sdg = [c(1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0)];
        let mut amps = self.amplitudes.clone();
        for (q, &letter) in basis.letters().iter().enumerate() {
            let gate = match letter {
                Basis::Z => continue,
                Basis::X => &hadamard,
                Basis::Y => &hadamard_sdg,
            };
            apply_single_qubit(&mut amps, self.num_qubits, q, gate);
        }
        amps
    }

    /// Exact outcome distribution of measuring every qubit in `basis`.
    pub fn measurement_distribution(&self, basis: &MeasurementBasis) -> OutcomeTable {
        let probs = self.rotated(basis).iter().map(|a| a.norm_sqr()).collect();
        OutcomeTable {
            num_qubits: self.num_qubits,
            probs,
        }
    }

    /// Draws one shot: every qubit measured in its basis letter, eigenvalue
    /// +1 for outcome bit 0 and −1 for bit 1.
    pub fn sample_measurement<R: Rng + ?Sized>(
        &self,
        basis: &MeasurementBasis,
        rng: &mut R,
    ) -> ShotOutcome {
        let rotated = self.rotated(basis);
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (k, a) in rotated.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                cumulative += p;
                chosen = Some(k);
                if u < cumulative {
                    break;
                }
            }
        }
        let index = chosen.expect("state has zero norm");
        ShotOutcome::from_index(self.num_qubits, index)
    }
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn apply_single_qubit(amps: &mut [Complex64], n: usize, qubit: usize, gate: &[Complex64; 4]) {
    let bit = 1usize << (n - 1 - qubit);
    for k in 0..amps.len() {
        if k & bit == 0 {
            let a0 = amps[k];
            let a1 = amps[k | bit];
            amps[k] = gate[0] * a0 + gate[1] * a1;
            amps[k | bit] = gate[2] * a0 + gate[3] * a1;
        }
    }
}

/// Bitmask form of a Pauli string for amplitude-level kernels.
#[derive(Debug, Clone, Copy)]
struct PauliMasks {
    /// bits flipped by X and Y
    flip: usize,
    /// bits picking up a sign from Z and Y
    sign: usize,
    /// i^(number of Y letters)
    y_phase: Complex64,
}

impl PauliMasks {
    fn new(pauli: &PauliOp) -> Self {
        let n = pauli.num_qubits();
        let (mut flip, mut sign, mut ny) = (0usize, 0usize, 0u32);
        for (q, &l) in pauli.letters().iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match l {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Z => sign |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    ny += 1;
                }
            }
        }
        let y_phase = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Self {
            flip,
            sign,
            y_phase,
        }
    }

    /// Phase picked up by basis state `k`: P|k⟩ = phase(k)·|k ^ flip⟩.
    #[inline]
    fn phase(&self, k: usize) -> Complex64 {
        if (k & self.sign).count_ones() % 2 == 1 {
            -self.y_phase
        } else {
            self.y_phase
        }
    }

    /// out += scale · P·input
    fn accumulate(&self, input: &[Complex64], scale: Complex64, out: &mut [Complex64]) {
        for (k, &a) in input.iter().enumerate() {
            out[k ^ self.flip] += scale * self.phase(k) * a;
        }
    }
}

/// Measured eigenvalues σ_i ∈ {+1, −1}, one per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShotOutcome {
    sigmas: Vec<i8>,
}

impl ShotOutcome {
    pub fn new(sigmas: Vec<i8>) -> Self {
        assert!(
            sigmas.iter().all(|&s| s == 1 || s == -1),
            "eigenvalues must be ±1"
        );
        Self { sigmas }
    }

    /// Outcome for bitstring `index` (qubit 0 most significant).
    pub fn from_index(num_qubits: usize, index: usize) -> Self {
        let sigmas = (0..num_qubits)
            .map(|q| {
                if index >> (num_qubits - 1 - q) & 1 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Self { sigmas }
    }

    pub fn sigmas(&self) -> &[i8] {
        &self.sigmas
    }

    pub fn num_qubits(&self) -> usize {
        self.sigmas.len()
    }

    /// ∏_{i : P_i ≠ I} σ_i; +1 for the identity.
    pub fn parity(&self, pauli: &PauliOp) -> i8 {
        assert_eq!(
            pauli.num_qubits(),
            self.sigmas.len(),
            "qubit count mismatch"
        );
        pauli.support().map(|q| self.sigmas[q]).product()
    }
}

/// Probability of every outcome bitstring of a product measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    num_qubits: usize,
    probs: Vec<f64>,
}

impl OutcomeTable {
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, outcome: &ShotOutcome) -> f64 {
        let index = outcome
            .sigmas()
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s == -1));
        self.probs[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ShotOutcome, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, &p)| (ShotOutcome::from_index(self.num_qubits, k), p))
    }

    /// Σ_σ Pr[σ] · ∏_{i:P_i≠I} σ_i.
    pub fn parity_mean(&self, pauli: &PauliOp) -> f64 {
        self.iter()
            .map(|(o, p)| p * f64::from(o.parity(pauli)))
            .sum()
    }
}

/// Parses a state file: 2^n lines of `<re> <im>`, `#` comments allowed.
pub fn load_state(text: &str, num_qubits: usize) -> Result<StateVector, StateError> {
    check_capacity(num_qubits)?;
    let expected = 1usize << num_qubits;
    let mut amplitudes = Vec::with_capacity(expected);
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| StateError::Parse { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(format!("expected `<re> <im>`, got {content:?}")));
        }
        let mut parts = [0.0f64; 2];
        for (slot, field) in parts.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| err(format!("invalid number {field:?}")))?;
            if !slot.is_finite() {
                return Err(err(format!("non-finite amplitude {field:?}")));
            }
        }
        amplitudes.push(Complex64::new(parts[0], parts[1]));
    }
    if amplitudes.len() != expected {
        return Err(StateError::WrongLength {
            expected,
            found: amplitudes.len(),
        });
    }
    let norm = l2_norm(&amplitudes);
    if norm == 0.0 {
        return Err(StateError::ZeroNorm);
    }
    if (norm - 1.0).abs() > RENORMALIZE_TOLERANCE {
        return Err(StateError::NotNormalized { norm });
    }
    StateVector::normalized(num_qubits, amplitudes)
}

/// Serializes a state in the format read by [`load_state`].
pub fn state_to_text(state: &StateVector) -> String {
    state
        .amplitudes()
        .iter()
        .map(|a| format!("{:e} {:e}\n", a.re, a.im))
        .collect()
}

/// out = H·v (offset included).
pub fn apply_hamiltonian(hamiltonian: &Hamiltonian, v: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = v.iter().map(|&a| a * hamiltonian.offset()).collect();
    for t in hamiltonian.terms() {
        PauliMasks::new(&t.pauli).accumulate(v, Complex64::new(t.coeff, 0.0), &mut out);
    }
    out
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// ‖H|ψ⟩ − E|ψ⟩‖ of the returned pair.
    pub residual: f64,
    /// Matrix-vector products spent.
    pub iterations: usize,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lowest eigenpair of `hamiltonian` by restarted Lanczos with full
/// reorthogonalization. H is applied matrix-free term by term; the start
/// vector is drawn from a fixed seed so results are reproducible.
pub fn ground_state(
    hamiltonian: &Hamiltonian,
    tol: f64,
    max_iter: usize,
) -> Result<GroundState, StateError> {
    let n = hamiltonian.num_qubits();
    check_capacity(n)?;
    let dim = 1usize << n;
    let krylov_max = dim.min(KRYLOV_DIM);
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut start = random_vector(dim, &mut rng);
    let norm = l2_norm(&start);
    start.iter_mut().for_each(|a| *a /= norm);

    let mut matvecs = 0usize;
    let mut best_residual = f64::INFINITY;
    loop {
        let mut basis: Vec<Vec<Complex64>> = vec![start];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            let mut w = apply_hamiltonian(hamiltonian, &basis[j]);
            matvecs += 1;
            let alpha = inner(&basis[j], &w).re;
            alphas.push(alpha);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for v in &basis {
                    let c = inner(v, &w);
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
                }
            }
            let beta = l2_norm(&w);
            let scale = alphas.iter().fold(1.0f64, |m, a| m.max(a.abs()));
            if beta <= 1e-12 * scale || basis.len() == krylov_max || matvecs >= max_iter {
                break;
            }
            w.iter_mut().for_each(|a| *a /= beta);
            betas.push(beta);
            basis.push(w);
        }

        let m = alphas.len();
        let tridiagonal = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(tridiagonal);
        let (lowest, _) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty Krylov space");
        let coords = eig.eigenvectors.column(lowest);
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (v, &y) in basis.iter().zip(coords.iter()) {
            ritz.iter_mut().zip(v).for_each(|(r, vi)| *r += y * vi);
        }
        let norm = l2_norm(&ritz);
        ritz.iter_mut().for_each(|a| *a /= norm);

        let h_ritz = apply_hamiltonian(hamiltonian, &ritz);
        let energy = inner(&ritz, &h_ritz).re;
        let residual = h_ritz
            .iter()
            .zip(&ritz)
            .map(|(h, r)| (h - energy * r).norm_sqr())
            .sum::<f64>()
            .sqrt();
        best_residual = best_residual.min(residual);
        if residual <= tol {
            return Ok(GroundState {
                energy,
                state: StateVector::normalized(n, ritz)?,
                residual,
                iterations: matvecs,
            });
        }
        if matvecs >= max_iter {
            return Err(StateError::NotConverged {
                iterations: matvecs,
                residual: best_residual,
            });
        }
        start = ritz;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn b(s: &str) -> MeasurementBasis {
        s.parse().unwrap()
    }

    fn plus() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(1, vec![c(s, 0.0), c(s, 0.0)]).unwrap()
    }

    fn bell() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(2, vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap()
    }

    #[test]
    fn single_qubit_paulis_on_zero() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(
            zero.apply_pauli(&p("Z")).amplitudes(),
            &[c(1.0, 0.0), c(0.0, 0.0)]
        );
        assert_eq!(
            zero.apply_pauli(&p("X")).amplitudes(),
            &[c(0.0, 0.0), c(1.0, 0.0)]
        );
        assert_eq!(
            zero.apply_pauli(&p("Y")).amplitudes(),
            &[c(0.0, 0.0), c(0.0, 1.0)]
        );
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(
            one.apply_pauli(&p("Y")).amplitudes(),
            &[c(0.0, -1.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // |10⟩ is index 2
        let s = StateVector::zero(2).unwrap().apply_pauli(&p("XI"));
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));
        assert_eq!(s.expectation(&p("ZI")), -1.0);
        assert_eq!(s.expectation(&p("IZ")), 1.0);
    }

    #[test]
    fn expectations() {
        assert_eq!(StateVector::zero(1).unwrap().expectation(&p("Z")), 1.0);
        assert_abs_diff_eq!(plus().expectation(&p("X")), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bell().expectation(&p("XX")), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bell().expectation(&p("ZZ")), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bell().expectation(&p("YY")), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bell().expectation(&p("ZI")), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn distributions() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(
            zero.measurement_distribution(&b("Z")).probabilities(),
            &[1.0, 0.0]
        );
        let d = plus().measurement_distribution(&b("Z"));
        assert_abs_diff_eq!(d.probabilities()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.probabilities()[1], 0.5, epsilon = 1e-12);
        let d = bell().measurement_distribution(&b("XX"));
        let expect = [0.5, 0.0, 0.0, 0.5];
        for (got, want) in d.probabilities().iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        // Y eigenstate (|0⟩ + i|1⟩)/√2 gives +1 surely
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let y_plus = StateVector::new(1, vec![c(s, 0.0), c(0.0, s)]).unwrap();
        let d = y_plus.measurement_distribution(&b("Y"));
        assert_abs_diff_eq!(d.probabilities()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_zz_samples_are_correlated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = bell();
        let mut up = 0;
        for _ in 0..2000 {
            let o = state.sample_measurement(&b("ZZ"), &mut rng);
            assert_eq!(o.parity(&p("ZZ")), 1);
            if o.sigmas() == [1, 1] {
                up += 1;
            }
        }
        assert!((800..1200).contains(&up), "{up}");
    }

    #[test]
    fn z_measurement_of_zero_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let zero = StateVector::zero(1).unwrap();
        for _ in 0..100 {
            assert_eq!(zero.sample_measurement(&b("Z"), &mut rng).sigmas(), &[1]);
        }
    }

    #[test]
    fn load_state_cases() {
        let s = load_state("1 0\n0 0\n", 1).unwrap();
        assert_eq!(s, StateVector::zero(1).unwrap());
        let s = load_state("# plus\n0.7071 0\n0.7071 0\n", 1).unwrap();
        assert_abs_diff_eq!(s.expectation(&p("X")), 1.0, epsilon = 1e-12);
        assert_eq!(load_state("0 0\n0 0\n", 1), Err(StateError::ZeroNorm));
        assert!(matches!(
            load_state("1 0\n", 1),
            Err(StateError::WrongLength {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            load_state("1 0\nNaN 0\n", 1),
            Err(StateError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_state("1 0\n1 0\n", 1),
            Err(StateError::NotNormalized { .. })
        ));
    }

    #[test]
    fn state_text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = StateVector::random(3, &mut rng).unwrap();
        let back = load_state(&state_to_text(&s), 3).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            StateVector::zero(MAX_QUBITS + 1),
            Err(StateError::Capacity { .. })
        ));
    }

    #[test]
    fn ground_state_single_qubit() {
        let h = Hamiltonian::parse("1.0 Z").unwrap();
        let g = ground_state(&h, 1e-8, 500).unwrap();
        assert_abs_diff_eq!(g.energy, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g.state.amplitudes()[1].norm(), 1.0, epsilon = 1e-8);

        let h = Hamiltonian::parse("1.0 X").unwrap();
        let g = ground_state(&h, 1e-8, 500).unwrap();
        assert_abs_diff_eq!(g.energy, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g.state.expectation(&p("X")), -1.0, epsilon = 1e-8);
    }

    #[test]
    fn ground_state_offset_only() {
        let h = Hamiltonian::parse("-2.5 II").unwrap();
        let g = ground_state(&h, 1e-8, 500).unwrap();
        assert_abs_diff_eq!(g.energy, -2.5, epsilon = 1e-12);
    }

    #[test]
    fn ground_state_reports_non_convergence() {
        let mut text = String::new();
        let letters = ['X', 'Y', 'Z'];
        for i in 0..8 {
            for j in 0..8 {
                let s: String = (0..8)
                    .map(|q| {
                        if q == i {
                            letters[i % 3]
                        } else if q == j {
                            letters[j % 3]
                        } else {
                            'I'
                        }
                    })
                    .collect();
                text.push_str(&format!("{} {s}\n", 0.1 + 0.01 * (i * 8 + j) as f64));
            }
        }
        let h = Hamiltonian::parse(&text).unwrap();
        match ground_state(&h, 1e-14, 3) {
            Err(StateError::NotConverged {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 3);
                assert!(residual.is_finite() && residual > 1e-14);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
