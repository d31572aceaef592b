#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use pauli_shadows::{Hamiltonian, Pauli, PauliOp};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Hamiltonian {
    Hamiltonian::parse(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

/// Every Pauli string on `n` qubits, identity first.
pub fn all_paulis(n: usize) -> Vec<PauliOp> {
    (0..4usize.pow(n as u32))
        .map(|mut code| {
            let mut letters = vec![Pauli::I; n];
            for slot in letters.iter_mut().rev() {
                *slot = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][code % 4];
                code /= 4;
            }
            PauliOp::new(letters)
        })
        .collect()
}

/// `terms` distinct non-identity strings with coefficients of magnitude in
/// [0.1, 1.0] and random sign.
pub fn random_hamiltonian<R: Rng>(n: usize, terms: usize, rng: &mut R) -> Hamiltonian {
    let mut pool: Vec<PauliOp> = all_paulis(n).into_iter().skip(1).collect();
    pool.shuffle(rng);
    let picked = pool.into_iter().take(terms).map(|p| {
        let c: f64 = rng.random_range(0.1..1.0);
        (if rng.random_bool(0.5) { c } else { -c }, p)
    });
    Hamiltonian::new(n, picked).unwrap()
}

/// `terms` distinct random strings of weight 1..=max_weight on `n` qubits,
/// for sizes where enumerating all 4^n strings is too costly.
pub fn random_sparse_hamiltonian<R: Rng>(
    n: usize,
    terms: usize,
    max_weight: usize,
    rng: &mut R,
) -> Hamiltonian {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    while out.len() < terms {
        let weight = rng.random_range(1..=max_weight.min(n));
        let mut qubits: Vec<usize> = (0..n).collect();
        qubits.shuffle(rng);
        let mut letters = vec![Pauli::I; n];
        for &q in &qubits[..weight] {
            letters[q] = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
        }
        let p = PauliOp::new(letters);
        if seen.insert(p.clone()) {
            out.push((rng.random_range(0.01..1.0), p));
        }
    }
    Hamiltonian::new(n, out).unwrap()
}

fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let c = |re, im| Complex64::new(re, im);
    let z = c(0.0, 0.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c(1.0, 0.0)]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, c(1.0, 0.0), c(1.0, 0.0), z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), z, z, c(-1.0, 0.0)]),
    }
}

/// Dense matrix of a Pauli string by Kronecker products, qubit 0 leftmost.
pub fn dense_pauli(p: &PauliOp) -> DMatrix<Complex64> {
    p.letters()
        .iter()
        .skip(1)
        .fold(pauli_matrix(p.letter(0)), |acc, &l| {
            acc.kronecker(&pauli_matrix(l))
        })
}

pub fn dense_hamiltonian(h: &Hamiltonian) -> DMatrix<Complex64> {
    let dim = 1 << h.num_qubits();
    let mut m = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(h.offset(), 0.0);
    for t in h.terms() {
        m += dense_pauli(&t.pauli) * Complex64::new(t.coeff, 0.0);
    }
    m
}

pub fn dense_ground_energy(h: &Hamiltonian) -> f64 {
    SymmetricEigen::new(dense_hamiltonian(h))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}
