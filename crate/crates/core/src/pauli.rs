//! Pauli strings, measurement bases, the covering relation and the
//! Hamiltonian text format.
//!
//! A Hamiltonian file holds one term per line, `<coefficient> <pauli-string>`,
//! for example
//!
//! ```text
//! # two-qubit toy model
//! 0.5   XZ
//! -0.25 ZI
//! ```
//!
//! `#` starts a comment and blank lines are skipped. Every Pauli string must
//! have the same length, which fixes the qubit count. Repeated strings are
//! merged by summing coefficients and terms that cancel (|α| < 1e-12) are
//! dropped. An all-identity term is kept aside as a constant energy offset.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coefficients with a smaller magnitude after merging are treated as zero.
pub const MERGE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("Hamiltonian is empty after merging duplicate terms")]
    Empty,
    #[error("term {index} acts on {found} qubits, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("coefficient of term {index} is not finite")]
    NonFinite { index: usize },
    #[error("Hamiltonian must act on at least one qubit")]
    NoQubits,
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// The measurement letter this Pauli requires, `None` for the identity.
    pub fn basis(self) -> Option<Basis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
        }
    }
}

/// Single-qubit measurement setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Basis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Basis::ALL[i]
    }

    pub fn as_pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        self.as_pauli().as_char()
    }
}

/// A tensor product of single-qubit Paulis, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOp {
    letters: Box<[Pauli]>,
}

impl PauliOp {
    pub fn new(letters: Vec<Pauli>) -> Self {
        assert!(
            !letters.is_empty(),
            "a Pauli string acts on at least one qubit"
        );
        Self {
            letters: letters.into_boxed_slice(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    #[inline]
    pub fn letter(&self, qubit: usize) -> Pauli {
        self.letters[qubit]
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits where the string acts non-trivially.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(i, _)| i)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters.iter() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid Pauli string {0:?}")]
pub struct InvalidPauliString(pub String);

impl FromStr for PauliOp {
    type Err = InvalidPauliString;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: Option<Vec<Pauli>> = s.chars().map(Pauli::from_char).collect();
        match letters {
            Some(l) if !l.is_empty() => Ok(PauliOp::new(l)),
            _ => Err(InvalidPauliString(s.to_string())),
        }
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A product measurement setting: one letter from {X, Y, Z} per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementBasis {
    letters: Box<[Basis]>,
}

impl MeasurementBasis {
    pub fn new(letters: Vec<Basis>) -> Self {
        assert!(
            !letters.is_empty(),
            "a measurement basis acts on at least one qubit"
        );
        Self {
            letters: letters.into_boxed_slice(),
        }
    }

    pub fn uniform(n: usize, letter: Basis) -> Self {
        Self::new(vec![letter; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Basis] {
        &self.letters
    }

    #[inline]
    pub fn letter(&self, qubit: usize) -> Basis {
        self.letters[qubit]
    }

    /// `true` iff every non-identity letter of `pauli` matches this basis.
    ///
    /// Panics when the lengths differ.
    pub fn covers(&self, pauli: &PauliOp) -> bool {
        assert_eq!(
            self.num_qubits(),
            pauli.num_qubits(),
            "basis and Pauli string act on different qubit counts"
        );
        self.letters
            .iter()
            .zip(pauli.letters.iter())
            .all(|(&b, &p)| p == Pauli::I || p == b.as_pauli())
    }

    /// Every basis on `n` qubits, in lexicographic X < Y < Z order.
    pub fn enumerate(n: usize) -> impl Iterator<Item = MeasurementBasis> {
        let total = 3usize.pow(n as u32);
        (0..total).map(move |mut code| {
            let mut letters = vec![Basis::X; n];
            for slot in letters.iter_mut().rev() {
                *slot = Basis::from_index(code % 3);
                code /= 3;
            }
            MeasurementBasis::new(letters)
        })
    }
}

/// Free-function form of [`MeasurementBasis::covers`].
pub fn covers(basis: &MeasurementBasis, pauli: &PauliOp) -> bool {
    basis.covers(pauli)
}

impl fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.letters.iter() {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for MeasurementBasis {
    type Err = InvalidPauliString;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let op: PauliOp = s.parse()?;
        let letters: Option<Vec<Basis>> = op.letters().iter().map(|p| p.basis()).collect();
        letters
            .map(MeasurementBasis::new)
            .ok_or_else(|| InvalidPauliString(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coeff: f64,
    pub pauli: PauliOp,
}

/// H = offset·I + Σ α_P P with distinct, non-identity P and α_P ≠ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<Term>,
    offset: f64,
}

impl Hamiltonian {
    /// Builds a Hamiltonian, merging duplicates and folding the identity into
    /// the offset. Term order follows first appearance.
    pub fn new<I>(num_qubits: usize, terms: I) -> Result<Self, HamiltonianError>
    where
        I: IntoIterator<Item = (f64, PauliOp)>,
    {
        if num_qubits == 0 {
            return Err(HamiltonianError::NoQubits);
        }
        let mut order: Vec<PauliOp> = Vec::new();
        let mut sums: HashMap<PauliOp, f64> = HashMap::new();
        let mut offset = 0.0;
        for (index, (coeff, pauli)) in terms.into_iter().enumerate() {
            if !coeff.is_finite() {
                return Err(HamiltonianError::NonFinite { index });
            }
            if pauli.num_qubits() != num_qubits {
                return Err(HamiltonianError::LengthMismatch {
                    index,
                    expected: num_qubits,
                    found: pauli.num_qubits(),
                });
            }
            if pauli.is_identity() {
                offset += coeff;
                continue;
            }
            match sums.get_mut(&pauli) {
                Some(sum) => *sum += coeff,
                None => {
                    sums.insert(pauli.clone(), coeff);
                    order.push(pauli);
                }
            }
        }
        let terms: Vec<Term> = order
            .into_iter()
            .filter_map(|pauli| {
                let coeff = sums[&pauli];
                (coeff.abs() >= MERGE_THRESHOLD).then_some(Term { coeff, pauli })
            })
            .collect();
        if offset.abs() < MERGE_THRESHOLD {
            offset = 0.0;
        }
        if terms.is_empty() && offset == 0.0 {
            return Err(HamiltonianError::Empty);
        }
        Ok(Self {
            num_qubits,
            terms,
            offset,
        })
    }

    pub fn parse(text: &str) -> Result<Self, HamiltonianError> {
        parse_hamiltonian(text)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Coefficient of the identity, added to every energy estimate.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, pauli: &PauliOp) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| &t.pauli == pauli)
            .map(|t| t.coeff)
    }

    /// Serializes to the text format accepted by [`parse_hamiltonian`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.offset != 0.0 {
            out.push_str(&format!(
                "{} {}\n",
                self.offset,
                PauliOp::identity(self.num_qubits)
            ));
        }
        for t in &self.terms {
            out.push_str(&format!("{} {}\n", t.coeff, t.pauli));
        }
        out
    }
}

/// Parses the line-oriented Hamiltonian format described in the module docs.
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian, HamiltonianError> {
    let mut terms = Vec::new();
    let mut width: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| HamiltonianError::Parse { line, message };
        let mut fields = content.split_whitespace();
        let coeff_field = fields
            .next()
            .ok_or_else(|| err("missing coefficient".into()))?;
        let pauli_field = fields
            .next()
            .ok_or_else(|| err("missing Pauli string".into()))?;
        if let Some(extra) = fields.next() {
            return Err(err(format!("unexpected trailing field {extra:?}")));
        }
        let coeff: f64 = coeff_field
            .parse()
            .map_err(|_| err(format!("invalid coefficient {coeff_field:?}")))?;
        if !coeff.is_finite() {
            return Err(err(format!("coefficient {coeff_field:?} is not finite")));
        }
        let pauli: PauliOp = pauli_field
            .parse()
            .map_err(|_| err(format!("invalid Pauli string {pauli_field:?}")))?;
        match width {
            None => width = Some(pauli.num_qubits()),
            Some(w) if w != pauli.num_qubits() => {
                return Err(err(format!(
                    "Pauli string has length {}, expected {w}",
                    pauli.num_qubits()
                )))
            }
            Some(_) => {}
        }
        terms.push((coeff, pauli));
    }
    let n = width.ok_or(HamiltonianError::Empty)?;
    Hamiltonian::new(n, terms)
}
