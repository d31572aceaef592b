//! Measurement-basis selection.
//!
//! All three strategies share one primitive: given squared-coefficient masses
//! `c = (c_X, c_Y, c_Z)` on a qubit, the distribution minimizing
//! `Σ_B c_B / β(B)` over the probability simplex is `β(B) ∝ √c_B`
//! ([`closed_form_beta`]).
//!
//! * Uniform shadows ignore the Hamiltonian.
//! * Locally-biased shadows fit a product distribution to the diagonal cost
//!   `Σ_P α_P² / Pr[P covered]` by cyclic coordinate descent, each coordinate
//!   step being the closed form above.
//! * Adaptive shadows draw a random qubit order per shot and, qubit by qubit,
//!   apply the closed form to the terms still compatible with the letters
//!   already drawn.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::pauli::{Basis, Hamiltonian, MeasurementBasis, Pauli, PauliOp};

/// Probability floor applied inside coordinate-descent sweeps.
pub const LBCS_FLOOR: f64 = 1e-12;
pub const DEFAULT_LBCS_TOL: f64 = 1e-10;
pub const DEFAULT_LBCS_MAX_SWEEPS: usize = 10_000;

/// Probabilities of measuring one qubit in X, Y and Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisDistribution {
    probs: [f64; 3],
}

impl BasisDistribution {
    pub const UNIFORM: BasisDistribution = BasisDistribution {
        probs: [1.0 / 3.0; 3],
    };

    /// Panics unless every entry is in [0, 1] and the entries sum to 1
    /// within 1e-12.
    pub fn new(probs: [f64; 3]) -> Self {
        assert!(
            probs.iter().all(|p| (0.0..=1.0).contains(p)),
            "probabilities out of range: {probs:?}"
        );
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12, "probabilities sum to {total}");
        Self { probs }
    }

    /// Point mass on one letter.
    pub fn certain(letter: Basis) -> Self {
        let mut probs = [0.0; 3];
        probs[letter.index()] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> [f64; 3] {
        self.probs
    }

    #[inline]
    pub fn prob(&self, letter: Basis) -> f64 {
        self.probs[letter.index()]
    }

    /// Draws one letter. Letters with zero probability are never returned.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Basis {
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut last = None;
        for letter in Basis::ALL {
            let p = self.prob(letter);
            if p > 0.0 {
                cumulative += p;
                last = Some(letter);
                if u < cumulative {
                    return letter;
                }
            }
        }
        last.expect("distribution has no mass")
    }

    fn floored(&self, floor: f64) -> Self {
        let lifted = self.probs.map(|p| p.max(floor));
        let total: f64 = lifted.iter().sum();
        Self {
            probs: lifted.map(|p| p / total),
        }
    }
}

impl Serialize for BasisDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.probs.serialize(serializer)
    }
}

/// Squared-coefficient masses `(c_X, c_Y, c_Z)` on a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostTriple([f64; 3]);

impl CostTriple {
    /// Panics on a negative or NaN entry.
    pub fn new(masses: [f64; 3]) -> Self {
        assert!(
            masses.iter().all(|&c| c >= 0.0),
            "cost masses must be nonnegative: {masses:?}"
        );
        Self(masses)
    }

    pub fn masses(&self) -> [f64; 3] {
        self.0
    }

    pub fn get(&self, letter: Basis) -> f64 {
        self.0[letter.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `Σ_B c_B / β(B)` with `0/0 = 0` and `c/0 = ∞` for `c > 0`.
    pub fn objective(&self, beta: &BasisDistribution) -> f64 {
        Basis::ALL
            .iter()
            .map(|&b| {
                let (c, p) = (self.get(b), beta.prob(b));
                if c == 0.0 {
                    0.0
                } else if p == 0.0 {
                    f64::INFINITY
                } else {
                    c / p
                }
            })
            .sum()
    }
}

/// Minimizer of `Σ_B c_B / β(B)` over the simplex: `β(B) = √c_B / Σ √c_B'`,
/// or uniform when every mass is zero.
pub fn closed_form_beta(costs: &CostTriple) -> BasisDistribution {
    if costs.total() == 0.0 {
        return BasisDistribution::UNIFORM;
    }
    let roots = costs.0.map(f64::sqrt);
    let total: f64 = roots.iter().sum();
    let mut probs = roots.map(|r| r / total);
    // keep the sum within rounding of 1 for the invariant check
    let drift: f64 = 1.0 - probs.iter().sum::<f64>();
    if let Some(largest) = (0..3).max_by(|&a, &b| probs[a].total_cmp(&probs[b])) {
        probs[largest] = (probs[largest] + drift).clamp(0.0, 1.0);
    }
    BasisDistribution::new(probs)
}

/// Independent per-qubit basis distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProductDistribution {
    per_qubit: Vec<BasisDistribution>,
}

impl ProductDistribution {
    pub fn new(per_qubit: Vec<BasisDistribution>) -> Self {
        assert!(
            !per_qubit.is_empty(),
            "product distribution needs at least one qubit"
        );
        Self { per_qubit }
    }

    pub fn uniform(num_qubits: usize) -> Self {
        Self::new(vec![BasisDistribution::UNIFORM; num_qubits])
    }

    pub fn num_qubits(&self) -> usize {
        self.per_qubit.len()
    }

    pub fn qubit(&self, q: usize) -> &BasisDistribution {
        &self.per_qubit[q]
    }

    pub fn per_qubit(&self) -> &[BasisDistribution] {
        &self.per_qubit
    }

    /// `∏_{i : P_i ≠ I} β_i(P_i)`.
    pub fn coverage_probability(&self, pauli: &PauliOp) -> f64 {
        assert_eq!(
            pauli.num_qubits(),
            self.num_qubits(),
            "qubit count mismatch"
        );
        pauli
            .letters()
            .iter()
            .zip(&self.per_qubit)
            .filter_map(|(l, d)| l.basis().map(|b| d.prob(b)))
            .product()
    }

    /// Probability of drawing exactly `basis`.
    pub fn basis_probability(&self, basis: &MeasurementBasis) -> f64 {
        basis
            .letters()
            .iter()
            .zip(&self.per_qubit)
            .map(|(&b, d)| d.prob(b))
            .product()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MeasurementBasis {
        MeasurementBasis::new(self.per_qubit.iter().map(|d| d.sample(rng)).collect())
    }
}

pub fn uniform_distribution(num_qubits: usize) -> ProductDistribution {
    assert!(num_qubits >= 1, "need at least one qubit");
    ProductDistribution::uniform(num_qubits)
}

pub fn sample_product_basis<R: Rng + ?Sized>(
    distribution: &ProductDistribution,
    rng: &mut R,
) -> MeasurementBasis {
    distribution.sample(rng)
}

/// `Σ_P α_P² / Pr[P covered]`; `+∞` if some term can never be covered.
pub fn diagonal_cost(hamiltonian: &Hamiltonian, distribution: &ProductDistribution) -> f64 {
    hamiltonian
        .terms()
        .iter()
        .map(|t| {
            let cover = distribution.coverage_probability(&t.pauli);
            if cover == 0.0 {
                f64::INFINITY
            } else {
                t.coeff * t.coeff / cover
            }
        })
        .sum()
}

/// Outcome of the locally-biased fit.
#[derive(Debug, Clone)]
pub struct LbcsFit {
    pub distribution: ProductDistribution,
    pub cost: f64,
    pub sweeps: usize,
    /// Diagonal cost before the first sweep and after each sweep, evaluated
    /// on the floored iterates.
    pub cost_history: Vec<f64>,
}

/// Product distribution approximately minimizing [`diagonal_cost`].
pub fn lbcs_distribution(
    hamiltonian: &Hamiltonian,
    tol: f64,
    max_sweeps: usize,
) -> ProductDistribution {
    lbcs_fit(hamiltonian, tol, max_sweeps).distribution
}

/// Cyclic coordinate descent on the diagonal cost starting from uniform.
///
/// For qubit `i` with every other qubit held fixed, the cost restricted to
/// `β_i` is `Σ_B m_B / β_i(B)` with effective masses
/// `m_B = Σ_{P : P_i = B} α_P² / ∏_{k ≠ i, P_k ≠ I} β_k(P_k)`, so each step is
/// an exact [`closed_form_beta`]. Probabilities are floored at
/// [`LBCS_FLOOR`] while sweeping; the unfloored iterate is reported when its
/// cost is finite.
pub fn lbcs_fit(hamiltonian: &Hamiltonian, tol: f64, max_sweeps: usize) -> LbcsFit {
    let n = hamiltonian.num_qubits();
    let weights: Vec<f64> = hamiltonian
        .terms()
        .iter()
        .map(|t| t.coeff * t.coeff)
        .collect();
    let mut raw = vec![BasisDistribution::UNIFORM; n];
    let mut floored = raw.clone();

    let cost_of = |dists: &[BasisDistribution]| {
        diagonal_cost(hamiltonian, &ProductDistribution::new(dists.to_vec()))
    };
    let mut cost = cost_of(&floored);
    let mut history = vec![cost];
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        for qubit in 0..n {
            let mut masses = [0.0; 3];
            for (term, &w) in hamiltonian.terms().iter().zip(&weights) {
                let Some(letter) = term.pauli.letter(qubit).basis() else {
                    continue;
                };
                let others: f64 = term
                    .pauli
                    .letters()
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != qubit)
                    .filter_map(|(k, l)| l.basis().map(|b| floored[k].prob(b)))
                    .product();
                masses[letter.index()] += w / others;
            }
            raw[qubit] = closed_form_beta(&CostTriple::new(masses));
            floored[qubit] = raw[qubit].floored(LBCS_FLOOR);
        }
        let next = cost_of(&floored);
        history.push(next);
        let converged = (cost - next).abs() < tol * (1.0 + next.abs());
        cost = next;
        if converged {
            break;
        }
    }

    let unfloored_cost = cost_of(&raw);
    let (per_qubit, cost) = if unfloored_cost.is_finite() {
        (raw, unfloored_cost)
    } else {
        (floored, cost)
    };
    LbcsFit {
        distribution: ProductDistribution::new(per_qubit),
        cost,
        sweeps,
        cost_history: history,
    }
}

/// A qubit ordering together with the letters drawn for its first stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    ordering: Vec<usize>,
    assigned: Vec<Basis>,
}

impl PartialAssignment {
    /// Panics unless `ordering` is a permutation of `0..n`.
    pub fn new(ordering: Vec<usize>) -> Self {
        let mut seen = vec![false; ordering.len()];
        for &q in &ordering {
            assert!(
                q < ordering.len() && !seen[q],
                "ordering is not a permutation: {ordering:?}"
            );
            seen[q] = true;
        }
        Self {
            ordering,
            assigned: Vec::new(),
        }
    }

    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        Self::new(random_ordering(num_qubits, rng))
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn assigned(&self) -> &[Basis] {
        &self.assigned
    }

    /// Index of the next stage to assign.
    pub fn stage(&self) -> usize {
        self.assigned.len()
    }

    pub fn is_complete(&self) -> bool {
        self.assigned.len() == self.ordering.len()
    }

    /// Fixes the letter of the qubit at the current stage.
    pub fn assign(&mut self, letter: Basis) {
        assert!(!self.is_complete(), "all stages already assigned");
        self.assigned.push(letter);
    }

    /// Completed basis; panics if some stage is unassigned.
    pub fn to_basis(&self) -> MeasurementBasis {
        assert!(self.is_complete(), "assignment is incomplete");
        let mut letters = vec![Basis::Z; self.ordering.len()];
        for (&q, &b) in self.ordering.iter().zip(&self.assigned) {
            letters[q] = b;
        }
        MeasurementBasis::new(letters)
    }
}

/// Uniform random permutation of `0..n` (Fisher–Yates).
pub fn random_ordering<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Vec<usize> {
    let mut ordering: Vec<usize> = (0..num_qubits).collect();
    ordering.shuffle(rng);
    ordering
}

fn compatible(letter: Pauli, chosen: Basis) -> bool {
    letter == Pauli::I || letter == chosen.as_pauli()
}

/// Masses `c_B = Σ α_P²` over the terms that act non-trivially on the qubit
/// at `stage` and agree with every letter assigned at earlier stages,
/// grouped by their letter on that qubit.
pub fn omega_costs(
    hamiltonian: &Hamiltonian,
    assignment: &PartialAssignment,
    stage: usize,
) -> CostTriple {
    assert!(stage < assignment.ordering.len(), "stage out of range");
    assert!(
        stage <= assignment.assigned.len(),
        "earlier stages must be assigned before stage {stage}"
    );
    let qubit = assignment.ordering[stage];
    let prefix = &assignment.ordering[..stage];
    let mut masses = [0.0; 3];
    for term in hamiltonian.terms() {
        let Some(letter) = term.pauli.letter(qubit).basis() else {
            continue;
        };
        let consistent = prefix
            .iter()
            .zip(&assignment.assigned)
            .all(|(&q, &b)| compatible(term.pauli.letter(q), b));
        if consistent {
            masses[letter.index()] += term.coeff * term.coeff;
        }
    }
    CostTriple::new(masses)
}

/// Adaptive basis choice for one shot with a fresh random qubit ordering.
pub fn aps_choose_basis<R: Rng + ?Sized>(
    hamiltonian: &Hamiltonian,
    rng: &mut R,
) -> MeasurementBasis {
    let ordering = random_ordering(hamiltonian.num_qubits(), rng);
    aps_choose_basis_ordered(hamiltonian, &ordering, rng)
}

/// Adaptive basis choice along a fixed qubit ordering.
///
/// The set of terms compatible with the letters drawn so far is filtered in
/// place after every stage, so one call touches each term at most once per
/// qubit: O(n_H · n) overall.
pub fn aps_choose_basis_ordered<R: Rng + ?Sized>(
    hamiltonian: &Hamiltonian,
    ordering: &[usize],
    rng: &mut R,
) -> MeasurementBasis {
    let n = hamiltonian.num_qubits();
    assert_eq!(ordering.len(), n, "ordering length mismatch");
    let terms = hamiltonian.terms();
    let mut alive: Vec<usize> = (0..terms.len()).collect();
    let mut letters = vec![Basis::Z; n];
    for &qubit in ordering {
        let mut masses = [0.0; 3];
        for &t in &alive {
            if let Some(b) = terms[t].pauli.letter(qubit).basis() {
                masses[b.index()] += terms[t].coeff * terms[t].coeff;
            }
        }
        let chosen = closed_form_beta(&CostTriple::new(masses)).sample(rng);
        letters[qubit] = chosen;
        alive.retain(|&t| compatible(terms[t].pauli.letter(qubit), chosen));
    }
    MeasurementBasis::new(letters)
}

/// Exact distribution of the adaptive basis choice along a fixed ordering,
/// by enumerating every branch of the stage-wise distributions. Bases with
/// zero probability are omitted. Cost grows as 3^n.
pub fn aps_basis_distribution(
    hamiltonian: &Hamiltonian,
    ordering: &[usize],
) -> Vec<(MeasurementBasis, f64)> {
    fn expand(
        hamiltonian: &Hamiltonian,
        assignment: &mut PartialAssignment,
        weight: f64,
        out: &mut Vec<(MeasurementBasis, f64)>,
    ) {
        if assignment.is_complete() {
            out.push((assignment.to_basis(), weight));
            return;
        }
        let stage = assignment.stage();
        let beta = closed_form_beta(&omega_costs(hamiltonian, assignment, stage));
        for letter in Basis::ALL {
            let p = beta.prob(letter);
            if p > 0.0 {
                assignment.assign(letter);
                expand(hamiltonian, assignment, weight * p, out);
                assignment.assigned.pop();
            }
        }
    }

    let mut out = Vec::new();
    let mut assignment = PartialAssignment::new(ordering.to_vec());
    expand(hamiltonian, &mut assignment, 1.0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h(text: &str) -> Hamiltonian {
        Hamiltonian::parse(text).unwrap()
    }

    fn assert_probs(d: &BasisDistribution, expected: [f64; 3]) {
        for (got, want) in d.probs().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_probs(
            &closed_form_beta(&CostTriple::new([0.0; 3])),
            [1.0 / 3.0; 3],
        );
        assert_probs(
            &closed_form_beta(&CostTriple::new([1.0; 3])),
            [1.0 / 3.0; 3],
        );
        assert_probs(
            &closed_form_beta(&CostTriple::new([4.0, 1.0, 0.0])),
            [2.0 / 3.0, 1.0 / 3.0, 0.0],
        );
    }

    #[test]
    #[should_panic]
    fn negative_mass_is_rejected() {
        CostTriple::new([1.0, -0.5, 0.0]);
    }

    #[test]
    fn objective_conventions() {
        let c = CostTriple::new([1.0, 0.0, 0.0]);
        assert_eq!(c.objective(&BasisDistribution::certain(Basis::X)), 1.0);
        assert_eq!(
            c.objective(&BasisDistribution::certain(Basis::Z)),
            f64::INFINITY
        );
    }

    #[test]
    fn omega_cost_examples() {
        let ham = h("1.0 XX\n0.5 ZI");
        let mut pa = PartialAssignment::new(vec![0, 1]);
        assert_eq!(omega_costs(&ham, &pa, 0).masses(), [1.0, 0.0, 0.25]);
        pa.assign(Basis::X);
        assert_eq!(omega_costs(&ham, &pa, 1).masses(), [1.0, 0.0, 0.0]);
        let mut pa = PartialAssignment::new(vec![0, 1]);
        pa.assign(Basis::Z);
        assert_eq!(omega_costs(&ham, &pa, 1).masses(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn aps_exact_distribution_example() {
        let ham = h("1.0 XX\n0.5 ZI");
        let dist = aps_basis_distribution(&ham, &[0, 1]);
        let prob = |s: &str| {
            let b: MeasurementBasis = s.parse().unwrap();
            dist.iter().find(|(x, _)| *x == b).map_or(0.0, |(_, p)| *p)
        };
        assert_abs_diff_eq!(prob("XX"), 2.0 / 3.0, epsilon = 1e-12);
        for s in ["ZX", "ZY", "ZZ"] {
            assert_abs_diff_eq!(prob(s), 1.0 / 9.0, epsilon = 1e-12);
        }
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn aps_single_term_is_deterministic() {
        let ham = h("1.0 Z");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert_eq!(aps_choose_basis(&ham, &mut rng).to_string(), "Z");
        }
    }

    #[test]
    fn aps_idle_qubit_is_uniform() {
        let ham = h("1.0 ZIX\n0.3 XIX");
        for ordering in [[0, 1, 2], [1, 2, 0], [2, 0, 1]] {
            let dist = aps_basis_distribution(&ham, &ordering);
            let mut marginal = [0.0; 3];
            for (b, p) in &dist {
                marginal[b.letter(1).index()] += p;
            }
            for m in marginal {
                assert_abs_diff_eq!(m, 1.0 / 3.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partial_assignment_rejects_non_permutation() {
        let result = std::panic::catch_unwind(|| PartialAssignment::new(vec![0, 0, 2]));
        assert!(result.is_err());
    }

    #[test]
    fn lbcs_examples() {
        let pd = lbcs_distribution(&h("1.0 Z"), DEFAULT_LBCS_TOL, DEFAULT_LBCS_MAX_SWEEPS);
        assert_probs(pd.qubit(0), [0.0, 0.0, 1.0]);
        let pd = lbcs_distribution(
            &h("1.0 X\n1.0 Z"),
            DEFAULT_LBCS_TOL,
            DEFAULT_LBCS_MAX_SWEEPS,
        );
        assert_probs(pd.qubit(0), [0.5, 0.0, 0.5]);
    }

    #[test]
    fn lbcs_matches_grid_search() {
        let ham = h("1.0 XX\n0.5 ZI");
        let fit = lbcs_fit(&ham, DEFAULT_LBCS_TOL, DEFAULT_LBCS_MAX_SWEEPS);
        let uniform_cost = diagonal_cost(&ham, &ProductDistribution::uniform(2));
        assert!(fit.cost <= uniform_cost);

        // brute force over both simplices on a 0.01 grid
        let steps = 100usize;
        let grid: Vec<BasisDistribution> = (0..=steps)
            .flat_map(|a| (0..=steps - a).map(move |b| (a, b)))
            .map(|(a, b)| {
                let (x, y) = (a as f64 / steps as f64, b as f64 / steps as f64);
                BasisDistribution {
                    probs: [x, y, (1.0 - x - y).max(0.0)],
                }
            })
            .collect();
        let mut best = f64::INFINITY;
        for d0 in &grid {
            for d1 in &grid {
                let cover_xx = d0.probs[0] * d1.probs[0];
                let cover_zi = d0.probs[2];
                if cover_xx > 0.0 && cover_zi > 0.0 {
                    best = best.min(1.0 / cover_xx + 0.25 / cover_zi);
                }
            }
        }
        assert!(
            (fit.cost - best).abs() <= 1e-3,
            "fit {} grid {}",
            fit.cost,
            best
        );
    }

    #[test]
    fn lbcs_cost_never_increases() {
        let ham = h("0.9 ZZII\n0.4 XXYY\n-0.2 IZZI\n0.3 YIIY\n0.05 XZXZ\n0.7 IIIZ");
        let fit = lbcs_fit(&ham, DEFAULT_LBCS_TOL, DEFAULT_LBCS_MAX_SWEEPS);
        for pair in fit.cost_history.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "{pair:?}");
        }
        assert!(fit.sweeps < DEFAULT_LBCS_MAX_SWEEPS);
    }

    #[test]
    fn diagonal_cost_examples() {
        assert_abs_diff_eq!(
            diagonal_cost(&h("2.0 Z"), &ProductDistribution::uniform(1)),
            12.0,
            epsilon = 1e-12
        );
        let all_z = ProductDistribution::new(vec![BasisDistribution::certain(Basis::Z); 2]);
        assert_eq!(diagonal_cost(&h("1.0 XI"), &all_z), f64::INFINITY);
    }

    #[test]
    fn product_sampling_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pd = ProductDistribution::new(vec![
            BasisDistribution::certain(Basis::X),
            BasisDistribution::certain(Basis::Z),
        ]);
        for _ in 0..20 {
            assert_eq!(sample_product_basis(&pd, &mut rng).to_string(), "XZ");
        }
        let pd = ProductDistribution::new(vec![BasisDistribution::certain(Basis::Z); 3]);
        assert_eq!(sample_product_basis(&pd, &mut rng).to_string(), "ZZZ");
    }
}
