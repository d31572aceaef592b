//! Energy estimation for Pauli-decomposed Hamiltonians from randomized
//! single-qubit Pauli measurements.
//!
//! Three basis-selection strategies are provided:
//!
//! * uniform classical shadows (every qubit measured in X, Y or Z with
//!   probability 1/3),
//! * locally-biased classical shadows, a fixed product distribution fitted to
//!   the Hamiltonian by minimizing the diagonal cost,
//! * adaptive Pauli shadows, which pick each qubit's letter conditioned on the
//!   letters already chosen in the same shot.
//!
//! Shots are simulated on a dense statevector; [`bench`] wraps everything into
//! a reproducible error-comparison harness.

pub mod bench;
pub mod estimator;
pub mod pauli;
pub mod samplers;
pub mod state;

pub use estimator::{
    exact_variance_oracle, run_estimation, update_accumulator, Accumulator, EstimationResult,
    EstimatorError, Strategy,
};
pub use pauli::{
    covers, parse_hamiltonian, Basis, Hamiltonian, HamiltonianError, MeasurementBasis, Pauli,
    PauliOp, Term,
};
pub use samplers::{
    aps_choose_basis, closed_form_beta, diagonal_cost, lbcs_distribution, omega_costs,
    sample_product_basis, uniform_distribution, BasisDistribution, CostTriple, PartialAssignment,
    ProductDistribution,
};
pub use state::{ground_state, load_state, GroundState, ShotOutcome, StateError, StateVector};
