//! Oscillation model of user dynamics on networks.
//!
//! Node states obey the wave equation on a graph, `d²x/dt² = -L x`. Two
//! first-order "fundamental equations" generate its solutions:
//!
//! * boson type, `±i dx±/dt = √L x±`, whose operator `√L` is generally dense;
//! * fermion type, `i dx̂/dt = Ĥ x̂`, with a `2n × 2n` Hamiltonian that keeps
//!   the link structure of the graph.
//!
//! The crate builds the operator family ([`operators`]), decomposes the
//! Laplacian ([`spectral`]), evaluates both closed-form solutions
//! ([`solvers`]) and checks them against independent integrators and
//! finite-difference residuals ([`oracle`]). The `netosc` binary wraps all of
//! it ([`cli`]).

pub mod cli;
pub mod graph;
pub mod operators;
pub mod oracle;
pub mod solvers;
pub mod spectral;

pub use graph::{Graph, GraphError, GraphKind};
pub use operators::{build_hamiltonian, build_operators, Hamiltonian, OperatorSet, SpinorBasis};
pub use oracle::{Equation, OracleError, ResidualReport};
pub use solvers::{SolveError, SolverTag, SpinorState, Trajectory, ZeroModeSine};
pub use spectral::{eigendecompose, SpectralDecomposition, SpectralError};
