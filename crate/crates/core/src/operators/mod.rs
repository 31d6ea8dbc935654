//! The Laplacian operator family of a graph and the `2n × 2n` Hamiltonian of
//! the fermion-type equation.
//!
//! Kronecker convention: `M ⊗ s` is the `2n × 2n` matrix whose `2 × 2` block
//! at `(i, j)` is `M[i, j] · s`. The spinor slot is the fast index, so a
//! packed state reads `(x⁺₁, x⁻₁, x⁺₂, x⁻₂, …)`.

pub mod spinor;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::graph::Graph;
use crate::spectral::{sqrt_from_spectrum, SpectralDecomposition, SpectralError};
pub use spinor::{Dyadic, SpinMatrix, SpinorBasis};

/// Entries with magnitude above this count as structurally nonzero.
pub const SPARSITY_THRESHOLD: f64 = 1e-12;

/// Matrices derived from a graph. All are `n × n`.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub adjacency: DMatrix<f64>,
    pub degree: DMatrix<f64>,
    pub sqrt_degree: DMatrix<f64>,
    pub inv_sqrt_degree: DMatrix<f64>,
    /// `L = D - A`
    pub laplacian: DMatrix<f64>,
    /// `N = D^{-1/2} L D^{-1/2}`
    pub normalized: DMatrix<f64>,
    /// `ℋ = D^{-1/2} L`
    pub semi_normalized: DMatrix<f64>,
    pub sqrt_laplacian: Option<DMatrix<f64>>,
    directed: bool,
}

pub fn build_operators(g: &Graph) -> OperatorSet {
    let d = g.degrees();
    let adjacency = g.adjacency();
    let degree = DMatrix::from_diagonal(&d);
    let sqrt_degree = DMatrix::from_diagonal(&d.map(f64::sqrt));
    let inv_sqrt_degree = DMatrix::from_diagonal(&d.map(|v| 1.0 / v.sqrt()));
    let laplacian = &degree - &adjacency;
    let normalized = &inv_sqrt_degree * &laplacian * &inv_sqrt_degree;
    let semi_normalized = &inv_sqrt_degree * &laplacian;
    OperatorSet {
        adjacency,
        degree,
        sqrt_degree,
        inv_sqrt_degree,
        laplacian,
        normalized,
        semi_normalized,
        sqrt_laplacian: None,
        directed: g.is_directed(),
    }
}

impl OperatorSet {
    pub fn n(&self) -> usize {
        self.laplacian.nrows()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn degrees(&self) -> DVector<f64> {
        self.degree.diagonal()
    }

    /// Attaches `√L` computed from `sd`, which must decompose `self.laplacian`.
    pub fn with_sqrt_laplacian(
        mut self,
        sd: &SpectralDecomposition,
    ) -> Result<Self, SpectralError> {
        self.sqrt_laplacian = Some(sqrt_from_spectrum(sd)?);
        Ok(self)
    }

    /// `D^{-1/2} A D^{1/2}`, the similarity-transformed adjacency.
    pub fn conjugated_adjacency(&self) -> DMatrix<f64> {
        &self.inv_sqrt_degree * &self.adjacency * &self.sqrt_degree
    }

    /// The pair `(M, K)` in `d²x⁺/dt² = -M x⁺ + K x⁻` (and `+ ↔ -`):
    /// `M = D - (A + D^{-1/2} A D^{1/2}) / 2`, `K = (A - D^{-1/2} A D^{1/2}) / 2`.
    pub fn component_coupling(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let conj = self.conjugated_adjacency();
        let m = &self.degree - (&self.adjacency + &conj) * 0.5;
        let k = (&self.adjacency - &conj) * 0.5;
        (m, k)
    }
}

/// `M ⊗ s` under the crate's block convention.
pub fn kron_spin(m: &DMatrix<f64>, s: &SpinMatrix) -> DMatrix<f64> {
    let s = s.to_f64();
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| m[(i / 2, j / 2)] * s[i % 2][j % 2])
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: DMatrix<f64>,
    form_gap: f64,
}

impl Hamiltonian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Max entrywise difference between the two construction routes.
    pub fn form_gap(&self) -> f64 {
        self.form_gap
    }
}

/// `Ĥ = √D ⊗ diag(+1,-1) - D^{-1/2} A ⊗ â`.
pub fn hamiltonian_direct_form(ops: &OperatorSet, basis: &SpinorBasis) -> DMatrix<f64> {
    kron_spin(&ops.sqrt_degree, &SpinorBasis::sigma_z())
        - kron_spin(&(&ops.inv_sqrt_degree * &ops.adjacency), &basis.a_hat)
}

/// `Ĥ = ℋ ⊗ â + √D ⊗ b̂`.
pub fn hamiltonian_spinor_form(ops: &OperatorSet, basis: &SpinorBasis) -> DMatrix<f64> {
    kron_spin(&ops.semi_normalized, &basis.a_hat) + kron_spin(&ops.sqrt_degree, &basis.b_hat)
}

/// Builds `Ĥ` both ways and returns the `ℋ ⊗ â + √D ⊗ b̂` form.
pub fn build_hamiltonian(ops: &OperatorSet, basis: &SpinorBasis) -> Hamiltonian {
    let direct = hamiltonian_direct_form(ops, basis);
    let matrix = hamiltonian_spinor_form(ops, basis);
    let form_gap = (&direct - &matrix).amax();
    debug_assert!(form_gap <= 1e-12, "Hamiltonian forms disagree by {form_gap:e}");
    Hamiltonian { matrix, form_gap }
}

/// Right-hand side of the expanded `Ĥ²`:
/// `(D - (A + D^{-1/2}AD^{1/2})/2) ⊗ I₂ - (A - D^{-1/2}AD^{1/2}) ⊗ ½[[0,1],[1,0]]`.
pub fn hamiltonian_squared_expansion(ops: &OperatorSet) -> DMatrix<f64> {
    let (m, k) = ops.component_coupling();
    kron_spin(&m, &SpinMatrix::IDENTITY) - kron_spin(&k, &SpinorBasis::swap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

fn laplacian_power(ops: &OperatorSet, k: u32) -> DMatrix<f64> {
    let n = ops.n();
    (0..k).fold(DMatrix::identity(n, n), |acc, _| acc * &ops.laplacian)
}

/// Closed form of `Ĥ^{2k}` (even) or `Ĥ^{2k+1}` (odd):
///
/// * even: `D^{-1/2} Lᵏ D^{1/2} ⊗ âb̂ + Lᵏ ⊗ b̂â`
/// * odd: `ℋ Lᵏ ⊗ â + Lᵏ D^{1/2} ⊗ b̂`
pub fn hamiltonian_power_closed_form(ops: &OperatorSet, k: u32, parity: Parity) -> DMatrix<f64> {
    let basis = SpinorBasis::new();
    let lk = laplacian_power(ops, k);
    match parity {
        Parity::Even => {
            kron_spin(&(&ops.inv_sqrt_degree * &lk * &ops.sqrt_degree), &basis.ab)
                + kron_spin(&lk, &basis.ba)
        }
        Parity::Odd => {
            kron_spin(&(&ops.semi_normalized * &lk), &basis.a_hat)
                + kron_spin(&(&lk * &ops.sqrt_degree), &basis.b_hat)
        }
    }
}

/// Odd power with the `â` factor written as `D^{-1/2} L^{k+1}` instead of `ℋ Lᵏ`.
pub fn hamiltonian_odd_power_alt(ops: &OperatorSet, k: u32) -> DMatrix<f64> {
    let basis = SpinorBasis::new();
    let lk = laplacian_power(ops, k);
    let lk1 = &lk * &ops.laplacian;
    kron_spin(&(&ops.inv_sqrt_degree * lk1), &basis.a_hat)
        + kron_spin(&(lk * &ops.sqrt_degree), &basis.b_hat)
}

/// Off-diagonal nonzero pattern, row-major `(i, j)` pairs.
pub fn offdiag_pattern(m: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = m.nrows();
    (0..n)
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && m[(i, j)].abs() > SPARSITY_THRESHOLD)
        .collect()
}

/// Off-diagonal pattern of a `2n × 2n` matrix at the level of its `2 × 2`
/// blocks: block `(i, j)`, `i ≠ j`, counts when any of its entries is nonzero.
pub fn block_offdiag_pattern(m: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = m.nrows() / 2;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let block = m.view((2 * i, 2 * j), (2, 2));
            if block.iter().any(|v| v.abs() > SPARSITY_THRESHOLD) {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsityReport {
    pub matrix: String,
    pub n: usize,
    pub nnz_offdiag: usize,
    pub density: f64,
}

impl SparsityReport {
    fn from_count(name: &str, n: usize, nnz: usize) -> Self {
        let slots = n * n.saturating_sub(1);
        let density = if slots == 0 { 0.0 } else { nnz as f64 / slots as f64 };
        SparsityReport { matrix: name.to_string(), n, nnz_offdiag: nnz, density }
    }

    pub fn of_matrix(name: &str, m: &DMatrix<f64>) -> Self {
        Self::from_count(name, m.nrows(), offdiag_pattern(m).len())
    }

    /// Counts `2 × 2` blocks, so `n` is the node count.
    pub fn of_block_matrix(name: &str, m: &DMatrix<f64>) -> Self {
        Self::from_count(name, m.nrows() / 2, block_offdiag_pattern(m).len())
    }
}
