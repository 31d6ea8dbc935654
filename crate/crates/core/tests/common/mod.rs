//! Fixtures and small matrix helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use netosc::graph::{self, Graph, GraphKind};
use netosc::solvers::CVector;
use netosc::{build_operators, eigendecompose, OperatorSet, SpectralDecomposition, SpinorState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn k2() -> Graph {
    graph::generate(GraphKind::Complete, 2, 1.0).unwrap()
}

pub fn p3() -> Graph {
    graph::generate(GraphKind::Path, 3, 1.0).unwrap()
}

/// Undirected fixtures with at most 12 nodes, regular and non-regular.
pub fn small_fixtures() -> Vec<(String, Graph)> {
    vec![
        ("K2".into(), k2()),
        ("P3".into(), p3()),
        ("six-node".into(), graph::six_node_network()),
        ("C5".into(), graph::generate(GraphKind::Cycle, 5, 1.0).unwrap()),
        ("K4".into(), graph::generate(GraphKind::Complete, 4, 1.0).unwrap()),
        ("P7".into(), graph::generate(GraphKind::Path, 7, 0.5).unwrap()),
        ("random-8".into(), graph::random_connected(8, 0.3, 7).unwrap()),
        ("random-12".into(), graph::random_connected(12, 0.2, 11).unwrap()),
    ]
}

pub fn decompose(g: &Graph) -> (OperatorSet, SpectralDecomposition) {
    let ops = build_operators(g);
    let sd = eigendecompose(&ops.laplacian, !g.is_directed(), 1e-9).unwrap();
    (ops, sd)
}

pub fn delta(n: usize, i: usize) -> SpinorState {
    SpinorState::from_real(&DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }))
}

pub fn random_state(n: usize, seed: u64) -> SpinorState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        CVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    };
    let plus = draw();
    let minus = draw();
    SpinorState::new(plus, minus)
}

pub fn random_real_state(n: usize, seed: u64) -> SpinorState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || CVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0));
    let plus = draw();
    let minus = draw();
    SpinorState::new(plus, minus)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn cmax_abs(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `m^p` by repeated multiplication.
pub fn power(m: &DMatrix<f64>, p: u32) -> DMatrix<f64> {
    let n = m.nrows();
    (0..p).fold(DMatrix::identity(n, n), |acc, _| acc * m)
}

/// Max-norm gap relative to the max-norm of `reference` (absolute below 1).
pub fn relative_gap(a: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    max_abs(&(a - reference)) / max_abs(reference).max(1.0)
}

/// Ĥ assembled entry by entry from its 2x2 blocks:
/// diagonal `√dᵢ diag(1, -1) - Aᵢᵢ/√dᵢ â`, off-diagonal `-Aᵢⱼ/√dᵢ â`.
pub fn hamiltonian_by_blocks(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let d = g.degrees();
    let a = g.adjacency();
    let a_hat = [[0.5, 0.5], [-0.5, -0.5]];
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            for r in 0..2 {
                for c in 0..2 {
                    let mut v = -a[(i, j)] / d[i].sqrt() * a_hat[r][c];
                    if i == j && r == c {
                        v += d[i].sqrt() * if r == 0 { 1.0 } else { -1.0 };
                    }
                    h[(2 * i + r, 2 * j + c)] = v;
                }
            }
        }
    }
    h
}
