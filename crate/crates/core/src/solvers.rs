//! Closed-form solutions of the boson-type and fermion-type fundamental
//! equations, and the wave-equation solutions they generate.
//!
//! Boson type, with `x⁺` and `x⁻` evolving independently:
//!
//! ```text
//! x±(t) = P exp(∓iΩt) P⁻¹ x±(0)
//! ```
//!
//! Fermion type, `i dx̂/dt = Ĥ x̂`:
//!
//! ```text
//! x̂(t) = [ D^{-1/2} P cos(Ωt) P⁻¹ D^{1/2} ⊗ âb̂ + P cos(Ωt) P⁻¹ ⊗ b̂â ] x̂(0)
//!      - i [ D^{-1/2} P Ω sin(Ωt) P⁻¹ ⊗ â + P S(t) P⁻¹ D^{1/2} ⊗ b̂ ] x̂(0)
//! ```
//!
//! where `S(t)` is `sin(ω t)/ω` on every mode with `ω > 0`. On zero modes the
//! power series of `sin(Ĥt)` contributes `t`; [`ZeroModeSine`] selects
//! between that limit and the pseudo-inverse `℧ sin(Ωt)`, which gives 0.
//! Only the limit solves `i dx̂/dt = Ĥ x̂` for every initial state; the
//! pseudo-inverse form drops a linear drift `-i t Π D^{1/2} (x⁺(0) - x⁻(0))/2`
//! (`Π` the zero-mode projector) from both spinor components.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{kron_spin, OperatorSet, SpinorBasis};
use crate::spectral::{SpectralDecomposition, TrigKind};

pub type CVector = DVector<Complex64>;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("time grid must be non-empty, finite and ascending")]
    InvalidGrid,

    #[error("state has {got} nodes, operator has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `x̂ = x⁺ ⊗ (1,0)ᵀ + x⁻ ⊗ (0,1)ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    pub plus: CVector,
    pub minus: CVector,
}

impl SpinorState {
    pub fn new(plus: CVector, minus: CVector) -> Self {
        assert_eq!(plus.len(), minus.len(), "spinor halves differ in length");
        SpinorState { plus, minus }
    }

    pub fn zeros(n: usize) -> Self {
        SpinorState { plus: CVector::zeros(n), minus: CVector::zeros(n) }
    }

    /// `x⁺(0) = x⁻(0) = x(0)/2`: the wave solution starts at `x(0)` and,
    /// under the boson solver, with zero velocity.
    pub fn from_real(x: &DVector<f64>) -> Self {
        let half = x.map(|v| Complex64::new(v / 2.0, 0.0));
        SpinorState { plus: half.clone(), minus: half }
    }

    pub fn n(&self) -> usize {
        self.plus.len()
    }

    /// Interleaved `2n` vector `(x⁺₁, x⁻₁, x⁺₂, x⁻₂, …)`.
    pub fn pack(&self) -> CVector {
        CVector::from_fn(2 * self.n(), |i, _| {
            if i % 2 == 0 {
                self.plus[i / 2]
            } else {
                self.minus[i / 2]
            }
        })
    }

    pub fn unpack(packed: &CVector) -> Self {
        assert!(packed.len().is_multiple_of(2), "packed spinor state has odd length");
        let n = packed.len() / 2;
        SpinorState {
            plus: CVector::from_fn(n, |i, _| packed[2 * i]),
            minus: CVector::from_fn(n, |i, _| packed[2 * i + 1]),
        }
    }

    /// `x = x⁺ + x⁻`.
    pub fn sum(&self) -> CVector {
        &self.plus + &self.minus
    }

    pub fn max_abs(&self) -> f64 {
        self.plus.iter().chain(self.minus.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverTag {
    Boson,
    Fermion,
    Oracle,
}

impl std::fmt::Display for SolverTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverTag::Boson => "boson",
            SolverTag::Fermion => "fermion",
            SolverTag::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpinorState>,
    pub solver: SolverTag,
    pub initial: SpinorState,
}

/// Anything that maps an initial state to the state at time `t`.
pub trait Propagator: Sync {
    fn tag(&self) -> SolverTag;

    fn n(&self) -> usize;

    fn evolve(&self, init: &SpinorState, t: f64) -> SpinorState;

    /// Evaluates every grid point independently (in parallel).
    fn trajectory(&self, init: &SpinorState, times: &[f64]) -> Result<Trajectory, SolveError> {
        check_grid(times)?;
        check_dim(self.n(), init)?;
        let states = times.par_iter().map(|&t| self.evolve(init, t)).collect();
        Ok(Trajectory {
            times: times.to_vec(),
            states,
            solver: self.tag(),
            initial: init.clone(),
        })
    }
}

pub(crate) fn check_grid(times: &[f64]) -> Result<(), SolveError> {
    if times.is_empty()
        || times.iter().any(|t| !t.is_finite())
        || times.windows(2).any(|w| w[1] < w[0])
    {
        return Err(SolveError::InvalidGrid);
    }
    Ok(())
}

pub(crate) fn check_dim(expected: usize, init: &SpinorState) -> Result<(), SolveError> {
    if init.n() != expected {
        return Err(SolveError::DimensionMismatch { expected, got: init.n() });
    }
    Ok(())
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

pub struct BosonSolver<'a> {
    sd: &'a SpectralDecomposition,
}

impl<'a> BosonSolver<'a> {
    pub fn new(sd: &'a SpectralDecomposition) -> Self {
        BosonSolver { sd }
    }
}

impl Propagator for BosonSolver<'_> {
    fn tag(&self) -> SolverTag {
        SolverTag::Boson
    }

    fn n(&self) -> usize {
        self.sd.n()
    }

    fn evolve(&self, init: &SpinorState, t: f64) -> SpinorState {
        let forward = self.sd.matrix_trig(t, TrigKind::ExpMinusI);
        let backward = self.sd.matrix_trig(t, TrigKind::ExpPlusI);
        SpinorState { plus: forward * &init.plus, minus: backward * &init.minus }
    }
}

/// Contribution of zero modes to the `sin(Ĥt)` term carrying `b̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroModeSine {
    /// `lim_{ω→0} sin(ωt)/ω = t`; the exact sum of the series.
    #[default]
    Exact,
    /// `℧ sin(Ωt)` with `℧ = 0` on zero modes.
    Pseudoinverse,
}

/// The four `n × n` blocks of the fermion closed form at time `t`.
struct FermionBlocks {
    /// `D^{-1/2} P cos(Ωt) P⁻¹ D^{1/2}`
    cos_conj: DMatrix<f64>,
    /// `P cos(Ωt) P⁻¹`
    cos: DMatrix<f64>,
    /// `D^{-1/2} P Ω sin(Ωt) P⁻¹`
    sin_a: DMatrix<f64>,
    /// `P S(t) P⁻¹ D^{1/2}`
    sin_b: DMatrix<f64>,
}

pub struct FermionSolver<'a> {
    ops: &'a OperatorSet,
    sd: &'a SpectralDecomposition,
    zero_mode: ZeroModeSine,
}

impl<'a> FermionSolver<'a> {
    pub fn new(ops: &'a OperatorSet, sd: &'a SpectralDecomposition) -> Self {
        FermionSolver { ops, sd, zero_mode: ZeroModeSine::default() }
    }

    pub fn with_zero_mode(mut self, zero_mode: ZeroModeSine) -> Self {
        self.zero_mode = zero_mode;
        self
    }

    pub fn zero_mode(&self) -> ZeroModeSine {
        self.zero_mode
    }

    fn blocks(&self, t: f64) -> FermionBlocks {
        let sd = self.sd;
        let cos = sd.cos_matrix(t);
        let cos_conj = &self.ops.inv_sqrt_degree * &cos * &self.ops.sqrt_degree;
        let sin_a = &self.ops.inv_sqrt_degree
            * sd.map_modes(|mu| sd.omega()[mu] * (sd.omega()[mu] * t).sin());
        let sine_over_omega = |mu: usize| {
            if sd.is_zero_mode(mu) {
                match self.zero_mode {
                    ZeroModeSine::Exact => t,
                    ZeroModeSine::Pseudoinverse => 0.0,
                }
            } else {
                sd.mho()[mu] * (sd.omega()[mu] * t).sin()
            }
        };
        let sin_b = sd.map_modes(sine_over_omega) * &self.ops.sqrt_degree;
        FermionBlocks { cos_conj, cos, sin_a, sin_b }
    }

    /// The `2n × 2n` propagator `exp(-iĤt)` in closed form.
    pub fn evolution_matrix(&self, t: f64) -> DMatrix<Complex64> {
        let basis = SpinorBasis::new();
        let b = self.blocks(t);
        let re = kron_spin(&b.cos_conj, &basis.ab) + kron_spin(&b.cos, &basis.ba);
        let im = -(kron_spin(&b.sin_a, &basis.a_hat) + kron_spin(&b.sin_b, &basis.b_hat));
        re.zip_map(&im, Complex64::new)
    }

    /// `x_f⁺(t)` and `x_f⁻(t)` written out per component, from the half-sum
    /// and half-difference of the initial halves.
    pub fn split_state(&self, init: &SpinorState, t: f64) -> SpinorState {
        let b = self.blocks(t);
        let half_sum = (&init.plus + &init.minus) / Complex64::new(2.0, 0.0);
        let half_diff = (&init.plus - &init.minus) / Complex64::new(2.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let cos_conj_d = to_complex(&b.cos_conj) * &half_diff;
        let cos_s = to_complex(&b.cos) * &half_sum;
        let sin_a_s = to_complex(&b.sin_a) * &half_sum * i;
        let sin_b_d = to_complex(&b.sin_b) * &half_diff * i;
        let plus = &cos_conj_d + &cos_s - &sin_a_s - &sin_b_d;
        let minus = -cos_conj_d + cos_s + sin_a_s - sin_b_d;
        SpinorState { plus, minus }
    }
}

impl Propagator for FermionSolver<'_> {
    fn tag(&self) -> SolverTag {
        SolverTag::Fermion
    }

    fn n(&self) -> usize {
        self.ops.n()
    }

    fn evolve(&self, init: &SpinorState, t: f64) -> SpinorState {
        SpinorState::unpack(&(self.evolution_matrix(t) * init.pack()))
    }
}

pub fn solve_boson(
    sd: &SpectralDecomposition,
    init: &SpinorState,
    times: &[f64],
) -> Result<Trajectory, SolveError> {
    BosonSolver::new(sd).trajectory(init, times)
}

pub fn solve_fermion(
    ops: &OperatorSet,
    sd: &SpectralDecomposition,
    init: &SpinorState,
    times: &[f64],
) -> Result<Trajectory, SolveError> {
    FermionSolver::new(ops, sd).trajectory(init, times)
}

/// `x(t) = x⁺(t) + x⁻(t)` per sample.
pub fn reconstruct_wave(traj: &Trajectory) -> Vec<CVector> {
    traj.states.iter().map(SpinorState::sum).collect()
}

#[derive(Debug, Clone)]
pub struct ComponentTrajectories {
    pub times: Vec<f64>,
    pub plus: Vec<CVector>,
    pub minus: Vec<CVector>,
}

impl ComponentTrajectories {
    pub fn packed(&self, k: usize) -> CVector {
        SpinorState::new(self.plus[k].clone(), self.minus[k].clone()).pack()
    }
}

pub fn fermion_split_components(
    ops: &OperatorSet,
    sd: &SpectralDecomposition,
    init: &SpinorState,
    times: &[f64],
    zero_mode: ZeroModeSine,
) -> Result<ComponentTrajectories, SolveError> {
    check_grid(times)?;
    check_dim(ops.n(), init)?;
    let solver = FermionSolver::new(ops, sd).with_zero_mode(zero_mode);
    let (plus, minus) = times
        .par_iter()
        .map(|&t| {
            let s = solver.split_state(init, t);
            (s.plus, s.minus)
        })
        .unzip();
    Ok(ComponentTrajectories { times: times.to_vec(), plus, minus })
}

/// Evenly spaced grid with `samples` points on `[t0, t1]`; a single sample is `t0`.
pub fn linspace(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![t0],
        _ => {
            let step = (t1 - t0) / (samples - 1) as f64;
            (0..samples)
                .map(|k| if k + 1 == samples { t1 } else { t0 + step * k as f64 })
                .collect()
        }
    }
}
