//! Independent verification: fixed-step RK4 integration of the first-order
//! fundamental equations and of the wave equation, plus central-difference
//! residual checks of the closed forms.
//!
//! Nothing here touches [`crate::spectral`]. The boson generator needs `√L`,
//! which is computed by a Denman–Beavers iteration on `L + Π` (`Π` the
//! zero-mode projector obtained from singular vectors of `L`).

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::operators::{build_hamiltonian, kron_spin, OperatorSet, SpinorBasis};
use crate::solvers::{
    check_dim, check_grid, CVector, Propagator, SolveError, SolverTag, SpinorState, Trajectory,
    ZeroModeSine,
};

pub const MAX_STEPS: u64 = 100_000_000;

/// Step for second-derivative residuals.
pub const WAVE_STEP: f64 = 1e-3;
/// Tolerance for second-derivative residuals, relative to `1 + max|x|`.
pub const WAVE_TOL: f64 = 1e-5;
/// Step for first-derivative residuals.
pub const FIRST_ORDER_STEP: f64 = 1e-4;
/// Tolerance for first-derivative residuals, relative to `1 + max|x|`.
pub const FIRST_ORDER_TOL: f64 = 1e-6;
/// RK4 step used for closed-form cross-checks.
pub const RK4_STEP: f64 = 1e-3;
/// Max-abs agreement required between a closed form and RK4.
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("step {0} must be positive and finite")]
    InvalidStep(f64),

    #[error("integration end time {0} must be non-negative and finite")]
    InvalidEndTime(f64),

    #[error("{0} steps exceeds the limit of {MAX_STEPS}")]
    TooManySteps(f64),

    #[error("matrix square root did not converge (last update {0:e})")]
    SqrtNotConverged(f64),

    #[error("zero-mode projector is singular")]
    SingularProjector,

    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn step_count(t_end: f64, h: f64) -> Result<u64, OracleError> {
    if !h.is_finite() || h <= 0.0 {
        return Err(OracleError::InvalidStep(h));
    }
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(OracleError::InvalidEndTime(t_end));
    }
    let ratio = t_end / h;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) { nearest } else { ratio.ceil() };
    if steps > MAX_STEPS as f64 {
        return Err(OracleError::TooManySteps(steps));
    }
    Ok(steps as u64)
}

fn rk4_steps(m: &DMatrix<Complex64>, mut y: CVector, dt: f64, steps: u64) -> CVector {
    let dt_c = Complex64::new(dt, 0.0);
    let half = Complex64::new(dt / 2.0, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    for _ in 0..steps {
        let k1 = m * &y;
        let k2 = m * (&y + &k1 * half);
        let k3 = m * (&y + &k2 * half);
        let k4 = m * (&y + &k3 * dt_c);
        y += (k1 + (k2 + k3) * two + k4) * sixth;
    }
    y
}

/// Classical RK4 for `dy/dt = M y` from 0 to `t_end`.
///
/// When `t_end / h` is not an integer the step is shrunk so that a whole
/// number of steps lands on `t_end`.
pub fn rk4_integrate(
    m: &DMatrix<Complex64>,
    y0: &CVector,
    t_end: f64,
    h: f64,
) -> Result<CVector, OracleError> {
    let steps = step_count(t_end, h)?;
    if steps == 0 {
        return Ok(y0.clone());
    }
    Ok(rk4_steps(m, y0.clone(), t_end / steps as f64, steps))
}

fn wave_system(l: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = l.nrows();
    let mut system = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        system[(i, n + i)] = Complex64::new(1.0, 0.0);
        for j in 0..n {
            system[(n + i, j)] = Complex64::new(-l[(i, j)], 0.0);
        }
    }
    system
}

fn stack(x: &CVector, v: &CVector) -> CVector {
    let n = x.len();
    let mut y = CVector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(x);
    y.rows_mut(n, n).copy_from(v);
    y
}

/// RK4 on the first-order system `x' = v`, `v' = -L x`.
pub fn wave_integrate(
    l: &DMatrix<f64>,
    x0: &CVector,
    v0: &CVector,
    t_end: f64,
    h: f64,
) -> Result<(CVector, CVector), OracleError> {
    let n = l.nrows();
    let y = rk4_integrate(&wave_system(l), &stack(x0, v0), t_end, h)?;
    Ok((y.rows(0, n).into_owned(), y.rows(n, n).into_owned()))
}

/// Positions of the wave system sampled on a non-decreasing grid of
/// times `>= 0`, integrated in one sweep.
pub fn wave_trajectory(
    l: &DMatrix<f64>,
    x0: &CVector,
    v0: &CVector,
    times: &[f64],
    h: f64,
) -> Result<Vec<CVector>, OracleError> {
    check_grid(times)?;
    let n = l.nrows();
    let system = wave_system(l);
    let mut y = stack(x0, v0);
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let steps = step_count(t - t_prev, h)?;
        if steps > 0 {
            y = rk4_steps(&system, y, (t - t_prev) / steps as f64, steps);
        }
        out.push(y.rows(0, n).into_owned());
        t_prev = t;
    }
    Ok(out)
}

/// Spectral projector onto the null space of `l`, built from left and right
/// singular vectors with (numerically) zero singular values.
pub fn zero_mode_projector(l: &DMatrix<f64>) -> Result<DMatrix<f64>, OracleError> {
    let n = l.nrows();
    let tol = 1e-8 * (1.0 + l.amax());
    let kernel = |m: DMatrix<f64>| -> DMatrix<f64> {
        let svd = SVD::new(m, false, true);
        let v_t = svd.v_t.expect("requested V");
        let cols: Vec<DVector<f64>> = (0..n)
            .filter(|&k| svd.singular_values[k] <= tol)
            .map(|k| v_t.row(k).transpose())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    };
    let right = kernel(l.clone());
    if right.ncols() == 0 {
        return Ok(DMatrix::zeros(n, n));
    }
    let left = kernel(l.transpose());
    if left.ncols() != right.ncols() {
        return Err(OracleError::SingularProjector);
    }
    let gram = left.transpose() * &right;
    let gram_inv = gram.try_inverse().ok_or(OracleError::SingularProjector)?;
    Ok(&right * gram_inv * left.transpose())
}

/// Principal square root of a Laplacian-type matrix with non-negative real
/// spectrum and semisimple zero eigenvalue.
///
/// Runs Denman–Beavers on `L + Π`, whose spectrum avoids zero, then removes
/// the projector again: `√L = √(L + Π) - Π`.
pub fn principal_sqrt(l: &DMatrix<f64>) -> Result<DMatrix<f64>, OracleError> {
    let n = l.nrows();
    let proj = zero_mode_projector(l)?;
    let shifted = l + &proj;
    let mut y = shifted.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    let mut last = f64::INFINITY;
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse().ok_or(OracleError::SqrtNotConverged(last))?;
        let z_inv = z.clone().try_inverse().ok_or(OracleError::SqrtNotConverged(last))?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        last = (&y_next - &y).amax();
        y = y_next;
        z = z_next;
        if last <= 1e-15 * (1.0 + y.amax()) {
            return Ok(y - proj);
        }
    }
    Err(OracleError::SqrtNotConverged(last))
}

fn complex(m: &DMatrix<f64>, scale: Complex64) -> DMatrix<Complex64> {
    m.map(|v| scale * v)
}

/// `-i (√L ⊗ diag(+1,-1))`, the boson generator on packed states.
pub fn boson_generator(sqrt_l: &DMatrix<f64>) -> DMatrix<Complex64> {
    complex(&kron_spin(sqrt_l, &SpinorBasis::sigma_z()), Complex64::new(0.0, -1.0))
}

/// `-i Ĥ`.
pub fn fermion_generator(ops: &OperatorSet) -> DMatrix<Complex64> {
    let h = build_hamiltonian(ops, &SpinorBasis::new());
    complex(h.matrix(), Complex64::new(0.0, -1.0))
}

/// Generator of the requested equation, built without spectral data.
pub fn generator_for(tag: SolverTag, ops: &OperatorSet) -> Result<DMatrix<Complex64>, OracleError> {
    match tag {
        SolverTag::Boson | SolverTag::Oracle => Ok(boson_generator(&principal_sqrt(&ops.laplacian)?)),
        SolverTag::Fermion => Ok(fermion_generator(ops)),
    }
}

/// RK4 trajectory of `dx̂/dt = G x̂` sampled on `times` (all `>= 0`).
pub fn integrate_trajectory(
    generator: &DMatrix<Complex64>,
    init: &SpinorState,
    times: &[f64],
    h: f64,
) -> Result<Trajectory, OracleError> {
    check_grid(times)?;
    check_dim(generator.nrows() / 2, init)?;
    let mut y = init.pack();
    let mut t_prev = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let steps = step_count(t - t_prev, h)?;
        if steps > 0 {
            y = rk4_steps(generator, y, (t - t_prev) / steps as f64, steps);
        }
        states.push(SpinorState::unpack(&y));
        t_prev = t;
    }
    Ok(Trajectory { times: times.to_vec(), states, solver: SolverTag::Oracle, initial: init.clone() })
}

/// Max over samples of the max-abs difference of packed states.
pub fn max_state_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| (x.pack() - y.pack()).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// `ẋ(0)` of the wave solution `x⁺ + x⁻` generated by a solver.
///
/// Boson: `-i √L (x⁺ - x⁻)`. Fermion: `-i D^{1/2} (x⁺ - x⁻)`, restricted to
/// the nonzero modes when the pseudo-inverse zero-mode rule is used.
pub fn wave_initial_velocity(
    tag: SolverTag,
    ops: &OperatorSet,
    init: &SpinorState,
    zero_mode: ZeroModeSine,
) -> Result<CVector, OracleError> {
    let diff = &init.plus - &init.minus;
    let minus_i = Complex64::new(0.0, -1.0);
    let v = match tag {
        SolverTag::Boson | SolverTag::Oracle => {
            complex(&principal_sqrt(&ops.laplacian)?, minus_i) * diff
        }
        SolverTag::Fermion => {
            let mut m = ops.sqrt_degree.clone();
            if zero_mode == ZeroModeSine::Pseudoinverse {
                let n = ops.n();
                m = (DMatrix::identity(n, n) - zero_mode_projector(&ops.laplacian)?) * m;
            }
            complex(&m, minus_i) * diff
        }
    };
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `d²x/dt² = -L x` for `x = x⁺ + x⁻`
    Wave,
    /// `±i dx±/dt = √L x±`
    Boson,
    /// `i dx̂/dt = Ĥ x̂`
    Fermion,
    /// `d²x⁺/dt² = -M x⁺ + K x⁻`
    CoupledPlus,
    /// `d²x⁻/dt² = -M x⁻ + K x⁺`
    CoupledMinus,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub equation: Equation,
    pub solver: SolverTag,
    pub times: Vec<f64>,
    /// Max over samples of `max|residual| / (1 + max|state|)`.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn max_abs(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Central-difference residual of `which` along `traj`.
///
/// The centre sample is taken from `traj`; the shifted samples `t ± h` are
/// re-evaluated through `source` from `traj.initial`.
pub fn residual_check(
    traj: &Trajectory,
    source: &dyn Propagator,
    ops: &OperatorSet,
    which: Equation,
    h: f64,
    tol: f64,
) -> Result<ResidualReport, OracleError> {
    if !h.is_finite() || h <= 0.0 {
        return Err(OracleError::InvalidStep(h));
    }
    let cx = |m: &DMatrix<f64>| complex(m, Complex64::new(1.0, 0.0));
    let i = Complex64::new(0.0, 1.0);
    let h2 = Complex64::new(h * h, 0.0);
    let two_h = Complex64::new(2.0 * h, 0.0);

    let laplacian = cx(&ops.laplacian);
    let (coupling_m, coupling_k) = {
        let (m, k) = ops.component_coupling();
        (cx(&m), cx(&k))
    };
    let first_order = match which {
        Equation::Boson => Some(cx(&kron_spin(
            &principal_sqrt(&ops.laplacian)?,
            &SpinorBasis::sigma_z(),
        ))),
        Equation::Fermion => Some(cx(build_hamiltonian(ops, &SpinorBasis::new()).matrix())),
        _ => None,
    };

    let mut worst: f64 = 0.0;
    for (k, &t) in traj.times.iter().enumerate() {
        let centre = &traj.states[k];
        let fwd = source.evolve(&traj.initial, t + h);
        let bwd = source.evolve(&traj.initial, t - h);
        let second = |f: &CVector, c: &CVector, b: &CVector| (f - c * Complex64::new(2.0, 0.0) + b) / h2;
        let (residual, scale) = match which {
            Equation::Wave => {
                let x = centre.sum();
                let r = second(&fwd.sum(), &x, &bwd.sum()) + &laplacian * &x;
                (max_abs(&r), max_abs(&x))
            }
            Equation::CoupledPlus => {
                let r = second(&fwd.plus, &centre.plus, &bwd.plus) + &coupling_m * &centre.plus
                    - &coupling_k * &centre.minus;
                (max_abs(&r), centre.max_abs())
            }
            Equation::CoupledMinus => {
                let r = second(&fwd.minus, &centre.minus, &bwd.minus)
                    + &coupling_m * &centre.minus
                    - &coupling_k * &centre.plus;
                (max_abs(&r), centre.max_abs())
            }
            // i dx̂/dt = G x̂ with G = √L ⊗ σ_z or Ĥ
            Equation::Boson | Equation::Fermion => {
                let gen = first_order.as_ref().expect("built above");
                let x = centre.pack();
                let deriv = (fwd.pack() - bwd.pack()) / two_h;
                let r = deriv * i - gen * &x;
                (max_abs(&r), centre.max_abs())
            }
        };
        worst = worst.max(residual / (1.0 + scale));
    }
    Ok(ResidualReport {
        equation: which,
        solver: traj.solver,
        times: traj.times.clone(),
        max_residual: worst,
        tolerance: tol,
        pass: worst <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, six_node_network, GraphKind};
    use crate::operators::build_operators;
    use crate::solvers::{linspace, BosonSolver, FermionSolver};
    use crate::spectral::{eigendecompose, DEFAULT_ZERO_TOL};
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn k2_ops() -> OperatorSet {
        build_operators(&generate(GraphKind::Path, 2, 1.0).unwrap())
    }

    #[test]
    fn zero_dynamics() {
        let m = DMatrix::zeros(3, 3);
        let y0 = CVector::from_vec(vec![c(1.0, 2.0), c(-1.0, 0.0), c(0.5, 0.5)]);
        assert_eq!(rk4_integrate(&m, &y0, 2.0, 0.1).unwrap(), y0);
    }

    #[test]
    fn scalar_rotation_to_minus_one() {
        let m = DMatrix::from_element(1, 1, c(0.0, -1.0));
        let y0 = CVector::from_element(1, c(1.0, 0.0));
        let y = rk4_integrate(&m, &y0, PI, 1e-3).unwrap();
        assert!((y[0] - c(-1.0, 0.0)).norm() < 1e-10, "{}", y[0]);
    }

    #[test]
    fn step_guards() {
        let m = DMatrix::zeros(1, 1);
        let y0 = CVector::zeros(1);
        assert!(matches!(rk4_integrate(&m, &y0, 1.0, 0.0), Err(OracleError::InvalidStep(_))));
        assert!(matches!(rk4_integrate(&m, &y0, -1.0, 0.1), Err(OracleError::InvalidEndTime(_))));
        assert!(matches!(rk4_integrate(&m, &y0, 1e3, 1e-6), Err(OracleError::TooManySteps(_))));
    }

    #[test]
    fn free_motion() {
        let l = DMatrix::zeros(2, 2);
        let x0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let v0 = CVector::from_vec(vec![c(0.5, 0.0), c(-2.0, 0.0)]);
        let (x, v) = wave_integrate(&l, &x0, &v0, 3.0, 1e-2).unwrap();
        let want = &x0 + &v0 * c(3.0, 0.0);
        assert!(max_abs(&(x - want)) < 1e-12);
        assert!(max_abs(&(v - v0)) < 1e-12);
    }

    #[test]
    fn k2_eigenmode() {
        let ops = k2_ops();
        let x0 = CVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let (x, _) = wave_integrate(&ops.laplacian, &x0, &CVector::zeros(2), 1.0, 1e-3).unwrap();
        let want = &x0 * c((SQRT_2).cos(), 0.0);
        assert!(max_abs(&(x - want)) < 1e-8);
    }

    #[test]
    fn sqrt_oracle_matches_closed_form() {
        for g in [six_node_network(), generate(GraphKind::Path, 3, 1.0).unwrap()] {
            let ops = build_operators(&g);
            let root = principal_sqrt(&ops.laplacian).unwrap();
            assert!((&root * &root - &ops.laplacian).amax() < 1e-12);
            let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
            let spectral = crate::spectral::sqrt_from_spectrum(&sd).unwrap();
            assert!((root - spectral).amax() < 1e-10);
        }
    }

    #[test]
    fn projector_for_directed_laplacian() {
        let l = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -2.0, 3.0, -1.0, 0.0, -3.0, 3.0]);
        let p = zero_mode_projector(&l).unwrap();
        assert!((&p * &p - &p).amax() < 1e-12);
        assert!((&l * &p).amax() < 1e-12);
        assert!((&p * &l).amax() < 1e-12);
        let root = principal_sqrt(&l).unwrap();
        assert!((&root * &root - &l).amax() < 1e-10);
    }

    #[test]
    fn rk4_fourth_order_on_k2() {
        let ops = k2_ops();
        let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
        let init = SpinorState::new(
            CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
            CVector::from_vec(vec![c(0.0, 0.0), c(0.5, -0.5)]),
        );
        let t = 4.0;
        let exact = BosonSolver::new(&sd).evolve(&init, t).pack();
        let gen = boson_generator(&principal_sqrt(&ops.laplacian).unwrap());
        let err = |h: f64| max_abs(&(rk4_integrate(&gen, &init.pack(), t, h).unwrap() - &exact));
        let ratio = err(0.1) / err(0.05);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn p3_fermion_against_rk4() {
        let ops = build_operators(&generate(GraphKind::Path, 3, 1.0).unwrap());
        let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
        let init = SpinorState::new(
            CVector::from_vec(vec![c(0.2, -0.1), c(0.9, 0.3), c(-0.4, 0.0)]),
            CVector::from_vec(vec![c(0.0, 0.7), c(-0.3, 0.2), c(0.5, -0.6)]),
        );
        let closed = FermionSolver::new(&ops, &sd).evolve(&init, 1.0).pack();
        let rk = rk4_integrate(&fermion_generator(&ops), &init.pack(), 1.0, RK4_STEP).unwrap();
        assert!(max_abs(&(closed - rk)) < 1e-6);
    }

    #[test]
    fn boson_wave_matches_integrator() {
        let ops = build_operators(&generate(GraphKind::Path, 3, 1.0).unwrap());
        let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
        let init = SpinorState::new(
            CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.5), c(0.0, 0.0)]),
            CVector::from_vec(vec![c(0.0, 0.0), c(0.25, 0.0), c(-1.0, 0.0)]),
        );
        let v0 = wave_initial_velocity(SolverTag::Boson, &ops, &init, ZeroModeSine::Exact).unwrap();
        let (x, _) = wave_integrate(&ops.laplacian, &init.sum(), &v0, 2.0, 1e-3).unwrap();
        let closed = BosonSolver::new(&sd).evolve(&init, 2.0).sum();
        assert!(max_abs(&(x - closed)) < 1e-6);
    }

    #[test]
    fn residuals_pass_and_detect_faults() {
        let ops = k2_ops();
        let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
        let init = SpinorState::from_real(&DVector::from_vec(vec![1.0, 0.0]));
        let solver = BosonSolver::new(&sd);
        let times = linspace(0.0, 5.0, 11);
        let mut traj = solver.trajectory(&init, &times).unwrap();
        let rep = residual_check(&traj, &solver, &ops, Equation::Wave, WAVE_STEP, WAVE_TOL).unwrap();
        assert!(rep.pass, "{rep:?}");
        let again =
            residual_check(&traj, &solver, &ops, Equation::Wave, WAVE_STEP, WAVE_TOL).unwrap();
        assert_eq!(rep.max_residual, again.max_residual);

        traj.states[3].plus[0] += c(1e-2, 0.0);
        let bad = residual_check(&traj, &solver, &ops, Equation::Wave, WAVE_STEP, WAVE_TOL).unwrap();
        assert!(!bad.pass);
    }

    #[test]
    fn p3_fermion_residual() {
        let ops = build_operators(&generate(GraphKind::Path, 3, 1.0).unwrap());
        let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
        let init = SpinorState::new(
            CVector::from_vec(vec![c(0.2, -0.1), c(0.9, 0.3), c(-0.4, 0.0)]),
            CVector::from_vec(vec![c(0.0, 0.7), c(-0.3, 0.2), c(0.5, -0.6)]),
        );
        let solver = FermionSolver::new(&ops, &sd);
        let traj = solver.trajectory(&init, &[0.5, 1.0, 2.0, 5.0]).unwrap();
        for (eq, h, tol) in [
            (Equation::Fermion, FIRST_ORDER_STEP, FIRST_ORDER_TOL),
            (Equation::Wave, WAVE_STEP, WAVE_TOL),
            (Equation::CoupledPlus, WAVE_STEP, WAVE_TOL),
            (Equation::CoupledMinus, WAVE_STEP, WAVE_TOL),
        ] {
            let rep = residual_check(&traj, &solver, &ops, eq, h, tol).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn pseudoinverse_rule_breaks_fermion_equation() {
        let ops = build_operators(&generate(GraphKind::Path, 3, 1.0).unwrap());
        let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
        // √D (x⁺ - x⁻) has a component along the constant vector
        let init = SpinorState::new(
            CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            CVector::zeros(3),
        );
        let solver = FermionSolver::new(&ops, &sd).with_zero_mode(ZeroModeSine::Pseudoinverse);
        let traj = solver.trajectory(&init, &[1.0]).unwrap();
        let first = residual_check(&traj, &solver, &ops, Equation::Fermion, 1e-4, 1e-6).unwrap();
        assert!(!first.pass);
        // the second-order relations still hold
        let wave = residual_check(&traj, &solver, &ops, Equation::Wave, 1e-3, 1e-5).unwrap();
        assert!(wave.pass);
        let plus = residual_check(&traj, &solver, &ops, Equation::CoupledPlus, 1e-3, 1e-5).unwrap();
        assert!(plus.pass);
    }

    #[test]
    fn oracle_trajectory_on_grid() {
        let ops = build_operators(&six_node_network());
        let sd = eigendecompose(&ops.laplacian, true, DEFAULT_ZERO_TOL).unwrap();
        let init = SpinorState::from_real(&DVector::from_fn(6, |i, _| i as f64 * 0.2));
        let times = [0.0, 0.35, 1.0];
        let rk = integrate_trajectory(&fermion_generator(&ops), &init, &times, RK4_STEP).unwrap();
        let closed = FermionSolver::new(&ops, &sd).trajectory(&init, &times).unwrap();
        assert_eq!(rk.solver, SolverTag::Oracle);
        assert!(max_state_gap(&rk, &closed) < 1e-8);
    }
}
