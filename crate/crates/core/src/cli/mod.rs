//! `netosc` command-line interface.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 non-real spectrum,
//! 3 verification failure.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::graph::GraphError;
use crate::operators::{
    block_offdiag_pattern, build_hamiltonian, build_operators, offdiag_pattern, OperatorSet,
    SparsityReport, SpinorBasis,
};
use crate::oracle::{
    self, Equation, OracleError, ResidualReport, FIRST_ORDER_STEP, RK4_STEP, WAVE_STEP,
};
use crate::solvers::{
    BosonSolver, FermionSolver, Propagator, SolveError, SolverTag, SpinorState, Trajectory,
};
use crate::spectral::{eigendecompose, SpectralDecomposition, SpectralError};

pub use config::{
    parse_generator, parse_init, ConfigArgs, GraphSource, InitSpec, OutputFormat, RunConfig,
    SolverChoice, Tolerances, ZeroModeArg,
};

/// Size of the perturbation applied by `--inject-fault`.
pub const FAULT_SIZE: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spectral(SpectralError::NonRealSpectrum { .. }) => 2,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "netosc", version, about = "Oscillation dynamics of users on networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Laplacian spectrum as JSON
    Spectrum(ConfigArgs),
    /// Evolve an initial state and write the trajectory (CSV or JSON)
    Simulate(ConfigArgs),
    /// Check solvers against residuals and independent integrators
    Verify(ConfigArgs),
    /// Compare off-diagonal sparsity of L, √L, the semi-normalized Laplacian and Ĥ
    Sparsity(ConfigArgs),
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum(args) => cmd_spectrum(&Prepared::new(args)?),
        Command::Simulate(args) => cmd_simulate(&Prepared::new(args)?),
        Command::Verify(args) => cmd_verify(&Prepared::new(args)?),
        Command::Sparsity(args) => cmd_sparsity(&Prepared::new(args)?),
    }
}

struct Prepared {
    cfg: RunConfig,
    ops: OperatorSet,
    sd: SpectralDecomposition,
}

impl Prepared {
    fn new(args: ConfigArgs) -> Result<Self, CliError> {
        let cfg = RunConfig::resolve(args)?;
        let graph = cfg.load_graph()?;
        let ops = build_operators(&graph);
        let sd = eigendecompose(&ops.laplacian, !graph.is_directed(), cfg.tolerances.zero)?;
        Ok(Prepared { cfg, ops, sd })
    }

    fn propagator(&self, choice: SolverChoice) -> Box<dyn Propagator + '_> {
        match choice {
            SolverChoice::Boson => Box::new(BosonSolver::new(&self.sd)),
            SolverChoice::Fermion => {
                Box::new(FermionSolver::new(&self.ops, &self.sd).with_zero_mode(self.cfg.zero_mode))
            }
        }
    }

    fn emit(&self, content: &str) -> Result<(), CliError> {
        write_output(self.cfg.out.as_deref(), content)
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_spectrum(p: &Prepared) -> Result<(), CliError> {
    p.emit(&to_json(&p.sd.spectrum())?)
}

fn cmd_simulate(p: &Prepared) -> Result<(), CliError> {
    let init = p.cfg.initial_state(&p.sd)?;
    let solver = p.propagator(p.cfg.solver.unwrap_or(SolverChoice::Boson));
    let traj = solver.trajectory(&init, &p.cfg.times())?;
    let body = match p.cfg.format {
        OutputFormat::Csv => trajectory_csv(&traj),
        OutputFormat::Json => trajectory_json(&traj)?,
    };
    p.emit(&body)
}

/// One row per (time, node); node ids are 1-based.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,node,re_plus,im_plus,re_minus,im_minus,re_sum,im_sum\n");
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let sum = state.sum();
        for i in 0..state.n() {
            let (xp, xm, x) = (state.plus[i], state.minus[i], sum[i]);
            let _ = writeln!(
                s,
                "{t},{},{},{},{},{},{},{}",
                i + 1,
                xp.re,
                xp.im,
                xm.re,
                xm.im,
                x.re,
                x.im
            );
        }
    }
    s
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    solver: SolverTag,
    times: &'a [f64],
    /// Packed spinor states `[x⁺₁, x⁻₁, x⁺₂, …]` as `[re, im]` pairs.
    states: Vec<Vec<[f64; 2]>>,
}

pub fn trajectory_json(traj: &Trajectory) -> Result<String, CliError> {
    let states = traj
        .states
        .iter()
        .map(|s| s.pack().iter().map(|z| [z.re, z.im]).collect())
        .collect();
    to_json(&TrajectoryJson { solver: traj.solver, times: &traj.times, states })
}

/// Closed-form trajectory compared with an independent integration.
#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub solver: SolverTag,
    /// `fundamental`: RK4 on the first-order equation; `wave`: RK4 on the
    /// wave equation for `x⁺ + x⁻`.
    pub reference: &'static str,
    pub max_abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub residuals: Vec<ResidualReport>,
    pub oracle: Vec<OracleComparison>,
    /// Max `|x̂_fermion - x̂_boson|` over the grid, when both solvers ran.
    pub solver_difference: Option<f64>,
    pub pass: bool,
}

fn cmd_verify(p: &Prepared) -> Result<(), CliError> {
    if p.cfg.t_start < 0.0 {
        return Err(CliError::Usage("verify needs t0 >= 0".into()));
    }
    let choices = match p.cfg.solver {
        Some(c) => vec![c],
        None => vec![SolverChoice::Boson, SolverChoice::Fermion],
    };
    let init = p.cfg.initial_state(&p.sd)?;
    let times = p.cfg.times();
    let tol = p.cfg.tolerances;

    let mut residuals = Vec::new();
    let mut comparisons = Vec::new();
    let mut clean = Vec::new();
    for choice in choices {
        let solver = p.propagator(choice);
        let traj = solver.trajectory(&init, &times)?;
        clean.push(traj.clone());
        let traj = if p.cfg.inject_fault { inject_fault(traj) } else { traj };

        let first_order = match choice {
            SolverChoice::Boson => Equation::Boson,
            SolverChoice::Fermion => Equation::Fermion,
        };
        residuals.push(oracle::residual_check(
            &traj,
            solver.as_ref(),
            &p.ops,
            Equation::Wave,
            WAVE_STEP,
            tol.wave,
        )?);
        residuals.push(oracle::residual_check(
            &traj,
            solver.as_ref(),
            &p.ops,
            first_order,
            FIRST_ORDER_STEP,
            tol.first_order,
        )?);
        if choice == SolverChoice::Fermion {
            for eq in [Equation::CoupledPlus, Equation::CoupledMinus] {
                residuals.push(oracle::residual_check(
                    &traj,
                    solver.as_ref(),
                    &p.ops,
                    eq,
                    WAVE_STEP,
                    tol.wave,
                )?);
            }
        }

        let generator = oracle::generator_for(solver.tag(), &p.ops)?;
        let reference = oracle::integrate_trajectory(&generator, &init, &times, RK4_STEP)?;
        comparisons.push(comparison(solver.tag(), "fundamental", oracle::max_state_gap(&traj, &reference), tol.oracle));

        let v0 = oracle::wave_initial_velocity(solver.tag(), &p.ops, &init, p.cfg.zero_mode)?;
        let wave = oracle::wave_trajectory(&p.ops.laplacian, &init.sum(), &v0, &times, RK4_STEP)?;
        let gap = traj
            .states
            .iter()
            .zip(&wave)
            .map(|(s, x)| (s.sum() - x).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        comparisons.push(comparison(solver.tag(), "wave", gap, tol.oracle));
    }

    let solver_difference = match clean.as_slice() {
        [a, b] => Some(oracle::max_state_gap(a, b)),
        _ => None,
    };
    let failed: Vec<String> = residuals
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}/{:?}", r.solver, r.equation).to_lowercase())
        .chain(comparisons.iter().filter(|c| !c.pass).map(|c| format!("{}/oracle-{}", c.solver, c.reference)))
        .collect();
    let report = VerifyReport {
        residuals,
        oracle: comparisons,
        solver_difference,
        pass: failed.is_empty(),
    };
    p.emit(&to_json(&report)?)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

fn comparison(solver: SolverTag, reference: &'static str, gap: f64, tolerance: f64) -> OracleComparison {
    OracleComparison { solver, reference, max_abs_diff: gap, tolerance, pass: gap <= tolerance }
}

/// Shifts `x⁺` at node 1 of the middle sample by [`FAULT_SIZE`].
fn inject_fault(mut traj: Trajectory) -> Trajectory {
    let k = traj.states.len() / 2;
    let state: &mut SpinorState = &mut traj.states[k];
    state.plus[0] += FAULT_SIZE;
    traj
}

fn cmd_sparsity(p: &Prepared) -> Result<(), CliError> {
    let ops = p.ops.clone().with_sqrt_laplacian(&p.sd)?;
    let sqrt_l = ops.sqrt_laplacian.as_ref().expect("attached above");
    let hamiltonian = build_hamiltonian(&ops, &SpinorBasis::new());
    let reports = vec![
        SparsityReport::of_matrix("L", &ops.laplacian),
        SparsityReport::of_matrix("sqrtL", sqrt_l),
        SparsityReport::of_matrix("H", &ops.semi_normalized),
        SparsityReport::of_block_matrix("Hhat", hamiltonian.matrix()),
    ];
    p.emit(&to_json(&reports)?)?;
    let l_pattern = offdiag_pattern(&ops.laplacian);
    if offdiag_pattern(&ops.semi_normalized) != l_pattern {
        return Err(CliError::Verification("H and L have different link patterns".into()));
    }
    if block_offdiag_pattern(hamiltonian.matrix()) != l_pattern {
        return Err(CliError::Verification("Hhat and L have different link patterns".into()));
    }
    Ok(())
}
