//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Deserialize;

use crate::graph::{self, Graph, GraphKind};
use crate::oracle::{FIRST_ORDER_TOL, ORACLE_TOL, WAVE_TOL};
use crate::solvers::{CVector, SpinorState, ZeroModeSine};
use crate::spectral::{SpectralDecomposition, DEFAULT_ZERO_TOL};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Boson,
    Fermion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroModeArg {
    Exact,
    Pseudoinverse,
}

impl From<ZeroModeArg> for ZeroModeSine {
    fn from(v: ZeroModeArg) -> Self {
        match v {
            ZeroModeArg::Exact => ZeroModeSine::Exact,
            ZeroModeArg::Pseudoinverse => ZeroModeSine::Pseudoinverse,
        }
    }
}

/// Flags shared by every subcommand. Every field is optional so that values
/// from `--config` can fill the gaps; flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// Edge-list file ("src dst weight" per line, 1-based ids)
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,

    /// Generated graph: path|cycle|complete|ring-D, as KIND:N[:W]
    #[arg(long, value_name = "KIND:N[:W]")]
    pub generate: Option<String>,

    /// Treat the edge list as directed
    #[arg(long)]
    #[serde(default)]
    pub directed: bool,

    #[arg(long, value_enum)]
    pub solver: Option<SolverChoice>,

    /// Zero-mode rule for the fermion sine term
    #[arg(long, value_enum)]
    pub zero_mode: Option<ZeroModeArg>,

    /// delta:i | uniform | eigenmode:mu | path to a JSON file
    #[arg(long, value_name = "PRESET|PATH")]
    pub init: Option<String>,

    #[arg(long)]
    pub t0: Option<f64>,

    #[arg(long)]
    pub t1: Option<f64>,

    #[arg(long)]
    pub samples: Option<usize>,

    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Eigenvalues with |λ| below this are zero modes
    #[arg(long)]
    pub tol_zero: Option<f64>,

    /// Sets every verification tolerance at once
    #[arg(long)]
    pub tol: Option<f64>,

    #[arg(long)]
    pub tol_wave: Option<f64>,

    #[arg(long)]
    pub tol_first: Option<f64>,

    #[arg(long)]
    pub tol_oracle: Option<f64>,

    /// Perturb one stored sample by 1e-2 before verification
    #[arg(long)]
    #[serde(default)]
    pub inject_fault: bool,

    /// JSON file with any of the fields above (snake_case keys)
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl ConfigArgs {
    /// `self` takes precedence over `base`.
    fn overlay(self, base: ConfigArgs) -> ConfigArgs {
        ConfigArgs {
            graph: self.graph.or(base.graph),
            generate: self.generate.or(base.generate),
            directed: self.directed || base.directed,
            solver: self.solver.or(base.solver),
            zero_mode: self.zero_mode.or(base.zero_mode),
            init: self.init.or(base.init),
            t0: self.t0.or(base.t0),
            t1: self.t1.or(base.t1),
            samples: self.samples.or(base.samples),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            tol_zero: self.tol_zero.or(base.tol_zero),
            tol: self.tol.or(base.tol),
            tol_wave: self.tol_wave.or(base.tol_wave),
            tol_first: self.tol_first.or(base.tol_first),
            tol_oracle: self.tol_oracle.or(base.tol_oracle),
            inject_fault: self.inject_fault || base.inject_fault,
            config: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Generated { kind: GraphKind, n: usize, weight: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// 1-based node
    Delta(usize),
    Uniform,
    /// 0-based mode index
    Eigenmode(usize),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub zero: f64,
    pub wave: f64,
    pub first_order: f64,
    pub oracle: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph: GraphSource,
    pub directed: bool,
    pub solver: Option<SolverChoice>,
    pub zero_mode: ZeroModeSine,
    pub init: InitSpec,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub inject_fault: bool,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn resolve(args: ConfigArgs) -> Result<Self, CliError> {
        let args = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let file: ConfigArgs = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
                args.overlay(file)
            }
            None => args,
        };

        let graph = match (args.graph, args.generate) {
            (Some(_), Some(_)) => return Err(usage("--graph and --generate are exclusive")),
            (Some(path), None) => GraphSource::File(path),
            (None, Some(spec)) => parse_generator(&spec)?,
            (None, None) => return Err(usage("one of --graph or --generate is required")),
        };
        let t_start = args.t0.unwrap_or(0.0);
        let t_end = args.t1.unwrap_or(10.0);
        let samples = args.samples.unwrap_or(11);
        if !t_start.is_finite() || !t_end.is_finite() || t_end < t_start {
            return Err(usage(format!("need finite t0 <= t1, got [{t_start}, {t_end}]")));
        }
        if samples == 0 {
            return Err(usage("samples must be >= 1"));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(usage(format!("{name} must be positive, got {v}")))
            }
        };
        let shared = args.tol;
        let tolerances = Tolerances {
            zero: positive("tol-zero", args.tol_zero.unwrap_or(DEFAULT_ZERO_TOL))?,
            wave: positive("tol-wave", args.tol_wave.or(shared).unwrap_or(WAVE_TOL))?,
            first_order: positive("tol-first", args.tol_first.or(shared).unwrap_or(FIRST_ORDER_TOL))?,
            oracle: positive("tol-oracle", args.tol_oracle.or(shared).unwrap_or(ORACLE_TOL))?,
        };
        Ok(RunConfig {
            graph,
            directed: args.directed,
            solver: args.solver,
            zero_mode: args.zero_mode.map(Into::into).unwrap_or_default(),
            init: parse_init(args.init.as_deref().unwrap_or("delta:1"))?,
            t_start,
            t_end,
            samples,
            format: args.format.unwrap_or(OutputFormat::Csv),
            out: args.out,
            tolerances,
            inject_fault: args.inject_fault,
        })
    }

    pub fn load_graph(&self) -> Result<Graph, CliError> {
        Ok(match &self.graph {
            GraphSource::File(path) => graph::load_edge_list(path, self.directed)?,
            GraphSource::Generated { kind, n, weight } => {
                if self.directed {
                    return Err(usage("--directed applies to --graph files only"));
                }
                graph::generate(*kind, *n, *weight)?
            }
        })
    }

    pub fn times(&self) -> Vec<f64> {
        crate::solvers::linspace(self.t_start, self.t_end, self.samples)
    }

    pub fn initial_state(&self, sd: &SpectralDecomposition) -> Result<SpinorState, CliError> {
        let n = sd.n();
        match &self.init {
            InitSpec::Delta(i) => {
                if *i == 0 || *i > n {
                    return Err(usage(format!("delta:{i} out of range 1..={n}")));
                }
                Ok(SpinorState::from_real(&DVector::from_fn(n, |k, _| {
                    if k + 1 == *i {
                        1.0
                    } else {
                        0.0
                    }
                })))
            }
            InitSpec::Uniform => Ok(SpinorState::from_real(&DVector::from_element(n, 1.0))),
            InitSpec::Eigenmode(mu) => {
                if *mu >= n {
                    return Err(usage(format!("eigenmode:{mu} out of range 0..{n}")));
                }
                Ok(SpinorState::from_real(&sd.p().column(*mu).into_owned()))
            }
            InitSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let file: InitFile = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("init {}: {e}", path.display())))?;
                if file.plus.len() != n || file.minus.len() != n {
                    return Err(usage(format!(
                        "init {}: expected {n} entries per half, got {} and {}",
                        path.display(),
                        file.plus.len(),
                        file.minus.len()
                    )));
                }
                let to_vec = |v: &[[f64; 2]]| {
                    CVector::from_iterator(n, v.iter().map(|&[re, im]| Complex64::new(re, im)))
                };
                Ok(SpinorState::new(to_vec(&file.plus), to_vec(&file.minus)))
            }
        }
    }
}

/// `{"plus": [[re, im], …], "minus": [[re, im], …]}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitFile {
    plus: Vec<[f64; 2]>,
    minus: Vec<[f64; 2]>,
}

pub fn parse_generator(spec: &str) -> Result<GraphSource, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(usage(format!("--generate expects KIND:N[:W], got {spec:?}")));
    }
    let kind = match parts[0] {
        "path" => GraphKind::Path,
        "cycle" => GraphKind::Cycle,
        "complete" => GraphKind::Complete,
        other => match other.strip_prefix("ring-").map(str::parse::<usize>) {
            Some(Ok(degree)) => GraphKind::RegularRing { degree },
            _ => return Err(usage(format!("unknown graph kind {other:?}"))),
        },
    };
    let n = parts[1].parse().map_err(|_| usage(format!("invalid node count {:?}", parts[1])))?;
    let weight = match parts.get(2) {
        Some(w) => w.parse().map_err(|_| usage(format!("invalid weight {w:?}")))?,
        None => 1.0,
    };
    Ok(GraphSource::Generated { kind, n, weight })
}

pub fn parse_init(spec: &str) -> Result<InitSpec, CliError> {
    if spec == "uniform" {
        return Ok(InitSpec::Uniform);
    }
    if let Some(i) = spec.strip_prefix("delta:") {
        return i.parse().map(InitSpec::Delta).map_err(|_| usage(format!("invalid preset {spec:?}")));
    }
    if let Some(mu) = spec.strip_prefix("eigenmode:") {
        return mu
            .parse()
            .map(InitSpec::Eigenmode)
            .map_err(|_| usage(format!("invalid preset {spec:?}")));
    }
    Ok(InitSpec::File(PathBuf::from(spec)))
}
