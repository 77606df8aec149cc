//! Config-driven batch runs: one JSON document in, `report.json` and an
//! optional `trajectories.csv` out.
//!
//! The report is a pure function of the config and seed list apart from the
//! final `wall_clock_seconds` field.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ensemble::{self, EnsembleSummary, EstimationMode};
use crate::error::Error;
use crate::mc::Engine;
use crate::prob_space::Partition;
use crate::quantum_state::{self, Observable, PureState};
use crate::unravelling::UnravellingModel;
use crate::verifier::{self, CheckMode, Evaluation, Margins, PropositionReport};
use crate::C64;

/// Minimum trial count accepted for Monte Carlo runs.
pub const MIN_TRIALS: u64 = 1000;
/// Seeds used when `--mode mc` overrides an exact config.
pub const DEFAULT_SEEDS: [u64; 3] = [1, 2, 3];
/// Trials used when `--mode mc` overrides an exact config.
pub const DEFAULT_TRIALS: u64 = 100_000;

pub const CSV_HEADER: &str = "setting,offdiag_l1,expected_shannon,expected_variance,vn_entropy";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub probs: Vec<f64>,
    /// Radians; all zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    Exact,
    MonteCarlo { trials: u64, seeds: Vec<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckName {
    #[serde(rename = "P1chain")]
    Chain,
    #[serde(rename = "P3")]
    Variance,
    #[serde(rename = "P4")]
    Shannon,
    #[serde(rename = "vN")]
    VonNeumann,
    #[serde(rename = "equality")]
    Equality,
    #[serde(rename = "mean_condition")]
    MeanCondition,
}

impl CheckName {
    pub const ALL: [CheckName; 6] = [
        CheckName::MeanCondition,
        CheckName::Chain,
        CheckName::Variance,
        CheckName::Shannon,
        CheckName::VonNeumann,
        CheckName::Equality,
    ];
}

fn all_checks() -> Vec<CheckName> {
    CheckName::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepConfig {
    /// Replaces the Dirichlet concentration.
    Concentration { values: Vec<f64> },
    /// Replaces the partition of a partition-conditioning model, one block
    /// list per setting.
    PartitionChain { chain: Vec<Vec<Vec<usize>>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<String>,
}

fn default_report() -> String {
    "report.json".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            report: default_report(),
            trajectories: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub initial: InitialConfig,
    /// Eigenvalues of the observable; `0, 1, …, n − 1` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Vec<f64>>,
    pub model: UnravellingModel,
    pub mode: ModeConfig,
    #[serde(default = "all_checks")]
    pub checks: Vec<CheckName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeOverride {
    Exact,
    MonteCarlo,
}

/// Command-line adjustments applied on top of a config.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub mode: Option<ModeOverride>,
    pub trials: Option<u64>,
    /// Replaces the seed list by consecutive seeds starting here, keeping its
    /// length.
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        match o.mode {
            Some(ModeOverride::Exact) => self.mode = ModeConfig::Exact,
            Some(ModeOverride::MonteCarlo) if self.mode == ModeConfig::Exact => {
                self.mode = ModeConfig::MonteCarlo {
                    trials: DEFAULT_TRIALS,
                    seeds: DEFAULT_SEEDS.to_vec(),
                }
            }
            _ => {}
        }
        if let ModeConfig::MonteCarlo { trials, seeds } = &mut self.mode {
            if let Some(t) = o.trials {
                *trials = t;
            }
            if let Some(start) = o.seed {
                let len = seeds.len().max(1) as u64;
                *seeds = (0..len).map(|k| start.wrapping_add(k)).collect();
            }
        }
    }

    pub fn state(&self) -> Result<PureState, RunError> {
        let n = self.initial.probs.len();
        let phases = self.initial.phases.clone().unwrap_or_else(|| vec![0.0; n]);
        if phases.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: phases.len(),
            }
            .into());
        }
        Ok(PureState::new(self.initial.probs.clone(), phases)?)
    }

    pub fn observable_for(&self, n: usize) -> Result<Observable, RunError> {
        match &self.observable {
            Some(ev) if ev.len() != n => Err(Error::Dimension {
                expected: n,
                got: ev.len(),
            }
            .into()),
            Some(ev) => Ok(Observable::new(ev.clone())?),
            None => Ok(Observable::ladder(n)),
        }
    }

    pub fn check_mode(&self) -> CheckMode {
        match &self.mode {
            ModeConfig::Exact => CheckMode::Exact,
            ModeConfig::MonteCarlo { trials, seeds } => CheckMode::Statistical {
                trials: *trials,
                seeds: seeds.clone(),
            },
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let state = self.state()?;
        let n = state.dim();
        self.observable_for(n)?;
        self.model.check_dim(n)?;
        if let ModeConfig::MonteCarlo { trials, seeds } = &self.mode {
            if *trials < MIN_TRIALS {
                return Err(RunError::Config(format!(
                    "monte_carlo needs at least {MIN_TRIALS} trials, got {trials}"
                )));
            }
            if seeds.is_empty() {
                return Err(RunError::Config("monte_carlo needs at least one seed".into()));
            }
        }
        if self.checks.is_empty() {
            return Err(RunError::Config("no checks requested".into()));
        }
        if let Some(sweep) = &self.sweep {
            for (_, model) in sweep_models(&self.model, sweep)? {
                model.check_dim(n)?;
            }
        }
        Ok(())
    }
}

fn sweep_models(base: &UnravellingModel, sweep: &SweepConfig) -> Result<Vec<(String, UnravellingModel)>, RunError> {
    match (sweep, base) {
        (SweepConfig::Concentration { values }, UnravellingModel::DirichletMartingale { coupling, .. }) => values
            .iter()
            .map(|&k| {
                let m = UnravellingModel::DirichletMartingale {
                    concentration: k,
                    coupling: *coupling,
                };
                m.validate()?;
                Ok((format!("kappa={k}"), m))
            })
            .collect(),
        (SweepConfig::PartitionChain { chain }, UnravellingModel::PartitionConditioning(pm)) => chain
            .iter()
            .map(|blocks| {
                let partition = Partition::from_blocks(blocks.clone(), pm.space().atom_count())?;
                let label = blocks
                    .iter()
                    .map(|b| b.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "))
                    .collect::<Vec<_>>()
                    .join("|");
                Ok((label, UnravellingModel::partition(pm.with_partition(partition)?)))
            })
            .collect(),
        (SweepConfig::Concentration { .. }, _) => Err(RunError::Config(
            "a concentration sweep needs a dirichlet_martingale model".into(),
        )),
        (SweepConfig::PartitionChain { .. }, _) => Err(RunError::Config(
            "a partition_chain sweep needs a partition_conditioning model".into(),
        )),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Library {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scalar {
    pub value: f64,
    pub std_err: f64,
}

/// Ensemble estimates for one seed. Complex entries are `[re, im]`.
#[derive(Debug, Clone, Serialize)]
pub struct RunEstimate {
    pub seed: Option<u64>,
    pub trials: u64,
    pub density: Vec<Vec<[f64; 2]>>,
    pub density_std_err: Vec<Vec<[f64; 2]>>,
    pub cross_terms: Vec<Vec<f64>>,
    pub cross_terms_std_err: Vec<Vec<f64>>,
    pub mean_pi: Vec<f64>,
    pub mean_pi_std_err: Vec<f64>,
    pub expected_shannon: Scalar,
    pub expected_variance: Option<Scalar>,
    pub offdiag_l1: f64,
    pub vn_entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InitialQuantities {
    pub shannon_entropy: f64,
    pub variance: f64,
    pub vn_entropy: f64,
    pub density: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub setting: String,
    pub offdiag_l1: f64,
    pub expected_shannon: f64,
    pub expected_variance: f64,
    pub vn_entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub library: Library,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub initial: InitialQuantities,
    pub estimates: Vec<RunEstimate>,
    pub reports: Vec<PropositionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<Vec<TrajectoryRow>>,
    pub all_passed: bool,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are finite");
        s.push('\n');
        s
    }

    /// CSV text for the sweep, if one was run.
    pub fn trajectories_csv(&self) -> Option<String> {
        let rows = self.trajectories.as_ref()?;
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.setting, r.offdiag_l1, r.expected_shannon, r.expected_variance, r.vn_entropy
            );
        }
        Some(s)
    }
}

fn complex_rows(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn real_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn run_estimate(s: &EnsembleSummary) -> Result<RunEstimate, RunError> {
    Ok(RunEstimate {
        seed: s.seed,
        trials: s.trials(),
        density: complex_rows(s.density.value.entries()),
        density_std_err: complex_rows(&s.density.std_err),
        cross_terms: real_rows(&s.cross_terms.value),
        cross_terms_std_err: real_rows(&s.cross_terms.std_err),
        mean_pi: s.mean_pi.value.clone(),
        mean_pi_std_err: s.mean_pi.std_err.clone(),
        expected_shannon: Scalar {
            value: s.expected_shannon.value,
            std_err: s.expected_shannon.std_err,
        },
        expected_variance: s.expected_variance.as_ref().map(|e| Scalar {
            value: e.value,
            std_err: e.std_err,
        }),
        offdiag_l1: s.density.value.offdiag_l1(),
        vn_entropy: quantum_state::vn_entropy(&s.density.value)?,
    })
}

/// Runs every requested check and sweep. The config must already have its
/// overrides applied.
pub fn run_experiment(config: &ExperimentConfig, engine: &Engine) -> Result<Report, RunError> {
    let start = Instant::now();
    config.validate()?;
    let state = config.state()?;
    let obs = config.observable_for(state.dim())?;
    let mode = config.check_mode();
    let eval = Evaluation::with(
        engine,
        Margins::default(),
        &config.model,
        &state,
        Some(&obs),
        mode.clone(),
    )?;

    let mut reports = Vec::new();
    for check in &config.checks {
        match check {
            CheckName::MeanCondition => reports.push(eval.mean_condition()),
            CheckName::Chain => reports.push(eval.decoherence_chain()),
            CheckName::Variance => reports.push(eval.uncertainty_reduction()?),
            CheckName::Shannon => reports.push(eval.entropy_gain()),
            CheckName::VonNeumann => reports.push(eval.vn_entropy_increase()?),
            CheckName::Equality => reports.extend(verifier::check_equality_cases(&state)?),
        }
    }

    let trajectories = match &config.sweep {
        None => None,
        Some(sweep) => {
            let emode = match &mode {
                CheckMode::Exact => EstimationMode::Exact,
                CheckMode::Statistical { trials, seeds } => EstimationMode::MonteCarlo {
                    trials: *trials,
                    seed: seeds[0],
                },
            };
            let mut rows = Vec::new();
            for (setting, model) in sweep_models(&config.model, sweep)? {
                let s = ensemble::summarize_with(engine, &model, &state, Some(&obs), emode)?;
                rows.push(TrajectoryRow {
                    setting,
                    offdiag_l1: s.density.value.offdiag_l1(),
                    expected_shannon: s.expected_shannon.value,
                    expected_variance: s.expected_variance.as_ref().map_or(f64::NAN, |e| e.value),
                    vn_entropy: quantum_state::vn_entropy(&s.density.value)?,
                });
            }
            Some(rows)
        }
    };

    let r = quantum_state::density_of(&state);
    let initial = InitialQuantities {
        shannon_entropy: quantum_state::shannon_entropy(state.probs())?,
        variance: quantum_state::variance(state.probs(), &obs)?,
        vn_entropy: quantum_state::vn_entropy(&r)?,
        density: complex_rows(r.entries()),
    };
    let estimates = eval.runs().iter().map(run_estimate).collect::<Result<Vec<_>, _>>()?;
    let seeds = match &config.mode {
        ModeConfig::Exact => Vec::new(),
        ModeConfig::MonteCarlo { seeds, .. } => seeds.clone(),
    };
    let all_passed = reports.iter().all(PropositionReport::acceptable);
    Ok(Report {
        library: Library {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        },
        config: config.clone(),
        seeds,
        initial,
        estimates,
        reports,
        trajectories,
        all_passed,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Writes `report.json` and, for sweeps with a configured path,
/// `trajectories.csv` under `dir`. Returns the paths written.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    let path = dir.join(&report.config.output.report);
    std::fs::write(&path, report.to_json()).map_err(io(&path))?;
    written.push(path);
    if let (Some(name), Some(csv)) = (&report.config.output.trajectories, report.trajectories_csv()) {
        let path = dir.join(name);
        std::fs::write(&path, csv).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
