//! Random transformations `|ψ₀⟩ → |Ψ⟩ = Σ √π_k e^{iφ_k} |X_k⟩`.
//!
//! Four model families plus one deliberately broken stub:
//!
//! | model                    | law of `π`                               | law of `φ`             |
//! |--------------------------|------------------------------------------|------------------------|
//! | `ProjectiveMeasurement`  | vertex `e_i` with probability `p_i`      | `θ`                    |
//! | `PartitionConditioning`  | `P(X = x_i | block)` on a finite space   | `θ`                    |
//! | `PhaseOnly`              | `p` (constant)                           | `θ + ε`, `ε` per index |
//! | `DirichletMartingale`    | density `∝ Π π_i^{κ p_i − 1}`            | `θ` or `θ + γ(π − p)`  |
//! | `UniformStub`            | uniform vector, ignores `p`              | `θ`                    |
//!
//! Every family except the stub satisfies `E[π_i] = p_i`.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::ensemble::{self, EstimationMode};
use crate::error::{Error, Result};
use crate::mc;
use crate::prob_space::{self, Conditioning, FiniteProbabilitySpace, Partition, RandomVariable};
use crate::quantum_state::PureState;

/// Default Dirichlet concentration.
pub const DEFAULT_CONCENTRATION: f64 = 4.0;

/// Exact-mode tolerance for the mean condition.
pub const EXACT_MEAN_TOL: f64 = 1e-12;

/// One realization of the random transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub pi: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Distribution of the phase kick `ε` added to one basis phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseNoise {
    /// `ε ~ uniform(0, 2π)`.
    UniformFull,
    /// `ε ~ uniform(−a, a)`, `a > 0`.
    UniformSymmetric { half_width: f64 },
    /// `ε = 0`.
    Degenerate,
}

impl PhaseNoise {
    /// `E[e^{iε}]`; real for all three laws.
    pub fn characteristic(&self) -> f64 {
        match *self {
            PhaseNoise::UniformFull => 0.0,
            PhaseNoise::UniformSymmetric { half_width: a } => a.sin() / a,
            PhaseNoise::Degenerate => 1.0,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, PhaseNoise::Degenerate)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            PhaseNoise::UniformFull => TAU * rng.random::<f64>(),
            PhaseNoise::UniformSymmetric { half_width: a } => a * (2.0 * rng.random::<f64>() - 1.0),
            PhaseNoise::Degenerate => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PhaseNoise::UniformSymmetric { half_width } if !(half_width > 0.0 && half_width.is_finite()) => Err(
                Error::InvalidModel(format!("phase half-width {half_width} must be positive")),
            ),
            _ => Ok(()),
        }
    }
}

/// Phase noise for every index, either shared or given per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseSpec {
    All(PhaseNoise),
    PerIndex(Vec<PhaseNoise>),
}

impl PhaseSpec {
    pub fn noise(&self, i: usize) -> PhaseNoise {
        match self {
            PhaseSpec::All(p) => *p,
            PhaseSpec::PerIndex(v) => v[i],
        }
    }

    fn is_degenerate(&self) -> bool {
        match self {
            PhaseSpec::All(p) => p.is_degenerate(),
            PhaseSpec::PerIndex(v) => v.iter().all(PhaseNoise::is_degenerate),
        }
    }
}

/// How Dirichlet phases respond to the drawn probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseCoupling {
    #[default]
    None,
    /// `φ_i = θ_i + γ (π_i − p_i)`.
    Linear { gamma: f64 },
}

/// A finite probability space, a level assignment `X` and an information
/// partition, with the conditional probabilities precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionModel {
    space: FiniteProbabilitySpace,
    x_assignment: RandomVariable,
    partition: Partition,
    conditioning: Conditioning,
}

impl PartitionModel {
    pub fn new(space: FiniteProbabilitySpace, x_assignment: RandomVariable, partition: Partition) -> Result<Self> {
        let levels = x_assignment.levels().len();
        let conditioning = prob_space::condition(&space, &x_assignment, &partition, levels)?;
        Ok(Self {
            space,
            x_assignment,
            partition,
            conditioning,
        })
    }

    /// Builds the space from raw weights and block lists.
    pub fn from_parts(weights: &[f64], x_assignment: Vec<f64>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let space = FiniteProbabilitySpace::new(weights)?;
        let partition = Partition::new(blocks, &space)?;
        Self::new(space, RandomVariable::new(x_assignment), partition)
    }

    /// Same space and assignment, different information partition.
    pub fn with_partition(&self, partition: Partition) -> Result<Self> {
        Self::new(self.space.clone(), self.x_assignment.clone(), partition)
    }

    pub fn space(&self) -> &FiniteProbabilitySpace {
        &self.space
    }

    pub fn x_assignment(&self) -> &RandomVariable {
        &self.x_assignment
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn conditioning(&self) -> &Conditioning {
        &self.conditioning
    }

    /// Number of levels of `X`, i.e. the Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.conditioning.levels.len()
    }

    /// `P(X = x_i)`, the probabilities this model conserves.
    pub fn level_probs(&self) -> &[f64] {
        &self.conditioning.level_probs
    }
}

/// Serialized form of [`UnravellingModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    ProjectiveMeasurement,
    PartitionConditioning {
        weights: Vec<f64>,
        x_assignment: Vec<f64>,
        blocks: Vec<Vec<usize>>,
    },
    PhaseOnly {
        phases: PhaseSpec,
    },
    DirichletMartingale {
        #[serde(default = "default_concentration")]
        concentration: f64,
        #[serde(default)]
        coupling: PhaseCoupling,
    },
    UniformStub,
}

fn default_concentration() -> f64 {
    DEFAULT_CONCENTRATION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub enum UnravellingModel {
    ProjectiveMeasurement,
    PartitionConditioning(PartitionModel),
    PhaseOnly(PhaseSpec),
    DirichletMartingale {
        concentration: f64,
        coupling: PhaseCoupling,
    },
    /// Non-martingale control: `π` is uniform whatever `p` is.
    UniformStub,
}

impl TryFrom<ModelSpec> for UnravellingModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        let model = match spec {
            ModelSpec::ProjectiveMeasurement => UnravellingModel::ProjectiveMeasurement,
            ModelSpec::PartitionConditioning {
                weights,
                x_assignment,
                blocks,
            } => UnravellingModel::PartitionConditioning(PartitionModel::from_parts(&weights, x_assignment, blocks)?),
            ModelSpec::PhaseOnly { phases } => UnravellingModel::PhaseOnly(phases),
            ModelSpec::DirichletMartingale {
                concentration,
                coupling,
            } => UnravellingModel::DirichletMartingale {
                concentration,
                coupling,
            },
            ModelSpec::UniformStub => UnravellingModel::UniformStub,
        };
        model.validate()?;
        Ok(model)
    }
}

impl From<UnravellingModel> for ModelSpec {
    fn from(model: UnravellingModel) -> Self {
        match model {
            UnravellingModel::ProjectiveMeasurement => ModelSpec::ProjectiveMeasurement,
            UnravellingModel::PartitionConditioning(m) => ModelSpec::PartitionConditioning {
                weights: m.space.weights().to_vec(),
                x_assignment: m.x_assignment.values().to_vec(),
                blocks: m.partition.blocks().to_vec(),
            },
            UnravellingModel::PhaseOnly(phases) => ModelSpec::PhaseOnly { phases },
            UnravellingModel::DirichletMartingale {
                concentration,
                coupling,
            } => ModelSpec::DirichletMartingale {
                concentration,
                coupling,
            },
            UnravellingModel::UniformStub => ModelSpec::UniformStub,
        }
    }
}

impl UnravellingModel {
    pub fn dirichlet(concentration: f64) -> Result<Self> {
        let m = UnravellingModel::DirichletMartingale {
            concentration,
            coupling: PhaseCoupling::None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn phase_only(noise: PhaseNoise) -> Result<Self> {
        let m = UnravellingModel::PhaseOnly(PhaseSpec::All(noise));
        m.validate()?;
        Ok(m)
    }

    pub fn partition(model: PartitionModel) -> Self {
        UnravellingModel::PartitionConditioning(model)
    }

    /// Short tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            UnravellingModel::ProjectiveMeasurement => "projective_measurement",
            UnravellingModel::PartitionConditioning(_) => "partition_conditioning",
            UnravellingModel::PhaseOnly(_) => "phase_only",
            UnravellingModel::DirichletMartingale { .. } => "dirichlet_martingale",
            UnravellingModel::UniformStub => "uniform_stub",
        }
    }

    /// Dimension-independent parameter checks.
    pub fn validate(&self) -> Result<()> {
        match self {
            UnravellingModel::PhaseOnly(spec) => match spec {
                PhaseSpec::All(p) => p.validate(),
                PhaseSpec::PerIndex(v) => v.iter().try_for_each(PhaseNoise::validate),
            },
            UnravellingModel::DirichletMartingale {
                concentration,
                coupling,
            } => {
                if !(*concentration > 0.0 && concentration.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "concentration {concentration} must be positive"
                    )));
                }
                if let PhaseCoupling::Linear { gamma } = coupling {
                    if !gamma.is_finite() {
                        return Err(Error::InvalidModel("non-finite coupling".into()));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Checks that the model acts on states of dimension `n`.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            UnravellingModel::PartitionConditioning(m) if m.dim() != n => Err(Error::Dimension {
                expected: m.dim(),
                got: n,
            }),
            UnravellingModel::PhaseOnly(PhaseSpec::PerIndex(v)) if v.len() != n => Err(Error::Dimension {
                expected: v.len(),
                got: n,
            }),
            _ => Ok(()),
        }
    }

    /// True when the law of `π` is finitely supported.
    pub fn has_finite_support(&self) -> bool {
        !matches!(self, UnravellingModel::DirichletMartingale { .. })
    }

    /// True when every draw is the same `(π, φ)`: the averaged state stays pure.
    pub fn is_deterministic(&self) -> bool {
        match self {
            UnravellingModel::PhaseOnly(spec) => spec.is_degenerate(),
            UnravellingModel::PartitionConditioning(m) => {
                let c = &m.conditioning;
                c.block_pi.iter().all(|b| b == &c.block_pi[0])
            }
            UnravellingModel::UniformStub => true,
            _ => false,
        }
    }

    pub fn sampler<'a>(&'a self, initial: &'a PureState) -> Result<Sampler<'a>> {
        Sampler::new(self, initial)
    }
}

/// A model bound to an initial state, ready to draw.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    initial: &'a PureState,
    kind: SamplerKind<'a>,
}

#[derive(Debug, Clone)]
enum SamplerKind<'a> {
    Projective {
        cumulative: Vec<f64>,
    },
    Partition {
        model: &'a PartitionModel,
        cumulative: Vec<f64>,
    },
    Phase(&'a PhaseSpec),
    Dirichlet {
        gammas: Vec<Gamma<f64>>,
        coupling: PhaseCoupling,
    },
    Stub,
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .scan(0.0, |acc, &w| {
            *acc += w;
            Some(*acc)
        })
        .collect()
}

fn pick(cumulative: &[f64], weights: &[f64], u: f64) -> usize {
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or_else(|| weights.iter().rposition(|&w| w > 0.0).unwrap_or(0))
}

impl<'a> Sampler<'a> {
    pub fn new(model: &'a UnravellingModel, initial: &'a PureState) -> Result<Self> {
        model.validate()?;
        model.check_dim(initial.dim())?;
        let kind = match model {
            UnravellingModel::ProjectiveMeasurement => SamplerKind::Projective {
                cumulative: cumulative(initial.probs()),
            },
            UnravellingModel::PartitionConditioning(m) => SamplerKind::Partition {
                model: m,
                cumulative: cumulative(m.space.weights()),
            },
            UnravellingModel::PhaseOnly(spec) => SamplerKind::Phase(spec),
            UnravellingModel::DirichletMartingale {
                concentration,
                coupling,
            } => {
                let gammas = initial
                    .probs()
                    .iter()
                    .map(|&p| {
                        Gamma::new(concentration * p, 1.0).map_err(|e| Error::InvalidModel(format!("gamma shape: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                SamplerKind::Dirichlet {
                    gammas,
                    coupling: *coupling,
                }
            }
            UnravellingModel::UniformStub => SamplerKind::Stub,
        };
        Ok(Self { initial, kind })
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// Deterministic draw for `(seed, trial_index)`.
    pub fn draw(&self, seed: u64, trial_index: u64) -> Draw {
        let n = self.dim();
        let mut pi = vec![0.0; n];
        let mut phi = vec![0.0; n];
        self.draw_into(seed, trial_index, &mut pi, &mut phi);
        Draw { pi, phi }
    }

    /// Allocation-free form of [`Sampler::draw`].
    pub fn draw_into(&self, seed: u64, trial_index: u64, pi: &mut [f64], phi: &mut [f64]) {
        let mut rng = mc::trial_rng(seed, trial_index);
        self.draw_with(&mut rng, pi, phi);
    }

    fn draw_with(&self, rng: &mut ChaCha8Rng, pi: &mut [f64], phi: &mut [f64]) {
        let p = self.initial.probs();
        let theta = self.initial.phases();
        phi.copy_from_slice(theta);
        match &self.kind {
            SamplerKind::Projective { cumulative } => {
                let i = pick(cumulative, p, rng.random::<f64>());
                pi.fill(0.0);
                pi[i] = 1.0;
            }
            SamplerKind::Partition { model, cumulative } => {
                let atom = pick(cumulative, model.space.weights(), rng.random::<f64>());
                let block = model.partition.block_of(atom);
                pi.copy_from_slice(&model.conditioning.block_pi[block]);
            }
            SamplerKind::Phase(spec) => {
                pi.copy_from_slice(p);
                for (i, f) in phi.iter_mut().enumerate() {
                    *f += spec.noise(i).sample(rng);
                }
            }
            SamplerKind::Dirichlet { gammas, coupling } => {
                loop {
                    let mut total = 0.0;
                    for (x, g) in pi.iter_mut().zip(gammas) {
                        *x = g.sample(rng);
                        total += *x;
                    }
                    if total > 0.0 && total.is_finite() {
                        pi.iter_mut().for_each(|x| *x /= total);
                        break;
                    }
                }
                if let PhaseCoupling::Linear { gamma } = coupling {
                    for i in 0..pi.len() {
                        phi[i] += gamma * (pi[i] - p[i]);
                    }
                }
            }
            SamplerKind::Stub => pi.fill(1.0 / p.len() as f64),
        }
    }
}

/// One draw of `model` for `(seed, trial_index)`.
pub fn sample(model: &UnravellingModel, initial: &PureState, seed: u64, trial_index: u64) -> Result<Draw> {
    Ok(Sampler::new(model, initial)?.draw(seed, trial_index))
}

/// A finitely supported law of draws, sorted by descending weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaw {
    points: Vec<(f64, Draw)>,
}

impl DiscreteLaw {
    /// Validates positive weights summing to 1 within 1e-12 and equal draw
    /// dimensions; sorts by descending weight (stable).
    pub fn new(mut points: Vec<(f64, Draw)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidModel("empty law".into()));
        }
        let n = points[0].1.pi.len();
        for (w, d) in &points {
            if *w <= 0.0 || !w.is_finite() {
                return Err(Error::InvalidModel(format!("law weight {w} is not positive")));
            }
            if d.pi.len() != n || d.phi.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: d.pi.len(),
                });
            }
        }
        points.sort_by(|a, b| b.0.total_cmp(&a.0));
        let total: f64 = points.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightSum(total));
        }
        Ok(Self { points })
    }

    /// Like [`DiscreteLaw::new`] but first merges bitwise-identical draws.
    pub fn merged(points: Vec<(f64, Draw)>) -> Result<Self> {
        let mut out: Vec<(f64, Draw)> = Vec::with_capacity(points.len());
        for (w, d) in points {
            match out.iter_mut().find(|(_, e)| e == &d) {
                Some(slot) => slot.0 += w,
                None => out.push((w, d)),
            }
        }
        Self::new(out)
    }

    pub fn points(&self) -> &[(f64, Draw)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].1.pi.len()
    }

    /// The support as a probability space with `π_i` as random variables.
    pub fn as_space(&self) -> Result<(FiniteProbabilitySpace, Vec<RandomVariable>)> {
        let weights: Vec<f64> = self.points.iter().map(|(w, _)| *w).collect();
        let space = FiniteProbabilitySpace::new(&weights)?;
        let rvs = (0..self.dim())
            .map(|i| RandomVariable::new(self.points.iter().map(|(_, d)| d.pi[i]).collect()))
            .collect();
        Ok((space, rvs))
    }
}

/// Enumerates the support of a finitely supported model.
pub fn exact_law(model: &UnravellingModel, initial: &PureState) -> Result<DiscreteLaw> {
    model.validate()?;
    model.check_dim(initial.dim())?;
    let n = initial.dim();
    let p = initial.probs();
    let theta = initial.phases().to_vec();
    match model {
        UnravellingModel::ProjectiveMeasurement => DiscreteLaw::new(
            (0..n)
                .map(|i| {
                    let mut pi = vec![0.0; n];
                    pi[i] = 1.0;
                    (p[i], Draw { pi, phi: theta.clone() })
                })
                .collect(),
        ),
        UnravellingModel::PartitionConditioning(m) => {
            let c = &m.conditioning;
            DiscreteLaw::merged(
                c.block_weights
                    .iter()
                    .zip(&c.block_pi)
                    .map(|(&w, pi)| {
                        (
                            w,
                            Draw {
                                pi: pi.clone(),
                                phi: theta.clone(),
                            },
                        )
                    })
                    .collect(),
            )
        }
        UnravellingModel::PhaseOnly(spec) if spec.is_degenerate() => DiscreteLaw::new(vec![(
            1.0,
            Draw {
                pi: p.to_vec(),
                phi: theta,
            },
        )]),
        UnravellingModel::UniformStub => DiscreteLaw::new(vec![(
            1.0,
            Draw {
                pi: vec![1.0 / n as f64; n],
                phi: theta,
            },
        )]),
        UnravellingModel::PhaseOnly(_) | UnravellingModel::DirichletMartingale { .. } => Err(Error::NoFiniteSupport),
    }
}

/// Per-index outcome of a mean-condition check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanConditionReport {
    pub exact: bool,
    pub trials: u64,
    pub seed: Option<u64>,
    pub expected: Vec<f64>,
    pub mean: Vec<f64>,
    pub deviation: Vec<f64>,
    pub std_err: Vec<f64>,
    /// Allowed deviation per index.
    pub allowed: Vec<f64>,
    pub pass: bool,
}

/// Checks `E[π_i] = p_i`.
///
/// Exact mode allows `1e-12` per index. Monte Carlo mode allows
/// `max(tol, 3 standard errors)`.
pub fn verify_mean_condition(
    model: &UnravellingModel,
    initial: &PureState,
    mode: EstimationMode,
    tol: f64,
) -> Result<MeanConditionReport> {
    let summary = ensemble::summarize(model, initial, None, mode)?;
    Ok(mean_condition_from(&summary, initial, tol, 3.0))
}

pub(crate) fn mean_condition_from(
    summary: &ensemble::EnsembleSummary,
    initial: &PureState,
    tol: f64,
    sigmas: f64,
) -> MeanConditionReport {
    let est = &summary.mean_pi;
    let expected = initial.probs().to_vec();
    let deviation: Vec<f64> = est.value.iter().zip(&expected).map(|(m, p)| (m - p).abs()).collect();
    let allowed: Vec<f64> = if est.exact {
        vec![EXACT_MEAN_TOL; expected.len()]
    } else {
        est.std_err.iter().map(|se| tol.max(sigmas * se)).collect()
    };
    let pass = deviation.iter().zip(&allowed).all(|(d, a)| d <= a);
    MeanConditionReport {
        exact: est.exact,
        trials: est.trials,
        seed: summary.seed,
        expected,
        mean: est.value.clone(),
        deviation,
        std_err: est.std_err.clone(),
        allowed,
        pass,
    }
}
