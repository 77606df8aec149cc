//! Machine-checkable reports for the decoherence and information-gain
//! inequalities.
//!
//! Given a model satisfying the mean condition `E[π_i] = p_i` and linearly
//! independent `π_i`:
//!
//! - `|ρ_ij| ≤ E[√(π_i π_j)] < √(p_i p_j)` for `i ≠ j` (off-diagonal
//!   contraction),
//! - `E[Var_π(X)] < Var_p(X)` (uncertainty reduction),
//! - `E[H(π)] < H(p)`, with `E[π_k log π_k] > p_k log p_k` per coordinate
//!   (Shannon-entropy decrease),
//!
//! and for any non-deterministic transformation the von Neumann entropy of
//! `ρ̂` is positive. Strict relations need a margin: `1e-12` absolute for
//! exact evaluation, three standard errors per witness for statistical
//! evaluation, over every seed. A violated premise yields
//! [`Verdict::Inapplicable`], which is distinct from [`Verdict::Fail`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ensemble::{self, EnsembleSummary, EstimationMode};
use crate::error::{Error, Result};
use crate::mc::Engine;
use crate::prob_space::{self, DEFAULT_INDEPENDENCE_TOL};
use crate::quantum_state::{self, entropy_term, Observable, PureState};
use crate::unravelling::{self, MeanConditionReport, PartitionModel, PhaseNoise, UnravellingModel};
use crate::C64;

/// Tolerance for the exact equality edge cases.
pub const EQUALITY_TOL: f64 = 1e-14;
/// Tolerance for `S(ρ̂) = H(p)` under full dephasing.
pub const VN_EQUALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckMode {
    Exact,
    Statistical { trials: u64, seeds: Vec<u64> },
}

impl CheckMode {
    fn estimation_modes(&self) -> Vec<EstimationMode> {
        match self {
            CheckMode::Exact => vec![EstimationMode::Exact],
            CheckMode::Statistical { trials, seeds } => seeds
                .iter()
                .map(|&seed| EstimationMode::MonteCarlo { trials: *trials, seed })
                .collect(),
        }
    }
}

/// Margin policy for strict and non-strict relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    /// Absolute margin in exact mode.
    pub exact: f64,
    /// Standard errors required for a strict statistical relation, and
    /// allowed on the mean condition.
    pub strict_sigmas: f64,
    /// Standard errors tolerated on a non-strict statistical relation.
    pub jensen_sigmas: f64,
    /// Floor on the allowed Monte Carlo deviation in the mean condition.
    pub mean_tol: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            strict_sigmas: 3.0,
            jensen_sigmas: 4.0,
            mean_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">")]
    Gt,
}

/// `left relation right`, judged with `margin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub quantity: String,
    pub left: f64,
    pub relation: Relation,
    pub right: f64,
    pub margin: f64,
    pub holds: bool,
}

impl Witness {
    /// `Le`: `left ≤ right + margin`; `Lt`: `right − left > margin`;
    /// `Gt`: `left − right > margin`; `Eq`: `|left − right| ≤ margin`.
    pub fn new(quantity: impl Into<String>, left: f64, relation: Relation, right: f64, margin: f64) -> Self {
        let holds = match relation {
            Relation::Le => left <= right + margin,
            Relation::Lt => right - left > margin,
            Relation::Gt => left - right > margin,
            Relation::Eq => (left - right).abs() <= margin,
        };
        Self {
            quantity: quantity.into(),
            left,
            relation,
            right,
            margin,
            holds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PropositionId {
    #[serde(rename = "P1_chain")]
    P1Chain,
    #[serde(rename = "P2_mean_condition")]
    P2MeanCondition,
    #[serde(rename = "P3_variance")]
    P3Variance,
    #[serde(rename = "P4_shannon")]
    P4Shannon,
    #[serde(rename = "vN_increase")]
    VonNeumann,
    #[serde(rename = "eq_maximal_information")]
    EqMaximalInformation,
    #[serde(rename = "eq_phase_only")]
    EqPhaseOnly,
    #[serde(rename = "eq_no_information")]
    EqNoInformation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub id: PropositionId,
    pub verdict: Verdict,
    /// True iff the verdict is `Pass`, i.e. every witness holds.
    pub pass: bool,
    pub mode: CheckMode,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropositionReport {
    fn new(
        id: PropositionId,
        verdict: Verdict,
        mode: CheckMode,
        witnesses: Vec<Witness>,
        note: Option<String>,
    ) -> Self {
        Self {
            id,
            verdict,
            pass: verdict == Verdict::Pass,
            mode,
            witnesses,
            note,
        }
    }

    fn judged(id: PropositionId, mode: CheckMode, witnesses: Vec<Witness>) -> Self {
        let verdict = if witnesses.iter().all(|w| w.holds) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self::new(id, verdict, mode, witnesses, None)
    }

    /// Not a failure: either passed or exempt.
    pub fn acceptable(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn witness(&self, quantity: &str) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.quantity == quantity)
    }
}

/// Linear (in)dependence of the `π_i` as random variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Independence {
    Independent,
    /// Dependent and every `π_i` is constant.
    Constant,
    Dependent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Premise {
    pub mean_condition: bool,
    pub independence: Independence,
    /// True when independence comes from the model family rather than a
    /// Gram-matrix test.
    pub asserted: bool,
}

/// Ensemble summaries for every seed of a check mode, shared by all checks.
#[derive(Debug, Clone)]
pub struct Evaluation {
    model: UnravellingModel,
    initial: PureState,
    obs: Option<Observable>,
    mode: CheckMode,
    margins: Margins,
    runs: Vec<EnsembleSummary>,
    means: Vec<MeanConditionReport>,
    premise: Premise,
}

const CONSTANT_TOL: f64 = 1e-14;

fn independence_of(model: &UnravellingModel, initial: &PureState) -> Result<(Independence, bool)> {
    match model {
        UnravellingModel::DirichletMartingale { .. } => Ok((Independence::Independent, true)),
        UnravellingModel::PhaseOnly(_) => Ok((Independence::Constant, true)),
        _ => {
            let law = unravelling::exact_law(model, initial)?;
            let first = &law.points()[0].1.pi;
            let constant = law
                .points()
                .iter()
                .all(|(_, d)| d.pi.iter().zip(first).all(|(a, b)| (a - b).abs() <= CONSTANT_TOL));
            if constant {
                return Ok((Independence::Constant, false));
            }
            let (space, rvs) = law.as_space()?;
            let g = prob_space::gram_independence(&space, &rvs, DEFAULT_INDEPENDENCE_TOL)?;
            let ind = if g.independent {
                Independence::Independent
            } else {
                Independence::Dependent
            };
            Ok((ind, false))
        }
    }
}

impl Evaluation {
    pub fn new(
        model: &UnravellingModel,
        initial: &PureState,
        obs: Option<&Observable>,
        mode: CheckMode,
    ) -> Result<Self> {
        Self::with(&Engine::from_env(), Margins::default(), model, initial, obs, mode)
    }

    pub fn with(
        engine: &Engine,
        margins: Margins,
        model: &UnravellingModel,
        initial: &PureState,
        obs: Option<&Observable>,
        mode: CheckMode,
    ) -> Result<Self> {
        if let CheckMode::Statistical { seeds, .. } = &mode {
            if seeds.is_empty() {
                return Err(Error::InvalidMode("statistical mode needs at least one seed".into()));
            }
        }
        let runs = mode
            .estimation_modes()
            .into_iter()
            .map(|m| ensemble::summarize_with(engine, model, initial, obs, m))
            .collect::<Result<Vec<_>>>()?;
        let means: Vec<_> = runs
            .iter()
            .map(|s| unravelling::mean_condition_from(s, initial, margins.mean_tol, margins.strict_sigmas))
            .collect();
        let (independence, asserted) = independence_of(model, initial)?;
        let premise = Premise {
            mean_condition: means.iter().all(|m| m.pass),
            independence,
            asserted,
        };
        Ok(Self {
            model: model.clone(),
            initial: initial.clone(),
            obs: obs.cloned(),
            mode,
            margins,
            runs,
            means,
            premise,
        })
    }

    pub fn runs(&self) -> &[EnsembleSummary] {
        &self.runs
    }

    pub fn premise(&self) -> &Premise {
        &self.premise
    }

    pub fn mode(&self) -> &CheckMode {
        &self.mode
    }

    pub fn mean_reports(&self) -> &[MeanConditionReport] {
        &self.means
    }

    fn strict_margin(&self, se: f64) -> f64 {
        if self.runs[0].is_exact() {
            self.margins.exact
        } else {
            self.margins.exact.max(self.margins.strict_sigmas * se)
        }
    }

    fn loose_margin(&self, se: f64) -> f64 {
        if self.runs[0].is_exact() {
            self.margins.exact
        } else {
            self.margins.exact.max(self.margins.jensen_sigmas * se)
        }
    }

    fn tag(&self, run: &EnsembleSummary, name: String) -> String {
        match run.seed {
            Some(seed) if self.runs.len() > 1 => format!("{name} [seed {seed}]"),
            _ => name,
        }
    }

    fn inapplicable(&self, id: PropositionId, witnesses: Vec<Witness>, note: &str) -> PropositionReport {
        PropositionReport::new(
            id,
            Verdict::Inapplicable,
            self.mode.clone(),
            witnesses,
            Some(note.into()),
        )
    }

    /// `E[π_i] = p_i` for every index and every seed.
    pub fn mean_condition(&self) -> PropositionReport {
        let mut witnesses = Vec::new();
        for (run, m) in self.runs.iter().zip(&self.means) {
            for i in 0..m.expected.len() {
                witnesses.push(Witness::new(
                    self.tag(run, format!("E[pi_{i}]")),
                    m.mean[i],
                    Relation::Eq,
                    m.expected[i],
                    m.allowed[i],
                ));
            }
        }
        PropositionReport::judged(PropositionId::P2MeanCondition, self.mode.clone(), witnesses)
    }

    /// `|ρ_ij| ≤ E[√(π_i π_j)] < √(p_i p_j)` for all `i < j`.
    pub fn decoherence_chain(&self) -> PropositionReport {
        let p = self.initial.probs();
        let n = p.len();
        let constant = self.premise.independence == Independence::Constant;
        let mut witnesses = Vec::new();
        for run in &self.runs {
            let rho = run.density.value.entries();
            let rho_se = &run.density.std_err;
            let cross = &run.cross_terms.value;
            let cross_se = &run.cross_terms.std_err;
            for i in 0..n {
                for j in (i + 1)..n {
                    let abs_se = rho_se[(i, j)].norm();
                    witnesses.push(Witness::new(
                        self.tag(run, format!("|rho_{i}{j}|")),
                        rho[(i, j)].norm(),
                        Relation::Le,
                        cross[(i, j)],
                        self.loose_margin(abs_se + cross_se[(i, j)]),
                    ));
                    let bound = (p[i] * p[j]).sqrt();
                    let name = self.tag(run, format!("E[sqrt(pi_{i} pi_{j})]"));
                    let w = match self.premise.independence {
                        Independence::Independent => Witness::new(
                            name,
                            cross[(i, j)],
                            Relation::Lt,
                            bound,
                            self.strict_margin(cross_se[(i, j)]),
                        ),
                        Independence::Constant => Witness::new(
                            name,
                            cross[(i, j)],
                            Relation::Eq,
                            bound,
                            self.loose_margin(cross_se[(i, j)]),
                        ),
                        Independence::Dependent => Witness::new(
                            name,
                            cross[(i, j)],
                            Relation::Le,
                            bound,
                            self.loose_margin(cross_se[(i, j)]),
                        ),
                    };
                    witnesses.push(w);
                }
            }
        }
        let id = PropositionId::P1Chain;
        if !self.premise.mean_condition {
            return self.inapplicable(id, witnesses, "mean condition fails");
        }
        if witnesses.iter().any(|w| !w.holds) {
            return PropositionReport::new(id, Verdict::Fail, self.mode.clone(), witnesses, None);
        }
        match self.premise.independence {
            Independence::Independent => PropositionReport::judged(id, self.mode.clone(), witnesses),
            Independence::Constant if constant => self.inapplicable(
                id,
                witnesses,
                "phase-only: cross terms equal sqrt(p_i p_j); neither information gain nor loss",
            ),
            _ => self.inapplicable(id, witnesses, "probabilities are linearly dependent"),
        }
    }

    fn strict_premise(&self, id: PropositionId, witnesses: Vec<Witness>) -> PropositionReport {
        if !self.premise.mean_condition {
            return self.inapplicable(id, witnesses, "mean condition fails");
        }
        match self.premise.independence {
            Independence::Independent => PropositionReport::judged(id, self.mode.clone(), witnesses),
            Independence::Constant => self.inapplicable(id, witnesses, "probabilities are constant"),
            Independence::Dependent => self.inapplicable(id, witnesses, "probabilities are linearly dependent"),
        }
    }

    /// `E[Var_π(X)] < Var_p(X)`.
    pub fn uncertainty_reduction(&self) -> Result<PropositionReport> {
        let obs = self
            .obs
            .as_ref()
            .ok_or_else(|| Error::InvalidMode("uncertainty reduction needs an observable".into()))?;
        let initial = quantum_state::variance(self.initial.probs(), obs)?;
        let witnesses = self
            .runs
            .iter()
            .map(|run| {
                let ev = run.expected_variance.as_ref().expect("observable supplied");
                Witness::new(
                    self.tag(run, "E[Var(X)]".into()),
                    ev.value,
                    Relation::Lt,
                    initial,
                    self.strict_margin(ev.std_err),
                )
            })
            .collect();
        Ok(self.strict_premise(PropositionId::P3Variance, witnesses))
    }

    /// `E[H(π)] < H(p)`, with the per-coordinate Jensen gaps.
    pub fn entropy_gain(&self) -> PropositionReport {
        let p = self.initial.probs();
        let h0: f64 = p.iter().map(|&x| entropy_term(x)).sum();
        let mut witnesses = Vec::new();
        for run in &self.runs {
            let es = &run.expected_shannon;
            witnesses.push(Witness::new(
                self.tag(run, "E[H(pi)]".into()),
                es.value,
                Relation::Lt,
                h0,
                self.strict_margin(es.std_err),
            ));
            for (k, &pk) in p.iter().enumerate() {
                witnesses.push(Witness::new(
                    self.tag(run, format!("E[pi_{k} log pi_{k}]")),
                    run.mean_pi_log_pi.value[k],
                    Relation::Gt,
                    -entropy_term(pk),
                    self.strict_margin(run.mean_pi_log_pi.std_err[k]),
                ));
            }
        }
        self.strict_premise(PropositionId::P4Shannon, witnesses)
    }

    /// `S(ρ̂) > S(r̂) = 0`.
    pub fn vn_entropy_increase(&self) -> Result<PropositionReport> {
        let s0 = quantum_state::vn_entropy(&quantum_state::density_of(&self.initial))?;
        let mut witnesses = Vec::new();
        for run in &self.runs {
            let rho = &run.density.value;
            let eig = rho.eigenvalues()?;
            let s = eig.iter().map(|&l| entropy_term(l)).sum::<f64>();
            witnesses.push(Witness::new(
                self.tag(run, "S(rho)".into()),
                s,
                Relation::Gt,
                s0,
                self.margins.exact,
            ));
            if !run.is_exact() {
                // |λ_max(ρ̂) − λ_max(ρ)| ≤ ‖ρ̂ − ρ‖_F
                let frob = run.density.std_err.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                witnesses.push(Witness::new(
                    self.tag(run, "1 - lambda_max(rho)".into()),
                    1.0 - eig[0],
                    Relation::Gt,
                    0.0,
                    self.margins.strict_sigmas * frob,
                ));
            }
        }
        let id = PropositionId::VonNeumann;
        if self.model.is_deterministic() {
            return Ok(self.inapplicable(id, witnesses, "deterministic transformation: averaged state stays pure"));
        }
        Ok(PropositionReport::judged(id, self.mode.clone(), witnesses))
    }
}

pub fn check_decoherence_chain(
    model: &UnravellingModel,
    initial: &PureState,
    mode: CheckMode,
) -> Result<PropositionReport> {
    Ok(Evaluation::new(model, initial, None, mode)?.decoherence_chain())
}

pub fn check_uncertainty_reduction(
    model: &UnravellingModel,
    initial: &PureState,
    obs: &Observable,
    mode: CheckMode,
) -> Result<PropositionReport> {
    Evaluation::new(model, initial, Some(obs), mode)?.uncertainty_reduction()
}

pub fn check_entropy_gain(model: &UnravellingModel, initial: &PureState, mode: CheckMode) -> Result<PropositionReport> {
    Ok(Evaluation::new(model, initial, None, mode)?.entropy_gain())
}

pub fn check_vn_entropy_increase(
    model: &UnravellingModel,
    initial: &PureState,
    mode: CheckMode,
) -> Result<PropositionReport> {
    Evaluation::new(model, initial, None, mode)?.vn_entropy_increase()
}

pub fn check_mean_condition(
    model: &UnravellingModel,
    initial: &PureState,
    mode: CheckMode,
) -> Result<PropositionReport> {
    Ok(Evaluation::new(model, initial, None, mode)?.mean_condition())
}

fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// The three equality edge cases for `initial`, on the canonical space whose
/// atoms are the basis labels weighted by `p`:
///
/// - finest partition: `ρ̂` is diagonal and equals the projective result,
/// - phase-only: cross terms equal `√(p_i p_j)`; full dephasing leaves
///   `diag(p)` with `S(ρ̂) = H(p)`,
/// - trivial partition: `ρ̂ = r̂`.
pub fn check_equality_cases(initial: &PureState) -> Result<Vec<PropositionReport>> {
    let n = initial.dim();
    let p = initial.probs();
    let labels: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let exact = EstimationMode::Exact;

    let finest = UnravellingModel::partition(PartitionModel::from_parts(
        p,
        labels.clone(),
        (0..n).map(|k| vec![k]).collect(),
    )?);
    let rho_fine = ensemble::average_density(&finest, initial, exact)?.value;
    let rho_proj = ensemble::average_density(&UnravellingModel::ProjectiveMeasurement, initial, exact)?.value;
    let maximal = vec![
        Witness::new(
            "max |rho_ij| (i != j)",
            rho_fine.max_offdiag(),
            Relation::Eq,
            0.0,
            EQUALITY_TOL,
        ),
        Witness::new(
            "max |rho - rho_projective|",
            max_abs_diff(rho_fine.entries(), rho_proj.entries()),
            Relation::Eq,
            0.0,
            EQUALITY_TOL,
        ),
    ];

    let dephase = UnravellingModel::phase_only(PhaseNoise::UniformFull)?;
    let sum = ensemble::summarize(&dephase, initial, None, exact)?;
    let mut phase = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            phase.push(Witness::new(
                format!("E[sqrt(pi_{i} pi_{j})]"),
                sum.cross_terms.value[(i, j)],
                Relation::Eq,
                (p[i] * p[j]).sqrt(),
                EQUALITY_TOL,
            ));
        }
    }
    phase.push(Witness::new(
        "max |rho_ij| (i != j), uniform phases",
        sum.density.value.max_offdiag(),
        Relation::Eq,
        0.0,
        EQUALITY_TOL,
    ));
    phase.push(Witness::new(
        "S(rho), uniform phases",
        quantum_state::vn_entropy(&sum.density.value)?,
        Relation::Eq,
        quantum_state::shannon_entropy(p)?,
        VN_EQUALITY_TOL,
    ));

    let trivial = UnravellingModel::partition(PartitionModel::from_parts(p, labels, vec![(0..n).collect()])?);
    let rho_triv = ensemble::average_density(&trivial, initial, exact)?.value;
    let r = quantum_state::density_of(initial);
    let none = vec![Witness::new(
        "max |rho - r|",
        max_abs_diff(rho_triv.entries(), r.entries()),
        Relation::Eq,
        0.0,
        EQUALITY_TOL,
    )];

    Ok(vec![
        PropositionReport::judged(PropositionId::EqMaximalInformation, CheckMode::Exact, maximal),
        PropositionReport::judged(PropositionId::EqPhaseOnly, CheckMode::Exact, phase),
        PropositionReport::judged(PropositionId::EqNoInformation, CheckMode::Exact, none),
    ])
}
