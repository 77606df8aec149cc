//! Exact and Monte Carlo ensemble averages over a random transformation.
//!
//! For a model and an initial state this computes
//!
//! - `ρ_ij = E[√(π_i π_j) e^{i(φ_i − φ_j)}]`,
//! - the cross-term matrix `C_ij = E[√(π_i π_j)]`,
//! - `E[π_i]` and `E[π_i log π_i]`,
//! - `E[H(π)]` and, given an observable, `E[Var_π(X)]`.
//!
//! The exact backend sums over a [`DiscreteLaw`] in descending-weight order.
//! Phase-only models get a closed form: `π ≡ p` and independent phase kicks
//! multiply off-diagonal entries by `E[e^{iε_i}] E[e^{−iε_j}]`. The Monte
//! Carlo backend runs every trial through [`mc::Engine`] and reports
//! per-entry standard errors (real and imaginary parts separately).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{self, Engine};
use crate::quantum_state::{self, entropy_term, variance_unchecked, DensityMatrix, Observable, PureState};
use crate::unravelling::{self, DiscreteLaw, UnravellingModel};
use crate::C64;

/// How an ensemble average is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimationMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// A value with its standard error; `std_err` is all zero and `trials` is 0
/// when `exact`.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<V, S = V> {
    pub value: V,
    pub std_err: S,
    pub exact: bool,
    pub trials: u64,
}

/// Every ensemble quantity for one `(model, initial, mode)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub dim: usize,
    pub seed: Option<u64>,
    /// Standard errors packed as `re_se + i·im_se`.
    pub density: Estimate<DensityMatrix, DMatrix<C64>>,
    pub cross_terms: Estimate<DMatrix<f64>>,
    pub mean_pi: Estimate<Vec<f64>>,
    pub mean_pi_log_pi: Estimate<Vec<f64>>,
    pub expected_shannon: Estimate<f64>,
    pub expected_variance: Option<Estimate<f64>>,
}

impl EnsembleSummary {
    pub fn is_exact(&self) -> bool {
        self.density.exact
    }

    pub fn trials(&self) -> u64 {
        self.density.trials
    }
}

pub fn summarize(
    model: &UnravellingModel,
    initial: &PureState,
    obs: Option<&Observable>,
    mode: EstimationMode,
) -> Result<EnsembleSummary> {
    summarize_with(&Engine::from_env(), model, initial, obs, mode)
}

pub fn summarize_with(
    engine: &Engine,
    model: &UnravellingModel,
    initial: &PureState,
    obs: Option<&Observable>,
    mode: EstimationMode,
) -> Result<EnsembleSummary> {
    model.check_dim(initial.dim())?;
    if let Some(o) = obs {
        if o.dim() != initial.dim() {
            return Err(Error::Dimension {
                expected: initial.dim(),
                got: o.dim(),
            });
        }
    }
    match mode {
        EstimationMode::Exact => match model {
            UnravellingModel::PhaseOnly(spec) => Ok(phase_only_closed_form(spec, initial, obs)),
            _ => {
                let law = unravelling::exact_law(model, initial)?;
                Ok(summarize_law(&law, obs))
            }
        },
        EstimationMode::MonteCarlo { trials, seed } => {
            if trials < 2 {
                return Err(Error::InvalidMode(format!("{trials} trials; need at least 2")));
            }
            monte_carlo(engine, model, initial, obs, trials, seed)
        }
    }
}

/// `E[√(π_i π_j) e^{i(φ_i − φ_j)}]`.
pub fn average_density(
    model: &UnravellingModel,
    initial: &PureState,
    mode: EstimationMode,
) -> Result<Estimate<DensityMatrix, DMatrix<C64>>> {
    Ok(summarize(model, initial, None, mode)?.density)
}

/// `E[√(π_i π_j)]`.
pub fn cross_term_matrix(
    model: &UnravellingModel,
    initial: &PureState,
    mode: EstimationMode,
) -> Result<Estimate<DMatrix<f64>>> {
    Ok(summarize(model, initial, None, mode)?.cross_terms)
}

/// `E[−Σ π_k log π_k]`.
pub fn expected_shannon(model: &UnravellingModel, initial: &PureState, mode: EstimationMode) -> Result<Estimate<f64>> {
    Ok(summarize(model, initial, None, mode)?.expected_shannon)
}

/// `E[Σ π_k x_k² − (Σ π_k x_k)²]`.
pub fn expected_variance(
    model: &UnravellingModel,
    initial: &PureState,
    obs: &Observable,
    mode: EstimationMode,
) -> Result<Estimate<f64>> {
    Ok(summarize(model, initial, Some(obs), mode)?
        .expected_variance
        .expect("observable supplied"))
}

fn exact<V: Clone>(value: V, zero: V) -> Estimate<V> {
    Estimate {
        value,
        std_err: zero,
        exact: true,
        trials: 0,
    }
}

/// Exact summary of an arbitrary finitely supported law.
pub fn summarize_law(law: &DiscreteLaw, obs: Option<&Observable>) -> EnsembleSummary {
    let n = law.dim();
    let mut rho = DMatrix::<C64>::zeros(n, n);
    let mut cross = DMatrix::<f64>::zeros(n, n);
    let mut mean_pi = vec![0.0; n];
    let mut pi_log_pi = vec![0.0; n];
    let mut shannon = 0.0;
    let mut var = 0.0;

    // points are already in descending-weight order
    for (w, d) in law.points() {
        for i in 0..n {
            for j in 0..n {
                let s = (d.pi[i] * d.pi[j]).sqrt();
                cross[(i, j)] += w * s;
                rho[(i, j)] += if i == j {
                    C64::new(w * d.pi[i], 0.0)
                } else {
                    C64::from_polar(s, d.phi[i] - d.phi[j]) * *w
                };
            }
            mean_pi[i] += w * d.pi[i];
            pi_log_pi[i] -= w * entropy_term(d.pi[i]);
        }
        shannon += w * d.pi.iter().map(|&x| entropy_term(x)).sum::<f64>();
        if let Some(o) = obs {
            var += w * variance_unchecked(&d.pi, o.eigenvalues());
        }
    }

    EnsembleSummary {
        dim: n,
        seed: None,
        density: Estimate {
            value: DensityMatrix::from_entries_unchecked(rho),
            std_err: DMatrix::zeros(n, n),
            exact: true,
            trials: 0,
        },
        cross_terms: exact(cross, DMatrix::zeros(n, n)),
        mean_pi: exact(mean_pi, vec![0.0; n]),
        mean_pi_log_pi: exact(pi_log_pi, vec![0.0; n]),
        expected_shannon: exact(shannon, 0.0),
        expected_variance: obs.map(|_| exact(var, 0.0)),
    }
}

fn phase_only_closed_form(
    spec: &unravelling::PhaseSpec,
    initial: &PureState,
    obs: Option<&Observable>,
) -> EnsembleSummary {
    let n = initial.dim();
    let p = initial.probs();
    let r = quantum_state::density_of(initial);
    let chi: Vec<f64> = (0..n).map(|i| spec.noise(i).characteristic()).collect();
    let rho = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            r.get(i, i)
        } else {
            r.get(i, j) * (chi[i] * chi[j])
        }
    });
    let cross = DMatrix::from_fn(n, n, |i, j| if i == j { p[i] } else { (p[i] * p[j]).sqrt() });
    let pi_log_pi = p.iter().map(|&x| -entropy_term(x)).collect();
    let shannon = p.iter().map(|&x| entropy_term(x)).sum();

    EnsembleSummary {
        dim: n,
        seed: None,
        density: Estimate {
            value: DensityMatrix::from_entries_unchecked(rho),
            std_err: DMatrix::zeros(n, n),
            exact: true,
            trials: 0,
        },
        cross_terms: exact(cross, DMatrix::zeros(n, n)),
        mean_pi: exact(p.to_vec(), vec![0.0; n]),
        mean_pi_log_pi: exact(pi_log_pi, vec![0.0; n]),
        expected_shannon: exact(shannon, 0.0),
        expected_variance: obs.map(|o| exact(variance_unchecked(p, o.eigenvalues()), 0.0)),
    }
}

/// Offsets of each statistic inside the per-trial feature vector.
struct Layout {
    n: usize,
    with_var: bool,
}

impl Layout {
    fn re(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }
    fn im(&self, i: usize, j: usize) -> usize {
        self.n * self.n + i * self.n + j
    }
    fn cross(&self, i: usize, j: usize) -> usize {
        2 * self.n * self.n + i * self.n + j
    }
    fn pi(&self, i: usize) -> usize {
        3 * self.n * self.n + i
    }
    fn pi_log_pi(&self, i: usize) -> usize {
        3 * self.n * self.n + self.n + i
    }
    fn shannon(&self) -> usize {
        3 * self.n * self.n + 2 * self.n
    }
    fn var(&self) -> usize {
        self.shannon() + 1
    }
    fn width(&self) -> usize {
        self.shannon() + 1 + usize::from(self.with_var)
    }
}

fn monte_carlo(
    engine: &Engine,
    model: &UnravellingModel,
    initial: &PureState,
    obs: Option<&Observable>,
    trials: u64,
    seed: u64,
) -> Result<EnsembleSummary> {
    let sampler = model.sampler(initial)?;
    let n = initial.dim();
    let layout = Layout {
        n,
        with_var: obs.is_some(),
    };
    let x = obs.map(|o| o.eigenvalues().to_vec());

    let moments = engine.run(trials, layout.width(), |t, out| {
        let mut pi = vec![0.0; n];
        let mut phi = vec![0.0; n];
        sampler.draw_into(seed, t, &mut pi, &mut phi);
        for i in 0..n {
            for j in 0..n {
                let s = (pi[i] * pi[j]).sqrt();
                out[layout.cross(i, j)] = s;
                if i == j {
                    out[layout.re(i, i)] = pi[i];
                    out[layout.im(i, i)] = 0.0;
                } else {
                    let z = C64::from_polar(s, phi[i] - phi[j]);
                    out[layout.re(i, j)] = z.re;
                    out[layout.im(i, j)] = z.im;
                }
            }
            out[layout.pi(i)] = pi[i];
            out[layout.pi_log_pi(i)] = -entropy_term(pi[i]);
        }
        out[layout.shannon()] = pi.iter().map(|&v| entropy_term(v)).sum();
        if let Some(x) = &x {
            out[layout.var()] = variance_unchecked(&pi, x);
        }
    });

    Ok(from_moments(&moments, &layout, trials, seed))
}

fn sampled<V>(value: V, std_err: V, trials: u64) -> Estimate<V> {
    Estimate {
        value,
        std_err,
        exact: false,
        trials,
    }
}

fn from_moments(m: &mc::Moments, l: &Layout, trials: u64, seed: u64) -> EnsembleSummary {
    let n = l.n;
    let rho = DMatrix::from_fn(n, n, |i, j| C64::new(m.mean[l.re(i, j)], m.mean[l.im(i, j)]));
    let rho_se = DMatrix::from_fn(n, n, |i, j| C64::new(m.std_err(l.re(i, j)), m.std_err(l.im(i, j))));
    let cross = DMatrix::from_fn(n, n, |i, j| m.mean[l.cross(i, j)]);
    let cross_se = DMatrix::from_fn(n, n, |i, j| m.std_err(l.cross(i, j)));
    let pi: Vec<f64> = (0..n).map(|i| m.mean[l.pi(i)]).collect();
    let pi_se: Vec<f64> = (0..n).map(|i| m.std_err(l.pi(i))).collect();
    let plp: Vec<f64> = (0..n).map(|i| m.mean[l.pi_log_pi(i)]).collect();
    let plp_se: Vec<f64> = (0..n).map(|i| m.std_err(l.pi_log_pi(i))).collect();

    EnsembleSummary {
        dim: n,
        seed: Some(seed),
        density: Estimate {
            value: DensityMatrix::from_entries_unchecked(rho),
            std_err: rho_se,
            exact: false,
            trials,
        },
        cross_terms: sampled(cross, cross_se, trials),
        mean_pi: sampled(pi, pi_se, trials),
        mean_pi_log_pi: sampled(plp, plp_se, trials),
        expected_shannon: Estimate {
            value: m.mean[l.shannon()],
            std_err: m.std_err(l.shannon()),
            exact: false,
            trials,
        },
        expected_variance: l.with_var.then(|| Estimate {
            value: m.mean[l.var()],
            std_err: m.std_err(l.var()),
            exact: false,
            trials,
        }),
    }
}
