//! Pure states in the preferred basis, density matrices, entropies and
//! observable variance. Logarithms are natural throughout.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Smallest admissible basis probability in a [`PureState`].
pub const MIN_PROB: f64 = 1e-12;
/// Tolerance on the simplex constraint.
pub const SIMPLEX_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a [`DensityMatrix`].
pub const MIN_EIGENVALUE: f64 = -1e-10;
/// Minimum gap between observable eigenvalues.
pub const MIN_EIGEN_GAP: f64 = 1e-9;

/// `|ψ⟩ = Σ √p_k e^{iθ_k} |X_k⟩` with all `p_k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    probs: Vec<f64>,
    phases: Vec<f64>,
}

impl PureState {
    pub fn new(probs: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let n = probs.len();
        if n < 2 {
            return Err(Error::InvalidState(format!("dimension {n} < 2")));
        }
        if phases.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: phases.len(),
            });
        }
        if let Some(p) = probs.iter().find(|&&p| p < MIN_PROB || !p.is_finite()) {
            return Err(Error::InvalidState(format!(
                "probability {p} below minimum {MIN_PROB:e}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        if phases.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidState("non-finite phase".into()));
        }
        let phases = phases.into_iter().map(|t| t.rem_euclid(TAU)).collect();
        Ok(Self { probs, phases })
    }

    /// State with all phases zero.
    pub fn real(probs: Vec<f64>) -> Result<Self> {
        let n = probs.len();
        Self::new(probs, vec![0.0; n])
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::real(vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Phases reduced to `[0, 2π)`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Expansion coefficients `√p_k e^{iθ_k}`.
    pub fn amplitudes(&self) -> Vec<C64> {
        self.probs
            .iter()
            .zip(&self.phases)
            .map(|(&p, &t)| C64::from_polar(p.sqrt(), t))
            .collect()
    }
}

/// Hermitian, unit-trace, positive semidefinite `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), trace (1e-12) and positivity (−1e-10).
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidDensity(format!(
                "shape {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let dev = linalg::hermitian_deviation(&entries);
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let rho = Self { entries };
        let min = *rho.eigenvalues()?.last().expect("nonempty");
        if min < MIN_EIGENVALUE {
            return Err(Error::InvalidDensity(format!("eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_entries_unchecked(entries: DMatrix<C64>) -> Self {
        Self { entries }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(probs[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self)
    }

    /// `Σ_{i≠j} |ρ_ij|`.
    pub fn offdiag_l1(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.entries[(i, j)].norm();
                }
            }
        }
        s
    }

    /// Largest `|ρ_ij|` with `i ≠ j`.
    pub fn max_offdiag(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.entries[(i, j)].norm());
                }
            }
        }
        m
    }
}

/// Nondegenerate observable diagonal in the preferred basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    eigenvalues: Vec<f64>,
}

impl Observable {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        let mut sorted = eigenvalues.clone();
        sorted.sort_by(f64::total_cmp);
        let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap < MIN_EIGEN_GAP {
            return Err(Error::DegenerateObservable { gap });
        }
        Ok(Self { eigenvalues })
    }

    /// Eigenvalues `0, 1, …, n−1`.
    pub fn ladder(n: usize) -> Self {
        Self {
            eigenvalues: (0..n).map(|k| k as f64).collect(),
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// `r_ij = √(p_i p_j) e^{i(θ_i − θ_j)}`.
pub fn density_of(state: &PureState) -> DensityMatrix {
    let n = state.dim();
    let (p, t) = (state.probs(), state.phases());
    let entries = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(p[i], 0.0)
        } else {
            C64::from_polar((p[i] * p[j]).sqrt(), t[i] - t[j])
        }
    });
    DensityMatrix::from_entries_unchecked(entries)
}

/// Entrywise `|ρ_ij|`.
pub fn offdiag_magnitudes(rho: &DensityMatrix) -> DMatrix<f64> {
    rho.entries.map(|z| z.norm())
}

/// Eigenvalues of `ρ`, descending.
pub fn hermitian_eigenvalues(rho: &DensityMatrix) -> Result<Vec<f64>> {
    linalg::hermitian_eigenvalues(&rho.entries)
}

/// `−tr(ρ log ρ)` in nats, `0 log 0 = 0`.
pub fn vn_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = hermitian_eigenvalues(rho)?;
    if let Some(&l) = eig.iter().find(|&&l| l < MIN_EIGENVALUE) {
        return Err(Error::InvalidDensity(format!("eigenvalue {l:e}")));
    }
    Ok(eig.iter().map(|&l| entropy_term(l)).sum())
}

/// `−Σ p_k log p_k` in nats, `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(&x) = p.iter().find(|&&x| x < 0.0) {
        return Err(Error::NegativeProbability(x));
    }
    Ok(p.iter().map(|&x| entropy_term(x)).sum())
}

/// `−x log x` for `x > 0`, zero otherwise.
#[inline]
pub(crate) fn entropy_term(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// `Σ p_k x_k² − (Σ p_k x_k)²`.
pub fn variance(p: &[f64], obs: &Observable) -> Result<f64> {
    if p.len() != obs.dim() {
        return Err(Error::Dimension {
            expected: obs.dim(),
            got: p.len(),
        });
    }
    Ok(variance_unchecked(p, obs.eigenvalues()))
}

#[inline]
pub(crate) fn variance_unchecked(p: &[f64], x: &[f64]) -> f64 {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (&pk, &xk) in p.iter().zip(x) {
        m1 += pk * xk;
        m2 += pk * xk * xk;
    }
    m2 - m1 * m1
}
