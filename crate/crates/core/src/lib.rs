//! # decohere
//!
//! Reduced-form decoherence models. A pure state
//! `|ψ₀⟩ = Σ √p_k e^{iθ_k} |X_k⟩` written in the eigenbasis of a
//! nondegenerate observable `X̂` is pushed through a random transformation
//! `|Ψ⟩ = Σ √π_k e^{iφ_k} |X_k⟩`, and the observer's state is the ensemble
//! average `ρ̂ = E[|Ψ⟩⟨Ψ|]`.
//!
//! The crate provides:
//!
//! - [`prob_space`]: finite probability spaces, partitions, conditional
//!   probabilities and a Gram-matrix linear-independence test.
//! - [`quantum_state`]: pure states, density matrices, von Neumann and
//!   Shannon entropies, observable variance.
//! - [`unravelling`]: the model families producing draws `(π, φ)`, with
//!   exact laws wherever the law is finitely supported.
//! - [`ensemble`]: exact and Monte Carlo estimates of `ρ̂`, the cross-term
//!   matrix `E[√(π_i π_j)]`, expected Shannon entropy and expected variance.
//! - [`verifier`]: machine-checkable reports for off-diagonal contraction,
//!   the mean condition, variance reduction, Shannon-entropy decrease, von
//!   Neumann entropy increase, and the equality edge cases.
//! - [`experiment`]: the JSON-config batch runner behind the `decohere` binary.
//!
//! Monte Carlo estimation is bit-reproducible: every trial draws from a
//! counter-based stream keyed on `(seed, trial_index)`, and per-trial
//! statistics are merged along a reduction tree whose shape depends only on
//! the trial count, never on the worker count.
//!
//! Runnable walkthroughs live in `crates/core/examples/`.

#![forbid(unsafe_code)]

pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod mc;
pub mod prob_space;
pub mod quantum_state;
pub mod unravelling;
pub mod verifier;

pub use ensemble::{EnsembleSummary, Estimate, EstimationMode};
pub use error::{Error, Result};
pub use prob_space::{FiniteProbabilitySpace, Partition, RandomVariable};
pub use quantum_state::{DensityMatrix, Observable, PureState};
pub use unravelling::{DiscreteLaw, Draw, PhaseCoupling, PhaseNoise, UnravellingModel};
pub use verifier::{CheckMode, PropositionId, PropositionReport, Verdict};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
