//! Bound states of the generalized Klein-Gordon oscillator in a rotating
//! Gödel-type background.
//!
//! Two couplings are supported: a Cornell profile `f(x) = A x + B/x` and a
//! linear profile `f(x) = Ξ x` combined with a position-dependent mass
//! `m(x) = m₀(1 + kc/x)`. Both radial problems reduce, after the substitution
//! `r = √ω x` and a Gaussian peel-off, to the biconfluent Heun equation; bound
//! states follow from the polynomial-truncation conditions of its Frobenius
//! series.
//!
//! The crate is organised around that pipeline:
//!
//! * [`params`] — physical parameter sets and the algebraic reduction to the
//!   four Heun parameters,
//! * [`heun`] — the generic biconfluent-Heun series engine (coefficients,
//!   evaluation, truncation diagnostics, continuant determinant),
//! * [`spectrum`] — the quantization conditions as residuals, 1-D and joint
//!   root solvers, closed-form flat-space limits, and parameter sweeps,
//! * [`wavefunction`] — radial wave-function assembly, normalization and node
//!   counting,
//! * [`oracle`] — an independent finite-difference Sturm-Liouville eigensolver
//!   used to cross-check every analytic result.
//!
//! Everything is pure and `Send + Sync`; values are immutable snapshots.

pub mod heun;
pub mod oracle;
pub mod params;
pub mod spectrum;
pub mod wavefunction;

pub use params::{
    CornellPotential, LinearPotential, ParamError, ParamSelector, ParticleParams, PdmParams,
    QuantumNumbers, ReducedProblem, Scenario, SpacetimeParams,
};
pub use spectrum::{BoundState, SolveConfig, SpectrumError};
