//! Monte Carlo integration in Hermite spaces on `R^s` under the standard
//! Gaussian measure.
//!
//! The library provides:
//!
//! - normalized probabilists' Hermite polynomials and Gauss-Hermite
//!   quadrature for the Gaussian probability measure ([`hermite`]),
//! - the two built-in weight families (finite smoothness and analytic),
//!   their maxima over nonzero indices and summability constants
//!   ([`space`]),
//! - reproducing-kernel machinery over Hermite coefficients: inner
//!   products, norms, synthesis, coefficient oracles and truncated kernel
//!   evaluation ([`kernel`]),
//! - the seeded Monte Carlo engine with the exact randomized error
//!   `sqrt(max_(k != 0) r(k) / n)` and replication studies that verify it
//!   ([`mc`]),
//! - information complexity `n(eps) = ceil(max r / eps^2)` and the
//!   tractability classification of weight sequences ([`tractability`]).
//!
//! Everything is deterministic: sampling derives per-replication streams
//! from a master seed with a counter-based generator, and all aggregation
//! orders are fixed, so results reproduce bit-for-bit across platforms,
//! thread counts and execution schedules.

pub mod error;
pub mod hermite;
pub mod kernel;
pub mod mc;
pub mod multi_index;
pub mod numeric;
pub mod rng;
pub mod space;
pub mod tractability;

pub use error::{Error, Result};
pub use kernel::{
    hermite_coefficient, kernel_eval, mehler_kernel, worst_case_function, CoefficientFunction,
    KernelValue, Synthesized,
};
pub use mc::{
    empirical_randomized_error, mc_estimate, sample_gaussian, theoretical_error, true_integral,
    ErrorReport, McEstimate, PointSet,
};
pub use multi_index::MultiIndex;
pub use space::{
    AnalyticSpace, FiniteSmoothnessSpace, HermiteSpace, MaxR, SpaceFamily, TailRule,
    WeightSequenceSpec,
};
pub use tractability::{
    classify_analytic, classify_finite, ec_wt_diagnostic, epsilon_exponent_fit, n_mc,
    partial_sum_diagnostic, Certificate, DiagnosticRow, EcWtRow, TractabilityVerdict,
};
