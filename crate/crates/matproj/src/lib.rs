//! Approximate Bayesian inference by information projection of Gaussian
//! densities onto structured-sparse supports.
//!
//! The library represents a Gaussian in precision form, measures how much
//! log-mass a candidate support captures, and greedily maximizes that
//! normalized, monotone, submodular set objective under matroid or knapsack
//! constraints. On top of the solvers sit three models: group-sparse
//! Bayesian linear regression, group-sparse probabilistic PCA, and sparse
//! probabilistic CCA over stacked views.
//!
//! Candidate gains within a greedy step are evaluated against shared
//! immutable state and run in parallel via rayon when the `parallel` feature
//! (default) is enabled; a sequential fallback compiles without it. Results
//! are identical either way.

mod chol;
pub mod constraints;
pub mod error;
pub mod gaussian;
pub mod instances;
pub mod models;
pub mod objective;
pub mod solvers;

pub use constraints::{GroupStructure, PartitionConstraint, SupportConstraint};
pub use error::{Error, Result};
pub use gaussian::{
    condition_on_zero, kl_gaussian, log_mass_at_zero, marginal_gain, objective_jtilde,
    restricted_kl, GainState, GaussianDensity, SupportSet,
};
pub use objective::{GroupJtildeObjective, JtildeObjective, ModularObjective, SetObjective};
pub use solvers::{
    brute_force_max, greedy_matroid, greedy_multiview, greedy_partial_enum, reweighted_greedy,
    GreedyOptions, PartialEnumOptions, SelectionResult, TraceStep, DEFAULT_ENUMERATION_CAP,
};
