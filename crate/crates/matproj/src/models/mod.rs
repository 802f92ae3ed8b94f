//! Application models built on the projection machinery: group-sparse
//! Bayesian linear regression, group-sparse probabilistic PCA, and sparse
//! probabilistic CCA (multi-view PCA with per-view selection caps).

mod em;
mod pcca;
mod regression;

pub use em::{EmOptions, FreeEnergyTrace, ProjectedGaussian, Theta};
pub use pcca::{pcca_fit, NoiseMode, PccaFit, PccaModel};
pub use regression::{
    regression_posterior, select_groups_regression, RegressionModel, RegressionSelection,
};

pub use em::ppca::{ppca_em, ppca_estep, ppca_free_energy, ppca_mstep, EstepOutcome, MstepUpdate, PpcaFit, PpcaModel};
