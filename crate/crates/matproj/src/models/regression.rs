//! Group-sparse Bayesian linear regression: `y = Z β + ε` with
//! `β ~ N(0, C)`, posterior in precision form, and greedy group selection on
//! the posterior with projection onto the chosen support.

use nalgebra::{DMatrix, DVector};

use crate::constraints::GroupStructure;
use crate::error::{Error, Result};
use crate::gaussian::{condition_on_zero, GaussianDensity, SupportSet};
use crate::models::em::prior_precision_of;
use crate::objective::GroupJtildeObjective;
use crate::solvers::{greedy_partial_enum, PartialEnumOptions, SelectionResult};

#[derive(Clone, Debug)]
pub struct RegressionModel {
    design: DMatrix<f64>,
    response: DVector<f64>,
    prior_cov: DMatrix<f64>,
    noise_var: f64,
    groups: GroupStructure,
    budget: usize,
}

impl RegressionModel {
    pub fn new(
        design: DMatrix<f64>,
        response: DVector<f64>,
        prior_cov: DMatrix<f64>,
        noise_var: f64,
        groups: GroupStructure,
        budget: usize,
    ) -> Result<Self> {
        let (n, d) = (design.nrows(), design.ncols());
        if response.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "design has {} rows, response has length {}",
                n,
                response.len()
            )));
        }
        if prior_cov.nrows() != d || prior_cov.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "prior covariance is {}x{}, design has {} columns",
                prior_cov.nrows(),
                prior_cov.ncols(),
                d
            )));
        }
        if groups.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "groups over {} dims, design has {} columns",
                groups.dim(),
                d
            )));
        }
        if noise_var <= 0.0 {
            return Err(Error::NonPositiveNoiseVariance(noise_var));
        }
        Ok(Self { design, response, prior_cov, noise_var, groups, budget })
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn groups(&self) -> &GroupStructure {
        &self.groups
    }

    pub fn budget(&self) -> usize {
        self.budget
    }
}

/// Posterior of `β` in precision form:
/// `Λ = C⁻¹ + ZᵀZ / σ²`, `r = Zᵀy / σ²`.
pub fn regression_posterior(model: &RegressionModel) -> Result<GaussianDensity> {
    let (prior_precision, _) = prior_precision_of(&model.prior_cov)?;
    let zt = model.design.transpose();
    let precision = &prior_precision + (&zt * &model.design) / model.noise_var;
    let potential = (&zt * &model.response) / model.noise_var;
    GaussianDensity::from_precision(precision, potential)
}

#[derive(Clone, Debug)]
pub struct RegressionSelection {
    /// Greedy result over group ids.
    pub selection: SelectionResult,
    /// Selected coordinates (union of the chosen groups).
    pub support: SupportSet,
    /// Conditional posterior on the support, absent when nothing was
    /// selected.
    pub projected: Option<GaussianDensity>,
    /// Posterior mean of `β` embedded in the full dimension (zeros off
    /// support).
    pub coef_mean: DVector<f64>,
    pub posterior: GaussianDensity,
}

/// Greedy group selection on the regression posterior followed by projection
/// onto the selected support.
pub fn select_groups_regression(
    model: &RegressionModel,
    opts: &PartialEnumOptions,
) -> Result<RegressionSelection> {
    let posterior = regression_posterior(model)?;
    let objective = GroupJtildeObjective::new(&posterior, model.groups())?;
    let selection = greedy_partial_enum(&objective, model.groups(), model.budget, opts)?;
    let support = model.groups().expand(&selection.selected)?;

    let mut coef_mean = DVector::zeros(posterior.dim());
    let projected = if support.is_empty() {
        None
    } else {
        let cond = condition_on_zero(&posterior, &support)?;
        let mean_s = cond.mean()?;
        for (a, i) in support.iter().enumerate() {
            coef_mean[i] = mean_s[a];
        }
        Some(cond)
    };

    Ok(RegressionSelection { selection, support, projected, coef_mean, posterior })
}
