//! Variational EM engine shared by the PPCA and PCCA models.
//!
//! The generative model is `T = x wᵀ + ε` with `w ~ N(0, C)` and isotropic
//! noise (optionally one variance per column block). The E-step projects the
//! Gaussian posterior of `w` onto a structured-sparse support found by greedy
//! selection; the M-step updates `θ = {x, σ²}` in closed form. Free energy
//!
//! ```text
//! F(q, θ) = E_q[log p(T | w; θ)] + E_q[log p₀(w)] + H(q)
//!         = −KL(q ‖ p(w | T; θ)) + log p(T; θ)
//! ```
//!
//! is tracked per half-step; a candidate support replaces the previous one
//! only when it does not decrease F, which makes the whole loop coordinate
//! ascent on F.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::constraints::GroupStructure;
use crate::error::{Error, Result};
use crate::gaussian::{condition_on_zero, GaussianDensity, SupportSet};
use crate::objective::{GroupJtildeObjective, JtildeObjective};
use crate::solvers::{greedy_multiview, greedy_partial_enum, PartialEnumOptions, SelectionResult};

pub(crate) const SIGMA2_FLOOR: f64 = 1e-12;

/// Deterministic parameters of the factor model.
#[derive(Clone, Debug, PartialEq)]
pub struct Theta {
    /// Shared factor over samples.
    pub x: DVector<f64>,
    /// One noise variance per column block (a single entry in shared mode).
    pub sigma2: Vec<f64>,
}

/// A structured-sparse Gaussian: a conditional density on `support` embedded
/// in dimension `dim` with zeros elsewhere. An empty support is the point
/// mass at zero.
#[derive(Clone, Debug)]
pub struct ProjectedGaussian {
    dim: usize,
    support: SupportSet,
    density: Option<GaussianDensity>,
    /// Full-dimension mean (zeros off support).
    mean: DVector<f64>,
    /// Covariance on the support coordinates (`|S| × |S|`).
    cov: DMatrix<f64>,
}

impl ProjectedGaussian {
    /// Projects `posterior` onto `support` by conditioning the complement to
    /// zero.
    pub fn project(posterior: &GaussianDensity, support: &SupportSet) -> Result<Self> {
        let dim = posterior.dim();
        support.check_within(dim)?;
        if support.is_empty() {
            return Ok(Self {
                dim,
                support: SupportSet::empty(),
                density: None,
                mean: DVector::zeros(dim),
                cov: DMatrix::zeros(0, 0),
            });
        }
        let density = condition_on_zero(posterior, support)?;
        let cov = density.covariance()?;
        let mean_s = density.mean()?;
        let mut mean = DVector::zeros(dim);
        for (a, i) in support.iter().enumerate() {
            mean[i] = mean_s[a];
        }
        Ok(Self {
            dim,
            support: support.clone(),
            density: Some(density),
            mean,
            cov,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    /// The conditional density on the support, absent for the empty support
    /// (point mass at zero).
    pub fn density(&self) -> Option<&GaussianDensity> {
        self.density.as_ref()
    }

    pub fn mean_embedded(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov_on_support(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Second moment `μᵀμ + tr Σ` restricted to the columns in `range`.
    fn second_moment_in(&self, range: &std::ops::Range<usize>) -> f64 {
        let mut s = 0.0;
        for (a, i) in self.support.iter().enumerate() {
            if range.contains(&i) {
                s += self.mean[i] * self.mean[i] + self.cov[(a, a)];
            }
        }
        s
    }

    fn entropy(&self) -> Result<f64> {
        match &self.density {
            None => Ok(0.0),
            Some(d) => {
                let k = d.dim() as f64;
                Ok(0.5 * (k * (crate::gaussian::ln_2pi() + 1.0) - d.log_det_precision()?))
            }
        }
    }
}

/// Free-energy values per half-step: `(E₁, M₁, E₂, M₂, …)`.
pub type FreeEnergyTrace = Vec<f64>;

#[derive(Clone, Debug)]
pub struct EmOptions {
    pub max_iters: usize,
    /// Stop once the free energy changes by less than this between
    /// successive iterations.
    pub tol: f64,
    pub solver: PartialEnumOptions,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self { max_iters: 50, tol: 1e-8, solver: PartialEnumOptions::default() }
    }
}

/// E-step support selection strategy.
pub(crate) enum Selector<'a> {
    GroupKnapsack { groups: &'a GroupStructure, budget: usize },
    MultiView { views: &'a [Vec<usize>], caps: &'a [usize] },
}

/// Preprocessed model data shared across EM iterations.
pub(crate) struct EmProblem<'a> {
    pub data: &'a DMatrix<f64>,
    pub prior_precision: &'a DMatrix<f64>,
    pub prior_log_det_precision: f64,
    pub selector: Selector<'a>,
    /// Column ranges sharing one noise variance; a single full range in
    /// shared mode.
    pub noise_blocks: Vec<std::ops::Range<usize>>,
    /// `‖T[:, block]‖²_F` per noise block.
    pub block_sq_norms: Vec<f64>,
}

impl<'a> EmProblem<'a> {
    pub fn new(
        data: &'a DMatrix<f64>,
        prior_precision: &'a DMatrix<f64>,
        prior_log_det_precision: f64,
        selector: Selector<'a>,
        noise_blocks: Vec<std::ops::Range<usize>>,
    ) -> Self {
        let block_sq_norms = noise_blocks
            .iter()
            .map(|r| data.columns(r.start, r.end - r.start).iter().map(|v| v * v).sum())
            .collect();
        Self {
            data,
            prior_precision,
            prior_log_det_precision,
            selector,
            noise_blocks,
            block_sq_norms,
        }
    }

    /// Posterior of `w` given the data at `θ`:
    /// `Λ = C⁻¹ + (‖x‖²/σ²)·I`, `r = Tᵀx / σ²` (block-wise in per-view
    /// noise mode).
    pub fn posterior(&self, theta: &Theta) -> Result<GaussianDensity> {
        for &s2 in &theta.sigma2 {
            if s2 <= 0.0 {
                return Err(Error::NonPositiveNoiseVariance(s2));
            }
        }
        let d = self.data.ncols();
        let x_sq = theta.x.norm_squared();
        let mut precision = self.prior_precision.clone();
        let tx = self.data.transpose() * &theta.x;
        let mut potential = DVector::zeros(d);
        for (b, range) in self.noise_blocks.iter().enumerate() {
            let s2 = theta.sigma2[b];
            for j in range.clone() {
                precision[(j, j)] += x_sq / s2;
                potential[j] = tx[j] / s2;
            }
        }
        GaussianDensity::from_precision(precision, potential)
    }

    /// Greedy structured-sparse support selection on the posterior.
    pub fn select(
        &self,
        posterior: &GaussianDensity,
        solver: &PartialEnumOptions,
    ) -> Result<(SelectionResult, SupportSet)> {
        match &self.selector {
            Selector::GroupKnapsack { groups, budget } => {
                let objective = GroupJtildeObjective::new(posterior, groups)?;
                let selection = greedy_partial_enum(&objective, groups, *budget, solver)?;
                let support = groups.expand(&selection.selected)?;
                Ok((selection, support))
            }
            Selector::MultiView { views, caps } => {
                let objective = JtildeObjective::new(posterior);
                let selection =
                    greedy_multiview(&objective, views.to_vec(), caps.to_vec(), solver.greedy)?;
                let support = SupportSet::new(selection.selected.clone())?;
                Ok((selection, support))
            }
        }
    }

    /// `E_q[log p(T | w; θ)]`, the expected log-likelihood.
    pub fn expected_log_likelihood(&self, q: &ProjectedGaussian, theta: &Theta) -> f64 {
        let n = self.data.nrows() as f64;
        let x_sq = theta.x.norm_squared();
        let tx = self.data.transpose() * &theta.x;
        let mut total = 0.0;
        for (b, range) in self.noise_blocks.iter().enumerate() {
            let s2 = theta.sigma2[b];
            let db = (range.end - range.start) as f64;
            let cross: f64 = q
                .support
                .iter()
                .filter(|j| range.contains(j))
                .map(|j| tx[j] * q.mean[j])
                .sum();
            let resid = self.block_sq_norms[b] - 2.0 * cross + x_sq * q.second_moment_in(range);
            total += -0.5 * n * db * (crate::gaussian::ln_2pi() + s2.ln()) - 0.5 * resid / s2;
        }
        total
    }

    /// `E_q[log p₀(w)]` under the prior `N(0, C)`.
    fn expected_log_prior(&self, q: &ProjectedGaussian) -> f64 {
        let d = self.data.ncols() as f64;
        let mut quad = 0.0;
        let mut trace = 0.0;
        for (a, i) in q.support.iter().enumerate() {
            for (c, j) in q.support.iter().enumerate() {
                let p = self.prior_precision[(i, j)];
                quad += p * q.mean[i] * q.mean[j];
                trace += p * q.cov[(c, a)];
            }
        }
        0.5 * (self.prior_log_det_precision - d * crate::gaussian::ln_2pi() - quad - trace)
    }

    /// `F(q, θ)`.
    pub fn free_energy(&self, q: &ProjectedGaussian, theta: &Theta) -> Result<f64> {
        Ok(self.expected_log_likelihood(q, theta) + self.expected_log_prior(q) + q.entropy()?)
    }

    /// Closed-form M-step: maximizes the expected complete log-likelihood
    /// over `θ`. A degenerate posterior (zero second moment) keeps the
    /// previous `x`.
    pub fn mstep(&self, q: &ProjectedGaussian, prev_x: &DVector<f64>) -> Theta {
        let n = self.data.nrows() as f64;
        let s2m_total: f64 = self
            .noise_blocks
            .iter()
            .map(|r| q.second_moment_in(r))
            .sum();
        let x = if s2m_total == 0.0 {
            prev_x.clone()
        } else {
            self.data * &q.mean / s2m_total
        };
        let x_sq = x.norm_squared();
        let tx = self.data.transpose() * &x;
        let sigma2 = self
            .noise_blocks
            .iter()
            .enumerate()
            .map(|(b, range)| {
                let db = (range.end - range.start) as f64;
                let cross: f64 = q
                    .support
                    .iter()
                    .filter(|j| range.contains(j))
                    .map(|j| tx[j] * q.mean[j])
                    .sum();
                let resid =
                    self.block_sq_norms[b] - 2.0 * cross + x_sq * q.second_moment_in(range);
                (resid / (n * db)).max(SIGMA2_FLOOR)
            })
            .collect();
        Theta { x, sigma2 }
    }
}

/// Result of one E-step.
pub(crate) struct EstepState {
    pub selection: SelectionResult,
    pub q: ProjectedGaussian,
    pub free_energy: f64,
}

/// One guarded E-step at fixed `θ`: greedy selection proposes a support, and
/// it replaces `prev_support` only when the projected free energy does not
/// decrease.
pub(crate) fn estep(
    problem: &EmProblem<'_>,
    theta: &Theta,
    prev_support: Option<&SupportSet>,
    solver: &PartialEnumOptions,
) -> Result<EstepState> {
    let posterior = problem.posterior(theta)?;
    let (selection, support) = problem.select(&posterior, solver)?;
    let q_cand = ProjectedGaussian::project(&posterior, &support)?;
    let f_cand = problem.free_energy(&q_cand, theta)?;
    match prev_support {
        Some(prev) if *prev != support => {
            let q_prev = ProjectedGaussian::project(&posterior, prev)?;
            let f_prev = problem.free_energy(&q_prev, theta)?;
            if f_cand >= f_prev {
                Ok(EstepState { selection, q: q_cand, free_energy: f_cand })
            } else {
                Ok(EstepState { selection, q: q_prev, free_energy: f_prev })
            }
        }
        _ => Ok(EstepState { selection, q: q_cand, free_energy: f_cand }),
    }
}

pub(crate) struct EmOutcome {
    pub theta: Theta,
    pub q: Option<ProjectedGaussian>,
    pub selection: Option<SelectionResult>,
    pub free_energy: FreeEnergyTrace,
    pub iterations: usize,
    pub converged: bool,
}

/// Alternates guarded E-steps with closed-form M-steps until `|ΔF| < tol`
/// or `max_iters`.
pub(crate) fn run_em(
    problem: &EmProblem<'_>,
    init: Theta,
    opts: &EmOptions,
) -> Result<EmOutcome> {
    let mut theta = init;
    let mut trace: FreeEnergyTrace = Vec::new();
    let mut q_last: Option<ProjectedGaussian> = None;
    let mut selection_last: Option<SelectionResult> = None;
    let mut last_f = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for iter in 1..=opts.max_iters {
        iterations = iter;
        let prev_support = q_last.as_ref().map(|q| q.support().clone());
        let e = estep(problem, &theta, prev_support.as_ref(), &opts.solver)?;
        if !e.free_energy.is_finite() {
            return Err(Error::FreeEnergyDiverged { iter, trace });
        }
        trace.push(e.free_energy);
        let accepted_candidate = prev_support.as_ref() != Some(e.q.support());
        if accepted_candidate || selection_last.is_none() {
            selection_last = Some(e.selection);
        }

        let new_theta = problem.mstep(&e.q, &theta.x);
        let f_m = problem.free_energy(&e.q, &new_theta)?;
        if !f_m.is_finite() {
            return Err(Error::FreeEnergyDiverged { iter, trace });
        }
        trace.push(f_m);

        theta = new_theta;
        q_last = Some(e.q);
        if last_f.is_finite() && (f_m - last_f).abs() < opts.tol {
            converged = true;
            break;
        }
        last_f = f_m;
    }

    Ok(EmOutcome {
        theta,
        q: q_last,
        selection: selection_last,
        free_energy: trace,
        iterations,
        converged,
    })
}

/// Deterministic initialization: `x` is the first left singular vector scaled
/// by its singular value (sign fixed by the largest-magnitude entry), `σ²`
/// the residual variance.
pub(crate) fn svd_init(data: &DMatrix<f64>, noise_blocks: usize) -> Theta {
    let n = data.nrows();
    let d = data.ncols();
    let svd = data.clone().svd(true, false);
    let sv = &svd.singular_values;
    let mut x = DVector::zeros(n);
    if !sv.is_empty() && sv[0] > 0.0 {
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let mut u1: DVector<f64> = u.column(0).into_owned();
        let mut arg = 0;
        for i in 1..n {
            if u1[i].abs() > u1[arg].abs() {
                arg = i;
            }
        }
        if u1[arg] < 0.0 {
            u1 = -u1;
        }
        x = u1 * sv[0];
    }
    let residual: f64 = sv.iter().skip(1).map(|s| s * s).sum();
    let sigma2 = (residual / (n as f64 * d as f64)).max(SIGMA2_FLOOR);
    Theta { x, sigma2: vec![sigma2; noise_blocks] }
}

/// Prior in precision form with its log-determinant, from a covariance.
pub(crate) fn prior_precision_of(cov: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let chol = Cholesky::new(cov.clone()).ok_or(Error::NotPositiveDefinite { which: "prior covariance" })?;
    let log_det_cov = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    Ok((chol.inverse(), -log_det_cov))
}

pub mod ppca {
    //! Group-sparse probabilistic PCA: `T = x wᵀ + ε` with a group-sparse
    //! latent factor `w` selected by knapsack-constrained greedy projection
    //! in the variational E-step.

    use super::*;

    #[derive(Clone, Debug)]
    pub struct PpcaModel {
        data: DMatrix<f64>,
        prior_precision: DMatrix<f64>,
        prior_log_det_precision: f64,
        groups: GroupStructure,
        budget: usize,
        theta: Theta,
    }

    impl PpcaModel {
        /// Builds the model and initializes `θ` deterministically from the
        /// data (rank-1 SVD).
        pub fn new(
            data: DMatrix<f64>,
            prior_cov: &DMatrix<f64>,
            groups: GroupStructure,
            budget: usize,
        ) -> Result<Self> {
            let d = data.ncols();
            if groups.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "groups over {} dims, data has {} columns",
                    groups.dim(),
                    d
                )));
            }
            if prior_cov.nrows() != d || prior_cov.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "prior covariance is {}x{}, data has {} columns",
                    prior_cov.nrows(),
                    prior_cov.ncols(),
                    d
                )));
            }
            let (prior_precision, prior_log_det_precision) = prior_precision_of(prior_cov)?;
            let theta = svd_init(&data, 1);
            Ok(Self {
                data,
                prior_precision,
                prior_log_det_precision,
                groups,
                budget,
                theta,
            })
        }

        /// Overrides the initial `θ = {x, σ²}`.
        pub fn with_theta(mut self, x: DVector<f64>, sigma2: f64) -> Result<Self> {
            if x.len() != self.data.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "factor has length {}, data has {} rows",
                    x.len(),
                    self.data.nrows()
                )));
            }
            if sigma2 <= 0.0 {
                return Err(Error::NonPositiveNoiseVariance(sigma2));
            }
            self.theta = Theta { x, sigma2: vec![sigma2] };
            Ok(self)
        }

        pub fn data(&self) -> &DMatrix<f64> {
            &self.data
        }

        pub fn groups(&self) -> &GroupStructure {
            &self.groups
        }

        pub fn budget(&self) -> usize {
            self.budget
        }

        pub fn theta(&self) -> &Theta {
            &self.theta
        }

        pub(crate) fn problem(&self) -> EmProblem<'_> {
            EmProblem::new(
                &self.data,
                &self.prior_precision,
                self.prior_log_det_precision,
                Selector::GroupKnapsack { groups: &self.groups, budget: self.budget },
                vec![0..self.data.ncols()],
            )
        }
    }

    pub struct EstepOutcome {
        pub posterior: GaussianDensity,
        pub selection: SelectionResult,
        pub q: ProjectedGaussian,
    }

    /// E-step at the model's current `θ`: posterior, greedy group selection
    /// and projection onto the selected support.
    pub fn ppca_estep(model: &PpcaModel, solver: &PartialEnumOptions) -> Result<EstepOutcome> {
        let problem = model.problem();
        let posterior = problem.posterior(&model.theta)?;
        let (selection, support) = problem.select(&posterior, solver)?;
        let q = ProjectedGaussian::project(&posterior, &support)?;
        Ok(EstepOutcome { posterior, selection, q })
    }

    #[derive(Clone, Debug, PartialEq)]
    pub struct MstepUpdate {
        pub x: DVector<f64>,
        pub sigma2: f64,
    }

    /// Closed-form M-step given a projected posterior:
    /// `x ← Tμ / (μᵀμ + tr Σ)`,
    /// `σ² ← (‖T‖² − 2xᵀTμ + ‖x‖²(μᵀμ + tr Σ)) / (n d)`.
    pub fn ppca_mstep(model: &PpcaModel, q: &ProjectedGaussian) -> Result<MstepUpdate> {
        if q.dim() != model.data.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "posterior dimension {} vs data columns {}",
                q.dim(),
                model.data.ncols()
            )));
        }
        let problem = model.problem();
        let theta = problem.mstep(q, &model.theta.x);
        Ok(MstepUpdate { x: theta.x, sigma2: theta.sigma2[0] })
    }

    /// `F(q, θ) = −KL(q ‖ p(w | T; θ)) + log p(T; θ)` via the Gaussian
    /// closed forms.
    pub fn ppca_free_energy(
        model: &PpcaModel,
        q: &ProjectedGaussian,
        x: &DVector<f64>,
        sigma2: f64,
    ) -> Result<f64> {
        if sigma2 <= 0.0 {
            return Err(Error::NonPositiveNoiseVariance(sigma2));
        }
        let problem = model.problem();
        problem.free_energy(q, &Theta { x: x.clone(), sigma2: vec![sigma2] })
    }

    #[derive(Clone, Debug)]
    pub struct PpcaFit {
        pub x: DVector<f64>,
        pub sigma2: f64,
        pub support: SupportSet,
        /// Latent factor posterior mean embedded in the full dimension.
        pub factor_mean: DVector<f64>,
        pub selection: Option<SelectionResult>,
        pub free_energy: FreeEnergyTrace,
        pub iterations: usize,
        pub converged: bool,
    }

    /// Full EM fit from the model's initial `θ`.
    pub fn ppca_em(model: &PpcaModel, opts: &EmOptions) -> Result<PpcaFit> {
        let problem = model.problem();
        let outcome = run_em(&problem, model.theta.clone(), opts)?;
        let (support, factor_mean) = match &outcome.q {
            Some(q) => (q.support().clone(), q.mean_embedded().clone()),
            None => (SupportSet::empty(), DVector::zeros(model.data.ncols())),
        };
        Ok(PpcaFit {
            x: outcome.theta.x,
            sigma2: outcome.theta.sigma2[0],
            support,
            factor_mean,
            selection: outcome.selection,
            free_energy: outcome.free_energy,
            iterations: outcome.iterations,
            converged: outcome.converged,
        })
    }
}
