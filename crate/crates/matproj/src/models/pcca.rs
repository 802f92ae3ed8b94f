//! Sparse probabilistic CCA by view stacking: the views share a factor `x`,
//! the stacked latent vector has a block-diagonal prior, and the E-step
//! selects coordinates under a partition matroid (per-view caps).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::SupportSet;
use crate::models::em::{
    prior_precision_of, run_em, svd_init, EmOptions, EmProblem, FreeEnergyTrace, Selector,
};
use crate::solvers::SelectionResult;

/// Noise coupling across views.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// One σ² shared by every view.
    #[default]
    Shared,
    /// One σ² per view (coordinate-ascent M-step).
    PerView,
}

#[derive(Clone, Debug)]
pub struct PccaModel {
    stacked: DMatrix<f64>,
    prior_precision: DMatrix<f64>,
    prior_log_det_precision: f64,
    view_ranges: Vec<std::ops::Range<usize>>,
    caps: Vec<usize>,
    noise_mode: NoiseMode,
}

impl PccaModel {
    /// Stacks the views column-wise and assembles the block-diagonal prior.
    /// All views must share the sample count and each prior must match its
    /// view's width.
    pub fn new(
        views: Vec<DMatrix<f64>>,
        priors: Vec<DMatrix<f64>>,
        caps: Vec<usize>,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::InvalidArgument("at least one view is required".into()));
        }
        if priors.len() != views.len() || caps.len() != views.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} views, {} priors, {} caps",
                views.len(),
                priors.len(),
                caps.len()
            )));
        }
        let n = views[0].nrows();
        for (i, v) in views.iter().enumerate() {
            if v.nrows() != n {
                return Err(Error::DimensionMismatch(format!(
                    "view {} has {} rows, expected {}",
                    i,
                    v.nrows(),
                    n
                )));
            }
            if priors[i].nrows() != v.ncols() || priors[i].ncols() != v.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "prior {} is {}x{}, view has {} columns",
                    i,
                    priors[i].nrows(),
                    priors[i].ncols(),
                    v.ncols()
                )));
            }
        }

        let total: usize = views.iter().map(DMatrix::ncols).sum();
        let mut stacked = DMatrix::zeros(n, total);
        let mut prior_cov = DMatrix::zeros(total, total);
        let mut view_ranges = Vec::with_capacity(views.len());
        let mut offset = 0;
        for (v, prior) in views.iter().zip(&priors) {
            let w = v.ncols();
            stacked.view_mut((0, offset), (n, w)).copy_from(v);
            prior_cov.view_mut((offset, offset), (w, w)).copy_from(prior);
            view_ranges.push(offset..offset + w);
            offset += w;
        }
        let (prior_precision, prior_log_det_precision) = prior_precision_of(&prior_cov)?;

        Ok(Self {
            stacked,
            prior_precision,
            prior_log_det_precision,
            view_ranges,
            caps,
            noise_mode: NoiseMode::Shared,
        })
    }

    pub fn with_noise_mode(mut self, mode: NoiseMode) -> Self {
        self.noise_mode = mode;
        self
    }

    pub fn num_views(&self) -> usize {
        self.view_ranges.len()
    }

    pub fn stacked_data(&self) -> &DMatrix<f64> {
        &self.stacked
    }

    pub fn view_ranges(&self) -> &[std::ops::Range<usize>] {
        &self.view_ranges
    }

    fn views_as_index_sets(&self) -> Vec<Vec<usize>> {
        self.view_ranges.iter().map(|r| r.clone().collect()).collect()
    }

    fn noise_blocks(&self) -> Vec<std::ops::Range<usize>> {
        match self.noise_mode {
            NoiseMode::Shared => vec![0..self.stacked.ncols()],
            NoiseMode::PerView => self.view_ranges.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PccaFit {
    /// Shared factor over samples.
    pub x: DVector<f64>,
    /// Noise variance per noise block (one entry in shared mode).
    pub sigma2: Vec<f64>,
    /// Selected support on the stacked coordinates.
    pub support: SupportSet,
    /// Per-view factors split from the stacked posterior mean.
    pub view_factors: Vec<DVector<f64>>,
    /// Per-view supports in view-local coordinates.
    pub view_supports: Vec<Vec<usize>>,
    pub selection: Option<SelectionResult>,
    pub free_energy: FreeEnergyTrace,
    pub iterations: usize,
    pub converged: bool,
}

/// EM fit of the stacked model with a multi-view E-step (per-view caps).
pub fn pcca_fit(model: &PccaModel, opts: &EmOptions) -> Result<PccaFit> {
    let views = model.views_as_index_sets();
    let noise_blocks = model.noise_blocks();
    let problem = EmProblem::new(
        &model.stacked,
        &model.prior_precision,
        model.prior_log_det_precision,
        Selector::MultiView { views: &views, caps: &model.caps },
        noise_blocks.clone(),
    );
    let init = svd_init(&model.stacked, noise_blocks.len());
    let outcome = run_em(&problem, init, opts)?;

    let (support, mean) = match &outcome.q {
        Some(q) => (q.support().clone(), q.mean_embedded().clone()),
        None => (SupportSet::empty(), DVector::zeros(model.stacked.ncols())),
    };
    let view_factors = model
        .view_ranges
        .iter()
        .map(|r| DVector::from_iterator(r.end - r.start, r.clone().map(|j| mean[j])))
        .collect();
    let view_supports = model
        .view_ranges
        .iter()
        .map(|r| {
            support
                .iter()
                .filter(|j| r.contains(j))
                .map(|j| j - r.start)
                .collect()
        })
        .collect();

    Ok(PccaFit {
        x: outcome.theta.x,
        sigma2: outcome.theta.sigma2,
        support,
        view_factors,
        view_supports,
        selection: outcome.selection,
        free_energy: outcome.free_energy,
        iterations: outcome.iterations,
        converged: outcome.converged,
    })
}
