//! Multivariate Gaussian densities in precision form and the log-mass set
//! objective driving support selection.
//!
//! A density is stored as the pair `(Λ, r)` with `Λ = Σ⁻¹` and `r = Λ μ`.
//! Every projection-related quantity indexes principal submatrices of `Λ`,
//! which is why the precision form is primary. The set objective is
//!
//! ```text
//! J(S)  = log p(x_{Sᶜ} = 0)          (log-mass the density puts on support S)
//! J̃(S) = J(S) − J(∅)
//!       = ½ ( r_Sᵀ Λ_S⁻¹ r_S − log det Λ_S + |S| log 2π )
//! ```
//!
//! `J̃` is normalized, monotone and submodular, and the Gaussian minimizing
//! `KL(q ‖ p)` among densities supported on `S` is the conditional
//! `p(x_S | x_{Sᶜ} = 0)`, with optimal value `−J(S)`.

use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::chol::{cholesky_packed, PackedLower};
use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check at construction.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn ln_2pi() -> f64 {
    std::f64::consts::TAU.ln()
}

/// A `d`-variate normal in precision form: precision `Λ` and potential
/// `r = Λ μ`. Immutable after construction and safe to share across threads.
#[derive(Clone, Debug)]
pub struct GaussianDensity {
    precision: DMatrix<f64>,
    potential: DVector<f64>,
    log_det_precision: OnceLock<f64>,
}

impl GaussianDensity {
    /// Builds a density from precision and potential, validating symmetry
    /// (relative `1e-10`) and positive definiteness (Cholesky succeeds).
    pub fn from_precision(precision: DMatrix<f64>, potential: DVector<f64>) -> Result<Self> {
        Self::from_precision_with_jitter(precision, potential, 0.0)
    }

    /// Same as [`from_precision`](Self::from_precision) but adds `jitter` to
    /// the diagonal first, for near-singular priors.
    pub fn from_precision_with_jitter(
        mut precision: DMatrix<f64>,
        potential: DVector<f64>,
        jitter: f64,
    ) -> Result<Self> {
        let d = potential.len();
        if precision.nrows() != d || precision.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "precision is {}x{}, potential has length {}",
                precision.nrows(),
                precision.ncols(),
                d
            )));
        }
        if jitter != 0.0 {
            for i in 0..d {
                precision[(i, i)] += jitter;
            }
        }
        check_symmetric(&precision, "precision")?;
        let chol = Cholesky::new(precision.clone())
            .ok_or(Error::NotPositiveDefinite { which: "precision" })?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let cache = OnceLock::new();
        let _ = cache.set(log_det);
        Ok(Self {
            precision,
            potential,
            log_det_precision: cache,
        })
    }

    /// Builds a density from mean and covariance.
    pub fn from_moments(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "covariance is {}x{}, mean has length {}",
                covariance.nrows(),
                covariance.ncols(),
                d
            )));
        }
        check_symmetric(&covariance, "covariance")?;
        let chol = Cholesky::new(covariance)
            .ok_or(Error::NotPositiveDefinite { which: "covariance" })?;
        let precision = chol.inverse();
        let potential = &precision * mean;
        Self::from_precision(precision, potential)
    }

    /// Internal constructor for principal submatrices of an already validated
    /// density, which are symmetric positive definite by construction.
    pub(crate) fn from_parts_unchecked(precision: DMatrix<f64>, potential: DVector<f64>) -> Self {
        Self {
            precision,
            potential,
            log_det_precision: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.potential.len()
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    pub fn potential(&self) -> &DVector<f64> {
        &self.potential
    }

    fn cholesky(&self) -> Result<Cholesky<f64, nalgebra::Dyn>> {
        Cholesky::new(self.precision.clone())
            .ok_or(Error::NotPositiveDefinite { which: "precision" })
    }

    /// The mean `μ = Λ⁻¹ r`.
    pub fn mean(&self) -> Result<DVector<f64>> {
        Ok(self.cholesky()?.solve(&self.potential))
    }

    /// The covariance `Σ = Λ⁻¹`.
    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        Ok(self.cholesky()?.inverse())
    }

    /// `log det Λ`, computed on first use and cached.
    pub fn log_det_precision(&self) -> Result<f64> {
        if let Some(v) = self.log_det_precision.get() {
            return Ok(*v);
        }
        let chol = self.cholesky()?;
        let v = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
        let _ = self.log_det_precision.set(v);
        Ok(v)
    }

    /// Log-density at the origin,
    /// `log p(0) = ½ (log det Λ − d log 2π − rᵀ Λ⁻¹ r)`.
    pub fn log_density_at_zero(&self) -> Result<f64> {
        let quad = self.potential.dot(&self.cholesky()?.solve(&self.potential));
        Ok(0.5 * (self.log_det_precision()? - self.dim() as f64 * ln_2pi() - quad))
    }
}

fn check_symmetric(m: &DMatrix<f64>, which: &'static str) -> Result<()> {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let a = m[(i, j)];
            let b = m[(j, i)];
            let scale = a.abs().max(b.abs()).max(1e-300);
            worst = worst.max((a - b).abs() / scale);
        }
    }
    if worst > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            which,
            found: worst,
            tol: SYMMETRY_TOL,
        });
    }
    Ok(())
}

/// An ordered subset of `[0, d)`; the candidate support of a sparse density.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Sorts the indices and rejects duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex { index: w[0] });
            }
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    /// The full support `{0, …, d−1}`.
    pub fn full(d: usize) -> Self {
        Self {
            indices: (0..d).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Checks every index lies in `[0, d)`.
    pub fn check_within(&self, d: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last >= d => Err(Error::IndexOutOfRange { index: last, dim: d }),
            _ => Ok(()),
        }
    }

    pub fn complement(&self, d: usize) -> Self {
        let mut out = Vec::with_capacity(d - self.indices.len());
        let mut it = self.indices.iter().peekable();
        for i in 0..d {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        Self { indices: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.indices.clone();
        out.extend_from_slice(&other.indices);
        out.sort_unstable();
        out.dedup();
        Self { indices: out }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let indices = self
            .indices
            .iter()
            .copied()
            .filter(|i| other.contains(*i))
            .collect();
        Self { indices }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

/// Closed-form `KL(q ‖ p)` between two Gaussians of equal dimension.
pub fn kl_gaussian(q: &GaussianDensity, p: &GaussianDensity) -> Result<f64> {
    let d = q.dim();
    if p.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "KL between dimensions {} and {}",
            d,
            p.dim()
        )));
    }
    let chol_q = Cholesky::new(q.precision.clone())
        .ok_or(Error::NotPositiveDefinite { which: "first (q) precision" })?;
    let chol_p = Cholesky::new(p.precision.clone())
        .ok_or(Error::NotPositiveDefinite { which: "second (p) precision" })?;

    // tr(Λ_p Σ_q) = tr(Λ_q⁻¹ Λ_p)
    let trace = chol_q.solve(&p.precision).trace();
    let mu_q = chol_q.solve(&q.potential);
    let mu_p = chol_p.solve(&p.potential);
    let delta = &mu_p - &mu_q;
    let quad = delta.dot(&(&p.precision * &delta));
    let log_det_q = q.log_det_precision()?;
    let log_det_p = p.log_det_precision()?;
    Ok(0.5 * (trace + quad - d as f64 + log_det_q - log_det_p))
}

/// The conditional density `p(x_S | x_{Sᶜ} = 0)`: precision `Λ_S`, potential
/// `r_S`. This is the information projection of `p` onto densities supported
/// on `S`. Empty supports are rejected; the projection there is the point
/// mass at zero, which has no density.
pub fn condition_on_zero(p: &GaussianDensity, s: &SupportSet) -> Result<GaussianDensity> {
    if s.is_empty() {
        return Err(Error::EmptySupport);
    }
    s.check_within(p.dim())?;
    let idx = s.as_slice();
    let k = idx.len();
    let mut precision = DMatrix::zeros(k, k);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            precision[(a, b)] = p.precision[(i, j)];
        }
    }
    let potential = DVector::from_iterator(k, idx.iter().map(|&i| p.potential[i]));
    Ok(GaussianDensity::from_parts_unchecked(precision, potential))
}

/// Cholesky of the principal submatrix `Λ_S` together with the solved vector
/// `y = L⁻¹ r_S`.
fn submatrix_factor(p: &GaussianDensity, idx: &[usize]) -> Result<(PackedLower, Vec<f64>)> {
    let k = idx.len();
    let mut sub = vec![0.0; k * k];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            sub[a * k + b] = p.precision[(i, j)];
        }
    }
    let factor =
        cholesky_packed(&sub, k).ok_or(Error::NotPositiveDefinite { which: "submatrix" })?;
    let mut y: Vec<f64> = idx.iter().map(|&i| p.potential[i]).collect();
    factor.forward_solve(&mut y);
    Ok((factor, y))
}

/// `J(S) = log p(x_{Sᶜ} = 0)`: the log marginal density of the complement
/// coordinates at zero. `J([d]) = 0` by convention and `J(∅) = log p(0)`.
pub fn log_mass_at_zero(p: &GaussianDensity, s: &SupportSet) -> Result<f64> {
    s.check_within(p.dim())?;
    if s.len() == p.dim() {
        return Ok(0.0);
    }
    let full = p.log_density_at_zero()?;
    if s.is_empty() {
        return Ok(full);
    }
    let (factor, y) = submatrix_factor(p, s.as_slice())?;
    let cond_at_zero = 0.5
        * (2.0 * factor.sum_log_diag()
            - s.len() as f64 * ln_2pi()
            - y.iter().map(|v| v * v).sum::<f64>());
    Ok(full - cond_at_zero)
}

/// `J̃(S) = ½ (r_Sᵀ Λ_S⁻¹ r_S − log det Λ_S + |S| log 2π)`, evaluated from
/// scratch by one Cholesky of `Λ_S`. `J̃(∅) = 0` exactly.
pub fn objective_jtilde(p: &GaussianDensity, s: &SupportSet) -> Result<f64> {
    s.check_within(p.dim())?;
    if s.is_empty() {
        return Ok(0.0);
    }
    let (factor, y) = submatrix_factor(p, s.as_slice())?;
    Ok(0.5
        * (y.iter().map(|v| v * v).sum::<f64>() - 2.0 * factor.sum_log_diag()
            + s.len() as f64 * ln_2pi()))
}

/// `KL(q ‖ p)` where `q` lives on the coordinates `s` of `p` and the
/// remaining coordinates are pinned to zero:
/// `E_q[log q(x_S)] − E_q[log p(x_S, 0)]`. Minimized by
/// [`condition_on_zero`], where it equals `−log_mass_at_zero(p, s)`.
pub fn restricted_kl(q: &GaussianDensity, p: &GaussianDensity, s: &SupportSet) -> Result<f64> {
    if q.dim() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "q has dimension {}, support has {} indices",
            q.dim(),
            s.len()
        )));
    }
    s.check_within(p.dim())?;
    let k = q.dim();
    let chol_q = Cholesky::new(q.precision.clone())
        .ok_or(Error::NotPositiveDefinite { which: "first (q) precision" })?;
    let sigma_q = chol_q.inverse();
    let mu_q = chol_q.solve(&q.potential);

    // E_q[log q] = −H(q)
    let neg_entropy = 0.5 * (q.log_det_precision()? - k as f64 * (ln_2pi() + 1.0));

    // E_q[log p(x_S, 0_{Sᶜ})] with x̄ the embedding of μ_q.
    let idx = s.as_slice();
    let mut lam_ss = DMatrix::zeros(k, k);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            lam_ss[(a, b)] = p.precision[(i, j)];
        }
    }
    let mut embedded = DVector::zeros(p.dim());
    for (a, &i) in idx.iter().enumerate() {
        embedded[i] = mu_q[a];
    }
    let mu_p = p.mean()?;
    let delta = &embedded - &mu_p;
    let quad = delta.dot(&(&p.precision * &delta));
    let trace = (&lam_ss * &sigma_q).trace();
    let cross = 0.5 * (p.log_det_precision()? - p.dim() as f64 * ln_2pi() - trace - quad);

    Ok(neg_entropy - cross)
}

/// Incremental evaluation state for [`marginal_gain`]: the Cholesky factor of
/// `Λ` restricted to the selected indices (in insertion order) plus the
/// solved potential. Single-owner; gains for distinct candidates may be
/// evaluated in parallel against a shared `&GainState`.
#[derive(Clone, Debug)]
pub struct GainState {
    order: Vec<usize>,
    factor: PackedLower,
    solved: Vec<f64>,
    sum_sq: f64,
    sum_log_diag: f64,
}

impl GainState {
    pub fn empty() -> Self {
        Self {
            order: Vec::new(),
            factor: PackedLower::empty(),
            solved: Vec::new(),
            sum_sq: 0.0,
            sum_log_diag: 0.0,
        }
    }

    /// Selected indices in insertion order.
    pub fn support(&self) -> &[usize] {
        &self.order
    }

    /// `J̃` of the current support, maintained incrementally.
    pub fn objective_value(&self) -> f64 {
        0.5 * (self.sum_sq - 2.0 * self.sum_log_diag + self.order.len() as f64 * ln_2pi())
    }
}

struct BlockExtension {
    l21: Vec<f64>,
    l22: PackedLower,
    y2: Vec<f64>,
    gain: f64,
}

/// Bordered-Cholesky data for appending `block` to the state, without
/// refactorizing the current support.
fn block_extension(
    p: &GaussianDensity,
    state: &GainState,
    block: &[usize],
) -> Result<BlockExtension> {
    let k = state.order.len();
    let b = block.len();
    debug_assert_eq!(state.factor.dim(), k);

    // L21: solve L11 zᵀ = Λ[block, order]ᵀ row by row.
    let mut l21 = vec![0.0; b * k];
    for (j, &bi) in block.iter().enumerate() {
        let row = &mut l21[j * k..(j + 1) * k];
        for (t, &oi) in state.order.iter().enumerate() {
            row[t] = p.precision[(bi, oi)];
        }
        state.factor.forward_solve(row);
    }

    // Schur complement Λ[block, block] − L21 L21ᵀ.
    let mut schur = vec![0.0; b * b];
    for (a, &ia) in block.iter().enumerate() {
        for (c, &ic) in block.iter().enumerate().take(a + 1) {
            let mut s = p.precision[(ia, ic)];
            let ra = &l21[a * k..a * k + k];
            let rc = &l21[c * k..c * k + k];
            for t in 0..k {
                s -= ra[t] * rc[t];
            }
            schur[a * b + c] = s;
            schur[c * b + a] = s;
        }
    }
    let l22 = cholesky_packed(&schur, b).ok_or(Error::NotPositiveDefinite { which: "submatrix" })?;

    // y2 = L22⁻¹ (r_block − L21 y1)
    let mut y2: Vec<f64> = block
        .iter()
        .enumerate()
        .map(|(j, &bi)| {
            let row = &l21[j * k..(j + 1) * k];
            let mut s = p.potential[bi];
            for t in 0..k {
                s -= row[t] * state.solved[t];
            }
            s
        })
        .collect();
    l22.forward_solve(&mut y2);

    let gain = 0.5
        * (y2.iter().map(|v| v * v).sum::<f64>() - 2.0 * l22.sum_log_diag()
            + b as f64 * ln_2pi());
    Ok(BlockExtension { l21, l22, y2, gain })
}

/// Gain only; the candidate's extension data is discarded.
pub(crate) fn block_gain(p: &GaussianDensity, state: &GainState, block: &[usize]) -> Result<f64> {
    Ok(block_extension(p, state, block)?.gain)
}

/// Gain plus the state extended by the accepted block.
pub(crate) fn block_extend(
    p: &GaussianDensity,
    state: &GainState,
    block: &[usize],
) -> Result<(f64, GainState)> {
    let ext = block_extension(p, state, block)?;
    let mut order = state.order.clone();
    order.extend_from_slice(block);
    let next = GainState {
        factor: state.factor.extended(&ext.l21, &ext.l22),
        solved: {
            let mut s = state.solved.clone();
            s.extend_from_slice(&ext.y2);
            s
        },
        sum_sq: state.sum_sq + ext.y2.iter().map(|v| v * v).sum::<f64>(),
        sum_log_diag: state.sum_log_diag + ext.l22.sum_log_diag(),
        order,
    };
    Ok((ext.gain, next))
}

/// `J̃(current ∪ block) − J̃(current)` by low-rank Cholesky extension of
/// `state`, never refactorizing from scratch. Returns the gain and the state
/// extended by the block, to be kept if the candidate is accepted.
pub fn marginal_gain(
    p: &GaussianDensity,
    current: &SupportSet,
    candidate_block: &SupportSet,
    state: &GainState,
) -> Result<(f64, GainState)> {
    current.check_within(p.dim())?;
    candidate_block.check_within(p.dim())?;
    if state.order.len() != current.len()
        || !state.order.iter().all(|&i| current.contains(i))
    {
        return Err(Error::StateMismatch);
    }
    for i in candidate_block.iter() {
        if current.contains(i) {
            return Err(Error::OverlappingBlock { index: i });
        }
    }
    block_extend(p, state, candidate_block.as_slice())
}
