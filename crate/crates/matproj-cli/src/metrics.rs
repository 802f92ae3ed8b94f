//! Evaluation metrics: R², support-recovery AUC, variance-explained ratio,
//! normalized cross-variance, and the thresholded Bayes-factor rule for
//! picking the sparsity level from a greedy trace.

use nalgebra::{DMatrix, DVector};

use crate::error::{CliError, Result};

/// `1 − SS_res / SS_tot`. The truth must have nonzero variance.
pub fn metric_r2(y_true: &DVector<f64>, y_pred: &DVector<f64>) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(CliError::Metric(format!(
            "length mismatch: {} vs {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mean = y_true.mean();
    let ss_tot: f64 = y_true.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Err(CliError::Metric("zero-variance truth in R²".into()));
    }
    let ss_res: f64 = y_true
        .iter()
        .zip(y_pred.iter())
        .map(|(t, p)| (t - p) * (t - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Rank-based AUC for recovering the true nonzeros from selection scores,
/// with midranks on ties. Both classes must be present.
pub fn metric_support_auc(truth: &[bool], scores: &[f64]) -> Result<f64> {
    if truth.len() != scores.len() {
        return Err(CliError::Metric(format!(
            "length mismatch: {} vs {}",
            truth.len(),
            scores.len()
        )));
    }
    let positives = truth.iter().filter(|&&t| t).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(CliError::Metric("support AUC needs both classes present".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }
    let rank_sum: f64 = truth
        .iter()
        .zip(&ranks)
        .filter(|(&t, _)| t)
        .map(|(_, &r)| r)
        .sum();
    let n_pos = positives as f64;
    Ok((rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * negatives as f64))
}

/// `(vᵀTᵀTv) / Σᵢσᵢ²` for the unit-normalized factor `v`; the data should be
/// centered column-wise.
pub fn metric_variance_explained(t: &DMatrix<f64>, factor: &DVector<f64>) -> Result<f64> {
    if factor.len() != t.ncols() {
        return Err(CliError::Metric(format!(
            "factor has length {}, data has {} columns",
            factor.len(),
            t.ncols()
        )));
    }
    let norm = factor.norm();
    if norm == 0.0 {
        return Err(CliError::Metric("zero factor in variance-explained".into()));
    }
    let total = t.norm_squared();
    if total == 0.0 {
        return Err(CliError::Metric("zero data matrix in variance-explained".into()));
    }
    let v = factor / norm;
    Ok((t * v).norm_squared() / total)
}

/// Normalized cross-variance `uᵀXᵀYv / (‖Xu‖·‖Yv‖)`. With
/// `paper_literal = true` the denominator is the literal
/// `|uᵀXu|·|vᵀYv|`, which requires square views.
pub fn metric_cross_variance(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
    paper_literal: bool,
) -> Result<f64> {
    if x.nrows() != y.nrows() || u.len() != x.ncols() || v.len() != y.ncols() {
        return Err(CliError::Metric("inconsistent shapes in cross-variance".into()));
    }
    let xu = x * u;
    let yv = y * v;
    let numer = xu.dot(&yv);
    let denom = if paper_literal {
        if x.nrows() != x.ncols() || y.nrows() != y.ncols() {
            return Err(CliError::Metric(
                "paper-literal cross-variance needs square views (uᵀXu)".into(),
            ));
        }
        (u.dot(&(x * u))).abs() * (v.dot(&(y * v))).abs()
    } else {
        xu.norm() * yv.norm()
    };
    if denom == 0.0 {
        return Err(CliError::Metric("zero denominator in cross-variance".into()));
    }
    Ok(numer / denom)
}

/// Default evidence threshold: ln 10 ("strong" on the usual Bayes-factor
/// scale).
pub const DEFAULT_LOG_BF_THRESHOLD: f64 = std::f64::consts::LN_10;

/// The largest greedy step whose marginal gain (the log Bayes factor of the
/// expanded against the current support) exceeds the threshold; 0 when no
/// step does.
pub fn estimate_k_bayes_factor(gains: &[f64], threshold: f64) -> Result<usize> {
    if gains.is_empty() {
        return Err(CliError::Metric("empty trace in Bayes-factor rule".into()));
    }
    Ok(gains
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &g)| g > threshold)
        .map(|(i, _)| i + 1)
        .unwrap_or(0))
}
