//! Return, daily-return statistics and Sharpe ratio over a net-worth path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("starting net worth must be positive, got {0}")]
    NonPositiveStart(f64),
    #[error("need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("net worth must be positive (index {0})")]
    NonPositiveValue(usize),
    #[error("standard deviation of returns is zero; Sharpe ratio undefined")]
    ZeroStd,
}

/// All percentages are in percent units (5.0 means 5%).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub total_return: f64,
    pub daily_return_mean: f64,
    /// `None` with fewer than two daily returns.
    pub daily_return_std: Option<f64>,
    /// `None` when the standard deviation is undefined or zero.
    pub sharpe_ratio: Option<f64>,
}

pub fn total_return(w_start: f64, w_end: f64) -> Result<f64, MetricsError> {
    if !(w_start > 0.0) {
        return Err(MetricsError::NonPositiveStart(w_start));
    }
    Ok((w_end - w_start) / w_start * 100.0)
}

/// Simple returns `r_t = (w_t - w_{t-1}) / w_{t-1}` as fractions.
pub fn daily_returns(net_worths: &[f64]) -> Result<Vec<f64>, MetricsError> {
    if net_worths.len() < 2 {
        return Err(MetricsError::TooShort { needed: 2, got: net_worths.len() });
    }
    if let Some(i) = net_worths.iter().position(|w| !(*w > 0.0)) {
        return Err(MetricsError::NonPositiveValue(i));
    }
    Ok(net_worths.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 divisor).
pub fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    Some(var.sqrt())
}

/// `(mean - risk_free) / std` over daily returns.
pub fn sharpe(returns: &[f64], risk_free: f64) -> Result<f64, MetricsError> {
    let sd = sample_std(returns).ok_or(MetricsError::TooShort { needed: 2, got: returns.len() })?;
    // Relative threshold: equal returns can leave rounding residue in the variance.
    let scale = returns.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if sd <= 1e-12 * scale {
        return Err(MetricsError::ZeroStd);
    }
    Ok((mean(returns) - risk_free) / sd)
}

/// Metrics for a net-worth path starting from `w_start`.
pub fn evaluate(w_start: f64, net_worths: &[f64]) -> Result<MetricsReport, MetricsError> {
    let w_end = *net_worths.last().ok_or(MetricsError::TooShort { needed: 2, got: 0 })?;
    let total = total_return(w_start, w_end)?;
    let returns = daily_returns(net_worths)?;
    Ok(MetricsReport {
        total_return: total,
        daily_return_mean: mean(&returns) * 100.0,
        daily_return_std: sample_std(&returns).map(|s| s * 100.0),
        sharpe_ratio: sharpe(&returns, 0.0).ok(),
    })
}
