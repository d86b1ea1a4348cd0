//! Constant-offset fits of numeric series against analytic predictions.

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeCheck {
    pub fitted: f64,
    pub predicted: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub offset: f64,
    pub residual_max: f64,
    pub residual_rms: f64,
    pub slope_check: Option<SlopeCheck>,
}

impl FitResult {
    /// Compares the least-squares slope of `response` against `driver` with
    /// the predicted slope.
    pub fn with_slope_check(mut self, driver: &[f64], response: &[f64], predicted: f64) -> Result<FitResult> {
        let fitted = linear_fit(driver, response)?.0;
        let rel_error = if predicted == 0.0 { fitted.abs() } else { ((fitted - predicted) / predicted).abs() };
        self.slope_check = Some(SlopeCheck { fitted, predicted, rel_error });
        Ok(self)
    }
}

fn check_lengths(numeric: &[f64], analytic: &[f64]) -> Result<()> {
    if numeric.len() != analytic.len() {
        return Err(CliError::LengthMismatch { numeric: numeric.len(), analytic: analytic.len() });
    }
    if numeric.len() < 3 {
        return Err(CliError::TooFewPoints { needed: 3, got: numeric.len() });
    }
    Ok(())
}

/// Best constant c with numeric ≈ analytic + c.
pub fn fit_constant(numeric: &[f64], analytic: &[f64]) -> Result<FitResult> {
    check_lengths(numeric, analytic)?;
    let n = numeric.len() as f64;
    let offset = numeric.iter().zip(analytic).map(|(a, b)| a - b).sum::<f64>() / n;
    let residuals: Vec<f64> = numeric.iter().zip(analytic).map(|(a, b)| a - b - offset).collect();
    let residual_max = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let residual_rms = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    Ok(FitResult { offset, residual_max, residual_rms, slope_check: None })
}

/// |offset(first half) - offset(second half)|; a trend in the residuals shows up here.
pub fn half_offset_difference(numeric: &[f64], analytic: &[f64]) -> Result<f64> {
    check_lengths(numeric, analytic)?;
    let mid = numeric.len() / 2;
    let mean = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>() / a.len() as f64;
    Ok((mean(&numeric[..mid], &analytic[..mid]) - mean(&numeric[mid..], &analytic[mid..])).abs())
}

/// Least-squares (slope, intercept).
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(CliError::LengthMismatch { numeric: y.len(), analytic: x.len() });
    }
    if x.len() < 2 {
        return Err(CliError::TooFewPoints { needed: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(CliError::invalid("driver", "all abscissae coincide"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
