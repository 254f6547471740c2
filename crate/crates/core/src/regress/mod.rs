//! Bivariate ordinary least squares with the diagnostics reported in growth-law tables:
//! coefficients, standard errors, t-statistics, two-sided p-values, R², Durbin-Watson
//! and residual degrees of freedom.

mod student_t;

use std::fmt;

use thiserror::Error;

pub use student_t::{ln_gamma, regularized_incomplete_beta, t_critical, t_two_sided_p};

/// Durbin-Watson value reported when the residuals are identically zero.
/// Spread of x, relative to max |x|, below which the regressor counts as constant.
pub const REGRESSOR_RELATIVE_SPREAD: f64 = 1e-10;

pub const DW_DEGENERATE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressError {
    #[error("sample too small: n = {n}, need at least 3")]
    SampleTooSmall { n: usize },
    #[error("regressor has zero variance")]
    DegenerateRegressor,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub intercept: f64,
    pub slope: f64,
    pub se_intercept: f64,
    pub se_slope: f64,
    pub t_intercept: f64,
    pub t_slope: f64,
    pub p_intercept: f64,
    pub p_slope: f64,
    pub r_squared: f64,
    pub durbin_watson: f64,
    pub df: usize,
    pub n: usize,
    pub residuals: Vec<f64>,
    /// Residuals vanish (to rounding); DW is then fixed at [`DW_DEGENERATE`].
    pub degenerate: bool,
}

/// Which adjacent residual pairs enter the Durbin-Watson numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DwPairs<'a> {
    /// Every consecutive pair of the stacked residual vector.
    #[default]
    Stacked,
    /// Skip pairs whose second element starts a new group (indices given ascending).
    WithinGroups(&'a [usize]),
}

/// Significance level reached by a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignificanceMark {
    FivePercent,
    TenPercent,
    None,
}

impl SignificanceMark {
    pub fn stars(self) -> &'static str {
        match self {
            SignificanceMark::FivePercent => "*",
            SignificanceMark::TenPercent => "**",
            SignificanceMark::None => "",
        }
    }
}

impl fmt::Display for SignificanceMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stars())
    }
}

/// `*` at 5%, `**` at 10% (the table convention marks the weaker level with more stars).
pub fn mark_significance(p: f64) -> SignificanceMark {
    if p <= 0.05 {
        SignificanceMark::FivePercent
    } else if p <= 0.10 {
        SignificanceMark::TenPercent
    } else {
        SignificanceMark::None
    }
}

/// Fit `y = intercept + slope * x` by least squares.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<FitResult, RegressError> {
    ols_fit_with(x, y, DwPairs::Stacked)
}

/// Like [`ols_fit`] but with control over which residual pairs enter the DW statistic.
pub fn ols_fit_with(x: &[f64], y: &[f64], dw_pairs: DwPairs<'_>) -> Result<FitResult, RegressError> {
    if x.len() != y.len() {
        return Err(RegressError::InvalidInput(format!(
            "length mismatch: x has {}, y has {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(RegressError::SampleTooSmall { n });
    }
    if let Some(i) = x.iter().chain(y).position(|v| !v.is_finite()) {
        let (which, idx) = if i < n { ("x", i) } else { ("y", i - n) };
        return Err(RegressError::InvalidInput(format!("non-finite {which}[{idx}]")));
    }

    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - x_mean;
        let dy = yi - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }

    // Regressors built from differences of logs carry absolute rounding noise far
    // above one ulp of their own magnitude, so "constant" is judged relatively.
    let x_max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sxx <= nf * (REGRESSOR_RELATIVE_SPREAD * x_max).powi(2) {
        return Err(RegressError::DegenerateRegressor);
    }

    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(&xi, &yi)| yi - intercept - slope * xi).collect();
    let ssr: f64 = residuals.iter().map(|u| u * u).sum();

    let y_max = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let degenerate = ssr <= nf * (1e-13 * y_max).powi(2);

    let df = n - 2;
    let s2 = if degenerate { 0.0 } else { ssr / df as f64 };
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / nf + x_mean * x_mean / sxx)).sqrt();

    let (t_slope, p_slope) = t_and_p(slope, se_slope, df);
    let (t_intercept, p_intercept) = t_and_p(intercept, se_intercept, df);

    let r_squared = if degenerate || syy == 0.0 {
        1.0
    } else {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    };

    let durbin_watson = if degenerate {
        DW_DEGENERATE
    } else {
        durbin_watson(&residuals, dw_pairs).unwrap_or(DW_DEGENERATE)
    };

    Ok(FitResult {
        intercept,
        slope,
        se_intercept,
        se_slope,
        t_intercept,
        t_slope,
        p_intercept,
        p_slope,
        r_squared,
        durbin_watson,
        df,
        n,
        residuals,
        degenerate,
    })
}

fn t_and_p(coef: f64, se: f64, df: usize) -> (f64, f64) {
    if se > 0.0 {
        let t = coef / se;
        (t, t_two_sided_p(t, df))
    } else if coef == 0.0 {
        (0.0, 1.0)
    } else {
        (coef.signum() * f64::INFINITY, 0.0)
    }
}

/// Σ(u_i − u_{i−1})² / Σu_i², restricted to the pairs selected by `pairs`.
///
/// Returns `None` when the residual sum of squares is zero.
pub fn durbin_watson(residuals: &[f64], pairs: DwPairs<'_>) -> Option<f64> {
    let denom: f64 = residuals.iter().map(|u| u * u).sum();
    if denom == 0.0 {
        return None;
    }
    let breaks: &[usize] = match pairs {
        DwPairs::Stacked => &[],
        DwPairs::WithinGroups(starts) => starts,
    };
    let mut next_break = breaks.iter().peekable();
    let mut num = 0.0;
    for i in 1..residuals.len() {
        while next_break.peek().is_some_and(|&&b| b < i) {
            next_break.next();
        }
        if next_break.peek().is_some_and(|&&b| b == i) {
            continue;
        }
        let d = residuals[i] - residuals[i - 1];
        num += d * d;
    }
    // (a-b)² ≤ 2a² + 2b² bounds the ratio by 4; clamp rounding overshoot.
    Some((num / denom).clamp(0.0, 4.0))
}
