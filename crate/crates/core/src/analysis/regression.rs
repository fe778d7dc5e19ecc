//! OLS with t-test p-values and forward stepwise selection.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::linalg::least_squares;
use crate::{Error, Result};

/// R² at or above which a model is treated as an exact fit.
const PERFECT_FIT: f64 = 1.0 - 1e-12;

/// Two-sided p-value of a Student t statistic with `df` degrees of freedom.
pub fn t_test_p_value(t: f64, df: f64) -> f64 {
    if t.is_nan() || !(df > 0.0) {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    // P(|T| > |t|) = I_{df/(df+t²)}(df/2, 1/2)
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// A fitted linear model. `beta[0]` is the intercept and `beta[i]` belongs
/// to `selected[i - 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub selected: Vec<String>,
    pub beta: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Final-model p-value of each selected regressor.
    pub p_values: Vec<f64>,
    /// p-value each regressor had when it entered the model.
    pub entry_p_values: Vec<f64>,
    pub r_squared: f64,
    pub r_hat: f64,
    pub n_obs: usize,
    pub residual_ss: f64,
    pub residual_df: usize,
}

fn check_y(y: &[f64]) -> Result<f64> {
    if y.len() < 3 {
        return Err(Error::invalid(format!("regression needs at least 3 observations, got {}", y.len())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("response contains non-finite values"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if tss == 0.0 {
        return Err(Error::invalid("response has zero variance"));
    }
    Ok(tss)
}

/// Fits `design` (row-major n×m, first column the intercept) and builds a
/// report naming columns 1.. with `names`.
fn fit(design: &[f64], n: usize, m: usize, y: &[f64], tss: f64, names: &[String]) -> Result<RegressionReport> {
    if n <= m {
        return Err(Error::invalid(format!("{n} observations cannot support {m} coefficients")));
    }
    let ls = least_squares(design, n, m, y).map_err(|j| Error::RankDeficient {
        column: if j == 0 { "intercept".to_string() } else { names[j - 1].clone() },
    })?;
    let rss: f64 = y.iter().zip(&ls.fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    let df = n - m;
    let sigma2 = rss / df as f64;
    let std_errors: Vec<f64> = ls.xtx_inv_diag.iter().map(|v| (sigma2 * v).sqrt()).collect();
    let p_all: Vec<f64> = ls
        .beta
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| {
            if se == 0.0 {
                if b == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                t_test_p_value(b / se, df as f64)
            }
        })
        .collect();
    let r_squared = (1.0 - rss / tss).clamp(0.0, 1.0);
    Ok(RegressionReport {
        selected: names.to_vec(),
        beta: ls.beta,
        std_errors,
        p_values: p_all[1..].to_vec(),
        entry_p_values: p_all[1..].to_vec(),
        r_squared,
        r_hat: r_squared.sqrt(),
        n_obs: n,
        residual_ss: rss,
        residual_df: df,
    })
}

/// Ordinary least squares. `design` is n×(p+1) with a leading intercept
/// column of ones; regressors are named `x1`..`xp`.
pub fn ols(design: ArrayView2<'_, f64>, y: &[f64]) -> Result<RegressionReport> {
    let (n, m) = design.dim();
    if y.len() != n {
        return Err(Error::DimMismatch { expected: n, found: y.len() });
    }
    if m == 0 || design.column(0).iter().any(|&v| v != 1.0) {
        return Err(Error::invalid("first design column must be the intercept (all ones)"));
    }
    if design.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("design matrix contains non-finite values"));
    }
    let tss = check_y(y)?;
    let names: Vec<String> = (1..m).map(|j| format!("x{j}")).collect();
    let flat: Vec<f64> = design.iter().copied().collect();
    fit(&flat, n, m, y, tss, &names)
}

/// OLS of `y` on an intercept plus the named columns.
pub fn ols_named(columns: &[(String, Vec<f64>)], y: &[f64]) -> Result<RegressionReport> {
    check_columns(columns, y.len())?;
    let tss = check_y(y)?;
    let refs: Vec<&(String, Vec<f64>)> = columns.iter().collect();
    fit_columns(&refs, y, tss)
}

fn fit_columns(cols: &[&(String, Vec<f64>)], y: &[f64], tss: f64) -> Result<RegressionReport> {
    let n = y.len();
    let m = cols.len() + 1;
    let mut design = Vec::with_capacity(n * m);
    for i in 0..n {
        design.push(1.0);
        design.extend(cols.iter().map(|(_, c)| c[i]));
    }
    let names: Vec<String> = cols.iter().map(|(name, _)| name.clone()).collect();
    fit(&design, n, m, y, tss, &names)
}

fn check_columns(columns: &[(String, Vec<f64>)], n: usize) -> Result<()> {
    for (i, (name, c)) in columns.iter().enumerate() {
        if c.len() != n {
            return Err(Error::invalid(format!("column {name} has {} values, expected {n}", c.len())));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("column {name} contains non-finite values")));
        }
        if columns[..i].iter().any(|(other, _)| other == name) {
            return Err(Error::invalid(format!("duplicate column name {name}")));
        }
    }
    Ok(())
}

fn intercept_only(y: &[f64], tss: f64) -> RegressionReport {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    RegressionReport {
        selected: Vec::new(),
        beta: vec![mean],
        std_errors: vec![(tss / ((n - 1) as f64 * n as f64)).sqrt()],
        p_values: Vec::new(),
        entry_p_values: Vec::new(),
        r_squared: 0.0,
        r_hat: 0.0,
        n_obs: n,
        residual_ss: tss,
        residual_df: n - 1,
    }
}

/// Forward stepwise selection: repeatedly admit the candidate whose
/// coefficient has the smallest t-test p-value in the augmented model, as
/// long as that p-value is below `alpha`.
///
/// A constant candidate is rejected up front. A candidate that becomes
/// collinear with the current model is skipped for that step.
pub fn stepwise_regression(candidates: &[(String, Vec<f64>)], y: &[f64], alpha: f64) -> Result<RegressionReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha must be in (0, 1], got {alpha}")));
    }
    check_columns(candidates, y.len())?;
    let tss = check_y(y)?;
    for (name, c) in candidates {
        if c.iter().all(|&v| v == c[0]) {
            return Err(Error::RankDeficient { column: name.clone() });
        }
    }

    let mut selected: Vec<usize> = Vec::new();
    let mut entry_p = Vec::new();
    let mut current: Option<RegressionReport> = None;
    loop {
        if current.as_ref().is_some_and(|r| r.r_squared >= PERFECT_FIT) {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..candidates.len() {
            if selected.contains(&j) || y.len() <= selected.len() + 2 {
                continue;
            }
            let cols: Vec<&(String, Vec<f64>)> = selected
                .iter()
                .chain(std::iter::once(&j))
                .map(|&k| &candidates[k])
                .collect();
            let report = match fit_columns(&cols, y, tss) {
                Ok(r) => r,
                Err(Error::RankDeficient { .. }) => continue,
                Err(e) => return Err(e),
            };
            let p = *report.p_values.last().expect("candidate coefficient");
            if best.map_or(true, |(_, bp)| p < bp) {
                best = Some((j, p));
            }
        }
        match best {
            Some((j, p)) if p < alpha => {
                log::debug!("stepwise: admitting {} (p = {p:.3e})", candidates[j].0);
                selected.push(j);
                entry_p.push(p);
                let cols: Vec<&(String, Vec<f64>)> = selected.iter().map(|&k| &candidates[k]).collect();
                current = Some(fit_columns(&cols, y, tss)?);
            }
            _ => break,
        }
    }
    Ok(match current {
        Some(mut r) => {
            r.entry_p_values = entry_p;
            r
        }
        None => intercept_only(y, tss),
    })
}
