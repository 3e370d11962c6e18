use serde::Serialize;
use statrs::function::beta::checked_beta_reg;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    /// Two-sided.
    pub p_value: f64,
    pub reject_at_005: bool,
}

impl TTestResult {
    fn new(t: f64, dof: f64) -> Result<Self> {
        let p = student_t_two_sided_p(t, dof)?;
        Ok(Self {
            t_statistic: t,
            degrees_of_freedom: dof,
            p_value: p,
            reject_at_005: p < 0.05,
        })
    }
}

/// `P(|T| ≥ |t|)` for Student's t with `dof` degrees of freedom, as the
/// regularized incomplete beta `I_{ν/(ν+t²)}(ν/2, 1/2)`.
pub fn student_t_two_sided_p(t: f64, dof: f64) -> Result<f64> {
    if !(dof > 0.0) || t.is_nan() {
        return Err(Error::Numeric(format!("invalid t distribution query t={t}, dof={dof}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let x = dof / (dof + t * t);
    let p = checked_beta_reg(0.5 * dof, 0.5, x).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(p.clamp(0.0, 1.0))
}

fn moments(v: &[f64], name: &str) -> Result<(f64, f64, f64)> {
    if v.len() < 2 {
        return Err(Error::Degenerate(format!(
            "sample {name} needs at least 2 values, got {}",
            v.len()
        )));
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Degenerate(format!("sample {name} has zero variance")));
    }
    Ok((n, mean, var))
}

/// Welch's unequal-variance two-sample t-test.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    let (na, ma, va) = moments(a, "a")?;
    let (nb, mb, vb) = moments(b, "b")?;
    let sa = va / na;
    let sb = vb / nb;
    let t = (ma - mb) / (sa + sb).sqrt();
    let dof = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    TTestResult::new(t, dof)
}

/// Student's two-sample t-test with pooled variance.
pub fn pooled_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    let (na, ma, va) = moments(a, "a")?;
    let (nb, mb, vb) = moments(b, "b")?;
    let dof = na + nb - 2.0;
    let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / dof;
    let t = (ma - mb) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    TTestResult::new(t, dof)
}
