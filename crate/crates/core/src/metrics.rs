//! Accuracy indicators for glucose estimates.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// mg/dL per mmol/L of glucose (molar mass 180.16 g/mol).
pub const MGDL_PER_MMOL: f64 = 18.016;

pub fn mmol_to_mgdl(v: f64) -> f64 {
    v * MGDL_PER_MMOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Sample Pearson correlation; `None` when either side has zero variance.
    pub pearson_r: Option<f64>,
    /// Mean absolute error, mmol/L.
    pub mae: f64,
    /// Population standard deviation of the absolute errors, mmol/L.
    pub sd_abs_err: f64,
    /// Population standard deviation of the signed errors, mmol/L.
    pub sd_signed_err: f64,
    pub rmse: f64,
    pub mard_percent: f64,
}

fn mean(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count();
    v.sum::<f64>() / n as f64
}

pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let ma = mean(a.iter().copied());
    let mb = mean(b.iter().copied());
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa > 0.0 && sbb > 0.0 {
        Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0))
    } else {
        None
    }
}

/// Errors are `pred - ref`.
pub fn compute_metrics(refs: &[f64], preds: &[f64]) -> Result<MetricsReport> {
    if refs.len() != preds.len() {
        return Err(Error::DimensionMismatch {
            what: "predictions",
            expected: refs.len(),
            found: preds.len(),
        });
    }
    if refs.len() < 2 {
        return Err(Error::TooFewRows {
            what: "metrics",
            needed: 2,
            found: refs.len(),
        });
    }
    if let Some(i) = refs.iter().position(|&r| !(r.is_finite() && r > 0.0)) {
        return Err(Error::NonPositiveGlucose {
            row: i,
            value: refs[i],
        });
    }
    if let Some(i) = preds.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 1 });
    }
    let err = refs.iter().zip(preds).map(|(r, p)| p - r);
    let abs = err.clone().map(f64::abs);
    let mae = mean(abs.clone());
    let sd_abs_err = libm::sqrt(mean(abs.map(|a| (a - mae) * (a - mae))));
    let bias = mean(err.clone());
    let sd_signed_err = libm::sqrt(mean(err.clone().map(|e| (e - bias) * (e - bias))));
    let rmse = libm::sqrt(mean(err.map(|e| e * e)));
    let mard_percent = mean(
        refs.iter()
            .zip(preds)
            .map(|(r, p)| 100.0 * (p - r).abs() / r),
    );
    Ok(MetricsReport {
        pearson_r: pearson(refs, preds),
        mae,
        sd_abs_err,
        sd_signed_err,
        rmse,
        mard_percent,
    })
}
