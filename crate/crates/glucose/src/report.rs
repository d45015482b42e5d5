//! Side-by-side evaluation of the baseline forest and the pipeline, rendered
//! as a text table or as versioned JSON.

use std::fmt::Write as _;

use glucose_core::ega::{ega_report, Zone};
use glucose_core::metrics::compute_metrics;
use glucose_core::piecewise::N_SUBSETS;
use glucose_core::{EgaReport, MetricsReport, TestTransform};
use serde::Serialize;

use crate::error::Result;

pub const REPORT_SCHEMA: &str = "glucose-report";
pub const REPORT_VERSION: u32 = 1;

/// Indicators of one method on the test rows. Errors are in mmol/L.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub name: String,
    pub r: Option<f64>,
    pub mae: f64,
    /// Standard deviation of the absolute errors.
    pub sd: f64,
    pub sd_signed: f64,
    pub rmse: f64,
    pub mard: f64,
    pub zone_counts: ZoneTable<usize>,
    pub zone_percent: ZoneTable<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct ZoneTable<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
}

impl<T: Copy> ZoneTable<T> {
    fn from_array(v: [T; 5]) -> Self {
        let [a, b, c, d, e] = v;
        ZoneTable { a, b, c, d, e }
    }

    pub fn to_array(&self) -> [T; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }
}

impl MethodResult {
    pub fn compute(name: &str, refs: &[f64], preds: &[f64]) -> Result<Self> {
        let m: MetricsReport = compute_metrics(refs, preds)?;
        let z: EgaReport = ega_report(refs, preds)?;
        Ok(MethodResult {
            name: name.into(),
            r: m.pearson_r,
            mae: m.mae,
            sd: m.sd_abs_err,
            sd_signed: m.sd_signed_err,
            rmse: m.rmse,
            mard: m.mard_percent,
            zone_counts: ZoneTable::from_array(z.counts),
            zone_percent: ZoneTable::from_array(z.percent),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResult {
    /// 0-based row in the evaluated data file.
    pub row: usize,
    pub reference: f64,
    pub baseline: f64,
    pub pipeline: f64,
    /// Subset the pipeline routed the row to (0 holds the highest glucose).
    pub subset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: u32,
    pub n_test: usize,
    pub test_transform: TestTransform,
    pub methods: Vec<MethodResult>,
    pub subset_counts: [usize; N_SUBSETS],
    pub rows: Vec<RowResult>,
}

impl Report {
    pub fn new(
        test_transform: TestTransform,
        methods: Vec<MethodResult>,
        rows: Vec<RowResult>,
    ) -> Self {
        let mut subset_counts = [0; N_SUBSETS];
        for r in &rows {
            subset_counts[r.subset] += 1;
        }
        Report {
            schema: REPORT_SCHEMA,
            version: REPORT_VERSION,
            n_test: rows.len(),
            test_transform,
            methods,
            subset_counts,
            rows,
        }
    }

    pub fn method(&self, name: &str) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "Results of various indicators ({} test measurements)",
            self.n_test
        );
        let _ = writeln!(
            s,
            "{:<10} {:>8} {:>17} {:>8} {:>9} {:>7} {:>7} {:>7} {:>7} {:>7}",
            "method", "R", "MAE±SD", "RMSE", "MARD(%)", "A(%)", "B(%)", "C(%)", "D(%)", "E(%)"
        );
        for m in &self.methods {
            let r = m.r.map_or_else(|| "n/a".to_string(), |r| format!("{r:.4}"));
            let mae = format!("{:.4}±{:.4}", m.mae, m.sd);
            let _ = write!(
                s,
                "{:<10} {r:>8} {mae:>17} {:>8.4} {:>9.2}",
                m.name, m.rmse, m.mard
            );
            for p in m.zone_percent.to_array() {
                let _ = write!(s, " {p:>7.2}");
            }
            s.push('\n');
        }
        let counts = self.subset_counts.map(|c| c.to_string()).join(" / ");
        let _ = writeln!(s, "pipeline subset counts (high / mid / low): {counts}");
        s
    }
}

pub fn zone_labels() -> [&'static str; 5] {
    Zone::ALL.map(Zone::label)
}
