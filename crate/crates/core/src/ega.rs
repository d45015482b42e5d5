//! Clarke error grid zoning.
//!
//! Zones are decided in mg/dL with the usual operationalisation of the grid,
//! checked in the order A, E, C, D and otherwise B:
//!
//! * A: both values ≤ 70, or the estimate within ±20 % of the reference.
//! * E: reference ≥ 180 with estimate ≤ 70, or reference ≤ 70 with estimate ≥ 180.
//! * C: 70 ≤ ref ≤ 290 with est ≥ ref + 110, or 130 ≤ ref ≤ 180 with est ≤ 7/5·ref − 182.
//! * D: ref ≥ 240 with 70 ≤ est ≤ 180, or ref ≤ 175/3 with 70 ≤ est ≤ 180,
//!   or 175/3 ≤ ref ≤ 70 with est ≥ 6/5·ref.

use serde::{Deserialize, Serialize};

use crate::metrics::mmol_to_mgdl;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Zone {
    A,
    B,
    C,
    D,
    E,
}

impl Zone {
    pub const ALL: [Zone; 5] = [Zone::A, Zone::B, Zone::C, Zone::D, Zone::E];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        ["A", "B", "C", "D", "E"][self.index()]
    }
}

fn in_range(v: f64) -> Result<()> {
    if v > 0.0 && v < 1000.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            value: v,
            range: "(0, 1000) mg/dL",
        })
    }
}

pub fn ega_zone(ref_mgdl: f64, pred_mgdl: f64) -> Result<Zone> {
    in_range(ref_mgdl)?;
    in_range(pred_mgdl)?;
    let (r, p) = (ref_mgdl, pred_mgdl);
    let zone = if (r <= 70.0 && p <= 70.0) || (0.8 * r <= p && p <= 1.2 * r) {
        Zone::A
    } else if (r >= 180.0 && p <= 70.0) || (r <= 70.0 && p >= 180.0) {
        Zone::E
    } else if ((70.0..=290.0).contains(&r) && p >= r + 110.0)
        || ((130.0..=180.0).contains(&r) && p <= 7.0 / 5.0 * r - 182.0)
    {
        Zone::C
    } else if (r >= 240.0 && (70.0..=180.0).contains(&p))
        || (r <= 175.0 / 3.0 && (70.0..=180.0).contains(&p))
        || ((175.0 / 3.0..=70.0).contains(&r) && p >= 6.0 / 5.0 * r)
    {
        Zone::D
    } else {
        Zone::B
    };
    Ok(zone)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgaReport {
    /// Counts in zone order A..E.
    pub counts: [usize; 5],
    pub percent: [f64; 5],
}

impl EgaReport {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn percent_of(&self, zone: Zone) -> f64 {
        self.percent[zone.index()]
    }
}

/// Zones every (reference, estimate) pair given in mmol/L.
pub fn ega_report(refs: &[f64], preds: &[f64]) -> Result<EgaReport> {
    if refs.len() != preds.len() {
        return Err(Error::DimensionMismatch {
            what: "predictions",
            expected: refs.len(),
            found: preds.len(),
        });
    }
    if refs.is_empty() {
        return Err(Error::TooFewRows {
            what: "error grid",
            needed: 1,
            found: 0,
        });
    }
    let mut counts = [0usize; 5];
    for (&r, &p) in refs.iter().zip(preds) {
        counts[ega_zone(mmol_to_mgdl(r), mmol_to_mgdl(p))?.index()] += 1;
    }
    let n = refs.len() as f64;
    Ok(EgaReport {
        counts,
        percent: counts.map(|c| 100.0 * c as f64 / n),
    })
}
