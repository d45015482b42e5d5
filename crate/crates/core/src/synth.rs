//! Seeded synthetic feature/glucose datasets.
//!
//! Glucose values are drawn uniformly over the configured range and then
//! arranged into a slow up-and-down trajectory: the sorted draws are dealt
//! round-robin into cycles of roughly sixty measurements, and each cycle climbs
//! through its even-ranked values and descends through its odd-ranked ones.
//! Consecutive measurements therefore carry similar glucose, much like repeated
//! sessions over a day, while the marginal distribution stays uniform.
//!
//! Informative features are `offset + slope · glucose + drift + noise`, where
//! `drift` is a shared sinusoidal artifact scaled per feature. Its period of a
//! few measurements is long against the white noise but short against glucose
//! excursions, so a short window filter can null it. The remaining features
//! are offset plus noise.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{rng, Dataset, Error, Matrix, Result};

/// Measurements per glucose excursion.
const CYCLE_LEN: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub k: usize,
    pub informative: usize,
    pub noise_sd: f64,
    /// (low, high) in mmol/L.
    pub glucose_range: (f64, f64),
    pub drift_amp: f64,
    /// Artifact period in measurements.
    pub drift_period: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 600,
            k: 10,
            informative: 4,
            noise_sd: 0.5,
            glucose_range: (4.0, 12.0),
            drift_amp: 0.3,
            drift_period: 4.0,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.informative > self.k {
            return bad(format!(
                "informative features ({}) exceed k ({})",
                self.informative, self.k
            ));
        }
        let (lo, hi) = self.glucose_range;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return bad(format!(
                "glucose range ({lo}, {hi}) must satisfy 0 < low < high"
            ));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return bad("noise_sd must be non-negative".into());
        }
        if !(self.drift_amp >= 0.0 && self.drift_amp.is_finite()) {
            return bad("drift_amp must be non-negative".into());
        }
        if !(self.drift_period > 0.0 && self.drift_period.is_finite()) {
            return bad("drift_period must be positive".into());
        }
        Ok(())
    }
}

fn glucose_trajectory<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    draws.sort_by(f64::total_cmp);
    let cycles = (n / CYCLE_LEN).max(1);
    let mut out = Vec::with_capacity(n);
    for c in 0..cycles {
        let cycle: Vec<f64> = draws.iter().skip(c).step_by(cycles).copied().collect();
        out.extend(cycle.iter().step_by(2));
        out.extend(cycle.iter().skip(1).step_by(2).rev());
    }
    out
}

pub fn generate_synthetic_dataset(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, 0);
    let (lo, hi) = cfg.glucose_range;
    let glucose = glucose_trajectory(&mut rng, cfg.n, lo, hi);

    let period = cfg.drift_period;
    let phase = rng.random_range(0.0..core::f64::consts::TAU);
    let drift: Vec<f64> = (0..cfg.n)
        .map(|i| cfg.drift_amp * libm::sin(core::f64::consts::TAU * i as f64 / period + phase))
        .collect();

    let mut columns = Vec::with_capacity(cfg.k);
    for j in 0..cfg.k {
        let offset = rng.random_range(2.0..6.0);
        let informative = j < cfg.informative;
        let (slope, drift_gain) = if informative {
            (rng.random_range(0.5..1.5), rng.random_range(0.5..1.5))
        } else {
            (0.0, 0.0)
        };
        let col: Vec<f64> = (0..cfg.n)
            .map(|i| {
                let noise: f64 = rng.sample(StandardNormal);
                offset + slope * glucose[i] + drift_gain * drift[i] + cfg.noise_sd * noise
            })
            .collect();
        columns.push(col);
    }
    let names = (1..=cfg.k).map(|j| format!("f{j}")).collect();
    Dataset::new(Matrix::from_columns(&columns)?, glucose, names)
}
