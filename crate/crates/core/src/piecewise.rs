//! Three-range multi-model regression.
//!
//! Training rows are ranked by glucose (highest first) and cut into three
//! equal-count blocks. Each block gets its own forest and a feature centroid.
//! A new measurement is assigned to the block whose centroid is nearest under
//! a Euclidean distance weighted by the first-stage forest's feature
//! importances, and that block's forest predicts its glucose.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::averaging::{fit_feature_averaging, AveragingModel, TestTransform};
use crate::dataset::{normalize_unit_energy, rescale_test};
use crate::forest::{fit_forest, Forest, ForestParams};
use crate::{Dataset, Error, Matrix, Result};

pub const N_SUBSETS: usize = 3;

/// Row indices of the three glucose-ordered training subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetPartition {
    /// Highest-glucose block first.
    pub subsets: [Vec<usize>; N_SUBSETS],
    /// Lowest glucose of the first and of the second block.
    pub boundaries: [f64; N_SUBSETS - 1],
}

impl SubsetPartition {
    pub fn sizes(&self) -> [usize; N_SUBSETS] {
        [
            self.subsets[0].len(),
            self.subsets[1].len(),
            self.subsets[2].len(),
        ]
    }
}

pub fn partition_by_glucose(glucose: &[f64]) -> Result<SubsetPartition> {
    let n = glucose.len();
    if n < N_SUBSETS {
        return Err(Error::TooFewRows {
            what: "glucose partition",
            needed: N_SUBSETS,
            found: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    // stable, so equal glucose keeps ascending row index
    order.sort_by(|&a, &b| glucose[b].total_cmp(&glucose[a]));

    let base = n / N_SUBSETS;
    let extra = n % N_SUBSETS;
    let mut subsets: [Vec<usize>; N_SUBSETS] = Default::default();
    let mut start = 0;
    for (t, subset) in subsets.iter_mut().enumerate() {
        let len = base + usize::from(t < extra);
        *subset = order[start..start + len].to_vec();
        start += len;
    }
    let boundaries = [
        glucose[*subsets[0].last().expect("non-empty")],
        glucose[*subsets[1].last().expect("non-empty")],
    ];
    Ok(SubsetPartition {
        subsets,
        boundaries,
    })
}

/// Per-subset feature means (3×K).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroids {
    pub rows: [Vec<f64>; N_SUBSETS],
}

pub fn compute_centroids(features: &Matrix, part: &SubsetPartition) -> Result<Centroids> {
    let mut rows: [Vec<f64>; N_SUBSETS] = Default::default();
    for (t, subset) in part.subsets.iter().enumerate() {
        if subset.is_empty() {
            return Err(Error::TooFewRows {
                what: "centroid subset",
                needed: 1,
                found: 0,
            });
        }
        let mut mean = alloc::vec![0.0; features.cols()];
        for &i in subset {
            if i >= features.rows() {
                return Err(Error::DimensionMismatch {
                    what: "partition row index",
                    expected: features.rows(),
                    found: i,
                });
            }
            for (m, v) in mean.iter_mut().zip(features.row(i)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= subset.len() as f64);
        rows[t] = mean;
    }
    Ok(Centroids { rows })
}

/// `sqrt(Σ a_k (x_k - c_k)²)`
pub fn weighted_distance(x: &[f64], centroid: &[f64], weights: &[f64]) -> Result<f64> {
    if x.len() != centroid.len() || x.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            what: "weighted distance",
            expected: weights.len(),
            found: if x.len() != weights.len() {
                x.len()
            } else {
                centroid.len()
            },
        });
    }
    if weights.iter().any(|&a| a.is_nan() || a < 0.0) {
        return Err(Error::OutOfRange {
            value: weights
                .iter()
                .copied()
                .find(|a| a.is_nan() || *a < 0.0)
                .unwrap_or(f64::NAN),
            range: "[0, inf) for distance weights",
        });
    }
    let sum: f64 = x
        .iter()
        .zip(centroid)
        .zip(weights)
        .map(|((x, c), a)| a * (x - c) * (x - c))
        .sum();
    Ok(libm::sqrt(sum))
}

/// Index (0-based) of the nearest centroid; ties go to the lower index.
pub fn classify_measurement(x: &[f64], centroids: &Centroids, weights: &[f64]) -> Result<usize> {
    let mut best = (0, f64::INFINITY);
    for (t, c) in centroids.rows.iter().enumerate() {
        let d = weighted_distance(x, c, weights)?;
        if d < best.1 {
            best = (t, d);
        }
    }
    Ok(best.0)
}

/// The trained multi-model pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePipeline {
    pub averaging: AveragingModel,
    /// Importances of the first-stage forest, used as distance weights.
    pub importance_weights: Vec<f64>,
    pub partition_sizes: [usize; N_SUBSETS],
    pub boundaries: [f64; N_SUBSETS - 1],
    /// Glucose range (min, max) of each subset's training rows.
    pub subset_ranges: [(f64, f64); N_SUBSETS],
    pub centroids: Centroids,
    pub forests: [Forest; N_SUBSETS],
    pub forest_params: ForestParams,
    pub window: usize,
}

/// Predictions for a batch of rows and the subset each row was routed to.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelinePrediction {
    pub glucose: Vec<f64>,
    /// 0-based subset index per row (0 is the highest-glucose subset).
    pub classes: Vec<usize>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

pub fn train_pipeline(
    train: &Dataset,
    window: usize,
    params: &ForestParams,
) -> Result<PiecewisePipeline> {
    let (mut averaging, averaged) =
        stage("feature averaging", fit_feature_averaging(train, window))?;
    let (normalized, gains) = stage("normalisation", normalize_unit_energy(averaged.features()))?;
    averaging.gains = Some(gains);
    let glucose = averaged.glucose();

    let first = stage(
        "first-stage forest",
        fit_forest(&normalized, glucose, params),
    )?;
    let importance_weights = first.importances.clone();

    let part = stage("glucose partition", partition_by_glucose(glucose))?;
    let centroids = stage("centroids", compute_centroids(&normalized, &part))?;

    let fit_subset = |t: usize| -> Result<Forest> {
        let idx = &part.subsets[t];
        let x = normalized.select_rows(idx);
        let y: Vec<f64> = idx.iter().map(|&i| glucose[i]).collect();
        let p = ForestParams {
            seed: params.seed.wrapping_add(t as u64 + 1),
            ..*params
        };
        if y.len() < 2 {
            // a single-row subset cannot be bagged; fit on the row twice,
            // which yields a constant forest at that row's glucose
            let x = x.select_rows(&[0, 0]);
            return fit_forest(&x, &[y[0], y[0]], &p);
        }
        fit_forest(&x, &y, &p)
    };
    #[cfg(feature = "parallel")]
    let forests: Result<Vec<Forest>> = {
        use rayon::prelude::*;
        (0..N_SUBSETS).into_par_iter().map(fit_subset).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let forests: Result<Vec<Forest>> = (0..N_SUBSETS).map(fit_subset).collect();
    let forests: [Forest; N_SUBSETS] = stage("subset forests", forests)?
        .try_into()
        .map_err(|_| Error::InvalidConfig("expected three subset forests".into()))?;

    let subset_ranges = part.subsets.clone().map(|idx| {
        idx.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(glucose[i]), hi.max(glucose[i]))
            })
    });

    Ok(PiecewisePipeline {
        averaging,
        importance_weights,
        partition_sizes: part.sizes(),
        boundaries: part.boundaries,
        subset_ranges,
        centroids,
        forests,
        forest_params: *params,
        window,
    })
}

impl PiecewisePipeline {
    pub fn n_features(&self) -> usize {
        self.importance_weights.len()
    }

    /// Routes rows that are already in the normalised averaged feature space
    /// and predicts each with its subset's forest.
    pub fn predict_normalized(&self, x: &Matrix) -> Result<PipelinePrediction> {
        let mut glucose = Vec::with_capacity(x.rows());
        let mut classes = Vec::with_capacity(x.rows());
        if x.rows() == 0 {
            return Ok(PipelinePrediction { glucose, classes });
        }
        for row in x.row_iter() {
            let t = classify_measurement(row, &self.centroids, &self.importance_weights)?;
            glucose.push(self.forests[t].predict(row)?);
            classes.push(t);
        }
        Ok(PipelinePrediction { glucose, classes })
    }

    /// Predicts the given rows of a chronological feature series. Each row is
    /// mapped into the averaged space per `mode`, scaled by the training gains,
    /// then routed and predicted. Output order follows `rows`.
    pub fn predict_rows(
        &self,
        series: &Matrix,
        rows: &[usize],
        mode: TestTransform,
    ) -> Result<PipelinePrediction> {
        if rows.is_empty() {
            return Ok(PipelinePrediction {
                glucose: Vec::new(),
                classes: Vec::new(),
            });
        }
        let gains =
            self.averaging.gains.as_ref().ok_or_else(|| {
                Error::InvalidConfig("pipeline has no normalisation gains".into())
            })?;
        let averaged = self.averaging.transform_rows(series, rows, mode)?;
        self.predict_normalized(&rescale_test(&averaged, gains)?)
    }

    /// Predicts every row of a chronological feature series.
    pub fn predict(&self, series: &Matrix, mode: TestTransform) -> Result<PipelinePrediction> {
        let rows: Vec<usize> = (0..series.rows()).collect();
        self.predict_rows(series, &rows, mode)
    }

    /// Cross-field consistency check used after deserialisation.
    pub fn validate(&self) -> Result<()> {
        let k = self.n_features();
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.averaging.weights.len() != k || self.averaging.window != self.window {
            return bad("averaging model does not match the pipeline");
        }
        if self
            .averaging
            .weights
            .iter()
            .any(|w| w.len() != self.window)
        {
            return bad("averaging weights do not match the window length");
        }
        match &self.averaging.gains {
            Some(g) if g.len() == k => {}
            _ => return bad("normalisation gains are missing or mis-sized"),
        }
        if self.centroids.rows.iter().any(|c| c.len() != k) {
            return bad("centroids do not match the feature count");
        }
        for f in &self.forests {
            if f.n_features != k {
                return bad("subset forest does not match the feature count");
            }
            f.validate()?;
        }
        Ok(())
    }
}

/// Predicts every row of `test`, treating its rows as one chronological series.
pub fn predict_pipeline(
    p: &PiecewisePipeline,
    test: &Dataset,
    mode: TestTransform,
) -> Result<PipelinePrediction> {
    p.predict(test.features(), mode)
}
