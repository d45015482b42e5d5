//! Feature table paired with reference glucose, plus splitting and
//! unit-energy normalisation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::linalg::norm;
use crate::{rng, Error, Matrix, Result};

/// N×K feature matrix with an N-vector of reference glucose values (mmol/L).
///
/// Construction checks that every entry is finite, every glucose value is
/// strictly positive and the shapes agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Matrix,
    glucose: Vec<f64>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Matrix, glucose: Vec<f64>, feature_names: Vec<String>) -> Result<Self> {
        if features.rows() != glucose.len() {
            return Err(Error::DimensionMismatch {
                what: "glucose length",
                expected: features.rows(),
                found: glucose.len(),
            });
        }
        if feature_names.len() != features.cols() {
            return Err(Error::DimensionMismatch {
                what: "feature names",
                expected: features.cols(),
                found: feature_names.len(),
            });
        }
        if features.rows() == 0 {
            return Err(Error::TooFewRows {
                what: "dataset",
                needed: 1,
                found: 0,
            });
        }
        if features.cols() == 0 {
            return Err(Error::InvalidConfig(
                "dataset needs at least one feature".into(),
            ));
        }
        for (i, row) in features.row_iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        for (i, &g) in glucose.iter().enumerate() {
            if !g.is_finite() {
                return Err(Error::NonFinite {
                    row: i,
                    col: features.cols(),
                });
            }
            if g <= 0.0 {
                return Err(Error::NonPositiveGlucose { row: i, value: g });
            }
        }
        Ok(Dataset {
            features,
            glucose,
            feature_names,
        })
    }

    /// Like [`Dataset::new`] with generated names `f1`, `f2`, ...
    pub fn unnamed(features: Matrix, glucose: Vec<f64>) -> Result<Self> {
        let names = (1..=features.cols()).map(|k| format!("f{k}")).collect();
        Dataset::new(features, glucose, names)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn glucose(&self) -> &[f64] {
        &self.glucose
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_rows(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Result<Dataset> {
        let glucose = indices.iter().map(|&i| self.glucose[i]).collect();
        Dataset::new(
            self.features.select_rows(indices),
            glucose,
            self.feature_names.clone(),
        )
    }

    /// Same rows and glucose, different feature values.
    pub fn with_features(&self, features: Matrix) -> Result<Dataset> {
        Dataset::new(features, self.glucose.clone(), self.feature_names.clone())
    }
}

/// Train/test split settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            train_fraction: 0.75,
            seed: 0,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train fraction {} must lie strictly between 0 and 1",
                self.train_fraction
            )));
        }
        Ok(())
    }

    /// Number of training rows for `n` rows: `floor(fraction * n + 0.5)`.
    pub fn train_size(&self, n: usize) -> usize {
        libm::floor(self.train_fraction * n as f64 + 0.5) as usize
    }
}

/// Row indices of a seeded split. Both index lists are returned in ascending
/// order, so each part keeps the measurement order of the input.
pub fn split_indices(n: usize, cfg: &SplitConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    cfg.validate()?;
    if n < 4 {
        return Err(Error::TooFewRows {
            what: "train/test split",
            needed: 4,
            found: n,
        });
    }
    let n_train = cfg.train_size(n);
    if n_train == 0 || n_train == n {
        return Err(Error::InvalidConfig(format!(
            "train fraction {} leaves an empty part for {n} rows",
            cfg.train_fraction
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng::stream(cfg.seed, 0);
    rng::shuffle(&mut rng, &mut order);
    let (train, test) = order.split_at(n_train);
    let mut train = train.to_vec();
    let mut test = test.to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_train_test(d: &Dataset, cfg: &SplitConfig) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(d.n_rows(), cfg)?;
    Ok((d.select_rows(&train)?, d.select_rows(&test)?))
}

/// Per-feature gains `q_k = 1 / ||y_k||` learned on the training columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationGains {
    q: Vec<f64>,
}

impl NormalizationGains {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if let Some(k) = q.iter().position(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::ZeroEnergy { feature: k });
        }
        Ok(NormalizationGains { q })
    }

    pub fn ones(k: usize) -> Self {
        NormalizationGains {
            q: alloc::vec![1.0; k],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Scales one feature vector in place.
    pub fn apply(&self, row: &mut [f64]) -> Result<()> {
        if row.len() != self.q.len() {
            return Err(Error::DimensionMismatch {
                what: "normalisation gains",
                expected: self.q.len(),
                found: row.len(),
            });
        }
        for (v, q) in row.iter_mut().zip(&self.q) {
            *v *= q;
        }
        Ok(())
    }
}

/// Scales every column to unit energy and returns the gains used.
pub fn normalize_unit_energy(train: &Matrix) -> Result<(Matrix, NormalizationGains)> {
    let mut q = Vec::with_capacity(train.cols());
    for k in 0..train.cols() {
        let energy = norm(&train.column(k));
        if !(energy.is_finite() && energy > 0.0) {
            return Err(Error::ZeroEnergy { feature: k });
        }
        let gain = 1.0 / energy;
        if !gain.is_finite() {
            return Err(Error::ZeroEnergy { feature: k });
        }
        q.push(gain);
    }
    let gains = NormalizationGains { q };
    Ok((rescale_test(train, &gains)?, gains))
}

/// Multiplies each column of `test` by its training gain.
pub fn rescale_test(test: &Matrix, gains: &NormalizationGains) -> Result<Matrix> {
    if test.cols() != gains.len() {
        return Err(Error::DimensionMismatch {
            what: "normalisation gains",
            expected: test.cols(),
            found: gains.len(),
        });
    }
    let mut out = test.clone();
    for i in 0..out.rows() {
        for (k, &q) in gains.q.iter().enumerate() {
            out.set(i, k, q * test.get(i, k));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ds(n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let g = (0..n).map(|i| 4.0 + i as f64).collect();
        Dataset::unnamed(Matrix::from_rows(&rows).unwrap(), g).unwrap()
    }

    #[test]
    fn rejects_bad_values() {
        let m = Matrix::from_rows(&[[1.0], [f64::NAN]]).unwrap();
        assert_eq!(
            Dataset::unnamed(m, vec![1.0, 2.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        );
        let m = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(matches!(
            Dataset::unnamed(m.clone(), vec![1.0, 0.0]),
            Err(Error::NonPositiveGlucose { row: 1, .. })
        ));
        assert!(matches!(
            Dataset::unnamed(m, vec![1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn split_sizes_follow_half_up_rounding() {
        let cfg = SplitConfig {
            train_fraction: 0.75,
            seed: 3,
        };
        assert_eq!(cfg.train_size(465), 349);
        let (tr, te) = split_train_test(&ds(465), &cfg).unwrap();
        assert_eq!((tr.n_rows(), te.n_rows()), (349, 116));
        let (tr, te) = split_train_test(&ds(4), &cfg).unwrap();
        assert_eq!((tr.n_rows(), te.n_rows()), (3, 1));
    }

    #[test]
    fn split_is_a_deterministic_partition() {
        let cfg = SplitConfig {
            train_fraction: 0.75,
            seed: 11,
        };
        let (a, b) = split_indices(50, &cfg).unwrap();
        let (a2, b2) = split_indices(50, &cfg).unwrap();
        assert_eq!((&a, &b), (&a2, &b2));
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
        let (c, _) = split_indices(50, &SplitConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn split_needs_four_rows() {
        assert!(matches!(
            split_train_test(&ds(3), &SplitConfig::default()),
            Err(Error::TooFewRows {
                needed: 4,
                found: 3,
                ..
            })
        ));
    }

    #[test]
    fn normalisation_hand_example() {
        let m = Matrix::from_rows(&[[3.0], [4.0]]).unwrap();
        let (out, q) = normalize_unit_energy(&m).unwrap();
        assert!((q.as_slice()[0] - 0.2).abs() < 1e-15);
        assert!((out.get(0, 0) - 0.6).abs() < 1e-15);
        assert!((out.get(1, 0) - 0.8).abs() < 1e-15);
        let t = rescale_test(&Matrix::from_rows(&[[10.0]]).unwrap(), &q).unwrap();
        assert!((t.get(0, 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unit_column_is_a_fixed_point() {
        let m = Matrix::from_rows(&[[0.6], [0.8]]).unwrap();
        let (out, q) = normalize_unit_energy(&m).unwrap();
        assert!((q.as_slice()[0] - 1.0).abs() < 1e-15);
        assert!((out.get(0, 0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn zero_column_is_named() {
        let m = Matrix::from_rows(&[[1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(
            normalize_unit_energy(&m),
            Err(Error::ZeroEnergy { feature: 1 })
        );
    }

    #[test]
    fn rescale_checks_dimensions() {
        let q = NormalizationGains::new(vec![0.5]).unwrap();
        let t = rescale_test(&Matrix::from_rows(&[[8.0]]).unwrap(), &q).unwrap();
        assert_eq!(t.get(0, 0), 4.0);
        let m = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(rescale_test(&m, &q).is_err());
        assert_eq!(rescale_test(&m, &NormalizationGains::ones(2)).unwrap(), m);
    }
}
