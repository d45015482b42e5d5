//! Feature-domain averaging.
//!
//! Each feature series `x` (length N) is turned into its sliding-window matrix
//! `X` ((N-L+1)×L, row `i` is `x[i..i+L]`). A weight vector `w` then defines the
//! averaged feature `y = X w`. The weights maximise
//!
//! ```text
//!   J(w) = wᵀ S_A w / wᵀ S_B w,   S_A = Xᵀ g gᵀ X,   S_B = Xᵀ X
//! ```
//!
//! where `g` is the reference glucose aligned with the window rows. `S_A` has
//! rank one, so the generalised eigenproblem `S_B⁻¹ S_A w = λ w` has a single
//! non-zero eigenvalue whose eigenvector is `v = S_B⁻¹ Xᵀ g`. The attained
//! value is `λ = gᵀ X S_B⁻¹ Xᵀ g`, and `λ / gᵀg` is the squared cosine between
//! `X w` and `g`.
//!
//! `S_B` is regularised as `S_B + εI` with `ε = 1e-8 · tr(S_B) / L` so
//! collinear windows still have a unique solution.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky_solve, dot, norm};
use crate::{Dataset, Error, Matrix, NormalizationGains, Result};

/// Relative ridge added to `S_B`.
pub const RIDGE: f64 = 1e-8;

/// Sliding-window (Hankel) matrix of one feature series.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowMatrix {
    values: Matrix,
    window: usize,
}

impl WindowMatrix {
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// `X w`
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        self.values.row_iter().map(|r| dot(r, w)).collect()
    }

    /// Scales every entry by `c`.
    pub fn scaled(&self, c: f64) -> WindowMatrix {
        let data = self.values.as_slice().iter().map(|v| v * c).collect();
        WindowMatrix {
            values: Matrix::new(self.values.rows(), self.window, data).expect("same shape"),
            window: self.window,
        }
    }
}

fn check_window(len: usize, window: usize) -> Result<()> {
    if window < 1 || window > len {
        return Err(Error::InvalidWindow { window, len });
    }
    Ok(())
}

pub fn build_window_matrix(x: &[f64], window: usize) -> Result<WindowMatrix> {
    check_window(x.len(), window)?;
    let rows: Vec<&[f64]> = x.windows(window).collect();
    Ok(WindowMatrix {
        values: Matrix::from_rows(&rows)?,
        window,
    })
}

/// Glucose value at the end of each window: `out[j] = g[j + L - 1]`.
pub fn align_glucose(g: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(g.len(), window)?;
    Ok(g[window - 1..].to_vec())
}

/// The two scatter matrices of the quotient (row-major L×L) and the ridge
/// applied to `S_B` when solving.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    /// `Xᵀ g gᵀ X`
    pub between: Vec<f64>,
    /// `Xᵀ X`, unregularised
    pub within: Vec<f64>,
    /// `Xᵀ g`
    pub cross: Vec<f64>,
    pub ridge: f64,
}

impl Scatter {
    /// `S_B + εI`
    pub fn regularized_within(&self) -> Vec<f64> {
        let l = self.cross.len();
        let mut s = self.within.clone();
        for j in 0..l {
            s[j * l + j] += self.ridge;
        }
        s
    }

    /// `wᵀ S_A w / wᵀ S_B w` with the unregularised `S_B`.
    pub fn quotient(&self, w: &[f64]) -> f64 {
        let num = dot(&self.cross, w);
        num * num / quadratic_form(&self.within, w)
    }
}

fn quadratic_form(a: &[f64], w: &[f64]) -> f64 {
    let l = w.len();
    let mut acc = 0.0;
    for i in 0..l {
        for j in 0..l {
            acc += w[i] * a[i * l + j] * w[j];
        }
    }
    acc
}

pub fn scatter_matrices(xk: &WindowMatrix, gl: &[f64]) -> Result<Scatter> {
    let x = &xk.values;
    if x.rows() != gl.len() {
        return Err(Error::DimensionMismatch {
            what: "aligned glucose",
            expected: x.rows(),
            found: gl.len(),
        });
    }
    let l = xk.window;
    let mut within = alloc::vec![0.0; l * l];
    let mut cross = alloc::vec![0.0; l];
    for (row, &g) in x.row_iter().zip(gl) {
        for i in 0..l {
            cross[i] += row[i] * g;
            for j in 0..l {
                within[i * l + j] += row[i] * row[j];
            }
        }
    }
    let mut between = alloc::vec![0.0; l * l];
    for i in 0..l {
        for j in 0..l {
            between[i * l + j] = cross[i] * cross[j];
        }
    }
    let trace: f64 = (0..l).map(|j| within[j * l + j]).sum();
    Ok(Scatter {
        between,
        within,
        cross,
        ridge: RIDGE * trace / l as f64,
    })
}

/// Maximiser of the window quotient for one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragingSolution {
    /// Unit-norm weights, signed so that `(X w)ᵀ g ≥ 0`.
    pub weights: Vec<f64>,
    /// Attained `wᵀ S_A w / wᵀ S_B w`.
    pub quotient: f64,
    /// `quotient / gᵀg`, the squared cosine between `X w` and `g`; in `[0, 1]`.
    pub normalized_quotient: f64,
}

pub fn solve_averaging_weights(xk: &WindowMatrix, gl: &[f64]) -> Result<AveragingSolution> {
    let scatter = scatter_matrices(xk, gl)?;
    let g_energy = dot(gl, gl);
    if g_energy.is_nan() || g_energy <= 0.0 {
        return Err(Error::ZeroGlucoseNorm);
    }
    let v = cholesky_solve(&scatter.regularized_within(), &scatter.cross)?;
    let len = norm(&v);
    if !(len.is_finite() && len > 0.0) {
        // Xᵀg = 0: every direction attains zero and there is no maximiser
        return Err(Error::Singular);
    }
    let mut weights: Vec<f64> = v.iter().map(|c| c / len).collect();
    if dot(&scatter.cross, &weights) < 0.0 {
        weights.iter_mut().for_each(|c| *c = -*c);
    }
    let quotient = scatter.quotient(&weights);
    if !quotient.is_finite() {
        return Err(Error::Singular);
    }
    Ok(AveragingSolution {
        normalized_quotient: quotient / g_energy,
        quotient,
        weights,
    })
}

/// Squared cosine between two vectors (uncentred), zero if either vanishes.
pub fn cos_squared(a: &[f64], b: &[f64]) -> f64 {
    let ab = dot(a, b);
    let denom = dot(a, a) * dot(b, b);
    if denom > 0.0 {
        ab * ab / denom
    } else {
        0.0
    }
}

/// Learned per-feature window weights, plus the unit-energy gains of the
/// averaged training features once those are known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragingModel {
    pub window: usize,
    pub weights: Vec<Vec<f64>>,
    pub gains: Option<NormalizationGains>,
}

impl AveragingModel {
    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    /// `Σ_j w_kj`, the response of feature `k`'s filter to a constant series.
    pub fn dc_gain(&self, feature: usize) -> f64 {
        self.weights[feature].iter().sum()
    }

    /// Maps selected rows of a chronological feature series into the averaged
    /// feature space (before the unit-energy gains).
    pub fn transform_rows(
        &self,
        series: &Matrix,
        rows: &[usize],
        mode: TestTransform,
    ) -> Result<Matrix> {
        if series.cols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                what: "averaging input features",
                expected: self.n_features(),
                found: series.cols(),
            });
        }
        let l = self.window;
        let mut out = Matrix::zeros(rows.len(), series.cols());
        for (r, &j) in rows.iter().enumerate() {
            if j >= series.rows() {
                return Err(Error::DimensionMismatch {
                    what: "series row index",
                    expected: series.rows(),
                    found: j,
                });
            }
            for (k, w) in self.weights.iter().enumerate() {
                let v = match mode {
                    TestTransform::History if j + 1 >= l => w
                        .iter()
                        .enumerate()
                        .map(|(t, c)| c * series.get(j + 1 - l + t, k))
                        .sum(),
                    TestTransform::History | TestTransform::DcGain => {
                        self.dc_gain(k) * series.get(j, k)
                    }
                    TestTransform::GainOnly => series.get(j, k),
                };
                out.set(r, k, v);
            }
        }
        Ok(out)
    }
}

/// How measurements outside the training set enter the averaged feature space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestTransform {
    /// Each row is window-averaged with its preceding `L - 1` rows of the
    /// chronological series, using the learned weights. Rows without a full
    /// history fall back to [`TestTransform::DcGain`].
    #[default]
    History,
    /// Each value is multiplied by its filter's DC gain `Σ w`.
    DcGain,
    /// Values are left as measured; only the unit-energy gains apply.
    GainOnly,
}

fn average_feature(x: &[f64], gl: &[f64], window: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let xk = build_window_matrix(x, window)?;
    let sol = solve_averaging_weights(&xk, gl)?;
    let y = xk.apply(&sol.weights);
    Ok((sol.weights, y))
}

/// Averages every feature of `train` and returns the model together with the
/// averaged dataset (N-L+1 rows, paired with window-end glucose).
pub fn fit_feature_averaging(train: &Dataset, window: usize) -> Result<(AveragingModel, Dataset)> {
    let n = train.n_rows();
    if window < 1 || window >= n {
        return Err(Error::InvalidWindow { window, len: n });
    }
    let gl = align_glucose(train.glucose(), window)?;
    let columns: Vec<Vec<f64>> = (0..train.n_features())
        .map(|k| train.features().column(k))
        .collect();

    let solve = |(k, x): (usize, &Vec<f64>)| {
        average_feature(x, &gl, window).map_err(|e| Error::Feature {
            feature: k,
            source: alloc::boxed::Box::new(e),
        })
    };
    #[cfg(feature = "parallel")]
    let solved: Result<Vec<_>> = {
        use rayon::prelude::*;
        columns.par_iter().enumerate().map(solve).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let solved: Result<Vec<_>> = columns.iter().enumerate().map(solve).collect();

    let (weights, averaged): (Vec<_>, Vec<_>) = solved?.into_iter().unzip();
    let features = Matrix::from_columns(&averaged)?;
    let out = Dataset::new(features, gl, train.feature_names().to_vec())?;
    Ok((
        AveragingModel {
            window,
            weights,
            gains: None,
        },
        out,
    ))
}
