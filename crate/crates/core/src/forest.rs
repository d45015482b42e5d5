//! CART regression forest.
//!
//! Trees are grown on bootstrap resamples with variance-reduction splits. At
//! every node `mtry` features are drawn at random and each is scanned over the
//! midpoints between its sorted distinct values. Equal gains resolve to the
//! lowest feature index, then the lowest threshold. If none of the drawn
//! features admits a split the remaining features are tried as well.
//!
//! Tree `t` draws from ChaCha8 stream `t` keyed by the forest seed, so a fit is
//! identical whether trees are grown serially or in parallel.

use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{rng, Error, Matrix, Result};

/// Feature index stored for leaf nodes.
const LEAF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Candidate features per node; `None` means `ceil(K / 3)`.
    pub mtry: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            mtry: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, n_features: usize) -> usize {
        self.mtry.unwrap_or_else(|| n_features.div_ceil(3)).max(1)
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidConfig("n_trees must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidConfig(
                "min_samples_leaf must be at least 1".into(),
            ));
        }
        if self.max_depth == Some(0) {
            return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
        }
        if self.mtry == Some(0) || self.resolved_mtry(n_features) > n_features {
            return Err(Error::InvalidConfig(alloc::format!(
                "mtry must lie in 1..={n_features}"
            )));
        }
        Ok(())
    }
}

/// One regression tree stored as parallel node arrays. Node 0 is the root.
/// Internal nodes send `x[feature] <= threshold` to `left`, the rest to
/// `right`; leaves carry `feature == u32::MAX` and their prediction in `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub feature: Vec<u32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub value: Vec<f64>,
}

impl Tree {
    pub fn n_nodes(&self) -> usize {
        self.feature.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.feature.iter().filter(|&&f| f == LEAF).count()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = 0usize;
        loop {
            let f = self.feature[node];
            if f == LEAF {
                return self.value[node];
            }
            node = if x[f as usize] <= self.threshold[node] {
                self.left[node] as usize
            } else {
                self.right[node] as usize
            };
        }
    }

    fn push_leaf(&mut self, value: f64) -> usize {
        self.feature.push(LEAF);
        self.threshold.push(0.0);
        self.left.push(0);
        self.right.push(0);
        self.value.push(value);
        self.feature.len() - 1
    }

    /// Structural consistency check used after deserialisation.
    pub fn validate(&self, n_features: usize) -> Result<()> {
        let n = self.feature.len();
        let lens = [
            self.threshold.len(),
            self.left.len(),
            self.right.len(),
            self.value.len(),
        ];
        if n == 0 || lens.iter().any(|&l| l != n) {
            return Err(Error::InvalidConfig(
                "tree node arrays are inconsistent".into(),
            ));
        }
        for i in 0..n {
            if self.feature[i] == LEAF {
                if !self.value[i].is_finite() {
                    return Err(Error::InvalidConfig("tree leaf is not finite".into()));
                }
                continue;
            }
            let (l, r) = (self.left[i] as usize, self.right[i] as usize);
            // children are always stored after their parent, which rules out cycles
            if self.feature[i] as usize >= n_features || l <= i || r <= i || l >= n || r >= n {
                return Err(Error::InvalidConfig("tree node links are invalid".into()));
            }
        }
        Ok(())
    }
}

/// Bagged ensemble of regression trees with normalised impurity importances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    pub n_features: usize,
    pub trees: Vec<Tree>,
    pub importances: Vec<f64>,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
    n_left: usize,
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    params: &'a ForestParams,
    mtry: usize,
    tree: Tree,
    /// Weighted impurity decrease per feature for this tree.
    decrease: Vec<f64>,
}

/// Mean computed as an offset from the first value, so a node whose targets
/// are all equal reproduces that value exactly.
fn node_mean(y: &[f64], idx: &[usize]) -> f64 {
    let base = y[idx[0]];
    let offset: f64 = idx.iter().map(|&i| y[i] - base).sum();
    base + offset / idx.len() as f64
}

impl Grower<'_> {
    fn grow<R: Rng>(&mut self, rng: &mut R, idx: &mut [usize], depth: usize) -> usize {
        let mean = node_mean(self.y, idx);
        let constant = idx.iter().all(|&i| self.y[i] == self.y[idx[0]]);
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        if constant || !depth_ok || idx.len() < 2 * self.params.min_samples_leaf {
            return self.tree.push_leaf(mean);
        }
        let Some(split) = self.best_split(rng, idx, mean) else {
            return self.tree.push_leaf(mean);
        };

        self.decrease[split.feature] += split.gain;
        let node = self.tree.push_leaf(mean);
        self.tree.feature[node] = split.feature as u32;
        self.tree.threshold[node] = split.threshold;

        let f = split.feature;
        let x = self.x;
        idx.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)).then(a.cmp(&b)));
        let (left_idx, right_idx) = idx.split_at_mut(split.n_left);
        let left = self.grow(rng, left_idx, depth + 1);
        let right = self.grow(rng, right_idx, depth + 1);
        self.tree.left[node] = left as u32;
        self.tree.right[node] = right as u32;
        node
    }

    fn best_split<R: Rng>(&self, rng: &mut R, idx: &[usize], mean: f64) -> Option<Split> {
        let k = self.x.cols();
        let mut order: Vec<usize> = (0..k).collect();
        // partial Fisher-Yates: the first `mtry` slots become the candidates
        for i in 0..self.mtry.min(k) {
            let j = rng.random_range(i..k);
            order.swap(i, j);
        }
        let (drawn, rest) = order.split_at_mut(self.mtry.min(k));
        drawn.sort_unstable();
        rest.sort_unstable();
        self.scan(drawn, idx, mean)
            .or_else(|| self.scan(rest, idx, mean))
    }

    fn scan(&self, features: &[usize], idx: &[usize], mean: f64) -> Option<Split> {
        let min_leaf = self.params.min_samples_leaf;
        let n = idx.len();
        let mut best: Option<Split> = None;
        let mut sorted: Vec<(f64, f64)> = Vec::with_capacity(n);
        for &f in features {
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.x.get(i, f), self.y[i] - mean)));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let total: f64 = sorted.iter().map(|p| p.1).sum();
            let mut left_sum = 0.0;
            for pos in 1..n {
                left_sum += sorted[pos - 1].1;
                let (lo, hi) = (sorted[pos - 1].0, sorted[pos].0);
                if lo == hi || pos < min_leaf || n - pos < min_leaf {
                    continue;
                }
                let right_sum = total - left_sum;
                // sum-of-squares decrease with centred targets
                let gain = left_sum * left_sum / pos as f64
                    + right_sum * right_sum / (n - pos) as f64
                    - total * total / n as f64;
                if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(Split {
                        feature: f,
                        threshold,
                        gain,
                        n_left: pos,
                    });
                }
            }
        }
        best
    }
}

fn fit_tree(x: &Matrix, y: &[f64], params: &ForestParams, tree_index: usize) -> (Tree, Vec<f64>) {
    let n = x.rows();
    let mut rng = rng::stream(params.seed, tree_index as u64);
    let mut idx: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let mut grower = Grower {
        x,
        y,
        params,
        mtry: params.resolved_mtry(x.cols()),
        tree: Tree {
            feature: Vec::new(),
            threshold: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            value: Vec::new(),
        },
        decrease: alloc::vec![0.0; x.cols()],
    };
    grower.grow(&mut rng, &mut idx, 0);
    let per_sample = grower.decrease.iter().map(|d| d / n as f64).collect();
    (grower.tree, per_sample)
}

pub fn fit_forest(x: &Matrix, y: &[f64], params: &ForestParams) -> Result<Forest> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "forest targets",
            expected: x.rows(),
            found: y.len(),
        });
    }
    if x.rows() < 2 {
        return Err(Error::TooFewRows {
            what: "forest",
            needed: 2,
            found: x.rows(),
        });
    }
    params.validate(x.cols())?;
    if let Some(p) = x.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: p / x.cols(),
            col: p % x.cols(),
        });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: i,
            col: x.cols(),
        });
    }

    #[cfg(feature = "parallel")]
    let fitted: Vec<(Tree, Vec<f64>)> = {
        use rayon::prelude::*;
        (0..params.n_trees)
            .into_par_iter()
            .map(|t| fit_tree(x, y, params, t))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let fitted: Vec<(Tree, Vec<f64>)> = (0..params.n_trees)
        .map(|t| fit_tree(x, y, params, t))
        .collect();

    let k = x.cols();
    let mut importances = alloc::vec![0.0; k];
    let mut trees = Vec::with_capacity(fitted.len());
    for (tree, decrease) in fitted {
        for (acc, d) in importances.iter_mut().zip(&decrease) {
            *acc += d / params.n_trees as f64;
        }
        trees.push(tree);
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total);
    } else {
        // nothing was ever split, e.g. a constant target
        importances.iter_mut().for_each(|v| *v = 1.0 / k as f64);
    }
    Ok(Forest {
        params: *params,
        n_features: k,
        trees,
        importances,
    })
}

impl Forest {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                what: "forest input",
                expected: self.n_features,
                found: x.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    pub fn predict_rows(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.row_iter().map(|r| self.predict(r)).collect()
    }

    pub fn feature_importance(&self) -> &[f64] {
        &self.importances
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() || self.importances.len() != self.n_features {
            return Err(Error::InvalidConfig("forest is empty or malformed".into()));
        }
        self.trees
            .iter()
            .try_for_each(|t| t.validate(self.n_features))
    }
}

pub fn predict_forest(f: &Forest, x: &[f64]) -> Result<f64> {
    f.predict(x)
}

pub fn feature_importance(f: &Forest) -> Vec<f64> {
    f.importances.clone()
}
