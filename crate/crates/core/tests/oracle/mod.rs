//! Independent maximisers of the window quotient, used only by tests.
//!
//! Neither route touches the crate's solver: the dense route whitens the pencil
//! with nalgebra's symmetric eigensolver, and the search route samples random
//! unit directions and polishes the best one by hill climbing.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random problem instance: a feature series and glucose for its windows.
pub struct Instance {
    pub series: Vec<f64>,
    pub window: usize,
    pub glucose: Vec<f64>,
}

pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = rng.random_range(1..=5);
    let n = rng.random_range((2 * window + 2).max(6)..=30);
    let series: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..3.0)).collect();
    let glucose: Vec<f64> = (0..n - window + 1)
        .map(|_| rng.random_range(4.0..12.0))
        .collect();
    Instance {
        series,
        window,
        glucose,
    }
}

pub fn window_rows(series: &[f64], window: usize) -> DMatrix<f64> {
    let rows = series.len() - window + 1;
    DMatrix::from_fn(rows, window, |i, j| series[i + j])
}

/// `(gᵀ X w)² / (gᵀg · ‖X w‖²)`
pub fn normalized_quotient(x: &DMatrix<f64>, g: &[f64], w: &[f64]) -> f64 {
    let g = DVector::from_column_slice(g);
    let xw = x * DVector::from_column_slice(w);
    let num = g.dot(&xw);
    num * num / (g.dot(&g) * xw.dot(&xw))
}

/// Largest eigenvalue of `S_B^{-1/2} S_A S_B^{-1/2}` divided by `gᵀg`.
pub fn dense_pencil_max(x: &DMatrix<f64>, g: &[f64]) -> f64 {
    let gv = DVector::from_column_slice(g);
    let sb = x.transpose() * x;
    let u = x.transpose() * &gv;
    let sa = &u * u.transpose();
    let eig = sb.symmetric_eigen();
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let whiten = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let m = &whiten * sa * &whiten;
    let top = m.symmetric_eigen().eigenvalues.max();
    top / gv.dot(&gv)
}

/// Best of `samples` random unit directions, then refined by a shrinking-step
/// random hill climb.
pub fn random_search_max(x: &DMatrix<f64>, g: &[f64], samples: usize, seed: u64) -> f64 {
    let l = x.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_w = vec![0.0; l];
    let mut best = f64::NEG_INFINITY;
    let mut w = vec![0.0; l];
    for _ in 0..samples {
        for c in w.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let q = normalized_quotient(x, g, &w);
        if q > best {
            best = q;
            best_w.clone_from(&w);
        }
    }
    let mut step = 0.1;
    let mut trial = vec![0.0; l];
    while step > 1e-13 {
        let mut improved = false;
        for _ in 0..40 * l {
            let scale = step * best_w.iter().map(|c| c * c).sum::<f64>().sqrt();
            for (t, b) in trial.iter_mut().zip(&best_w) {
                let z: f64 = rng.sample(StandardNormal);
                *t = b + scale * z;
            }
            let q = normalized_quotient(x, g, &trial);
            if q > best {
                best = q;
                best_w.clone_from(&trial);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Random unit vectors for dominance checks.
pub fn random_unit_vectors(l: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..l).map(|_| rng.sample(StandardNormal)).collect();
            let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / n).collect()
        })
        .collect()
}
