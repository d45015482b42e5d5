//! Non-invasive blood-glucose estimation from pre-extracted biosignal features.
//!
//! The crate is `no_std` (with `alloc`) and holds the numerical pipeline only:
//!
//! * [`dataset`]: the feature/glucose container, seeded train/test splitting and
//!   unit-energy normalisation of feature columns.
//! * [`averaging`]: per-feature sliding-window weights that maximise the
//!   alignment between the averaged feature and the reference glucose (a rank-one
//!   generalised Rayleigh quotient with a closed-form maximiser).
//! * [`forest`]: CART regression forest with impurity-based importances.
//! * [`piecewise`]: the three-subset model, where test rows are routed to a
//!   glucose-range forest by importance-weighted distance to subset centroids.
//! * [`metrics`] and [`ega`]: accuracy indicators and Clarke error grid zoning.
//! * [`synth`]: seeded synthetic datasets with a controllable glucose signal.
//!
//! File formats, reports and the command-line tool live in the `glucose` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod averaging;
pub mod dataset;
pub mod ega;
mod error;
pub mod forest;
mod linalg;
pub mod matrix;
pub mod metrics;
pub mod piecewise;
mod rng;
pub mod synth;

pub use averaging::{AveragingModel, AveragingSolution, TestTransform, WindowMatrix};
pub use dataset::{Dataset, NormalizationGains, SplitConfig};
pub use ega::{EgaReport, Zone};
pub use error::{Error, Result};
pub use forest::{Forest, ForestParams};
pub use matrix::Matrix;
pub use metrics::MetricsReport;
pub use piecewise::{Centroids, PiecewisePipeline, SubsetPartition};
pub use synth::SynthConfig;
