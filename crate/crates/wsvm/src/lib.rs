//! Multiclass conditional class probability estimation with weighted
//! support vector machines.
//!
//! A binary weighted SVM trained at weight π has a decision function whose
//! sign estimates sign[q(x) − π]; sweeping π over a grid and locating the
//! sign change turns a family of classifiers into a conditional probability
//! estimate. This crate builds that machinery and three ways of assembling
//! binary estimates into K-class probabilities:
//!
//! - **pairwise coupling** (`pairwise`): train every class pair, pick a
//!   per-point baseline by vote, couple the ratios;
//! - **baseline learning** (`b1`, `b2`): train only the K−1 pairs against a
//!   fixed reference class (largest class, or median aggregated distance),
//!   with an optional algebraic reconstruction of the full pairwise table
//!   (`bp1`, `bp2`);
//! - **one-vs-all** (`ova`): train each class against the pooled rest and
//!   read its probability directly.
//!
//! Hyperparameters (λ, σ) are selected per binary task by grid search under
//! the generalized Kullback-Leibler loss (GKL, truth required) or its
//! empirical proxy (EGKL). The [`data`] module ships four synthetic
//! benchmark generators with analytic class probabilities, [`metrics`]
//! implements the evaluation losses, and [`commands`] backs the `wsvm`
//! command-line tool (`simulate`, `fit`, `predict`, `eval`, `benchmark`).
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability.

pub mod commands;
pub mod data;
pub mod error;
pub mod kernel;
pub mod ladder;
pub mod metrics;
pub mod model;
pub mod schemes;
pub mod solver;
pub mod train;
pub mod tuning;
pub mod types;

pub use error::{Error, Result};
pub use model::{ModelBundle, Prediction, SchemeModel};
pub use schemes::{ProbEstimate, SchemeKind, VoteRule};
pub use train::{fit_scheme, FitOptions, FittedScheme};
pub use tuning::TuneCriterion;
