//! Robust estimation built on l1-regularized outlier isolation.
//!
//! - [`loire`]: joint regression and outlier isolation by alternating
//!   least squares and soft thresholding.
//! - [`bernoulli`]: the approximate Bernoulli (l0) estimator, an exhaustive
//!   oracle for small problems and the Bernoulli log-likelihood.
//! - [`factorization`]: robust rank factorization `Y ~ A X + B`.
//! - [`bench`]: synthetic instances, detection metrics and baselines.
//! - [`matrix`]: the dense linear algebra underneath.

pub mod bench;
pub mod bernoulli;
pub mod error;
pub mod factorization;
pub mod loire;
pub mod matrix;

pub use bernoulli::{
    app_bem, bernoulli_log_likelihood, bernoulli_oracle, detect_support, BemSolution,
    OracleConfig, SupportSet,
};
pub use error::{Error, Result};
pub use factorization::{rrf_objective, rrf_solve, FactorizationConfig, FactorizationSolution};
pub use loire::{loire_objective, loire_solve, LoireConfig, LoireSolution};
pub use matrix::{
    least_squares_solve, soft_threshold, truncated_svd, DenseMatrix, DenseVector, TruncatedSvd,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
