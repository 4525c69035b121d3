//! Agnostic learning of halfspaces with adversarially robust output.
//!
//! The pipeline learns a real-valued polynomial by constrained L1 regression
//! (a linear program with noise-sensitivity constraints), rounds it to a
//! four-threshold mixture of polynomial threshold functions, partitions the
//! input space along a random direction orthogonal to the relevant indicator
//! means, and wraps each part in a local smoothing corrector. The trained
//! hypothesis serializes to a small JSON package that a verifier can recompile
//! and certify point-by-point.
//!
//! Numeric kernels ([`poly`], [`gauss`], [`lpsolve`], [`sensitivity`]) are
//! generic over the scalar type; the pipeline modules run on `f64` via the
//! aliases exported at the crate root.

pub mod corrector;
pub mod dist;
pub mod gauss;
pub mod harness;
pub mod lpsolve;
pub mod num;
pub mod partition;
pub mod poly;
pub mod regression;
pub mod rng;
pub mod rounding;
pub mod sensitivity;
pub mod util;
pub mod verify;

mod error;

pub use error::{Error, Result};

/// Dense multivariate polynomial over `f64`.
pub type Polynomial = poly::Polynomial<f64>;
/// Polynomial threshold function over `f64`.
pub type Ptf = poly::Ptf<f64>;
/// Linear program over `f64`.
pub type LpProblem = lpsolve::LpProblem<f64>;
/// Linear program solution over `f64`.
pub type LpSolution = lpsolve::LpSolution<f64>;
/// Shared Gaussian perturbation set over `f64`.
pub type PerturbationSet = sensitivity::PerturbationSet<f64>;
