//! Tolerance stack-up analysis for assemblies whose inputs are uniformly
//! distributed within their tolerance intervals.
//!
//! A [`StackChain`] holds the weighted contributor half-widths. The
//! [`bounds`] module turns a chain and a confidence level into output
//! half-widths (worst case, RSS, Gaussian, Hoeffding, Chernov, Lipschitz,
//! Quadratic and the industrial regression rule); [`montecarlo`] provides
//! a seeded sampling oracle and [`study`] batch runs over random chains.

pub mod bounds;
pub mod chain;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod numerics;
pub mod study;

pub use bounds::{
    airbus_t, analyze_all, chernov_prob, chernov_t, gaussian_l, hoeffding_t, lipschitz_t, phi, psi,
    psi_tilde, quadratic_t, s_lambda, ConfidenceLevel, CurvePoint, Method, QuadraticConstant,
    ToleranceResult,
};
pub use chain::{build_chain, BalanceReport, Contributor, StackChain};
pub use error::{Error, Result};
pub use montecarlo::{mc_prob, mc_quantile, Estimate, McConfig};
pub use study::{run_study, StudyRow, StudySpec};
