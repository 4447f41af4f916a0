//! Exact dependence measures of bivariate copulas.
//!
//! * [`copula`]: the expression algebra (bounds, independence, shuffles of M,
//!   ordinal sums, reflections, mixtures) with exact evaluation and
//!   integration.
//! * [`measures`]: Spearman's rho, Kendall's tau, Spearman's footrule, Gini's
//!   gamma, Blomqvist's beta and Chatterjee's xi, in closed form.
//! * [`oracle`]: checkerboard and Monte Carlo estimators used as independent
//!   ground truth.
//! * [`region`]: the polyhedron of attainable `(φ, γ, τ)` triples.
//! * [`synthesis`]: explicit copulas attaining any point of that region.

pub mod copula;
pub mod error;
pub mod measures;
pub mod oracle;
pub mod region;
pub mod scalar;
pub mod synthesis;

pub use copula::{Axis, BaseCopula, CopulaExpr, ShuffleOfM};
pub use error::{Error, Result};
pub use measures::{all_measures, MeasureVector};
pub use scalar::Scalar;
pub use synthesis::{attain, attain_face, SynthesisResult};
