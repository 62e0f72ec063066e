//! Logarithmic kernels and potentials on ℂⁿ and ℙⁿ (n = 1, 2, 3), their
//! complex Monge–Ampère and k-Hessian densities, Riesz potentials, and the
//! concentration-dimension machinery that links the two, at desk scale.
//!
//! Module map:
//! - [`geometry`]: complex vectors, projective points, wedge norms, charts.
//! - [`kernels`]: the pair kernels K, N, N_ε, G and derivatives of N_ε.
//! - [`measures`]: discrete measures, sampled families, concentration Q_μ.
//! - [`potentials`]: potentials of measures, gradients, Hessians, MA masses.
//! - [`riesz`]: Riesz potentials J_{μ,α}, critical exponents, L^p probes.
//! - [`quadrature`]: deterministic grids, radial/sphere rules on ℙⁿ, MC.
//! - [`verify`]: the acceptance checks shared by the CLI and the test suite.

// `!(x > 0.0)` deliberately treats NaN as out of range wherever inputs are
// validated; rewriting as `x <= 0.0` would silently accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod kernels;
pub mod measures;
pub mod potentials;
pub mod quadrature;
pub mod riesz;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{AffinePoint, CVec, ChartIndex, ProjectivePoint};
pub use kernels::{HermitianMatrix, RegEps};
pub use measures::Measure;
pub use potentials::{MaDensity, MaNormalization, PotentialField, RobinEstimate, Twist};
pub use verify::{run_suite, CheckResult, Suite, SuiteReport};
