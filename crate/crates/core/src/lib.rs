//! Numerical laboratory for exponential last passage percolation in the
//! point-to-line (flat) and point-to-half-line (half-flat) geometries.
//!
//! The distribution of the last passage time is computed four ways:
//!
//! * Monte Carlo simulation ([`sim`]),
//! * exact determinant ratios ([`exact`]),
//! * finite-N Fredholm determinants ([`fredholm::finite`]),
//! * the limiting GOE Tracy-Widom and Airy2->1 distributions ([`fredholm::limits`]),
//!
//! and the [`asymptotics`] module compares them along the KPZ scaling.
//!
//! Rates are always rates: a site with parameter `r` carries an
//! exponential variable with mean `1/r`.

pub mod acceptance;
pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod fredholm;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod sim;
pub mod special;

pub use asymptotics::{
    convergence_study, j_n, j_n_rescaled, ConvergenceRow, ConvergenceTable, Route, ScalingPoint,
};
pub use error::{Error, Result};
pub use exact::{cauchy_det, cdf_exact, h_entry, simplex_integral_oracle, KernelEntryMatrix, SchurPoint};
pub use fredholm::contour::ContourSpec;
pub use fredholm::finite::{finite_n_kernel, fredholm_cdf_finite_n};
pub use fredholm::limits::{f1, f21, kernel_airy2, kernel_airy21, kernel_goe};
pub use fredholm::{nystrom_det, series_det_oracle, FredholmResult, KernelId};
pub use model::{Geometry, ModelParams, WeightArray};
pub use quadrature::QuadratureRule;
pub use sim::{enumerate_paths_oracle, estimate_cdf, last_passage_time, sample_weights, CdfEstimate};
pub use special::{airy, airy_ai, airy_ai_prime, AiryEvaluation, AiryMethod};
