//! Bound formulas, goodness-of-fit statistics and Monte Carlo experiments.

mod bounds;
pub mod claims;
mod reports;
mod stats;

pub use bounds::{central_binomial, expectation_bound, sutton_witt_reference, theorem1_bound};
pub use reports::{
    bound_report, equidist_over_orbit, uniformity_random_init, BoundReport, BoundRow,
    EquidistReport,
};
pub use stats::{binomial_se, chi_square_critical_999, chi_square_equidist, ChiSquare, CONFIDENCE_SE};
