//! Intensity-weighted velocity diagrams and fractal complexity.
//!
//! The temporal PSD `M(j, f)` of each velocity row is modelled as `a / |f|^β`;
//! fitting `ln M = ln a − β·ln f` over positive frequencies gives β per row,
//! and fitting the velocity-integrated spectrum gives β̄. Lower β̄ means the
//! motion carries more information.

mod fractal;
mod iwv;
mod welch;

pub use fractal::{
    beta_bar, beta_bar_with, compare_complexity, comparison_report, fit_fractal, fit_power_law, power_law_noise, summarize_betas, ComplexitySummary,
    FractalFit, VelocityBins,
};
pub use iwv::{iwv_diagram, IwvDiagram, DEFAULT_VELOCITY_BINS};
pub use welch::{welch_psd, PsdMatrix, DEFAULT_SEGMENT_LEN};
