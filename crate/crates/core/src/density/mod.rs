//! Zero-density machinery: off-axis counts N(σ, T), windowed L^k averages,
//! moments of S(t + h) − S(t), and synthetic off-axis ensembles.

mod corollary;
mod fujii;
mod sweep;
mod synth;
mod windows;

pub use corollary::{envelope_moment, window_count_moment, EnvelopeMoment, WindowMoment};
pub use fujii::{fujii_coverage, fujii_moment, FujiiMoment};
pub use sweep::{weight_integral, window_segments, Segment};
pub use synth::{synthesize_offline_zeros, EnsembleParameters, SyntheticEnsemble, COVERAGE_FACTOR};
pub use windows::{
    check_window, count_off_axis, q_smoothed_lk, windowed_lk, write_density_csv, DensityParameters, DensityReport,
    StepFunction, StepPiece,
};

use crate::testfn::SmoothingWeight;

/// Range of t/T that holds the weight: exact for the indicator, ±400 widths
/// around the center otherwise.
pub(crate) fn weight_span(weight: &SmoothingWeight) -> (f64, f64) {
    match *weight {
        SmoothingWeight::Uniform { lo, hi } => (lo, hi),
        _ => {
            let (c, w) = weight.center_and_width();
            (c - 400.0 * w, c + 400.0 * w)
        }
    }
}
