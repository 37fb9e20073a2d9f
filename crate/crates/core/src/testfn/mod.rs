//! Test functions, the bump kernel and band-limited smoothing, the Q kernel
//! and smoothing weights, envelopes and tail sums, and numerical checks of
//! the harmonic-analysis bounds.

mod envelope;
mod function;
mod kernel;
mod lemmas;
mod smooth;
mod weight;

use num_complex::Complex64;

pub use envelope::{envelope_m, tail_eps, tail_sum, CauchyDilate, CellSup, TailSum};
pub use function::{Piece, TestFunction};
pub use kernel::BumpKernel;
pub use lemmas::{check_pointwise_bound, l1_truncation_error, second_difference, TruncationNorm};
pub use smooth::{bandlimited_convolve, SmoothedFunction};
pub use weight::{q_kernel, SmoothingWeight, WeightFunction};

use crate::error::{require, Result};

/// A real function on ℝ together with its Fourier transform.
pub trait FourierPair: Sync {
    fn value(&self, u: f64) -> f64;

    fn value_left(&self, u: f64) -> f64 {
        self.value(u)
    }

    fn fourier(&self, x: f64) -> Complex64;

    /// Interval carrying the function (its support when compact).
    fn spatial_extent(&self) -> (f64, f64);

    /// Points where the function itself is not smooth.
    fn spatial_breaks(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Frequencies where the transform is not smooth.
    fn frequency_breaks(&self) -> Vec<f64> {
        Vec::new()
    }

    fn as_compact(&self) -> Option<&TestFunction> {
        None
    }
}

/// (sin πbu / πbu)², whose transform (1/b)·max(0, 1 − |x|/b) lives on [−b, b].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FejerSquare {
    bandwidth: f64,
}

impl FejerSquare {
    pub fn new(bandwidth: f64) -> Result<Self> {
        require(bandwidth > 0.0, "bandwidth", bandwidth, "> 0")?;
        Ok(FejerSquare { bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

impl FourierPair for FejerSquare {
    fn value(&self, u: f64) -> f64 {
        let s = function::sinc(std::f64::consts::PI * self.bandwidth * u);
        s * s
    }

    fn fourier(&self, x: f64) -> Complex64 {
        Complex64::from((1.0 - x.abs() / self.bandwidth).max(0.0) / self.bandwidth)
    }

    fn spatial_extent(&self) -> (f64, f64) {
        let r = 50.0 / self.bandwidth;
        (-r, r)
    }

    fn frequency_breaks(&self) -> Vec<f64> {
        vec![-self.bandwidth, 0.0, self.bandwidth]
    }
}
