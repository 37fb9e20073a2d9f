//! Mesoscopic linear statistics of zeta zeros and their Monte Carlo study.
//!
//! Heights are rescaled by s = 2πn/log T: a zero γ sits at x = (γ − t)/s.

mod sampling;
mod smoothed;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub(crate) use sampling::moment_report;
pub use sampling::{
    draw_samples, sample_clt, sampling_coverage, smoothed_moment, summarize, write_samples_csv, HeightLaw, MomentMode,
    MomentOptions, MomentReport, Sample, SmoothedMoment,
};
pub use smoothed::{
    archimedean_term, g_gamma_terms, linear_statistic_smoothed, ArchimedeanTerm, GammaTerms, SmoothedStatistic,
    SmoothedSum,
};

use crate::error::{require, Result};
use crate::quad::{adaptive_pieces, Tolerance};
use crate::testfn::{BumpKernel, FourierPair, SmoothingWeight, TestFunction};
use crate::zeros::ZeroTable;

/// Spacing s = 2πn/log T of the rescaled window.
pub fn window_scale(n: f64, height: f64) -> f64 {
    2.0 * PI * n / height.ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "T")]
    pub height: f64,
    pub n: f64,
    pub eta: TestFunction,
    pub kernel: BumpKernel,
    /// None samples t uniformly on [T, 2T]; otherwise t/T has density σ.
    pub weight: Option<SmoothingWeight>,
    pub samples: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(height: f64, n: f64, eta: TestFunction, samples: usize, master_seed: u64) -> Self {
        ExperimentConfig { height, n, eta, kernel: BumpKernel::default(), weight: None, samples, master_seed }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.height >= 100.0, "T", self.height, "T ≥ 100")?;
        let cap = 0.5 * self.height.ln();
        require(self.n >= 1.0 && self.n <= cap, "n", self.n, &format!("need 1 ≤ n ≤ (log T)/2 = {cap:.4}"))?;
        require(self.samples >= 1, "samples", self.samples as f64, "at least one sample")?;
        if let Some(w) = &self.weight {
            w.validate()?;
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        window_scale(self.n, self.height)
    }
}

/// Δ_η(t) = Σ_γ η((γ − t)/s), over zeros at ±γ, with multiplicity.
/// Each piece [a, b) of η collects the zeros with t + a·s ≤ γ < t + b·s.
pub fn linear_statistic(table: &ZeroTable, eta: &TestFunction, n: f64, height: f64, t: f64) -> Result<f64> {
    require(n > 0.0, "n", n, "n > 0")?;
    require(height > 1.0, "T", height, "T > 1")?;
    let s = window_scale(n, height);
    let (lo, hi) = eta.support();
    table.check_coverage(t + lo * s, t + hi * s)?;
    let ords = table.ordinates();
    let mut total = 0.0;
    for piece in eta.pieces() {
        let a = t + piece.start * s;
        let b = t + piece.end * s;
        if b > 0.0 {
            let r = table.index_range(a.max(0.0), b);
            if piece.slope == 0.0 {
                total += piece.constant * (table.weight_before(r.end) - table.weight_before(r.start)) as f64;
            } else {
                for i in r {
                    total += piece.at((ords[i] - t) / s) * table.multiplicity(i) as f64;
                }
            }
        }
        if a < 0.0 {
            // −γ ∈ [a, b) ⇔ γ ∈ (−b, −a].
            let first = ords.partition_point(|&g| g <= (-b).max(0.0));
            let last = ords.partition_point(|&g| g <= -a);
            for i in first..last.max(first) {
                total += piece.at((-ords[i] - t) / s) * table.multiplicity(i) as f64;
            }
        }
    }
    Ok(total)
}

/// n·∫η.
pub fn predicted_mean(eta: &TestFunction, n: f64) -> f64 {
    n * eta.integral()
}

/// ∫_{−n}^{n} |x| |η̂(x)|² dx.
pub fn predicted_variance(eta: &dyn FourierPair, n: f64) -> Result<f64> {
    require(n >= 1.0, "n", n, "n ≥ 1")?;
    let (lo, hi) = eta.spatial_extent();
    // |η̂|² oscillates on the scale 1/(hi − lo).
    let step = (1.0 / (hi - lo)).max(n / 2e6);
    let cells = (n / step).ceil() as usize;
    let mut breaks: Vec<f64> = (0..=cells).map(|i| (step * i as f64).min(n)).collect();
    breaks.extend(eta.frequency_breaks().into_iter().filter(|&b| b > 0.0 && b < n));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let tol = Tolerance { abs: 1e-13, rel: 1e-10, order: 16 };
    let half = adaptive_pieces(
        |x: f64| {
            let plus = eta.fourier(x).norm_sqr();
            let minus = eta.fourier(-x).norm_sqr();
            x * (plus + minus)
        },
        &breaks,
        tol,
    )?;
    Ok(half)
}

/// c_k = E Z^k for a standard normal Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub k: u32,
    pub value: f64,
}

impl GaussianMoments {
    pub fn new(k: u32) -> Self {
        GaussianMoments { k, value: gaussian_moment(k) }
    }
}

/// (k−1)!! for even k, 0 for odd k.
pub fn gaussian_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    (1..k).step_by(2).map(|j| j as f64).product()
}
