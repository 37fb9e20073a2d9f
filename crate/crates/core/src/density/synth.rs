//! Synthetic zero sets with a prescribed off-axis law.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::seed::sample_rng;
use crate::specialfn::omega;
use crate::zeros::{TableSource, ZeroTable};

/// Ordinates are generated up to this multiple of the target height, so that
/// windows and Q tails above T stay inside the table.
pub const COVERAGE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticEnsemble {
    /// Covers (0, COVERAGE_FACTOR·T]; A is stored with reference height T.
    pub table: ZeroTable,
    pub density_constant: f64,
    pub target_height: f64,
    pub offaxis_fraction: f64,
    pub seed: u64,
}

/// Header fields of an ensemble, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParameters {
    #[serde(rename = "T")]
    pub target_height: f64,
    pub c: f64,
    pub offaxis_fraction: f64,
    pub seed: u64,
    pub zeros: usize,
}

impl SyntheticEnsemble {
    pub fn parameters(&self) -> EnsembleParameters {
        EnsembleParameters {
            target_height: self.target_height,
            c: self.density_constant,
            offaxis_fraction: self.offaxis_fraction,
            seed: self.seed,
            zeros: self.table.len(),
        }
    }
}

/// Thinned Poisson ordinates with intensity max(Ω, 0)/2π; a fraction of them
/// receive A ~ Exp(c). One sequential stream, so the result depends only on
/// the arguments.
pub fn synthesize_offline_zeros(height: f64, c: f64, offaxis_fraction: f64, seed: u64) -> Result<SyntheticEnsemble> {
    require(height >= 100.0, "T", height, "T ≥ 100")?;
    require(c > 0.0 && c < 1.0, "c", c, "0 < c < 1")?;
    require((0.0..=1.0).contains(&offaxis_fraction), "offaxis_fraction", offaxis_fraction, "0 ≤ fraction ≤ 1")?;
    let top = COVERAGE_FACTOR * height;
    // Ω is increasing on (0, ∞).
    let ceiling = omega(top) / (2.0 * PI);
    let gap = Exp::new(ceiling).expect("positive rate");
    let displacement = Exp::new(c).expect("positive rate");
    let mut rng = sample_rng(seed, 0);
    let mut ordinates = Vec::new();
    let mut off_axis = Vec::new();
    let mut t = 0.0;
    loop {
        t += gap.sample(&mut rng);
        if t > top {
            break;
        }
        let accept = rng.gen::<f64>() * ceiling < omega(t).max(0.0) / (2.0 * PI);
        if !accept {
            continue;
        }
        let a = if rng.gen::<f64>() < offaxis_fraction { displacement.sample(&mut rng) } else { 0.0 };
        if ordinates.last().is_some_and(|&last| t <= last) {
            continue;
        }
        ordinates.push(t);
        off_axis.push(a);
    }
    let table = ZeroTable::new(ordinates, 0.0, top, TableSource::Synthetic)?.with_off_axis(off_axis, height)?;
    Ok(SyntheticEnsemble { table, density_constant: c, target_height: height, offaxis_fraction, seed })
}
