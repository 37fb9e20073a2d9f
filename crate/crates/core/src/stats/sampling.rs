use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{linear_statistic, predicted_mean, predicted_variance, window_scale, ExperimentConfig, SmoothedStatistic};
use crate::error::{require, Error, Result};
use crate::seed::sample_rng;
use crate::testfn::{BumpKernel, TestFunction, WeightFunction};
use crate::zeros::ZeroTable;

/// Points in the inverse-CDF grid for weighted height sampling.
pub const HEIGHT_GRID: usize = 1 << 16;
/// The grid spans this many bulk widths either side of the center before
/// being clipped to the table.
const BULK_SPAN: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sample_index: usize,
    pub t: f64,
    pub delta: f64,
    pub delta_prime: Option<f64>,
}

/// Summary of one Monte Carlo run. Field names are the JSON keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Central moments over the population standard deviation, k = 3..6.
    pub m3: f64,
    pub m4: f64,
    pub m5: f64,
    pub m6: f64,
    /// Kolmogorov–Smirnov distance of the standardized sample from N(0, 1).
    pub ks: f64,
    pub samples: usize,
    pub predicted_mean: f64,
    pub predicted_variance: f64,
    #[serde(rename = "T")]
    pub height: f64,
    pub n: f64,
}

impl MomentReport {
    pub fn normalized_moments(&self) -> [f64; 4] {
        [self.m3, self.m4, self.m5, self.m6]
    }
}

/// Heights x drawn with density proportional to a weight on [lo, hi], by
/// linear interpolation of the CDF on a fixed grid.
#[derive(Debug, Clone)]
pub struct HeightLaw {
    lo: f64,
    step: f64,
    cdf: Vec<f64>,
    mass: f64,
}

impl HeightLaw {
    pub fn new(weight: &dyn WeightFunction, lo: f64, hi: f64) -> Result<Self> {
        require(hi > lo, "hi", hi, "empty sampling range")?;
        let step = (hi - lo) / (HEIGHT_GRID - 1) as f64;
        let values: Vec<f64> = (0..HEIGHT_GRID).map(|i| weight.value(lo + step * i as f64)).collect();
        let mut cdf = Vec::with_capacity(HEIGHT_GRID);
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * step;
            cdf.push(acc);
        }
        require(acc > 0.0, "weight", acc, "weight has no mass on the sampling range")?;
        Ok(HeightLaw { lo, step, cdf, mass: acc })
    }

    /// The law restricted to the weight's bulk intersected with `allowed`.
    pub fn covering(weight: &dyn WeightFunction, allowed: (f64, f64)) -> Result<Self> {
        let (center, width) = weight.bulk();
        let lo = allowed.0.max(center - BULK_SPAN * width);
        let hi = allowed.1.min(center + BULK_SPAN * width);
        if !(hi > lo) {
            return Err(Error::OutOfCoverage { requested: center, t_min: allowed.0, t_max: allowed.1 });
        }
        HeightLaw::new(weight, lo, hi)
    }

    /// ∫ weight over the sampling range.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.lo + self.step * (HEIGHT_GRID - 1) as f64)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let target = u.clamp(0.0, 1.0) * self.mass;
        let i = self.cdf.partition_point(|&c| c < target).clamp(1, HEIGHT_GRID - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        self.lo + self.step * ((i - 1) as f64 + frac)
    }
}

/// Offsets (relative to t) of the heights each evaluation touches.
fn reach(config: &ExperimentConfig, prime: Option<&SmoothedStatistic>) -> (f64, f64) {
    let s = config.scale();
    let (lo, hi) = config.eta.support();
    match prime {
        Some(p) => {
            let w = p.height_window(0.0);
            (w.0.min(lo * s), w.1.max(hi * s))
        }
        None => (lo * s, hi * s),
    }
}

/// Heights a table must cover for `draw_samples`. With a weight, the range
/// keeps `spread` bulk widths either side of the weight's center.
pub fn sampling_coverage(config: &ExperimentConfig, with_prime: bool, spread: f64) -> Result<(f64, f64)> {
    config.validate()?;
    let prime = if with_prime {
        Some(SmoothedStatistic::new(&config.eta, config.kernel, config.n, config.height)?)
    } else {
        None
    };
    let (below, above) = reach(config, prime.as_ref());
    let height = config.height;
    Ok(match &config.weight {
        None => (height + below, 2.0 * height + above),
        Some(w) => {
            let (center, width) = w.bulk();
            ((height * (center - spread * width) + below).max(0.0), height * (center + spread * width) + above)
        }
    })
}

/// Draws the configured heights and evaluates Δ (and Δ′ when asked).
pub fn draw_samples(table: &ZeroTable, config: &ExperimentConfig, with_prime: bool) -> Result<Vec<Sample>> {
    config.validate()?;
    let height = config.height;
    let prime =
        if with_prime { Some(SmoothedStatistic::new(&config.eta, config.kernel, config.n, height)?) } else { None };
    let (below, above) = reach(config, prime.as_ref());
    let law = match &config.weight {
        None => {
            table.check_coverage(height + below, 2.0 * height + above)?;
            None
        }
        Some(w) => {
            let allowed = ((table.t_min() - below) / height, (table.t_max() - above) / height);
            Some(HeightLaw::covering(w, allowed)?)
        }
    };
    (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(config.master_seed, i as u64);
            let u: f64 = rng.gen();
            let t = match &law {
                None => height + height * u,
                Some(l) => height * l.quantile(u),
            };
            let delta = linear_statistic(table, &config.eta, config.n, height, t)?;
            let delta_prime = match &prime {
                Some(p) => Some(p.evaluate(table, t, false)?.value),
                None => None,
            };
            Ok(Sample { sample_index: i, t, delta, delta_prime })
        })
        .collect()
}

/// Empirical moments of the Δ values, in sample order.
pub fn summarize(values: &[f64], config: &ExperimentConfig) -> Result<MomentReport> {
    let predicted = predicted_variance(&config.eta, config.n)?;
    moment_report(values, predicted_mean(&config.eta, config.n), predicted, config.height, config.n)
}

pub(crate) fn moment_report(
    values: &[f64],
    predicted_mean: f64,
    predicted_variance: f64,
    height: f64,
    n: f64,
) -> Result<MomentReport> {
    let count = values.len();
    require(count >= 2, "samples", count as f64, "need at least two samples")?;
    let m = count as f64;
    let mean = values.iter().sum::<f64>() / m;
    let mut central = [0.0; 7];
    for &v in values {
        let d = v - mean;
        let mut p = d * d;
        for c in central.iter_mut().skip(2) {
            *c += p;
            p *= d;
        }
    }
    for c in central.iter_mut() {
        *c /= m;
    }
    let variance = central[2] * m / (m - 1.0);
    let sd = central[2].sqrt();
    let normalized = |k: usize| central[k] / sd.powi(k as i32);
    let ks = ks_distance(values, mean, variance.sqrt());
    Ok(MomentReport {
        mean,
        variance,
        m3: normalized(3),
        m4: normalized(4),
        m5: normalized(5),
        m6: normalized(6),
        ks,
        samples: count,
        predicted_mean,
        predicted_variance,
        height,
        n,
    })
}

fn ks_distance(values: &[f64], mean: f64, sd: f64) -> f64 {
    if !(sd > 0.0) {
        return 1.0;
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut z: Vec<f64> = values.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let m = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// Monte Carlo study of Δ_η at uniformly (or σ-) distributed heights.
pub fn sample_clt(table: &ZeroTable, config: &ExperimentConfig) -> Result<MomentReport> {
    let samples = draw_samples(table, config, false)?;
    let deltas: Vec<f64> = samples.iter().map(|s| s.delta).collect();
    summarize(&deltas, config)
}

pub fn write_samples_csv(samples: &[Sample], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sample_index", "t", "delta", "delta_prime"]).map_err(std::io::Error::from)?;
    for s in samples {
        let prime = s.delta_prime.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([s.sample_index.to_string(), s.t.to_string(), s.delta.to_string(), prime])
            .map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMode {
    /// (Δ − n∫η)^k.
    Delta,
    /// (Δ′ − Δ̄′)^k.
    DeltaPrimeCentered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentOptions {
    pub strata: usize,
    pub seed: u64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions { strata: 4096, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothedMoment {
    /// ∫ σ(t/T)/T · statistic(t)^k dt over the covered heights.
    pub value: f64,
    /// ∫ σ over the covered range; the full mass when nothing is clipped.
    pub captured_mass: f64,
    pub standard_error: f64,
    pub strata: usize,
}

/// Weighted k-th moment of Δ or Δ′ by stratified sampling of the weight's
/// CDF: one uniform draw per equal-mass stratum.
#[allow(clippy::too_many_arguments)]
pub fn smoothed_moment(
    table: &ZeroTable,
    sigma: &dyn WeightFunction,
    eta: &TestFunction,
    kernel: BumpKernel,
    n: f64,
    height: f64,
    k: u32,
    mode: MomentMode,
    options: MomentOptions,
) -> Result<SmoothedMoment> {
    require(height >= 100.0, "T", height, "T ≥ 100")?;
    require(n > 0.0, "n", n, "n > 0")?;
    require(k >= 1, "k", k as f64, "k ≥ 1")?;
    require(options.strata >= 2, "strata", options.strata as f64, "at least two strata")?;
    let s = window_scale(n, height);
    let (lo, hi) = eta.support();
    let prime = match mode {
        MomentMode::Delta => None,
        MomentMode::DeltaPrimeCentered => Some(SmoothedStatistic::new(eta, kernel, n, height)?),
    };
    let (below, above) = match &prime {
        Some(p) => p.height_window(0.0),
        None => (lo * s, hi * s),
    };
    let allowed = ((table.t_min() - below) / height, (table.t_max() - above) / height);
    let law = HeightLaw::covering(sigma, allowed)?;
    let center = predicted_mean(eta, n);
    let m = options.strata;
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut rng = sample_rng(options.seed, j as u64);
            let u = (j as f64 + rng.gen::<f64>()) / m as f64;
            let t = height * law.quantile(u);
            let stat = match &prime {
                None => linear_statistic(table, eta, n, height, t)? - center,
                Some(p) => p.evaluate(table, t, false)?.value - p.archimedean(t)?.value,
            };
            Ok(stat.powi(k as i32))
        })
        .collect::<Result<_>>()?;
    let mf = m as f64;
    let mean = values.iter().sum::<f64>() / mf;
    let spread = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (mf - 1.0);
    let mass = law.mass();
    Ok(SmoothedMoment {
        value: mass * mean,
        captured_mass: mass,
        standard_error: mass * (spread / mf).sqrt(),
        strata: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::SmoothingWeight;

    #[test]
    fn quantiles_follow_the_weight() {
        let w = SmoothingWeight::Uniform { lo: 1.0, hi: 3.0 };
        let law = HeightLaw::new(&w, 0.0, 4.0).unwrap();
        assert!((law.mass() - 2.0).abs() < 1e-3);
        assert!((law.quantile(0.5) - 2.0).abs() < 1e-3);
        assert!((law.quantile(0.25) - 1.5).abs() < 1e-3);
        let tri = SmoothingWeight::Fejer { bandwidth: 2.0, center: 0.0 };
        let l = HeightLaw::covering(&tri, (-1e9, 1e9)).unwrap();
        assert!(l.quantile(0.5).abs() < 1e-6);
        assert!((l.mass() - 1.0).abs() < 2e-3);
    }

    #[test]
    fn summary_of_known_values() {
        let eta = TestFunction::indicator(0.0, 1.0).unwrap();
        let config = ExperimentConfig::new(1e4, 2.0, eta, 4, 0);
        let r = summarize(&[1.0, 2.0, 3.0, 4.0], &config).unwrap();
        assert_eq!(r.mean, 2.5);
        assert!((r.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!(r.m3.abs() < 1e-15);
        // Population: μ₂ = 1.25, μ₄ = 2.5625.
        assert!((r.m4 - 2.5625 / 1.5625).abs() < 1e-12);
        assert!(r.ks > 0.0 && r.ks < 0.5);
        let json = serde_json::to_value(r).unwrap();
        let mut keys: Vec<&str> = json.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "T",
                "ks",
                "m3",
                "m4",
                "m5",
                "m6",
                "mean",
                "n",
                "predicted_mean",
                "predicted_variance",
                "samples",
                "variance"
            ]
        );
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        let s = [Sample { sample_index: 0, t: 1.5, delta: 2.0, delta_prime: None }];
        write_samples_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("sample_index,t,delta,delta_prime\n0,1.5,2,\n"));
    }
}
