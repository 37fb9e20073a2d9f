//! Off-axis counts and their windowed L^k averages.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sweep::{weight_integral, window_segments};
use super::weight_span;
use crate::error::{require, Error, Result};
use crate::quad::rule;
use crate::testfn::{q_kernel, SmoothingWeight};
use crate::zeros::{TableSource, ZeroTable};

/// Q-sums stop at |x| ≤ this many rescaled units; the rest is replaced by its
/// mean-field value.
const Q_CUTOFF: f64 = 1000.0;
const PANEL_ORDER: usize = 8;

/// Value `value` on (start, end]; `end = None` means +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPiece {
    pub start: f64,
    pub end: Option<f64>,
    pub value: f64,
}

/// A nonnegative step function on [0, ∞), zero off its pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pieces: Vec<StepPiece>,
}

impl StepFunction {
    pub fn new(mut pieces: Vec<StepPiece>) -> Result<Self> {
        pieces.sort_by(|a, b| a.start.total_cmp(&b.start));
        for p in &pieces {
            require(p.start >= 0.0, "f", p.start, "pieces start at ξ ≥ 0")?;
            require(p.value >= 0.0 && p.value.is_finite(), "f", p.value, "values are finite and ≥ 0")?;
            if let Some(end) = p.end {
                require(end > p.start, "f", end, "piece end exceeds its start")?;
            }
        }
        for w in pieces.windows(2) {
            let end = w[0].end.unwrap_or(f64::INFINITY);
            require(end <= w[1].start, "f", w[1].start, "pieces must not overlap")?;
        }
        Ok(StepFunction { pieces })
    }

    pub fn zero() -> Self {
        StepFunction { pieces: Vec::new() }
    }

    /// 1_(α, ∞).
    pub fn indicator_above(alpha: f64) -> Result<Self> {
        StepFunction::new(vec![StepPiece { start: alpha, end: None, value: 1.0 }])
    }

    pub fn pieces(&self) -> &[StepPiece] {
        &self.pieces
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.pieces.iter().find(|p| xi > p.start && p.end.map_or(true, |e| xi <= e)).map_or(0.0, |p| p.value)
    }

    /// √(∫₀^∞ f^{2k} e^{−cξ} dξ), in closed form.
    pub fn exponential_norm(&self, k: u32, c: f64) -> f64 {
        let total: f64 = self
            .pieces
            .iter()
            .map(|p| {
                let upper = p.end.map_or(0.0, |e| (-c * e).exp());
                p.value.powi(2 * k as i32) * ((-c * p.start).exp() - upper) / c
            })
            .sum();
        total.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityParameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<StepFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<SmoothingWeight>,
    #[serde(rename = "H")]
    pub window: f64,
    pub k: u32,
    pub c: f64,
    #[serde(rename = "T")]
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub lhs: f64,
    /// The right side without its unknown constant.
    pub rhs_bound: f64,
    pub fitted_constant: f64,
    /// Share of the height weight inside the integration range.
    pub captured_mass: f64,
    pub parameters: DensityParameters,
}

fn fitted(lhs: f64, shape: f64) -> f64 {
    if shape > 0.0 {
        lhs / shape
    } else {
        0.0
    }
}

/// N(σ, T): zeros with β > σ and 0 < γ < T, with multiplicity. Synthetic
/// tables may place β past 1, so there σ is only bounded below.
pub fn count_off_axis(table: &ZeroTable, sigma_level: f64, height: f64) -> Result<u64> {
    let top = if table.source() == TableSource::Synthetic { f64::INFINITY } else { 1.0 };
    require(
        sigma_level >= 0.5 && sigma_level < top,
        "sigma_level",
        sigma_level,
        "1/2 ≤ σ < 1 (σ ≥ 1/2 on synthetic tables)",
    )?;
    table.check_coverage(0.0, height)?;
    let level = sigma_level - 0.5;
    Ok(table
        .index_range(0.0, height)
        .filter(|&i| table.real_part_offset(i) > level)
        .map(|i| table.multiplicity(i) as u64)
        .sum())
}

/// Range checks shared by the window moments: 1 ≤ H ≤ T^(1/4), k ≥ 1.
pub fn check_window(window: f64, k: u32, height: f64) -> Result<()> {
    require(height > 1.0, "T", height, "T > 1")?;
    let top = height.powf(0.25);
    require((1.0..=top).contains(&window), "H", window, &format!("need 1 ≤ H ≤ T^(1/4) = {top:.4}"))?;
    require(k >= 1, "k", k as f64, "k ≥ 1")
}

/// Ordinates right of σ with their multiplicities.
fn off_axis_points(table: &ZeroTable, sigma_level: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let level = sigma_level - 0.5;
    table
        .index_range(0.0, hi)
        .filter(|&i| table.real_part_offset(i) > level)
        .map(|i| (table.ordinates()[i], table.multiplicity(i) as f64))
        .unzip()
}

/// (1/T)∫₀^T |N(σ, t + H/log T) − N(σ, t)|^k dt, exact by event sweep,
/// against the shape H^k·T^{−c(σ−1/2)}.
pub fn windowed_lk(
    table: &ZeroTable,
    sigma_level: f64,
    window: f64,
    k: u32,
    height: f64,
    c: f64,
) -> Result<DensityReport> {
    check_window(window, k, height)?;
    require(c > 0.0, "c", c, "c > 0")?;
    let h = window / height.ln();
    // Validates σ and coverage of (0, T).
    count_off_axis(table, sigma_level, height)?;
    table.check_coverage(0.0, height + h)?;
    let (points, weights) = off_axis_points(table, sigma_level, height + h);
    let lhs = window_segments(&points, &weights, 0.0, h, 0.0, height)
        .iter()
        .map(|s| (s.end - s.start) * s.count.powi(k as i32))
        .sum::<f64>()
        / height;
    let shape = window.powi(k as i32) * height.powf(-c * (sigma_level - 0.5));
    Ok(DensityReport {
        lhs,
        rhs_bound: shape,
        fitted_constant: fitted(lhs, shape),
        captured_mass: 1.0,
        parameters: DensityParameters { sigma_level: Some(sigma_level), f: None, weight: None, window, k, c, height },
    })
}

/// ∫ σ(t/T)/T |Σ_γ f(A_γ) Q((log T/2πH)(γ − t))|^k dt against
/// ‖σ‖_Q·H^k·√(∫f^{2k}e^{−cξ}dξ).
#[allow(clippy::too_many_arguments)]
pub fn q_smoothed_lk(
    table: &ZeroTable,
    f: &StepFunction,
    window: f64,
    k: u32,
    height: f64,
    weight: &SmoothingWeight,
    c: f64,
) -> Result<DensityReport> {
    check_window(window, k, height)?;
    require(c > 0.0, "c", c, "c > 0")?;
    weight.validate()?;
    let lambda = height.ln() / (2.0 * PI * window);
    let reach = Q_CUTOFF / lambda;
    let t_max = table.t_max();

    // Signed ordinates (mirrors first) with weights f(A)·m.
    let mut positive = Vec::new();
    let mut total = 0.0;
    for i in 0..table.len() {
        let w = f.value(table.off_axis(i)) * table.multiplicity(i) as f64;
        if w > 0.0 {
            positive.push((table.ordinates()[i], w));
            total += w;
        }
    }
    let mut points: Vec<(f64, f64)> = positive.iter().rev().map(|&(g, w)| (-g, w)).collect();
    points.extend_from_slice(&positive);
    // Mean weighted count per unit height, for the part beyond the cutoff.
    let density = if t_max > 0.0 { total / t_max } else { 0.0 };
    let far = density * (2.0 / lambda) * (0.5 - Q_CUTOFF.atan() / PI);

    let (span_lo, span_hi) = weight_span(weight);
    let lo = (span_lo * height).max(-(t_max - reach));
    let hi = (span_hi * height).min(t_max - reach);
    if !(hi > lo) {
        return Err(Error::OutOfCoverage { requested: span_hi * height + reach, t_min: table.t_min(), t_max });
    }
    table.check_coverage(lo - reach, hi + reach)?;

    let cell = 0.5 / lambda;
    let panels = ((hi - lo) / cell).ceil() as usize;
    let width = (hi - lo) / panels as f64;
    let r = rule(PANEL_ORDER);
    let per_panel: Vec<(f64, f64)> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = lo + width * i as f64;
            let mut value = 0.0;
            let mut mass = 0.0;
            for (t, w) in r.mapped(a, a + width) {
                let first = points.partition_point(|p| p.0 < t - reach);
                let last = points.partition_point(|p| p.0 <= t + reach);
                let sum: f64 =
                    points[first..last].iter().map(|&(g, m)| m * q_kernel(lambda * (g - t))).sum::<f64>() + far;
                let sigma = weight.value(t / height) / height;
                value += w * sigma * sum.abs().powi(k as i32);
                mass += w * sigma;
            }
            (value, mass)
        })
        .collect();
    let lhs: f64 = per_panel.iter().map(|p| p.0).sum();
    let inside: f64 = per_panel.iter().map(|p| p.1).sum();
    let shape = weight.q_norm() * window.powi(k as i32) * f.exponential_norm(k, c);
    Ok(DensityReport {
        lhs,
        rhs_bound: shape,
        fitted_constant: fitted(lhs, shape),
        captured_mass: inside / weight.mass(),
        parameters: DensityParameters {
            sigma_level: None,
            f: Some(f.clone()),
            weight: Some(*weight),
            window,
            k,
            c,
            height,
        },
    })
}

/// (1/T)∫ σ(t/T)|count of points in [t + a, t + b)|^k dt over [lo, hi], with
/// the weight mass captured.
pub(crate) fn weighted_window_moment(
    points: &[f64],
    weights: &[f64],
    window: (f64, f64),
    range: (f64, f64),
    weight: &SmoothingWeight,
    height: f64,
    k: u32,
) -> (f64, f64) {
    let segs = window_segments(points, weights, window.0, window.1, range.0, range.1);
    let parts: Vec<(f64, f64)> = segs
        .par_iter()
        .map(|s| {
            let w = weight_integral(weight, height, s.start, s.end);
            (w * s.count.abs().powi(k as i32), w)
        })
        .collect();
    (parts.iter().map(|p| p.0).sum(), parts.iter().map(|p| p.1).sum())
}

/// One CSV row per labelled report: `param_set,lhs,rhs_shape,fitted_constant`.
pub fn write_density_csv<'a>(
    rows: impl IntoIterator<Item = (&'a str, &'a DensityReport)>,
    out: impl Write,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(["param_set", "lhs", "rhs_shape", "fitted_constant"]).map_err(io)?;
    for (label, r) in rows {
        w.write_record([label.to_string(), r.lhs.to_string(), r.rhs_bound.to_string(), r.fitted_constant.to_string()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
