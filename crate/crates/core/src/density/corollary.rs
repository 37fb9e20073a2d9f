//! Weighted moments of window counts and of general linear statistics, with
//! the constants they imply against ‖σ‖_Q.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sweep::weight_integral;
use super::weight_span;
use super::windows::weighted_window_moment;
use crate::error::{require, Error, Result};
use crate::quad::rule;
use crate::stats::{linear_statistic, window_scale};
use crate::testfn::{envelope_m, tail_eps, SmoothingWeight, TestFunction};
use crate::zeros::ZeroTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowMoment {
    /// (1/T)∫ σ(t/T)|N(t + 2π(ℓ+1)/log T) − N(t + 2πℓ/log T)|^k dt.
    pub value: f64,
    pub q_norm: f64,
    /// value / ‖σ‖_Q.
    pub fitted_constant: f64,
    pub captured_mass: f64,
    pub ell: i64,
    pub k: u32,
    #[serde(rename = "T")]
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeMoment {
    /// (1/T)∫ σ(t/T)|Δ_η(t)|^k dt at scale n.
    pub value: f64,
    pub q_norm: f64,
    /// ‖M₁η_T‖₁ with η_T(ξ) = η(ξ/n).
    pub envelope_norm: f64,
    /// ε_T(η_T).
    pub tail: f64,
    /// ‖M₁η_T‖₁^k + (ε_T log T)^k.
    pub shape: f64,
    pub fitted_constant: f64,
    pub captured_mass: f64,
    pub n: f64,
    pub k: u32,
    #[serde(rename = "T")]
    pub height: f64,
}

/// Ordinates with mirrors, sorted, and their multiplicities.
fn signed_points(table: &ZeroTable) -> (Vec<f64>, Vec<f64>) {
    let o = table.ordinates();
    let m = |i: usize| table.multiplicity(i) as f64;
    let points = o.iter().rev().map(|g| -g).chain(o.iter().copied()).collect();
    let weights = (0..o.len()).rev().map(m).chain((0..o.len()).map(m)).collect();
    (points, weights)
}

/// Heights t in the weight's span where [t + a, t + b] stays in the table.
fn height_range(table: &ZeroTable, weight: &SmoothingWeight, height: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let (lo, hi) = weight_span(weight);
    let floor = if table.t_min() == 0.0 { -table.t_max() - a } else { table.t_min() - a };
    let lo = (lo * height).max(floor);
    let hi = (hi * height).min(table.t_max() - b);
    if !(hi > lo) {
        return Err(Error::OutOfCoverage { requested: hi + b, t_min: table.t_min(), t_max: table.t_max() });
    }
    Ok((lo, hi))
}

pub fn window_count_moment(
    table: &ZeroTable,
    weight: &SmoothingWeight,
    ell: i64,
    k: u32,
    height: f64,
) -> Result<WindowMoment> {
    require(k >= 1, "k", k as f64, "k ≥ 1")?;
    require(height > 1.0, "T", height, "T > 1")?;
    weight.validate()?;
    let step = 2.0 * PI / height.ln();
    let (a, b) = (step * ell as f64, step * (ell + 1) as f64);
    let range = height_range(table, weight, height, a, b)?;
    let (points, weights) = signed_points(table);
    let (value, inside) = weighted_window_moment(&points, &weights, (a, b), range, weight, height, k);
    let q_norm = weight.q_norm();
    Ok(WindowMoment {
        value,
        q_norm,
        fitted_constant: value / q_norm,
        captured_mass: inside / weight.mass(),
        ell,
        k,
        height,
    })
}

/// Δ is constant (η piecewise constant) or affine between consecutive
/// events γ − e·s, e a breakpoint of η; each gap is integrated separately.
pub fn envelope_moment(
    table: &ZeroTable,
    weight: &SmoothingWeight,
    eta: &TestFunction,
    n: f64,
    k: u32,
    height: f64,
) -> Result<EnvelopeMoment> {
    require(k >= 1, "k", k as f64, "k ≥ 1")?;
    require(n > 0.0, "n", n, "n > 0")?;
    require(height > 1.0, "T", height, "T > 1")?;
    weight.validate()?;
    let s = window_scale(n, height);
    let (e_lo, e_hi) = eta.support();
    let range = height_range(table, weight, height, e_lo * s, e_hi * s)?;
    let breaks = eta.breakpoints();
    let (points, _) = signed_points(table);
    let first = points.partition_point(|&g| g < range.0 + e_lo * s);
    let last = points.partition_point(|&g| g <= range.1 + e_hi * s);
    let mut events: Vec<f64> = points[first..last]
        .iter()
        .flat_map(|g| breaks.iter().map(move |e| g - e * s))
        .filter(|t| *t > range.0 && *t < range.1)
        .collect();
    events.push(range.0);
    events.push(range.1);
    events.sort_by(f64::total_cmp);
    events.dedup();

    let flat = eta.pieces().iter().all(|p| p.slope == 0.0);
    let parts: Vec<Result<(f64, f64)>> = events
        .par_windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let mass = weight_integral(weight, height, a, b);
            if flat {
                let d = linear_statistic(table, eta, n, height, 0.5 * (a + b))?;
                Ok((mass * d.abs().powi(k as i32), mass))
            } else {
                let mut acc = 0.0;
                for (t, wt) in rule(8).mapped(a, b) {
                    let d = linear_statistic(table, eta, n, height, t)?;
                    acc += wt * weight.value(t / height) / height * d.abs().powi(k as i32);
                }
                Ok((acc, mass))
            }
        })
        .collect();
    let mut value = 0.0;
    let mut inside = 0.0;
    for p in parts {
        let (v, m) = p?;
        value += v;
        inside += m;
    }

    let eta_t = eta.dilated(n);
    let envelope_norm = envelope_m(1.0, &eta_t)?.l1_norm();
    let tail = tail_eps(height, &eta_t)?;
    let shape = envelope_norm.powi(k as i32) + (tail * height.ln()).powi(k as i32);
    let q_norm = weight.q_norm();
    Ok(EnvelopeMoment {
        value,
        q_norm,
        envelope_norm,
        tail,
        shape,
        fitted_constant: value / (q_norm * shape),
        captured_mass: inside / weight.mass(),
        n,
        k,
        height,
    })
}
