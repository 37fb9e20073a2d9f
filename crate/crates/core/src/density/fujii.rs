//! Moments of S(t + h) − S(t) over [T, T + H].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sweep::window_segments;
use crate::error::{require, Result};
use crate::quad::rule;
use crate::specialfn::riemann_siegel_theta;
use crate::stats::gaussian_moment;
use crate::zeros::ZeroTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FujiiMoment {
    /// (1/H)∫_T^{T+H} (S(t+h) − S(t))^{2k} dt.
    pub value: f64,
    /// c_{2k}π^{−2k}log^k(2 + h log T).
    pub main_term: f64,
    /// The same with log^{2k}.
    pub printed_main_term: f64,
    /// value / main_term.
    pub ratio: f64,
    #[serde(rename = "T")]
    pub height: f64,
    #[serde(rename = "H")]
    pub span: f64,
    pub h: f64,
    pub k: u32,
}

/// Validates the parameters and returns the heights a table must cover.
pub fn fujii_coverage(height: f64, span: f64, h: f64, k: u32, a: f64) -> Result<(f64, f64)> {
    require(k >= 1, "k", k as f64, "k ≥ 1")?;
    require(a > 0.0, "a", a, "a > 0")?;
    require(height > 1.0, "T", height, "T > 1")?;
    let floor = height.powf(0.5 + a);
    // Tolerate rounding when H is given as a power of T.
    require(
        span >= floor * (1.0 - 1e-12) && span <= height,
        "H",
        span,
        &format!("need T^(1/2+a) = {floor:.6} ≤ H ≤ T"),
    )?;
    let cap = span - (span / height.sqrt()).powf(0.125);
    require((0.0..=cap).contains(&h), "h", h, &format!("need 0 ≤ h ≤ H − (H/√T)^(1/8) = {cap:.6}"))?;
    Ok((height, height + span + h))
}

/// S(t+h) − S(t) = D(t) − g(t) with D = N(t+h) − N(t) piecewise constant and
/// g = (θ(t+h) − θ(t))/π smooth, integrated segment by segment.
pub fn fujii_moment(table: &ZeroTable, height: f64, span: f64, h: f64, k: u32, a: f64) -> Result<FujiiMoment> {
    let (lo, hi) = fujii_coverage(height, span, h, k, a)?;
    table.check_coverage(lo, hi)?;

    let log_factor = (2.0 + h * height.ln()).ln();
    let c2k = gaussian_moment(2 * k) / PI.powi(2 * k as i32);
    let main_term = c2k * log_factor.powi(k as i32);
    let printed_main_term = c2k * log_factor.powi(2 * k as i32);
    let value = if h == 0.0 {
        0.0
    } else {
        let r = table.index_range(height, height + span + h);
        let points = &table.ordinates()[r.clone()];
        let weights: Vec<f64> = r.map(|i| table.multiplicity(i) as f64).collect();
        let gl = rule(4);
        window_segments(points, &weights, 0.0, h, height, height + span)
            .iter()
            .map(|s| {
                gl.integrate(
                    |t| {
                        let g = (riemann_siegel_theta(t + h) - riemann_siegel_theta(t)) / PI;
                        (s.count - g).powi(2 * k as i32)
                    },
                    s.start,
                    s.end,
                )
            })
            .sum::<f64>()
            / span
    };
    Ok(FujiiMoment { value, main_term, printed_main_term, ratio: value / main_term, height, span, h, k })
}
