//! Turing's method. With R(t) the number of found zeros below t and
//! |∫_{t1}^{t2} S| ≤ B(t2) for 168π ≤ t1 < t2, the true count N(P) satisfies
//!
//!   N(P) ≤ [B(P+L) + ∫_P^{P+L} (θ/π + 1) − ∫_P^{P+L} (R(t) − R(P))] / L
//!   N(P) ≥ [−B(P) + ∫_{P−L}^P (θ/π + 1) + ∫_{P−L}^P (R(P) − R(t))] / L
//!
//! because missed zeros can only make N grow faster than R.

use std::f64::consts::PI;

use super::scan::scan_range;
use super::{count_n, ZeroTable};
use crate::error::{Error, Result};
use crate::quad;
use crate::specialfn::riemann_siegel_theta;

/// Length of the averaging window.
pub const TURING_WINDOW: f64 = 20.0;
/// Lower validity limit of the ∫S bound.
pub const TRUDGIAN_FLOOR: f64 = 168.0 * PI;
const SAFETY: f64 = 1e-6;

/// Bound on |∫_{t1}^{t2} S(t) dt| for 168π ≤ t1 < t2 (Trudgian).
pub fn trudgian_bound(t2: f64) -> f64 {
    2.067 + 0.059 * t2.ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CountBounds {
    pub fn upper_int(&self) -> u64 {
        (self.upper + SAFETY).floor().max(0.0) as u64
    }

    pub fn lower_int(&self) -> u64 {
        (self.lower - SAFETY).ceil().max(0.0) as u64
    }

    pub fn pinned(&self) -> Option<u64> {
        (self.lower.is_finite() && self.lower_int() == self.upper_int()).then(|| self.upper_int())
    }
}

fn theta_over_pi_integral(a: f64, b: f64) -> f64 {
    quad::rule(32).integrate(|t| riemann_siegel_theta(t) / PI + 1.0, a, b)
}

/// Bounds on N(p) from sorted found ordinates covering [p − L, p + L].
/// The lower side is skipped (−∞) when `lower_side` is false.
pub fn count_bounds(ordinates: &[f64], p: f64, window: f64, lower_side: bool) -> CountBounds {
    let above = {
        let a = ordinates.partition_point(|&g| g < p);
        let b = ordinates.partition_point(|&g| g < p + window);
        ordinates[a..b].iter().map(|&g| p + window - g).sum::<f64>()
    };
    let upper = (trudgian_bound(p + window) + theta_over_pi_integral(p, p + window) - above) / window;
    let lower = if lower_side {
        let a = ordinates.partition_point(|&g| g < p - window);
        let b = ordinates.partition_point(|&g| g < p);
        let below = ordinates[a..b].iter().map(|&g| g - (p - window)).sum::<f64>();
        (-trudgian_bound(p) + theta_over_pi_integral(p - window, p) + below) / window
    } else {
        f64::NEG_INFINITY
    };
    CountBounds { lower, upper }
}

/// Certifies N(T) for the table. Tables starting at 0 are certified at
/// max(T, 168π), scanning past the table end when needed; other tables use
/// the two-sided bound at T.
pub fn turing_certify(table: &mut ZeroTable, t: f64) -> Result<u64> {
    let from_zero = table.t_min() == 0.0 && table.zeros_below() == 0;
    if from_zero {
        let p = t.max(TRUDGIAN_FLOOR);
        let mut ords: Vec<f64> = table.ordinates().to_vec();
        if p + TURING_WINDOW > table.t_max() {
            // Extend beyond the table; e(T) ≤ e(p) since misses accumulate.
            let extra = scan_range(table.t_max(), p + TURING_WINDOW + 1.0, false);
            ords.extend(extra.into_iter().filter(|&g| g > table.t_max()));
        }
        let bounds = count_bounds(&ords, p, TURING_WINDOW, false);
        let found = ords.partition_point(|&g| g < p) as u64;
        if bounds.upper_int() != found {
            return Err(Error::CertificationFailure { t: p, lower: found as f64, upper: bounds.upper });
        }
        let count =
            if t <= table.t_max() { count_n(table, t.max(0.0))? } else { ords.partition_point(|&g| g < t) as u64 };
        let at = p.min(table.t_max());
        if table.certified_at().map_or(true, |c| c < at) {
            table.mark_certified(at);
        }
        return Ok(count);
    }
    if t - TURING_WINDOW < table.t_min().max(TRUDGIAN_FLOOR) || t + TURING_WINDOW > table.t_max() {
        return Err(Error::OutOfCoverage {
            requested: t,
            t_min: table.t_min() + TURING_WINDOW,
            t_max: table.t_max() - TURING_WINDOW,
        });
    }
    let bounds = count_bounds(table.ordinates(), t, TURING_WINDOW, true);
    let n = bounds.pinned().ok_or(Error::CertificationFailure { t, lower: bounds.lower, upper: bounds.upper })?;
    if count_n(table, t)? == n {
        let at = t;
        if table.certified_at().map_or(true, |c| c < at) {
            table.mark_certified(at);
        }
    }
    Ok(n)
}
