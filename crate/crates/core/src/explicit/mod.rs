//! Both sides of the explicit formula for C² compactly supported g:
//! Σ_{|γ|<V} ĝ(γ/2π) − ∫_{−V}^{V} ĝ(ξ/2π)Ω(ξ)/2π dξ against
//! ∫(g(x) + g(−x))e^{x/2}dx − Σ_n (g(log n) + g(−log n))Λ(n)/√n.

mod pairing;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use pairing::{Atom, PairingFunction};

use crate::error::{require, Result};
use crate::quad::{adaptive, adaptive_pieces, rule, Tolerance};
use crate::specialfn::{omega, von_mangoldt_table};
use crate::zeros::ZeroTable;

const ARCHIMEDEAN_ORDER: usize = 16;
const QUAD_TOL: Tolerance = Tolerance { abs: 1e-12, rel: 1e-13, order: 16 };
/// Added to every error budget for the quadratures on both sides.
pub const QUADRATURE_BUDGET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSide {
    pub value: f64,
    pub zero_sum: f64,
    pub archimedean: f64,
    /// Bound on both omitted tails from |ĝ(ξ)| ≤ ‖g″‖₁/(2πξ)².
    pub tail_estimate: f64,
    pub zeros: usize,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeSide {
    pub value: f64,
    /// ∫(g(x) + g(−x))e^{x/2} dx.
    pub continuous: f64,
    pub prime_sum: f64,
    /// Prime powers n ≤ e^{max|x|} taking part in the sum.
    pub prime_powers: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitReport {
    pub zero_side: f64,
    pub prime_side: f64,
    pub discrepancy: f64,
    pub tail_estimate: f64,
    pub error_budget: f64,
    #[serde(rename = "V")]
    pub cutoff: f64,
    pub support: (f64, f64),
    pub certified: bool,
}

fn tail_estimate(g: &PairingFunction, cutoff: f64) -> f64 {
    let log = (cutoff / (2.0 * PI)).ln().max(0.0) + 1.0;
    2.0 * g.second_derivative_l1() * log / (PI * cutoff)
}

/// ĝ at ±γ for a zero on the line. Off the line an entry stands for one
/// zero of the pair β ± iγ reflected in the line, so it contributes the mean
/// over the points ±γ ± i(β − 1/2).
fn zero_terms(g: &PairingFunction, gamma: f64, offset: f64) -> f64 {
    if offset == 0.0 {
        return g.even_transform(gamma);
    }
    let at = |re: f64, im: f64| g.transform(Complex64::new(re, im) / (2.0 * PI));
    0.5 * (at(gamma, -offset) + at(gamma, offset) + at(-gamma, -offset) + at(-gamma, offset)).re
}

pub fn zero_side(g: &PairingFunction, table: &ZeroTable, cutoff: f64) -> Result<ZeroSide> {
    require(cutoff > 0.0, "V", cutoff, "V > 0")?;
    table.check_coverage(0.0, cutoff)?;
    let certified = table.certified_at().is_some_and(|c| c >= cutoff);
    if g.is_zero() {
        return Ok(ZeroSide { value: 0.0, zero_sum: 0.0, archimedean: 0.0, tail_estimate: 0.0, zeros: 0, certified });
    }
    let range = table.index_range(0.0, cutoff);
    let zeros = range.len();
    let terms: Vec<f64> = range
        .into_par_iter()
        .map(|i| table.multiplicity(i) as f64 * zero_terms(g, table.ordinates()[i], table.real_part_offset(i)))
        .collect();
    let zero_sum: f64 = terms.iter().sum();
    // The even transform turns by at most π across each panel; Ω is smooth.
    let step = PI / g.reach();
    let panels = (cutoff / step).ceil() as usize;
    let width = cutoff / panels as f64;
    let gl = rule(ARCHIMEDEAN_ORDER);
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = width * i as f64;
            gl.integrate(|xi| g.even_transform(xi) * omega(xi) / (2.0 * PI), a, a + width)
        })
        .collect();
    let archimedean: f64 = parts.iter().sum();
    Ok(ZeroSide {
        value: zero_sum - archimedean,
        zero_sum,
        archimedean,
        tail_estimate: tail_estimate(g, cutoff),
        zeros,
        certified,
    })
}

pub fn prime_side(g: &PairingFunction) -> Result<PrimeSide> {
    if g.is_zero() {
        return Ok(PrimeSide { value: 0.0, continuous: 0.0, prime_sum: 0.0, prime_powers: Vec::new() });
    }
    let reflected = g.reflected();
    let symmetric = |x: f64| g.value(x) + reflected.value(x);
    let mut breaks = g.breakpoints();
    breaks.extend(reflected.breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let continuous = adaptive_pieces(|x: f64| symmetric(x) * (0.5 * x).exp(), &breaks, QUAD_TOL)?;
    let limit = g.reach().exp().floor() as usize;
    let lambda = von_mangoldt_table(limit.max(1));
    let mut prime_sum = 0.0;
    let mut prime_powers = Vec::new();
    for (n, &l) in lambda.iter().enumerate().skip(2) {
        if l > 0.0 {
            prime_powers.push(n as u64);
            prime_sum += symmetric((n as f64).ln()) * l / (n as f64).sqrt();
        }
    }
    Ok(PrimeSide { value: continuous - prime_sum, continuous, prime_sum, prime_powers })
}

pub fn explicit_formula_discrepancy(g: &PairingFunction, table: &ZeroTable, cutoff: f64) -> Result<ExplicitReport> {
    let zeros = zero_side(g, table, cutoff)?;
    let primes = prime_side(g)?;
    let budget = if g.is_zero() { 0.0 } else { zeros.tail_estimate + QUADRATURE_BUDGET };
    Ok(ExplicitReport {
        zero_side: zeros.value,
        prime_side: primes.value,
        discrepancy: (zeros.value - primes.value).abs(),
        tail_estimate: zeros.tail_estimate,
        error_budget: budget,
        cutoff,
        support: g.support(),
        certified: zeros.certified,
    })
}

/// ∫₀^T Ω(ξ)/2π dξ, which equals θ(T)/π.
pub fn omega_mass(height: f64) -> Result<f64> {
    require(height >= 0.0, "T", height, "T ≥ 0")?;
    adaptive(|xi: f64| omega(xi) / (2.0 * PI), 0.0, height, QUAD_TOL)
}
