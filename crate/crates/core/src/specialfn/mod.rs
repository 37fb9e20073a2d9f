//! Scalar special functions: Riemann–Siegel θ and Z, the archimedean
//! density Ω, Λ(n), ψ(x), and the sine/cosine integrals.

mod arith;
mod gamma;
mod tables;
mod trig_integrals;

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

pub use arith::{chebyshev_psi, von_mangoldt, von_mangoldt_table};
pub use gamma::{digamma, ln_gamma};
pub use trig_integrals::sine_cosine_integral;

use crate::error::{Error, Result};
use tables::{BERNOULLI_EVEN, PSI_EVEN_TAYLOR};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this height Z is evaluated from an Euler–Maclaurin ζ(1/2 + it).
/// Above it the Riemann–Siegel sum with four correction terms is accurate
/// to a few units of 1e-11.
pub const EULER_MACLAURIN_CEILING: f64 = 1000.0;

const THETA_SERIES_FLOOR: f64 = 10.0;
const LN_PI: f64 = 1.144_729_885_849_400_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPrecision {
    pub abs_tol: f64,
    /// Cap on the length of the Riemann–Siegel main sum.
    pub max_terms: usize,
}

impl Default for EvaluationPrecision {
    fn default() -> Self {
        EvaluationPrecision { abs_tol: 2e-6, max_terms: 4000 }
    }
}

impl EvaluationPrecision {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        crate::error::require(abs_tol > 0.0, "abs_tol", abs_tol, "must be positive")?;
        crate::error::require(max_terms >= 1, "max_terms", max_terms as f64, "must be at least 1")?;
        Ok(EvaluationPrecision { abs_tol, max_terms })
    }
}

/// θ(t) = arg Γ(1/4 + it/2) − (t/2) log π on the continuous branch through θ(0) = 0.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    let a = t.abs();
    let value = if a < THETA_SERIES_FLOOR {
        ln_gamma(Complex64::new(0.25, 0.5 * a)).im - 0.5 * a * LN_PI
    } else {
        let inv = 1.0 / a;
        let inv2 = inv * inv;
        let tail = inv
            * (1.0 / 48.0
                + inv2
                    * (7.0 / 5760.0
                        + inv2 * (31.0 / 80640.0 + inv2 * (127.0 / 430080.0 + inv2 * (511.0 / 1216512.0)))));
        0.5 * a * (a / TAU).ln() - 0.5 * a - PI / 8.0 + tail
    };
    if t < 0.0 {
        -value
    } else {
        value
    }
}

/// Ω(ξ) = Re ψ(1/4 + iξ/2) − log π. Note θ'(t) = Ω(t)/2.
pub fn omega(xi: f64) -> f64 {
    digamma(Complex64::new(0.25, 0.5 * xi)).re - LN_PI
}

/// Z(t) = e^{iθ(t)} ζ(1/2 + it).
pub fn riemann_siegel_z(t: f64, prec: &EvaluationPrecision) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::ParameterRange {
            name: "t",
            value: t,
            requirement: "must be finite and nonnegative".into(),
        });
    }
    let attainable = attainable_error(t);
    if t >= EULER_MACLAURIN_CEILING && main_sum_length(t) > prec.max_terms {
        return Err(Error::PrecisionUnreachable { t, requested: prec.abs_tol, attainable: f64::INFINITY });
    }
    if prec.abs_tol < attainable {
        return Err(Error::PrecisionUnreachable { t, requested: prec.abs_tol, attainable });
    }
    Ok(z_value(t))
}

/// Error estimate of [`riemann_siegel_z`] at height t, covering both the
/// truncation of the method and rounding in the phases.
pub fn attainable_error(t: f64) -> f64 {
    let t = t.abs();
    if t < EULER_MACLAURIN_CEILING {
        1e-13 * (1.0 + t / 10.0)
    } else {
        let m = main_sum_length(t) as f64;
        let truncation = 4e-8 * (100.0 / t).powi(3);
        let phase = f64::EPSILON * (riemann_siegel_theta(t).abs() + t * (m + 1.0).ln());
        truncation + phase * (1.0 + m.ln()).sqrt()
    }
}

pub(crate) fn main_sum_length(t: f64) -> usize {
    (t / TAU).sqrt().floor() as usize
}

/// Unchecked Z for internal hot loops; callers validate precision once.
pub(crate) fn z_value(t: f64) -> f64 {
    if t < EULER_MACLAURIN_CEILING {
        let z = zeta_critical_line(t) * Complex64::from_polar(1.0, riemann_siegel_theta(t));
        z.re
    } else {
        z_riemann_siegel(t)
    }
}

/// ζ(1/2 + it) by Euler–Maclaurin summation.
pub fn zeta_critical_line(t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let cutoff = (t.abs() / PI).ceil() as usize + 10;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..cutoff {
        let ln_n = (n as f64).ln();
        sum += Complex64::from_polar((-0.5 * ln_n).exp(), -t * ln_n);
    }
    let nf = cutoff as f64;
    let ln_n = nf.ln();
    let n_pow = Complex64::from_polar((-0.5 * ln_n).exp(), -t * ln_n); // N^{-s}
    sum += n_pow * nf / (s - 1.0) + n_pow * 0.5;
    let mut rising = s;
    let mut power = n_pow / nf; // N^{-s-1}
    let inv_n2 = 1.0 / (nf * nf);
    let mut factorial = 2.0;
    let mut last = f64::INFINITY;
    for (j, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = j + 1;
        let term = rising * power * (b / factorial);
        let size = term.norm();
        if size > last {
            break;
        }
        sum += term;
        last = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
        let kf = k as f64;
        rising *= (s + (2.0 * kf - 1.0)) * (s + 2.0 * kf);
        power *= inv_n2;
        factorial *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
    }
    sum
}

struct MainSumTables {
    ln_n: Vec<f64>,
    inv_sqrt_n: Vec<f64>,
}

const TABLE_LEN: usize = 4096;

fn main_sum_tables() -> &'static MainSumTables {
    static TABLES: OnceLock<MainSumTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let ln_n = (0..=TABLE_LEN).map(|n| if n == 0 { 0.0 } else { (n as f64).ln() }).collect();
        let inv_sqrt_n = (0..=TABLE_LEN).map(|n| if n == 0 { 0.0 } else { 1.0 / (n as f64).sqrt() }).collect();
        MainSumTables { ln_n, inv_sqrt_n }
    })
}

/// Correction polynomials C_0..C_4 in powers of (p − 1/2).
fn correction_polynomials() -> &'static [Vec<f64>; 5] {
    static POLYS: OnceLock<[Vec<f64>; 5]> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut psi = vec![0.0; 2 * PSI_EVEN_TAYLOR.len() - 1];
        for (j, &c) in PSI_EVEN_TAYLOR.iter().enumerate() {
            psi[2 * j] = c;
        }
        let mut derivs = vec![psi];
        for d in 1..=12 {
            let prev = &derivs[d - 1];
            let next: Vec<f64> = (1..prev.len()).map(|i| prev[i] * i as f64).collect();
            derivs.push(next);
        }
        let pi2 = PI * PI;
        let pi4 = pi2 * pi2;
        let pi6 = pi4 * pi2;
        let pi8 = pi4 * pi4;
        let combine = |terms: &[(usize, f64)]| {
            let mut out = vec![0.0; derivs[0].len()];
            for &(d, w) in terms {
                for (i, &c) in derivs[d].iter().enumerate() {
                    out[i] += w * c;
                }
            }
            out
        };
        [
            combine(&[(0, 1.0)]),
            combine(&[(3, -1.0 / (96.0 * pi2))]),
            combine(&[(2, 1.0 / (64.0 * pi2)), (6, 1.0 / (18432.0 * pi4))]),
            combine(&[(1, -1.0 / (64.0 * pi2)), (5, -1.0 / (3840.0 * pi4)), (9, -1.0 / (5308416.0 * pi6))]),
            combine(&[
                (0, 1.0 / (128.0 * pi2)),
                (4, 19.0 / (24576.0 * pi4)),
                (8, 11.0 / (5898240.0 * pi6)),
                (12, 1.0 / (2038431744.0 * pi8)),
            ]),
        ]
    })
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn z_riemann_siegel(t: f64) -> f64 {
    let a = (t / TAU).sqrt();
    let m = a.floor() as usize;
    let p = a - m as f64;
    let theta = riemann_siegel_theta(t);
    let tables = main_sum_tables();
    // Kahan-compensated main sum.
    let mut sum = 0.0;
    let mut carry = 0.0;
    for n in 1..=m {
        let (ln_n, w) = if n <= TABLE_LEN {
            (tables.ln_n[n], tables.inv_sqrt_n[n])
        } else {
            let nf = n as f64;
            (nf.ln(), 1.0 / nf.sqrt())
        };
        let term = w * (theta - t * ln_n).cos() - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    let u = (TAU / t).sqrt();
    let x = p - 0.5;
    let polys = correction_polynomials();
    let mut remainder = 0.0;
    let mut scale = 1.0;
    for poly in polys.iter() {
        remainder += horner(poly, x) * scale;
        scale *= u;
    }
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * sum + sign * u.sqrt() * remainder
}
