//! Circular unitary ensemble: Haar sampling, eigenphase linear statistics
//! and the Szegő variance.

mod dense;
mod verblunsky;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::seed::{mix64, sample_rng};
use crate::stats::{moment_report, MomentReport};

pub const MAX_DIMENSION: usize = 1024;
/// Largest accepted ‖U*U − I‖_max for a generated matrix.
pub const UNITARITY_TOL: f64 = 1e-10;
const RESEEDS: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitarySample {
    pub dimension: usize,
    /// Sorted, in [0, 2π).
    pub eigenphases: Vec<f64>,
    /// How many perturbed seeds were needed after an eigensolver failure.
    pub reseeds: u32,
}

impl UnitarySample {
    /// Σ e^{ikθ_j} = Tr U^k.
    pub fn power_trace(&self, k: i64) -> Complex64 {
        self.eigenphases.iter().map(|&t| Complex64::from_polar(1.0, k as f64 * t)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CueSampler {
    /// QR of a complex Ginibre matrix, then a dense eigensolve. O(N³).
    Matrix,
    /// Random Verblunsky coefficients and a phase-function root search. O(N²).
    #[default]
    Verblunsky,
}

impl FromStr for CueSampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "matrix" => Ok(CueSampler::Matrix),
            "verblunsky" => Ok(CueSampler::Verblunsky),
            other => Err(Error::InvalidLiteral {
                text: other.to_string(),
                message: "expected `matrix` or `verblunsky`".into(),
            }),
        }
    }
}

fn check_dimension(n: usize) -> Result<()> {
    require((1..=MAX_DIMENSION).contains(&n), "N", n as f64, "1 ≤ N ≤ 1024")
}

fn sorted_phases(mut p: Vec<f64>) -> Vec<f64> {
    for x in p.iter_mut() {
        *x = x.rem_euclid(TAU);
        if *x >= TAU {
            *x = 0.0;
        }
    }
    p.sort_by(f64::total_cmp);
    p
}

/// Eigenphases of a Haar unitary built by Ginibre QR with the diagonal
/// phase fix. On eigensolver failure the draw is repeated from a perturbed
/// seed, and the count is recorded.
pub fn sample_cue(n: usize, seed: u64) -> Result<UnitarySample> {
    check_dimension(n)?;
    for attempt in 0..RESEEDS {
        let mut rng = sample_rng(seed, attempt);
        let u = dense::haar_from_qr(dense::Matrix::ginibre(n, &mut rng));
        let residual = u.unitarity_residual();
        if residual > UNITARITY_TOL {
            continue;
        }
        match dense::hessenberg_eigenvalues(dense::hessenberg(u)) {
            Ok(e) => {
                if e.iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
                    continue;
                }
                let phases = e.iter().map(|z| z.arg()).collect();
                return Ok(UnitarySample { dimension: n, eigenphases: sorted_phases(phases), reseeds: attempt as u32 });
            }
            Err(_) => continue,
        }
    }
    Err(Error::LinearAlgebra { dimension: n })
}

/// Eigenphases with the CUE(N) law via Verblunsky coefficients.
pub fn sample_cue_spectrum(n: usize, seed: u64) -> Result<UnitarySample> {
    check_dimension(n)?;
    let alphas = verblunsky::draw_coefficients(n, &mut sample_rng(seed, 0));
    Ok(UnitarySample { dimension: n, eigenphases: sorted_phases(verblunsky::eigenphases(&alphas)), reseeds: 0 })
}

pub fn sample_with(sampler: CueSampler, n: usize, seed: u64) -> Result<UnitarySample> {
    match sampler {
        CueSampler::Matrix => sample_cue(n, seed),
        CueSampler::Verblunsky => sample_cue_spectrum(n, seed),
    }
}

/// A real function on the circle with closed-form Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircleFunction {
    /// c + Σ_k a_k cos kθ + b_k sin kθ, k from 1.
    Trigonometric { constant: f64, cosines: Vec<f64>, sines: Vec<f64> },
    /// Indicator of the arc [start, start + length) mod 2π.
    Arc { start: f64, length: f64 },
}

impl CircleFunction {
    pub fn constant(c: f64) -> Self {
        CircleFunction::Trigonometric { constant: c, cosines: vec![], sines: vec![] }
    }

    pub fn cosine(k: usize, amplitude: f64) -> Result<Self> {
        require(k >= 1, "k", k as f64, "k ≥ 1")?;
        let mut cosines = vec![0.0; k];
        cosines[k - 1] = amplitude;
        Ok(CircleFunction::Trigonometric { constant: 0.0, cosines, sines: vec![] })
    }

    pub fn arc(start: f64, length: f64) -> Result<Self> {
        require(length > 0.0 && length <= TAU, "length", length, "0 < length ≤ 2π")?;
        require(start.is_finite(), "start", start, "finite")?;
        Ok(CircleFunction::Arc { start, length })
    }

    /// Arc [0, 2π/m).
    pub fn arc_fraction(m: f64) -> Result<Self> {
        require(m >= 1.0, "m", m, "m ≥ 1")?;
        Self::arc(0.0, TAU / m)
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self {
            CircleFunction::Trigonometric { constant, cosines, sines } => {
                let c: f64 = cosines.iter().enumerate().map(|(i, a)| a * ((i + 1) as f64 * theta).cos()).sum();
                let s: f64 = sines.iter().enumerate().map(|(i, b)| b * ((i + 1) as f64 * theta).sin()).sum();
                constant + c + s
            }
            CircleFunction::Arc { start, length } => {
                if (theta - start).rem_euclid(TAU) < *length {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// f̂_k = (1/2π)∫ f(θ)e^{−ikθ} dθ.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        match self {
            CircleFunction::Trigonometric { constant, cosines, sines } => {
                if k == 0 {
                    return Complex64::new(*constant, 0.0);
                }
                let i = k.unsigned_abs() as usize - 1;
                let a = cosines.get(i).copied().unwrap_or(0.0);
                let b = sines.get(i).copied().unwrap_or(0.0);
                Complex64::new(0.5 * a, -0.5 * b * k.signum() as f64)
            }
            CircleFunction::Arc { start, length } => {
                if k == 0 {
                    return Complex64::new(length / TAU, 0.0);
                }
                let kf = k as f64;
                let inner = (Complex64::from_polar(1.0, -kf * start)
                    - Complex64::from_polar(1.0, -kf * (start + length)))
                    / Complex64::new(0.0, kf);
                inner / TAU
            }
        }
    }

    /// |f̂_k|² in closed form.
    fn coefficient_power(&self, k: u64) -> f64 {
        match self {
            CircleFunction::Arc { length, .. } if k > 0 => {
                let s = (0.5 * k as f64 * length).sin();
                s * s / (PI * PI * (k * k) as f64)
            }
            _ => self.coefficient(k as i64).norm_sqr(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.coefficient(0).re
    }
}

impl fmt::Display for CircleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleFunction::Arc { start, length } => write!(f, "arc({start},{length})"),
            CircleFunction::Trigonometric { constant, cosines, sines } => {
                let mut terms = Vec::new();
                if *constant != 0.0 {
                    terms.push(format!("{constant}"));
                }
                for (name, list) in [("cos", cosines), ("sin", sines)] {
                    for (i, a) in list.iter().enumerate().filter(|(_, a)| **a != 0.0) {
                        terms.push(format!("{a}*{name}({})", i + 1));
                    }
                }
                if terms.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", terms.join("+"))
                }
            }
        }
    }
}

/// `arc(start,length)`, `arc(fraction)`, or a sum of terms `a*cos(k)`,
/// `a*sin(k)`, `cos(k)` and constants.
impl FromStr for CircleFunction {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let bad = |message: &str| Error::InvalidLiteral { text: text.to_string(), message: message.to_string() };
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(args) = compact.strip_prefix("arc(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = args.split(',').collect();
            return match parts.as_slice() {
                [fraction] => Self::arc(0.0, TAU * number(fraction)?),
                [start, length] => Self::arc(number(start)?, number(length)?),
                _ => Err(bad("arc takes one or two arguments")),
            };
        }
        let mut constant = 0.0;
        let mut cosines: Vec<f64> = Vec::new();
        let mut sines: Vec<f64> = Vec::new();
        // A '-' after a digit or ')' starts a new term; one after 'e' is an exponent.
        let mut split = String::with_capacity(compact.len() + 4);
        let mut last = None;
        for c in compact.chars() {
            if c == '-' && matches!(last, Some(p) if p == ')' || char::is_ascii_digit(&p)) {
                split.push('+');
            }
            split.push(c);
            last = Some(c);
        }
        for term in split.split('+').filter(|t| !t.is_empty()) {
            let (amp, body) = match term.split_once('*') {
                Some((a, b)) => (number(a)?, b),
                None if term.contains('(') => {
                    let neg = term.starts_with('-');
                    (if neg { -1.0 } else { 1.0 }, term.trim_start_matches('-'))
                }
                None => {
                    constant += number(term)?;
                    continue;
                }
            };
            let (name, arg) = body
                .strip_suffix(')')
                .and_then(|b| b.split_once('('))
                .ok_or_else(|| bad("expected cos(k) or sin(k)"))?;
            let k: usize = arg.parse().map_err(|_| bad("frequency must be a positive integer"))?;
            if k == 0 {
                return Err(bad("frequency must be a positive integer"));
            }
            let list = match name {
                "cos" => &mut cosines,
                "sin" => &mut sines,
                _ => return Err(bad("expected cos(k) or sin(k)")),
            };
            if list.len() < k {
                list.resize(k, 0.0);
            }
            list[k - 1] += amp;
        }
        Ok(CircleFunction::Trigonometric { constant, cosines, sines })
    }
}

/// Σ_j f(θ_j).
pub fn cue_linear_statistic(sample: &UnitarySample, f: &CircleFunction) -> f64 {
    sample.eigenphases.iter().map(|&t| f.value(t)).sum()
}

/// Σ_{1 ≤ |k| ≤ cutoff} |k||f̂_k|².
pub fn szego_variance(f: &CircleFunction, cutoff: u64) -> Result<f64> {
    require(cutoff >= 1, "cutoff", cutoff as f64, "cutoff ≥ 1")?;
    let top = match f {
        CircleFunction::Trigonometric { cosines, sines, .. } => (cosines.len().max(sines.len()) as u64).min(cutoff),
        CircleFunction::Arc { .. } => cutoff,
    };
    Ok((1..=top).map(|k| 2.0 * k as f64 * f.coefficient_power(k)).sum())
}

/// Var Σf(θ_j) under CUE(N): Σ_k min(|k|, N)|f̂_k|², summed to |k| ≤ `terms`.
pub fn cue_exact_variance(f: &CircleFunction, n: usize, terms: u64) -> Result<f64> {
    check_dimension(n)?;
    let head = szego_variance(f, n as u64)?;
    let tail: f64 = (n as u64 + 1..=terms).map(|k| 2.0 * n as f64 * f.coefficient_power(k)).sum();
    Ok(head + tail)
}

/// Σf(θ_j) straight from the Verblunsky coefficients: the phase count for
/// an arc, traces of powers of the CMV matrix for a trigonometric polynomial.
fn verblunsky_statistic(alphas: &[Complex64], f: &CircleFunction) -> f64 {
    match f {
        CircleFunction::Arc { start, length } => verblunsky::count_in(alphas, *start, start + length) as f64,
        CircleFunction::Trigonometric { constant, cosines, sines } => {
            let top = cosines.len().max(sines.len());
            let traces = verblunsky::power_traces(alphas, top);
            let c: f64 = cosines.iter().zip(&traces).map(|(a, t)| a * t.re).sum();
            let s: f64 = sines.iter().zip(&traces).map(|(b, t)| b * t.im).sum();
            constant * alphas.len() as f64 + c + s
        }
    }
}

/// One value of Σf(θ_j) − N f̂₀ per sample, sample i seeded by (seed, i).
pub fn cue_statistics(
    sampler: CueSampler,
    n: usize,
    f: &CircleFunction,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_dimension(n)?;
    let center = n as f64 * f.mean();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let seed = mix64(seed, i as u64);
            let total = match sampler {
                CueSampler::Matrix => cue_linear_statistic(&sample_cue(n, seed)?, f),
                CueSampler::Verblunsky => {
                    let alphas = verblunsky::draw_coefficients(n, &mut sample_rng(seed, 0));
                    verblunsky_statistic(&alphas, f)
                }
            };
            Ok(total - center)
        })
        .collect()
}

/// Monte Carlo moments of Σf(θ_j) − N f̂₀. The variance is reported raw
/// with the Szegő value Σ_{|k| ≤ N}|k||f̂_k|² as its prediction; m3..m6 and
/// the KS distance are of the standardized sample. `T` and `n` carry N.
pub fn cue_clt(n: usize, f: &CircleFunction, samples: usize, seed: u64) -> Result<MomentReport> {
    cue_clt_with(CueSampler::default(), n, f, samples, seed)
}

pub fn cue_clt_with(
    sampler: CueSampler,
    n: usize,
    f: &CircleFunction,
    samples: usize,
    seed: u64,
) -> Result<MomentReport> {
    require(samples >= 2, "samples", samples as f64, "need at least two samples")?;
    let values = cue_statistics(sampler, n, f, samples, seed)?;
    moment_report(&values, 0.0, szego_variance(f, n as u64)?, n as f64, n as f64)
}
