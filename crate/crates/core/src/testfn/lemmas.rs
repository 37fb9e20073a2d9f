use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bandlimited_convolve, BumpKernel, FourierPair, SmoothedFunction};
use crate::error::{require, Result};
use crate::quad::{adaptive_pieces, Tolerance};

/// |F(x+iε) + F(x−iε) − 2F(x)| for F = Ǩ_L∗η.
pub fn second_difference(kernel: &BumpKernel, eta: &dyn FourierPair, scale: f64, eps: f64, x: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    let up = bandlimited_convolve(kernel, scale, eta, Complex64::new(x, eps))?;
    let down = bandlimited_convolve(kernel, scale, eta, Complex64::new(x, -eps))?;
    let mid = bandlimited_convolve(kernel, scale, eta, Complex64::from(x))?;
    Ok((up + down - 2.0 * mid).norm())
}

/// Largest ratio of the second difference to ε/(1+x²)·(1+εL)e^{2πκεL} over
/// the grid: an empirical implied constant.
pub fn check_pointwise_bound(
    kernel: &BumpKernel,
    eta: &dyn FourierPair,
    scale: f64,
    eps: f64,
    xs: &[f64],
) -> Result<f64> {
    require(eps >= 0.0, "eps", eps, "eps >= 0")?;
    require(scale > 0.0, "L", scale, "L > 0")?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    let growth = (1.0 + eps * scale) * (2.0 * PI * kernel.kappa() * eps * scale).exp();
    let ratios: Result<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            let rhs = eps / (1.0 + x * x) * growth;
            Ok(second_difference(kernel, eta, scale, eps, x)? / rhs)
        })
        .collect();
    Ok(ratios?.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationNorm {
    /// ∫|f − Ǩ_L∗f| dy.
    Plain,
    /// ∫|f − Ǩ_L∗f| log(|y|+2) dy.
    LogWeighted,
    /// (1/L)·Σ_ℓ sup over [ℓ/L, (ℓ+1)/L) of |f − Ǩ_L∗f|: the envelope at
    /// cell width 1/L, normalized by the cell width.
    Envelope,
}

/// Truncation error of the band-limited smoothing in the chosen norm.
/// Compactly supported f use the spatial evaluator and a tail bound to fix
/// the integration range; band-limited f are integrated over their extent.
pub fn l1_truncation_error(kernel: &BumpKernel, scale: f64, f: &dyn FourierPair, norm: TruncationNorm) -> Result<f64> {
    require(scale > 0.0, "L", scale, "L > 0")?;
    let cycle = 1.0 / (kernel.kappa() * scale);
    let (lo, hi, smoothed): (f64, f64, Box<dyn Fn(f64) -> f64 + Sync>) = match f.as_compact() {
        Some(eta) => {
            let mut s = SmoothedFunction::new(*kernel, scale, eta)?;
            // The tail beyond the reach is below 1e-7/L in every norm.
            let c = eta.l1_norm() * kernel.decay_constant() / scale.powi(3);
            let reach = (2.0 * c * scale / 1e-7).cbrt().max(4.0);
            let (a, b) = eta.support();
            s.tabulate(a - reach - 1.0, b + reach + 1.0);
            (a - reach, b + reach, Box::new(move |y| s.at_real(y)))
        }
        None => {
            let (a, b) = f.spatial_extent();
            (
                a,
                b,
                Box::new(move |y| {
                    bandlimited_convolve(kernel, scale, f, Complex64::from(y)).map(|v| v.re).unwrap_or(f64::NAN)
                }),
            )
        }
    };
    let diff = |y: f64| f.value(y) - smoothed(y);
    match norm {
        TruncationNorm::Plain | TruncationNorm::LogWeighted => {
            let weighted = norm == TruncationNorm::LogWeighted;
            let cells = ((hi - lo) / cycle).ceil() as usize;
            let mut breaks: Vec<f64> = (0..=cells).map(|i| lo + (hi - lo) * i as f64 / cells as f64).collect();
            breaks.extend(f.spatial_breaks());
            breaks.retain(|b| *b >= lo && *b <= hi);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let tol = Tolerance { abs: 1e-12, rel: 1e-9, order: 16 };
            let pieces: Result<Vec<f64>> = breaks
                .par_windows(2)
                .map(|w| {
                    adaptive_pieces(
                        |y| {
                            let d = diff(y).abs();
                            if weighted {
                                d * (y.abs() + 2.0).ln()
                            } else {
                                d
                            }
                        },
                        w,
                        tol,
                    )
                })
                .collect();
            Ok(pieces?.into_iter().sum())
        }
        TruncationNorm::Envelope => {
            let width = 1.0 / scale;
            let first = (lo / width).floor() as i64;
            let last = (hi / width).ceil() as i64;
            let jumps = f.spatial_breaks();
            let left_value = |y: f64| f.value_left(y) - smoothed(y);
            let total: f64 = (first..last)
                .into_par_iter()
                .map(|l| {
                    let a = l as f64 * width;
                    let b = a + width;
                    let mut cuts = vec![a];
                    cuts.extend(jumps.iter().copied().filter(|j| *j > a && *j < b));
                    cuts.push(b);
                    cuts.windows(2).map(|w| cell_sup(&diff, &left_value, w[0], w[1])).fold(0.0, f64::max)
                })
                .collect::<Vec<f64>>()
                .into_iter()
                .sum();
            Ok(total * width)
        }
    }
}

/// sup |g| over [a, b) where g is smooth on the open cell: sampled, then
/// refined around the best interior sample; the right end enters as a limit.
fn cell_sup(g: &(dyn Fn(f64) -> f64 + Sync), g_left: &(dyn Fn(f64) -> f64 + Sync), a: f64, b: f64) -> f64 {
    const SAMPLES: usize = 8;
    let h = (b - a) / SAMPLES as f64;
    let values: Vec<f64> = (0..SAMPLES).map(|i| g(a + h * i as f64).abs()).collect();
    let mut best = values.iter().copied().fold(g_left(b).abs(), f64::max);
    let (imax, _) = values.iter().enumerate().fold((0, f64::MIN), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let lo = a + h * imax.saturating_sub(1) as f64;
    let hi = (a + h * (imax + 1) as f64).min(b);
    let (mut x0, mut x1) = (lo, hi);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let m1 = x1 - ratio * (x1 - x0);
        let m2 = x0 + ratio * (x1 - x0);
        if g(m1).abs() < g(m2).abs() {
            x0 = m1;
        } else {
            x1 = m2;
        }
    }
    best = best.max(g(0.5 * (x0 + x1)).abs());
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::{FejerSquare, TestFunction};

    #[test]
    fn zero_eps_gives_zero() {
        let k = BumpKernel::new(1).unwrap();
        let eta = TestFunction::indicator(0.0, 1.0).unwrap();
        assert_eq!(check_pointwise_bound(&k, &eta, 8.0, 0.0, &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn second_difference_is_quadratic_in_eps() {
        let k = BumpKernel::new(1).unwrap();
        let eta = TestFunction::indicator(0.0, 1.0).unwrap();
        let r: Vec<f64> =
            [1e-1, 1e-2, 1e-3].iter().map(|&e| second_difference(&k, &eta, 32.0, e, 0.3).unwrap() / (e * e)).collect();
        assert!((r[1] / r[2] - 1.0).abs() < 1e-2, "{r:?}");
        assert!((r[0] / r[1] - 1.0).abs() < 0.5, "{r:?}");
    }

    #[test]
    fn plateau_fixed_point() {
        let k = BumpKernel::new(1).unwrap();
        let f = FejerSquare::new(k.plateau() * 16.0).unwrap();
        let err = l1_truncation_error(&k, 16.0, &f, TruncationNorm::Plain).unwrap();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn envelope_norm_of_indicator() {
        let k = BumpKernel::new(1).unwrap();
        let f = TestFunction::indicator(0.0, 1.0).unwrap();
        let a = l1_truncation_error(&k, 16.0, &f, TruncationNorm::Envelope).unwrap();
        let b = l1_truncation_error(&k, 16.0, &f, TruncationNorm::Plain).unwrap();
        assert!(a > b && a < 20.0 * b, "{a} vs {b}");
    }
}
