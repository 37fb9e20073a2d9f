use rayon::prelude::*;

use super::gram::{gram_index_at, gram_point, FIRST_GRAM_INDEX};
use super::turing::{count_bounds, CountBounds, TRUDGIAN_FLOOR, TURING_WINDOW};
use super::ZeroTable;
use crate::error::{Error, Result};
use crate::specialfn::{attainable_error, main_sum_length, z_value, EvaluationPrecision};

pub const MAX_HEIGHT: f64 = 1e8;
/// Each Gram interval in a short block is split into at most this many pieces.
pub const MAX_SUBDIVISION: usize = 64;
/// Target width of the final root bracket.
pub const ROOT_BRACKET: f64 = 1e-9;
/// Above this many Gram intervals a failed count is reported rather than
/// repaired by exhaustive subdivision.
const REPAIR_LIMIT: i64 = 20_000;
/// Tables starting below this height are scanned from the first Gram point,
/// so the count below t_min needs no lower Turing window.
const LOW_START: f64 = TRUDGIAN_FLOOR + 2.0 * TURING_WINDOW + 1.0;

/// All zeros of Z in [t_min, t_max], certified by Turing's method.
pub fn find_zeros(t_min: f64, t_max: f64, prec: &EvaluationPrecision) -> Result<ZeroTable> {
    if !(t_min >= 0.0 && t_min <= t_max && t_max <= MAX_HEIGHT) {
        return Err(Error::ParameterRange {
            name: "t_max",
            value: t_max,
            requirement: format!("need 0 ≤ t_min ({t_min}) ≤ t_max ≤ {MAX_HEIGHT:e}"),
        });
    }
    if t_min == t_max {
        return Ok(ZeroTable::empty(t_min, t_max));
    }
    let top = t_max.max(TRUDGIAN_FLOOR) + TURING_WINDOW + 1.0;
    let attainable = attainable_error(top);
    if prec.abs_tol < attainable || main_sum_length(top) > prec.max_terms {
        return Err(Error::PrecisionUnreachable { t: top, requested: prec.abs_tol, attainable });
    }

    let from_zero = t_min < LOW_START;
    let scan_lo = if from_zero { 0.0 } else { t_min - TURING_WINDOW - 1.0 };
    let p_hi = t_max.max(TRUDGIAN_FLOOR);
    let mut roots = scan_range(scan_lo, top, false);
    let mut check = certify_scan(&roots, from_zero, t_min, p_hi);
    if check.is_err() && gram_index_at(top) - gram_index_at(scan_lo) <= REPAIR_LIMIT {
        roots = scan_range(scan_lo, top, true);
        check = certify_scan(&roots, from_zero, t_min, p_hi);
    }
    let below = check?;

    let a = roots.partition_point(|&g| g < t_min);
    let b = roots.partition_point(|&g| g <= t_max);
    let mut table =
        ZeroTable::new(roots[a..b].to_vec(), t_min, t_max, super::TableSource::Computed)?.with_zeros_below(below);
    table.mark_certified(t_max);
    Ok(table)
}

/// Checks the scanned roots against Turing bounds and returns N(t_min).
fn certify_scan(roots: &[f64], from_zero: bool, t_min: f64, p_hi: f64) -> Result<u64> {
    let found_below = |t: f64| roots.partition_point(|&g| g < t) as u64;
    let hi = count_bounds(roots, p_hi, TURING_WINDOW, !from_zero);
    if from_zero {
        // Nothing can hide below the first Gram point, so only excess above
        // the found count needs excluding.
        let found = found_below(p_hi);
        if hi.upper_int() != found {
            return Err(Error::MissedZero { t_lo: 0.0, t_hi: p_hi, found, expected: hi.upper_int() });
        }
        return Ok(found_below(t_min));
    }
    let lo = count_bounds(roots, t_min, TURING_WINDOW, true);
    let n_lo = pinned(&lo, t_min)?;
    let n_hi = pinned(&hi, p_hi)?;
    let found = found_below(p_hi) - found_below(t_min);
    if n_hi < n_lo || found != n_hi - n_lo {
        return Err(Error::MissedZero { t_lo: t_min, t_hi: p_hi, found, expected: n_hi.saturating_sub(n_lo) });
    }
    Ok(n_lo)
}

fn pinned(b: &CountBounds, t: f64) -> Result<u64> {
    b.pinned().ok_or(Error::CertificationFailure { t, lower: b.lower, upper: b.upper })
}

/// Roots of Z in [lo, hi) found by Gram-block scanning.
pub(crate) fn scan_range(lo: f64, hi: f64, exhaustive: bool) -> Vec<f64> {
    let first = gram_index_at(lo).max(FIRST_GRAM_INDEX);
    let last = gram_index_at(hi) + 1;
    let first = extend_to_good(first, -1);
    let last = extend_to_good(last, 1);
    let points: Vec<(f64, f64)> = (first..=last)
        .into_par_iter()
        .map(|n| {
            let g = gram_point(n);
            (g, z_value(g))
        })
        .collect();
    let good: Vec<usize> = (0..points.len()).filter(|&i| is_good(first + i as i64, points[i].1)).collect();
    let blocks: Vec<(usize, usize)> = good.windows(2).map(|w| (w[0], w[1])).collect();
    let found: Vec<Vec<f64>> = blocks.par_iter().map(|&(a, b)| scan_block(&points[a..=b], b - a, exhaustive)).collect();
    let mut roots: Vec<f64> = found.into_iter().flatten().filter(|&g| g >= lo && g < hi).collect();
    roots.dedup();
    roots
}

fn is_good(n: i64, z: f64) -> bool {
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * z > 0.0
}

fn extend_to_good(mut n: i64, step: i64) -> i64 {
    for _ in 0..10_000 {
        if n <= FIRST_GRAM_INDEX && step < 0 {
            return FIRST_GRAM_INDEX;
        }
        if is_good(n, z_value(gram_point(n))) {
            return n;
        }
        n += step;
    }
    n
}

/// Roots in one Gram block; `expected` is the Rosser count.
fn scan_block(gram: &[(f64, f64)], expected: usize, exhaustive: bool) -> Vec<f64> {
    let mut grid: Vec<(f64, f64)> = gram.to_vec();
    let mut pieces = 1;
    loop {
        let changes = sign_changes(&grid);
        let done =
            if exhaustive { pieces >= MAX_SUBDIVISION } else { changes >= expected || pieces >= MAX_SUBDIVISION };
        if done {
            break;
        }
        grid = refine_grid(&grid);
        pieces *= 2;
    }
    grid.windows(2).filter(|w| w[0].1 * w[1].1 < 0.0).map(|w| refine_root(w[0].0, w[0].1, w[1].0, w[1].1)).collect()
}

fn sign_changes(grid: &[(f64, f64)]) -> usize {
    grid.windows(2).filter(|w| w[0].1 * w[1].1 < 0.0).count()
}

fn refine_grid(grid: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0]);
        let mid = 0.5 * (w[0].0 + w[1].0);
        out.push((mid, z_value(mid)));
    }
    out.push(*grid.last().expect("nonempty grid"));
    out
}

fn ulp(x: f64) -> f64 {
    let x = x.abs();
    f64::from_bits(x.to_bits() + 1) - x
}

/// Brent's method on a sign-changing bracket. Stops once the bracket is
/// no wider than ROOT_BRACKET (or two ulps at very large heights).
pub(crate) fn refine_root(a0: f64, fa0: f64, b0: f64, fb0: f64) -> f64 {
    refine_with(z_value, a0, fa0, b0, fb0, ROOT_BRACKET)
}

pub(crate) fn refine_with(mut f: impl FnMut(f64) -> f64, a0: f64, fa0: f64, b0: f64, fb0: f64, width: f64) -> f64 {
    let (mut a, mut fa, mut b, mut fb) = (a0, fa0, b0, fb0);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = (0.25 * width).max(ulp(b));
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    b
}

/// Sign changes of Z on a uniform grid of the given step over [lo, hi],
/// each refined to a root. Independent of the Gram machinery; used as a
/// cross-check.
pub fn locate_sign_changes(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    let values: Vec<(f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let t = (lo + i as f64 * step).min(hi);
            (t, z_value(t))
        })
        .collect();
    values.windows(2).filter(|w| w[0].1 * w[1].1 < 0.0).map(|w| refine_root(w[0].0, w[0].1, w[1].0, w[1].1)).collect()
}
