//! Integrals of window counts, which are piecewise constant in t.

use crate::quad::rule;
use crate::testfn::WeightFunction;

/// A stretch [start, end) of t on which the window count is `count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub count: f64,
}

/// Segments of t ∈ [lo, hi] for count(t) = Σ weight(p) over points p with
/// t + a ≤ p < t + b. Points must be sorted.
pub fn window_segments(points: &[f64], weights: &[f64], a: f64, b: f64, lo: f64, hi: f64) -> Vec<Segment> {
    debug_assert!(b > a && points.len() == weights.len());
    // p counts for t ∈ (p − b, p − a].
    let first = points.partition_point(|&p| p - b < lo);
    let mut count: f64 = points.iter().zip(weights).take(first).filter(|(&p, _)| p - a >= lo).map(|(_, &w)| w).sum();
    let mut enter = first;
    let mut leave = points.partition_point(|&p| p - a < lo);
    let mut out = Vec::new();
    let mut t = lo;
    loop {
        let next_enter = points.get(enter).map(|p| p - b).unwrap_or(f64::INFINITY);
        let next_leave = points.get(leave).map(|p| p - a).unwrap_or(f64::INFINITY);
        let next = next_enter.min(next_leave).min(hi);
        if next > t {
            out.push(Segment { start: t, end: next, count });
            t = next;
        }
        if t >= hi {
            break;
        }
        if next_leave <= next_enter {
            count -= weights[leave];
            leave += 1;
        } else {
            count += weights[enter];
            enter += 1;
        }
    }
    for s in &mut out {
        // Cancellation can leave dust on an empty window.
        if s.count.abs() < 1e-9 {
            s.count = 0.0;
        }
    }
    out
}

/// ∫ σ(t/T)/T over [start, end), with σ smooth on the scale of T.
pub fn weight_integral(weight: &dyn WeightFunction, height: f64, start: f64, end: f64) -> f64 {
    rule(4).integrate(|t| weight.value(t / height), start, end) / height
}
