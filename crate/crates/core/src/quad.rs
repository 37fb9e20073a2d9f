//! Gauss–Legendre rules and an adaptive bisection integrator.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DEPTH: usize = 30;
const MAX_ORDER: usize = 64;
// Keeps the per-panel tolerance from vanishing around kinks.
const SHARE_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    fn compute(n: usize) -> Rule {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    }

    /// ∫_a^b f with this rule.
    pub fn integrate<V: QuadValue>(&self, mut f: impl FnMut(f64) -> V, a: f64, b: f64) -> V {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = V::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * w;
        }
        acc * half
    }

    /// The rule's estimate together with the estimate of ∫|f|.
    fn integrate_with_size<V: QuadValue>(&self, mut f: impl FnMut(f64) -> V, a: f64, b: f64) -> (V, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = V::default();
        let mut size = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            size += v.magnitude() * w;
            acc = acc + v * w;
        }
        (acc * half, size * half.abs())
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The n-point Gauss–Legendre rule on [−1, 1], 1 ≤ n ≤ 64.
pub fn rule(n: usize) -> &'static Rule {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    assert!((1..=MAX_ORDER).contains(&n), "Gauss–Legendre order {n} unsupported");
    let rules = RULES.get_or_init(|| {
        (0..=MAX_ORDER)
            .map(|n| match n {
                0 => Rule { nodes: vec![], weights: vec![] },
                1 => Rule { nodes: vec![0.0], weights: vec![2.0] },
                _ => Rule::compute(n),
            })
            .collect()
    });
    &rules[n]
}

pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub order: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-13, rel: 1e-12, order: 16 }
    }
}

// Differences below this multiple of ε·∫|f| over a panel are rounding noise.
const ROUNDOFF_FACTOR: f64 = 64.0 * f64::EPSILON;

/// Adaptive bisection: a panel is accepted when the rule on the panel and
/// on its two halves agree to within the panel's share of the tolerance,
/// or to within rounding noise.
pub fn adaptive<V: QuadValue>(mut f: impl FnMut(f64) -> V, a: f64, b: f64, tol: Tolerance) -> Result<V> {
    if a == b {
        return Ok(V::default());
    }
    let r = rule(tol.order);
    let width = (b - a).abs();
    let mut total = V::default();
    let whole = r.integrate(&mut f, a, b);
    let mut stack = vec![(a, b, whole, 0usize)];
    while let Some((lo, hi, estimate, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, left_size) = r.integrate_with_size(&mut f, lo, mid);
        let (right, right_size) = r.integrate_with_size(&mut f, mid, hi);
        let refined = left + right;
        let share = ((hi - lo).abs() / width).max(SHARE_FLOOR);
        let allowed =
            (tol.abs * share).max(tol.rel * refined.magnitude()).max(ROUNDOFF_FACTOR * (left_size + right_size));
        if (refined - estimate).magnitude() <= allowed {
            total = total + refined;
        } else if depth >= MAX_DEPTH {
            return Err(Error::QuadratureNonconvergence { a: lo, b: hi });
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}

/// Adaptive integration over consecutive intervals between sorted breakpoints.
pub fn adaptive_pieces<V: QuadValue>(mut f: impl FnMut(f64) -> V, breaks: &[f64], tol: Tolerance) -> Result<V> {
    let mut total = V::default();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            total = total + adaptive(&mut f, w[0], w[1], tol)?;
        }
    }
    Ok(total)
}
