//! CUE spectra from random Verblunsky coefficients.
//!
//! With α_k independent, α_k having density ∝ (1 − |z|²)^{N−k−2} on the disk
//! for k < N − 1 and α_{N−1} uniform on the circle, the zeros of the
//! paraorthogonal polynomial Φ_N are distributed exactly as CUE(N)
//! eigenvalues. They are the solutions of e^{iΨ(θ)} = ᾱ_{N−1}, where Ψ is
//! the continuous phase of zΦ_{N−1}/Φ*_{N−1}: increasing, with Ψ(θ + 2π) =
//! Ψ(θ) + 2πN.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

type C = Complex64;

const ROOT_TOL: f64 = 1e-14;
const MAX_STEPS: usize = 200;

pub(crate) fn draw_coefficients(n: usize, rng: &mut impl Rng) -> Vec<C> {
    (0..n)
        .map(|k| {
            let phase = rng.gen_range(0.0..TAU);
            if k + 1 == n {
                return C::from_polar(1.0, phase);
            }
            // |α_k|² ~ Beta(1, N − k − 1).
            let u: f64 = 1.0 - rng.gen::<f64>();
            let r2 = 1.0 - u.powf(1.0 / (n - k - 1) as f64);
            C::from_polar(r2.sqrt(), phase)
        })
        .collect()
}

/// Ψ(θ) and Ψ′(θ) from the first N − 1 coefficients.
pub(crate) fn prufer_phase(alphas: &[C], theta: f64) -> (f64, f64) {
    let mut psi = 0.0;
    let mut slope = 0.0;
    for a in alphas {
        let angle = theta + psi;
        let q = 1.0 - a * C::from_polar(1.0, angle);
        psi = angle - 2.0 * q.arg();
        slope = (1.0 + slope) * (1.0 - a.norm_sqr()) / q.norm_sqr();
    }
    (theta + psi, 1.0 + slope)
}

/// Zeros of Φ_N as sorted phases in [0, 2π).
pub(crate) fn eigenphases(alphas: &[C]) -> Vec<f64> {
    let n = alphas.len();
    let (inner, last) = alphas.split_at(n - 1);
    let (start, start_slope) = prufer_phase(inner, 0.0);
    let target0 = start + (last[0].conj().arg() - start).rem_euclid(TAU);
    let mut phases = Vec::with_capacity(n);
    let mut prev = 0.0;
    let mut guess = (target0 - start) / start_slope;
    for j in 0..n {
        let target = target0 + TAU * j as f64;
        let (root, slope) = solve(inner, target, prev, guess);
        phases.push(root);
        prev = root;
        guess = root + TAU / slope;
    }
    phases
}

/// Ψ(θ) = target on [lo, 2π], Newton safeguarded by bisection. Returns the
/// root and the last slope seen.
fn solve(alphas: &[C], target: f64, lo: f64, guess: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (lo, TAU);
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    let mut dp = 1.0;
    let mut last_miss = f64::INFINITY;
    for _ in 0..MAX_STEPS {
        let (p, slope) = prufer_phase(alphas, x);
        dp = slope;
        let f = p - target;
        if f == 0.0 {
            return (x, dp);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // Newton may cycle on the steep risers; bisect unless it halves |f|.
        let mut next = x - f / dp;
        if !(next > lo && next < hi) || f.abs() > 0.5 * last_miss {
            next = 0.5 * (lo + hi);
        }
        last_miss = f.abs();
        if (next - x).abs() < ROOT_TOL || hi - lo < ROOT_TOL {
            return (next, dp);
        }
        x = next;
    }
    (x, dp)
}

/// Number of eigenphases in [a, b) mod 2π, for b − a ≤ 2π: the count of
/// targets ᾱ_{N−1}-phase + 2πm that Ψ passes on [a, b).
pub(crate) fn count_in(alphas: &[C], a: f64, b: f64) -> u64 {
    let (inner, last) = alphas.split_at(alphas.len() - 1);
    let target = last[0].conj().arg();
    let (pa, _) = prufer_phase(inner, a);
    let (pb, _) = prufer_phase(inner, b);
    let m = |p: f64| ((p - target) / TAU).ceil();
    (m(pb) - m(pa)).max(0.0) as u64
}

/// Banded square matrix: row i stores columns i − w ..= i + w.
struct Band {
    n: usize,
    w: usize,
    data: Vec<C>,
}

impl Band {
    fn new(n: usize, w: usize) -> Self {
        Band { n, w, data: vec![C::new(0.0, 0.0); n * (2 * w + 1)] }
    }

    fn get(&self, i: usize, j: usize) -> C {
        if j + self.w < i || j > i + self.w {
            return C::new(0.0, 0.0);
        }
        self.data[i * (2 * self.w + 1) + j + self.w - i]
    }

    fn add(&mut self, i: usize, j: usize, v: C) {
        let w = self.w;
        self.data[i * (2 * w + 1) + j + w - i] += v;
    }

    fn columns(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.w)..(i + self.w + 1).min(self.n)
    }

    fn mul(&self, other: &Band) -> Band {
        let mut out = Band::new(self.n, (self.w + other.w).min(self.n));
        for i in 0..self.n {
            for m in self.columns(i) {
                let a = self.get(i, m);
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in other.columns(m) {
                    out.add(i, j, a * other.get(m, j));
                }
            }
        }
        out
    }

    fn trace(&self) -> C {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

/// The CMV matrix LM, L = Θ₀ ⊕ Θ₂ ⊕ …, M = 1 ⊕ Θ₁ ⊕ Θ₃ ⊕ …, with
/// Θ_j = [[ᾱ_j, ρ_j], [ρ_j, −α_j]] and Θ_{N−1} = (ᾱ_{N−1}).
fn cmv(alphas: &[C]) -> Band {
    let n = alphas.len();
    let factor = |parity: usize| {
        let mut b = Band::new(n, 1);
        if parity == 1 {
            b.add(0, 0, C::new(1.0, 0.0));
        }
        let mut k = parity;
        while k < n {
            let a = alphas[k];
            if k + 1 < n {
                let rho = (1.0 - a.norm_sqr()).max(0.0).sqrt();
                b.add(k, k, a.conj());
                b.add(k, k + 1, C::new(rho, 0.0));
                b.add(k + 1, k, C::new(rho, 0.0));
                b.add(k + 1, k + 1, -a);
            } else {
                b.add(k, k, a.conj());
            }
            k += 2;
        }
        b
    };
    factor(0).mul(&factor(1))
}

/// Tr U^k for k = 1..=top.
pub(crate) fn power_traces(alphas: &[C], top: usize) -> Vec<C> {
    let c = cmv(alphas);
    let mut traces = Vec::with_capacity(top);
    let mut p = cmv(alphas);
    for k in 1..=top {
        if k > 1 {
            p = p.mul(&c);
        }
        traces.push(p.trace());
    }
    traces
}
