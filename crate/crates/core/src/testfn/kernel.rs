use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};

/// Even cutoff K with K ≡ 1 on [−p, p], a quintic smoothstep taper on
/// p < |ξ| < 2p and K = 0 beyond κ = 2p, where p = 1/(16k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpKernel {
    order: u32,
}

/// Taper profile R(s) = 1 − 10s³ + 15s⁴ − 6s⁵ and its first two derivatives.
fn taper(s: f64) -> (f64, f64, f64) {
    // Written in 1 − s so the vanishing end is computed to full relative precision.
    let q = 1.0 - s;
    let r = q * q * q * (10.0 - 15.0 * q + 6.0 * q * q);
    let s2 = s * s;
    let r1 = -30.0 * s2 * (1.0 - s) * (1.0 - s);
    let r2 = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
    (r, r1, r2)
}

/// μ_m = ∫₀¹ s^m R(s) ds.
fn taper_moment(m: usize) -> f64 {
    let m = m as f64;
    1.0 / (m + 1.0) - 10.0 / (m + 4.0) + 15.0 / (m + 5.0) - 6.0 / (m + 6.0)
}

const SERIES_RADIUS: f64 = 4.0;
const SERIES_TERMS: usize = 48;

/// ∫₀¹ R(s) e^{iβs} ds by its power series; used for |β| < SERIES_RADIUS.
fn taper_transform_series(beta: Complex64) -> Complex64 {
    let ib = Complex64::i() * beta;
    let mut term = Complex64::from(1.0);
    let mut sum = Complex64::from(0.0);
    for m in 0..SERIES_TERMS {
        sum += term * taper_moment(m);
        term = term * ib / (m as f64 + 1.0);
    }
    sum
}

/// The part of ∫₀¹ R(s) e^{iβs} ds left after the leading 1/(iβ) boundary
/// term; the other boundary terms vanish since R′ and R″ vanish at both ends.
fn taper_transform_remainder(beta: Complex64) -> Complex64 {
    let e = (Complex64::i() * beta).exp();
    let b2 = beta * beta;
    let b4 = b2 * b2;
    let b5 = b4 * beta;
    let b6 = b4 * b2;
    (e - 1.0) * 60.0 / b4 + Complex64::i() * (e + 1.0) * 360.0 / b5 - (e - 1.0) * 720.0 / b6
}

fn sin_over(y: Complex64) -> Complex64 {
    if y.norm() < 1e-4 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

impl Default for BumpKernel {
    fn default() -> Self {
        BumpKernel { order: 1 }
    }
}

impl BumpKernel {
    pub fn new(order: u32) -> Result<Self> {
        require(order >= 1, "order_k", order as f64, "a positive integer")?;
        Ok(BumpKernel { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn plateau(&self) -> f64 {
        1.0 / (16.0 * self.order as f64)
    }

    pub fn kappa(&self) -> f64 {
        1.0 / (8.0 * self.order as f64)
    }

    fn taper_width(&self) -> f64 {
        self.kappa() - self.plateau()
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.derivatives(xi).0
    }

    /// (K, K′, K″) at ξ.
    pub fn derivatives(&self, xi: f64) -> (f64, f64, f64) {
        let a = xi.abs();
        let p = self.plateau();
        let w = self.taper_width();
        if a <= p {
            (1.0, 0.0, 0.0)
        } else if a >= self.kappa() {
            (0.0, 0.0, 0.0)
        } else {
            let (r, r1, r2) = taper((a - p) / w);
            (r, xi.signum() * r1 / w, r2 / (w * w))
        }
    }

    /// Ǩ(u) = ∫ K(ξ) e(uξ) dξ, entire in u.
    pub fn transform(&self, u: Complex64) -> Complex64 {
        let omega = 2.0 * PI * u;
        let p = self.plateau();
        let w = self.taper_width();
        let beta = omega * w;
        let up = (Complex64::i() * omega * p).exp();
        let down = 1.0 / up;
        if beta.norm() < SERIES_RADIUS {
            let plateau = 2.0 * p * sin_over(omega * p);
            plateau + w * (up * taper_transform_series(beta) + down * taper_transform_series(-beta))
        } else {
            // The plateau contribution cancels the leading taper boundary term.
            w * (up * taper_transform_remainder(beta) + down * taper_transform_remainder(-beta))
        }
    }

    /// Ǩ_L(v) = L·Ǩ(Lv), the inverse transform of ξ ↦ K(ξ/L).
    pub fn scaled_transform(&self, scale: f64, v: Complex64) -> Complex64 {
        scale * self.transform(v * scale)
    }

    /// A with |Ǩ(u)| ≤ A·e^{2πκ|Im u|}/|Re u|⁴: four integrations by parts
    /// leave the two jumps of K‴ (60/w³ each) and ∫|K⁗| = 180/w³.
    pub fn decay_constant(&self) -> f64 {
        let w = self.taper_width();
        600.0 / (w.powi(3) * (2.0 * PI).powi(4))
    }

    /// Upper bound for |Ǩ_L(v)|.
    pub fn scaled_transform_bound(&self, scale: f64, v: Complex64) -> f64 {
        let growth = (2.0 * PI * self.kappa() * scale * v.im.abs()).exp();
        let trivial = scale * 2.0 * 0.75 * self.kappa() * growth;
        let far = self.decay_constant() * growth / (scale.powi(3) * v.re.powi(4));
        trivial.min(far)
    }
}
