//! Complex log-gamma and digamma for arguments with positive real part.

use num_complex::Complex64;

use super::tables::BERNOULLI_EVEN;

const SHIFT_RADIUS: f64 = 8.0;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// ln Γ(z) on the branch continuous in the right half plane.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for (j, &b) in BERNOULLI_EVEN.iter().enumerate().take(12) {
        let k = (j + 1) as f64;
        series += power * (b / (2.0 * k * (2.0 * k - 1.0)));
        power *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_TWO_PI + series - shift
}

/// ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_RADIUS {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv2;
    for (j, &b) in BERNOULLI_EVEN.iter().enumerate().take(12) {
        let k = (j + 1) as f64;
        series += power * (b / (2.0 * k));
        power *= inv2;
    }
    w.ln() - 0.5 * inv - series - shift
}
