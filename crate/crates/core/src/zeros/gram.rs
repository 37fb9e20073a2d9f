use std::f64::consts::PI;

use crate::specialfn::{omega, riemann_siegel_theta};

/// The first Gram point on the increasing branch of θ (θ = −π).
pub(crate) const FIRST_GRAM_INDEX: i64 = -1;

fn lambert_w(y: f64) -> f64 {
    let mut w = (1.0 + y).ln();
    for _ in 0..100 {
        let e = w.exp();
        let step = (w * e - y) / (e * (w + 1.0));
        w -= step;
        if step.abs() < 1e-15 * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// g_n with θ(g_n) = nπ, for n ≥ −1.
pub fn gram_point(n: i64) -> f64 {
    assert!(n >= FIRST_GRAM_INDEX, "Gram points are indexed from -1");
    let mut t = if n < 0 {
        9.67
    } else {
        let a = n as f64 + 0.125;
        2.0 * PI * a / lambert_w(a / std::f64::consts::E)
    };
    let target = n as f64 * PI;
    for _ in 0..60 {
        let step = (riemann_siegel_theta(t) - target) / (0.5 * omega(t));
        t -= step;
        if step.abs() <= 4.0 * f64::EPSILON * t {
            break;
        }
    }
    t
}

/// Index n with g_n ≤ t < g_{n+1}; −2 below the first Gram point.
pub fn gram_index_at(t: f64) -> i64 {
    if t < gram_point(FIRST_GRAM_INDEX) {
        return FIRST_GRAM_INDEX - 1;
    }
    let mut n = (riemann_siegel_theta(t) / PI).floor() as i64;
    // Guard the floor against rounding right at a Gram point.
    while n > FIRST_GRAM_INDEX && gram_point(n) > t {
        n -= 1;
    }
    while gram_point(n + 1) <= t {
        n += 1;
    }
    n
}
