//! Sine and cosine integrals, following the classic series / continued
//! fraction split at |x| = 2.

use num_complex::Complex64;

use super::EULER_GAMMA;

const MAX_ITER: usize = 200;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Returns (Si(x), Ci(|x|)). Ci is −∞ at 0.
pub fn sine_cosine_integral(x: f64) -> (f64, f64) {
    let t = x.abs();
    if t == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let (si, ci) = if t > 2.0 {
        // Lentz evaluation of E1(it).
        let mut b = Complex64::new(1.0, t);
        let mut c = Complex64::new(1.0 / TINY, 0.0);
        let mut d = b.inv();
        let mut h = d;
        for i in 2..MAX_ITER {
            let a = -(((i - 1) * (i - 1)) as f64);
            b += 2.0;
            d = (d * a + b).inv();
            c = b + c.inv() * a;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < EPS {
                break;
            }
        }
        h *= Complex64::new(t.cos(), -t.sin());
        (std::f64::consts::FRAC_PI_2 + h.im, -h.re)
    } else {
        let mut sums = 0.0;
        let mut sumc = 0.0;
        let mut sum = 0.0;
        let mut sign = 1.0;
        let mut fact = 1.0;
        let mut odd = true;
        for k in 1..MAX_ITER {
            fact *= t / k as f64;
            let term = fact / k as f64;
            sum += sign * term;
            let err = term / sum.abs();
            if odd {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if err < EPS {
                break;
            }
            odd = !odd;
        }
        (sums, sumc + t.ln() + EULER_GAMMA)
    };
    (if x < 0.0 { -si } else { si }, ci)
}
