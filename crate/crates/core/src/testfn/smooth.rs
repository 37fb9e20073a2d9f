use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{BumpKernel, FourierPair, TestFunction};
use crate::error::{require, Result};
use crate::quad::{adaptive_pieces, rule, Tolerance};

const FREQUENCY_TOL: Tolerance = Tolerance { abs: 1e-15, rel: 1e-13, order: 16 };

/// Ǩ_L∗η(z) = ∫ K(ξ/L) η̂(ξ) e(zξ) dξ, computed on the frequency side.
pub fn bandlimited_convolve(kernel: &BumpKernel, scale: f64, eta: &dyn FourierPair, z: Complex64) -> Result<Complex64> {
    require(scale > 0.0, "L", scale, "L > 0")?;
    let top = kernel.kappa() * scale;
    let (lo, hi) = eta.spatial_extent();
    // η̂ oscillates at rate max|u| over the support, e(zξ) at rate |Re z|.
    let rate = z.re.abs() + lo.abs().max(hi.abs()) + 1.0;
    let cells = (top * rate).ceil() as usize;
    let mut breaks: Vec<f64> = (0..=cells).map(|i| top * i as f64 / cells as f64).collect();
    breaks.push(kernel.plateau() * scale);
    breaks.extend(eta.frequency_breaks().into_iter().filter(|b| *b > 0.0 && *b < top));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let phase = Complex64::i() * 2.0 * PI * z;
    // Pair ξ with −ξ so a real η at real z gives an exactly real result.
    let integrand = |xi: f64| {
        let k = kernel.value(xi / scale);
        if k == 0.0 {
            return Complex64::from(0.0);
        }
        let plus = eta.fourier(xi) * (phase * xi).exp();
        let minus = eta.fourier(-xi) * (-phase * xi).exp();
        (plus + minus) * k
    };
    adaptive_pieces(integrand, &breaks, FREQUENCY_TOL)
}

const PANEL_ORDER: usize = 20;
const CHEB_DEGREE: usize = 20;

/// Ǩ_L∗η for a compactly supported η, evaluated in space as
/// ∫ η(y) Ǩ_L(z − y) dy with the closed-form Ǩ. An optional Chebyshev table
/// speeds up repeated real evaluations.
#[derive(Debug, Clone)]
pub struct SmoothedFunction {
    kernel: BumpKernel,
    scale: f64,
    eta: TestFunction,
    panels: Vec<(f64, f64, f64, f64)>,
    table: Option<ChebTable>,
}

#[derive(Debug, Clone)]
struct ChebTable {
    lo: f64,
    width: f64,
    coeffs: Vec<[f64; CHEB_DEGREE + 1]>,
}

impl SmoothedFunction {
    pub fn new(kernel: BumpKernel, scale: f64, eta: &TestFunction) -> Result<Self> {
        require(scale > 0.0, "L", scale, "L > 0")?;
        // Ǩ_L carries frequencies up to κL; one cycle per panel.
        let cycle = 1.0 / (kernel.kappa() * scale);
        let mut panels = Vec::new();
        for p in eta.pieces() {
            let count = ((p.end - p.start) / cycle).ceil().max(1.0) as usize;
            let step = (p.end - p.start) / count as f64;
            for i in 0..count {
                let a = p.start + step * i as f64;
                let b = if i + 1 == count { p.end } else { a + step };
                panels.push((a, b, p.constant, p.slope));
            }
        }
        Ok(SmoothedFunction { kernel, scale, eta: eta.clone(), panels, table: None })
    }

    pub fn kernel(&self) -> &BumpKernel {
        &self.kernel
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eta(&self) -> &TestFunction {
        &self.eta
    }

    /// Direct spatial quadrature at any complex argument.
    pub fn at(&self, z: Complex64) -> Complex64 {
        let r = rule(PANEL_ORDER);
        let mut sum = Complex64::from(0.0);
        for &(a, b, c0, c1) in &self.panels {
            sum += r.integrate(|y| self.kernel.scaled_transform(self.scale, z - y) * (c0 + c1 * y), a, b);
        }
        sum
    }

    pub fn at_real(&self, x: f64) -> f64 {
        if let Some(t) = &self.table {
            if let Some(v) = t.eval(x) {
                return v;
            }
        }
        self.at(Complex64::from(x)).re
    }

    /// Bound on |Ǩ_L∗η(z)| from the decay of Ǩ_L and ‖η‖₁.
    pub fn bound(&self, z: Complex64) -> f64 {
        let (lo, hi) = self.eta.support();
        let gap = if z.re < lo {
            lo - z.re
        } else if z.re > hi {
            z.re - hi
        } else {
            0.0
        };
        self.eta.l1_norm() * self.kernel.scaled_transform_bound(self.scale, Complex64::new(gap, z.im))
    }

    /// Distance beyond the support past which |Ǩ_L∗η| ≤ tol on the real line.
    pub fn reach(&self, tol: f64) -> f64 {
        let c = self.eta.l1_norm() * self.kernel.decay_constant() / self.scale.powi(3);
        (c / tol).powf(0.25)
    }

    /// Tabulate on [lo, hi] so later real evaluations there are cheap.
    pub fn tabulate(&mut self, lo: f64, hi: f64) {
        let cycle = 1.0 / (self.kernel.kappa() * self.scale);
        let count = ((hi - lo) / cycle).ceil().max(1.0) as usize;
        let width = (hi - lo) / count as f64;
        let nodes: Vec<f64> =
            (0..=CHEB_DEGREE).map(|j| (PI * (j as f64 + 0.5) / (CHEB_DEGREE + 1) as f64).cos()).collect();
        let coeffs = (0..count)
            .into_par_iter()
            .map(|i| {
                let a = lo + width * i as f64;
                let values: Vec<f64> =
                    nodes.iter().map(|x| self.at(Complex64::from(a + 0.5 * width * (x + 1.0))).re).collect();
                cheb_coefficients(&values)
            })
            .collect();
        self.table = Some(ChebTable { lo, width, coeffs });
    }
}

fn cheb_coefficients(values: &[f64]) -> [f64; CHEB_DEGREE + 1] {
    let n = values.len();
    let mut c = [0.0; CHEB_DEGREE + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let s: f64 =
            values.iter().enumerate().map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos()).sum();
        *ck = 2.0 * s / n as f64;
    }
    c[0] *= 0.5;
    c
}

impl ChebTable {
    fn eval(&self, x: f64) -> Option<f64> {
        let pos = (x - self.lo) / self.width;
        if !(pos >= 0.0) || pos > self.coeffs.len() as f64 {
            return None;
        }
        let i = (pos as usize).min(self.coeffs.len() - 1);
        let t = 2.0 * (pos - i as f64) - 1.0;
        let c = &self.coeffs[i];
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        Some(t * b1 - b2 + c[0])
    }
}
