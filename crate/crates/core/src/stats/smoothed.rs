use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::window_scale;
use crate::error::{require, Error, Result};
use crate::quad::{adaptive_pieces, rule, Tolerance};
use crate::specialfn::omega;
use crate::testfn::{BumpKernel, SmoothedFunction, TestFunction};
use crate::zeros::ZeroTable;

/// Terms below this fraction of max(1, n‖η‖₁) are dropped.
const TERM_TOL: f64 = 1e-12;
/// Largest acceptable bound on everything dropped, same units.
const TAIL_LIMIT: f64 = 1e-6;
const PANEL_ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothedSum {
    pub value: f64,
    /// Bound on the omitted terms beyond the reach.
    pub tail_bound: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTerms {
    /// Signed ordinates: mirror zeros appear as −γ.
    pub ordinates: Vec<f64>,
    pub values: Vec<f64>,
    pub abs_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchimedeanTerm {
    /// Δ̄′(t) = ∫ F((ξ − t)/s) Ω(ξ)/2π dξ with F = Ǩ_n∗η.
    pub value: f64,
    /// (Δ̄′ − n∫η)·log T.
    pub deviation: f64,
    /// The same integral with η in place of F.
    pub unsmoothed: f64,
}

/// F = Ǩ_n∗η tabulated once for a fixed (η, kernel, n, T), then summed over
/// zeros at many heights.
#[derive(Debug, Clone)]
pub struct SmoothedStatistic {
    smoothed: SmoothedFunction,
    n: f64,
    height: f64,
    scale: f64,
    reach: f64,
    support: (f64, f64),
    decay: f64,
    magnitude: f64,
    /// Quadrature nodes y and weights s·F(y)·w/2π for Δ̄′.
    archimedean_nodes: Vec<(f64, f64)>,
}

impl SmoothedStatistic {
    pub fn new(eta: &TestFunction, kernel: BumpKernel, n: f64, height: f64) -> Result<Self> {
        require(n > 0.0, "n", n, "n > 0")?;
        require(height > 1.0, "T", height, "T > 1")?;
        require(eta.l1_norm() > 0.0, "eta", 0.0, "η must not vanish identically")?;
        let mut smoothed = SmoothedFunction::new(kernel, n, eta)?;
        let magnitude = (n * eta.l1_norm()).max(1.0);
        let reach = smoothed.reach(TERM_TOL * magnitude);
        let support = eta.support();
        smoothed.tabulate(support.0 - reach - 1.0, support.1 + reach + 1.0);
        let scale = window_scale(n, height);
        let decay = eta.l1_norm() * kernel.decay_constant() / n.powi(3);

        let cycle = 1.0 / (kernel.kappa() * n);
        let (lo, hi) = (support.0 - reach, support.1 + reach);
        let panels = ((hi - lo) / cycle).ceil() as usize;
        let width = (hi - lo) / panels as f64;
        let r = rule(PANEL_ORDER);
        let mut archimedean_nodes = Vec::with_capacity(panels * PANEL_ORDER);
        for i in 0..panels {
            let a = lo + width * i as f64;
            for (y, w) in r.mapped(a, a + width) {
                archimedean_nodes.push((y, scale * smoothed.at_real(y) * w / (2.0 * PI)));
            }
        }
        Ok(SmoothedStatistic { smoothed, n, height, scale, reach, support, decay, magnitude, archimedean_nodes })
    }

    pub fn smoothed(&self) -> &SmoothedFunction {
        &self.smoothed
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Distance beyond supp η (in rescaled units) where terms are dropped.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Heights a table must cover to evaluate at t.
    pub fn height_window(&self, t: f64) -> (f64, f64) {
        (t + (self.support.0 - self.reach) * self.scale, t + (self.support.1 + self.reach) * self.scale)
    }

    /// e^{2πκn·max|Im|}: the growth of Ǩ_n off the real axis for the
    /// largest displacement in the table.
    fn off_axis_growth(&self, table: &ZeroTable) -> f64 {
        let offset = match table.reference_height() {
            Some(h) if table.has_off_axis() => table.largest_off_axis() / h.ln(),
            _ => 0.0,
        };
        let kappa = self.smoothed.kernel().kappa();
        (2.0 * PI * kappa * self.n * offset / self.scale).exp()
    }

    /// Calls `visit(x, β − 1/2, multiplicity, signed ordinate)` for every zero
    /// (and mirror) within `reach` of the support.
    fn for_each_zero(
        &self,
        table: &ZeroTable,
        t: f64,
        reach: f64,
        mut visit: impl FnMut(f64, f64, f64, f64),
    ) -> Result<usize> {
        let s = self.scale;
        let lo = t + (self.support.0 - reach) * s;
        let hi = t + (self.support.1 + reach) * s;
        table.check_coverage(lo, hi)?;
        let ords = table.ordinates();
        let mut count = 0;
        if hi > 0.0 {
            for i in table.index_range(lo.max(0.0), hi) {
                visit((ords[i] - t) / s, table.real_part_offset(i), table.multiplicity(i) as f64, ords[i]);
                count += 1;
            }
        }
        if lo < 0.0 {
            let first = ords.partition_point(|&g| g <= (-hi).max(0.0));
            let last = ords.partition_point(|&g| g <= -lo).max(first);
            for i in first..last {
                visit((-ords[i] - t) / s, table.real_part_offset(i), table.multiplicity(i) as f64, -ords[i]);
                count += 1;
            }
        }
        Ok(count)
    }

    fn tail_bound(&self, t: f64, reach: f64, growth: f64) -> f64 {
        // Zeros per rescaled unit near height h: s·log(h/2π)/2π, plus one
        // for the fluctuation of the count.
        let top = t.abs() + (self.support.0.abs().max(self.support.1.abs()) + reach) * self.scale;
        let density = self.scale * (top.max(2.0 * PI * std::f64::consts::E) / (2.0 * PI)).ln() / (2.0 * PI) + 1.0;
        let edge = (reach - 1.0 / density).max(1.0);
        growth * 2.0 * density * self.decay / (3.0 * edge.powi(3))
    }

    /// Δ′(t) = Σ F((γ − t)/s), or Δ″(t) with each off-axis zero at
    /// x − i(β − 1/2)/s contributing Re F.
    pub fn evaluate(&self, table: &ZeroTable, t: f64, use_off_axis: bool) -> Result<SmoothedSum> {
        let growth = if use_off_axis { self.off_axis_growth(table) } else { 1.0 };
        let reach = self.reach * growth.powf(0.25);
        let s = self.scale;
        let mut value = 0.0;
        let terms = self.for_each_zero(table, t, reach, |x, offset, m, _| {
            let f = if use_off_axis && offset > 0.0 {
                self.smoothed.at(Complex64::new(x, -offset / s)).re
            } else {
                self.smoothed.at_real(x)
            };
            value += m * f;
        })?;
        let tail_bound = self.tail_bound(t, reach, growth);
        if tail_bound > TAIL_LIMIT * self.magnitude {
            return Err(Error::TailNonconvergence { reach });
        }
        Ok(SmoothedSum { value, tail_bound, terms })
    }

    /// G_γ = F(z) + F(z̄) − 2F(x) = 2(Re F(z) − F(x)) for every zero in reach.
    pub fn gamma_terms(&self, table: &ZeroTable, t: f64) -> Result<GammaTerms> {
        let growth = self.off_axis_growth(table);
        let reach = self.reach * growth.powf(0.25);
        let s = self.scale;
        let mut ordinates = Vec::new();
        let mut values = Vec::new();
        self.for_each_zero(table, t, reach, |x, offset, m, g| {
            let v = if offset > 0.0 {
                2.0 * m * (self.smoothed.at(Complex64::new(x, -offset / s)).re - self.smoothed.at_real(x))
            } else {
                0.0
            };
            ordinates.push(g);
            values.push(v);
        })?;
        let abs_sum = values.iter().map(|v| v.abs()).sum();
        Ok(GammaTerms { ordinates, values, abs_sum })
    }

    pub fn archimedean(&self, t: f64) -> Result<ArchimedeanTerm> {
        let s = self.scale;
        let value: f64 = self.archimedean_nodes.iter().map(|&(y, w)| w * omega(t + s * y)).sum();
        let eta = self.smoothed.eta();
        let breaks = eta.breakpoints();
        let tol = Tolerance { abs: 1e-13, rel: 1e-12, order: 16 };
        let unsmoothed = s / (2.0 * PI) * adaptive_pieces(|y: f64| eta.value(y) * omega(t + s * y), &breaks, tol)?;
        let deviation = (value - self.n * eta.integral()) * self.height.ln();
        Ok(ArchimedeanTerm { value, deviation, unsmoothed })
    }
}

/// Δ′ (use_off_axis = false) or Δ″ (true) at height t.
pub fn linear_statistic_smoothed(
    table: &ZeroTable,
    eta: &TestFunction,
    kernel: BumpKernel,
    n: f64,
    height: f64,
    t: f64,
    use_off_axis: bool,
) -> Result<f64> {
    Ok(SmoothedStatistic::new(eta, kernel, n, height)?.evaluate(table, t, use_off_axis)?.value)
}

pub fn g_gamma_terms(
    table: &ZeroTable,
    eta: &TestFunction,
    kernel: BumpKernel,
    n: f64,
    height: f64,
    t: f64,
) -> Result<GammaTerms> {
    SmoothedStatistic::new(eta, kernel, n, height)?.gamma_terms(table, t)
}

pub fn archimedean_term(
    eta: &TestFunction,
    kernel: BumpKernel,
    n: f64,
    height: f64,
    t: f64,
) -> Result<ArchimedeanTerm> {
    require(height >= 100.0, "T", height, "T ≥ 100")?;
    SmoothedStatistic::new(eta, kernel, n, height)?.archimedean(t)
}
