use super::{Piece, TestFunction};
use crate::error::{require, Result};

/// Functions whose supremum of |f| on a half-open cell can be computed.
pub trait CellSup {
    fn sup_abs_on(&self, a: f64, b: f64) -> f64;
    /// Interval outside which f is treated as zero.
    fn extent(&self) -> (f64, f64);
    /// Bound on what the tail sum loses by ignoring f outside `extent`.
    fn truncation_bound(&self, _floor: f64) -> f64 {
        0.0
    }
}

impl CellSup for TestFunction {
    fn sup_abs_on(&self, a: f64, b: f64) -> f64 {
        TestFunction::sup_abs_on(self, a, b)
    }

    fn extent(&self) -> (f64, f64) {
        self.support()
    }
}

/// Q_H(u) = Q(u/H) = 1/(π(1 + u²/H²)), cut off at |u| ≤ `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyDilate {
    pub height: f64,
    pub cutoff: f64,
}

impl CauchyDilate {
    pub const DEFAULT_CUTOFF: f64 = 1e6;

    pub fn new(height: f64) -> Result<Self> {
        require(height > 0.0, "H", height, "H > 0")?;
        Ok(CauchyDilate { height, cutoff: Self::DEFAULT_CUTOFF })
    }

    pub fn value(&self, u: f64) -> f64 {
        let r = u / self.height;
        1.0 / (std::f64::consts::PI * (1.0 + r * r))
    }
}

impl CellSup for CauchyDilate {
    fn sup_abs_on(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(-self.cutoff), b.min(self.cutoff));
        if a >= b {
            0.0
        } else if a <= 0.0 && b > 0.0 {
            self.value(0.0)
        } else {
            self.value(a.abs().min(b.abs()))
        }
    }

    fn extent(&self) -> (f64, f64) {
        (-self.cutoff, self.cutoff)
    }

    /// Σ_{|ℓ|>U} log(|ℓ|+2)·Q_H(ℓ) ≤ 2H²(log(U+2) + 1)/(π(U−1)) for U = max(cutoff, floor).
    fn truncation_bound(&self, floor: f64) -> f64 {
        let u = self.cutoff.max(floor);
        2.0 * self.height * self.height * ((u + 2.0).ln() + 1.0) / (std::f64::consts::PI * (u - 1.0))
    }
}

/// M_kη: on each unit cell [ℓ, ℓ+1) the value sup_{[kℓ, k(ℓ+1))} |η|.
pub fn envelope_m(k: f64, eta: &TestFunction) -> Result<TestFunction> {
    require(k > 0.0, "k", k, "k > 0")?;
    let (lo, hi) = eta.support();
    if lo == hi {
        return Ok(TestFunction::zero());
    }
    let first = (lo / k).floor() as i64;
    let last = (hi / k).ceil() as i64 - 1;
    let pieces = (first..=last)
        .map(|l| Piece {
            start: l as f64,
            end: l as f64 + 1.0,
            constant: eta.sup_abs_on(k * l as f64, k * (l + 1) as f64),
            slope: 0.0,
        })
        .collect();
    TestFunction::from_pieces(pieces)
}

/// ε_T with its truncation bound for functions cut off at a finite extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    pub truncation: f64,
}

/// Σ_{|ℓ|>√T} log(|ℓ|+2)·sup_{[ℓ,ℓ+1)}|f|.
pub fn tail_sum(t: f64, f: &dyn CellSup) -> Result<TailSum> {
    require(t >= 2.0, "T", t, "T >= 2")?;
    let root = t.sqrt();
    let (lo, hi) = f.extent();
    // Smallest integer strictly above √T.
    let start = root.floor() as i64 + 1;
    let mut value = 0.0;
    for l in start..=(hi.ceil() as i64) {
        value += ((l as f64) + 2.0).ln() * f.sup_abs_on(l as f64, l as f64 + 1.0);
    }
    for l in ((lo.floor() as i64)..=-start).rev() {
        value += ((-l as f64) + 2.0).ln() * f.sup_abs_on(l as f64, l as f64 + 1.0);
    }
    Ok(TailSum { value, truncation: f.truncation_bound(root) })
}

pub fn tail_eps(t: f64, eta: &TestFunction) -> Result<f64> {
    Ok(tail_sum(t, eta)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_examples() {
        let ind = TestFunction::indicator(0.0, 1.0).unwrap();
        let m = envelope_m(1.0, &ind).unwrap();
        assert_eq!(m.l1_norm(), 1.0);
        let tri = TestFunction::triangle(-1.0, 1.0).unwrap();
        for k in [1.0, 2.0] {
            let m = envelope_m(k, &tri).unwrap();
            assert_eq!(m.support(), (-1.0, 1.0));
            assert_eq!(m.l1_norm(), 2.0);
        }
    }

    #[test]
    fn tail_vanishes_inside() {
        let tri = TestFunction::triangle(-5.0, 5.0).unwrap();
        assert_eq!(tail_eps(100.0, &tri).unwrap(), 0.0);
        assert!(tail_eps(9.0, &tri).unwrap() > 0.0);
    }

    #[test]
    fn cauchy_tail_decreases() {
        let q = CauchyDilate::new(10.0).unwrap();
        let mut prev = f64::INFINITY;
        for t in [1e4, 2e4, 4e4, 8e4] {
            let s = tail_sum(t, &q).unwrap();
            assert!(s.value > 0.0 && s.value < prev);
            assert!(s.truncation < 1e-2 * s.value);
            prev = s.value;
        }
    }
}
