use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use std::fmt;
use std::str::FromStr;

use crate::error::{require, Error, Result};
use crate::specialfn::sine_cosine_integral;

/// Q(x) = 1/(π(1+x²)).
pub fn q_kernel(x: f64) -> f64 {
    1.0 / (PI * (1.0 + x * x))
}

fn fejer(v: f64) -> f64 {
    let s = super::function::sinc(PI * v);
    s * s
}

/// ∫₀^v (sin πs/πs)² ds = Si(2πv)/π − sin²(πv)/(π²v).
fn fejer_antiderivative(v: f64) -> f64 {
    if v.abs() < 1e-6 {
        return v;
    }
    let s = (PI * v).sin();
    sine_cosine_integral(2.0 * PI * v).0 / PI - s * s / (PI * PI * v)
}

/// Nonnegative weights σ used to average over heights t via σ(t/T)/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothingWeight {
    /// a·(sin πa(x−c) / πa(x−c))²: mass 1, transform supported on [−a, a].
    Fejer { bandwidth: f64, center: f64 },
    /// 1_[lo,hi] convolved with the Fejér kernel of bandwidth a; tends to the
    /// indicator as a grows and keeps transform support [−a, a].
    FejerComb { bandwidth: f64, lo: f64, hi: f64 },
    /// 1_[lo,hi]; not band-limited, used for uniform sampling.
    Uniform { lo: f64, hi: f64 },
    /// Q itself.
    Cauchy,
}

impl Default for SmoothingWeight {
    fn default() -> Self {
        SmoothingWeight::Fejer { bandwidth: 1.0, center: 0.0 }
    }
}

/// A nonnegative weight on the real line, sampled or integrated against.
pub trait WeightFunction: Sync {
    fn value(&self, x: f64) -> f64;
    /// Center and spread of the bulk of the mass.
    fn bulk(&self) -> (f64, f64);
}

impl WeightFunction for SmoothingWeight {
    fn value(&self, x: f64) -> f64 {
        SmoothingWeight::value(self, x)
    }

    fn bulk(&self) -> (f64, f64) {
        self.center_and_width()
    }
}

impl SmoothingWeight {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SmoothingWeight::Fejer { bandwidth, center } => {
                require(bandwidth > 0.0, "bandwidth", bandwidth, "> 0")?;
                require(center.is_finite(), "center", center, "finite")
            }
            SmoothingWeight::FejerComb { bandwidth, lo, hi } => {
                require(bandwidth > 0.0, "bandwidth", bandwidth, "> 0")?;
                require(hi > lo, "hi", hi, "hi > lo")
            }
            SmoothingWeight::Uniform { lo, hi } => require(hi > lo, "hi", hi, "hi > lo"),
            SmoothingWeight::Cauchy => Ok(()),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            SmoothingWeight::Fejer { bandwidth, center } => bandwidth * fejer(bandwidth * (x - center)),
            SmoothingWeight::FejerComb { bandwidth, lo, hi } => {
                (fejer_antiderivative(bandwidth * (x - lo)) - fejer_antiderivative(bandwidth * (x - hi))).max(0.0)
            }
            SmoothingWeight::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            SmoothingWeight::Cauchy => q_kernel(x),
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            SmoothingWeight::Fejer { .. } | SmoothingWeight::Cauchy => 1.0,
            SmoothingWeight::FejerComb { lo, hi, .. } | SmoothingWeight::Uniform { lo, hi } => hi - lo,
        }
    }

    /// Half-width s of the transform support [−s, s], when compact.
    pub fn transform_support(&self) -> Option<f64> {
        match *self {
            SmoothingWeight::Fejer { bandwidth, .. } | SmoothingWeight::FejerComb { bandwidth, .. } => Some(bandwidth),
            _ => None,
        }
    }

    /// Rough location and spread, for choosing grids.
    pub fn center_and_width(&self) -> (f64, f64) {
        match *self {
            SmoothingWeight::Fejer { bandwidth, center } => (center, 1.0 / bandwidth),
            SmoothingWeight::FejerComb { bandwidth, lo, hi } => (0.5 * (lo + hi), 0.5 * (hi - lo) + 1.0 / bandwidth),
            SmoothingWeight::Uniform { lo, hi } => (0.5 * (lo + hi), 0.5 * (hi - lo)),
            SmoothingWeight::Cauchy => (0.0, 1.0),
        }
    }

    /// Upper bound on σ(x) valid for |x − center| ≥ width, used past the grid.
    fn far_bound(&self, x: f64) -> f64 {
        match *self {
            SmoothingWeight::Fejer { bandwidth, center } => 1.0 / (PI * PI * bandwidth * (x - center).powi(2)),
            SmoothingWeight::FejerComb { bandwidth, lo, hi } => {
                let d = (x - lo).abs().min((x - hi).abs());
                (hi - lo) / (PI * PI * bandwidth * d * d)
            }
            SmoothingWeight::Uniform { .. } => 0.0,
            SmoothingWeight::Cauchy => q_kernel(x),
        }
    }

    /// ‖σ‖_Q = π·sup (1+x²)|σ(x)|: fine grid over the bulk, golden-section
    /// refinement around the best grid points, and a decay bound beyond.
    pub fn q_norm(&self) -> f64 {
        let weighted = |x: f64| (1.0 + x * x) * self.value(x);
        if let SmoothingWeight::Uniform { lo, hi } = *self {
            let far = lo.abs().max(hi.abs());
            return PI * (1.0 + far * far);
        }
        if let SmoothingWeight::Cauchy = self {
            return 1.0;
        }
        let (c, w) = self.center_and_width();
        let reach = 60.0 * (w + c.abs() + 1.0);
        let step = w.min(1.0) / 16.0;
        let n = (2.0 * reach / step).ceil() as usize;
        let grid: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let x = c - reach + step * i as f64;
                (x, weighted(x))
            })
            .collect();
        let mut best = grid.iter().map(|g| g.1).fold(0.0, f64::max);
        let mut candidates: Vec<usize> =
            (1..n).filter(|&i| grid[i].1 >= grid[i - 1].1 && grid[i].1 >= grid[i + 1].1).collect();
        candidates.sort_by(|&a, &b| grid[b].1.total_cmp(&grid[a].1));
        for &i in candidates.iter().take(8) {
            best = best.max(golden_max(&weighted, grid[i - 1].0, grid[i + 1].0));
        }
        // (1+x²)·σ past the grid is dominated by (1+x²)·far_bound, whose sup
        // over |x| ≥ reach is attained at an edge or in the limit.
        let edge = |x: f64| (1.0 + x * x) * self.far_bound(x);
        let limit = match *self {
            SmoothingWeight::Fejer { bandwidth, .. } => 1.0 / (PI * PI * bandwidth),
            SmoothingWeight::FejerComb { bandwidth, lo, hi } => (hi - lo) / (PI * PI * bandwidth),
            _ => 0.0,
        };
        let tail = edge(c - reach).max(edge(c + reach)).max(limit);
        PI * best.max(tail)
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

impl fmt::Display for SmoothingWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothingWeight::Fejer { bandwidth, center } => write!(f, "fejer({bandwidth},{center})"),
            SmoothingWeight::FejerComb { bandwidth, lo, hi } => write!(f, "fejer_comb({bandwidth},{lo},{hi})"),
            SmoothingWeight::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
            SmoothingWeight::Cauchy => write!(f, "cauchy"),
        }
    }
}

/// `fejer(a,c)`, `fejer_comb(a,lo,hi)`, `uniform(lo,hi)` or `cauchy`.
impl FromStr for SmoothingWeight {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |message: &str| Error::InvalidLiteral { text: text.to_string(), message: message.to_string() };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "cauchy" {
            return Ok(SmoothingWeight::Cauchy);
        }
        let (name, args) =
            compact.strip_suffix(')').and_then(|s| s.split_once('(')).ok_or_else(|| bad("expected name(args)"))?;
        let nums = args
            .split(',')
            .map(|a| a.parse::<f64>().map_err(|_| bad("expected numeric arguments")))
            .collect::<Result<Vec<f64>>>()?;
        let w = match (name, nums.as_slice()) {
            ("fejer", [a, c]) => SmoothingWeight::Fejer { bandwidth: *a, center: *c },
            ("fejer_comb", [a, lo, hi]) => SmoothingWeight::FejerComb { bandwidth: *a, lo: *lo, hi: *hi },
            ("uniform", [lo, hi]) => SmoothingWeight::Uniform { lo: *lo, hi: *hi },
            _ => return Err(bad("unknown weight or wrong number of arguments")),
        };
        w.validate()?;
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive, Tolerance};

    #[test]
    fn q_kernel_basics() {
        assert!((q_kernel(0.0) - 1.0 / PI).abs() < 1e-16);
        let tol = Tolerance::default();
        let mass = adaptive(
            |s: f64| {
                let x = s.tan();
                q_kernel(x) * (1.0 + x * x)
            },
            -PI / 2.0 + 1e-12,
            PI / 2.0 - 1e-12,
            tol,
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
        assert_eq!(SmoothingWeight::Cauchy.q_norm(), 1.0);
    }

    #[test]
    fn fejer_weights() {
        let w = SmoothingWeight::default();
        assert!((w.value(0.0) - 1.0).abs() < 1e-15);
        assert_eq!(w.transform_support(), Some(1.0));
        assert!((w.q_norm() - PI).abs() < 1e-9);
        let comb = SmoothingWeight::FejerComb { bandwidth: 40.0, lo: 1.0, hi: 2.0 };
        assert!((comb.value(1.5) - 1.0).abs() < 0.01);
        assert!(comb.value(3.0) < 0.01);
    }

    #[test]
    fn pointwise_below_q_envelope() {
        for w in [
            SmoothingWeight::default(),
            SmoothingWeight::Fejer { bandwidth: 8.0, center: 1.5 },
            SmoothingWeight::FejerComb { bandwidth: 10.0, lo: 1.0, hi: 2.0 },
            SmoothingWeight::Uniform { lo: 1.0, hi: 2.0 },
            SmoothingWeight::Cauchy,
        ] {
            let norm = w.q_norm();
            for i in 0..4000 {
                let x = -50.0 + 0.025 * i as f64;
                assert!(w.value(x) <= norm * q_kernel(x) * (1.0 + 1e-12), "{w:?} at {x}");
            }
        }
    }

    #[test]
    fn weight_literals_round_trip() {
        for text in ["fejer(1,0)", "fejer_comb(8,1,2)", "uniform(0.5,1)", "cauchy"] {
            let w: SmoothingWeight = text.parse().unwrap();
            assert_eq!(w.to_string(), text);
        }
        assert!("uniform(2,1)".parse::<SmoothingWeight>().is_err());
        assert!("gauss(1)".parse::<SmoothingWeight>().is_err());
    }
}
