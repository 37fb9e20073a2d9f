use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FourierPair;
use crate::error::{Error, Result};

/// `constant + slope·u` on `[start, end)`; `u` is the absolute coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub constant: f64,
    pub slope: f64,
}

impl Piece {
    pub fn at(&self, u: f64) -> f64 {
        self.constant + self.slope * u
    }

    fn fourier(&self, x: f64) -> Complex64 {
        let h = 0.5 * (self.end - self.start);
        let m = 0.5 * (self.end + self.start);
        let omega = 2.0 * std::f64::consts::PI * x;
        let y = omega * h;
        let even = (self.constant + self.slope * m) * 2.0 * h * sinc(y);
        let odd = Complex64::new(0.0, -2.0 * self.slope * h * h * odd_kernel(y));
        Complex64::from_polar(1.0, -omega * m) * (Complex64::from(even) + odd)
    }
}

/// sin(y)/y.
pub(crate) fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

/// (sin y − y cos y)/y², the transform of the odd part of a linear piece.
fn odd_kernel(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        y * (1.0 / 3.0 - y2 * (1.0 / 30.0 - y2 * (1.0 / 840.0 - y2 / 45360.0)))
    } else {
        (y.sin() - y * y.cos()) / (y * y)
    }
}

/// Compactly supported, piecewise-linear function of bounded variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pieces: Vec<Piece>,
}

impl TestFunction {
    /// Pieces may be given in any order but must not overlap.
    pub fn from_pieces(mut pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            let finite = [p.start, p.end, p.constant, p.slope].iter().all(|v| v.is_finite());
            if !finite || p.start >= p.end {
                return Err(Error::InvalidLiteral {
                    text: format!("({}, {}, {}, {})", p.start, p.end, p.constant, p.slope),
                    message: "piece needs finite values and start < end".into(),
                });
            }
        }
        pieces.sort_by(|a, b| a.start.total_cmp(&b.start));
        if pieces.windows(2).any(|w| w[1].start < w[0].end) {
            return Err(Error::InvalidLiteral { text: "piecewise".into(), message: "pieces overlap".into() });
        }
        pieces.retain(|p| p.constant != 0.0 || p.slope != 0.0);
        Ok(TestFunction { pieces })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::from_pieces(vec![Piece { start: a, end: b, constant: 1.0, slope: 0.0 }])
    }

    /// Tent on [a, b] with peak 1 at the midpoint.
    pub fn triangle(a: f64, b: f64) -> Result<Self> {
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        if !(h > 0.0) {
            return Err(Error::InvalidLiteral { text: format!("triangle({a},{b})"), message: "need a < b".into() });
        }
        Self::from_pieces(vec![
            Piece { start: a, end: m, constant: -a / h, slope: 1.0 / h },
            Piece { start: m, end: b, constant: b / h, slope: -1.0 / h },
        ])
    }

    pub fn zero() -> Self {
        TestFunction { pieces: Vec::new() }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Smallest closed interval outside which the function vanishes.
    pub fn support(&self) -> (f64, f64) {
        match (self.pieces.first(), self.pieces.last()) {
            (Some(f), Some(l)) => (f.start, l.end),
            _ => (0.0, 0.0),
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        match self.piece_index(u) {
            Some(i) => self.pieces[i].at(u),
            None => 0.0,
        }
    }

    /// lim_{v↑u} η(v).
    pub fn value_left(&self, u: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.start < u);
        if i == 0 {
            return 0.0;
        }
        let p = &self.pieces[i - 1];
        if u <= p.end {
            p.at(u)
        } else {
            0.0
        }
    }

    fn piece_index(&self, u: f64) -> Option<usize> {
        let i = self.pieces.partition_point(|p| p.start <= u);
        (i > 0 && u < self.pieces[i - 1].end).then(|| i - 1)
    }

    /// Sorted, deduplicated piece endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().flat_map(|p| [p.start, p.end]).collect();
        b.dedup();
        b
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| (p.end - p.start) * p.at(0.5 * (p.start + p.end))).sum()
    }

    /// ∫|η|, splitting pieces at sign changes.
    pub fn l1_norm(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let (fa, fb) = (p.at(p.start), p.at(p.end));
                let w = p.end - p.start;
                if fa * fb >= 0.0 {
                    0.5 * w * (fa.abs() + fb.abs())
                } else {
                    0.5 * w * (fa * fa + fb * fb) / (fa.abs() + fb.abs())
                }
            })
            .sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces.iter().map(|p| p.at(p.start).abs().max(p.at(p.end).abs())).fold(0.0, f64::max)
    }

    /// Jump magnitudes (including the jumps to and from zero at the support
    /// edges) plus the variation of the linear parts.
    pub fn total_variation(&self) -> f64 {
        let mut var = 0.0;
        let mut prev_end = f64::NEG_INFINITY;
        let mut prev_value = 0.0_f64;
        for p in &self.pieces {
            let entering = p.at(p.start);
            if p.start > prev_end {
                var += prev_value.abs() + entering.abs();
            } else {
                var += (entering - prev_value).abs();
            }
            var += p.slope.abs() * (p.end - p.start);
            prev_end = p.end;
            prev_value = p.at(p.end);
        }
        var + prev_value.abs()
    }

    /// sup |η| over [a, b), exact: linear pieces attain their extremes at
    /// endpoints (as limits at open ends).
    pub fn sup_abs_on(&self, a: f64, b: f64) -> f64 {
        let first = self.pieces.partition_point(|p| p.end <= a);
        self.pieces[first..]
            .iter()
            .take_while(|p| p.start < b)
            .map(|p| {
                let lo = p.start.max(a);
                let hi = p.end.min(b);
                p.at(lo).abs().max(p.at(hi).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Closed-form η̂(x) = ∫ η(u) e^{−2πiux} du.
    pub fn fourier(&self, x: f64) -> Complex64 {
        self.pieces.iter().map(|p| p.fourier(x)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { constant: p.constant * factor, slope: p.slope * factor, ..*p })
            .collect();
        TestFunction { pieces }
    }

    /// u ↦ η(u − shift).
    pub fn shifted(&self, shift: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                start: p.start + shift,
                end: p.end + shift,
                constant: p.constant - p.slope * shift,
                slope: p.slope,
            })
            .collect();
        TestFunction { pieces }
    }

    /// u ↦ η(u / s) for s > 0.
    pub fn dilated(&self, s: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { start: p.start * s, end: p.end * s, constant: p.constant, slope: p.slope / s })
            .collect();
        TestFunction { pieces }
    }

    /// a·self + b·other, split on the union of breakpoints.
    pub fn combine(&self, a: f64, other: &TestFunction, b: f64) -> Self {
        let mut cuts = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let (c1, s1) =
                self.piece_index(mid).map_or((0.0, 0.0), |i| (self.pieces[i].constant, self.pieces[i].slope));
            let (c2, s2) =
                other.piece_index(mid).map_or((0.0, 0.0), |i| (other.pieces[i].constant, other.pieces[i].slope));
            let constant = a * c1 + b * c2;
            let slope = a * s1 + b * s2;
            if constant != 0.0 || slope != 0.0 {
                pieces.push(Piece { start: w[0], end: w[1], constant, slope });
            }
        }
        TestFunction { pieces }
    }
}

impl FourierPair for TestFunction {
    fn value(&self, u: f64) -> f64 {
        TestFunction::value(self, u)
    }

    fn fourier(&self, x: f64) -> Complex64 {
        TestFunction::fourier(self, x)
    }

    fn value_left(&self, u: f64) -> f64 {
        TestFunction::value_left(self, u)
    }

    fn spatial_extent(&self) -> (f64, f64) {
        self.support()
    }

    fn spatial_breaks(&self) -> Vec<f64> {
        self.breakpoints()
    }

    fn as_compact(&self) -> Option<&TestFunction> {
        Some(self)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "piecewise[")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{},{},{})", p.start, p.end, p.constant, p.slope)?;
        }
        write!(f, "]")
    }
}

/// Accepts `indicator(a,b)`, `triangle(a,b)` and
/// `piecewise[(a,b,c0,c1),...]` where each tuple means c0 + c1·u on [a, b).
impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |message: &str| Error::InvalidLiteral { text: text.to_string(), message: message.to_string() };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let numbers = |inner: &str| -> Result<Vec<f64>> {
            inner.split(',').map(|s| s.parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")))).collect()
        };
        let call = |name: &str| -> Option<&str> { compact.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')') };
        if let Some(args) = call("indicator") {
            match numbers(args)?[..] {
                [a, b] if a < b => Self::indicator(a, b),
                _ => Err(bad("indicator takes two increasing endpoints")),
            }
        } else if let Some(args) = call("triangle") {
            match numbers(args)?[..] {
                [a, b] => Self::triangle(a, b),
                _ => Err(bad("triangle takes two endpoints")),
            }
        } else if let Some(body) = compact.strip_prefix("piecewise[").and_then(|s| s.strip_suffix(']')) {
            let mut pieces = Vec::new();
            let mut rest = body;
            while !rest.is_empty() {
                let open = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
                let close = open.find(')').ok_or_else(|| bad("unclosed tuple"))?;
                match numbers(&open[..close])?[..] {
                    [start, end, constant, slope] => pieces.push(Piece { start, end, constant, slope }),
                    _ => return Err(bad("tuples need four numbers (a,b,c0,c1)")),
                }
                rest = &open[close + 1..];
                rest = rest.strip_prefix(',').unwrap_or(rest);
            }
            Self::from_pieces(pieces)
        } else {
            Err(bad("expected indicator(..), triangle(..) or piecewise[..]"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive_pieces, Tolerance};

    #[test]
    fn indicator_transform() {
        let eta = TestFunction::indicator(0.0, 1.0).unwrap();
        assert!((eta.fourier(0.0) - Complex64::from(1.0)).norm() < 1e-15);
        assert!((eta.fourier(0.5).norm() - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn triangle_transform_is_fejer() {
        let eta = TestFunction::triangle(-1.0, 1.0).unwrap();
        for x in [0.0, 1e-7, 0.03, 0.3, 1.7, 12.25] {
            let s = sinc(std::f64::consts::PI * x);
            let got = eta.fourier(x);
            assert!((got.re - s * s).abs() < 1e-14 && got.im.abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn transform_matches_quadrature() {
        let eta: TestFunction = "piecewise[(-1.5,0.25,0.5,2),(0.25,2,-1,0.3)]".parse().unwrap();
        let tol = Tolerance { abs: 1e-14, rel: 1e-13, order: 16 };
        for x in [0.0, 0.01, 0.4, 3.3] {
            let w = 2.0 * std::f64::consts::PI * x;
            let re = adaptive_pieces(|u| eta.value(u) * (w * u).cos(), &eta.breakpoints(), tol).unwrap();
            let im = adaptive_pieces(|u| -eta.value(u) * (w * u).sin(), &eta.breakpoints(), tol).unwrap();
            let got = eta.fourier(x);
            assert!((got.re - re).abs() < 1e-12 && (got.im - im).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn variation_and_norms() {
        let ind = TestFunction::indicator(0.0, 1.0).unwrap();
        assert_eq!(ind.total_variation(), 2.0);
        let tri = TestFunction::triangle(-1.0, 1.0).unwrap();
        assert!((tri.total_variation() - 2.0).abs() < 1e-15);
        assert!((tri.integral() - 1.0).abs() < 1e-15);
        let signed: TestFunction = "piecewise[(0,2,-1,1)]".parse().unwrap();
        assert!((signed.l1_norm() - 1.0).abs() < 1e-15);
        assert!(signed.integral().abs() < 1e-15);
    }

    #[test]
    fn sup_on_half_open_cells() {
        let tri = TestFunction::triangle(-1.0, 1.0).unwrap();
        assert_eq!(tri.sup_abs_on(0.0, 1.0), 1.0);
        assert_eq!(tri.sup_abs_on(-1.0, 0.0), 1.0);
        assert_eq!(tri.sup_abs_on(1.0, 2.0), 0.0);
        assert!((tri.sup_abs_on(0.5, 0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn literals() {
        assert_eq!("indicator(0,1)".parse::<TestFunction>().unwrap(), TestFunction::indicator(0.0, 1.0).unwrap());
        assert!("triangle(0, 1)".parse::<TestFunction>().is_ok());
        assert!("indicator(1,0)".parse::<TestFunction>().is_err());
        assert!("piecewise[(0,1,1,0),(0.5,2,1,0)]".parse::<TestFunction>().is_err());
        assert!("gauss(0,1)".parse::<TestFunction>().is_err());
        let round: TestFunction = TestFunction::triangle(0.0, 1.0).unwrap().to_string().parse().unwrap();
        assert_eq!(round, TestFunction::triangle(0.0, 1.0).unwrap());
    }

    #[test]
    fn combine_is_pointwise() {
        let a = TestFunction::indicator(0.0, 1.0).unwrap();
        let b = TestFunction::triangle(0.5, 2.5).unwrap();
        let c = a.combine(2.0, &b, -0.5);
        for u in [-0.1, 0.2, 0.7, 1.2, 2.4, 3.0] {
            assert!((c.value(u) - (2.0 * a.value(u) - 0.5 * b.value(u))).abs() < 1e-15);
        }
    }
}
