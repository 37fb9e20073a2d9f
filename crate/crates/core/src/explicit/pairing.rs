use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::quad::{adaptive_pieces, rule, Tolerance};

const PANEL_ORDER: usize = 20;
/// Largest phase change of e^{−2πixξ} across one panel.
const PANEL_PHASE: f64 = 12.0;

/// C² building blocks with compact support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atom {
    /// (1 − u²)³ with u = (x − center)/radius.
    Bump { center: f64, radius: f64 },
    /// 1 on [lo + ramp, hi − ramp], quintic smoothstep ramps down to 0 at lo
    /// and hi.
    Mollified { lo: f64, hi: f64, ramp: f64 },
}

fn smoothstep(s: f64) -> f64 {
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

fn smoothstep_second(s: f64) -> f64 {
    60.0 * s * (1.0 - 3.0 * s + 2.0 * s * s)
}

impl Atom {
    fn validate(&self) -> Result<()> {
        match *self {
            Atom::Bump { center, radius } => {
                require(center.is_finite(), "center", center, "finite")?;
                require(radius > 0.0, "radius", radius, "radius > 0")
            }
            Atom::Mollified { lo, hi, ramp } => {
                require(ramp > 0.0, "ramp", ramp, "ramp > 0")?;
                require(hi - lo >= 2.0 * ramp, "hi", hi, "need hi − lo ≥ 2·ramp")
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            Atom::Bump { center, radius } => (center - radius, center + radius),
            Atom::Mollified { lo, hi, .. } => (lo, hi),
        }
    }

    /// Points where the polynomial form changes.
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Atom::Bump { center, radius } => vec![center - radius, center + radius],
            Atom::Mollified { lo, hi, ramp } => vec![lo, lo + ramp, hi - ramp, hi],
        }
    }

    fn value(&self, x: f64) -> f64 {
        match *self {
            Atom::Bump { center, radius } => {
                let u = (x - center) / radius;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - u * u).powi(3)
                }
            }
            Atom::Mollified { lo, hi, ramp } => {
                if x <= lo || x >= hi {
                    0.0
                } else if x < lo + ramp {
                    smoothstep((x - lo) / ramp)
                } else if x > hi - ramp {
                    smoothstep((hi - x) / ramp)
                } else {
                    1.0
                }
            }
        }
    }

    fn second_derivative(&self, x: f64) -> f64 {
        match *self {
            Atom::Bump { center, radius } => {
                let u = (x - center) / radius;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    6.0 * (1.0 - u * u) * (5.0 * u * u - 1.0) / (radius * radius)
                }
            }
            Atom::Mollified { lo, hi, ramp } => {
                if x <= lo || x >= hi {
                    0.0
                } else if x < lo + ramp {
                    smoothstep_second((x - lo) / ramp) / (ramp * ramp)
                } else if x > hi - ramp {
                    smoothstep_second((hi - x) / ramp) / (ramp * ramp)
                } else {
                    0.0
                }
            }
        }
    }

    fn reflected(&self) -> Atom {
        match *self {
            Atom::Bump { center, radius } => Atom::Bump { center: -center, radius },
            Atom::Mollified { lo, hi, ramp } => Atom::Mollified { lo: -hi, hi: -lo, ramp },
        }
    }
}

/// g = Σ c_j·atom_j: C², compactly supported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingFunction {
    terms: Vec<(f64, Atom)>,
}

impl PairingFunction {
    pub fn zero() -> Self {
        PairingFunction { terms: Vec::new() }
    }

    pub fn bump(center: f64, radius: f64) -> Result<Self> {
        Self::from_atom(Atom::Bump { center, radius })
    }

    pub fn mollified(lo: f64, hi: f64, ramp: f64) -> Result<Self> {
        Self::from_atom(Atom::Mollified { lo, hi, ramp })
    }

    fn from_atom(atom: Atom) -> Result<Self> {
        atom.validate()?;
        Ok(PairingFunction { terms: vec![(1.0, atom)] })
    }

    pub fn terms(&self) -> &[(f64, Atom)] {
        &self.terms
    }

    pub fn scaled(&self, c: f64) -> Self {
        PairingFunction { terms: self.terms.iter().map(|&(a, t)| (a * c, t)).collect() }
    }

    pub fn plus(&self, other: &PairingFunction) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        PairingFunction { terms }
    }

    /// x ↦ g(−x).
    pub fn reflected(&self) -> Self {
        PairingFunction { terms: self.terms.iter().map(|&(a, t)| (a, t.reflected())).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.0 == 0.0)
    }

    /// Hull of the supports; (0, 0) for g ≡ 0.
    pub fn support(&self) -> (f64, f64) {
        let live = self.terms.iter().filter(|t| t.0 != 0.0);
        let lo = live.clone().map(|t| t.1.support().0).fold(f64::INFINITY, f64::min);
        let hi = live.map(|t| t.1.support().1).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            (lo, hi)
        } else {
            (0.0, 0.0)
        }
    }

    /// max |x| over the support.
    pub fn reach(&self) -> f64 {
        let (lo, hi) = self.support();
        lo.abs().max(hi.abs())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.terms.iter().filter(|t| t.0 != 0.0).flat_map(|t| t.1.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn value(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(a, t)| a * t.value(x)).sum()
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(a, t)| a * t.second_derivative(x)).sum()
    }

    /// ‖g″‖₁, so that |ĝ(ξ)| ≤ ‖g″‖₁/(2πξ)².
    pub fn second_derivative_l1(&self) -> f64 {
        let tol = Tolerance { abs: 1e-13, rel: 1e-12, order: 16 };
        // The kinks of |g″| are left to the adaptive splitting.
        adaptive_pieces(|x: f64| self.second_derivative(x).abs(), &self.breakpoints(), tol).unwrap_or(f64::NAN)
    }

    /// ĝ(ξ) = ∫ g(x) e^{−2πixξ} dx for complex ξ, by Gauss–Legendre panels
    /// short enough that the phase turns by at most PANEL_PHASE on each.
    pub fn transform(&self, xi: Complex64) -> Complex64 {
        let r = rule(PANEL_ORDER);
        let omega = 2.0 * std::f64::consts::PI * xi;
        let mut total = Complex64::new(0.0, 0.0);
        for w in self.breakpoints().windows(2) {
            let len = w[1] - w[0];
            let panels = (len * omega.norm() / PANEL_PHASE).ceil().max(1.0) as usize;
            let step = len / panels as f64;
            for i in 0..panels {
                let a = w[0] + step * i as f64;
                total += r.integrate(|x| self.value(x) * (-Complex64::i() * omega * x).exp(), a, a + step);
            }
        }
        total
    }

    /// ĝ(r/2π) + ĝ(−r/2π) = 2∫ g(x) cos(rx) dx.
    pub fn even_transform(&self, r: f64) -> f64 {
        let gl = rule(PANEL_ORDER);
        let mut total = 0.0;
        for w in self.breakpoints().windows(2) {
            let len = w[1] - w[0];
            let panels = (len * r.abs() / PANEL_PHASE).ceil().max(1.0) as usize;
            let step = len / panels as f64;
            for i in 0..panels {
                let a = w[0] + step * i as f64;
                total += gl.integrate(|x| self.value(x) * (r * x).cos(), a, a + step);
            }
        }
        2.0 * total
    }
}

impl fmt::Display for PairingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "zero");
        }
        for (i, (c, atom)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if *c != 1.0 {
                write!(f, "{c}*")?;
            }
            match atom {
                Atom::Bump { center, radius } => write!(f, "bump({center},{radius})")?,
                Atom::Mollified { lo, hi, ramp } => write!(f, "mollified({lo},{hi},{ramp})")?,
            }
        }
        Ok(())
    }
}

/// `bump(c,r)`, `mollified(lo,hi,ramp)`, `zero`, optionally scaled as `k*…`
/// and joined by `+`.
impl FromStr for PairingFunction {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |message: String| Error::InvalidLiteral { text: text.to_string(), message };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "zero" {
            return Ok(PairingFunction::zero());
        }
        let mut out = PairingFunction::zero();
        for term in compact.split('+') {
            let (coef, body) = match term.split_once('*') {
                Some((c, b)) => (c.parse::<f64>().map_err(|_| bad(format!("`{c}` is not a number")))?, b),
                None => (1.0, term),
            };
            let (name, args) = body
                .strip_suffix(')')
                .and_then(|b| b.split_once('('))
                .ok_or_else(|| bad(format!("cannot read term `{term}`")))?;
            let nums: Vec<f64> = args
                .split(',')
                .map(|s| s.parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number"))))
                .collect::<Result<_>>()?;
            let piece = match (name, &nums[..]) {
                ("bump", &[c, r]) => PairingFunction::bump(c, r)?,
                ("mollified", &[lo, hi, ramp]) => PairingFunction::mollified(lo, hi, ramp)?,
                _ => return Err(bad(format!("unknown term `{body}`"))),
            };
            out = out.plus(&piece.scaled(coef));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_transform_at_zero_is_its_mass() {
        // ∫(1−u²)³ du over [−1, 1] = 32/35.
        let g = PairingFunction::bump(0.7, 2.0).unwrap();
        let m = g.transform(Complex64::new(0.0, 0.0));
        assert!((m.re - 2.0 * 32.0 / 35.0).abs() < 1e-13);
        assert!(m.im.abs() < 1e-15);
    }

    #[test]
    fn transform_matches_fine_riemann_sum() {
        let g = PairingFunction::mollified(-1.0, 2.0, 0.4)
            .unwrap()
            .plus(&PairingFunction::bump(0.5, 1.0).unwrap().scaled(-2.0));
        for xi in [0.3, 4.0, 37.5] {
            let n = 400_000;
            let (lo, hi) = g.support();
            let h = (hi - lo) / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let x = lo + (i as f64 + 0.5) * h;
                acc += g.value(x) * Complex64::new(0.0, -2.0 * std::f64::consts::PI * xi * x).exp() * h;
            }
            let v = g.transform(Complex64::new(xi, 0.0));
            assert!((v - acc).norm() < 1e-9, "ξ = {xi}");
            let even = g.even_transform(2.0 * std::f64::consts::PI * xi);
            let both = v + g.transform(Complex64::new(-xi, 0.0));
            assert!((even - both.re).abs() < 1e-12 && both.im.abs() < 1e-12);
        }
    }

    #[test]
    fn transform_decays_like_inverse_square() {
        let g = PairingFunction::mollified(-3.0, 3.0, 1.0).unwrap();
        let c = g.second_derivative_l1();
        for xi in [1.0, 10.0, 100.0] {
            let v = g.transform(Complex64::new(xi, 0.0)).norm();
            assert!(v <= c / (2.0 * std::f64::consts::PI * xi).powi(2));
        }
    }

    #[test]
    fn second_derivative_norm_of_bump() {
        let g = PairingFunction::bump(0.0, 1.0).unwrap();
        let n = 2_000_000;
        let h = 2.0 / n as f64;
        let brute: f64 = (0..n).map(|i| g.second_derivative(-1.0 + (i as f64 + 0.5) * h).abs() * h).sum();
        assert!((g.second_derivative_l1() - brute).abs() < 1e-8);
    }

    #[test]
    fn literal_round_trip() {
        let g: PairingFunction = "2*bump(0,0.5) + mollified(-3,3,1)".parse().unwrap();
        assert_eq!(g.terms().len(), 2);
        assert_eq!(g.to_string().parse::<PairingFunction>().unwrap(), g);
        assert!("bump(0)".parse::<PairingFunction>().is_err());
        assert!("mollified(0,1,0.8)".parse::<PairingFunction>().is_err());
        assert!("zero".parse::<PairingFunction>().unwrap().is_zero());
        assert_eq!(g.reflected().reflected(), g);
        assert_eq!(g.support(), (-3.0, 3.0));
    }
}
