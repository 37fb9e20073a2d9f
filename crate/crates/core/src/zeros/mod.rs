//! Tables of nontrivial-zero ordinates: computation, certification,
//! ingestion, persistence, and the counting functions N(T) and S(T).

mod fetch;
mod gram;
mod io;
mod scan;
mod turing;

use serde::{Deserialize, Serialize};

pub use fetch::{fetch_zero_table, verify_cached_source, SourceEntry, SourceRegistry};
pub use gram::{gram_index_at, gram_point};
pub use io::{parse_zero_table, read_binary, read_table, write_binary, write_table, TableMetadata};
pub use scan::{find_zeros, locate_sign_changes, MAX_HEIGHT};
pub use turing::{count_bounds, trudgian_bound, turing_certify, CountBounds, TURING_WINDOW};

use crate::error::{Error, Result};
use crate::specialfn::riemann_siegel_theta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSource {
    Computed,
    Ingested,
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    /// 1-based rank by ordinate, counting zeros below the table start.
    pub index: u64,
    pub ordinate: f64,
    /// Horizontal displacement A with β = 1/2 + A / log T.
    pub off_axis: f64,
    pub multiplicity: u32,
}

/// Sorted, immutable list of positive ordinates. Coverage is [t_min, t_max]:
/// every zero in that range is present. `zeros_below` counts zeros under t_min.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    ordinates: Vec<f64>,
    off_axis: Vec<f64>,
    largest_off_axis: f64,
    multiplicity: Vec<u32>,
    cumulative: Vec<u64>,
    t_min: f64,
    t_max: f64,
    zeros_below: u64,
    source: TableSource,
    certified_at: Option<f64>,
    reference_height: Option<f64>,
}

impl ZeroTable {
    pub fn new(ordinates: Vec<f64>, t_min: f64, t_max: f64, source: TableSource) -> Result<Self> {
        if !(t_min >= 0.0 && t_min <= t_max) {
            return Err(Error::ParameterRange {
                name: "t_min",
                value: t_min,
                requirement: format!("need 0 ≤ t_min ≤ t_max = {t_max}"),
            });
        }
        for (i, w) in ordinates.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::Monotonicity { line: i + 2 });
            }
        }
        if let Some(pos) = ordinates.iter().position(|&g| !(g > 0.0)) {
            return Err(Error::Negativity { line: pos + 1 });
        }
        Ok(ZeroTable {
            ordinates,
            off_axis: Vec::new(),
            largest_off_axis: 0.0,
            multiplicity: Vec::new(),
            cumulative: Vec::new(),
            t_min,
            t_max,
            zeros_below: 0,
            source,
            certified_at: None,
            reference_height: None,
        })
    }

    pub fn empty(t_min: f64, t_max: f64) -> Self {
        ZeroTable::new(Vec::new(), t_min, t_max, TableSource::Computed).expect("valid empty table")
    }

    /// Attach displacements A_γ ≥ 0 (one per ordinate) and the height T that
    /// fixes β = 1/2 + A / log T.
    pub fn with_off_axis(mut self, off_axis: Vec<f64>, reference_height: f64) -> Result<Self> {
        crate::error::require(
            off_axis.len() == self.ordinates.len(),
            "off_axis",
            off_axis.len() as f64,
            "need one displacement per ordinate",
        )?;
        crate::error::require(reference_height > 1.0, "reference_height", reference_height, "must exceed 1")?;
        if let Some(&bad) = off_axis.iter().find(|a| !(**a >= 0.0)) {
            return Err(Error::ParameterRange {
                name: "off_axis",
                value: bad,
                requirement: "displacements are stored as A ≥ 0".into(),
            });
        }
        self.largest_off_axis = off_axis.iter().copied().fold(0.0, f64::max);
        self.off_axis = off_axis;
        self.reference_height = Some(reference_height);
        Ok(self)
    }

    pub fn with_multiplicity(mut self, multiplicity: Vec<u32>) -> Result<Self> {
        crate::error::require(
            multiplicity.len() == self.ordinates.len() && multiplicity.iter().all(|&m| m >= 1),
            "multiplicity",
            multiplicity.len() as f64,
            "need one multiplicity ≥ 1 per ordinate",
        )?;
        let mut cumulative = Vec::with_capacity(multiplicity.len() + 1);
        let mut acc = 0u64;
        cumulative.push(0);
        for &m in &multiplicity {
            acc += m as u64;
            cumulative.push(acc);
        }
        self.multiplicity = multiplicity;
        self.cumulative = cumulative;
        Ok(self)
    }

    pub fn with_zeros_below(mut self, count: u64) -> Self {
        self.zeros_below = count;
        self
    }

    pub(crate) fn mark_certified(&mut self, at: f64) {
        self.certified_at = Some(at);
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn zeros_below(&self) -> u64 {
        self.zeros_below
    }

    pub fn source(&self) -> TableSource {
        self.source
    }

    pub fn certified(&self) -> bool {
        self.certified_at.is_some()
    }

    /// Height up to which the count has been Turing-certified.
    pub fn certified_at(&self) -> Option<f64> {
        self.certified_at
    }

    pub fn reference_height(&self) -> Option<f64> {
        self.reference_height
    }

    pub fn has_off_axis(&self) -> bool {
        !self.off_axis.is_empty()
    }

    pub fn off_axis(&self, i: usize) -> f64 {
        self.off_axis.get(i).copied().unwrap_or(0.0)
    }

    pub fn largest_off_axis(&self) -> f64 {
        self.largest_off_axis
    }

    /// β − 1/2 for entry i.
    pub fn real_part_offset(&self, i: usize) -> f64 {
        match self.reference_height {
            Some(h) if !self.off_axis.is_empty() => self.off_axis[i] / h.ln(),
            _ => 0.0,
        }
    }

    pub fn multiplicity(&self, i: usize) -> u32 {
        self.multiplicity.get(i).copied().unwrap_or(1)
    }

    pub fn zero(&self, i: usize) -> Zero {
        Zero {
            index: self.zeros_below + self.weight_before(i) + 1,
            ordinate: self.ordinates[i],
            off_axis: self.off_axis(i),
            multiplicity: self.multiplicity(i),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Zero> + '_ {
        (0..self.len()).map(move |i| self.zero(i))
    }

    /// Number of zeros (with multiplicity) among the first i entries.
    pub(crate) fn weight_before(&self, i: usize) -> u64 {
        if self.cumulative.is_empty() {
            i as u64
        } else {
            self.cumulative[i]
        }
    }

    /// Index of the first ordinate ≥ t.
    pub(crate) fn lower_index(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g < t)
    }

    /// Index range of ordinates in [lo, hi).
    pub(crate) fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.lower_index(lo);
        let b = self.lower_index(hi).max(a);
        a..b
    }

    /// Mirror-aware coverage check for [lo, hi]: negative heights are covered
    /// when the table starts at 0.
    pub fn check_coverage(&self, lo: f64, hi: f64) -> Result<()> {
        let reach = lo.abs().max(hi.abs());
        let floor = if lo < 0.0 && hi > 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
        if reach > self.t_max || floor < self.t_min {
            let requested = if reach > self.t_max { reach } else { floor };
            return Err(Error::OutOfCoverage { requested, t_min: self.t_min, t_max: self.t_max });
        }
        Ok(())
    }

    /// Restrict to ordinates in [lo, hi], keeping the absolute count offset.
    pub fn slice(&self, lo: f64, hi: f64) -> Result<ZeroTable> {
        if lo < self.t_min || hi > self.t_max || lo > hi {
            return Err(Error::OutOfCoverage {
                requested: if lo < self.t_min { lo } else { hi },
                t_min: self.t_min,
                t_max: self.t_max,
            });
        }
        let a = self.lower_index(lo);
        let b = self.ordinates.partition_point(|&g| g <= hi);
        let mut out = ZeroTable::new(self.ordinates[a..b].to_vec(), lo, hi, self.source)?;
        out.zeros_below = self.zeros_below + self.weight_before(a);
        if !self.off_axis.is_empty() {
            out.off_axis = self.off_axis[a..b].to_vec();
            out.largest_off_axis = out.off_axis.iter().copied().fold(0.0, f64::max);
            out.reference_height = self.reference_height;
        }
        if !self.multiplicity.is_empty() {
            out = out.with_multiplicity(self.multiplicity[a..b].to_vec())?;
        }
        if let Some(at) = self.certified_at {
            if at >= hi {
                out.certified_at = Some(hi);
            }
        }
        Ok(out)
    }
}

/// N(T) = #{0 < γ < T}, with multiplicity.
pub fn count_n(table: &ZeroTable, t: f64) -> Result<u64> {
    if t > table.t_max || (t < table.t_min && table.zeros_below > 0) || t.is_nan() {
        return Err(Error::OutOfCoverage { requested: t, t_min: table.t_min, t_max: table.t_max });
    }
    if t <= 0.0 {
        return Ok(0);
    }
    Ok(table.zeros_below + table.weight_before(table.lower_index(t)))
}

/// S(T) = N(T) − θ(T)/π − 1.
pub fn s_of_t(table: &ZeroTable, t: f64) -> Result<f64> {
    let n = count_n(table, t)? as f64;
    Ok(n - riemann_siegel_theta(t) / std::f64::consts::PI - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ZeroTable {
        ZeroTable::new(
            vec![14.134_725_141_734_694, 21.022_039_638_771_555, 25.010_857_580_145_69],
            0.0,
            30.0,
            TableSource::Computed,
        )
        .unwrap()
    }

    #[test]
    fn counting_basics() {
        let t = small();
        assert_eq!(count_n(&t, 0.0).unwrap(), 0);
        assert_eq!(count_n(&t, 15.0).unwrap(), 1);
        assert_eq!(count_n(&t, 30.0).unwrap(), 3);
        assert!(matches!(count_n(&t, 31.0), Err(Error::OutOfCoverage { .. })));
        assert_eq!(t.zero(2).index, 3);
    }

    #[test]
    fn s_of_t_low_and_jump() {
        let t = small();
        let s2 = s_of_t(&t, 2.0).unwrap();
        assert_eq!(s2, -1.0 - riemann_siegel_theta(2.0) / std::f64::consts::PI);
        let g = t.ordinates()[0];
        let before = s_of_t(&t, g - 1e-9).unwrap();
        let after = s_of_t(&t, g + 1e-9).unwrap();
        assert!((after - before - 1.0).abs() < 1e-6);
    }

    #[test]
    fn multiplicity_counts() {
        let t = small().with_multiplicity(vec![1, 2, 1]).unwrap();
        assert_eq!(count_n(&t, 22.0).unwrap(), 3);
        assert_eq!(count_n(&t, 30.0).unwrap(), 4);
        assert_eq!(t.zero(2).index, 4);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(matches!(
            ZeroTable::new(vec![2.0, 1.0], 0.0, 3.0, TableSource::Ingested),
            Err(Error::Monotonicity { line: 2 })
        ));
    }

    #[test]
    fn slicing_keeps_absolute_counts() {
        let t = small();
        let s = t.slice(20.0, 30.0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(count_n(&s, 22.0).unwrap(), 2);
        assert!(count_n(&s, 19.0).is_err());
    }
}
