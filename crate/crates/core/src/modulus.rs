//! Residue classes, the good-modulus ladder, and the thinning transform.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::FlatTopKernel;
use crate::poly::TrigPoly;
use crate::sets::IntegerSet;

/// The residue class `s mod q`, with `0 <= s < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueFilter {
    q: i64,
    s: i64,
}

impl ResidueFilter {
    /// Reduces `s` into `[0, q)`.
    pub fn new(q: i64, s: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::Parameter(format!("modulus must be positive, got {q}")));
        }
        Ok(ResidueFilter {
            q,
            s: s.rem_euclid(q),
        })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn accepts(&self, k: i64) -> bool {
        k.rem_euclid(self.q) == self.s
    }
}

/// `I(q; s) = { k in I : k = s mod q }`.
pub fn residue_filter(set: &IntegerSet, filter: ResidueFilter) -> IntegerSet {
    IntegerSet::from_sorted_unchecked(set.iter().filter(|&k| filter.accepts(k)).collect())
}

/// One rung of the ladder `q_j = 4^j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderStep {
    pub j: u32,
    pub q: i64,
    /// Smallest residue attaining the largest class.
    pub s: i64,
    pub class_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodModulusResult {
    pub q: i64,
    pub s: i64,
    pub j0: u32,
    pub filtered: IntegerSet,
    pub trace: Vec<LadderStep>,
}

impl GoodModulusResult {
    /// Checks `|I|^{1/3} / 8 <= |I(q;s)| <= q^{1/2}` for a set of size `n`.
    pub fn bounds_hold(&self, n: usize) -> bool {
        let size = self.filtered.len() as f64;
        (n as f64).cbrt() / 8.0 <= size && size * size <= self.q as f64
    }
}

/// Largest residue class modulo `q`, ties broken towards the smallest `s`.
fn largest_class(set: &IntegerSet, q: i64) -> (i64, usize) {
    let mut counts: HashMap<i64, usize> = HashMap::new();
    for k in set.iter() {
        *counts.entry(k.rem_euclid(q)).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .unwrap_or((0, 0))
}

/// Walks `q = 4, 16, 64, ...`, taking the most populous class `s_j` at
/// each rung, and stops at the first `j_0` with `|I(4^{j_0}; s_{j_0})| <= 2^{j_0}`.
pub fn good_modulus(set: &IntegerSet) -> Result<GoodModulusResult> {
    if set.len() < 8 {
        return Err(Error::hypothesis(
            "|I| >= 8",
            format!("|I| = {}", set.len()),
        ));
    }
    let mut trace = Vec::new();
    let mut q: i64 = 1;
    for j in 1u32.. {
        q = q
            .checked_mul(4)
            .ok_or_else(|| Error::Overflow(format!("4^{j}")))?;
        let (s, class_size) = largest_class(set, q);
        trace.push(LadderStep {
            j,
            q,
            s,
            class_size,
        });
        if (class_size as u128) <= 1u128 << j {
            let filter = ResidueFilter::new(q, s)?;
            return Ok(GoodModulusResult {
                q,
                s,
                j0: j,
                filtered: residue_filter(set, filter),
                trace,
            });
        }
    }
    unreachable!("the ladder terminates once 4^j exceeds the diameter")
}

/// Hypotheses of the thinning transform, checked by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinningHypotheses {
    pub d1: i64,
    pub d2: i64,
    pub delta: f64,
    pub q: i64,
    /// `M = ceil(delta d1 / 2)`.
    pub kernel_m: i64,
    /// `N = d1`.
    pub kernel_n: i64,
}

/// Output of [`thinning_transform`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinningResult {
    pub thinned: TrigPoly,
    /// `32 pi (2 + ln(1 + 2/delta))`.
    pub bound_factor: f64,
    pub hypotheses: ThinningHypotheses,
    /// Block indices `k` of the support of `F`.
    pub index: IntegerSet,
    /// Blocks that survive, `I(q; s)`.
    pub kept: IntegerSet,
    /// Whether the kernel multiplier agreed exactly with direct selection of
    /// the surviving blocks (every multiplier value was exactly 0 or 1).
    pub identity_holds: bool,
}

/// Block index `k` and offset `l` with `m = d2 k + l`, `|l| <= d2/2`.
fn split_frequency(m: i64, d2: i64) -> (i64, i64) {
    let k = (m + d2 / 2).div_euclid(d2);
    (k, m - k * d2)
}

/// The block indices of `f`, checking that every frequency is `d2 k + l`
/// with `|l| <= d1`.
pub fn block_index(f: &TrigPoly, d1: i64, d2: i64) -> Result<IntegerSet> {
    if f.rank() != 1 {
        return Err(Error::Parameter("block structure needs rank 1".into()));
    }
    let mut ks = Vec::new();
    for (freq, _) in f.terms() {
        let (k, l) = split_frequency(freq[0], d2);
        if l.abs() > d1 {
            return Err(Error::Support {
                index: freq[0],
                detail: format!("offset {l} from block {k} exceeds d1 = {d1}"),
            });
        }
        ks.push(k);
    }
    Ok(IntegerSet::from_iter_dedup(ks))
}

/// Direct selection of the blocks `k` with `k = s mod q`.
pub fn select_blocks(f: &TrigPoly, d2: i64, filter: ResidueFilter) -> TrigPoly {
    f.filter(|freq| filter.accepts(split_frequency(freq[0], d2).0))
}

fn check_thinning(d1: i64, d2: i64, delta: f64, q: i64) -> Result<ThinningHypotheses> {
    if d1 < 1 || d2 < 1 {
        return Err(Error::hypothesis(
            "d1, d2 positive",
            format!("d1 = {d1}, d2 = {d2}"),
        ));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::hypothesis("delta > 0", format!("delta = {delta}")));
    }
    let need = (2.0 + 2.0 * delta) * d1 as f64 + 4.0;
    if need > d2 as f64 {
        return Err(Error::hypothesis(
            "(2 + 2 delta) d1 + 4 <= d2",
            format!("(2 + 2 delta) d1 + 4 = {need}, d2 = {d2}"),
        ));
    }
    if q < 4 {
        return Err(Error::hypothesis("q >= 4", format!("q = {q}")));
    }
    let kernel_m = (delta * d1 as f64 / 2.0).ceil() as i64;
    let kernel_n = d1;
    if kernel_m < 2 {
        return Err(Error::hypothesis(
            "M = ceil(delta d1 / 2) >= 2",
            format!("M = {kernel_m}"),
        ));
    }
    if kernel_m >= kernel_n {
        return Err(Error::hypothesis(
            "M < N = d1",
            format!("M = {kernel_m}, N = {kernel_n}"),
        ));
    }
    let period = q
        .checked_mul(d2)
        .ok_or_else(|| Error::Overflow("q d2".into()))?;
    let min_period = 2 * kernel_n + 4 * kernel_m + 1;
    if period < min_period {
        return Err(Error::hypothesis(
            "q d2 >= 2N + 4M + 1",
            format!("q d2 = {period}, 2N + 4M + 1 = {min_period}"),
        ));
    }
    Ok(ThinningHypotheses {
        d1,
        d2,
        delta,
        q,
        kernel_m,
        kernel_n,
    })
}

/// `32 pi (2 + ln(1 + 2/delta))`.
pub fn thinning_bound_factor(delta: f64) -> f64 {
    32.0 * PI * (2.0 + (1.0 + 2.0 / delta).ln())
}

/// Keeps the blocks `f_k e(d2 k t)` of `F` with `k = s mod q` by multiplying
/// the coefficients of `F` with the flat-top kernel `K_{M,N}` extended with
/// period `q d2`, where `M = ceil(delta d1 / 2)` and `N = d1`.
///
/// The residue `s` is first moved to 0 by translating every frequency by
/// `-s d2` (norm preserving), and moved back afterwards. The multiplier is
/// evaluated in exact arithmetic and compared with direct selection.
pub fn thinning_transform(
    f: &TrigPoly,
    d1: i64,
    d2: i64,
    delta: f64,
    filter: ResidueFilter,
) -> Result<ThinningResult> {
    let hyp = check_thinning(d1, d2, delta, filter.q())?;
    let index = block_index(f, d1, d2)?;
    let kernel = FlatTopKernel::build(hyp.kernel_m, hyp.kernel_n)?;
    let period = filter.q() * d2;
    let shift = filter
        .s()
        .checked_mul(d2)
        .ok_or_else(|| Error::Overflow("s d2".into()))?;

    let mut multipliers: BTreeMap<i64, Rational64> = BTreeMap::new();
    for (freq, _) in f.terms() {
        let m = freq[0]
            .checked_sub(shift)
            .ok_or_else(|| Error::Overflow("frequency - s d2".into()))?;
        multipliers.insert(freq[0], kernel.periodic_value(m, period));
    }
    let identity_holds = multipliers.iter().all(|(&m, v)| {
        let keep = filter.accepts(split_frequency(m, d2).0);
        if keep {
            v.is_one()
        } else {
            v.is_zero()
        }
    });
    let thinned = f.map_coefficients(|freq, c| {
        let v = multipliers[&freq[0]];
        c * Complex64::new(*v.numer() as f64 / *v.denom() as f64, 0.0)
    });
    let kept = residue_filter(&index, filter);
    Ok(ThinningResult {
        thinned,
        bound_factor: thinning_bound_factor(delta),
        hypotheses: hyp,
        index,
        kept,
        identity_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn residue_examples() {
        let i = IntegerSet::interval(0, 7);
        let f = |q, s| residue_filter(&i, ResidueFilter::new(q, s).unwrap());
        assert_eq!(f(4, 0).elements(), &[0, 4]);
        assert_eq!(f(1, 0), i);
        let j = IntegerSet::new(vec![3, 7, 11]).unwrap();
        assert_eq!(
            residue_filter(&j, ResidueFilter::new(4, 3).unwrap()).elements(),
            &[3, 7, 11]
        );
        assert_eq!(ResidueFilter::new(4, -1).unwrap().s(), 3);
        assert!(ResidueFilter::new(0, 0).is_err());
    }

    #[test]
    fn good_modulus_small_interval() {
        let r = good_modulus(&IntegerSet::interval(0, 7)).unwrap();
        assert_eq!((r.j0, r.q, r.s), (1, 4, 0));
        assert_eq!(r.filtered.elements(), &[0, 4]);
        assert!(r.bounds_hold(8));
    }

    #[test]
    fn good_modulus_larger_interval() {
        let r = good_modulus(&IntegerSet::interval(0, 63)).unwrap();
        assert_eq!((r.j0, r.q, r.s), (2, 16, 0));
        assert_eq!(r.filtered.len(), 4);
        assert_eq!(r.trace[0].class_size, 16);
        assert!(r.bounds_hold(64));
    }

    #[test]
    fn good_modulus_needs_eight() {
        assert!(matches!(
            good_modulus(&IntegerSet::interval(0, 6)),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn good_modulus_huge_spread() {
        let s = IntegerSet::new((0..10).map(|i| i * (1i64 << 58) - (1 << 61)).collect()).unwrap();
        let r = good_modulus(&s).unwrap();
        assert!(r.bounds_hold(10));
    }

    fn blocks(index: &[i64], d2: i64, offsets: &[i64]) -> TrigPoly {
        TrigPoly::from_1d(
            index
                .iter()
                .flat_map(|&k| offsets.iter().map(move |&l| (k * d2 + l, one()))),
        )
    }

    #[test]
    fn thinning_keeps_even_blocks() {
        let f = blocks(&[0, 1, 2], 44, &[-10, -3, 0, 7, 10]);
        let r = thinning_transform(&f, 10, 44, 1.0, ResidueFilter::new(4, 0).unwrap()).unwrap();
        assert!(r.identity_holds);
        assert_eq!(r.kept.elements(), &[0]);
        assert_eq!(r.thinned, select_blocks(&f, 44, ResidueFilter::new(4, 0).unwrap()));
        let r = thinning_transform(&f, 10, 44, 1.0, ResidueFilter::new(4, 2).unwrap()).unwrap();
        assert_eq!(r.thinned.len(), 5);
        assert!(r.thinned.terms().all(|(n, _)| (78..=98).contains(&n[0])));
    }

    #[test]
    fn thinning_singleton_class() {
        let f = blocks(&[-3, 0, 5], 30, &[-4, 1, 4]);
        let filter = ResidueFilter::new(16, 5).unwrap();
        let r = thinning_transform(&f, 4, 30, 1.0, filter).unwrap();
        assert!(r.identity_holds);
        assert_eq!(r.kept.elements(), &[5]);
        assert_eq!(r.thinned, blocks(&[5], 30, &[-4, 1, 4]));
    }

    #[test]
    fn thinning_hypotheses() {
        let f = blocks(&[0, 1], 44, &[0]);
        let filt = ResidueFilter::new(4, 0).unwrap();
        let name = |e: Error| match e {
            Error::Hypothesis { name, .. } => name,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(
            name(thinning_transform(&f, 10, 25, 1.0, filt).unwrap_err()),
            "(2 + 2 delta) d1 + 4 <= d2"
        );
        assert_eq!(
            name(thinning_transform(&f, 10, 44, 1.0, ResidueFilter::new(3, 0).unwrap()).unwrap_err()),
            "q >= 4"
        );
        assert_eq!(
            name(thinning_transform(&f, 2, 44, 0.5, filt).unwrap_err()),
            "M = ceil(delta d1 / 2) >= 2"
        );
        let off = TrigPoly::from_1d([(20, one())]);
        assert!(matches!(
            thinning_transform(&off, 10, 44, 1.0, filt),
            Err(Error::Support { .. })
        ));
    }
}
