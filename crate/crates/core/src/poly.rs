//! Trigonometric polynomials in one or several variables.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{IntegerSet, LatticeSet};

/// The character `e(z) = exp(2 pi i z)`.
///
/// The argument is reduced modulo 1 before evaluation, so large integer parts
/// do not cost accuracy.
pub fn char_e(z: f64) -> Complex64 {
    let frac = z - z.floor();
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// A trigonometric polynomial `sum_n c_n e(n . t)` with integer frequency
/// vectors `n` of a fixed rank. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoly", into = "RawPoly")]
pub struct TrigPoly {
    rank: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    rank: usize,
    terms: Vec<(Vec<i64>, [f64; 2])>,
}

impl TrigPoly {
    /// The zero polynomial of the given rank.
    pub fn zero(rank: usize) -> Self {
        TrigPoly {
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from `(frequency, coefficient)` pairs. Repeated
    /// frequencies are summed; zero results are dropped.
    pub fn new<I>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        if rank == 0 {
            return Err(Error::RankTooSmall { min: 1, got: 0 });
        }
        let mut map: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (freq, c) in terms {
            if freq.len() != rank {
                return Err(Error::RankMismatch {
                    rank,
                    got: freq.len(),
                    point: freq,
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Parameter(format!(
                    "non-finite coefficient at {freq:?}"
                )));
            }
            *map.entry(freq).or_default() += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(TrigPoly { rank, terms: map })
    }

    /// Rank-1 convenience constructor.
    pub fn from_1d<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        TrigPoly::new(1, terms.into_iter().map(|(n, c)| (vec![n], c)))
            .expect("rank-1 frequencies always have one coordinate")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same as [`TrigPoly::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Terms in lexicographic frequency order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> + '_ {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn coeff(&self, freq: &[i64]) -> Complex64 {
        self.terms.get(freq).copied().unwrap_or_default()
    }

    /// Coefficients in increasing frequency order (lexicographic for rank > 1).
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.terms.values().copied().collect()
    }

    /// Per-axis degree: the largest `|n_i|` over all stored frequencies.
    pub fn degree(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.rank];
        for freq in self.terms.keys() {
            for (d, &n) in deg.iter_mut().zip(freq) {
                *d = (*d).max(n.unsigned_abs());
            }
        }
        deg
    }

    /// Per-axis `(min, max)` of the support, `None` for the zero polynomial.
    pub fn support_bounds(&self) -> Option<Vec<(i64, i64)>> {
        let mut keys = self.terms.keys();
        let first = keys.next()?;
        let mut bounds: Vec<(i64, i64)> = first.iter().map(|&n| (n, n)).collect();
        for freq in keys {
            for (b, &n) in bounds.iter_mut().zip(freq) {
                b.0 = b.0.min(n);
                b.1 = b.1.max(n);
            }
        }
        Some(bounds)
    }

    /// Multiplies by `e(shift . t)`, i.e. translates every frequency.
    pub fn translate(&self, shift: &[i64]) -> Result<TrigPoly> {
        if shift.len() != self.rank {
            return Err(Error::RankMismatch {
                rank: self.rank,
                got: shift.len(),
                point: shift.to_vec(),
            });
        }
        let mut terms = BTreeMap::new();
        for (freq, &c) in &self.terms {
            let moved = freq
                .iter()
                .zip(shift)
                .map(|(&n, &s)| {
                    n.checked_add(s)
                        .ok_or_else(|| Error::Overflow(format!("frequency {n} + {s}")))
                })
                .collect::<Result<Vec<_>>>()?;
            terms.insert(moved, c);
        }
        Ok(TrigPoly {
            rank: self.rank,
            terms,
        })
    }

    /// Keeps the terms whose frequency satisfies `keep`.
    pub fn filter<F: FnMut(&[i64]) -> bool>(&self, mut keep: F) -> TrigPoly {
        TrigPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Replaces each coefficient by `g(frequency, coefficient)`, dropping zeros.
    pub fn map_coefficients<G>(&self, mut g: G) -> TrigPoly
    where
        G: FnMut(&[i64], Complex64) -> Complex64,
    {
        TrigPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(k, &v)| (k.clone(), g(k, v)))
                .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
                .collect(),
        }
    }

    /// Sum of two polynomials of equal rank.
    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if other.rank != self.rank {
            return Err(Error::RankMismatch {
                rank: self.rank,
                got: other.rank,
                point: Vec::new(),
            });
        }
        TrigPoly::new(
            self.rank,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(k, &v)| (k.clone(), v)),
        )
    }

    /// Direct evaluation at a point of the torus, `O(terms)`.
    pub fn evaluate(&self, t: &[f64]) -> Complex64 {
        assert_eq!(t.len(), self.rank, "evaluation point has wrong rank");
        self.terms
            .iter()
            .map(|(freq, &c)| {
                // Reduce each product modulo 1 separately to limit cancellation.
                let phase: f64 = freq
                    .iter()
                    .zip(t)
                    .map(|(&n, &x)| {
                        let p = n as f64 * x;
                        p - p.floor()
                    })
                    .sum();
                c * char_e(phase)
            })
            .sum()
    }
}

impl TryFrom<RawPoly> for TrigPoly {
    type Error = Error;

    fn try_from(raw: RawPoly) -> Result<Self> {
        TrigPoly::new(
            raw.rank,
            raw.terms
                .into_iter()
                .map(|(f, [re, im])| (f, Complex64::new(re, im))),
        )
    }
}

impl From<TrigPoly> for RawPoly {
    fn from(p: TrigPoly) -> Self {
        RawPoly {
            rank: p.rank,
            terms: p
                .terms
                .into_iter()
                .map(|(f, c)| (f, [c.re, c.im]))
                .collect(),
        }
    }
}

/// Sets that can serve as the frequency support of an exponential sum.
pub trait FrequencySet {
    fn rank(&self) -> usize;
    fn frequencies(&self) -> Vec<Vec<i64>>;
}

impl FrequencySet for IntegerSet {
    fn rank(&self) -> usize {
        1
    }

    fn frequencies(&self) -> Vec<Vec<i64>> {
        self.iter().map(|a| vec![a]).collect()
    }
}

impl FrequencySet for LatticeSet {
    fn rank(&self) -> usize {
        LatticeSet::rank(self)
    }

    fn frequencies(&self) -> Vec<Vec<i64>> {
        self.points().to_vec()
    }
}

/// The exponential sum `F(t) = sum_{a in A} e(a . t)` of a nonempty set.
pub fn indicator_poly<S: FrequencySet + ?Sized>(set: &S) -> Result<TrigPoly> {
    let freqs = set.frequencies();
    if freqs.is_empty() {
        return Err(Error::EmptySet);
    }
    TrigPoly::new(
        set.rank(),
        freqs.into_iter().map(|f| (f, Complex64::new(1.0, 0.0))),
    )
}

/// Translates the support so that each axis is centred on zero.
///
/// Returns the translated polynomial and the per-axis shift that was
/// subtracted; `g.translate(&shift)` recovers `f`. Translation multiplies
/// `f` by a unimodular character, so every `L^p` norm is unchanged.
pub fn recentre(f: &TrigPoly) -> (TrigPoly, Vec<i64>) {
    let Some(bounds) = f.support_bounds() else {
        return (f.clone(), vec![0; f.rank()]);
    };
    let shift: Vec<i64> = bounds
        .iter()
        .map(|&(lo, hi)| (lo as i128 + hi as i128).div_euclid(2) as i64)
        .collect();
    let neg: Vec<i64> = shift.iter().map(|s| -s).collect();
    // |n - shift| <= ceil(diameter / 2) fits in i64 whenever n and shift do.
    let g = f
        .translate(&neg)
        .expect("centred frequencies cannot overflow");
    (g, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn char_e_special_values() {
        assert!(close(char_e(0.0), Complex64::new(1.0, 0.0)));
        assert!(close(char_e(0.5), Complex64::new(-1.0, 0.0)));
        assert!(close(char_e(0.25), Complex64::new(0.0, 1.0)));
        assert!(close(char_e(-0.75), Complex64::new(0.0, 1.0)));
        assert!((char_e(123.456).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_of_small_sets() {
        let p = indicator_poly(&IntegerSet::new(vec![0]).unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.degree(), vec![0]);

        let p = indicator_poly(&IntegerSet::interval(1, 3)).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.degree(), vec![3]);
        assert!(p.coefficients().iter().all(|&c| c == Complex64::new(1.0, 0.0)));

        let l = LatticeSet::new(2, vec![vec![0, 0], vec![1, 2]]).unwrap();
        let p = indicator_poly(&l).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.degree(), vec![1, 2]);

        assert_eq!(
            indicator_poly(&IntegerSet::default()),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn recentre_examples() {
        let f = indicator_poly(&IntegerSet::interval(100, 102)).unwrap();
        let (g, shift) = recentre(&f);
        assert_eq!(shift, vec![101]);
        assert_eq!(g.support_bounds().unwrap(), vec![(-1, 1)]);
        assert_eq!(g.translate(&shift).unwrap(), f);

        let f = indicator_poly(&IntegerSet::new(vec![0]).unwrap()).unwrap();
        let (g, shift) = recentre(&f);
        assert_eq!(shift, vec![0]);
        assert_eq!(g, f);

        let f = indicator_poly(&IntegerSet::new(vec![5, 9]).unwrap()).unwrap();
        let (g, shift) = recentre(&f);
        assert_eq!(shift, vec![7]);
        assert_eq!(g.support_bounds().unwrap(), vec![(-2, 2)]);
    }

    #[test]
    fn recentre_degree_is_half_the_diameter() {
        let f = TrigPoly::new(
            2,
            [
                (vec![-3, 10], Complex64::new(1.0, 0.0)),
                (vec![4, 11], Complex64::new(0.0, 2.0)),
            ],
        )
        .unwrap();
        let (g, _) = recentre(&f);
        // diameters 7 and 1
        assert_eq!(g.degree(), vec![4, 1]);
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = TrigPoly::from_1d([
            (1, Complex64::new(1.0, 0.0)),
            (1, Complex64::new(-1.0, 0.0)),
            (2, Complex64::new(0.0, 0.0)),
        ]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), vec![0]);
    }

    #[test]
    fn json_layout() {
        let p = TrigPoly::from_1d([(3, Complex64::new(1.0, -0.5))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"rank":1,"terms":[[[3],[1.0,-0.5]]]}"#);
        let back: TrigPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<TrigPoly>(r#"{"rank":2,"terms":[[[3],[1.0,0.0]]]}"#).is_err());
    }
}
