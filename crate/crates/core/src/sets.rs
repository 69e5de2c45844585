//! Finite sets of integers and lattice points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of distinct integers, stored in increasing order.
///
/// The empty set is representable (residue classes can be empty), but every
/// operation that builds an exponential sum from a set rejects it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntegerSet {
    elements: Vec<i64>,
}

impl IntegerSet {
    /// Builds a set from arbitrary-order elements. Duplicates are an error.
    pub fn new(mut elements: Vec<i64>) -> Result<Self> {
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Duplicate(vec![w[0]]));
        }
        Ok(IntegerSet { elements })
    }

    /// Builds a set, silently dropping repeated elements.
    pub fn from_iter_dedup<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        let mut elements: Vec<i64> = iter.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        IntegerSet { elements }
    }

    /// `{lo, lo+1, ..., hi}`; empty when `hi < lo`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        IntegerSet {
            elements: (lo..=hi).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<i64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        IntegerSet { elements }
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.elements.last().copied()
    }

    /// `max - min`, or 0 for sets with fewer than two elements.
    pub fn diameter(&self) -> u64 {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => hi.abs_diff(lo),
            _ => 0,
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.elements.iter().copied()
    }

    /// The set `A + shift`, failing on 64-bit overflow.
    pub fn translate(&self, shift: i64) -> Result<Self> {
        let elements = self
            .elements
            .iter()
            .map(|&a| {
                a.checked_add(shift)
                    .ok_or_else(|| Error::Overflow(format!("{a} + {shift}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntegerSet { elements })
    }
}

impl TryFrom<Vec<i64>> for IntegerSet {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        IntegerSet::new(v)
    }
}

impl From<IntegerSet> for Vec<i64> {
    fn from(s: IntegerSet) -> Self {
        s.elements
    }
}

/// A finite set of distinct points of the lattice `Z^rank`, stored in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLattice", into = "RawLattice")]
pub struct LatticeSet {
    rank: usize,
    points: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct RawLattice {
    rank: usize,
    points: Vec<Vec<i64>>,
}

impl LatticeSet {
    pub fn new(rank: usize, mut points: Vec<Vec<i64>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::RankTooSmall { min: 1, got: 0 });
        }
        if let Some(p) = points.iter().find(|p| p.len() != rank) {
            return Err(Error::RankMismatch {
                rank,
                got: p.len(),
                point: p.clone(),
            });
        }
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Duplicate(w[0].clone()));
        }
        Ok(LatticeSet { rank, points })
    }

    /// The rank-1 lattice set with the same elements.
    pub fn from_integer_set(set: &IntegerSet) -> Self {
        LatticeSet {
            rank: 1,
            points: set.iter().map(|a| vec![a]).collect(),
        }
    }

    /// Cartesian product `S_1 x ... x S_r`.
    pub fn product(factors: &[IntegerSet]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::RankTooSmall { min: 1, got: 0 });
        }
        let mut points: Vec<Vec<i64>> = vec![Vec::new()];
        for f in factors {
            points = points
                .into_iter()
                .flat_map(|p| {
                    f.iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        // Lexicographic order is preserved by construction.
        Ok(LatticeSet {
            rank: factors.len(),
            points,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Image of the coordinate projection onto `axis` (0-based).
    pub fn projection(&self, axis: usize) -> Result<IntegerSet> {
        if axis >= self.rank {
            return Err(Error::AxisOutOfRange {
                axis,
                rank: self.rank,
            });
        }
        Ok(IntegerSet::from_iter_dedup(
            self.points.iter().map(|p| p[axis]),
        ))
    }
}

impl TryFrom<RawLattice> for LatticeSet {
    type Error = Error;

    fn try_from(raw: RawLattice) -> Result<Self> {
        LatticeSet::new(raw.rank, raw.points)
    }
}

impl From<LatticeSet> for RawLattice {
    fn from(s: LatticeSet) -> Self {
        RawLattice {
            rank: s.rank,
            points: s.points,
        }
    }
}
