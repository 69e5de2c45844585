//! Structured sets: rank-2 generalized arithmetic progressions, strongly
//! `r`-dimensional lattice sets and strongly `r`-dimensional integer sets,
//! together with certificates witnessing the structure.
//!
//! A lattice set `A ⊆ Z^r` is `(n_1, ..., n_r)`-strongly `r`-dimensional when
//! its first projection has at least `n_1` points and every fibre above it is
//! `(n_2, ..., n_r)`-strongly `(r-1)`-dimensional.
//!
//! An integer set is `(δ_1, ..., δ_{r-1}; n_1, ..., n_r)`-strongly
//! `r`-dimensional when `A = ∪_{k ∈ I} (A_k + k d_2)` with `d_2 > (2 + δ_1) d_1`,
//! `|I| >= n_1`, and each block `A_k ⊆ [-d_1, d_1]` structured one level down.
//! In both cases a single element set of size `>= n` is the rank-1 base.
//!
//! Only validation of presented certificates is provided; recognizing
//! structure in an arbitrary set is a search problem.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{distinct_in, seeded, SeededRng};
use crate::sets::{IntegerSet, LatticeSet};

/// `{a m + b n : 1 <= m <= M, 1 <= n <= N}`.
///
/// Unless `force` is set, `a M < b` is required, which makes all `M N` sums
/// distinct for positive `a`. Any collision found during enumeration is an
/// error listing the colliding `(m, n)` pairs.
pub fn gap_rank2(a: i64, b: i64, m_len: i64, n_len: i64, force: bool) -> Result<IntegerSet> {
    if a == 0 || b == 0 {
        return Err(Error::Parameter("GAP steps must be nonzero".into()));
    }
    if m_len < 1 || n_len < 1 {
        return Err(Error::Parameter("GAP lengths must be positive".into()));
    }
    let am = a
        .checked_mul(m_len)
        .ok_or_else(|| Error::Overflow("a M".into()))?;
    if !force && am >= b {
        return Err(Error::hypothesis(
            "aM < b",
            format!("a M = {am} is not below b = {b}"),
        ));
    }
    let mut seen: HashMap<i64, (i64, i64)> = HashMap::new();
    let mut collisions = Vec::new();
    for m in 1..=m_len {
        for n in 1..=n_len {
            let v = a
                .checked_mul(m)
                .and_then(|x| b.checked_mul(n).and_then(|y| x.checked_add(y)))
                .ok_or_else(|| Error::Overflow(format!("{a}*{m} + {b}*{n}")))?;
            if let Some(&prev) = seen.get(&v) {
                collisions.push((prev, (m, n)));
            } else {
                seen.insert(v, (m, n));
            }
        }
    }
    if !collisions.is_empty() {
        return Err(Error::Collision(collisions));
    }
    Ok(IntegerSet::from_iter_dedup(seen.into_keys()))
}

/// Projection onto `axis` (0-based) and the fibres above each projected
/// value, with the `axis` coordinate removed.
pub fn project_and_fibre(
    set: &LatticeSet,
    axis: usize,
) -> Result<(IntegerSet, BTreeMap<i64, LatticeSet>)> {
    if set.rank() < 2 {
        return Err(Error::RankTooSmall {
            min: 2,
            got: set.rank(),
        });
    }
    let projection = set.projection(axis)?;
    let mut groups: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    for p in set.points() {
        let mut rest = p.clone();
        let key = rest.remove(axis);
        groups.entry(key).or_default().push(rest);
    }
    let fibres = groups
        .into_iter()
        .map(|(k, pts)| Ok((k, LatticeSet::new(set.rank() - 1, pts)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok((projection, fibres))
}

/// One block `A_k` of an integer-set decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub subset: IntegerSet,
    pub certificate: DimCertificate,
}

/// Witness that a set is strongly `r`-dimensional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimCertificate {
    /// Rank 1: the set has at least `min_size` elements.
    Base { min_size: usize },
    /// Lattice flavor: certificates for the fibres above each first coordinate.
    Lattice {
        min_projection: usize,
        fibres: BTreeMap<i64, DimCertificate>,
    },
    /// Integer flavor: `A = ∪_{k ∈ index} (blocks[k] + k d2)`.
    Integer {
        d1: i64,
        d2: i64,
        delta: f64,
        min_index: usize,
        index: IntegerSet,
        blocks: BTreeMap<i64, Block>,
    },
}

/// The `(δ; n)` parameters a certificate claims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub sizes: Vec<usize>,
    pub deltas: Vec<f64>,
}

impl DimCertificate {
    pub fn rank(&self) -> usize {
        self.profile().sizes.len()
    }

    /// Claimed parameters, read along the first branch of the tree.
    pub fn profile(&self) -> Profile {
        match self {
            DimCertificate::Base { min_size } => Profile {
                sizes: vec![*min_size],
                deltas: Vec::new(),
            },
            DimCertificate::Lattice {
                min_projection,
                fibres,
            } => {
                let mut p = fibres
                    .values()
                    .next()
                    .map(DimCertificate::profile)
                    .unwrap_or(Profile {
                        sizes: Vec::new(),
                        deltas: Vec::new(),
                    });
                p.sizes.insert(0, *min_projection);
                p
            }
            DimCertificate::Integer {
                delta,
                min_index,
                blocks,
                ..
            } => {
                let mut p = blocks
                    .values()
                    .next()
                    .map(|b| b.certificate.profile())
                    .unwrap_or(Profile {
                        sizes: Vec::new(),
                        deltas: Vec::new(),
                    });
                p.sizes.insert(0, *min_index);
                p.deltas.insert(0, *delta);
                p
            }
        }
    }
}

/// One checked condition of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Result of validating a certificate. Checking stops at the first
/// violated condition, which is also recorded in `failure`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub checks: Vec<Check>,
    pub failure: Option<String>,
}

struct Validator {
    checks: Vec<Check>,
    failure: Option<String>,
}

impl Validator {
    fn new() -> Self {
        Validator {
            checks: Vec::new(),
            failure: None,
        }
    }

    /// Records a check; returns whether it passed.
    fn check(&mut self, path: &str, name: &str, pass: bool, detail: impl Into<String>) -> bool {
        let name = if path.is_empty() {
            name.to_string()
        } else {
            format!("{path}: {name}")
        };
        let detail = detail.into();
        if !pass && self.failure.is_none() {
            self.failure = Some(format!("{name} ({detail})"));
        }
        self.checks.push(Check { name, pass, detail });
        pass
    }

    fn finish(self) -> ValidationReport {
        ValidationReport {
            pass: self.failure.is_none(),
            checks: self.checks,
            failure: self.failure,
        }
    }

    fn base(&mut self, path: &str, len: usize, min_size: usize) -> bool {
        self.check(path, "n >= 1", min_size >= 1, format!("n = {min_size}"))
            && self.check(
                path,
                "|A| >= n",
                len >= min_size,
                format!("|A| = {len}, n = {min_size}"),
            )
    }

    fn same_profiles<'a, I>(&mut self, path: &str, certs: I) -> bool
    where
        I: Iterator<Item = &'a DimCertificate>,
    {
        let profiles: Vec<Profile> = certs.map(DimCertificate::profile).collect();
        let uniform = profiles.windows(2).all(|w| w[0] == w[1]);
        self.check(
            path,
            "children claim identical parameters",
            uniform,
            format!("{} children", profiles.len()),
        )
    }

    fn integer(&mut self, path: &str, set: &IntegerSet, cert: &DimCertificate) -> bool {
        match cert {
            DimCertificate::Base { min_size } => self.base(path, set.len(), *min_size),
            DimCertificate::Lattice { .. } => self.check(
                path,
                "certificate flavor",
                false,
                "lattice certificate presented for an integer set",
            ),
            DimCertificate::Integer {
                d1,
                d2,
                delta,
                min_index,
                index,
                blocks,
            } => self.integer_node(path, set, *d1, *d2, *delta, *min_index, index, blocks),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn integer_node(
        &mut self,
        path: &str,
        set: &IntegerSet,
        d1: i64,
        d2: i64,
        delta: f64,
        min_index: usize,
        index: &IntegerSet,
        blocks: &BTreeMap<i64, Block>,
    ) -> bool {
        let ok = self.check(path, "d1 >= 1", d1 >= 1, format!("d1 = {d1}"))
            && self.check(
                path,
                "delta > 0",
                delta.is_finite() && delta > 0.0,
                format!("delta = {delta}"),
            )
            && self.check(
                path,
                "d2 > (2 + delta) d1",
                (d2 as f64) > (2.0 + delta) * d1 as f64,
                format!("d2 = {d2}, (2 + delta) d1 = {}", (2.0 + delta) * d1 as f64),
            )
            && self.check(
                path,
                "|I| >= n1",
                index.len() >= min_index.max(1),
                format!("|I| = {}, n1 = {min_index}", index.len()),
            )
            && self.check(
                path,
                "blocks indexed by I",
                blocks.keys().copied().eq(index.iter()),
                format!("{} blocks, {} indices", blocks.len(), index.len()),
            );
        if !ok {
            return false;
        }
        for (&k, block) in blocks {
            let sub = format!("{path}/k={k}");
            let ok = self.check(&sub, "A_k nonempty", !block.subset.is_empty(), "")
                && self.check(
                    &sub,
                    "A_k within [-d1, d1]",
                    block.subset.iter().all(|a| a.abs() <= d1),
                    format!(
                        "range [{}, {}], d1 = {d1}",
                        block.subset.min().unwrap_or(0),
                        block.subset.max().unwrap_or(0)
                    ),
                )
                && self.integer(&sub, &block.subset, &block.certificate);
            if !ok {
                return false;
            }
        }
        if !self.same_profiles(path, blocks.values().map(|b| &b.certificate)) {
            return false;
        }
        let mut union = Vec::new();
        for (&k, block) in blocks {
            for a in block.subset.iter() {
                match k.checked_mul(d2).and_then(|x| x.checked_add(a)) {
                    Some(v) => union.push(v),
                    None => {
                        return self.check(path, "no overflow", false, format!("{k} d2 + {a}"))
                    }
                }
            }
        }
        let total = union.len();
        union.sort_unstable();
        union.dedup();
        self.check(
            path,
            "translated blocks pairwise disjoint",
            union.len() == total,
            format!("{} of {total} elements distinct", union.len()),
        ) && self.check(
            path,
            "union of translated blocks equals A",
            union == set.elements(),
            format!("union has {} elements, A has {}", union.len(), set.len()),
        )
    }

    fn lattice(&mut self, path: &str, set: &LatticeSet, cert: &DimCertificate) -> bool {
        match cert {
            DimCertificate::Base { min_size } => {
                self.check(path, "rank 1", set.rank() == 1, format!("rank {}", set.rank()))
                    && self.base(path, set.len(), *min_size)
            }
            DimCertificate::Integer { .. } => self.check(
                path,
                "certificate flavor",
                false,
                "integer certificate presented for a lattice set",
            ),
            DimCertificate::Lattice {
                min_projection,
                fibres,
            } => {
                if !self.check(path, "rank >= 2", set.rank() >= 2, format!("rank {}", set.rank())) {
                    return false;
                }
                let (proj, actual) = match project_and_fibre(set, 0) {
                    Ok(x) => x,
                    Err(e) => return self.check(path, "fibres", false, e.to_string()),
                };
                let ok = self.check(
                    path,
                    "|A_1| >= n1",
                    proj.len() >= (*min_projection).max(1),
                    format!("|A_1| = {}, n1 = {min_projection}", proj.len()),
                ) && self.check(
                    path,
                    "fibre certificates indexed by A_1",
                    fibres.keys().copied().eq(proj.iter()),
                    format!("{} certificates, {} fibres", fibres.len(), proj.len()),
                );
                if !ok {
                    return false;
                }
                for (k, fibre) in &actual {
                    let sub = format!("{path}/a1={k}");
                    if !self.lattice(&sub, fibre, &fibres[k]) {
                        return false;
                    }
                }
                self.same_profiles(path, fibres.values())
            }
        }
    }
}

/// Validates an integer-set certificate.
pub fn validate_integer_certificate(set: &IntegerSet, cert: &DimCertificate) -> ValidationReport {
    let mut v = Validator::new();
    v.integer("", set, cert);
    v.finish()
}

/// Validates a lattice-set certificate.
pub fn validate_lattice_certificate(set: &LatticeSet, cert: &DimCertificate) -> ValidationReport {
    let mut v = Validator::new();
    v.lattice("", set, cert);
    v.finish()
}

/// A structured set of either flavor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StructuredSet {
    Integer(IntegerSet),
    Lattice(LatticeSet),
}

pub fn validate_certificate(set: &StructuredSet, cert: &DimCertificate) -> ValidationReport {
    match set {
        StructuredSet::Integer(s) => validate_integer_certificate(s, cert),
        StructuredSet::Lattice(s) => validate_lattice_certificate(s, cert),
    }
}

/// How generated structures are populated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Every level is an interval of exactly the requested size.
    Box,
    /// Seeded sparse choices of at least the requested size.
    Random,
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Parameter("at least one level size is required".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::Parameter("level sizes must be positive".into()));
    }
    Ok(())
}

/// A `(n_1, ..., n_r)`-strongly `r`-dimensional lattice set with its
/// certificate. Box mode yields `{1..n_1} x ... x {1..n_r}`.
pub fn build_strong_lattice(
    sizes: &[usize],
    shape: Shape,
    seed: u64,
) -> Result<(LatticeSet, DimCertificate)> {
    check_sizes(sizes)?;
    let mut rng = seeded(seed);
    let (points, cert) = lattice_level(sizes, shape, &mut rng);
    Ok((LatticeSet::new(sizes.len(), points)?, cert))
}

fn lattice_level(
    sizes: &[usize],
    shape: Shape,
    rng: &mut SeededRng,
) -> (Vec<Vec<i64>>, DimCertificate) {
    let n = sizes[0];
    let coords: Vec<i64> = match shape {
        Shape::Box => (1..=n as i64).collect(),
        Shape::Random => {
            let count = n + rng.gen_range(0..=n / 2);
            distinct_in(rng, count, -4 * count as i64, 8 * count)
        }
    };
    if sizes.len() == 1 {
        let points = coords.into_iter().map(|c| vec![c]).collect();
        return (points, DimCertificate::Base { min_size: n });
    }
    let mut points = Vec::new();
    let mut fibres = BTreeMap::new();
    for c in coords {
        let (sub, cert) = lattice_level(&sizes[1..], shape, rng);
        points.extend(sub.into_iter().map(|mut p| {
            p.insert(0, c);
            p
        }));
        fibres.insert(c, cert);
    }
    (
        points,
        DimCertificate::Lattice {
            min_projection: n,
            fibres,
        },
    )
}

/// Parameters of a strongly `r`-dimensional integer set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerSpec {
    /// `δ_1, ..., δ_{r-1}`.
    pub deltas: Vec<f64>,
    /// `n_1, ..., n_r`.
    pub sizes: Vec<usize>,
    pub shape: Shape,
    #[serde(default)]
    pub seed: u64,
    /// `d_2 = floor(stretch (2 + δ) d_1) + 1`; 1 gives the smallest legal gap.
    #[serde(default = "default_stretch")]
    pub stretch: f64,
}

fn default_stretch() -> f64 {
    1.0
}

impl IntegerSpec {
    pub fn new(deltas: Vec<f64>, sizes: Vec<usize>, shape: Shape, seed: u64) -> Self {
        IntegerSpec {
            deltas,
            sizes,
            shape,
            seed,
            stretch: 1.0,
        }
    }
}

/// Builds a `(δ; n)`-strongly `r`-dimensional integer set with its
/// certificate. Blocks are centred in `[-d_1, d_1]` and translated by
/// multiples of the smallest legal `d_2` (scaled by `stretch`).
pub fn build_strong_integer(spec: &IntegerSpec) -> Result<(IntegerSet, DimCertificate)> {
    check_sizes(&spec.sizes)?;
    if spec.deltas.len() + 1 != spec.sizes.len() {
        return Err(Error::Parameter(format!(
            "{} sizes need {} deltas, got {}",
            spec.sizes.len(),
            spec.sizes.len() - 1,
            spec.deltas.len()
        )));
    }
    if spec.deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::Parameter("deltas must be positive".into()));
    }
    if !(spec.stretch.is_finite() && spec.stretch >= 1.0) {
        return Err(Error::Parameter("stretch must be at least 1".into()));
    }
    let mut rng = seeded(spec.seed);
    integer_level(&spec.deltas, &spec.sizes, spec.shape, spec.stretch, &mut rng)
}

fn integer_level(
    deltas: &[f64],
    sizes: &[usize],
    shape: Shape,
    stretch: f64,
    rng: &mut SeededRng,
) -> Result<(IntegerSet, DimCertificate)> {
    let n = sizes[0];
    if sizes.len() == 1 {
        let set = match shape {
            Shape::Box => IntegerSet::interval(0, n as i64 - 1),
            Shape::Random => IntegerSet::new(distinct_in(rng, n, 0, 4 * n))?,
        };
        return Ok((set, DimCertificate::Base { min_size: n }));
    }
    let delta = deltas[0];
    let index = match shape {
        Shape::Box => IntegerSet::interval(0, n as i64 - 1),
        Shape::Random => IntegerSet::new(distinct_in(rng, n, 0, 3 * n))?,
    };
    let mut children = Vec::with_capacity(index.len());
    match shape {
        Shape::Box => {
            let child = centred(integer_level(&deltas[1..], &sizes[1..], shape, stretch, rng)?)?;
            children.resize(index.len(), child);
        }
        Shape::Random => {
            for _ in 0..index.len() {
                children.push(centred(integer_level(
                    &deltas[1..],
                    &sizes[1..],
                    shape,
                    stretch,
                    rng,
                )?)?);
            }
        }
    }
    let d1 = children
        .iter()
        .flat_map(|(s, _)| s.iter())
        .map(|a| a.abs())
        .max()
        .unwrap_or(0)
        .max(1);
    let gap = (stretch * (2.0 + delta) * d1 as f64).floor();
    if gap >= i64::MAX as f64 {
        return Err(Error::Overflow("d2".into()));
    }
    let d2 = gap as i64 + 1;

    let mut elements = Vec::new();
    let mut blocks = BTreeMap::new();
    for (k, (subset, certificate)) in index.iter().zip(children) {
        let offset = k
            .checked_mul(d2)
            .ok_or_else(|| Error::Overflow(format!("{k} * d2")))?;
        elements.extend(subset.translate(offset)?.iter());
        blocks.insert(
            k,
            Block {
                subset,
                certificate,
            },
        );
    }
    let set = IntegerSet::new(elements)?;
    Ok((
        set,
        DimCertificate::Integer {
            d1,
            d2,
            delta,
            min_index: n,
            index,
            blocks,
        },
    ))
}

/// Translates a child so that its support is (nearly) symmetric about zero.
///
/// A rank-1 child is shifted by its exact centre. A decomposed child is
/// shifted by the multiple of its own `d2` closest to its centre, which
/// only renames the index set and leaves every block untouched.
fn centred((set, cert): (IntegerSet, DimCertificate)) -> Result<(IntegerSet, DimCertificate)> {
    let (lo, hi) = (set.min().unwrap_or(0), set.max().unwrap_or(0));
    let centre = (lo as i128 + hi as i128).div_euclid(2) as i64;
    match cert {
        DimCertificate::Integer {
            d1,
            d2,
            delta,
            min_index,
            index,
            blocks,
        } => {
            let whole = (centre as f64 / d2 as f64).round() as i64;
            let shift = whole
                .checked_mul(d2)
                .ok_or_else(|| Error::Overflow("centring shift".into()))?;
            let cert = DimCertificate::Integer {
                d1,
                d2,
                delta,
                min_index,
                index: index.translate(-whole)?,
                blocks: blocks.into_iter().map(|(k, b)| (k - whole, b)).collect(),
            };
            Ok((set.translate(-shift)?, cert))
        }
        other => Ok((set.translate(-centre)?, other)),
    }
}
