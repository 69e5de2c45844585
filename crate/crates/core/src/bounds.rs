//! Lower bounds for `‖F‖₁` and their numerical verification.
//!
//! Each verifier computes a certified enclosure of the left side, the right
//! side of the inequality under test, and a verdict. A verdict passes when
//! the lower end of the enclosure is at least the right side; it is
//! certified only when every required hypothesis also holds.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulus::{block_index, residue_filter, ResidueFilter};
use crate::poly::{char_e, indicator_poly, TrigPoly};
use crate::quadrature::{certified_l1, grid_for, riemann_l1, GridBudget, NormInterval};
use crate::sets::{IntegerSet, LatticeSet};
use crate::structures::{
    build_strong_integer, build_strong_lattice, gap_rank2, project_and_fibre,
    validate_integer_certificate, validate_lattice_certificate, DimCertificate, IntegerSpec, Shape,
};
use crate::util::pairwise_sum;
use crate::rng::{distinct_in, seeded};

/// Default value used for the abstract constant of the harmonic lower bound.
pub const DEFAULT_C_MPS: f64 = 0.25;

/// Whether a hypothesis gates certification or is reported for context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisKind {
    Required,
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub kind: HypothesisKind,
}

impl HypothesisCheck {
    fn required(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        HypothesisCheck {
            name: name.to_string(),
            pass,
            detail: detail.into(),
            kind: HypothesisKind::Required,
        }
    }

    fn informational(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        HypothesisCheck {
            kind: HypothesisKind::Informational,
            ..HypothesisCheck::required(name, pass, detail)
        }
    }
}

/// An inequality `‖F‖₁ >= rhs` evaluated on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub theorem: String,
    pub lhs: NormInterval,
    pub rhs: f64,
    pub constant_used: f64,
    /// `lhs.lo - rhs`.
    pub margin: f64,
    pub pass: bool,
    pub certified: bool,
    pub hypotheses: Vec<HypothesisCheck>,
}

impl InequalityVerdict {
    fn new(
        theorem: &str,
        lhs: NormInterval,
        rhs: f64,
        constant_used: f64,
        hypotheses: Vec<HypothesisCheck>,
    ) -> Self {
        let margin = lhs.lo - rhs;
        let pass = margin >= 0.0;
        let certified = pass
            && hypotheses
                .iter()
                .all(|h| h.pass || h.kind == HypothesisKind::Informational);
        InequalityVerdict {
            theorem: theorem.to_string(),
            lhs,
            rhs,
            constant_used,
            margin,
            pass,
            certified,
            hypotheses,
        }
    }
}

/// `sum_j |u_j| / j` for coefficients listed in increasing frequency order.
pub fn mps_rhs(coeffs: &[Complex64]) -> f64 {
    let terms: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, u)| u.norm() / (j + 1) as f64)
        .collect();
    pairwise_sum(&terms)
}

/// `‖sum u_j e(a_j t)‖₁ >= C sum |u_j| / j`.
pub fn verify_mps(
    f: &TrigPoly,
    c: f64,
    rel_err: f64,
    budget: GridBudget,
) -> Result<InequalityVerdict> {
    if f.rank() != 1 {
        return Err(Error::Parameter(format!(
            "harmonic bound needs rank 1, got {}",
            f.rank()
        )));
    }
    if f.is_zero() {
        return Err(Error::EmptySet);
    }
    let lhs = certified_l1(f, rel_err, budget)?;
    let rhs = c * mps_rhs(&f.coefficients());
    Ok(InequalityVerdict::new("mps", lhs, rhs, c, Vec::new()))
}

/// Norm of one fibre above a projected coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreNorm {
    pub coordinate: i64,
    pub norm: NormInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicMultiDimReport {
    /// `rhs` is `C sum_j hi_j / j`, from the upper ends of the fibre norms.
    pub verdict: InequalityVerdict,
    /// `C sum_j lo_j / j`, from the lower ends of the fibre norms.
    pub rhs_lower: f64,
    pub fibres: Vec<FibreNorm>,
}

/// `‖F‖_{L^1(T^r)} >= C sum_j (1/j) ‖F_j‖_{L^1(T^{r-1})}` where `F_j` is the
/// exponential sum of the fibre above the `j`-th smallest first coordinate.
pub fn verify_basic_multidim(
    set: &LatticeSet,
    c: f64,
    rel_err: f64,
    budget: GridBudget,
) -> Result<BasicMultiDimReport> {
    let (_, fibres) = project_and_fibre(set, 0)?;
    let lhs = certified_l1(&indicator_poly(set)?, rel_err, budget)?;
    let fibre_norms = fibres
        .iter()
        .map(|(&coordinate, fibre)| {
            Ok(FibreNorm {
                coordinate,
                norm: certified_l1(&indicator_poly(fibre)?, rel_err, budget)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let weighted = |pick: fn(&NormInterval) -> f64| {
        let terms: Vec<f64> = fibre_norms
            .iter()
            .enumerate()
            .map(|(j, f)| pick(&f.norm) / (j + 1) as f64)
            .collect();
        c * pairwise_sum(&terms)
    };
    let rhs = weighted(|n| n.hi);
    let rhs_lower = weighted(|n| n.lo);
    Ok(BasicMultiDimReport {
        verdict: InequalityVerdict::new("basic-multidim", lhs, rhs, c, Vec::new()),
        rhs_lower,
        fibres: fibre_norms,
    })
}

fn log_product(sizes: &[usize]) -> f64 {
    sizes.iter().map(|&n| (n as f64).ln()).product()
}

/// `‖F‖₁ >= C^r log(n_1) ... log(n_r)` for a certified
/// `(n_1, ..., n_r)`-strongly `r`-dimensional lattice set.
pub fn verify_multidim(
    set: &LatticeSet,
    cert: &DimCertificate,
    c: f64,
    rel_err: f64,
    budget: GridBudget,
) -> Result<InequalityVerdict> {
    let report = validate_lattice_certificate(set, cert);
    let profile = cert.profile();
    let r = profile.sizes.len();
    let hypotheses = vec![
        HypothesisCheck::required(
            "certificate valid",
            report.pass,
            report.failure.unwrap_or_default(),
        ),
        HypothesisCheck::required(
            "certificate rank matches set",
            r == set.rank(),
            format!("certificate rank {r}, set rank {}", set.rank()),
        ),
    ];
    let lhs = certified_l1(&indicator_poly(set)?, rel_err, budget)?;
    let constant = c.powi(r as i32);
    let rhs = constant * log_product(&profile.sizes);
    Ok(InequalityVerdict::new("multidim", lhs, rhs, constant, hypotheses))
}

/// Description of `F = sum_{k in I} f_k(t) e(d2 k t)` and the class `I(q; s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainPropInput {
    pub blocks: BTreeMap<i64, TrigPoly>,
    pub d1: i64,
    pub d2: i64,
    pub delta: f64,
    pub q: i64,
    pub s: i64,
}

impl MainPropInput {
    /// Assembles `F` from its blocks.
    pub fn assemble(&self) -> Result<TrigPoly> {
        let mut f = TrigPoly::zero(1);
        for (&k, fk) in &self.blocks {
            let shift = k
                .checked_mul(self.d2)
                .ok_or_else(|| Error::Overflow("k d2".into()))?;
            f = f.add(&fk.translate(&[shift])?)?;
        }
        Ok(f)
    }

    /// Splits a rank-1 polynomial into blocks around multiples of `d2`.
    pub fn from_poly(f: &TrigPoly, d1: i64, d2: i64, delta: f64, q: i64, s: i64) -> Result<Self> {
        let index = block_index(f, d1, d2)?;
        let mut blocks = BTreeMap::new();
        for k in index.iter() {
            let part = f.filter(|n| (n[0] - k * d2).abs() <= d1);
            blocks.insert(k, part.translate(&[-k * d2])?);
        }
        Ok(MainPropInput {
            blocks,
            d1,
            d2,
            delta,
            q,
            s,
        })
    }
}

/// One surviving block `k_j = b q + s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainPropTerm {
    pub j: usize,
    pub k: i64,
    pub b: i64,
    pub norm: NormInterval,
    /// `C / (2j) - 2 pi d1 / (q d2)`, reported raw (may be negative).
    pub bracket: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainPropReport {
    /// `rhs` uses, term by term, the norm endpoint that makes it largest.
    pub verdict: InequalityVerdict,
    /// Right side with every block norm replaced by its lower end.
    pub rhs_lower: f64,
    pub j_count: usize,
    pub terms: Vec<MainPropTerm>,
    /// `32 pi (2 + ln(1 + 2/delta))`.
    pub thinning_factor: f64,
    /// Enclosure of `‖sum_j f_{k_j} e(k_j d2 t)‖₁`.
    pub thinned_norm: NormInterval,
    /// Enclosure of the sampled term `T_1`.
    pub t1: [f64; 2],
    /// Midpoint-rule estimate of the variation term `T_2`.
    pub t2_estimate: f64,
    /// `(2 pi d1 / (q d2)) sum_j hi(‖f_{k_j}‖₁)`.
    pub t2_bound: f64,
}

/// Checks
/// `‖F‖₁ >= (1 / (32 pi (2 + ln(1 + 2/δ)))) sum_j ‖f_{k_j}‖₁ (C/(2j) - 2 pi d1/(q d2))`
/// and reports the split of the thinned norm into the sampled term `T_1`
/// and the variation term `T_2`.
pub fn verify_main_prop(
    input: &MainPropInput,
    c: f64,
    rel_err: f64,
    budget: GridBudget,
) -> Result<MainPropReport> {
    let MainPropInput {
        d1, d2, delta, q, s, ..
    } = *input;
    let max_degree = input
        .blocks
        .values()
        .map(|f| f.degree().first().copied().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let index = IntegerSet::from_iter_dedup(input.blocks.keys().copied());
    let filter = ResidueFilter::new(q, s)?;
    let kept = residue_filter(&index, filter);
    let hypotheses = vec![
        HypothesisCheck::required(
            "(2 + delta) d1 < d2",
            ((2.0 + delta) * d1 as f64) < d2 as f64,
            format!("(2 + delta) d1 = {}, d2 = {d2}", (2.0 + delta) * d1 as f64),
        ),
        HypothesisCheck::required("q > 4 pi", q as f64 > 4.0 * PI, format!("q = {q}")),
        HypothesisCheck::required(
            "I(q; s) nonempty",
            !kept.is_empty(),
            format!("|I(q; s)| = {}", kept.len()),
        ),
        HypothesisCheck::required(
            "deg f_k <= d1",
            max_degree as i64 <= d1 && d1 >= 1,
            format!("max degree {max_degree}, d1 = {d1}"),
        ),
        HypothesisCheck::required(
            "delta > 0",
            delta.is_finite() && delta > 0.0,
            format!("delta = {delta}"),
        ),
    ];
    if let Some(h) = hypotheses.iter().find(|h| !h.pass) {
        return Err(Error::Hypothesis {
            name: h.name.clone(),
            detail: h.detail.clone(),
        });
    }

    let big_f = input.assemble()?;
    let lhs = certified_l1(&big_f, rel_err, budget)?;
    let thinning_factor = crate::modulus::thinning_bound_factor(delta);
    let period = (q * d2) as f64;
    let err_term = 2.0 * PI * d1 as f64 / period;

    let mut terms = Vec::with_capacity(kept.len());
    for (idx, k) in kept.iter().enumerate() {
        let j = idx + 1;
        terms.push(MainPropTerm {
            j,
            k,
            b: (k - filter.s()).div_euclid(q),
            norm: certified_l1(&input.blocks[&k], rel_err, budget)?,
            bracket: c / (2.0 * j as f64) - err_term,
        });
    }
    let upper: Vec<f64> = terms
        .iter()
        .map(|t| t.bracket * if t.bracket >= 0.0 { t.norm.hi } else { t.norm.lo })
        .collect();
    let lower: Vec<f64> = terms
        .iter()
        .map(|t| t.bracket * if t.bracket >= 0.0 { t.norm.lo } else { t.norm.hi })
        .collect();
    let rhs = pairwise_sum(&upper) / thinning_factor;
    let rhs_lower = pairwise_sum(&lower) / thinning_factor;

    let thinned = kept.iter().try_fold(TrigPoly::zero(1), |acc, k| {
        acc.add(&input.blocks[&k].translate(&[k * d2])?)
    })?;
    let thinned_norm = certified_l1(&thinned, rel_err, budget)?;
    let t1 = sampled_term(input, &terms, rel_err, budget)?;
    let t2_estimate = variation_term(input, &terms);
    let t2_bound = err_term * terms.iter().map(|t| t.norm.hi).sum::<f64>();

    Ok(MainPropReport {
        verdict: InequalityVerdict::new("main-prop", lhs, rhs, c, hypotheses),
        rhs_lower,
        j_count: terms.len(),
        terms,
        thinning_factor,
        thinned_norm,
        t1,
        t2_estimate,
        t2_bound,
    })
}

/// `T_1 = (1/(q d2)) sum_m ‖ sum_j f_{k_j}(m/(q d2)) e(b_j u) ‖_{L^1(du)}`.
///
/// This is the grid mean of the rank-2 polynomial
/// `G(x, u) = sum_j f_{k_j}(x) e(b_j u)` with exactly `q d2` samples in `x`
/// and a certified grid in `u`.
fn sampled_term(
    input: &MainPropInput,
    terms: &[MainPropTerm],
    rel_err: f64,
    budget: GridBudget,
) -> Result<[f64; 2]> {
    let g = TrigPoly::new(
        2,
        terms.iter().flat_map(|t| {
            input.blocks[&t.k]
                .terms()
                .map(move |(n, c)| (vec![n[0], t.b], c))
                .collect::<Vec<_>>()
        }),
    )?;
    if g.is_zero() {
        return Ok([0.0, 0.0]);
    }
    let b_set = IntegerSet::from_iter_dedup(terms.iter().map(|t| t.b));
    let b_degree = b_set.diameter().div_ceil(2);
    let u_grid = grid_for(&[b_degree], rel_err)?[0];
    let period = (input.q * input.d2) as usize;
    let mean = riemann_l1(&g, &[period, u_grid], budget)?;
    let rho = 4.0 * PI * b_degree as f64 / u_grid as f64;
    Ok([mean / (1.0 + rho), mean / (1.0 - rho)])
}

/// Midpoint-rule estimate of
/// `T_2 = (1/(q d2)) sum_m int_0^1 |sum_j (f_j((m+v)/(q d2)) - f_j(m/(q d2))) e(b_j v)| dv`.
fn variation_term(input: &MainPropInput, terms: &[MainPropTerm]) -> f64 {
    let period = (input.q * input.d2) as usize;
    let b_max = terms.iter().map(|t| t.b.unsigned_abs()).max().unwrap_or(0) as usize;
    let nodes = (8 * (b_max + 1)).clamp(16, 256);
    let per_cell: Vec<f64> = (0..period)
        .into_par_iter()
        .map(|m| {
            let x0 = m as f64 / period as f64;
            let base: Vec<Complex64> = terms
                .iter()
                .map(|t| input.blocks[&t.k].evaluate(&[x0]))
                .collect();
            let samples: Vec<f64> = (0..nodes)
                .map(|i| {
                    let v = (i as f64 + 0.5) / nodes as f64;
                    let x = x0 + v / period as f64;
                    terms
                        .iter()
                        .zip(&base)
                        .map(|(t, &f0)| {
                            (input.blocks[&t.k].evaluate(&[x]) - f0) * char_e(t.b as f64 * v)
                        })
                        .sum::<Complex64>()
                        .norm()
                })
                .collect();
            pairwise_sum(&samples) / nodes as f64
        })
        .collect();
    pairwise_sum(&per_cell) / period as f64
}

/// Which constant the structured-integer bound is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ConstantMode {
    /// `C_MPS^r (2^9 pi)^{-r} prod_j (2 + ln(1 + 2/δ_j))^{-1}`.
    Derived { c_mps: f64 },
    /// `c^r`, with `c` estimated from a constant scan.
    Empirical { c: f64 },
}

impl ConstantMode {
    fn base(&self) -> f64 {
        match *self {
            ConstantMode::Derived { c_mps } => c_mps,
            ConstantMode::Empirical { c } => c,
        }
    }

    /// The constant multiplying `log(n_1) ... log(n_r)`.
    pub fn constant(&self, deltas: &[f64]) -> f64 {
        let r = deltas.len() + 1;
        match *self {
            ConstantMode::Derived { c_mps } => {
                let delta_factor: f64 = deltas
                    .iter()
                    .map(|d| 1.0 / (2.0 + (1.0 + 2.0 / d).ln()))
                    .product();
                c_mps.powi(r as i32) * (512.0 * PI).powi(-(r as i32)) * delta_factor
            }
            ConstantMode::Empirical { c } => c.powi(r as i32),
        }
    }
}

/// `n_i >= pi^3 2^21 C^e prod_{j >= i} (ln n_j)^3`, for each `i`.
fn size_hypothesis(sizes: &[usize], c: f64, exponent: i32) -> (bool, String) {
    let scale = PI.powi(3) * 2f64.powi(21) * c.powi(exponent);
    let mut worst = String::new();
    let mut ok = true;
    for i in 0..sizes.len() {
        let need = scale * sizes[i..].iter().map(|&n| (n as f64).ln().powi(3)).product::<f64>();
        if (sizes[i] as f64) < need {
            ok = false;
            if worst.is_empty() {
                worst = format!("n_{} = {} < {need:.3e}", i + 1, sizes[i]);
            }
        }
    }
    (ok, if ok { "all levels large enough".into() } else { worst })
}

/// `‖F‖₁ >= C_{δ} log(n_1) ... log(n_r)` for a certified
/// `(δ; n)`-strongly `r`-dimensional integer set.
///
/// The size hypothesis on the `n_i` is checked as stated (with `C^3`); the
/// reading with `C^{-3}` is reported alongside for information.
pub fn verify_multidimz(
    set: &IntegerSet,
    cert: &DimCertificate,
    mode: ConstantMode,
    rel_err: f64,
    budget: GridBudget,
) -> Result<InequalityVerdict> {
    let report = validate_integer_certificate(set, cert);
    let profile = cert.profile();
    if profile.sizes.len() == 1 {
        let mut v = verify_mps(&indicator_poly(set)?, mode.base(), rel_err, budget)?;
        v.theorem = "multidimz".into();
        v.hypotheses.push(HypothesisCheck::required(
            "certificate valid",
            report.pass,
            report.failure.unwrap_or_default(),
        ));
        return Ok(InequalityVerdict::new(
            "multidimz",
            v.lhs,
            v.rhs,
            v.constant_used,
            v.hypotheses,
        ));
    }
    let (size_ok, size_detail) = size_hypothesis(&profile.sizes, mode.base(), 3);
    let (alt_ok, alt_detail) = size_hypothesis(&profile.sizes, mode.base(), -3);
    let hypotheses = vec![
        HypothesisCheck::required(
            "certificate valid",
            report.pass,
            report.failure.unwrap_or_default(),
        ),
        HypothesisCheck::required("n_i >= pi^3 2^21 C^3 prod (log n_j)^3", size_ok, size_detail),
        HypothesisCheck::informational(
            "n_i >= pi^3 2^21 C^-3 prod (log n_j)^3",
            alt_ok,
            alt_detail,
        ),
    ];
    let lhs = certified_l1(&indicator_poly(set)?, rel_err, budget)?;
    let constant = mode.constant(&profile.deltas);
    let rhs = constant * log_product(&profile.sizes);
    Ok(InequalityVerdict::new("multidimz", lhs, rhs, constant, hypotheses))
}

/// Families of instances for constant scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `{1..n}` for each `n` in `from..=to`.
    Intervals { from: usize, to: usize },
    /// Rank-2 progressions `{a m + b n}`, each given as `[a, b, M, N]`.
    Gaps { params: Vec<[i64; 4]> },
    /// `count` sets of `size` distinct integers from `[0, span)`.
    RandomSets {
        count: usize,
        size: usize,
        span: usize,
        seed: u64,
    },
    /// The single set `{0}`.
    Singleton,
    /// Lattice boxes `{1..n_1} x ... x {1..n_r}`.
    LatticeBoxes { sizes: Vec<Vec<usize>> },
    /// Strongly `r`-dimensional integer sets.
    IntegerStructures { specs: Vec<IntegerSpec> },
}

/// Which right side a scan divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// `sum |u_j| / j`.
    Mps,
    /// `prod log n_i` from a lattice certificate.
    Multidim,
    /// `prod log n_i` from an integer certificate.
    Multidimz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub label: String,
    pub size: usize,
    pub lhs_lo: f64,
    pub lhs_hi: f64,
    pub rhs_unit: f64,
    /// `lhs_lo / rhs_unit`; absent when the right side vanishes.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub mode: ScanMode,
    pub rel_err: f64,
    pub rows: Vec<ScanRow>,
    pub min: Option<f64>,
    pub median: Option<f64>,
}

struct Instance {
    label: String,
    size: usize,
    poly: TrigPoly,
    rhs_unit: f64,
}

fn instances(family: &Family, mode: ScanMode) -> Result<Vec<Instance>> {
    let one_d = |label: String, set: IntegerSet| -> Result<Instance> {
        let poly = indicator_poly(&set)?;
        Ok(Instance {
            label,
            size: set.len(),
            rhs_unit: mps_rhs(&poly.coefficients()),
            poly,
        })
    };
    let needs = |wanted: &[ScanMode]| {
        if wanted.contains(&mode) {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "family {family:?} cannot be scanned in mode {mode:?}"
            )))
        }
    };
    match family {
        Family::Intervals { from, to } => {
            needs(&[ScanMode::Mps])?;
            (*from..=*to)
                .map(|n| one_d(format!("interval:{n}"), IntegerSet::interval(1, n as i64)))
                .collect()
        }
        Family::Gaps { params } => {
            needs(&[ScanMode::Mps])?;
            params
                .iter()
                .map(|&[a, b, m, n]| {
                    one_d(format!("gap:{a},{b},{m},{n}"), gap_rank2(a, b, m, n, false)?)
                })
                .collect()
        }
        Family::RandomSets {
            count,
            size,
            span,
            seed,
        } => {
            needs(&[ScanMode::Mps])?;
            if size > span {
                return Err(Error::Parameter("random set larger than its range".into()));
            }
            let mut rng = seeded(*seed);
            (0..*count)
                .map(|i| {
                    let set = IntegerSet::new(distinct_in(&mut rng, *size, 0, *span))?;
                    one_d(format!("random:{seed}:{i}"), set)
                })
                .collect()
        }
        Family::Singleton => {
            needs(&[ScanMode::Mps])?;
            Ok(vec![one_d("singleton".into(), IntegerSet::interval(0, 0))?])
        }
        Family::LatticeBoxes { sizes } => {
            needs(&[ScanMode::Multidim])?;
            sizes
                .iter()
                .map(|s| {
                    let (set, cert) = build_strong_lattice(s, Shape::Box, 0)?;
                    Ok(Instance {
                        label: format!("box:{s:?}"),
                        size: set.len(),
                        poly: indicator_poly(&set)?,
                        rhs_unit: log_product(&cert.profile().sizes),
                    })
                })
                .collect()
        }
        Family::IntegerStructures { specs } => {
            needs(&[ScanMode::Multidimz])?;
            specs
                .iter()
                .map(|spec| {
                    let (set, cert) = build_strong_integer(spec)?;
                    Ok(Instance {
                        label: format!(
                            "zstrong:{:?}:{:?}:{:?}:{}",
                            spec.deltas, spec.sizes, spec.shape, spec.seed
                        ),
                        size: set.len(),
                        poly: indicator_poly(&set)?,
                        rhs_unit: log_product(&cert.profile().sizes),
                    })
                })
                .collect()
        }
    }
}

/// Ratio `lo(‖F‖₁) / rhs` for every instance of a family, where `rhs` is the
/// inequality's right side without its constant. The minimum ratio is an
/// empirical value for the constant.
pub fn constant_scan(
    family: &Family,
    mode: ScanMode,
    rel_err: f64,
    budget: GridBudget,
) -> Result<ScanReport> {
    let inst = instances(family, mode)?;
    let rows = inst
        .par_iter()
        .map(|i| {
            let norm = certified_l1(&i.poly, rel_err, budget)?;
            Ok(ScanRow {
                label: i.label.clone(),
                size: i.size,
                lhs_lo: norm.lo,
                lhs_hi: norm.hi,
                rhs_unit: i.rhs_unit,
                ratio: (i.rhs_unit > 0.0).then(|| norm.lo / i.rhs_unit),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let min = ratios.first().copied();
    let median = if ratios.is_empty() {
        None
    } else {
        let mid = ratios.len() / 2;
        Some(if ratios.len() % 2 == 1 {
            ratios[mid]
        } else {
            0.5 * (ratios[mid - 1] + ratios[mid])
        })
    };
    Ok(ScanReport {
        mode,
        rel_err,
        rows,
        min,
        median,
    })
}
