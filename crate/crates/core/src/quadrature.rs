//! Uniform-grid evaluation of trigonometric polynomials and certified
//! enclosures of their `L^1` norms.
//!
//! For a polynomial `f` of degree `d` on one axis, the grid mean
//! `S = (1/N) sum_j |f(j/N)|` satisfies `|‖f‖₁ - S| <= (4 pi d / N) ‖f‖₁`.
//! Writing `rho = 4 pi d / N < 1` this pins the norm inside
//! `[S / (1 + rho), S / (1 - rho)]`. On a multidimensional torus the bound is
//! applied one axis at a time, so the per-axis factors multiply.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{recentre, TrigPoly};
use crate::util::{next_smooth, pairwise_sum};

const SAMPLE_BYTES: u128 = std::mem::size_of::<Complex64>() as u128;

/// Memory budget for sample grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBudget {
    pub bytes: u64,
}

impl GridBudget {
    pub const DEFAULT_BYTES: u64 = 2 << 30;

    pub fn new(bytes: u64) -> Self {
        GridBudget { bytes }
    }

    fn check(&self, grid: &[usize]) -> Result<()> {
        let samples: u128 = grid.iter().map(|&n| n as u128).product();
        let bytes = samples * SAMPLE_BYTES;
        if bytes > self.bytes as u128 {
            return Err(Error::Resource {
                grid: grid.to_vec(),
                bytes,
                budget: self.bytes,
            });
        }
        Ok(())
    }
}

impl Default for GridBudget {
    fn default() -> Self {
        GridBudget {
            bytes: Self::DEFAULT_BYTES,
        }
    }
}

/// Samples `f(j_1/N_1, ..., j_r/N_r)` stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEvaluation {
    pub grid: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl GridEvaluation {
    /// Row-major position of the multi-index `j`.
    pub fn index(&self, j: &[usize]) -> usize {
        j.iter()
            .zip(&self.grid)
            .fold(0usize, |acc, (&ji, &n)| acc * n + ji)
    }

    /// Grid mean of `|f|`.
    pub fn mean_abs(&self) -> f64 {
        let mags: Vec<f64> = self.values.iter().map(|z| z.norm()).collect();
        pairwise_sum(&mags) / self.values.len() as f64
    }

    /// Grid mean of `|f|^2`.
    pub fn mean_square(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        pairwise_sum(&sq) / self.values.len() as f64
    }
}

/// A certified enclosure `lo <= ‖f‖₁ <= hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormInterval {
    pub lo: f64,
    pub hi: f64,
    /// The raw grid mean the enclosure was derived from.
    pub riemann: f64,
    pub grid: Vec<usize>,
    /// Per-axis degree after centring the support.
    pub degree: Vec<u64>,
    /// Per-axis `4 pi d_i / N_i`.
    pub axis_rel_err: Vec<f64>,
    /// `prod (1 + rho_i) - 1`.
    pub rel_err: f64,
    /// True when every axis has degree 0, so the grid mean is the norm.
    pub exact: bool,
}

impl NormInterval {
    /// The degenerate interval `[v, v]`.
    pub fn exact(value: f64, rank: usize) -> Self {
        NormInterval {
            lo: value,
            hi: value,
            riemann: value,
            grid: vec![1; rank],
            degree: vec![0; rank],
            axis_rel_err: vec![0.0; rank],
            rel_err: 0.0,
            exact: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &NormInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

struct AxisPlan {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
}

fn plans_for(grid: &[usize]) -> Vec<AxisPlan> {
    let mut planner = FftPlanner::new();
    grid.iter()
        .map(|&len| AxisPlan {
            len,
            // Inverse direction: sum_n c_n exp(+2 pi i n j / N).
            fft: planner.plan_fft_inverse(len),
        })
        .collect()
}

/// Per-axis `(lo, width)` of the support, and the alias check against `grid`.
fn layout(f: &TrigPoly, grid: &[usize]) -> Result<Vec<(i64, usize)>> {
    if grid.len() != f.rank() {
        return Err(Error::RankMismatch {
            rank: f.rank(),
            got: grid.len(),
            point: Vec::new(),
        });
    }
    if let Some(axis) = grid.iter().position(|&n| n == 0) {
        return Err(Error::Parameter(format!("grid axis {axis} has no samples")));
    }
    let bounds = f.support_bounds().unwrap_or_else(|| vec![(0, 0); f.rank()]);
    bounds
        .iter()
        .zip(grid)
        .enumerate()
        .map(|(axis, (&(lo, hi), &n))| {
            let diameter = hi.abs_diff(lo);
            let width = diameter as u128 + 1;
            if (n as u128) < width {
                return Err(Error::Aliasing {
                    axis,
                    got: n,
                    needed: width.min(usize::MAX as u128) as usize,
                    width: diameter,
                });
            }
            Ok((lo, width as usize))
        })
        .collect()
}

/// Dense row-major array of the coefficients over the support box.
fn dense_box(f: &TrigPoly, layout: &[(i64, usize)]) -> Vec<Complex64> {
    let total: usize = layout.iter().map(|&(_, w)| w).product();
    let mut dense = vec![Complex64::new(0.0, 0.0); total];
    for (freq, c) in f.terms() {
        let idx = freq
            .iter()
            .zip(layout)
            .fold(0usize, |acc, (&n, &(lo, w))| acc * w + (n - lo) as usize);
        dense[idx] = c;
    }
    dense
}

/// Writes the transform of one zero-padded coefficient line into `out`.
fn line_transform(
    coeffs: &[Complex64],
    lo: i64,
    plan: &AxisPlan,
    out: &mut [Complex64],
    scratch: &mut Vec<Complex64>,
) {
    out.fill(Complex64::new(0.0, 0.0));
    let n = plan.len as i64;
    let start = lo.rem_euclid(n) as usize;
    for (i, &c) in coeffs.iter().enumerate() {
        let idx = (start + i) % plan.len;
        out[idx] += c;
    }
    let need = plan.fft.get_inplace_scratch_len();
    if scratch.len() < need {
        scratch.resize(need, Complex64::new(0.0, 0.0));
    }
    plan.fft.process_with_scratch(out, &mut scratch[..need]);
}

/// `sum_j |f(j/N)|` over the whole grid without materializing it.
///
/// The last axis is transformed for every coefficient row of the support
/// box; each resulting column is then a rank-`r-1` problem with the same
/// small support, reduced independently. Column sums are combined in a
/// fixed order.
fn abs_sum(coeffs: &[Complex64], layout: &[(i64, usize)], plans: &[AxisPlan]) -> f64 {
    let rank = layout.len();
    let last = rank - 1;
    let (lo_last, w_last) = layout[last];
    let n_last = plans[last].len;
    if rank == 1 {
        let mut buf = vec![Complex64::new(0.0, 0.0); n_last];
        let mut scratch = Vec::new();
        line_transform(coeffs, lo_last, &plans[0], &mut buf, &mut scratch);
        let mags: Vec<f64> = buf.iter().map(|z| z.norm()).collect();
        return pairwise_sum(&mags);
    }
    let prefix: usize = layout[..last].iter().map(|&(_, w)| w).product();
    let mut rows = vec![Complex64::new(0.0, 0.0); prefix * n_last];
    rows.par_chunks_mut(n_last)
        .enumerate()
        .for_each_init(Vec::new, |scratch, (p, out)| {
            line_transform(
                &coeffs[p * w_last..(p + 1) * w_last],
                lo_last,
                &plans[last],
                out,
                scratch,
            )
        });
    let partial: Vec<f64> = (0..n_last)
        .into_par_iter()
        .map(|j| {
            let column: Vec<Complex64> = (0..prefix).map(|p| rows[p * n_last + j]).collect();
            abs_sum(&column, &layout[..last], &plans[..last])
        })
        .collect();
    pairwise_sum(&partial)
}

/// In-place transform of every line of `data` along `axis`.
fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, plan: &AxisPlan) {
    let stride: usize = shape[axis + 1..].iter().product();
    let len = shape[axis];
    if stride == 1 {
        data.par_chunks_mut(len)
            .for_each_init(Vec::new, |scratch: &mut Vec<Complex64>, line| {
                let need = plan.fft.get_inplace_scratch_len();
                scratch.resize(need, Complex64::new(0.0, 0.0));
                plan.fft.process_with_scratch(line, scratch);
            });
        return;
    }
    data.par_chunks_mut(len * stride).for_each(|block| {
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.fft.get_inplace_scratch_len()];
        for i in 0..stride {
            for (j, x) in line.iter_mut().enumerate() {
                *x = block[j * stride + i];
            }
            plan.fft.process_with_scratch(&mut line, &mut scratch);
            for (j, x) in line.iter().enumerate() {
                block[j * stride + i] = *x;
            }
        }
    });
}

/// Evaluates `f` on the full uniform grid `{ (j_1/N_1, ..., j_r/N_r) }`.
///
/// Coefficients are reduced modulo `N_i` into a zero-padded array and
/// transformed axis by axis. Each `N_i` must exceed the support diameter
/// on that axis.
pub fn eval_grid(f: &TrigPoly, grid: &[usize], budget: GridBudget) -> Result<GridEvaluation> {
    layout(f, grid)?;
    budget.check(grid)?;
    let total: usize = grid.iter().product();
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    for (freq, c) in f.terms() {
        let idx = freq
            .iter()
            .zip(grid)
            .fold(0usize, |acc, (&n, &len)| {
                acc * len + n.rem_euclid(len as i64) as usize
            });
        values[idx] += c;
    }
    let plans = plans_for(grid);
    for (axis, plan) in plans.iter().enumerate() {
        transform_axis(&mut values, grid, axis, plan);
    }
    Ok(GridEvaluation {
        grid: grid.to_vec(),
        values,
    })
}

/// The grid mean `(1/|grid|) sum_j |f(j/N)|`.
pub fn riemann_l1(f: &TrigPoly, grid: &[usize], budget: GridBudget) -> Result<f64> {
    let lay = layout(f, grid)?;
    budget.check(grid)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let dense = dense_box(f, &lay);
    let plans = plans_for(grid);
    let samples: f64 = grid.iter().map(|&n| n as f64).product();
    Ok(abs_sum(&dense, &lay, &plans) / samples)
}

/// Grid sizes reaching a compounded relative error `rel_err` for a
/// polynomial with the given centred degrees.
pub fn grid_for(degree: &[u64], rel_err: f64) -> Result<Vec<usize>> {
    if !(rel_err > 0.0 && rel_err < 1.0) {
        return Err(Error::Parameter(format!(
            "relative error must lie in (0, 1), got {rel_err}"
        )));
    }
    let active = degree.iter().filter(|&&d| d > 0).count();
    if active == 0 {
        return Ok(vec![1; degree.len()]);
    }
    let per_axis = (1.0 + rel_err).powf(1.0 / active as f64) - 1.0;
    degree
        .iter()
        .map(|&d| {
            if d == 0 {
                return Ok(1);
            }
            let need = (4.0 * PI * d as f64 / per_axis).ceil();
            if need > (usize::MAX / 2) as f64 {
                return Err(Error::Overflow(format!("grid size {need}")));
            }
            Ok(next_smooth((need as usize).max(2 * d as usize + 1)))
        })
        .collect()
}

/// Certified enclosure of `‖f‖₁` with compounded relative error at most
/// `rel_err`.
///
/// The polynomial is first centred, which leaves the norm unchanged and
/// minimizes the degree the error bound depends on. Grid sizes are rounded
/// up to 5-smooth lengths; the enclosure uses the sizes actually sampled.
pub fn certified_l1(f: &TrigPoly, rel_err: f64, budget: GridBudget) -> Result<NormInterval> {
    let (g, _) = recentre(f);
    let degree = g.degree();
    let grid = grid_for(&degree, rel_err)?;
    if g.is_zero() {
        return Ok(NormInterval::exact(0.0, f.rank()));
    }
    if degree.iter().all(|&d| d == 0) {
        let value = g.coefficients()[0].norm();
        return Ok(NormInterval::exact(value, f.rank()));
    }
    budget.check(&grid)?;
    let riemann = riemann_l1(&g, &grid, budget)?;
    let axis_rel_err: Vec<f64> = degree
        .iter()
        .zip(&grid)
        .map(|(&d, &n)| 4.0 * PI * d as f64 / n as f64)
        .collect();
    let up: f64 = axis_rel_err.iter().map(|r| 1.0 + r).product();
    let down: f64 = axis_rel_err.iter().map(|r| 1.0 - r).product();
    Ok(NormInterval {
        lo: riemann / up,
        hi: riemann / down,
        riemann,
        grid,
        degree,
        axis_rel_err,
        rel_err: up - 1.0,
        exact: false,
    })
}

/// Partial derivative along `axis` (0-based): `c_n -> 2 pi i n_axis c_n`.
pub fn derivative(f: &TrigPoly, axis: usize) -> Result<TrigPoly> {
    if axis >= f.rank() {
        return Err(Error::AxisOutOfRange {
            axis,
            rank: f.rank(),
        });
    }
    Ok(f.map_coefficients(|freq, c| c * Complex64::new(0.0, 2.0 * PI * freq[axis] as f64)))
}

/// Outcome of checking `‖f'‖₁ <= 2 pi d ‖f‖₁` with certified norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub degree: u64,
    /// Enclosure of `‖f'‖₁`.
    pub lhs: NormInterval,
    /// Enclosure of `‖f‖₁`.
    pub norm: NormInterval,
    /// `2 pi d` times the upper end of `norm`.
    pub rhs_bound: f64,
    pub pass: bool,
}

/// Bernstein's inequality for a rank-1 polynomial of degree `d = max |n|`.
pub fn bernstein_check(f: &TrigPoly, rel_err: f64, budget: GridBudget) -> Result<BernsteinReport> {
    if f.rank() != 1 {
        return Err(Error::Parameter(format!(
            "Bernstein check needs rank 1, got {}",
            f.rank()
        )));
    }
    let degree = f.degree()[0];
    let df = derivative(f, 0)?;
    let lhs = certified_l1(&df, rel_err, budget)?;
    let norm = certified_l1(f, rel_err, budget)?;
    let rhs_bound = 2.0 * PI * degree as f64 * norm.hi;
    // Monomials attain equality; allow for rounding in the two exact norms.
    Ok(BernsteinReport {
        degree,
        pass: lhs.lo <= rhs_bound * (1.0 + 8.0 * f64::EPSILON),
        lhs,
        norm,
        rhs_bound,
    })
}
