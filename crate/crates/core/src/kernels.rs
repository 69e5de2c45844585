//! Dirichlet, Fejér and flat-top kernels.
//!
//! The flat-top kernel `K_{M,N}` is a finitely supported multiplier on the
//! integers which equals 1 on `|k| <= N`, vanishes for `|k| >= N + 2M`, and
//! whose Fourier transform factors as `(1/M) D_{N+M} F_{M-1}`. Its values are
//! kept as exact rationals so the plateau and support properties can be
//! checked with equality.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::pairwise_sum;

const SINGULAR: f64 = 1e-12;

/// Representative of `t` modulo 1 in `[-1/2, 1/2]`.
fn reduce(t: f64) -> f64 {
    t - t.round()
}

/// Dirichlet kernel `D_N(t) = sum_{|n| <= N} e(nt)`.
pub fn dirichlet(order: u64, t: f64) -> f64 {
    let x = reduce(t);
    let s = (PI * x).sin();
    if s.abs() < SINGULAR {
        return (2 * order + 1) as f64;
    }
    (PI * (2 * order + 1) as f64 * x).sin() / s
}

/// Fejér kernel `F_N(t) = sum_{|n| <= N} (1 - |n|/(N+1)) e(nt)`.
pub fn fejer(order: u64, t: f64) -> f64 {
    let x = reduce(t);
    let s = (PI * x).sin();
    let m = (order + 1) as f64;
    if s.abs() < SINGULAR {
        return m;
    }
    let r = (PI * m * x).sin() / s;
    r * r / m
}

/// The flat-top kernel `K_{M,N}` with its exact values on `|k| < N + 2M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTopKernel {
    m: i64,
    n: i64,
    values: BTreeMap<i64, Rational64>,
}

/// A failed exact property of a kernel table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelViolation {
    pub k: i64,
    pub value: String,
    pub property: &'static str,
}

impl FlatTopKernel {
    /// Evaluates the defining sum
    /// `K(k) = (1/M) sum_{|n| <= M-1, |n-k| <= N+M} (1 - |n|/M)`
    /// at every `k` of the support, in exact arithmetic.
    pub fn build(m: i64, n: i64) -> Result<Self> {
        if m < 2 || m >= n {
            return Err(Error::Parameter(format!(
                "flat-top kernel needs 2 <= M < N, got M={m}, N={n}"
            )));
        }
        let reach = n
            .checked_add(m)
            .ok_or_else(|| Error::Overflow("N + M".into()))?;
        let edge = reach
            .checked_add(m)
            .ok_or_else(|| Error::Overflow("N + 2M".into()))?;
        let denom = m
            .checked_mul(m)
            .ok_or_else(|| Error::Overflow("M^2".into()))?;

        let mut values = BTreeMap::new();
        for k in -(edge - 1)..=(edge - 1) {
            let lo = (-(m - 1)).max(k - reach);
            let hi = (m - 1).min(k + reach);
            // (1/M) * sum (1 - |n|/M) = (1/M^2) * sum (M - |n|)
            let numer: i64 = (lo..=hi).map(|j| m - j.abs()).sum();
            if numer != 0 {
                values.insert(k, Rational64::new(numer, denom));
            }
        }
        Ok(FlatTopKernel { m, n, values })
    }

    /// A kernel table with arbitrary values, for negative controls.
    pub fn from_values(m: i64, n: i64, values: BTreeMap<i64, Rational64>) -> Self {
        FlatTopKernel { m, n, values }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// `K(k)`; zero off the stored support.
    pub fn value(&self, k: i64) -> Rational64 {
        self.values.get(&k).copied().unwrap_or_else(Rational64::zero)
    }

    /// Stored `(k, K(k))` pairs in increasing `k`.
    pub fn values(&self) -> impl Iterator<Item = (i64, Rational64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    /// Smallest period `R` allowed by the discrete bound: `2N + 4M + 1`.
    pub fn min_period(&self) -> i64 {
        2 * self.n + 4 * self.m + 1
    }

    /// The value of `K` extended periodically with period `period`.
    ///
    /// Requires `period >= min_period()`, so at most one translate of the
    /// support meets any residue.
    pub fn periodic_value(&self, k: i64, period: i64) -> Rational64 {
        let r = k.rem_euclid(period);
        let centred = if r > period / 2 { r - period } else { r };
        self.value(centred)
    }

    /// Checks the plateau, support and range properties exactly.
    pub fn property_violations(&self) -> Vec<KernelViolation> {
        let mut out = Vec::new();
        let edge = self.n + 2 * self.m;
        let denom = self.m * self.m;
        for k in -self.n..=self.n {
            let v = self.value(k);
            if !v.is_one() {
                out.push(KernelViolation {
                    k,
                    value: v.to_string(),
                    property: "K(k) = 1 for |k| <= N",
                });
            }
        }
        for (&k, &v) in &self.values {
            if k.abs() >= edge && !v.is_zero() {
                out.push(KernelViolation {
                    k,
                    value: v.to_string(),
                    property: "K(k) = 0 for |k| >= N + 2M",
                });
            }
            if v < Rational64::zero() || v > Rational64::one() || denom % v.denom() != 0 {
                out.push(KernelViolation {
                    k,
                    value: v.to_string(),
                    property: "K(k) in [0, 1] with denominator dividing M^2",
                });
            }
        }
        out
    }
}

/// `(1/M) D_{N+M}(t) F_{M-1}(t)`, the Fourier transform of `K_{M,N}`
/// (real because the kernel is even).
pub fn flat_top_transform(kern: &FlatTopKernel, t: f64) -> f64 {
    let m = kern.m as u64;
    let n = kern.n as u64;
    dirichlet(n + m, t) * fejer(m - 1, t) / kern.m as f64
}

/// `(1/R) sum_{j=1}^{R} |K^(j/R)|`, computed from the stored values by one
/// length-`R` FFT of the periodized table.
pub fn flat_top_discrete_l1(kern: &FlatTopKernel, period: usize) -> Result<f64> {
    let need = kern.min_period();
    if (period as i64) < need {
        return Err(Error::hypothesis(
            "R >= 2N + 4M + 1",
            format!("R = {period}, need at least {need}"),
        ));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); period];
    for (k, v) in kern.values() {
        let idx = k.rem_euclid(period as i64) as usize;
        buf[idx] += Complex64::new(*v.numer() as f64 / *v.denom() as f64, 0.0);
    }
    // Inverse direction: sum_k c_k exp(+2 pi i k j / R).
    FftPlanner::new().plan_fft_inverse(period).process(&mut buf);
    let mags: Vec<f64> = buf.iter().map(|z| z.norm()).collect();
    Ok(pairwise_sum(&mags) / period as f64)
}

/// Right side of the discrete bound: `32 pi (2 + ln(1 + N/M))`.
pub fn discrete_l1_bound(m: i64, n: i64) -> f64 {
    32.0 * PI * (2.0 + (1.0 + n as f64 / m as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::char_e;

    fn dirichlet_sum(order: i64, t: f64) -> f64 {
        (-order..=order).map(|n| char_e(n as f64 * t)).sum::<Complex64>().re
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet(2, 0.0), 5.0);
        assert!((dirichlet(1, 0.5) + 1.0).abs() < 1e-12);
        assert!(dirichlet(1, 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(dirichlet(3, 7.0), 7.0);
    }

    #[test]
    fn fejer_examples() {
        assert_eq!(fejer(2, 0.0), 3.0);
        assert!(fejer(1, 0.5).abs() < 1e-12);
        // unit mean: the grid average of a degree-N polynomial is its constant term
        let n = 64;
        let mean: f64 = (0..n).map(|j| fejer(5, j as f64 / n as f64)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_sums() {
        for i in 0..200 {
            let t = (i as f64 * 0.618_033_988_7).fract();
            for order in [0u64, 1, 4, 17] {
                assert!((dirichlet(order, t) - dirichlet_sum(order as i64, t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn build_rejects_bad_parameters() {
        assert!(FlatTopKernel::build(1, 5).is_err());
        assert!(FlatTopKernel::build(5, 5).is_err());
        assert!(FlatTopKernel::build(6, 5).is_err());
    }

    #[test]
    fn small_kernel_values() {
        let k = FlatTopKernel::build(2, 5).unwrap();
        assert_eq!(k.value(3), Rational64::one());
        assert_eq!(k.value(9), Rational64::zero());
        assert_eq!(k.value(8), Rational64::new(1, 4));
        assert_eq!(k.value(-8), Rational64::new(1, 4));
        assert!(k.property_violations().is_empty());
    }

    #[test]
    fn corrupted_kernel_is_detected() {
        let good = FlatTopKernel::build(3, 7).unwrap();
        let mut values: BTreeMap<i64, Rational64> = good.values().collect();
        values.insert(2, Rational64::new(8, 9));
        values.insert(13, Rational64::new(1, 9));
        let bad = FlatTopKernel::from_values(3, 7, values);
        let v = bad.property_violations();
        assert!(v.iter().any(|x| x.k == 2));
        assert!(v.iter().any(|x| x.k == 13));
    }

    #[test]
    fn transform_at_zero_is_total_mass() {
        let k = FlatTopKernel::build(3, 10).unwrap();
        let mass: Rational64 = k.values().map(|(_, v)| v).sum();
        assert_eq!(mass, Rational64::from_integer(2 * (10 + 3) + 1));
        assert!((flat_top_transform(&k, 0.0) - 27.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_l1_requires_period() {
        let k = FlatTopKernel::build(2, 5).unwrap();
        assert!(matches!(
            flat_top_discrete_l1(&k, 18),
            Err(Error::Hypothesis { .. })
        ));
        let v = flat_top_discrete_l1(&k, 40).unwrap();
        assert!(v <= discrete_l1_bound(2, 5));
        assert!((discrete_l1_bound(2, 5) - 327.0).abs() < 0.1);
    }

    #[test]
    fn empty_kernel_has_zero_discrete_norm() {
        let k = FlatTopKernel::from_values(2, 5, BTreeMap::new());
        assert_eq!(flat_top_discrete_l1(&k, 40).unwrap(), 0.0);
    }

    #[test]
    fn periodic_extension() {
        let k = FlatTopKernel::build(2, 5).unwrap();
        assert_eq!(k.periodic_value(44 + 3, 44), Rational64::one());
        assert_eq!(k.periodic_value(-44 - 8, 44), Rational64::new(1, 4));
        assert_eq!(k.periodic_value(22, 44), Rational64::zero());
    }
}
