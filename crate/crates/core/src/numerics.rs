//! Shared numeric plumbing: dense vectors and matrices, p-norms, index
//! sorting, and a seeded normal generator used by the other modules.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float as _;

/// Row-major dense matrix of 64-bit reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data of length `rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major flattening. Together with [`Matrix::from_vector`] this is a
    /// bijection between `rows x cols` matrices and vectors of length
    /// `rows * cols`; the round trip is bitwise exact.
    pub fn into_vector(self) -> Vec<f64> {
        self.data
    }

    /// Inverse of [`Matrix::into_vector`].
    pub fn from_vector(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self * x` for `x` of length `cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            out[i] = dot(self.row(i), x);
        }
        out
    }

    /// `selfᵀ * x` for `x` of length `rows`.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            let row = self.row(i);
            for j in 0..self.cols {
                out[j] += row[j] * xi;
            }
        }
        out
    }
}

/// A point in ℝⁿ or ℝ^{m×n}. The row-major flat view is the common currency
/// for inner products, convex combinations, and feasibility checks.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Vector(Vec<f64>),
    Matrix(Matrix),
}

impl Point {
    pub fn as_slice(&self) -> &[f64] {
        match self {
            Point::Vector(v) => v,
            Point::Matrix(m) => m.data(),
        }
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        match self {
            Point::Vector(v) => v,
            Point::Matrix(m) => m.data_mut(),
        }
    }

    /// Flat length.
    pub fn len(&self) -> usize {
        self.as_slice().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vector(&self) -> Option<&[f64]> {
        match self {
            Point::Vector(v) => Some(v),
            Point::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&Matrix> {
        match self {
            Point::Matrix(m) => Some(m),
            Point::Vector(_) => None,
        }
    }
}

pub(crate) fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Mathematical sign: `1` for positive, `-1` for negative, `0` at zero
/// (unlike `f64::signum`, which maps zero to one).
#[inline]
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain ℓ2 norm without input validation; hot-path helper.
pub fn norm_l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Plain ℓ∞ norm without input validation; hot-path helper.
pub fn norm_linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// ℓp norm for `p ∈ [1, +∞]` (pass `f64::INFINITY` for the max norm).
///
/// General exponents are evaluated on entries scaled by the max absolute
/// value so that large inputs do not overflow; `p ∈ {1, 2, ∞}` use the plain
/// sums.
pub fn norm_p(x: &[f64], p: f64) -> Result<f64> {
    if !all_finite(x) {
        return Err(Error::NonFinite("norm_p input"));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter("norm order p must satisfy p >= 1"));
    }
    if p == f64::INFINITY {
        return Ok(norm_linf(x));
    }
    if p == 1.0 {
        return Ok(x.iter().map(|v| v.abs()).sum());
    }
    if p == 2.0 {
        return Ok(norm_l2(x));
    }
    let scale = norm_linf(x);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = x.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    Ok(scale * sum.powf(1.0 / p))
}

/// Indices sorting `x` into descending order. The sort is stable, so ties
/// keep the smaller original index first.
pub fn argsort_desc(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].total_cmp(&x[a]));
    idx
}

/// Deterministic random generator; the same seed always yields the same
/// stream, independent of platform.
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// One standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// `n` iid standard normal draws.
    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.standard_normal()).collect()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random()
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: usize) -> usize {
        self.inner.random_range(0..bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_p_pythagorean() {
        assert_eq!(norm_p(&[3.0, 4.0], 2.0).unwrap(), 5.0);
    }

    #[test]
    fn norm_p_infinity_is_max_abs() {
        assert_eq!(norm_p(&[1.0, -2.0, 0.0], f64::INFINITY).unwrap(), 2.0);
    }

    #[test]
    fn norm_p_cubic() {
        let v = norm_p(&[1.0, 1.0, 1.0], 3.0).unwrap();
        assert!((v - 3.0_f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((v - 1.44225).abs() < 1e-5);
    }

    #[test]
    fn norm_p_rejects_non_finite() {
        assert_eq!(
            norm_p(&[1.0, f64::NAN], 2.0),
            Err(Error::NonFinite("norm_p input"))
        );
        assert!(norm_p(&[1.0], 0.5).is_err());
    }

    #[test]
    fn argsort_desc_basic() {
        assert_eq!(argsort_desc(&[0.1, 0.5, 0.2]), vec![1, 2, 0]);
    }

    #[test]
    fn argsort_desc_stable_ties() {
        assert_eq!(argsort_desc(&[7.0, 7.0, 7.0]), vec![0, 1, 2]);
        assert_eq!(argsort_desc(&[-1.0, 3.0, 0.0, 3.0]), vec![1, 3, 2, 0]);
    }

    #[test]
    fn reshape_round_trip() {
        let m = Matrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.clone().into_vector(), vec![1.0, 2.0, 3.0, 4.0]);
        let back = Matrix::from_vector(2, 2, m.clone().into_vector()).unwrap();
        assert_eq!(back, m);

        let one = Matrix::new(1, 1, vec![5.0]).unwrap();
        assert_eq!(one.into_vector(), vec![5.0]);
    }

    #[test]
    fn reshape_rejects_bad_length() {
        assert!(Matrix::from_vector(2, 2, vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn seeded_rng_is_deterministic() {
        let a = SeededRng::new(42).normal_vec(16);
        let b = SeededRng::new(42).normal_vec(16);
        assert_eq!(a, b);
        let c = SeededRng::new(43).normal_vec(16);
        assert_ne!(a, c);
    }

    #[test]
    fn matvec_and_transpose_agree() {
        let m = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.matvec(&[1.0, 0.0, -1.0]), vec![-2.0, -2.0]);
        let t = m.transpose();
        assert_eq!(t.matvec(&[1.0, 1.0]), m.tr_matvec(&[1.0, 1.0]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn norms_match_naive_sums(x in proptest::collection::vec(-1e3f64..1e3, 0..40)) {
                let n1: f64 = x.iter().map(|v| v.abs()).sum();
                let n2: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let ninf: f64 = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                prop_assert!((norm_p(&x, 1.0).unwrap() - n1).abs() <= 1e-12 * n1.max(1.0));
                prop_assert!((norm_p(&x, 2.0).unwrap() - n2).abs() <= 1e-12 * n2.max(1.0));
                prop_assert!((norm_p(&x, f64::INFINITY).unwrap() - ninf).abs() == 0.0);
            }

            #[test]
            fn argsort_is_a_permutation(x in proptest::collection::vec(-1e3f64..1e3, 0..50)) {
                let idx = argsort_desc(&x);
                let mut seen = alloc::vec![false; x.len()];
                for &i in &idx {
                    prop_assert!(!seen[i]);
                    seen[i] = true;
                }
                for w in idx.windows(2) {
                    prop_assert!(x[w[0]] >= x[w[1]]);
                }
            }

            #[test]
            fn reshape_round_trip_is_exact(
                rows in 1usize..6,
                cols in 1usize..6,
                seed in 0u64..1000,
            ) {
                let data = SeededRng::new(seed).normal_vec(rows * cols);
                let m = Matrix::new(rows, cols, data.clone()).unwrap();
                let flat = m.clone().into_vector();
                prop_assert_eq!(&flat, &data);
                prop_assert_eq!(Matrix::from_vector(rows, cols, flat).unwrap(), m);
            }
        }
    }
}
