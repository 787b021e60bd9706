//! Row-major dense matrices and the direct factorizations used at desk scale.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        DenseMatrix { nrows, ncols, data }
    }

    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        DenseMatrix { nrows, ncols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, cols: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| math::dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, other.nrows, "matmul: inner dimensions differ");
        let mut c = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            let crow = &mut c.data[i * other.ncols..(i + 1) * other.ncols];
            for k in 0..self.ncols {
                let a = self.data[i * self.ncols + k];
                if a == 0.0 {
                    continue;
                }
                math::axpy(a, other.row(k), crow);
            }
        }
        c
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= alpha);
        m
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        m
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        math::norm_inf(&self.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm2(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .sum()
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let mut m: f64 = 0.0;
        for i in 0..self.nrows {
            for j in 0..i {
                m = m.max(math::abs(self.get(i, j) - self.get(j, i)));
            }
        }
        m
    }

    pub fn symmetrized(&self) -> DenseMatrix {
        let mut m = self.clone();
        for i in 0..self.nrows {
            for j in 0..i {
                let a = 0.5 * (self.get(i, j) + self.get(j, i));
                m.set(i, j, a);
                m.set(j, i, a);
            }
        }
        m
    }

    /// Extracts rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> DenseMatrix {
        let mut b = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b.set(i - r0, j - c0, self.get(i, j));
            }
        }
        b
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl DenseLu {
    /// Factorizes a square matrix; exact zero pivots are reported as singular.
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        assert!(a.is_square());
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = math::abs(lu.get(k, k));
            for i in k + 1..n {
                let v = math::abs(lu.get(i, k));
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular(k));
            }
            if p != k {
                for j in 0..n {
                    let t = lu.get(k, j);
                    lu.set(k, j, lu.get(p, j));
                    lu.set(p, j, t);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu.get(k, k);
            for i in k + 1..n {
                let l = lu.get(i, k) / pivot;
                lu.set(i, k, l);
                if l != 0.0 {
                    for j in k + 1..n {
                        let v = lu.get(i, j) - l * lu.get(k, j);
                        lu.set(i, j, v);
                    }
                }
            }
        }
        Ok(DenseLu { lu, perm, sign })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.nrows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.lu.get(i, k) * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.lu.get(i, k) * x[k]).sum();
            x[i] = (x[i] - s) / self.lu.get(i, i);
        }
        x
    }

    pub fn determinant(&self) -> f64 {
        let n = self.lu.nrows();
        (0..n).fold(self.sign, |d, i| d * self.lu.get(i, i))
    }

    /// `ln|det|` and the sign of the determinant, for large matrices.
    pub fn log_abs_determinant(&self) -> (f64, f64) {
        let n = self.lu.nrows();
        let mut sign = self.sign;
        let mut log = 0.0;
        for i in 0..n {
            let d = self.lu.get(i, i);
            if d < 0.0 {
                sign = -sign;
            }
            log += math::ln(math::abs(d));
        }
        (log, sign)
    }
}

/// Dense Cholesky factor `A = L Lᵀ`, lower triangle stored.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    l: DenseMatrix,
}

impl DenseCholesky {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        assert!(a.is_square());
        let n = a.nrows();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let lj = &l.data[j * n..j * n + j];
            let d = a.get(j, j) - math::dot(lj, lj);
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j, value: d });
            }
            let djj = math::sqrt(d);
            l.set(j, j, djj);
            for i in j + 1..n {
                let s = math::dot(&l.data[i * n..i * n + j], &l.data[j * n..j * n + j]);
                l.set(i, j, (a.get(i, j) - s) / djj);
            }
        }
        Ok(DenseCholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.nrows();
        let mut y = b.to_vec();
        for i in 0..n {
            let s = math::dot(&self.l.row(i)[..i], &y[..i]);
            y[i] = (y[i] - s) / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = 0.0;
            for k in i + 1..n {
                s += self.l.get(k, i) * y[k];
            }
            y[i] = (y[i] - s) / self.l.get(i, i);
        }
        y
    }
}
