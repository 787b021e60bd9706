//! Envelope (skyline) Cholesky factorization of sparse SPD matrices.
//!
//! Semidefinite matrices whose kernel is spanned by block-wise constant
//! vectors are handled by pinning: the last index of every null block gets
//! its own diagonal entry added. For a right-hand side that is mean-zero on
//! every block the pinned solve followed by mean removal returns the same
//! vector as a solve with `K + (1/n) e eᵀ`, without destroying sparsity.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::math;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct SpdFactorization {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
    null_blocks: Vec<Range<usize>>,
}

/// Factorizes `a`; with `regularize_nullspace` the constant vector is taken
/// as the kernel.
pub fn spd_factorize(a: &CsrMatrix, regularize_nullspace: bool) -> Result<SpdFactorization> {
    let mut blocks = Vec::new();
    if regularize_nullspace {
        blocks.push(0..a.nrows());
    }
    SpdFactorization::with_null_blocks(a, &blocks)
}

impl SpdFactorization {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        Self::with_null_blocks(a, &[])
    }

    /// Factorization of a matrix whose kernel is spanned by the indicator
    /// vectors of `blocks`.
    pub fn with_null_blocks(a: &CsrMatrix, blocks: &[Range<usize>]) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let (cols, _) = a.row(i);
            if let Some(&c) = cols.first() {
                first[i] = first[i].min(c);
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; start[n]];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                if c <= i {
                    values[start[i] + c - first[i]] = v;
                }
            }
        }
        for b in blocks {
            assert!(b.start < b.end && b.end <= n, "null block out of range");
            let last = b.end - 1;
            let d = &mut values[start[last] + last - first[last]];
            *d += if *d != 0.0 { *d } else { 1.0 };
        }

        for i in 0..n {
            let fi = first[i];
            let ri = start[i];
            for j in fi..i {
                let fj = first[j];
                let rj = start[j];
                let k0 = fi.max(fj);
                let s = math::dot(
                    &values[ri + k0 - fi..ri + j - fi],
                    &values[rj + k0 - fj..rj + j - fj],
                );
                let ljj = values[rj + j - fj];
                values[ri + j - fi] = (values[ri + j - fi] - s) / ljj;
            }
            let row = &values[ri..ri + i - fi];
            let aii = values[ri + i - fi];
            let d = aii - math::dot(row, row);
            if !(d > 1e-12 * math::abs(aii)) {
                return Err(Error::NotPositiveDefinite { index: i, value: d });
            }
            values[ri + i - fi] = math::sqrt(d);
        }

        Ok(SpdFactorization {
            n,
            first,
            start,
            values,
            null_blocks: blocks.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn regularized(&self) -> bool {
        !self.null_blocks.is_empty()
    }

    pub fn null_blocks(&self) -> &[Range<usize>] {
        &self.null_blocks
    }

    /// Stored envelope entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    /// Solves `A x = b`. A regularized factorization rejects right-hand
    /// sides that are not mean-zero on every null block.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        for blk in &self.null_blocks {
            let part = &b[blk.clone()];
            let sum: f64 = part.iter().sum();
            let scale: f64 = part.iter().map(|v| math::abs(*v)).sum();
            if math::abs(sum) > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::IncompatibleRhs {
                    residual: sum / part.len() as f64,
                });
            }
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// Projects `b` onto the compatible subspace, solves, and returns the
    /// mean-zero (per null block) solution.
    pub fn solve_projected(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        self.project(&mut x);
        self.solve_in_place(&mut x);
        x
    }

    fn project(&self, x: &mut [f64]) {
        for blk in &self.null_blocks {
            math::remove_mean(&mut x[blk.clone()]);
        }
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.start[i];
            let s = math::dot(&self.values[ri..ri + i - fi], &x[fi..i]);
            x[i] = (x[i] - s) / self.values[ri + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let ri = self.start[i];
            x[i] /= self.values[ri + i - fi];
            let xi = x[i];
            if xi != 0.0 {
                for (xk, &l) in x[fi..i].iter_mut().zip(&self.values[ri..ri + i - fi]) {
                    *xk -= l * xi;
                }
            }
        }
        self.project(x);
    }
}

/// `(-L^c)^{-1} b` with the constant mode removed before and after.
pub fn poisson_solve(fac: &SpdFactorization, b: &[f64]) -> Vec<f64> {
    fac.solve_projected(b)
}
