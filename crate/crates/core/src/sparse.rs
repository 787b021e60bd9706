//! Compressed sparse row storage.
//!
//! Matrices are assembled from triplets; duplicates are summed and column
//! indices are sorted when the builder is finalized, so matvecs visit entries
//! in a fixed order. Entries are immutable after construction.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` triplets.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        assert!(
            row < self.nrows && col < self.ncols,
            "triplet out of bounds"
        );
        self.entries.push((row, col, value));
    }

    /// Sums duplicates and drops entries that cancel to exactly zero.
    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut rows = Vec::with_capacity(self.entries.len());
        for (r, c, v) in self.entries {
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.iter().zip(&col_idx).zip(&values) {
            if *v != 0.0 {
                row_ptr[r + 1] += 1;
                keep_cols.push(*c);
                keep_vals.push(*v);
            }
        }
        for k in 0..self.nrows {
            row_ptr[k + 1] += row_ptr[k];
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        TripletBuilder::new(nrows, ncols).build()
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut b = TripletBuilder::with_capacity(d.len(), d.len(), d.len());
        for (k, &v) in d.iter().enumerate() {
            b.push(k, k, v);
        }
        b.build()
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut b = TripletBuilder::new(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m.get(i, j);
                if v != 0.0 {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// `y = self * x`
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "matvec: x has wrong length");
        assert_eq!(y.len(), self.nrows, "matvec: y has wrong length");
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// `y += alpha * self * x`
    pub fn mul_vec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "matvec: x has wrong length");
        assert_eq!(y.len(), self.nrows, "matvec: y has wrong length");
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let s: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
            *yi += alpha * s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for (i, j, v) in self.triplets() {
            b.push(j, i, v);
        }
        b.build()
    }

    pub fn scaled(&self, alpha: f64) -> CsrMatrix {
        let mut m = self.clone();
        for v in m.values.iter_mut() {
            *v *= alpha;
        }
        if alpha == 0.0 {
            return CsrMatrix::zeros(self.nrows, self.ncols);
        }
        m
    }

    /// `alpha * self + beta * other`
    pub fn lin_comb(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for (i, j, v) in self.triplets() {
            b.push(i, j, alpha * v);
        }
        for (i, j, v) in other.triplets() {
            b.push(i, j, beta * v);
        }
        b.build()
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &CsrMatrix) -> CsrMatrix {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows, "matmul: inner dimensions differ");
        let mut b = TripletBuilder::new(self.nrows, other.ncols);
        let mut acc = vec![0.0; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&j, &bv) in ocols.iter().zip(ovals) {
                    if !mark[j] {
                        mark[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * bv;
                }
            }
            for &j in &touched {
                b.push(i, j, acc[j]);
                acc[j] = 0.0;
                mark[j] = false;
            }
            touched.clear();
        }
        b.build()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CsrMatrix) -> CsrMatrix {
        let mut b = TripletBuilder::with_capacity(
            self.nrows * other.nrows,
            self.ncols * other.ncols,
            self.nnz() * other.nnz(),
        );
        for (i, j, a) in self.triplets() {
            for (k, l, c) in other.triplets() {
                b.push(i * other.nrows + k, j * other.ncols + l, a * c);
            }
        }
        b.build()
    }

    /// Places blocks on the diagonal.
    pub fn block_diag(blocks: &[&CsrMatrix]) -> CsrMatrix {
        let nr: usize = blocks.iter().map(|b| b.nrows).sum();
        let nc: usize = blocks.iter().map(|b| b.ncols).sum();
        let mut b = TripletBuilder::new(nr, nc);
        let (mut r0, mut c0) = (0, 0);
        for blk in blocks {
            for (i, j, v) in blk.triplets() {
                b.push(r0 + i, c0 + j, v);
            }
            r0 += blk.nrows;
            c0 += blk.ncols;
        }
        b.build()
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&CsrMatrix]) -> CsrMatrix {
        let nc = blocks[0].ncols;
        let nr: usize = blocks.iter().map(|b| b.nrows).sum();
        let mut b = TripletBuilder::new(nr, nc);
        let mut r0 = 0;
        for blk in blocks {
            assert_eq!(blk.ncols, nc, "vstack: column counts differ");
            for (i, j, v) in blk.triplets() {
                b.push(r0 + i, j, v);
            }
            r0 += blk.nrows;
        }
        b.build()
    }

    /// Places matrices with equal row counts side by side.
    pub fn hstack(blocks: &[&CsrMatrix]) -> CsrMatrix {
        let nr = blocks[0].nrows;
        let nc: usize = blocks.iter().map(|b| b.ncols).sum();
        let mut b = TripletBuilder::new(nr, nc);
        let mut c0 = 0;
        for blk in blocks {
            assert_eq!(blk.nrows, nr, "hstack: row counts differ");
            for (i, j, v) in blk.triplets() {
                b.push(i, c0 + j, v);
            }
            c0 += blk.ncols;
        }
        b.build()
    }

    /// Extracts the rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> CsrMatrix {
        let mut b = TripletBuilder::new(r1 - r0, c1 - c0);
        for i in r0..r1 {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j >= c0 && j < c1 {
                    b.push(i - r0, j - c0, v);
                }
            }
        }
        b.build()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m.set(i, j, m.get(i, j) + v);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        math::norm_inf(&self.values)
    }

    /// Largest entrywise difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.sub(other).max_abs()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols && self.max_abs_diff(&self.transpose()) <= tol
    }

    /// Row sums, i.e. `self * ones`.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }
}
