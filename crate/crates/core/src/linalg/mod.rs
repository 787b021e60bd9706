//! Numerical kernels: sparse SPD factorization, GMRES, dense eigenvalues and SVD.

pub mod cholesky;
pub mod eigen;
pub mod gmres;
pub mod svd;

pub use cholesky::{poisson_solve, spd_factorize, SpdFactorization};
pub use eigen::{dense_eigenvalues, symmetric_eigenvalues, Complex};

use crate::dense::DenseMatrix;
use crate::sparse::CsrMatrix;

/// A square linear map applied out of place.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.nrows(), self.ncols());
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y);
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        assert!(self.is_square());
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = crate::math::dot(self.row(i), x);
        }
    }
}

/// The identity of a given dimension.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

/// Materializes an operator column by column.
pub fn to_dense<Op: LinearOperator + ?Sized>(op: &Op) -> DenseMatrix {
    let n = op.dim();
    let mut m = DenseMatrix::zeros(n, n);
    let mut e = alloc::vec![0.0; n];
    let mut col = alloc::vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}
