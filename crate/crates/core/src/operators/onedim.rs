//! One-dimensional integer building blocks of the 2-D operators.
//!
//! Dirichlet family for `n` cells: `T_D` (size `n-1`, tridiag(-1, 2, -1)),
//! `T_E` (size `n`, corner entries 3), `T_N` (size `n`, corner entries 1),
//! `E_0 = diag(1, 0, ..., 0, 1)` and the `n x (n-1)` difference matrix `B_D`.
//! Periodic family: the circulants `T_P` and `B_P` of size `n`.

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockFamily {
    Dirichlet,
    Periodic,
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum OneDBlocks {
    Dirichlet {
        t_d: CsrMatrix,
        t_e: CsrMatrix,
        t_n: CsrMatrix,
        e_0: CsrMatrix,
        b_d: CsrMatrix,
    },
    Periodic {
        t_p: CsrMatrix,
        b_p: CsrMatrix,
    },
}

pub fn build_1d_blocks(n: usize, family: BlockFamily) -> Result<OneDBlocks> {
    if n < 2 {
        return Err(Error::BlockSize(n));
    }
    Ok(match family {
        BlockFamily::Dirichlet => OneDBlocks::Dirichlet {
            t_d: tridiag(n - 1, 2.0, 2.0),
            t_e: tridiag(n, 3.0, 2.0),
            t_n: tridiag(n, 1.0, 2.0),
            e_0: e_0(n),
            b_d: b_d(n),
        },
        BlockFamily::Periodic => OneDBlocks::Periodic {
            t_p: t_p(n),
            b_p: b_p(n),
        },
    })
}

impl OneDBlocks {
    pub fn dirichlet(n: usize) -> Result<Self> {
        build_1d_blocks(n, BlockFamily::Dirichlet)
    }

    pub fn periodic(n: usize) -> Result<Self> {
        build_1d_blocks(n, BlockFamily::Periodic)
    }

    /// `(T_D, T_E, T_N, E_0, B_D)`; panics on the periodic family.
    pub fn dirichlet_parts(&self) -> (&CsrMatrix, &CsrMatrix, &CsrMatrix, &CsrMatrix, &CsrMatrix) {
        match self {
            OneDBlocks::Dirichlet {
                t_d,
                t_e,
                t_n,
                e_0,
                b_d,
            } => (t_d, t_e, t_n, e_0, b_d),
            OneDBlocks::Periodic { .. } => panic!("not a Dirichlet block family"),
        }
    }

    /// `(T_P, B_P)`; panics on the Dirichlet family.
    pub fn periodic_parts(&self) -> (&CsrMatrix, &CsrMatrix) {
        match self {
            OneDBlocks::Periodic { t_p, b_p } => (t_p, b_p),
            OneDBlocks::Dirichlet { .. } => panic!("not a periodic block family"),
        }
    }
}

/// tridiag(-1, 2, -1) with `corner` in the first and last diagonal slots.
fn tridiag(m: usize, corner: f64, diag: f64) -> CsrMatrix {
    let mut b = TripletBuilder::new(m, m);
    for k in 0..m {
        let d = if k == 0 || k + 1 == m { corner } else { diag };
        b.push(k, k, d);
        if k + 1 < m {
            b.push(k, k + 1, -1.0);
            b.push(k + 1, k, -1.0);
        }
    }
    b.build()
}

fn e_0(n: usize) -> CsrMatrix {
    let mut b = TripletBuilder::new(n, n);
    b.push(0, 0, 1.0);
    b.push(n - 1, n - 1, 1.0);
    b.build()
}

fn b_d(n: usize) -> CsrMatrix {
    let mut b = TripletBuilder::new(n, n - 1);
    for k in 0..n - 1 {
        b.push(k, k, -1.0);
        b.push(k + 1, k, 1.0);
    }
    b.build()
}

fn b_p(n: usize) -> CsrMatrix {
    let mut b = TripletBuilder::new(n, n);
    for k in 0..n {
        b.push(k, k, 1.0);
        b.push(k, (k + 1) % n, -1.0);
    }
    b.build()
}

fn t_p(n: usize) -> CsrMatrix {
    let mut b = TripletBuilder::new(n, n);
    for k in 0..n {
        b.push(k, k, 2.0);
        b.push(k, (k + 1) % n, -1.0);
        b.push(k, (k + n - 1) % n, -1.0);
    }
    b.build()
}
