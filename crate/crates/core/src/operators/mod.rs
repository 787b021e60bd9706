//! Discrete Stokes operators on the MAC grid.

pub mod identities;
pub mod kron;
pub mod onedim;
pub mod stencil;

use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::grid::{BlockVector, BoundaryKind, GridSpec};
use crate::linalg::LinearOperator;
use crate::sparse::CsrMatrix;

pub use onedim::{build_1d_blocks, BlockFamily, OneDBlocks};

/// Physical parameters of one backward-Euler step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub rho: f64,
    pub mu: f64,
    pub dt: f64,
    pub steady: bool,
}

impl ProblemParams {
    /// `rho == 0` selects the steady system.
    pub fn new(rho: f64, mu: f64, dt: f64) -> Result<Self> {
        let p = ProblemParams {
            rho,
            mu,
            dt,
            steady: rho == 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn steady(mu: f64) -> Result<Self> {
        let p = ProblemParams {
            rho: 0.0,
            mu,
            dt: 1.0,
            steady: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// Scaled unsteady system `A = I - eps2 L`, i.e. `rho = dt = 1`, `mu = eps2`.
    /// `eps2 = 0` is the degenerate case `A = I`.
    pub fn scaled(eps2: f64) -> Result<Self> {
        let p = ProblemParams {
            rho: 1.0,
            mu: eps2,
            dt: 1.0,
            steady: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.rho.is_finite() && self.mu.is_finite() && self.dt.is_finite();
        if !finite {
            return Err(Error::InvalidParams("parameters must be finite"));
        }
        if self.rho < 0.0 {
            return Err(Error::InvalidParams("rho must be non-negative"));
        }
        if self.mu < 0.0 {
            return Err(Error::InvalidParams("mu must be non-negative"));
        }
        if self.steady {
            if self.mu <= 0.0 {
                return Err(Error::InvalidParams("steady flow needs mu > 0"));
            }
        } else {
            if self.dt <= 0.0 {
                return Err(Error::InvalidParams("dt must be positive"));
            }
            if self.rho <= 0.0 {
                return Err(Error::InvalidParams("unsteady flow needs rho > 0"));
            }
        }
        Ok(())
    }

    /// Coefficient of the identity in `A`: `rho/dt`, or 0 when steady.
    pub fn reaction(&self) -> f64 {
        if self.steady {
            0.0
        } else {
            self.rho / self.dt
        }
    }

    /// `mu dt / rho`, the scaled viscosity; `None` when steady.
    pub fn eps2(&self) -> Option<f64> {
        (!self.steady).then(|| self.mu * self.dt / self.rho)
    }
}

pub fn assemble_gradient(spec: &GridSpec) -> CsrMatrix {
    stencil::gradient(spec)
}

pub fn assemble_divergence(spec: &GridSpec) -> CsrMatrix {
    stencil::divergence(spec)
}

/// The vector Laplacian `L` (negative semidefinite).
pub fn assemble_velocity_laplacian(spec: &GridSpec) -> CsrMatrix {
    stencil::velocity_laplacian(spec)
}

/// The pressure Laplacian `L^c` (negative semidefinite, constants in its kernel).
pub fn assemble_pressure_laplacian(spec: &GridSpec) -> CsrMatrix {
    stencil::pressure_laplacian(spec)
}

/// `A = (rho/dt) I - mu L`, or `-mu L` when steady.
pub fn assemble_momentum(spec: &GridSpec, params: &ProblemParams) -> Result<CsrMatrix> {
    params.validate()?;
    let l = assemble_velocity_laplacian(spec);
    Ok(momentum_from_laplacian(&l, params))
}

fn momentum_from_laplacian(l: &CsrMatrix, params: &ProblemParams) -> CsrMatrix {
    let eye = CsrMatrix::identity(l.nrows());
    eye.lin_comb(params.reaction(), l, -params.mu)
}

/// All assembled blocks for one grid and parameter set.
#[derive(Debug, Clone)]
pub struct StokesOperators {
    pub spec: GridSpec,
    pub params: ProblemParams,
    pub l: CsrMatrix,
    pub g: CsrMatrix,
    pub d: CsrMatrix,
    pub lc: CsrMatrix,
    pub a: CsrMatrix,
}

impl StokesOperators {
    pub fn assemble(spec: &GridSpec, params: &ProblemParams) -> Result<Self> {
        params.validate()?;
        let l = assemble_velocity_laplacian(spec);
        let a = momentum_from_laplacian(&l, params);
        Ok(StokesOperators {
            spec: *spec,
            params: *params,
            g: assemble_gradient(spec),
            d: assemble_divergence(spec),
            lc: assemble_pressure_laplacian(spec),
            l,
            a,
        })
    }

    /// True when `A` is singular: steady flow with both directions periodic.
    pub fn momentum_singular(&self) -> bool {
        self.params.steady && self.spec.bc == BoundaryKind::PeriodicAll
    }

    pub fn saddle(&self) -> SaddleOperator<'_> {
        SaddleOperator { ops: self }
    }

    /// `(A + G D) G`, i.e. `(A - G G*) G` with `G* = -D`.
    pub fn commutator(&self) -> CsrMatrix {
        let gd = self.g.matmul(&self.d);
        self.a.add(&gd).matmul(&self.g)
    }
}

/// `M = [[A, G], [-D, 0]]`.
pub fn assemble_saddle(spec: &GridSpec, params: &ProblemParams) -> Result<StokesOperators> {
    StokesOperators::assemble(spec, params)
}

/// `(A + G D) G` for the given parameters.
pub fn commutator_matrix(spec: &GridSpec, params: &ProblemParams) -> Result<CsrMatrix> {
    Ok(StokesOperators::assemble(spec, params)?.commutator())
}

/// Matrix-free view of the saddle-point operator.
#[derive(Debug, Clone, Copy)]
pub struct SaddleOperator<'a> {
    ops: &'a StokesOperators,
}

impl SaddleOperator<'_> {
    pub fn apply_block(&self, x: &BlockVector) -> BlockVector {
        let mut y = BlockVector::zeros(x.layout());
        self.apply(x.as_slice(), y.as_mut_slice());
        y
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let ops = self.ops;
        let nv = ops.a.nrows();
        let np = ops.lc.nrows();
        let mut m = DenseMatrix::zeros(nv + np, nv + np);
        for (i, j, v) in ops.a.triplets() {
            m.set(i, j, v);
        }
        for (i, j, v) in ops.g.triplets() {
            m.set(i, nv + j, v);
        }
        for (i, j, v) in ops.d.triplets() {
            m.set(nv + i, j, -v);
        }
        m
    }
}

impl LinearOperator for SaddleOperator<'_> {
    fn dim(&self) -> usize {
        self.ops.a.nrows() + self.ops.lc.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nv = self.ops.a.nrows();
        let (xu, xp) = x.split_at(nv);
        let (yu, yp) = y.split_at_mut(nv);
        self.ops.a.mul_vec_into(xu, yu);
        self.ops.g.mul_vec_add(1.0, xp, yu);
        self.ops.d.mul_vec_into(xu, yp);
        yp.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Row indices of `(A + G D) G` that are not identically zero.
pub fn nonzero_rows(m: &CsrMatrix) -> Vec<usize> {
    (0..m.nrows())
        .filter(|&i| m.row(i).1.iter().any(|&v| v != 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::grid::Field;
    use crate::linalg::svd::numerical_rank;

    fn grids() -> impl Iterator<Item = GridSpec> {
        BoundaryKind::ALL
            .into_iter()
            .flat_map(|bc| (2..=8).map(move |n| GridSpec::square(n, n, 1.0, bc).unwrap()))
    }

    #[test]
    fn adjointness_and_pressure_laplacian() {
        for spec in grids() {
            let g = assemble_gradient(&spec);
            let d = assemble_divergence(&spec);
            let lc = assemble_pressure_laplacian(&spec);
            assert_eq!(d.max_abs_diff(&g.transpose().scaled(-1.0)), 0.0, "{spec:?}");
            assert_eq!(d.matmul(&g).max_abs_diff(&lc), 0.0, "{spec:?}");
            assert!(lc.row_sums().iter().all(|&s| s == 0.0));
        }
    }

    #[test]
    fn kronecker_path_matches_stencil_walk() {
        for spec in grids() {
            let (neg_l, g_adj) = kron::negative_laplacian_and_adjoint_gradient(&spec).unwrap();
            let l = assemble_velocity_laplacian(&spec);
            assert_eq!(neg_l.max_abs_diff(&l.scaled(-1.0)), 0.0, "{spec:?}");
            assert_eq!(
                g_adj.max_abs_diff(&assemble_divergence(&spec).scaled(-1.0)),
                0.0
            );
        }
        let spec = GridSpec::square(5, 3, 0.25, BoundaryKind::PeriodicXDirichletY).unwrap();
        let (neg_l, _) = kron::negative_laplacian_and_adjoint_gradient(&spec).unwrap();
        let diff = neg_l.max_abs_diff(&assemble_velocity_laplacian(&spec).scaled(-1.0));
        assert!(diff < 1e-12);
    }

    #[test]
    fn two_by_two_dirichlet_blocks() {
        let spec = GridSpec::square(2, 2, 1.0, BoundaryKind::DirichletAll).unwrap();
        let neg_l = assemble_velocity_laplacian(&spec).scaled(-1.0).to_dense();
        assert_eq!(
            neg_l.block(0, 2, 0, 2),
            DenseMatrix::from_rows(&[&[5.0, -1.0], &[-1.0, 5.0]])
        );
        let g = assemble_gradient(&spec);
        assert_eq!((g.nrows(), g.ncols()), (4, 4));
        let d = assemble_divergence(&spec);
        let dt = d.transpose();
        for c in 0..4 {
            let (_, vals) = dt.row(c);
            assert_eq!(vals.len(), 2);
            assert!(vals.iter().all(|v| v.abs() == 1.0));
        }
        // -Lc = I ⊗ T_N + T_N ⊗ I with T_N(2) = [[1,-1],[-1,1]]
        let neg_lc = assemble_pressure_laplacian(&spec).scaled(-1.0).to_dense();
        let expected = DenseMatrix::from_rows(&[
            &[2.0, -1.0, -1.0, 0.0],
            &[-1.0, 2.0, 0.0, -1.0],
            &[-1.0, 0.0, 2.0, -1.0],
            &[0.0, -1.0, -1.0, 2.0],
        ]);
        assert_eq!(neg_lc, expected);
    }

    #[test]
    fn gradient_of_cosine_matches_forward_differences() {
        let n = 4;
        let h = 0.5;
        let spec = GridSpec::square(n, n, h, BoundaryKind::PeriodicAll).unwrap();
        let len = spec.lx();
        let tau = 2.0 * core::f64::consts::PI;
        let p: Vec<f64> = (0..n * n)
            .map(|k| {
                let (i, j) = spec.label(Field::P, k);
                (tau * spec.location(Field::P, i, j).0 / len).cos()
            })
            .collect();
        let gp = assemble_gradient(&spec).mul_vec(&p);
        for k in 0..n * n {
            let (i, _) = spec.label(Field::U, k);
            let xl = (i as f64 - 0.5) * h;
            let xr = (i as f64 + 0.5) * h;
            let expected = ((tau * xr / len).cos() - (tau * xl / len).cos()) / h;
            assert!((gp[k] - expected).abs() < 1e-14);
        }
        assert!(gp[n * n..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn constants_and_symmetry() {
        for spec in grids() {
            let lay = spec.layout();
            let ones = vec![1.0; lay.n_p];
            assert!(assemble_gradient(&spec)
                .mul_vec(&ones)
                .iter()
                .all(|&v| v == 0.0));
            let l = assemble_velocity_laplacian(&spec);
            assert!(l.is_symmetric(0.0));
            if spec.bc == BoundaryKind::PeriodicAll {
                assert!(l.row_sums().iter().all(|&s| s == 0.0));
                let uv = vec![1.0; lay.n_vel()];
                let div = assemble_divergence(&spec).mul_vec(&uv);
                assert!(div.iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn momentum_variants() {
        let spec = GridSpec::square(4, 4, 1.0, BoundaryKind::DirichletAll).unwrap();
        let l = assemble_velocity_laplacian(&spec);
        let steady = assemble_momentum(&spec, &ProblemParams::steady(1.0).unwrap()).unwrap();
        assert_eq!(steady.max_abs_diff(&l.scaled(-1.0)), 0.0);
        let ident = assemble_momentum(&spec, &ProblemParams::scaled(0.0).unwrap()).unwrap();
        assert_eq!(ident.max_abs_diff(&CsrMatrix::identity(l.nrows())), 0.0);
        let a = assemble_momentum(&spec, &ProblemParams::new(1.0, 1.0, 0.5).unwrap()).unwrap();
        let expected = CsrMatrix::identity(l.nrows()).lin_comb(2.0, &l, -1.0);
        assert_eq!(a.max_abs_diff(&expected), 0.0);
        assert!(ProblemParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(1.0, 1.0, 0.0).is_err());
        assert!(ProblemParams::steady(0.0).is_err());
    }

    #[test]
    fn steady_periodic_momentum_flagged_singular() {
        let spec = GridSpec::square(4, 4, 1.0, BoundaryKind::PeriodicAll).unwrap();
        let ops = StokesOperators::assemble(&spec, &ProblemParams::steady(1.0).unwrap()).unwrap();
        assert!(ops.momentum_singular());
        let ops =
            StokesOperators::assemble(&spec, &ProblemParams::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(!ops.momentum_singular());
    }

    #[test]
    fn saddle_matvec_and_dense_rank() {
        let spec = GridSpec::square(2, 2, 1.0, BoundaryKind::DirichletAll).unwrap();
        let ops = StokesOperators::assemble(&spec, &ProblemParams::steady(1.0).unwrap()).unwrap();
        let m = ops.saddle();
        let dense = m.to_dense();
        assert_eq!((dense.nrows(), dense.ncols()), (8, 8));
        assert_eq!(numerical_rank(&dense, 1e-10), 7);
        let lay = spec.layout();
        let zero = BlockVector::zeros(lay);
        assert!(m.apply_block(&zero).as_slice().iter().all(|&v| v == 0.0));
        let x = BlockVector::from_parts(lay, &[0.3, -0.2], &[0.5, 0.1], &[2.0; 4]).unwrap();
        let y = m.apply_block(&x);
        let dy = dense.mul_vec(x.as_slice());
        assert!(crate::math::max_abs_diff(y.as_slice(), &dy) < 1e-15);
        let a_only = ops.a.mul_vec(x.velocity());
        assert!(crate::math::max_abs_diff(y.velocity(), &a_only) < 1e-15);
    }

    #[test]
    fn commutator_closed_form_and_rank() {
        let params = ProblemParams::steady(1.0).unwrap();
        for n in [2, 3, 4, 8] {
            for h in [1.0, 0.25] {
                let spec = GridSpec::square(n, n, h, BoundaryKind::DirichletAll).unwrap();
                let c = commutator_matrix(&spec, &params).unwrap();
                let closed = kron::dirichlet_commutator(&spec).unwrap();
                assert!(
                    c.max_abs_diff(&closed) <= 1e-12 * closed.max_abs(),
                    "n={n} h={h}"
                );
                // The two blocks share the row (e_1 - e_n) ⊗ (e_1 - e_n).
                assert_eq!(numerical_rank(&c.to_dense(), 1e-8), 4 * n - 5);
            }
        }
        let spec = GridSpec::square(6, 6, 1.0, BoundaryKind::PeriodicAll).unwrap();
        assert_eq!(commutator_matrix(&spec, &params).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn commutator_vanishes_in_the_interior() {
        let n = 6;
        let spec = GridSpec::square(n, n, 1.0, BoundaryKind::DirichletAll).unwrap();
        let c = commutator_matrix(&spec, &ProblemParams::steady(1.0).unwrap()).unwrap();
        let lay = spec.layout();
        for row in nonzero_rows(&c) {
            let (field, k) = if row < lay.n_u {
                (Field::U, row)
            } else {
                (Field::V, row - lay.n_u)
            };
            let (i, j) = spec.label(field, k);
            let touches = match field {
                Field::U => j == 1 || j == n as i64,
                _ => i == 1 || i == n as i64,
            };
            assert!(touches, "{field:?}({i}, {j})");
        }
    }
}
