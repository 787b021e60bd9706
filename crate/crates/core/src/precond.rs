//! Projection-type block preconditioners for the saddle-point operator.
//!
//! With `w = A⁻¹ r_u`, `s = -D w - r_p` and `φ = (-L^c)⁻¹ s` the rules are
//!
//! * P1: `u = w - G φ`, `p = (ρ/Δt) φ + μ s`
//! * P1 (exact Schur): `u = w - G φ`, `p = S⁺ s`
//! * P2: `u = w`, `p = -𝕊⁻¹ (D w + r_p)`
//! * P3: `p = -𝕊⁻¹ r_p`, `u = A⁻¹ (r_u - G p)`
//! * P4: `u = w - G φ`, `p = (ρ/Δt) φ + μ (-L^c)⁻¹ D L G φ`
//!
//! where `𝕊⁻¹ = (ρ/Δt)(-L^c)⁻¹ + μ I`, which is `μ I` for steady flow.
//! All `(-L^c)⁻¹` applications go through the mean-projected Poisson solve.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{DenseCholesky, DenseMatrix};
use crate::error::{Error, Result};
use crate::grid::BlockVector;
use crate::linalg::cholesky::{poisson_solve, spd_factorize, SpdFactorization};
use crate::linalg::gmres::Side;
use crate::linalg::LinearOperator;
use crate::math;
use crate::operators::StokesOperators;

/// Largest pressure space for which the exact Schur complement is formed.
pub const EXACT_SCHUR_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecondKind {
    None,
    P1,
    P1Exact,
    P2,
    P3,
    P4,
}

impl PrecondKind {
    pub const ALL: [PrecondKind; 6] = [
        PrecondKind::None,
        PrecondKind::P1,
        PrecondKind::P1Exact,
        PrecondKind::P2,
        PrecondKind::P3,
        PrecondKind::P4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrecondKind::None => "none",
            PrecondKind::P1 => "p1",
            PrecondKind::P1Exact => "p1-exact",
            PrecondKind::P2 => "p2",
            PrecondKind::P3 => "p3",
            PrecondKind::P4 => "p4",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "none" => Some(PrecondKind::None),
            "p1" => Some(PrecondKind::P1),
            "p1-exact" | "p1exact" | "p1_exact" => Some(PrecondKind::P1Exact),
            "p2" => Some(PrecondKind::P2),
            "p3" => Some(PrecondKind::P3),
            "p4" => Some(PrecondKind::P4),
            _ => None,
        }
    }

    /// Right preconditioning for the upper triangular P3, left otherwise.
    pub fn default_side(self) -> Side {
        match self {
            PrecondKind::P3 => Side::Right,
            _ => Side::Left,
        }
    }
}

/// Pseudo-inverse of the dense Schur complement `S = -D A⁻¹ G`.
#[derive(Debug, Clone)]
pub struct SchurInverse {
    s: DenseMatrix,
    chol: DenseCholesky,
}

impl SchurInverse {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.s
    }

    /// `S⁺ x`, with the constant mode removed before and after.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut b = x.to_vec();
        math::remove_mean(&mut b);
        let mut y = self.chol.solve(&b);
        math::remove_mean(&mut y);
        y
    }
}

/// Factorized operators shared by all preconditioner kinds.
#[derive(Debug, Clone)]
pub struct PreconditionerContext {
    ops: StokesOperators,
    a_fac: SpdFactorization,
    lc_fac: SpdFactorization,
    schur: Option<SchurInverse>,
}

impl PreconditionerContext {
    /// Factorizes `A` and `-L^c`.
    pub fn new(ops: StokesOperators) -> Result<Self> {
        let a_fac = if ops.momentum_singular() {
            let lay = ops.spec.layout();
            SpdFactorization::with_null_blocks(&ops.a, &[0..lay.n_u, lay.n_u..lay.n_vel()])?
        } else {
            SpdFactorization::new(&ops.a)?
        };
        let lc_fac = spd_factorize(&ops.lc.scaled(-1.0), true)?;
        Ok(PreconditionerContext {
            ops,
            a_fac,
            lc_fac,
            schur: None,
        })
    }

    /// Context able to apply `kind`; the exact Schur complement is formed
    /// only for `P1Exact`.
    pub fn build(ops: StokesOperators, kind: PrecondKind) -> Result<Self> {
        let ctx = Self::new(ops)?;
        if kind == PrecondKind::P1Exact {
            ctx.with_exact_schur()
        } else {
            Ok(ctx)
        }
    }

    /// Forms `S` densely and factorizes it.
    pub fn with_exact_schur(mut self) -> Result<Self> {
        let n_p = self.ops.lc.nrows();
        if n_p > EXACT_SCHUR_CAP {
            return Err(Error::SizeCap {
                size: n_p,
                cap: EXACT_SCHUR_CAP,
            });
        }
        let s = self.schur_complement().symmetrized();
        let ones = vec![1.0 / n_p as f64; n_p];
        let mut reg = s.clone();
        for i in 0..n_p {
            math::axpy(1.0, &ones, reg.row_mut(i));
        }
        let chol = DenseCholesky::new(&reg)?;
        self.schur = Some(SchurInverse { s, chol });
        Ok(self)
    }

    pub fn ops(&self) -> &StokesOperators {
        &self.ops
    }

    pub fn has_exact_schur(&self) -> bool {
        self.schur.is_some()
    }

    pub fn exact_schur(&self) -> Option<&SchurInverse> {
        self.schur.as_ref()
    }

    pub fn momentum_factorization(&self) -> &SpdFactorization {
        &self.a_fac
    }

    pub fn pressure_factorization(&self) -> &SpdFactorization {
        &self.lc_fac
    }

    /// `A⁻¹ b` (block-mean-projected when `A` is singular).
    pub fn solve_momentum(&self, b: &[f64]) -> Vec<f64> {
        self.a_fac.solve_projected(b)
    }

    /// `(-L^c)⁻¹ b` on the mean-zero subspace.
    pub fn solve_poisson(&self, b: &[f64]) -> Vec<f64> {
        poisson_solve(&self.lc_fac, b)
    }

    /// `𝕊⁻¹ x = (ρ/Δt)(-L^c)⁻¹ x + μ x`.
    pub fn approx_schur_inverse(&self, x: &[f64]) -> Vec<f64> {
        let mu = self.ops.params.mu;
        let reaction = self.ops.params.reaction();
        let mut y: Vec<f64> = x.iter().map(|v| mu * v).collect();
        if reaction != 0.0 {
            math::axpy(reaction, &self.solve_poisson(x), &mut y);
        }
        y
    }

    /// Dense `S = -D A⁻¹ G`, one momentum solve per pressure unknown.
    pub fn schur_complement(&self) -> DenseMatrix {
        let n_p = self.ops.lc.nrows();
        let n_vel = self.ops.a.nrows();
        let gt = self.ops.g.transpose();
        let mut s = DenseMatrix::zeros(n_p, n_p);
        let mut gcol = vec![0.0; n_vel];
        for j in 0..n_p {
            let (idx, vals) = gt.row(j);
            for (&i, &v) in idx.iter().zip(vals) {
                gcol[i] = v;
            }
            let w = self.solve_momentum(&gcol);
            for &i in idx {
                gcol[i] = 0.0;
            }
            let col = self.ops.d.mul_vec(&w);
            for (i, c) in col.into_iter().enumerate() {
                s.set(i, j, -c);
            }
        }
        s
    }

    /// Applies `P⁻¹` of the given kind to the stacked residual `r`.
    pub fn apply(&self, kind: PrecondKind, r: &[f64], out: &mut [f64]) -> Result<()> {
        let n_vel = self.ops.a.nrows();
        let total = n_vel + self.ops.lc.nrows();
        if r.len() != total || out.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: r.len().min(out.len()),
            });
        }
        if kind == PrecondKind::None {
            out.copy_from_slice(r);
            return Ok(());
        }
        let (r_u, r_p) = r.split_at(n_vel);
        let (o_u, o_p) = out.split_at_mut(n_vel);
        match kind {
            PrecondKind::None => unreachable!(),
            PrecondKind::P1 | PrecondKind::P4 | PrecondKind::P1Exact => {
                let schur = match (kind, &self.schur) {
                    (PrecondKind::P1Exact, None) => return Err(Error::MissingSchur),
                    (_, s) => s,
                };
                let w = self.solve_momentum(r_u);
                let mut s = self.ops.d.mul_vec(&w);
                for (si, ri) in s.iter_mut().zip(r_p) {
                    *si = -*si - ri;
                }
                let phi = self.solve_poisson(&s);
                o_u.copy_from_slice(&w);
                self.ops.g.mul_vec_add(-1.0, &phi, o_u);
                let reaction = self.ops.params.reaction();
                let mu = self.ops.params.mu;
                match kind {
                    PrecondKind::P1 => {
                        for ((o, f), si) in o_p.iter_mut().zip(&phi).zip(&s) {
                            *o = reaction * f + mu * si;
                        }
                    }
                    PrecondKind::P4 => {
                        let gphi = self.ops.g.mul_vec(&phi);
                        let lgphi = self.ops.l.mul_vec(&gphi);
                        let dlg = self.ops.d.mul_vec(&lgphi);
                        let corr = self.solve_poisson(&dlg);
                        for ((o, f), c) in o_p.iter_mut().zip(&phi).zip(&corr) {
                            *o = reaction * f + mu * c;
                        }
                    }
                    _ => {
                        let sinv = schur.as_ref().expect("checked above");
                        o_p.copy_from_slice(&sinv.apply(&s));
                    }
                }
            }
            PrecondKind::P2 => {
                let w = self.solve_momentum(r_u);
                let mut t = self.ops.d.mul_vec(&w);
                for (ti, ri) in t.iter_mut().zip(r_p) {
                    *ti += ri;
                }
                let p = self.approx_schur_inverse(&t);
                o_u.copy_from_slice(&w);
                for (o, v) in o_p.iter_mut().zip(&p) {
                    *o = -v;
                }
            }
            PrecondKind::P3 => {
                let p: Vec<f64> = self.approx_schur_inverse(r_p).iter().map(|v| -v).collect();
                let mut rhs = r_u.to_vec();
                self.ops.g.mul_vec_add(-1.0, &p, &mut rhs);
                o_u.copy_from_slice(&self.solve_momentum(&rhs));
                o_p.copy_from_slice(&p);
            }
        }
        Ok(())
    }

    fn apply_block(&self, kind: PrecondKind, r: &BlockVector) -> Result<BlockVector> {
        let mut out = BlockVector::zeros(r.layout());
        self.apply(kind, r.as_slice(), out.as_mut_slice())?;
        Ok(out)
    }

    pub fn apply_p1(&self, r: &BlockVector) -> Result<BlockVector> {
        self.apply_block(PrecondKind::P1, r)
    }

    pub fn apply_p1_exact(&self, r: &BlockVector) -> Result<BlockVector> {
        self.apply_block(PrecondKind::P1Exact, r)
    }

    pub fn apply_p2(&self, r: &BlockVector) -> Result<BlockVector> {
        self.apply_block(PrecondKind::P2, r)
    }

    pub fn apply_p3(&self, r: &BlockVector) -> Result<BlockVector> {
        self.apply_block(PrecondKind::P3, r)
    }

    pub fn apply_p4(&self, r: &BlockVector) -> Result<BlockVector> {
        self.apply_block(PrecondKind::P4, r)
    }

    /// `P⁻¹` of one kind as a linear operator.
    pub fn operator(&self, kind: PrecondKind) -> Result<Preconditioner<'_>> {
        if kind == PrecondKind::P1Exact && self.schur.is_none() {
            return Err(Error::MissingSchur);
        }
        Ok(Preconditioner { ctx: self, kind })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Preconditioner<'a> {
    ctx: &'a PreconditionerContext,
    kind: PrecondKind,
}

impl Preconditioner<'_> {
    pub fn kind(&self) -> PrecondKind {
        self.kind
    }
}

impl LinearOperator for Preconditioner<'_> {
    fn dim(&self) -> usize {
        self.ctx.ops.a.nrows() + self.ctx.ops.lc.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.ctx
            .apply(self.kind, x, y)
            .expect("preconditioner validated at construction");
    }
}

/// `P⁻¹ M` as a linear operator.
#[derive(Debug, Clone, Copy)]
pub struct PreconditionedOperator<'a> {
    pub precond: Preconditioner<'a>,
}

impl LinearOperator for PreconditionedOperator<'_> {
    fn dim(&self) -> usize {
        self.precond.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut mx = vec![0.0; x.len()];
        self.precond.ctx.ops.saddle().apply(x, &mut mx);
        self.precond.apply(&mx, y);
    }
}
