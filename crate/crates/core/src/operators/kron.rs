//! Kronecker-product representations of `-L` and `G* = -D`.
//!
//! With lexicographic ordering (x fastest) an x-direction 1-D operator `T`
//! acts as `I_ny ⊗ T` and a y-direction one as `T ⊗ I_nx`.

use crate::error::Result;
use crate::grid::{BoundaryKind, GridSpec};
use crate::operators::onedim::OneDBlocks;
use crate::sparse::CsrMatrix;

/// `(-L, G*)` assembled from the 1-D blocks.
pub fn negative_laplacian_and_adjoint_gradient(spec: &GridSpec) -> Result<(CsrMatrix, CsrMatrix)> {
    let (nx, ny) = (spec.nx, spec.ny);
    let h = spec.h();
    let eye = CsrMatrix::identity;
    let (lu, lv, gu, gv) = match spec.bc {
        BoundaryKind::DirichletAll => {
            let bx = OneDBlocks::dirichlet(nx)?;
            let by = OneDBlocks::dirichlet(ny)?;
            let (tdx, tex, _, _, bdx) = bx.dirichlet_parts();
            let (tdy, tey, _, _, bdy) = by.dirichlet_parts();
            (
                eye(ny).kron(tdx).add(&tey.kron(&eye(nx - 1))),
                eye(ny - 1).kron(tex).add(&tdy.kron(&eye(nx))),
                eye(ny).kron(bdx),
                bdy.kron(&eye(nx)),
            )
        }
        BoundaryKind::PeriodicXDirichletY => {
            let bx = OneDBlocks::periodic(nx)?;
            let by = OneDBlocks::dirichlet(ny)?;
            let (tpx, bpx) = bx.periodic_parts();
            let (tdy, tey, _, _, bdy) = by.dirichlet_parts();
            (
                eye(ny).kron(tpx).add(&tey.kron(&eye(nx))),
                eye(ny - 1).kron(tpx).add(&tdy.kron(&eye(nx))),
                eye(ny).kron(bpx),
                bdy.kron(&eye(nx)),
            )
        }
        BoundaryKind::PeriodicAll => {
            let bx = OneDBlocks::periodic(nx)?;
            let by = OneDBlocks::periodic(ny)?;
            let (tpx, bpx) = bx.periodic_parts();
            let (tpy, bpy) = by.periodic_parts();
            (
                eye(ny).kron(tpx).add(&tpy.kron(&eye(nx))),
                eye(ny).kron(tpx).add(&tpy.kron(&eye(nx))),
                eye(ny).kron(bpx),
                bpy.kron(&eye(nx)),
            )
        }
    };
    let neg_l = CsrMatrix::block_diag(&[&lu, &lv]).scaled(1.0 / (h * h));
    let g_adj = CsrMatrix::hstack(&[&gu, &gv]).scaled(1.0 / h);
    Ok((neg_l, g_adj))
}

/// Closed form of the commutator `(A - G G*) G` for steady Dirichlet flow
/// with `A = -L`: `(2/h³) [E_0 ⊗ B_Dᵀ ; B_Dᵀ ⊗ E_0]`.
pub fn dirichlet_commutator(spec: &GridSpec) -> Result<CsrMatrix> {
    assert_eq!(spec.bc, BoundaryKind::DirichletAll);
    let bx = OneDBlocks::dirichlet(spec.nx)?;
    let by = OneDBlocks::dirichlet(spec.ny)?;
    let (_, _, _, e0x, bdx) = bx.dirichlet_parts();
    let (_, _, _, e0y, bdy) = by.dirichlet_parts();
    let top = e0y.kron(&bdx.transpose());
    let bottom = bdy.transpose().kron(e0x);
    let h = spec.h();
    Ok(CsrMatrix::vstack(&[&top, &bottom]).scaled(2.0 / (h * h * h)))
}
