//! Discrete operator identities, checked entrywise.

use alloc::vec::Vec;

use crate::error::Result;
use crate::grid::GridSpec;
use crate::operators::kron::negative_laplacian_and_adjoint_gradient;
use crate::operators::onedim::OneDBlocks;
use crate::operators::{
    assemble_divergence, assemble_gradient, assemble_pressure_laplacian,
    assemble_velocity_laplacian,
};
use crate::sparse::CsrMatrix;

/// Default pass threshold on the relative error.
pub const IDENTITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// `max|lhs - rhs| / max(max|rhs|, 1e-300)`.
    pub rel_error: f64,
}

impl IdentityCheck {
    fn new(name: &'static str, lhs: &CsrMatrix, rhs: &CsrMatrix) -> Self {
        let scale = rhs.max_abs().max(lhs.max_abs()).max(1e-300);
        IdentityCheck {
            name,
            rel_error: lhs.max_abs_diff(rhs) / scale,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.rel_error <= tol
    }
}

/// 2-D identities of the assembled operators on `spec`.
pub fn grid_identities(spec: &GridSpec) -> Result<Vec<IdentityCheck>> {
    let g = assemble_gradient(spec);
    let d = assemble_divergence(spec);
    let lc = assemble_pressure_laplacian(spec);
    let l = assemble_velocity_laplacian(spec);
    let (neg_l, g_adj) = negative_laplacian_and_adjoint_gradient(spec)?;
    Ok(alloc::vec![
        IdentityCheck::new("D = -G^T", &d, &g.transpose().scaled(-1.0)),
        IdentityCheck::new("DG = Lc", &d.matmul(&g), &lc),
        IdentityCheck::new("-L kronecker", &l.scaled(-1.0), &neg_l),
        IdentityCheck::new("G* kronecker", &d.scaled(-1.0), &g_adj),
    ])
}

/// 1-D block identities for `n` cells.
pub fn block_identities(n: usize) -> Result<Vec<IdentityCheck>> {
    let dir = OneDBlocks::dirichlet(n)?;
    let (t_d, t_e, t_n, e_0, b_d) = dir.dirichlet_parts();
    let b_t = b_d.transpose();
    let per = OneDBlocks::periodic(n)?;
    let (t_p, b_p) = per.periodic_parts();
    Ok(alloc::vec![
        IdentityCheck::new("B_D B_D^T = T_N", &b_d.matmul(&b_t), t_n),
        IdentityCheck::new("B_D^T B_D = T_D", &b_t.matmul(b_d), t_d),
        IdentityCheck::new("T_E = T_N + 2E_0", t_e, &t_n.lin_comb(1.0, e_0, 2.0)),
        IdentityCheck::new(
            "B_D T_D B_D^T = T_N^2",
            &b_d.matmul(t_d).matmul(&b_t),
            &t_n.matmul(t_n)
        ),
        IdentityCheck::new("B_P B_P^T = T_P", &b_p.matmul(&b_p.transpose()), t_p),
    ])
}

/// Grid identities on `spec` followed by the 1-D identities for both sizes.
pub fn all_identities(spec: &GridSpec) -> Result<Vec<IdentityCheck>> {
    let mut out = grid_identities(spec)?;
    out.extend(block_identities(spec.nx)?);
    if spec.ny != spec.nx {
        out.extend(block_identities(spec.ny)?);
    }
    Ok(out)
}
