//! Operator assembly by walking the five-point stencils over owned locations.
//!
//! Neighbours are classified through [`GridSpec::resolve`]: wall values are
//! boundary data and do not enter the matrix, ghost values reflect the
//! mirrored unknown (`-u`), periodic neighbours wrap.

use crate::grid::{Field, GridSpec, Slot};
use crate::sparse::{CsrMatrix, TripletBuilder};

const OFFSETS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Vector Laplacian `L` acting on stacked `(u, v)`.
pub fn velocity_laplacian(spec: &GridSpec) -> CsrMatrix {
    let lay = spec.layout();
    let inv_h2 = 1.0 / (spec.h() * spec.h());
    let mut b = TripletBuilder::with_capacity(lay.n_vel(), lay.n_vel(), 5 * lay.n_vel());
    for (field, offset) in [(Field::U, 0), (Field::V, lay.n_u)] {
        let (i0, i1, j0, j1) = spec.owned_range(field);
        for j in j0..=j1 {
            for i in i0..=i1 {
                let row = offset + owned(spec, field, i, j);
                b.push(row, row, -4.0 * inv_h2);
                for (di, dj) in OFFSETS {
                    match spec.resolve(field, i + di, j + dj) {
                        Slot::Owned(k) => b.push(row, offset + k, inv_h2),
                        Slot::Wall { .. } => {}
                        Slot::Ghost { mirror, .. } => b.push(row, offset + mirror, -inv_h2),
                        Slot::Outside => unreachable!("stencil left the ghost layer"),
                    }
                }
            }
        }
    }
    b.build()
}

/// Gradient `G`, pressure to faces: `(p(i+1, j) - p(i, j)) / h` on `U(i, j)`.
pub fn gradient(spec: &GridSpec) -> CsrMatrix {
    let lay = spec.layout();
    let inv_h = 1.0 / spec.h();
    let mut b = TripletBuilder::with_capacity(lay.n_vel(), lay.n_p, 2 * lay.n_vel());
    for (field, offset, (di, dj)) in [(Field::U, 0, (1, 0)), (Field::V, lay.n_u, (0, 1))] {
        let (i0, i1, j0, j1) = spec.owned_range(field);
        for j in j0..=j1 {
            for i in i0..=i1 {
                let row = offset + owned(spec, field, i, j);
                b.push(row, owned(spec, Field::P, i + di, j + dj), inv_h);
                b.push(row, owned(spec, Field::P, i, j), -inv_h);
            }
        }
    }
    b.build()
}

/// Divergence `D`, faces to cell centers.
pub fn divergence(spec: &GridSpec) -> CsrMatrix {
    let lay = spec.layout();
    let inv_h = 1.0 / spec.h();
    let mut b = TripletBuilder::with_capacity(lay.n_p, lay.n_vel(), 4 * lay.n_p);
    let (i0, i1, j0, j1) = spec.owned_range(Field::P);
    for j in j0..=j1 {
        for i in i0..=i1 {
            let row = owned(spec, Field::P, i, j);
            let faces = [
                (Field::U, 0, i, j, inv_h),
                (Field::U, 0, i - 1, j, -inv_h),
                (Field::V, lay.n_u, i, j, inv_h),
                (Field::V, lay.n_u, i, j - 1, -inv_h),
            ];
            for (field, offset, fi, fj, w) in faces {
                match spec.resolve(field, fi, fj) {
                    Slot::Owned(k) => b.push(row, offset + k, w),
                    Slot::Wall { .. } => {}
                    Slot::Ghost { .. } | Slot::Outside => {
                        unreachable!("cell face outside the grid")
                    }
                }
            }
        }
    }
    b.build()
}

/// Cell-centered Laplacian `L^c` with the boundary closure induced by the
/// velocity conditions (homogeneous Neumann across Dirichlet walls).
pub fn pressure_laplacian(spec: &GridSpec) -> CsrMatrix {
    let n_p = spec.layout().n_p;
    let inv_h2 = 1.0 / (spec.h() * spec.h());
    let mut b = TripletBuilder::with_capacity(n_p, n_p, 5 * n_p);
    let (i0, i1, j0, j1) = spec.owned_range(Field::P);
    for j in j0..=j1 {
        for i in i0..=i1 {
            let row = owned(spec, Field::P, i, j);
            for (di, dj) in OFFSETS {
                if let Slot::Owned(k) = spec.resolve(Field::P, i + di, j + dj) {
                    b.push(row, k, inv_h2);
                    b.push(row, row, -inv_h2);
                }
            }
        }
    }
    b.build()
}

fn owned(spec: &GridSpec, field: Field, i: i64, j: i64) -> usize {
    match spec.resolve(field, i, j) {
        Slot::Owned(k) => k,
        other => unreachable!("{field:?}({i}, {j}) is not owned: {other:?}"),
    }
}
