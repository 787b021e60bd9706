//! Staggered grid geometry and the degree-of-freedom layout.
//!
//! The domain is `[0, nx*h] x [0, ny*h]`, cell `(i, j)` (1-based) covering
//! `[(i-1)h, ih] x [(j-1)h, jh]`. Pressure lives at cell centers, `u` on the
//! faces normal to `x` and `v` on the faces normal to `y`:
//!
//! - `P(i, j)` at `((i-1/2)h, (j-1/2)h)`, `1 <= i <= nx`, `1 <= j <= ny`
//! - `U(i, j)` at `(ih, (j-1/2)h)`, the face between cells `i` and `i+1`
//! - `V(i, j)` at `((i-1/2)h, jh)`, the face between cells `j` and `j+1`
//!
//! Faces lying on a Dirichlet wall are not unknowns. Along a periodic
//! direction face `0` is owned and face `n` is its periodic image. Unknowns
//! are numbered lexicographically (x fastest) inside each field and the
//! fields are stacked as `(u, v, p)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// Dirichlet velocity on all four walls.
    DirichletAll,
    /// Periodic in `x`, Dirichlet velocity on the bottom and top walls.
    PeriodicXDirichletY,
    /// Periodic in both directions.
    PeriodicAll,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 3] = [
        BoundaryKind::DirichletAll,
        BoundaryKind::PeriodicXDirichletY,
        BoundaryKind::PeriodicAll,
    ];

    pub fn periodic_x(self) -> bool {
        match self {
            BoundaryKind::DirichletAll => false,
            BoundaryKind::PeriodicXDirichletY | BoundaryKind::PeriodicAll => true,
        }
    }

    pub fn periodic_y(self) -> bool {
        match self {
            BoundaryKind::DirichletAll | BoundaryKind::PeriodicXDirichletY => false,
            BoundaryKind::PeriodicAll => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::DirichletAll => "dirichlet",
            BoundaryKind::PeriodicXDirichletY => "periodic-x",
            BoundaryKind::PeriodicAll => "periodic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "dirichlet" | "pure-dirichlet" => Some(BoundaryKind::DirichletAll),
            "periodic-x" | "x-periodic" => Some(BoundaryKind::PeriodicXDirichletY),
            "periodic" | "pure-periodic" => Some(BoundaryKind::PeriodicAll),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    U,
    V,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub bc: BoundaryKind,
}

impl GridSpec {
    /// Validates the grid. Cells must be square (`hx == hy`).
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64, bc: BoundaryKind) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid("nx and ny must be at least 2"));
        }
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::InvalidGrid("mesh sizes must be positive and finite"));
        }
        if hx != hy {
            return Err(Error::InvalidGrid("cells must be square (hx == hy)"));
        }
        Ok(GridSpec { nx, ny, hx, hy, bc })
    }

    pub fn square(nx: usize, ny: usize, h: f64, bc: BoundaryKind) -> Result<Self> {
        Self::new(nx, ny, h, h, bc)
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.hx
    }

    pub fn lx(&self) -> f64 {
        self.nx as f64 * self.hx
    }

    pub fn ly(&self) -> f64 {
        self.ny as f64 * self.hy
    }

    pub fn layout(&self) -> DofLayout {
        dof_counts(self)
    }

    /// Inclusive ranges `(i_min, i_max, j_min, j_max)` of owned labels.
    pub fn owned_range(&self, field: Field) -> (i64, i64, i64, i64) {
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        match field {
            Field::P => (1, nx, 1, ny),
            Field::U => {
                if self.bc.periodic_x() {
                    (0, nx - 1, 1, ny)
                } else {
                    (1, nx - 1, 1, ny)
                }
            }
            Field::V => {
                if self.bc.periodic_y() {
                    (1, nx, 0, ny - 1)
                } else {
                    (1, nx, 1, ny - 1)
                }
            }
        }
    }

    /// Number of owned labels along `x` and `y` for a field.
    pub fn field_shape(&self, field: Field) -> (usize, usize) {
        let (i0, i1, j0, j1) = self.owned_range(field);
        ((i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize)
    }

    /// Physical coordinates of a staggered location (labels need not be owned).
    pub fn location(&self, field: Field, i: i64, j: i64) -> (f64, f64) {
        let h = self.h();
        match field {
            Field::P => ((i as f64 - 0.5) * h, (j as f64 - 0.5) * h),
            Field::U => (i as f64 * h, (j as f64 - 0.5) * h),
            Field::V => ((i as f64 - 0.5) * h, j as f64 * h),
        }
    }

    fn wrap(&self, field: Field, i: i64, j: i64) -> (i64, i64) {
        let (i0, _, j0, _) = self.owned_range(field);
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let i = if self.bc.periodic_x() {
            i0 + (i - i0).rem_euclid(nx)
        } else {
            i
        };
        let j = if self.bc.periodic_y() {
            j0 + (j - j0).rem_euclid(ny)
        } else {
            j
        };
        (i, j)
    }

    /// Classifies a (possibly out-of-range) label for stencil evaluation.
    pub fn resolve(&self, field: Field, i: i64, j: i64) -> Slot {
        let (i, j) = self.wrap(field, i, j);
        let (i0, i1, j0, j1) = self.owned_range(field);
        if (i0..=i1).contains(&i) && (j0..=j1).contains(&j) {
            let (ni, _) = self.field_shape(field);
            return Slot::Owned(((j - j0) as usize) * ni + (i - i0) as usize);
        }
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let h = self.h();
        match field {
            Field::P => Slot::Outside,
            Field::U => {
                let owned_i = (i0..=i1).contains(&i);
                if (1..=ny).contains(&j) && (i == 0 || i == nx) {
                    let (x, y) = self.location(Field::U, i, j);
                    Slot::Wall { x, y }
                } else if owned_i && (j == 0 || j == ny + 1) {
                    let mirror_j = if j == 0 { 1 } else { ny };
                    let wall_y = if j == 0 { 0.0 } else { ny as f64 * h };
                    match self.resolve(Field::U, i, mirror_j) {
                        Slot::Owned(m) => Slot::Ghost {
                            mirror: m,
                            x: i as f64 * h,
                            y: wall_y,
                        },
                        _ => Slot::Outside,
                    }
                } else {
                    Slot::Outside
                }
            }
            Field::V => {
                let owned_j = (j0..=j1).contains(&j);
                if (1..=nx).contains(&i) && (j == 0 || j == ny) {
                    let (x, y) = self.location(Field::V, i, j);
                    Slot::Wall { x, y }
                } else if owned_j && (i == 0 || i == nx + 1) {
                    let mirror_i = if i == 0 { 1 } else { nx };
                    let wall_x = if i == 0 { 0.0 } else { nx as f64 * h };
                    match self.resolve(Field::V, mirror_i, j) {
                        Slot::Owned(m) => Slot::Ghost {
                            mirror: m,
                            x: wall_x,
                            y: j as f64 * h,
                        },
                        _ => Slot::Outside,
                    }
                } else {
                    Slot::Outside
                }
            }
        }
    }

    /// Inverse of [`linear_index`]: the canonical owned label of an index.
    pub fn label(&self, field: Field, index: usize) -> (i64, i64) {
        let (i0, _, j0, _) = self.owned_range(field);
        let (ni, _) = self.field_shape(field);
        (i0 + (index % ni) as i64, j0 + (index / ni) as i64)
    }
}

/// Outcome of looking up a staggered label next to the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    /// An unknown, with its index inside the field.
    Owned(usize),
    /// A face on a Dirichlet wall; its value is boundary data at `(x, y)`.
    Wall { x: f64, y: f64 },
    /// Half a cell outside a wall, tangential to it. The value is
    /// `2 * g(x, y) - value(mirror)` with `(x, y)` the wall point.
    Ghost { mirror: usize, x: f64, y: f64 },
    /// Not reachable by any stencil of the scheme.
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub n_u: usize,
    pub n_v: usize,
    pub n_p: usize,
    pub total: usize,
}

impl DofLayout {
    pub fn n_vel(&self) -> usize {
        self.n_u + self.n_v
    }

    /// Offset of a field inside the stacked `(u, v, p)` vector.
    pub fn offset(&self, field: Field) -> usize {
        match field {
            Field::U => 0,
            Field::V => self.n_u,
            Field::P => self.n_u + self.n_v,
        }
    }

    pub fn len(&self, field: Field) -> usize {
        match field {
            Field::U => self.n_u,
            Field::V => self.n_v,
            Field::P => self.n_p,
        }
    }
}

pub fn dof_counts(spec: &GridSpec) -> DofLayout {
    let (nx, ny) = (spec.nx, spec.ny);
    let (n_u, n_v, n_p) = match spec.bc {
        BoundaryKind::DirichletAll => ((nx - 1) * ny, nx * (ny - 1), nx * ny),
        BoundaryKind::PeriodicXDirichletY => (nx * ny, nx * (ny - 1), nx * ny),
        BoundaryKind::PeriodicAll => (nx * ny, nx * ny, nx * ny),
    };
    DofLayout {
        n_u,
        n_v,
        n_p,
        total: n_u + n_v + n_p,
    }
}

/// Index of a staggered location within its field. Periodic directions wrap.
pub fn linear_index(spec: &GridSpec, field: Field, i: i64, j: i64) -> Result<usize> {
    match spec.resolve(field, i, j) {
        Slot::Owned(idx) => Ok(idx),
        _ => Err(Error::IndexOutOfRange { field, i, j }),
    }
}

/// Velocity-pressure pair stored contiguously as `(u, v, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    layout: DofLayout,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(layout: DofLayout) -> Self {
        BlockVector {
            layout,
            data: vec![0.0; layout.total],
        }
    }

    pub fn from_vec(layout: DofLayout, data: Vec<f64>) -> Result<Self> {
        if data.len() != layout.total {
            return Err(Error::DimensionMismatch {
                expected: layout.total,
                got: data.len(),
            });
        }
        Ok(BlockVector { layout, data })
    }

    pub fn from_parts(layout: DofLayout, u: &[f64], v: &[f64], p: &[f64]) -> Result<Self> {
        for (field, part) in [(Field::U, u), (Field::V, v), (Field::P, p)] {
            if part.len() != layout.len(field) {
                return Err(Error::DimensionMismatch {
                    expected: layout.len(field),
                    got: part.len(),
                });
            }
        }
        let mut data = Vec::with_capacity(layout.total);
        data.extend_from_slice(u);
        data.extend_from_slice(v);
        data.extend_from_slice(p);
        Ok(BlockVector { layout, data })
    }

    pub fn layout(&self) -> DofLayout {
        self.layout
    }

    pub fn u(&self) -> &[f64] {
        &self.data[..self.layout.n_u]
    }

    pub fn v(&self) -> &[f64] {
        &self.data[self.layout.n_u..self.layout.n_vel()]
    }

    pub fn p(&self) -> &[f64] {
        &self.data[self.layout.n_vel()..]
    }

    /// The `u` and `v` parts together.
    pub fn velocity(&self) -> &[f64] {
        &self.data[..self.layout.n_vel()]
    }

    pub fn velocity_mut(&mut self) -> &mut [f64] {
        let n = self.layout.n_vel();
        &mut self.data[..n]
    }

    pub fn p_mut(&mut self) -> &mut [f64] {
        let n = self.layout.n_vel();
        &mut self.data[n..]
    }

    pub fn split_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        let n = self.layout.n_vel();
        self.data.split_at_mut(n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        math::norm2(&self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn grid(nx: usize, ny: usize, bc: BoundaryKind) -> GridSpec {
        GridSpec::square(nx, ny, 1.0, bc).unwrap()
    }

    #[test]
    fn dof_counts_match_reference_totals() {
        assert_eq!(
            dof_counts(&grid(16, 16, BoundaryKind::DirichletAll)).total,
            736
        );
        assert_eq!(
            dof_counts(&grid(32, 32, BoundaryKind::DirichletAll)).total,
            3008
        );
        assert_eq!(
            dof_counts(&grid(16, 32, BoundaryKind::PeriodicXDirichletY)).total,
            1520
        );
        assert_eq!(
            dof_counts(&grid(32, 64, BoundaryKind::PeriodicXDirichletY)).total,
            6112
        );
        assert_eq!(dof_counts(&grid(2, 2, BoundaryKind::PeriodicAll)).total, 12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::square(1, 4, 1.0, BoundaryKind::DirichletAll).is_err());
        assert!(GridSpec::square(4, 4, 0.0, BoundaryKind::DirichletAll).is_err());
        assert!(GridSpec::new(4, 4, 1.0, 0.5, BoundaryKind::DirichletAll).is_err());
    }

    #[test]
    fn pressure_corner_indices() {
        let g = grid(5, 3, BoundaryKind::DirichletAll);
        assert_eq!(linear_index(&g, Field::P, 1, 1).unwrap(), 0);
        assert_eq!(linear_index(&g, Field::P, 5, 3).unwrap(), 14);
        assert_eq!(linear_index(&g, Field::P, 2, 1).unwrap(), 1);
        assert_eq!(linear_index(&g, Field::P, 1, 2).unwrap(), 5);
    }

    #[test]
    fn out_of_range_reports_field_and_coordinates() {
        let g = grid(4, 4, BoundaryKind::DirichletAll);
        assert_eq!(
            linear_index(&g, Field::U, 0, 1),
            Err(Error::IndexOutOfRange {
                field: Field::U,
                i: 0,
                j: 1
            })
        );
        assert!(linear_index(&g, Field::V, 2, 4).is_err());
        assert!(linear_index(&g, Field::P, 0, 1).is_err());
    }

    #[test]
    fn periodic_index_wraps() {
        let g = grid(4, 3, BoundaryKind::PeriodicAll);
        for j in 1..=3 {
            for i in 0..4 {
                let base = linear_index(&g, Field::U, i, j).unwrap();
                assert_eq!(linear_index(&g, Field::U, i + 4, j).unwrap(), base);
                assert_eq!(linear_index(&g, Field::U, i - 4, j).unwrap(), base);
                assert_eq!(linear_index(&g, Field::U, i, j + 3).unwrap(), base);
            }
        }
    }

    #[test]
    fn linear_index_is_a_bijection() {
        for bc in BoundaryKind::ALL {
            for nx in 2..=8 {
                for ny in 2..=8 {
                    let g = grid(nx, ny, bc);
                    let lay = g.layout();
                    for field in [Field::U, Field::V, Field::P] {
                        let (i0, i1, j0, j1) = g.owned_range(field);
                        let mut seen = BTreeSet::new();
                        for j in j0..=j1 {
                            for i in i0..=i1 {
                                let idx = linear_index(&g, field, i, j).unwrap();
                                assert_eq!(g.label(field, idx), (i, j));
                                assert!(seen.insert(idx));
                            }
                        }
                        assert_eq!(seen.len(), lay.len(field));
                        assert_eq!(seen.iter().next_back().copied(), Some(lay.len(field) - 1));
                    }
                }
            }
        }
    }

    #[test]
    fn walls_and_ghosts_are_classified() {
        let g = grid(4, 4, BoundaryKind::DirichletAll);
        assert!(matches!(g.resolve(Field::U, 0, 2), Slot::Wall { x, .. } if x == 0.0));
        assert!(matches!(g.resolve(Field::U, 4, 2), Slot::Wall { x, .. } if x == 4.0));
        match g.resolve(Field::U, 2, 0) {
            Slot::Ghost { mirror, x, y } => {
                assert_eq!(mirror, linear_index(&g, Field::U, 2, 1).unwrap());
                assert_eq!((x, y), (2.0, 0.0));
            }
            other => panic!("{other:?}"),
        }
        match g.resolve(Field::V, 5, 2) {
            Slot::Ghost { mirror, x, y } => {
                assert_eq!(mirror, linear_index(&g, Field::V, 4, 2).unwrap());
                assert_eq!((x, y), (4.0, 2.0));
            }
            other => panic!("{other:?}"),
        }
        let px = grid(4, 4, BoundaryKind::PeriodicXDirichletY);
        assert_eq!(px.resolve(Field::U, 4, 1), px.resolve(Field::U, 0, 1));
        assert!(matches!(px.resolve(Field::V, 1, 0), Slot::Wall { .. }));
        assert!(matches!(px.resolve(Field::U, 1, 5), Slot::Ghost { .. }));
    }

    #[test]
    fn block_vector_parts() {
        let g = grid(3, 2, BoundaryKind::DirichletAll);
        let lay = g.layout();
        let u: Vec<f64> = (0..lay.n_u).map(|k| k as f64).collect();
        let v = vec![-1.0; lay.n_v];
        let p = vec![2.0; lay.n_p];
        let b = BlockVector::from_parts(lay, &u, &v, &p).unwrap();
        assert_eq!(b.u(), &u[..]);
        assert_eq!(b.v(), &v[..]);
        assert_eq!(b.p(), &p[..]);
        assert!(BlockVector::from_parts(lay, &u, &v, &p[1..]).is_err());
    }
}
