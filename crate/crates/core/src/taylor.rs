//! Forced Stokes steps driven by the Taylor vortex.
//!
//! The nonlinear term of the exact Navier-Stokes solution is evaluated
//! explicitly from the previous velocity and moved to the right-hand side;
//! boundary data are sampled from the exact solution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{BlockVector, BoundaryKind, Field, GridSpec, Slot};
use crate::linalg::gmres::{gmres, GmresConfig, IterationReport, Side};
use crate::math;
use crate::operators::{ProblemParams, StokesOperators};
use crate::precond::{PrecondKind, PreconditionerContext};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorVortexParams {
    /// Domain side length.
    pub l: f64,
    pub mu: f64,
    pub rho: f64,
    pub dt: f64,
    pub t0: f64,
}

impl Default for TaylorVortexParams {
    fn default() -> Self {
        TaylorVortexParams {
            l: 64.0,
            mu: 1.0,
            rho: 1.0,
            dt: 0.5,
            t0: 0.0,
        }
    }
}

impl TaylorVortexParams {
    pub fn with_rho(rho: f64) -> Self {
        TaylorVortexParams {
            rho,
            ..Self::default()
        }
    }

    /// `rho = 0` gives the steady system.
    pub fn problem_params(&self) -> Result<ProblemParams> {
        ProblemParams::new(self.rho, self.mu, self.dt)
    }

    pub fn time(&self, step: usize) -> f64 {
        self.t0 + step as f64 * self.dt
    }
}

/// Exact `(u, v, p)` at `(x, y, t)`.
pub fn taylor_exact(x: f64, y: f64, t: f64, p: &TaylorVortexParams) -> (f64, f64, f64) {
    let l2 = p.l * p.l;
    let k = 2.0 * PI / p.l;
    let decay = math::exp(-8.0 * PI * PI * p.mu * t / l2);
    let (ax, ay) = (k * (x - t), k * (y - t));
    let u = 1.0 - 2.0 * decay * math::cos(ax) * math::sin(ay);
    let v = 1.0 + 2.0 * decay * math::sin(ax) * math::cos(ay);
    let pr = -decay * decay * (math::cos(2.0 * ax) + math::cos(2.0 * ay));
    (u, v, pr)
}

fn component(field: Field, x: f64, y: f64, t: f64, p: &TaylorVortexParams) -> f64 {
    let (u, v, pr) = taylor_exact(x, y, t, p);
    match field {
        Field::U => u,
        Field::V => v,
        Field::P => pr,
    }
}

/// Exact solution sampled at the owned locations of every field.
pub fn sample_exact(spec: &GridSpec, tv: &TaylorVortexParams, t: f64) -> BlockVector {
    let lay = spec.layout();
    let mut out = BlockVector::zeros(lay);
    let data = out.as_mut_slice();
    for field in [Field::U, Field::V, Field::P] {
        let off = lay.offset(field);
        for k in 0..lay.len(field) {
            let (i, j) = spec.label(field, k);
            let (x, y) = spec.location(field, i, j);
            data[off + k] = component(field, x, y, t, tv);
        }
    }
    out
}

/// Velocity value at any stencil location: owned unknowns, exact wall data
/// at time `t`, or reflected ghosts `2 g - u_mirror`.
fn extended(
    spec: &GridSpec,
    vel: &[f64],
    field: Field,
    i: i64,
    j: i64,
    t: f64,
    tv: &TaylorVortexParams,
) -> f64 {
    let off = if field == Field::V {
        spec.layout().n_u
    } else {
        0
    };
    match spec.resolve(field, i, j) {
        Slot::Owned(k) => vel[off + k],
        Slot::Wall { x, y } => component(field, x, y, t, tv),
        Slot::Ghost { mirror, x, y } => 2.0 * component(field, x, y, t, tv) - vel[off + mirror],
        Slot::Outside => unreachable!("advection stencil outside the ghost layer"),
    }
}

/// Centered staggered discretization of `(u·∇)u` at the owned velocity
/// locations. Boundary values are taken from the exact solution at `t`.
pub fn advection_term(spec: &GridSpec, vel: &[f64], t: f64, tv: &TaylorVortexParams) -> Vec<f64> {
    let lay = spec.layout();
    assert_eq!(vel.len(), lay.n_vel());
    let h = spec.h();
    let mut out = vec![0.0; lay.n_vel()];
    let val = |f: Field, i: i64, j: i64| extended(spec, vel, f, i, j, t, tv);
    for k in 0..lay.n_u {
        let (i, j) = spec.label(Field::U, k);
        let u = vel[k];
        let dudx = (val(Field::U, i + 1, j) - val(Field::U, i - 1, j)) / (2.0 * h);
        let dudy = (val(Field::U, i, j + 1) - val(Field::U, i, j - 1)) / (2.0 * h);
        let vbar = 0.25
            * (val(Field::V, i, j - 1)
                + val(Field::V, i + 1, j - 1)
                + val(Field::V, i, j)
                + val(Field::V, i + 1, j));
        out[k] = u * dudx + vbar * dudy;
    }
    for k in 0..lay.n_v {
        let (i, j) = spec.label(Field::V, k);
        let v = vel[lay.n_u + k];
        let dvdx = (val(Field::V, i + 1, j) - val(Field::V, i - 1, j)) / (2.0 * h);
        let dvdy = (val(Field::V, i, j + 1) - val(Field::V, i, j - 1)) / (2.0 * h);
        let ubar = 0.25
            * (val(Field::U, i - 1, j)
                + val(Field::U, i, j)
                + val(Field::U, i - 1, j + 1)
                + val(Field::U, i, j + 1));
        out[lay.n_u + k] = ubar * dvdx + v * dvdy;
    }
    out
}

/// Boundary contributions moved to the right-hand side at time `t`:
/// `mu` times the wall terms of the Laplacian stencil, and the wall fluxes
/// of the divergence stencil.
pub fn boundary_lift(spec: &GridSpec, tv: &TaylorVortexParams, t: f64) -> BlockVector {
    let lay = spec.layout();
    let h = spec.h();
    let mut out = BlockVector::zeros(lay);
    let data = out.as_mut_slice();
    let coef = tv.mu / (h * h);
    for field in [Field::U, Field::V] {
        let off = lay.offset(field);
        for k in 0..lay.len(field) {
            let (i, j) = spec.label(field, k);
            for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                match spec.resolve(field, i + di, j + dj) {
                    Slot::Wall { x, y } => data[off + k] += coef * component(field, x, y, t, tv),
                    Slot::Ghost { x, y, .. } => {
                        data[off + k] += 2.0 * coef * component(field, x, y, t, tv)
                    }
                    _ => {}
                }
            }
        }
    }
    let p_off = lay.offset(Field::P);
    for k in 0..lay.n_p {
        let (i, j) = spec.label(Field::P, k);
        let faces = [
            (Field::U, i, j, 1.0),
            (Field::U, i - 1, j, -1.0),
            (Field::V, i, j, 1.0),
            (Field::V, i, j - 1, -1.0),
        ];
        for (field, fi, fj, sign) in faces {
            if let Slot::Wall { x, y } = spec.resolve(field, fi, fj) {
                data[p_off + k] += sign * component(field, x, y, t, tv) / h;
            }
        }
    }
    out
}

/// Right-hand side of step `step_index` (from `t_k` to `t_{k+1}`):
/// `f_u = (rho/dt) u_k - adv(u_k) + lift(t_{k+1})`, `g_p = lift(t_{k+1})`.
pub fn build_forcing(
    spec: &GridSpec,
    tv: &TaylorVortexParams,
    u_prev: &[f64],
    step_index: usize,
) -> Result<BlockVector> {
    let params = tv.problem_params()?;
    let lay = spec.layout();
    if u_prev.len() != lay.n_vel() {
        return Err(Error::DimensionMismatch {
            expected: lay.n_vel(),
            got: u_prev.len(),
        });
    }
    let t_k = tv.time(step_index);
    let mut rhs = boundary_lift(spec, tv, t_k + tv.dt);
    let adv = advection_term(spec, u_prev, t_k, tv);
    let reaction = params.reaction();
    for ((f, &u), a) in rhs.velocity_mut().iter_mut().zip(u_prev).zip(&adv) {
        *f += reaction * u - a;
    }
    Ok(rhs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub bc: BoundaryKind,
    pub rho: f64,
    pub kind: PrecondKind,
    pub side: Side,
    /// GMRES iterations of steps 1, 2, ...
    pub iterations: Vec<usize>,
    pub reports: Vec<IterationReport>,
    pub converged: bool,
}

impl TableCell {
    /// First-step count, the value compared with the reference table.
    pub fn first(&self) -> usize {
        self.iterations[0]
    }
}

/// Number of steps recorded per cell.
pub const TABLE_STEPS: usize = 3;

/// Backward-Euler steps from exact initial data, reusing one set of
/// factorizations for several preconditioners.
#[derive(Debug, Clone)]
pub struct TaylorRun {
    spec: GridSpec,
    tv: TaylorVortexParams,
    ctx: PreconditionerContext,
    gmres: GmresConfig,
}

impl TaylorRun {
    pub fn new(spec: &GridSpec, tv: &TaylorVortexParams) -> Result<Self> {
        let params = tv.problem_params()?;
        if (spec.lx() - tv.l).abs() > 1e-12 * tv.l || (spec.ly() - tv.l).abs() > 1e-12 * tv.l {
            return Err(Error::InvalidParams(
                "grid extent must equal the vortex period",
            ));
        }
        let ops = StokesOperators::assemble(spec, &params)?;
        Ok(TaylorRun {
            spec: *spec,
            tv: *tv,
            ctx: PreconditionerContext::new(ops)?,
            gmres: GmresConfig::default(),
        })
    }

    pub fn with_gmres(mut self, cfg: GmresConfig) -> Self {
        self.gmres = cfg;
        self
    }

    pub fn context(&self) -> &PreconditionerContext {
        &self.ctx
    }

    fn ensure_schur(&mut self, kind: PrecondKind) -> Result<()> {
        if kind == PrecondKind::P1Exact && !self.ctx.has_exact_schur() {
            self.ctx = self.ctx.clone().with_exact_schur()?;
        }
        Ok(())
    }

    /// Runs `steps` steps with one preconditioner; returns the cell and the
    /// final state.
    pub fn run(
        &mut self,
        kind: PrecondKind,
        side: Side,
        steps: usize,
    ) -> Result<(TableCell, BlockVector)> {
        self.ensure_schur(kind)?;
        let lay = self.spec.layout();
        let mut state = sample_exact(&self.spec, &self.tv, self.tv.t0);
        let cfg = GmresConfig { side, ..self.gmres };
        let m = self.ctx.ops().saddle();
        let p = self.ctx.operator(kind)?;
        let mut iterations = Vec::with_capacity(steps);
        let mut reports = Vec::with_capacity(steps);
        for step in 0..steps {
            let rhs = build_forcing(&self.spec, &self.tv, state.velocity(), step)?;
            let (x, rep) = if kind == PrecondKind::None {
                gmres::<_, crate::linalg::Identity>(&m, None, rhs.as_slice(), &cfg)?
            } else {
                gmres(&m, Some(&p), rhs.as_slice(), &cfg)?
            };
            iterations.push(rep.iterations);
            reports.push(rep);
            state = BlockVector::from_vec(lay, x)?;
        }
        let cell = TableCell {
            bc: self.spec.bc,
            rho: self.tv.rho,
            kind,
            side,
            converged: reports.iter().all(|r| r.converged),
            iterations,
            reports,
        };
        Ok((cell, state))
    }
}

/// One table entry with the default 64 x 64 setup.
pub fn run_table_cell(
    spec: &GridSpec,
    tv: &TaylorVortexParams,
    kind: PrecondKind,
    side: Side,
) -> Result<TableCell> {
    Ok(TaylorRun::new(spec, tv)?.run(kind, side, TABLE_STEPS)?.0)
}

/// Density values of the reference iteration table.
pub const TABLE_RHOS: [f64; 6] = [100.0, 10.0, 1.0, 0.1, 0.01, 0.0];
/// Preconditioners of the reference iteration table.
pub const TABLE_KINDS: [PrecondKind; 3] = [PrecondKind::P1, PrecondKind::P3, PrecondKind::P4];

/// Published counts `[N1, N3, N4]` per density, for one boundary kind.
pub fn reference_counts(bc: BoundaryKind) -> [[usize; 3]; 6] {
    match bc {
        BoundaryKind::DirichletAll => [
            [4, 5, 2],
            [6, 6, 3],
            [9, 9, 6],
            [11, 11, 10],
            [12, 13, 17],
            [17, 19, 24],
        ],
        BoundaryKind::PeriodicXDirichletY => [
            [4, 4, 3],
            [5, 6, 3],
            [7, 8, 5],
            [9, 9, 10],
            [9, 10, 13],
            [11, 13, 19],
        ],
        BoundaryKind::PeriodicAll => [[1, 2, 1]; 6],
    }
}

/// The 64 x 64 grid with unit spacing.
pub fn table_grid(bc: BoundaryKind) -> GridSpec {
    GridSpec::square(64, 64, 1.0, bc).expect("valid grid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub iterations: usize,
    /// Max-norm velocity error against the exact solution at `t0 + dt`.
    pub error: f64,
}

/// One step with `rho = 1` on the fully periodic grid, `dt = 0.5 h²/mu`.
pub fn one_step_error(n: usize, tv: &TaylorVortexParams) -> Result<ConvergencePoint> {
    let h = tv.l / n as f64;
    let spec = GridSpec::square(n, n, h, BoundaryKind::PeriodicAll)?;
    let tv = TaylorVortexParams {
        rho: 1.0,
        dt: 0.5 * h * h / tv.mu,
        ..*tv
    };
    let mut run = TaylorRun::new(&spec, &tv)?;
    let (cell, state) = run.run(PrecondKind::P1, Side::Left, 1)?;
    let exact = sample_exact(&spec, &tv, tv.t0 + tv.dt);
    let error = math::max_abs_diff(state.velocity(), exact.velocity());
    Ok(ConvergencePoint {
        n,
        h,
        dt: tv.dt,
        iterations: cell.first(),
        error,
    })
}

/// Errors over a refinement sequence and the observed orders
/// `log2(e_k / e_{k+1}) / log2(h_k / h_{k+1})`.
pub fn convergence_study(
    ns: &[usize],
    tv: &TaylorVortexParams,
) -> Result<(Vec<ConvergencePoint>, Vec<f64>)> {
    let pts = ns
        .iter()
        .map(|&n| one_step_error(n, tv))
        .collect::<Result<Vec<_>>>()?;
    let orders = pts
        .windows(2)
        .map(|w| math::ln(w[0].error / w[1].error) / math::ln(w[0].h / w[1].h))
        .collect();
    Ok((pts, orders))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv() -> TaylorVortexParams {
        TaylorVortexParams::default()
    }

    #[test]
    fn exact_values() {
        let (u, v, p) = taylor_exact(0.0, 0.0, 0.0, &tv());
        assert!((u - 1.0).abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
        assert!((p + 2.0).abs() < 1e-15);
        let (u, v, p) = taylor_exact(3.0, 7.0, 1e6, &tv());
        assert!((u - 1.0).abs() < 1e-12 && (v - 1.0).abs() < 1e-12 && p.abs() < 1e-12);
    }

    #[test]
    fn sampled_field_is_discretely_solenoidal() {
        for n in [16, 32] {
            let h = 64.0 / n as f64;
            let spec = GridSpec::square(n, n, h, BoundaryKind::PeriodicAll).unwrap();
            let x = sample_exact(&spec, &tv(), 0.3);
            let d = crate::operators::assemble_divergence(&spec).mul_vec(x.velocity());
            assert!(math::norm_inf(&d) < 1e-13);
        }
    }

    #[test]
    fn advection_of_simple_fields() {
        let spec = GridSpec::square(8, 8, 8.0, BoundaryKind::PeriodicAll).unwrap();
        let lay = spec.layout();
        let constant: Vec<f64> = (0..lay.n_vel())
            .map(|k| if k < lay.n_u { 0.7 } else { -1.3 })
            .collect();
        let adv = advection_term(&spec, &constant, 0.0, &tv());
        assert!(adv.iter().all(|v| v.abs() < 1e-15));
        let shear: Vec<f64> = (0..lay.n_vel())
            .map(|k| {
                if k < lay.n_u {
                    let (i, j) = spec.label(Field::U, k);
                    spec.location(Field::U, i, j).1
                } else {
                    0.0
                }
            })
            .collect();
        let adv = advection_term(&spec, &shear, 0.0, &tv());
        assert!(adv.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn advection_converges_at_second_order() {
        let mut errs = Vec::new();
        for n in [32, 64] {
            let h = 64.0 / n as f64;
            let spec = GridSpec::square(n, n, h, BoundaryKind::PeriodicAll).unwrap();
            let x = sample_exact(&spec, &tv(), 0.0);
            let adv = advection_term(&spec, x.velocity(), 0.0, &tv());
            let lay = spec.layout();
            let k = 2.0 * PI / 64.0;
            let mut err = 0.0f64;
            for idx in 0..lay.n_vel() {
                let (field, local) = if idx < lay.n_u {
                    (Field::U, idx)
                } else {
                    (Field::V, idx - lay.n_u)
                };
                let (i, j) = spec.label(field, local);
                let (px, py) = spec.location(field, i, j);
                let (u, v, _) = taylor_exact(px, py, 0.0, &tv());
                let (sx, cx, sy, cy) = (
                    (k * px).sin(),
                    (k * px).cos(),
                    (k * py).sin(),
                    (k * py).cos(),
                );
                let exact = match field {
                    Field::U => u * (2.0 * k * sx * sy) + v * (-2.0 * k * cx * cy),
                    _ => u * (2.0 * k * cx * cy) + v * (-2.0 * k * sx * sy),
                };
                err = err.max((adv[idx] - exact).abs());
            }
            errs.push(err);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.8, "{order}");
    }

    #[test]
    fn periodic_forcing_has_no_boundary_terms() {
        let spec = GridSpec::square(8, 8, 8.0, BoundaryKind::PeriodicAll).unwrap();
        let lift = boundary_lift(&spec, &tv(), 0.5);
        assert!(lift.as_slice().iter().all(|&v| v == 0.0));
        let zero = vec![0.0; spec.layout().n_vel()];
        let rhs = build_forcing(&spec, &tv(), &zero, 0).unwrap();
        assert!(rhs.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exact_state_nearly_satisfies_discrete_constraint() {
        // g_p - (-D u_exact) is the discrete divergence of the exact field.
        for bc in [
            BoundaryKind::DirichletAll,
            BoundaryKind::PeriodicXDirichletY,
        ] {
            let spec = GridSpec::square(32, 32, 2.0, bc).unwrap();
            let t = 0.5;
            let x = sample_exact(&spec, &tv(), t);
            let lift = boundary_lift(&spec, &tv(), t);
            let du = crate::operators::assemble_divergence(&spec).mul_vec(x.velocity());
            let resid: Vec<f64> = du.iter().zip(lift.p()).map(|(d, g)| d + g).collect();
            assert!(math::norm_inf(&resid) < 5e-3, "{bc:?}");
        }
    }

    #[test]
    fn small_periodic_step_uses_one_iteration() {
        let spec = GridSpec::square(16, 16, 4.0, BoundaryKind::PeriodicAll).unwrap();
        let tv = TaylorVortexParams { dt: 2.0, ..tv() };
        let mut run = TaylorRun::new(&spec, &tv).unwrap();
        let (cell, _) = run.run(PrecondKind::P1, Side::Left, 2).unwrap();
        assert_eq!(cell.iterations, vec![1, 1]);
        let (cell, _) = run.run(PrecondKind::P3, Side::Right, 1).unwrap();
        assert_eq!(cell.iterations, vec![2]);
    }

    #[test]
    fn grid_must_match_period() {
        let spec = GridSpec::square(8, 8, 1.0, BoundaryKind::PeriodicAll).unwrap();
        assert!(TaylorRun::new(&spec, &tv()).is_err());
    }
}
