//! Schur complement spectra and the structure of preconditioned systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::grid::{BoundaryKind, GridSpec};
use crate::linalg::eigen::{general_eigenvalues, symmetric_eigenvalues, Complex};
use crate::linalg::svd::numerical_rank;
use crate::linalg::{to_dense, LinearOperator};
use crate::math;
use crate::operators::{kron, ProblemParams, StokesOperators};
use crate::precond::{PrecondKind, PreconditionedOperator, PreconditionerContext, EXACT_SCHUR_CAP};
use crate::probe::Probes;

/// Relative tolerance for `|λ - 1|` when counting unit eigenvalues.
pub const UNIT_TOL: f64 = 1e-8;
/// `|λ| <= ZERO_TOL * λ_max` counts as a zero eigenvalue.
pub const ZERO_TOL: f64 = 1e-10;
/// Unit tolerances scanned for the plateau check.
pub const PLATEAU_TOLS: [f64; 3] = [1e-6, 1e-8, 1e-10];

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest imaginary part discarded when the spectrum came from a
    /// nonsymmetric eigensolve.
    pub max_imag: f64,
    pub n_zero: usize,
    pub n_unit: usize,
    /// Eigenvalues not equal to 1, the zero eigenvalue included.
    pub n_nonunitary: usize,
    /// Eigenvalues neither 0 nor 1.
    pub n_nonunitary_nonzero: usize,
    pub lambda_min_nonzero: f64,
    pub lambda_max: f64,
    pub beta_est: f64,
    pub dof_total: usize,
    /// `(unit_tol, n_nonunitary)` over [`PLATEAU_TOLS`].
    pub plateau: Vec<(f64, usize)>,
}

impl SpectralReport {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, max_imag: f64, dof_total: usize) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let lambda_max = eigenvalues.iter().fold(0.0f64, |m, &v| m.max(math::abs(v)));
        let zero_cut = ZERO_TOL * lambda_max;
        let is_zero = |v: f64| math::abs(v) <= zero_cut;
        let is_unit = |v: f64, tol: f64| math::abs(v - 1.0) <= tol * math::abs(v).max(1.0);
        let n_zero = eigenvalues.iter().filter(|&&v| is_zero(v)).count();
        let n_unit = eigenvalues
            .iter()
            .filter(|&&v| is_unit(v, UNIT_TOL))
            .count();
        let n_nonunitary = eigenvalues.len() - n_unit;
        let n_nonunitary_nonzero = eigenvalues
            .iter()
            .filter(|&&v| !is_zero(v) && !is_unit(v, UNIT_TOL))
            .count();
        let lambda_min_nonzero = eigenvalues
            .iter()
            .copied()
            .filter(|&v| !is_zero(v))
            .fold(f64::INFINITY, f64::min);
        let plateau = PLATEAU_TOLS
            .iter()
            .map(|&tol| {
                let units = eigenvalues.iter().filter(|&&v| is_unit(v, tol)).count();
                (tol, eigenvalues.len() - units)
            })
            .collect();
        SpectralReport {
            beta_est: math::sqrt(lambda_min_nonzero.max(0.0)),
            eigenvalues,
            max_imag,
            n_zero,
            n_unit,
            n_nonunitary,
            n_nonunitary_nonzero,
            lambda_min_nonzero,
            lambda_max,
            dof_total,
            plateau,
        }
    }

    /// True when the non-unitary count does not depend on the unit tolerance.
    pub fn plateau_stable(&self) -> bool {
        self.plateau.iter().all(|&(_, c)| c == self.n_nonunitary)
    }
}

/// Upper bound on the number of non-unitary Schur eigenvalues (zero
/// included) for the steady problem.
pub fn nonunitary_bound(spec: &GridSpec) -> usize {
    match spec.bc {
        BoundaryKind::DirichletAll => 2 * (spec.nx - 1) + 2 * (spec.ny - 1),
        BoundaryKind::PeriodicXDirichletY => 2 * spec.nx,
        BoundaryKind::PeriodicAll => 1,
    }
}

/// Dense `S = -D A⁻¹ G`.
pub fn schur_complement_dense(spec: &GridSpec, params: &ProblemParams) -> Result<DenseMatrix> {
    let n_p = spec.layout().n_p;
    if n_p > EXACT_SCHUR_CAP {
        return Err(Error::SizeCap {
            size: n_p,
            cap: EXACT_SCHUR_CAP,
        });
    }
    let ops = StokesOperators::assemble(spec, params)?;
    Ok(PreconditionerContext::new(ops)?.schur_complement())
}

/// Eigenvalues of a Schur complement that is symmetric up to rounding.
fn symmetric_spectrum(s: &DenseMatrix) -> Result<Vec<f64>> {
    let asym = s.asymmetry();
    if asym > 1e-10 * s.max_abs().max(1.0) {
        return Err(Error::InvalidParams("Schur complement is not symmetric"));
    }
    symmetric_eigenvalues(&s.symmetrized())
}

/// Spectrum of the steady Schur complement with `mu = 1`.
pub fn analyze_steady(spec: &GridSpec) -> Result<SpectralReport> {
    let params = ProblemParams::steady(1.0)?;
    let s = schur_complement_dense(spec, &params)?;
    let ev = symmetric_spectrum(&s)?;
    Ok(SpectralReport::from_eigenvalues(
        ev,
        0.0,
        spec.layout().total,
    ))
}

/// Eigenvalues of `𝕊⁻¹ S` obtained from the quadratic in `σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaCheck {
    /// Recovered `λ = σ(1-σ)`, ascending.
    pub lambdas: Vec<f64>,
    /// Largest distance to the directly computed nonzero eigenvalues.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnsteadyReport {
    pub eps2: f64,
    /// Spectrum of `𝕊⁻¹ S` in the scaled system.
    pub report: SpectralReport,
    /// Steady `beta_est²` for the same grid.
    pub beta0_sq: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub sigma: Option<SigmaCheck>,
}

/// Largest grid for which the σ cross-check is run.
pub const SIGMA_ROUTE_MAX_N: usize = 8;

/// Spectra of `𝕊⁻¹ S` for the scaled system `A = I - ε² L`,
/// `𝕊⁻¹ = (-L^c)⁻¹ + ε² I`, checked against `[β₀², 1]`.
pub fn verify_unsteady_bounds(spec: &GridSpec, eps2_list: &[f64]) -> Result<Vec<UnsteadyReport>> {
    let steady = analyze_steady(spec)?;
    let beta0_sq = steady.lambda_min_nonzero;
    let mut out = Vec::with_capacity(eps2_list.len());
    for &eps2 in eps2_list {
        if !(eps2 > 0.0) {
            return Err(Error::InvalidParams("eps2 must be positive"));
        }
        let params = ProblemParams::scaled(eps2)?;
        let ctx = PreconditionerContext::new(StokesOperators::assemble(spec, &params)?)?;
        let s = ctx.schur_complement();
        let product = apply_columns(&s, |c| ctx.approx_schur_inverse(c));
        let ev = general_eigenvalues(&product)?;
        let max_imag = ev.iter().fold(0.0f64, |m, e| m.max(math::abs(e.im)));
        let report = SpectralReport::from_eigenvalues(
            ev.iter().map(|e| e.re).collect(),
            max_imag,
            spec.layout().total,
        );
        let nonzero: Vec<f64> = report
            .eigenvalues
            .iter()
            .copied()
            .filter(|&v| math::abs(v) > ZERO_TOL * report.lambda_max)
            .collect();
        let lower_ok = nonzero.iter().all(|&v| v >= beta0_sq * (1.0 - 1e-6));
        let upper_ok = nonzero.iter().all(|&v| v <= 1.0 + 1e-8);
        let sigma = if spec.nx <= SIGMA_ROUTE_MAX_N && spec.ny <= SIGMA_ROUTE_MAX_N {
            Some(sigma_route(&ctx, &nonzero)?)
        } else {
            None
        };
        out.push(UnsteadyReport {
            eps2,
            report,
            beta0_sq,
            lower_ok,
            upper_ok,
            sigma,
        });
    }
    Ok(out)
}

fn apply_columns(m: &DenseMatrix, f: impl Fn(&[f64]) -> Vec<f64>) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..m.ncols()).map(|j| f(&m.column(j))).collect();
    DenseMatrix::from_columns(m.nrows(), &cols)
}

/// Eigenvalues `σ` of `[[I, A⁻¹G], [𝕊⁻¹D, 0]]` satisfy `σ(1-σ) = λ(𝕊⁻¹S)`.
fn sigma_route(ctx: &PreconditionerContext, direct_nonzero: &[f64]) -> Result<SigmaCheck> {
    let ops = ctx.ops();
    let (nv, np) = (ops.a.nrows(), ops.lc.nrows());
    let n = nv + np;
    let mut big = DenseMatrix::zeros(n, n);
    for i in 0..nv {
        big.set(i, i, 1.0);
    }
    let g = ops.g.to_dense();
    let ainv_g = apply_columns(&g, |c| ctx.solve_momentum(c));
    let d = ops.d.to_dense();
    let sd = apply_columns(&d, |c| ctx.approx_schur_inverse(c));
    for i in 0..nv {
        for j in 0..np {
            big.set(i, nv + j, ainv_g.get(i, j));
        }
    }
    for i in 0..np {
        for j in 0..nv {
            big.set(nv + i, j, sd.get(i, j));
        }
    }
    let mut sig = general_eigenvalues(&big)?;
    // n_vel - n_p + 1 roots at σ = 1 and one at σ = 0 carry no information.
    let drop_one = nv + 1 - np;
    sig.sort_by(|a, b| dist(*a, 1.0).total_cmp(&dist(*b, 1.0)));
    let mut rest: Vec<Complex> = sig.split_off(drop_one);
    rest.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    rest.remove(0);
    let mut lambdas: Vec<f64> = rest
        .iter()
        .map(|s| {
            // σ(1-σ) for complex σ
            s.re - (s.re * s.re - s.im * s.im)
        })
        .collect();
    lambdas.sort_by(f64::total_cmp);
    let lambdas: Vec<f64> = lambdas
        .chunks(2)
        .map(|c| 0.5 * (c[0] + c[c.len() - 1]))
        .collect();
    let max_deviation = if lambdas.len() == direct_nonzero.len() {
        lambdas
            .iter()
            .zip(direct_nonzero)
            .fold(0.0f64, |m, (a, b)| m.max(math::abs(a - b)))
    } else {
        f64::INFINITY
    };
    Ok(SigmaCheck {
        lambdas,
        max_deviation,
    })
}

fn dist(z: Complex, re: f64) -> f64 {
    math::hypot(z.re - re, z.im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCheck {
    pub rank: usize,
    /// `4(n-1)` style expectation: `2(nx-1) + 2(ny-1)` for Dirichlet walls, 0 when fully periodic.
    pub expected_rank: Option<usize>,
    /// Relative max difference to the closed Kronecker form (Dirichlet only).
    pub closed_form_rel_diff: Option<f64>,
    /// Rows that are not identically zero.
    pub nonzero_rows: usize,
}

/// Numerical rank of `(A - G G*) G` for steady flow with `A = -L`.
pub fn verify_commutator_rank(spec: &GridSpec) -> Result<CommutatorCheck> {
    let ops = StokesOperators::assemble(spec, &ProblemParams::steady(1.0)?)?;
    let c = ops.commutator();
    let rank = if c.max_abs() == 0.0 {
        0
    } else {
        numerical_rank(&c.to_dense(), 1e-8)
    };
    let (expected_rank, closed_form_rel_diff) = match spec.bc {
        BoundaryKind::DirichletAll => {
            let closed = kron::dirichlet_commutator(spec)?;
            let rel = c.max_abs_diff(&closed) / closed.max_abs();
            (Some(2 * (spec.nx - 1) + 2 * (spec.ny - 1)), Some(rel))
        }
        BoundaryKind::PeriodicAll => (Some(0), None),
        BoundaryKind::PeriodicXDirichletY => (None, None),
    };
    Ok(CommutatorCheck {
        rank,
        expected_rank,
        closed_form_rel_diff,
        nonzero_rows: crate::operators::nonzero_rows(&c).len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub kind: PrecondKind,
    /// `max |(P⁻¹M)_{21}|`.
    pub lower_left_max: f64,
    /// `max |((P⁻¹M - I)² x)|` over mean-zero-pressure probes, relative to `|x|`.
    pub square_defect: f64,
    /// `max |D (I - G (L^c)⁻¹ D) w| / |w|` over random velocity probes.
    pub projected_divergence: f64,
    /// Spectrum of the dense `P⁻¹ M`.
    pub eigenvalues: Vec<Complex>,
    pub dense: DenseMatrix,
}

/// Number of probes used by the structure checks.
pub const STRUCTURE_PROBES: usize = 20;

/// Materializes `P⁻¹M` and checks its block structure.
pub fn verify_preconditioned_structure(
    spec: &GridSpec,
    params: &ProblemParams,
    kind: PrecondKind,
    seed: u64,
) -> Result<StructureReport> {
    let ops = StokesOperators::assemble(spec, params)?;
    let ctx = PreconditionerContext::build(ops, kind)?;
    structure_of(&ctx, kind, seed)
}

pub fn structure_of(
    ctx: &PreconditionerContext,
    kind: PrecondKind,
    seed: u64,
) -> Result<StructureReport> {
    let op = PreconditionedOperator {
        precond: ctx.operator(kind)?,
    };
    let dense = to_dense(&op);
    let lay = ctx.ops().spec.layout();
    let nv = lay.n_vel();
    let mut lower_left_max = 0.0f64;
    for i in nv..lay.total {
        for j in 0..nv {
            lower_left_max = lower_left_max.max(math::abs(dense.get(i, j)));
        }
    }
    let mut probes = Probes::new(seed);
    let mut square_defect = 0.0f64;
    let mut y = vec![0.0; lay.total];
    let mut z = vec![0.0; lay.total];
    for _ in 0..STRUCTURE_PROBES {
        let x = probes.block_mean_zero_pressure(lay);
        let x = x.as_slice();
        op.apply(x, &mut y);
        math::axpy(-1.0, x, &mut y);
        op.apply(&y, &mut z);
        math::axpy(-1.0, &y, &mut z);
        square_defect = square_defect.max(math::norm2(&z) / math::norm2(x));
    }
    let mut projected_divergence = 0.0f64;
    let ops = ctx.ops();
    for _ in 0..STRUCTURE_PROBES {
        let w = probes.vector(nv);
        let dw = ops.d.mul_vec(&w);
        // (L^c)⁻¹ = -(-L^c)⁻¹
        let phi = ctx.solve_poisson(&dw);
        let mut proj = w.clone();
        ops.g.mul_vec_add(1.0, &phi, &mut proj);
        let div = ops.d.mul_vec(&proj);
        projected_divergence = projected_divergence.max(math::norm2(&div) / math::norm2(&w));
    }
    let eigenvalues = general_eigenvalues(&dense)?;
    Ok(StructureReport {
        kind,
        lower_left_max,
        square_defect,
        projected_divergence,
        eigenvalues,
        dense,
    })
}

/// Greedy matching distance between two eigenvalue multisets.
pub fn multiset_distance(a: &[Complex], b: &[Complex]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut sorted: Vec<Complex> = a.to_vec();
    sorted.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut worst = 0.0f64;
    for x in &sorted {
        let mut best = f64::INFINITY;
        let mut best_k = 0;
        for (k, y) in b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = math::hypot(x.re - y.re, x.im - y.im);
            if d < best {
                best = d;
                best_k = k;
            }
        }
        used[best_k] = true;
        worst = worst.max(best);
    }
    worst
}

/// Replaces every cluster of eigenvalues (single linkage within `radius`)
/// by copies of its mean.
///
/// Eigenvalues of a Jordan block of size `k` are only computable to about
/// `eps^(1/k)`, while the mean of the cluster stays accurate to rounding.
pub fn cluster_means(values: &[Complex], radius: f64) -> Vec<Complex> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (values[i], values[j]);
            if math::hypot(a.re - b.re, a.im - b.im) <= radius {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                label[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut sums = vec![(0.0f64, 0.0f64, 0usize); n];
    for (i, v) in values.iter().enumerate() {
        let r = root(&mut label, i);
        sums[r].0 += v.re;
        sums[r].1 += v.im;
        sums[r].2 += 1;
    }
    (0..n)
        .map(|i| {
            let (re, im, c) = sums[root(&mut label, i)];
            Complex::new(re / c as f64, im / c as f64)
        })
        .collect()
}

/// [`multiset_distance`] after [`cluster_means`] on both sides.
pub fn clustered_multiset_distance(a: &[Complex], b: &[Complex], radius: f64) -> f64 {
    multiset_distance(&cluster_means(a, radius), &cluster_means(b, radius))
}
