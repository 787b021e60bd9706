//! The four commands.

use std::path::Path;

use mac_stokes::linalg::Identity;
use mac_stokes::math::{max_abs_diff, remove_mean};
use mac_stokes::operators::identities::{all_identities, IDENTITY_TOL};
use mac_stokes::probe::Probes;
use mac_stokes::sparse::CsrMatrix;
use mac_stokes::spectral::{
    analyze_steady, nonunitary_bound, verify_commutator_rank, verify_unsteady_bounds,
};
use mac_stokes::taylor::{
    reference_counts, sample_exact, TaylorRun, TaylorVortexParams, TABLE_KINDS, TABLE_RHOS,
};
use mac_stokes::{
    gmres, BoundaryKind, GmresConfig, GridSpec, PrecondKind, PreconditionerContext, ProblemParams,
    StokesOperators,
};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::output::{ensure_dir, export_matrices, fmt_f64, num, nums, write_csv, write_json};
use crate::CliError;

/// Domain side of the Taylor vortex runs.
pub const TAYLOR_LENGTH: f64 = 64.0;

/// Largest pressure grid for which `spectrum` also reports the commutator rank.
const COMMUTATOR_MAX_NP: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// False only when `identities` finds a violated identity.
    pub ok: bool,
    pub lines: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let command = cfg
        .command
        .ok_or_else(|| CliError::Usage("missing command".into()))?;
    ensure_dir(&cfg.output_dir)?;
    match command {
        Command::Identities => identities(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Solve => solve(cfg),
        Command::Taylor => taylor(cfg),
    }
}

fn unit_grid(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    GridSpec::square(cfg.nx, cfg.ny, 1.0, cfg.bc).map_err(|e| CliError::Usage(e.to_string()))
}

fn params(cfg: &RunConfig) -> Result<ProblemParams, CliError> {
    ProblemParams::new(cfg.rho, cfg.mu, cfg.dt).map_err(|e| CliError::Usage(e.to_string()))
}

fn header(cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(cfg.command.map(Command::name)));
    m.insert("nx".into(), json!(cfg.nx));
    m.insert("ny".into(), json!(cfg.ny));
    m.insert("bc".into(), json!(cfg.bc.name()));
    m
}

fn operator_matrices(ops: &StokesOperators) -> Vec<(&'static str, CsrMatrix)> {
    let n_p = ops.lc.nrows();
    let top = CsrMatrix::hstack(&[&ops.a, &ops.g]);
    let bottom = CsrMatrix::hstack(&[&ops.d.scaled(-1.0), &CsrMatrix::zeros(n_p, n_p)]);
    vec![
        ("A", ops.a.clone()),
        ("G", ops.g.clone()),
        ("D", ops.d.clone()),
        ("Lc", ops.lc.clone()),
        ("M", CsrMatrix::vstack(&[&top, &bottom])),
    ]
}

fn maybe_export(
    cfg: &RunConfig,
    ops: &StokesOperators,
    lines: &mut Vec<String>,
) -> Result<(), CliError> {
    if !cfg.export_matrices {
        return Ok(());
    }
    let mats = operator_matrices(ops);
    let refs: Vec<(&str, &CsrMatrix)> = mats.iter().map(|(n, m)| (*n, m)).collect();
    let paths = export_matrices(&cfg.output_dir, &refs)?;
    lines.push(format!("wrote {} matrices", paths.len()));
    Ok(())
}

fn identities(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let spec = unit_grid(cfg)?;
    let checks = all_identities(&spec)?;
    let ok = checks.iter().all(|c| c.holds(IDENTITY_TOL));
    let mut lines: Vec<String> = checks
        .iter()
        .map(|c| {
            let tag = if c.holds(IDENTITY_TOL) {
                "ok  "
            } else {
                "FAIL"
            };
            format!("{tag} {:<24} {:.3e}", c.name, c.rel_error)
        })
        .collect();
    let mut report = header(cfg);
    report.insert("tolerance".into(), num(IDENTITY_TOL));
    report.insert(
        "checks".into(),
        Value::Array(
            checks
                .iter()
                .map(|c| json!({"name": c.name, "rel_error": num(c.rel_error), "pass": c.holds(IDENTITY_TOL)}))
                .collect(),
        ),
    );
    report.insert("pass".into(), json!(ok));
    write_json(&cfg.output_dir.join("report.json"), &Value::Object(report))?;
    if cfg.export_matrices {
        let ops = StokesOperators::assemble(&spec, &ProblemParams::steady(1.0)?)?;
        maybe_export(cfg, &ops, &mut lines)?;
    }
    Ok(RunSummary { ok, lines })
}

fn spectrum(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let spec = unit_grid(cfg)?;
    let r = analyze_steady(&spec)?;
    let rows: Vec<Vec<String>> = r
        .eigenvalues
        .iter()
        .map(|&v| vec![fmt_f64(v), fmt_f64(0.0)])
        .collect();
    write_csv(&cfg.output_dir.join("spectrum.csv"), &["re", "im"], &rows)?;
    let mut lines = vec![
        format!(
            "dof {} pressure unknowns {}",
            r.dof_total,
            r.eigenvalues.len()
        ),
        format!(
            "non-unitary {} (nonzero {}, bound {}), zero {}, plateau stable {}",
            r.n_nonunitary,
            r.n_nonunitary_nonzero,
            nonunitary_bound(&spec),
            r.n_zero,
            r.plateau_stable()
        ),
        format!(
            "beta_est {:.6e} lambda_max {:.12}",
            r.beta_est, r.lambda_max
        ),
    ];
    let mut report = header(cfg);
    report.insert("dof_total".into(), json!(r.dof_total));
    report.insert("n_zero".into(), json!(r.n_zero));
    report.insert("n_unit".into(), json!(r.n_unit));
    report.insert("n_nonunitary".into(), json!(r.n_nonunitary));
    report.insert("n_nonunitary_nonzero".into(), json!(r.n_nonunitary_nonzero));
    report.insert("nonunitary_bound".into(), json!(nonunitary_bound(&spec)));
    report.insert("lambda_min_nonzero".into(), num(r.lambda_min_nonzero));
    report.insert("lambda_max".into(), num(r.lambda_max));
    report.insert("beta_est".into(), num(r.beta_est));
    report.insert(
        "plateau".into(),
        Value::Array(
            r.plateau
                .iter()
                .map(|&(tol, c)| json!({"unit_tol": num(tol), "n_nonunitary": c}))
                .collect(),
        ),
    );
    report.insert("plateau_stable".into(), json!(r.plateau_stable()));
    if spec.layout().n_p <= COMMUTATOR_MAX_NP {
        let c = verify_commutator_rank(&spec)?;
        report.insert(
            "commutator".into(),
            json!({
                "rank": c.rank,
                "expected_rank": c.expected_rank,
                "closed_form_rel_diff": c.closed_form_rel_diff.map(num),
                "nonzero_rows": c.nonzero_rows,
            }),
        );
        lines.push(format!("commutator rank {}", c.rank));
    }
    if !cfg.eps2_list.is_empty() {
        let reports = verify_unsteady_bounds(&spec, &cfg.eps2_list)?;
        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for u in &reports {
            for &v in &u.report.eigenvalues {
                rows.push(vec![fmt_f64(u.eps2), fmt_f64(v)]);
            }
            entries.push(json!({
                "eps2": num(u.eps2),
                "lambda_min_nonzero": num(u.report.lambda_min_nonzero),
                "lambda_max": num(u.report.lambda_max),
                "max_imag": num(u.report.max_imag),
                "n_nonunitary": u.report.n_nonunitary,
                "lower_ok": u.lower_ok,
                "upper_ok": u.upper_ok,
                "sigma_max_deviation": u.sigma.as_ref().map(|s| num(s.max_deviation)),
            }));
            lines.push(format!(
                "eps2 {:e}: eigenvalues in [{:.6e}, {:.12}] bounds {}",
                u.eps2,
                u.report.lambda_min_nonzero,
                u.report.lambda_max,
                if u.lower_ok && u.upper_ok {
                    "hold"
                } else {
                    "VIOLATED"
                }
            ));
        }
        write_csv(
            &cfg.output_dir.join("unsteady_spectrum.csv"),
            &["eps2", "re"],
            &rows,
        )?;
        report.insert("beta0_sq".into(), num(reports[0].beta0_sq));
        report.insert("unsteady".into(), Value::Array(entries));
    }
    write_json(&cfg.output_dir.join("report.json"), &Value::Object(report))?;
    if cfg.export_matrices {
        let ops = StokesOperators::assemble(&spec, &ProblemParams::steady(1.0)?)?;
        maybe_export(cfg, &ops, &mut lines)?;
    }
    Ok(RunSummary { ok: true, lines })
}

fn gmres_config(cfg: &RunConfig) -> GmresConfig {
    GmresConfig {
        rel_tol: cfg.tol,
        max_iters: cfg.max_iters,
        side: cfg.effective_side(),
        record_residuals: true,
    }
}

fn solve(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let spec = unit_grid(cfg)?;
    let params = params(cfg)?;
    let ops = StokesOperators::assemble(&spec, &params)?;
    let ctx = PreconditionerContext::build(ops, cfg.precond)?;
    let lay = spec.layout();
    let mut rhs = Probes::new(cfg.seed).block_mean_zero_pressure(lay);
    if params.steady && cfg.bc == BoundaryKind::PeriodicAll {
        let (u, v) = rhs.velocity_mut().split_at_mut(lay.n_u);
        remove_mean(u);
        remove_mean(v);
    }
    let m = ctx.ops().saddle();
    let gcfg = gmres_config(cfg);
    let (_, rep) = if cfg.precond == PrecondKind::None {
        gmres::<_, Identity>(&m, None, rhs.as_slice(), &gcfg)?
    } else {
        let p = ctx.operator(cfg.precond)?;
        gmres(&m, Some(&p), rhs.as_slice(), &gcfg)?
    };
    let rows: Vec<Vec<String>> = rep
        .residual_history
        .iter()
        .enumerate()
        .map(|(k, &r)| vec![k.to_string(), fmt_f64(r)])
        .collect();
    write_csv(
        &cfg.output_dir.join("residuals.csv"),
        &["iteration", "relative_residual"],
        &rows,
    )?;
    let mut report = header(cfg);
    report.insert("rho".into(), num(cfg.rho));
    report.insert("mu".into(), num(cfg.mu));
    report.insert("dt".into(), num(cfg.dt));
    report.insert("steady".into(), json!(params.steady));
    report.insert("precond".into(), json!(cfg.precond.name()));
    report.insert("side".into(), json!(gcfg.side.name()));
    report.insert("tol".into(), num(cfg.tol));
    report.insert("seed".into(), json!(cfg.seed));
    report.insert("unknowns".into(), json!(lay.total));
    report.insert("iterations".into(), json!(rep.iterations));
    report.insert("converged".into(), json!(rep.converged));
    report.insert(
        "final_relative_residual".into(),
        num(rep.final_relative_residual),
    );
    report.insert(
        "true_relative_residual".into(),
        num(rep.true_relative_residual),
    );
    report.insert(
        "preconditioned_relative_residual".into(),
        num(rep.preconditioned_relative_residual),
    );
    report.insert("residual_history".into(), nums(&rep.residual_history));
    write_json(&cfg.output_dir.join("report.json"), &Value::Object(report))?;
    let mut lines = vec![format!(
        "{} ({}) iterations {} converged {} true residual {:.3e}",
        cfg.precond.name(),
        gcfg.side.name(),
        rep.iterations,
        rep.converged,
        rep.true_relative_residual
    )];
    maybe_export(cfg, ctx.ops(), &mut lines)?;
    Ok(RunSummary { ok: true, lines })
}

struct TaylorRow {
    rho: f64,
    kind: PrecondKind,
    side: mac_stokes::Side,
    iterations: Vec<usize>,
    converged: bool,
    error: f64,
}

fn taylor(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    if cfg.nx != cfg.ny {
        return Err(CliError::Usage(
            "taylor needs nx == ny (square domain)".into(),
        ));
    }
    let h = TAYLOR_LENGTH / cfg.nx as f64;
    let spec = GridSpec::square(cfg.nx, cfg.ny, h, cfg.bc)?;
    let base = TaylorVortexParams {
        l: TAYLOR_LENGTH,
        mu: cfg.mu,
        rho: cfg.rho,
        dt: cfg.dt,
        t0: 0.0,
    };
    let jobs: Vec<(f64, Vec<(PrecondKind, mac_stokes::Side)>)> = if cfg.full_table {
        TABLE_RHOS
            .iter()
            .map(|&r| {
                (
                    r,
                    TABLE_KINDS.iter().map(|&k| (k, k.default_side())).collect(),
                )
            })
            .collect()
    } else {
        vec![(cfg.rho, vec![(cfg.precond, cfg.effective_side())])]
    };
    let gcfg = gmres_config(cfg);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for (rho, kinds) in jobs {
        let tv = TaylorVortexParams { rho, ..base };
        let mut run = TaylorRun::new(&spec, &tv)
            .map_err(|e| CliError::Usage(e.to_string()))?
            .with_gmres(gcfg);
        if !cfg.full_table {
            maybe_export(cfg, run.context().ops(), &mut lines)?;
        }
        for (kind, side) in kinds {
            let (cell, state) = run.run(kind, side, cfg.steps)?;
            let exact = sample_exact(&spec, &tv, tv.time(cfg.steps));
            rows.push(TaylorRow {
                rho,
                kind,
                side,
                converged: cell.converged,
                error: max_abs_diff(state.velocity(), exact.velocity()),
                iterations: cell.iterations,
            });
        }
    }
    let reference = |r: &TaylorRow| -> Option<usize> {
        if spec.nx != 64 || cfg.mu != 1.0 || cfg.dt != 0.5 {
            return None;
        }
        let ri = TABLE_RHOS.iter().position(|&x| x == r.rho)?;
        let ki = TABLE_KINDS.iter().position(|&k| k == r.kind)?;
        Some(reference_counts(cfg.bc)[ri][ki])
    };
    let mut header_cols = vec!["bc", "rho", "precond", "side"];
    let step_names: Vec<String> = (1..=cfg.steps).map(|s| format!("step{s}")).collect();
    header_cols.extend(step_names.iter().map(String::as_str));
    header_cols.extend(["converged", "reference", "velocity_error"]);
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![
                cfg.bc.name().to_string(),
                fmt_f64(r.rho),
                r.kind.name().into(),
                r.side.name().into(),
            ];
            v.extend(r.iterations.iter().map(usize::to_string));
            v.push(r.converged.to_string());
            v.push(reference(r).map_or(String::new(), |p| p.to_string()));
            v.push(fmt_f64(r.error));
            v
        })
        .collect();
    write_csv(&cfg.output_dir.join("table.csv"), &header_cols, &csv_rows)?;
    lines.push(format!(
        "{:>8} {:>9} {:>6}  {:<12} {:>9} {}",
        "rho", "precond", "side", "iterations", "reference", "converged"
    ));
    for r in &rows {
        let its: Vec<String> = r.iterations.iter().map(usize::to_string).collect();
        lines.push(format!(
            "{:>8} {:>9} {:>6}  {:<12} {:>9} {}",
            r.rho,
            r.kind.name(),
            r.side.name(),
            its.join(" "),
            reference(r).map_or("-".into(), |p| p.to_string()),
            r.converged
        ));
    }
    let mut report = header(cfg);
    report.insert("length".into(), num(TAYLOR_LENGTH));
    report.insert("h".into(), num(h));
    report.insert("mu".into(), num(cfg.mu));
    report.insert("dt".into(), num(cfg.dt));
    report.insert("steps".into(), json!(cfg.steps));
    report.insert("tol".into(), num(cfg.tol));
    report.insert(
        "cells".into(),
        Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "rho": num(r.rho),
                        "precond": r.kind.name(),
                        "side": r.side.name(),
                        "iterations": r.iterations,
                        "converged": r.converged,
                        "reference": reference(r),
                        "velocity_error": num(r.error),
                    })
                })
                .collect(),
        ),
    );
    write_json(&cfg.output_dir.join("report.json"), &Value::Object(report))?;
    Ok(RunSummary { ok: true, lines })
}

/// Writes the merged configuration next to the outputs.
pub fn write_config(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let path = dir.join("config.txt");
    std::fs::write(&path, cfg.serialize()).map_err(|source| CliError::Io { path, source })
}
