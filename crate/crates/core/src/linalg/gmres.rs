//! Full (unrestarted) GMRES with modified Gram-Schmidt Arnoldi.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::LinearOperator;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Some(Side::Left),
            "right" => Some(Side::Right),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    pub rel_tol: f64,
    pub max_iters: usize,
    pub side: Side,
    pub record_residuals: bool,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            rel_tol: 1e-10,
            max_iters: 500,
            side: Side::Left,
            record_residuals: true,
        }
    }
}

impl GmresConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParams("rel_tol must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iterations: usize,
    /// Relative Arnoldi residual per iteration, starting with 1 at iteration 0.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Last Arnoldi residual: `|P⁻¹(b - Mx)| / |P⁻¹b|` for left and
    /// `|b - Mx| / |b|` for right preconditioning.
    pub final_relative_residual: f64,
    /// Recomputed `|b - Mx| / |b|`.
    pub true_relative_residual: f64,
    /// Recomputed `|P⁻¹(b - Mx)| / |P⁻¹b|`.
    pub preconditioned_relative_residual: f64,
}

/// Solves `M x = b` from a zero initial guess. `precond` applies `P⁻¹`.
pub fn gmres<M, P>(
    m: &M,
    precond: Option<&P>,
    b: &[f64],
    cfg: &GmresConfig,
) -> Result<(Vec<f64>, IterationReport)>
where
    M: LinearOperator + ?Sized,
    P: LinearOperator + ?Sized,
{
    cfg.validate()?;
    let n = m.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if let Some(p) = precond {
        if p.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.dim(),
            });
        }
    }
    let apply_p = |x: &[f64], y: &mut [f64]| match precond {
        Some(p) => p.apply(x, y),
        None => y.copy_from_slice(x),
    };

    let mut r0 = vec![0.0; n];
    match cfg.side {
        Side::Left => apply_p(b, &mut r0),
        Side::Right => r0.copy_from_slice(b),
    }
    let beta = math::norm2(&r0);
    if beta == 0.0 {
        let report = IterationReport {
            iterations: 0,
            residual_history: if cfg.record_residuals {
                vec![0.0]
            } else {
                Vec::new()
            },
            converged: true,
            final_relative_residual: 0.0,
            true_relative_residual: 0.0,
            preconditioned_relative_residual: 0.0,
        };
        return Ok((vec![0.0; n], report));
    }

    let cap = cfg.max_iters.min(n.max(1));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cap + 1);
    basis.push(r0.iter().map(|v| v / beta).collect());
    // Hessenberg columns, each of length k+2.
    let mut hcols: Vec<Vec<f64>> = Vec::with_capacity(cap);
    let mut cs: Vec<f64> = Vec::with_capacity(cap);
    let mut sn: Vec<f64> = Vec::with_capacity(cap);
    let mut g = vec![0.0; cap + 1];
    g[0] = beta;
    let mut history = Vec::new();
    if cfg.record_residuals {
        history.push(1.0);
    }
    let mut tmp = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut rel = 1.0;
    let mut k = 0;
    while k < cap {
        match cfg.side {
            Side::Left => {
                m.apply(&basis[k], &mut tmp);
                apply_p(&tmp, &mut w);
            }
            Side::Right => {
                apply_p(&basis[k], &mut tmp);
                m.apply(&tmp, &mut w);
            }
        }
        let w0 = math::norm2(&w);
        let mut h = vec![0.0; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = math::dot(&w, v);
            h[i] = hij;
            math::axpy(-hij, v, &mut w);
        }
        let wnorm = math::norm2(&w);
        h[k + 1] = wnorm;
        for i in 0..k {
            let t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        let denom = math::hypot(h[k], h[k + 1]);
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (h[k] / denom, h[k + 1] / denom)
        };
        cs.push(c);
        sn.push(s);
        h[k] = denom;
        h[k + 1] = 0.0;
        g[k + 1] = -s * g[k];
        g[k] *= c;
        hcols.push(h);
        k += 1;
        rel = math::abs(g[k]) / beta;
        if cfg.record_residuals {
            history.push(rel);
        }
        // Happy breakdown: the Krylov space is invariant.
        if rel < cfg.rel_tol || wnorm <= 1e-14 * w0 {
            break;
        }
        basis.push(w.iter().map(|v| v / wnorm).collect());
    }

    // Back substitution for the triangular system.
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= hcols[j][i] * y[j];
        }
        y[i] = if hcols[i][i] != 0.0 {
            s / hcols[i][i]
        } else {
            0.0
        };
    }
    let mut z = vec![0.0; n];
    for (yi, v) in y.iter().zip(&basis) {
        math::axpy(*yi, v, &mut z);
    }
    let x = match cfg.side {
        Side::Left => z,
        Side::Right => {
            let mut x = vec![0.0; n];
            apply_p(&z, &mut x);
            x
        }
    };

    m.apply(&x, &mut tmp);
    let r: Vec<f64> = b.iter().zip(&tmp).map(|(bi, mi)| bi - mi).collect();
    let true_rel = math::norm2(&r) / math::norm2(b);
    apply_p(&r, &mut tmp);
    let mut pb = vec![0.0; n];
    apply_p(b, &mut pb);
    let pb_norm = math::norm2(&pb);
    let prec_rel = if pb_norm > 0.0 {
        math::norm2(&tmp) / pb_norm
    } else {
        0.0
    };
    let report = IterationReport {
        iterations: k,
        residual_history: history,
        converged: rel < cfg.rel_tol,
        final_relative_residual: rel,
        true_relative_residual: true_rel,
        preconditioned_relative_residual: prec_rel,
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{DenseLu, DenseMatrix};
    use crate::linalg::Identity;

    fn test_matrix(n: usize) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            a.set(i, i, 4.0 + i as f64 * 0.1);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.5);
            }
            if i + 3 < n {
                a.set(i, i + 3, 0.3);
            }
        }
        a
    }

    #[test]
    fn identity_converges_in_one_step() {
        let b = [1.0, 2.0, 3.0];
        let (x, rep) =
            gmres::<_, Identity>(&Identity(3), None, &b, &GmresConfig::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert!(math::max_abs_diff(&x, &b) < 1e-14);
    }

    #[test]
    fn matches_direct_solve() {
        let n = 30;
        let a = test_matrix(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let direct = DenseLu::new(&a).unwrap().solve(&b);
        for side in [Side::Left, Side::Right] {
            let cfg = GmresConfig {
                side,
                ..GmresConfig::default()
            };
            let (x, rep) = gmres::<_, Identity>(&a, None, &b, &cfg).unwrap();
            assert!(rep.converged);
            assert!(math::max_abs_diff(&x, &direct) < 1e-8);
            for w in rep.residual_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-13);
            }
            assert_eq!(rep.residual_history[0], 1.0);
        }
    }

    #[test]
    fn exact_preconditioner_and_sides() {
        let n = 12;
        let a = test_matrix(n);
        let inv = {
            let lu = DenseLu::new(&a).unwrap();
            let cols: Vec<Vec<f64>> = (0..n)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    lu.solve(&e)
                })
                .collect();
            DenseMatrix::from_columns(n, &cols)
        };
        let b = vec![1.0; n];
        for side in [Side::Left, Side::Right] {
            let cfg = GmresConfig {
                side,
                ..GmresConfig::default()
            };
            let (_, rep) = gmres(&a, Some(&inv), &b, &cfg).unwrap();
            assert_eq!(rep.iterations, 1);
            assert!(rep.true_relative_residual < 1e-12);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let n = 20;
        let a = test_matrix(n);
        let b = vec![1.0; n];
        let cfg = GmresConfig {
            max_iters: 2,
            ..GmresConfig::default()
        };
        let (_, rep) = gmres::<_, Identity>(&a, None, &b, &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 2);
        let bad = GmresConfig {
            rel_tol: 0.0,
            ..GmresConfig::default()
        };
        assert!(gmres::<_, Identity>(&a, None, &b, &bad).is_err());
    }

    #[test]
    fn zero_rhs() {
        let a = test_matrix(4);
        let (x, rep) = gmres::<_, Identity>(&a, None, &[0.0; 4], &GmresConfig::default()).unwrap();
        assert_eq!(x, vec![0.0; 4]);
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
    }
}
