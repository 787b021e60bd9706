//! Singular values by one-sided Jacobi rotations.

use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::math;

/// Singular values of `a` in descending order.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    // Rows of `work` are the columns of `a` (or of `aᵀ` for wide input).
    let work_src = if a.ncols() > a.nrows() {
        a.clone()
    } else {
        a.transpose()
    };
    let k = work_src.nrows();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|i| work_src.row(i).to_vec()).collect();
    let eps = f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let alpha = math::dot(&cols[i], &cols[i]);
                let beta = math::dot(&cols[j], &cols[j]);
                let gamma = math::dot(&cols[i], &cols[j]);
                if gamma == 0.0 || math::abs(gamma) <= eps * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = math::copysign(1.0, zeta) / (math::abs(zeta) + math::hypot(1.0, zeta));
                let c = 1.0 / math::hypot(1.0, t);
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(j);
                for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                    let xi = *x;
                    let yj = *y;
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| math::norm2(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}
