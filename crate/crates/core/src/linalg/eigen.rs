//! Dense eigenvalue solvers.
//!
//! Symmetric input: Householder tridiagonalization and implicit QL.
//! General input: balancing, Householder reduction to Hessenberg form and
//! the Francis double-shift QR iteration.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;

const MAX_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    pub fn abs(self) -> f64 {
        math::hypot(self.re, self.im)
    }
}

/// All eigenvalues of a square matrix, unordered. Exactly symmetric input
/// goes through the symmetric solver.
pub fn dense_eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if a.asymmetry() == 0.0 {
        return Ok(symmetric_eigenvalues(a)?
            .into_iter()
            .map(Complex::real)
            .collect());
    }
    general_eigenvalues(a)
}

/// Eigenvalues of a symmetric matrix in ascending order; only the lower
/// triangle is trusted.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    assert!(a.is_square());
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(a.symmetrized());
    tql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Reduces to tridiagonal form; returns the diagonal and the off-diagonal
/// (`e[i]` couples `i` and `i+1`, `e[n-1] = 0`).
fn tridiagonalize(mut a: DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        d[k] = a.get(k, k);
        let lo = k + 1;
        let m = n - lo;
        v[..m].copy_from_slice(&a.row(k)[lo..]);
        let xnorm = math::norm2(&v[..m]);
        if xnorm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let alpha = -math::copysign(xnorm, v[0]);
        v[0] -= alpha;
        let vv = math::dot(&v[..m], &v[..m]);
        let tau = 2.0 / vv;
        for i in 0..m {
            p[i] = tau * math::dot(&a.row(lo + i)[lo..], &v[..m]);
        }
        let kk = 0.5 * tau * math::dot(&p[..m], &v[..m]);
        for i in 0..m {
            p[i] -= kk * v[i];
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.row_mut(lo + i)[lo..];
            for j in 0..m {
                row[j] -= vi * p[j] + wi * v[j];
            }
        }
        e[k] = alpha;
    }
    if n >= 2 {
        d[n - 2] = a.get(n - 2, n - 2);
        e[n - 2] = a.get(n - 1, n - 2);
    }
    d[n - 1] = a.get(n - 1, n - 1);
    e[n - 1] = 0.0;
    (d, e)
}

/// Implicit QL iteration on a symmetric tridiagonal matrix.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(d[m]) + math::abs(d[m + 1]);
                if math::abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_ITERS {
                return Err(Error::EigenNoConvergence {
                    index: l,
                    iterations: iter,
                });
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + math::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a general real matrix.
pub fn general_eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex>> {
    assert!(a.is_square());
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hqr(h)
}

fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += math::abs(a.get(j, i));
                    r += math::abs(a.get(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a.set(i, j, a.get(i, j) * inv);
                }
                for j in 0..n {
                    a.set(j, i, a.get(j, i) * f);
                }
            }
        }
    }
}

fn hessenberg(a: &mut DenseMatrix) {
    let n = a.nrows();
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let m = n - lo;
        for i in 0..m {
            v[i] = a.get(lo + i, k);
        }
        let xnorm = math::norm2(&v[..m]);
        if xnorm == 0.0 {
            continue;
        }
        let alpha = -math::copysign(xnorm, v[0]);
        v[0] -= alpha;
        let vv = math::dot(&v[..m], &v[..m]);
        if vv == 0.0 {
            continue;
        }
        let tau = 2.0 / vv;
        // Left: rows lo.., columns k..
        let mut s = vec![0.0; n - k];
        for i in 0..m {
            let vi = v[i];
            for (sj, &x) in s.iter_mut().zip(&a.row(lo + i)[k..]) {
                *sj += vi * x;
            }
        }
        for i in 0..m {
            let f = tau * v[i];
            let row = &mut a.row_mut(lo + i)[k..];
            for (x, sj) in row.iter_mut().zip(&s) {
                *x -= f * sj;
            }
        }
        // Right: all rows, columns lo..
        for i in 0..n {
            let row = &mut a.row_mut(i)[lo..];
            let t = tau * math::dot(row, &v[..m]);
            for (x, &vj) in row.iter_mut().zip(&v[..m]) {
                *x -= t * vj;
            }
        }
        a.set(lo, k, alpha);
        for i in lo + 1..n {
            a.set(i, k, 0.0);
        }
    }
}

fn hqr(mut a: DenseMatrix) -> Result<Vec<Complex>> {
    let n = a.nrows() as isize;
    let mut wri = vec![Complex::real(0.0); n as usize];
    if n == 0 {
        return Ok(wri);
    }
    let eps = f64::EPSILON;
    macro_rules! at {
        ($i:expr, $j:expr) => {
            a.get(($i) as usize, ($j) as usize)
        };
    }
    macro_rules! put {
        ($i:expr, $j:expr, $v:expr) => {{
            let val = $v;
            a.set(($i) as usize, ($j) as usize, val);
        }};
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += math::abs(at!(i, j));
        }
    }
    let mut nn = n - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut s, mut w, mut x, mut y, mut z): (f64, f64, f64, f64, f64);
    while nn >= 0 {
        let mut its = 0;
        let mut l;
        loop {
            l = nn;
            while l > 0 {
                s = math::abs(at!(l - 1, l - 1)) + math::abs(at!(l, l));
                if s == 0.0 {
                    s = anorm;
                }
                if math::abs(at!(l, l - 1)) <= eps * s {
                    put!(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            x = at!(nn, nn);
            if l == nn {
                wri[nn as usize] = Complex::real(x + t);
                nn -= 1;
            } else {
                y = at!(nn - 1, nn - 1);
                w = at!(nn, nn - 1) * at!(nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = math::sqrt(math::abs(q));
                    x += t;
                    if q >= 0.0 {
                        z = p + math::copysign(z, p);
                        wri[nn as usize - 1] = Complex::real(x + z);
                        wri[nn as usize] = Complex::real(x + z);
                        if z != 0.0 {
                            wri[nn as usize] = Complex::real(x - w / z);
                        }
                    } else {
                        wri[nn as usize] = Complex::new(x + p, -z);
                        wri[nn as usize - 1] = Complex::new(x + p, z);
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITERS {
                        return Err(Error::EigenNoConvergence {
                            index: nn as usize,
                            iterations: its,
                        });
                    }
                    if its > 0 && its % 10 == 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 0..=nn {
                            put!(i, i, at!(i, i) - x);
                        }
                        s = math::abs(at!(nn, nn - 1)) + math::abs(at!(nn - 1, nn - 2));
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    while m >= l {
                        z = at!(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / at!(m + 1, m) + at!(m, m + 1);
                        q = at!(m + 1, m + 1) - z - r - s;
                        r = at!(m + 2, m + 1);
                        s = math::abs(p) + math::abs(q) + math::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = math::abs(at!(m, m - 1)) * (math::abs(q) + math::abs(r));
                        let v = math::abs(p)
                            * (math::abs(at!(m - 1, m - 1))
                                + math::abs(z)
                                + math::abs(at!(m + 1, m + 1)));
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nn - 1 {
                        put!(i + 2, i, 0.0);
                        if i != m {
                            put!(i + 2, i - 1, 0.0);
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = at!(k, k - 1);
                            q = at!(k + 1, k - 1);
                            r = 0.0;
                            if k + 1 != nn {
                                r = at!(k + 2, k - 1);
                            }
                            x = math::abs(p) + math::abs(q) + math::abs(r);
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = math::copysign(math::sqrt(p * p + q * q + r * r), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    put!(k, k - 1, -at!(k, k - 1));
                                }
                            } else {
                                put!(k, k - 1, -s * x);
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = at!(k, j) + q * at!(k + 1, j);
                                if k + 1 != nn {
                                    p += r * at!(k + 2, j);
                                    put!(k + 2, j, at!(k + 2, j) - p * z);
                                }
                                put!(k + 1, j, at!(k + 1, j) - p * y);
                                put!(k, j, at!(k, j) - p * x);
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * at!(i, k) + y * at!(i, k + 1);
                                if k + 1 != nn {
                                    p += z * at!(i, k + 2);
                                    put!(i, k + 2, at!(i, k + 2) - p * r);
                                }
                                put!(i, k + 1, at!(i, k + 1) - p * q);
                                put!(i, k, at!(i, k) - p);
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(wri)
}
