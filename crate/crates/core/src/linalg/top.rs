//! Largest eigenpair of a real symmetric matrix.
//!
//! A short Lanczos run from a warm start proposes a Ritz value `theta`. A
//! successful Cholesky factorization of `sigma I - A` with `sigma` slightly
//! above `theta` proves that nothing lies above `sigma`, and the same factor
//! drives a couple of inverse-iteration steps that polish the vector. When
//! the certificate fails the full decomposition is used instead.

use alloc::vec;
use alloc::vec::Vec;

use super::eigen::symmetric_eigen;
use crate::error::{Error, Result};

const MAX_LANCZOS_STEPS: usize = 64;
const RITZ_RTOL: f64 = 1e-10;
const SHIFT_RTOLS: [f64; 2] = [1e-11, 1e-9];
const INVERSE_STEPS: usize = 2;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn matvec(a: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = dot(&a[i * n..(i + 1) * n], x);
    }
}

/// Largest eigenvalue of a real symmetric matrix (row-major, both triangles
/// filled) and a unit eigenvector for it.
///
/// `start` is a guess for the eigenvector; it only affects speed and, for a
/// degenerate top eigenvalue, which vector of the eigenspace is returned.
pub fn top_eigenpair(matrix: &[f64], n: usize, start: &[f64]) -> Result<(f64, Vec<f64>)> {
    if n == 0 || matrix.len() != n * n || start.len() != n {
        return Err(Error::DimensionMismatch {
            left: n * n,
            right: matrix.len(),
        });
    }
    if let Some(pair) = certified_lanczos(matrix, n, start) {
        return Ok(pair);
    }
    let eig = symmetric_eigen(matrix, n)?;
    Ok((eig.values[n - 1], eig.vector(n - 1)))
}

fn certified_lanczos(a: &[f64], n: usize, start: &[f64]) -> Option<(f64, Vec<f64>)> {
    let (theta, u) = lanczos(a, n, start)?;
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Some((0.0, u));
    }
    for rtol in SHIFT_RTOLS {
        let sigma = theta + rtol * theta.abs().max(scale);
        let Some(l) = cholesky_shifted(a, n, sigma) else {
            continue;
        };
        let mut y = u.clone();
        for _ in 0..INVERSE_STEPS {
            cholesky_solve(&l, n, &mut y);
            let ny = norm(&y);
            if !(ny > 0.0 && ny.is_finite()) {
                return None;
            }
            y.iter_mut().for_each(|x| *x /= ny);
        }
        let mut ay = vec![0.0; n];
        matvec(a, &y, &mut ay);
        return Some((dot(&y, &ay), y));
    }
    None
}

/// Lanczos with full reorthogonalization; returns the top Ritz pair.
fn lanczos(a: &[f64], n: usize, start: &[f64]) -> Option<(f64, Vec<f64>)> {
    // A fixed irrational-stride perturbation keeps the start from being
    // exactly orthogonal to the top eigenvector.
    let s = norm(start);
    let eps = if s > 0.0 { 1e-3 * s } else { 1.0 };
    let mut q: Vec<f64> = start
        .iter()
        .enumerate()
        .map(|(i, x)| x + eps * libm::sin(1.0 + 0.754_877_666_246_692_7 * i as f64))
        .collect();
    let nq = norm(&q);
    q.iter_mut().for_each(|x| *x /= nq);

    let kmax = n.min(MAX_LANCZOS_STEPS);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    loop {
        let k = basis.len() - 1;
        matvec(a, &basis[k], &mut w);
        let ak = dot(&basis[k], &w);
        alpha.push(ak);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bk = norm(&w);
        let steps = k + 1;
        let scale = alpha.iter().chain(&beta).fold(0.0_f64, |m, x| m.max(x.abs()));
        let exhausted = bk <= 1e-14 * scale.max(f64::MIN_POSITIVE) || steps == kmax;
        if exhausted || steps % 8 == 0 {
            let (theta, s) = ritz_top(&alpha, &beta)?;
            if exhausted || bk * s[steps - 1].abs() <= RITZ_RTOL * theta.abs().max(scale) {
                let mut u = vec![0.0; n];
                for (si, b) in s.iter().zip(&basis) {
                    u.iter_mut().zip(b).for_each(|(x, y)| *x += si * y);
                }
                let nu = norm(&u);
                u.iter_mut().for_each(|x| *x /= nu);
                return Some((theta, u));
            }
        }
        beta.push(bk);
        basis.push(w.iter().map(|x| x / bk).collect());
    }
}

fn ritz_top(alpha: &[f64], beta: &[f64]) -> Option<(f64, Vec<f64>)> {
    let k = alpha.len();
    let mut t = vec![0.0; k * k];
    for i in 0..k {
        t[i * k + i] = alpha[i];
        if i + 1 < k {
            t[i * k + i + 1] = beta[i];
            t[(i + 1) * k + i] = beta[i];
        }
    }
    let eig = symmetric_eigen(&t, k).ok()?;
    Some((eig.values[k - 1], eig.vector(k - 1)))
}

/// Lower Cholesky factor of `sigma I - A`, or `None` if it is not positive definite.
fn cholesky_shifted(a: &[f64], n: usize, sigma: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let target = if i == j { sigma - a[i * n + j] } else { -a[i * n + j] };
            let s = target - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = libm::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, x: &mut [f64]) {
    for i in 0..n {
        let s = x[i] - dot(&l[i * n..i * n + i], &x[..i]);
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{standard_normal, task_rng};

    fn check(a: &[f64], n: usize, start: &[f64]) {
        let full = symmetric_eigen(a, n).unwrap();
        let (lam, v) = top_eigenpair(a, n, start).unwrap();
        let top = full.values[n - 1];
        assert!((lam - top).abs() <= 1e-10 * top.abs().max(1.0), "{lam} vs {top}");
        let mut av = vec![0.0; n];
        matvec(a, &v, &mut av);
        let resid: f64 = av.iter().zip(&v).map(|(x, y)| (x - lam * y).powi(2)).sum();
        assert!(libm::sqrt(resid) < 1e-6 * top.abs().max(1.0), "residual {resid}");
        assert!((norm(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_full_decomposition() {
        let mut rng = task_rng(5, 0, 0);
        for n in [1, 2, 5, 30, 128] {
            for psd in [false, true] {
                let g: Vec<f64> = (0..n * n).map(|_| standard_normal(&mut rng)).collect();
                let mut a = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        a[i * n + j] = if psd {
                            (0..n).map(|k| g[k * n + i] * g[k * n + j]).sum()
                        } else {
                            g[i * n + j] + g[j * n + i]
                        };
                    }
                }
                let start: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
                check(&a, n, &start);
                check(&a, n, &vec![0.0; n]);
            }
        }
    }

    #[test]
    fn degenerate_and_trivial_spectra() {
        // diag(1, 3, 3, 0) with a start orthogonal to the top eigenspace.
        let mut a = vec![0.0; 16];
        for (i, v) in [1.0, 3.0, 3.0, 0.0].iter().enumerate() {
            a[i * 4 + i] = *v;
        }
        check(&a, 4, &[1.0, 0.0, 0.0, 0.0]);
        let zero = vec![0.0; 9];
        let (lam, v) = top_eigenpair(&zero, 3, &[0.0; 3]).unwrap();
        assert_eq!(lam, 0.0);
        assert!((norm(&v) - 1.0).abs() < 1e-12);
    }
}
