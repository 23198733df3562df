//! Symmetric and Hermitian eigendecompositions for small dense matrices.
//!
//! Real symmetric problems go through Householder tridiagonalization followed
//! by implicit-shift QL iteration (the EISPACK `tred2`/`tql2` pair). A complex
//! Hermitian `H = X + iY` is solved through its real symmetric embedding
//! `[[X, -Y], [Y, X]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled. Each (near-)degenerate cluster is mapped back to a complex
//! eigenspace projector, and an orthonormal basis is picked from it by
//! Gram-Schmidt over the canonical basis vectors in index order. The resulting
//! gauge is a pure function of the input matrix.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Absolute Frobenius tolerance on `H - H^dagger`.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues below `CLUSTER_RTOL * max(1, |H|_max)` apart share a cluster.
const CLUSTER_RTOL: f64 = 1e-11;

/// Ascending eigenvalues and orthonormal eigenvectors of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct RealEigenSystem {
    pub values: Vec<f64>,
    /// Row-major `n x n`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Vec<f64>,
    n: usize,
}

impl RealEigenSystem {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|k| self.vectors[k * self.n + j]).collect()
    }
}

/// Eigendecomposition of a real symmetric matrix given row-major.
///
/// Only the lower triangle is read.
pub fn symmetric_eigen(matrix: &[f64], n: usize) -> Result<RealEigenSystem> {
    if n == 0 || matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            left: n * n,
            right: matrix.len(),
        });
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            v[i * n + j] = matrix[i * n + j];
            v[j * n + i] = matrix[i * n + j];
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e, n);
    ql_implicit(&mut v, &mut d, &mut e, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    Ok(RealEigenSystem { values, vectors, n })
}

/// Householder reduction to tridiagonal form, accumulating the transformation in `v`.
fn tridiagonalize(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal `(d, e)`, rotating the columns of `v`.
fn ql_implicit(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::EigenNoConvergence { iterations: iter - 1 });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }

    /// `sum_j f(values[j]) |v_j><v_j|`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = self.vectors[(r, j)] * w;
                for c in 0..n {
                    out[(r, c)] += vr * self.vectors[(c, j)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Inputs within [`HERMITICITY_TOL`] of Hermitian are symmetrized first.
/// Within degenerate eigenspaces the basis is fixed by Gram-Schmidt over the
/// canonical basis; callers must not rely on any particular gauge.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<EigenSystem> {
    let defect = h.hermiticity_defect();
    if !(defect <= HERMITICITY_TOL) {
        return Err(Error::NotHermitian { defect });
    }
    let h = h.hermitian_part();
    let n = h.dim();
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[i * m + j] = z.re;
            s[(n + i) * m + (n + j)] = z.re;
            s[i * m + (n + j)] = -z.im;
            s[(n + i) * m + j] = z.im;
        }
    }
    let real = symmetric_eigen(&s, m)?;

    let tol = CLUSTER_RTOL * h.max_abs().max(1.0);
    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && real.values[end] - real.values[end - 1] <= tol {
            end += 1;
        }
        let size = end - start;
        if size % 2 != 0 {
            return Err(Error::NumericalInconsistency {
                what: "Hermitian embedding eigenvalue pairing",
                residue: real.values[end - 1] - real.values[start],
            });
        }
        let k = size / 2;
        for t in 0..k {
            values.push(0.5 * (real.values[start + 2 * t] + real.values[start + 2 * t + 1]));
        }
        let projector = cluster_projector(&real, start..end, n);
        columns.extend(canonical_basis(&projector, k)?);
        start = end;
    }

    let vectors = ComplexMatrix::from_fn(n, |r, c| columns[c][r]);
    Ok(EigenSystem { values, vectors })
}

/// Projector onto the complex eigenspace spanned by a cluster of embedding vectors.
fn cluster_projector(real: &RealEigenSystem, cols: core::ops::Range<usize>, n: usize) -> ComplexMatrix {
    let m = 2 * n;
    let mut p = ComplexMatrix::zeros(n);
    for col in cols {
        let z: Vec<Complex64> = (0..n)
            .map(|r| Complex64::new(real.vectors[r * m + col], real.vectors[(n + r) * m + col]))
            .collect();
        for r in 0..n {
            let zr = z[r] * 0.5;
            for c in 0..n {
                p[(r, c)] += zr * z[c].conj();
            }
        }
    }
    p
}

/// Orthonormal basis of `range(projector)` of size `k`, obtained by
/// Gram-Schmidt over `P e_0, P e_1, ...` in order.
fn canonical_basis(projector: &ComplexMatrix, k: usize) -> Result<Vec<Vec<Complex64>>> {
    let n = projector.dim();
    // The residual projector always has a column with squared norm >= 1/n,
    // so this acceptance threshold cannot starve the selection.
    let accept = 0.5 / libm::sqrt(n as f64);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for i in 0..n {
        if basis.len() == k {
            break;
        }
        let mut w = projector.column(i);
        for _ in 0..2 {
            for q in &basis {
                let overlap: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= overlap * qi;
                }
            }
        }
        let norm = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if norm > accept {
            basis.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    if basis.len() != k {
        return Err(Error::NumericalInconsistency {
            what: "degenerate eigenspace basis selection",
            residue: (k - basis.len()) as f64,
        });
    }
    Ok(basis)
}

/// Frobenius residual of `sum_j values_j |v_j><v_j| - h`.
pub fn reconstruction_residual(h: &ComplexMatrix, sys: &EigenSystem) -> f64 {
    libm::sqrt((&sys.reconstruct() - h).frobenius_norm_sq())
}

/// Largest deviation of `V^dagger V` from the identity.
pub fn orthonormality_defect(sys: &EigenSystem) -> f64 {
    let v = &sys.vectors;
    let gram = &v.adjoint() * v;
    let n = v.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{I, ZERO};

    fn sample_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        // Small deterministic LCG keeps this test free of the rng module.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let g = ComplexMatrix::from_fn(n, |_, _| Complex64::new(next(), next()));
        g.hermitian_part()
    }

    #[test]
    fn sorted_diagonal() {
        let sys = hermitian_eigensystem(&ComplexMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(sys.values.len(), 3);
        for (got, want) in sys.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        // Nondegenerate diagonal input: eigenvectors are the canonical basis.
        assert!((sys.vectors[(1, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((sys.vectors[(2, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((sys.vectors[(0, 2)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pauli_x_spectrum_and_vectors() {
        let sys = hermitian_eigensystem(&ComplexMatrix::pauli_x()).unwrap();
        assert!((sys.values[0] + 1.0).abs() < 1e-14);
        assert!((sys.values[1] - 1.0).abs() < 1e-14);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let lower = sys.vector(0);
        let upper = sys.vector(1);
        // Up to phase: |<v, (|0> -/+ |1>)/sqrt2>| = 1.
        let ov_minus = (lower[0] * s - lower[1] * s).norm();
        let ov_plus = (upper[0] * s + upper[1] * s).norm();
        assert!((ov_minus - 1.0).abs() < 1e-12);
        assert!((ov_plus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        for seed in 0..20 {
            let h = sample_hermitian(8, seed);
            let sys = hermitian_eigensystem(&h).unwrap();
            assert!(reconstruction_residual(&h, &sys) < 1e-10);
            assert!(orthonormality_defect(&sys) < 1e-10);
            assert!(sys.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_gauge_is_canonical() {
        // I_3 has a fully degenerate spectrum: the canonical basis comes back.
        let sys = hermitian_eigensystem(&ComplexMatrix::identity(3)).unwrap();
        assert!((&sys.vectors - &ComplexMatrix::identity(3)).max_abs() < 1e-12);

        // Same eigenspaces under a phase rotation still yield a deterministic result.
        let h = ComplexMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 1) => I,
            (1, 0) => -I,
            _ => ZERO,
        });
        let a = hermitian_eigensystem(&h).unwrap();
        let b = hermitian_eigensystem(&h.clone()).unwrap();
        assert_eq!(a, b);
        assert!(reconstruction_residual(&h, &a) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = ComplexMatrix::identity(2);
        h[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            hermitian_eigensystem(&h),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn real_symmetric_one_by_one() {
        let sys = symmetric_eigen(&[4.0], 1).unwrap();
        assert_eq!(sys.values, vec![4.0]);
        assert_eq!(sys.vector(0), vec![1.0]);
    }
}
