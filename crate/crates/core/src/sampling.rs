//! Random primitives: seed-derived streams, sphere vectors, Gaussian matrices.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

/// Independent stream for task `task` of a run seeded with `seed`.
///
/// `domain` separates unrelated consumers of the same seed (one per command
/// or experiment). The stream depends only on `(seed, domain, task)`, never on
/// how tasks are distributed over workers.
pub fn task_rng(seed: u64, domain: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(domain)));
    rng.set_stream(task);
    rng
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform point on the unit sphere `S_{d-1}` in `R^d` (normalized Gaussian).
pub fn sample_unit_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(d);
    loop {
        out.clear();
        out.extend((0..d).map(|_| standard_normal(rng)));
        let norm = libm::sqrt(out.iter().map(|x| x * x).sum::<f64>());
        if norm > 0.0 {
            out.iter_mut().for_each(|x| *x /= norm);
            return out;
        }
    }
}

/// Fills `out` with a uniform point on the unit sphere without allocating.
pub fn fill_unit_sphere<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    loop {
        let mut sq = 0.0;
        for x in out.iter_mut() {
            *x = standard_normal(rng);
            sq += *x * *x;
        }
        if sq > 0.0 {
            let norm = libm::sqrt(sq);
            out.iter_mut().for_each(|x| *x /= norm);
            return;
        }
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries (Ginibre ensemble).
pub fn sample_ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| Complex64::new(standard_normal(rng), standard_normal(rng)))
}

/// Random Hermitian matrix `(G + G^dagger) / 2` with `G` Ginibre.
pub fn sample_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    sample_ginibre(d, rng).hermitian_part()
}

/// Haar-random unitary from Gram-Schmidt on a Ginibre matrix.
///
/// Gram-Schmidt fixes the diagonal phases of the implicit `R` factor to be
/// positive, which is exactly the correction that makes the result Haar.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = sample_ginibre(d, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= overlap * qi;
                }
            }
        }
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(d, |i, j| cols[j][i])
}
