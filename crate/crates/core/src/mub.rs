//! Bounds for mutually unbiased observable pairs.
//!
//! `A = sum_j a_j |j><j|` shares its eigenbasis with a diagonal state
//! `rho = diag(lambda)`, while `B = sum_k b_k |b_k><b_k|` is diagonal in a
//! basis with `<j|b_k> = exp(i theta_jk) / sqrt(d)`. Since `[A, rho] = 0` the
//! Robertson and Schrödinger bounds vanish identically, and everything left
//! is expressed through the phases `theta_jk` and the spectra `a`, `b`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::bounds::{bound_report, bound_two_prefactor, Flagged};
use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::sampling::fill_unit_sphere;
use crate::state::{validate_spectrum, DensityMatrix, Observable};
use crate::stats::{Accumulator, McEstimate};

/// Unitarity tolerance for phase tables.
pub const UNBIASED_TOL: f64 = 1e-10;

/// Phases `theta_jk` of a basis unbiased with respect to the computational one.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    dim: usize,
    phases: Vec<f64>,
    /// `U_jk = exp(i theta_jk) / sqrt(d)`.
    unitary: ComplexMatrix,
}

impl PhaseTable {
    /// Rejects tables whose columns do not form an orthonormal basis.
    pub fn from_phases(dim: usize, phases: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(invalid!(InvalidArgument, "dimension {dim} < 2"));
        }
        if phases.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: phases.len(),
            });
        }
        let s = 1.0 / libm::sqrt(dim as f64);
        let unitary = ComplexMatrix::from_fn(dim, |j, k| Complex64::from_polar(s, phases[j * dim + k]));
        let defect = (&(&unitary.adjoint() * &unitary) - &ComplexMatrix::identity(dim)).max_abs();
        if defect > UNBIASED_TOL {
            return Err(Error::NumericalInconsistency {
                what: "phase table unitarity",
                residue: defect,
            });
        }
        Ok(Self { dim, phases, unitary })
    }

    /// Discrete Fourier phases `2 pi j k / d`.
    pub fn fourier(dim: usize) -> Result<Self> {
        let phases = (0..dim * dim)
            .map(|n| {
                let (j, k) = (n / dim, n % dim);
                2.0 * PI * ((j * k) % dim) as f64 / dim as f64
            })
            .collect();
        Self::from_phases(dim, phases)
    }

    /// Sylvester–Hadamard phases `pi * popcount(j & k)` for `d` a power of two.
    pub fn sylvester(dim: usize) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(invalid!(InvalidArgument, "dimension {dim} is not a power of two"));
        }
        let phases = (0..dim * dim)
            .map(|n| PI * (((n / dim) & (n % dim)).count_ones() % 2) as f64)
            .collect();
        Self::from_phases(dim, phases)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phase(&self, j: usize, k: usize) -> f64 {
        self.phases[j * self.dim + k]
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// Largest deviation of `|<j|b_k>|^2` from `1/d`.
    pub fn unbiasedness_defect(&self) -> f64 {
        let target = 1.0 / self.dim as f64;
        self.unitary
            .as_slice()
            .iter()
            .map(|z| (z.norm_sqr() - target).abs())
            .fold(0.0, f64::max)
    }

    /// `B` in the computational basis: `B_jk = sum_l b_l U_jl conj(U_kl)`.
    fn b_matrix(&self, b: &[f64]) -> ComplexMatrix {
        let u = &self.unitary;
        ComplexMatrix::from_fn(self.dim, |j, k| {
            (0..self.dim).map(|l| u[(j, l)] * u[(k, l)].conj() * b[l]).sum()
        })
    }
}

/// An observable pair `(A, B)` built on a phase table.
#[derive(Debug, Clone, PartialEq)]
pub struct MubPair {
    pub table: PhaseTable,
    pub spectrum_a: Vec<f64>,
    pub spectrum_b: Vec<f64>,
}

/// Fourier pair with eigenvalues `a` for `A` and `b` for `B`.
pub fn fourier_mub_pair(d: usize, a: &[f64], b: &[f64]) -> Result<MubPair> {
    MubPair::new(PhaseTable::fourier(d)?, a, b)
}

impl MubPair {
    pub fn new(table: PhaseTable, a: &[f64], b: &[f64]) -> Result<Self> {
        for v in [a, b] {
            if v.len() != table.dim() {
                return Err(Error::DimensionMismatch {
                    left: table.dim(),
                    right: v.len(),
                });
            }
        }
        Ok(Self {
            table,
            spectrum_a: a.to_vec(),
            spectrum_b: b.to_vec(),
        })
    }

    /// Rejects spectra whose Euclidean norm differs from 1 by more than `tol`.
    pub fn require_unit_spectra(self, tol: f64) -> Result<Self> {
        for (name, v) in [("a", &self.spectrum_a), ("b", &self.spectrum_b)] {
            let n = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            if (n - 1.0).abs() > tol {
                return Err(invalid!(InvalidArgument, "spectrum {name} has norm {n}, expected 1"));
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn observable_a(&self) -> Observable {
        Observable::diag(&self.spectrum_a)
    }

    pub fn observable_b(&self) -> Observable {
        Observable::new(self.table.b_matrix(&self.spectrum_b)).expect("U diag(b) U^dagger is Hermitian")
    }
}

fn check_len(d: usize, lambda: &[f64]) -> Result<()> {
    if lambda.len() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: lambda.len(),
        });
    }
    Ok(())
}

/// Robertson and Schrödinger bounds for the pair in `diag(lambda)`, through
/// the general matrix path. Both vanish analytically.
pub fn mub_vanishing_check(pair: &MubPair, lambda: &[f64]) -> Result<(f64, f64)> {
    check_len(pair.dim(), lambda)?;
    let rho = DensityMatrix::from_spectrum(lambda)?;
    let r = bound_report(&pair.observable_a(), &pair.observable_b(), &rho)?;
    Ok((r.robertson, r.schrodinger))
}

/// Sphere-averaged Luo–Park bound `(1 - sum l^2) ((sum sqrt l)^2 - 1) / d^3`.
pub fn mub_lp_average(lambda: &[f64]) -> Result<f64> {
    validate_spectrum(lambda)?;
    let d = lambda.len() as f64;
    let purity: f64 = lambda.iter().map(|l| l * l).sum();
    let root_sum: f64 = lambda.iter().map(|l| libm::sqrt(l.max(0.0))).sum();
    Ok(((1.0 - purity) * (root_sum * root_sum - 1.0)).max(0.0) / (d * d * d))
}

/// Sphere-averaged bound 2, `lambda_min lambda_2 / (lambda_min + lambda_2) * 2(d-1)/d^3`.
pub fn mub_b2_average(lambda: &[f64]) -> Result<Flagged> {
    validate_spectrum(lambda)?;
    let mut sorted = lambda.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pre = bound_two_prefactor(&sorted);
    Ok(Flagged {
        value: pre.value * mub_commutator_norm_average(lambda.len()),
        degenerate: pre.degenerate,
    })
}

/// `|[A,B]|_rho^2` from the phases alone:
///
/// `sum_jk lambda_k (a_j - a_k)^2 / d^2 * sum_lm b_l b_m cos(theta_jl - theta_kl - theta_jm + theta_km)`.
pub fn mub_commutator_norm(pair: &MubPair, lambda: &[f64]) -> Result<f64> {
    let d = pair.dim();
    check_len(d, lambda)?;
    let (a, b, t) = (&pair.spectrum_a, &pair.spectrum_b, &pair.table);
    let mut total = 0.0;
    for j in 0..d {
        for k in 0..d {
            let gap = a[j] - a[k];
            if gap == 0.0 {
                continue;
            }
            let mut b_sq = 0.0;
            for l in 0..d {
                for m in 0..d {
                    let phase = t.phase(j, l) - t.phase(k, l) - t.phase(j, m) + t.phase(k, m);
                    b_sq += b[l] * b[m] * libm::cos(phase);
                }
            }
            total += lambda[k] * gap * gap * b_sq;
        }
    }
    Ok(total / (d * d) as f64)
}

/// Sphere average of `|[A,B]|_rho^2`, `2(d-1)/d^3`, for any state and phase table.
pub fn mub_commutator_norm_average(d: usize) -> f64 {
    let d = d as f64;
    2.0 * (d - 1.0) / (d * d * d)
}

/// Per-sample quantities of the sphere average over `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MubSample {
    pub commutator_norm: f64,
    /// `C(A) = sum a_j^2 l_j - (sum a_j l_j)^2`.
    pub a_factor: f64,
    /// `C(B) = sum_jk sqrt(l_j l_k) |B_jk|^2 - (sum_j l_j B_jj)^2`.
    pub b_factor: f64,
}

impl MubSample {
    /// Second term of the Luo–Park bound, `C(A) C(B)`.
    pub fn lp_term(&self) -> f64 {
        self.a_factor * self.b_factor
    }
}

/// Evaluates the sample quantities for one `(a, b)` pair.
pub fn mub_sample(table: &PhaseTable, lambda: &[f64], a: &[f64], b: &[f64]) -> Result<MubSample> {
    let d = table.dim();
    for v in [lambda, a, b] {
        check_len(d, v)?;
    }
    let bm = table.b_matrix(b);
    let roots: Vec<f64> = lambda.iter().map(|l| libm::sqrt(l.max(0.0))).collect();
    let mut commutator_norm = 0.0;
    let mut coherent = 0.0;
    let mut mean_b = 0.0;
    for j in 0..d {
        mean_b += lambda[j] * bm[(j, j)].re;
        for k in 0..d {
            let w = bm[(j, k)].norm_sqr();
            let gap = a[j] - a[k];
            commutator_norm += lambda[k] * gap * gap * w;
            coherent += roots[j] * roots[k] * w;
        }
    }
    let mean_a: f64 = a.iter().zip(lambda).map(|(x, l)| x * l).sum();
    let second_a: f64 = a.iter().zip(lambda).map(|(x, l)| x * x * l).sum();
    Ok(MubSample {
        commutator_norm,
        a_factor: second_a - mean_a * mean_a,
        b_factor: coherent - mean_b * mean_b,
    })
}

/// Running means of [`MubSample`] fields and the LP term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MubAverageAccumulator {
    acc: [Accumulator; 4],
}

/// Monte Carlo estimates of the MUB sphere averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MubAverageEstimates {
    pub commutator_norm: McEstimate,
    pub a_factor: McEstimate,
    pub b_factor: McEstimate,
    pub lp_term: McEstimate,
}

impl MubAverageAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: &MubSample) {
        let vals = [s.commutator_norm, s.a_factor, s.b_factor, s.lp_term()];
        for (a, v) in self.acc.iter_mut().zip(vals) {
            a.push(v);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.acc.iter_mut().zip(&other.acc) {
            a.merge(b);
        }
    }

    pub fn count(&self) -> u64 {
        self.acc[0].count()
    }

    pub fn estimates(&self) -> Option<MubAverageEstimates> {
        Some(MubAverageEstimates {
            commutator_norm: self.acc[0].estimate()?,
            a_factor: self.acc[1].estimate()?,
            b_factor: self.acc[2].estimate()?,
            lp_term: self.acc[3].estimate()?,
        })
    }
}

/// Exact averages of the a- and b-factors, `(1 - P)/d` and `((sum sqrt l)^2 - 1)/d^2`.
pub fn mub_factor_averages(lambda: &[f64]) -> Result<(f64, f64)> {
    validate_spectrum(lambda)?;
    let d = lambda.len() as f64;
    let purity: f64 = lambda.iter().map(|l| l * l).sum();
    let root_sum: f64 = lambda.iter().map(|l| libm::sqrt(l.max(0.0))).sum();
    Ok(((1.0 - purity) / d, (root_sum * root_sum - 1.0) / (d * d)))
}

/// Adds `n` samples with `a`, `b` independent and uniform on `S_{d-1}`.
pub fn accumulate_mub_samples<R: Rng + ?Sized>(
    acc: &mut MubAverageAccumulator,
    table: &PhaseTable,
    lambda: &[f64],
    n: u64,
    rng: &mut R,
) -> Result<()> {
    validate_spectrum(lambda)?;
    let d = table.dim();
    let mut a = alloc::vec![0.0; d];
    let mut b = alloc::vec![0.0; d];
    for _ in 0..n {
        fill_unit_sphere(&mut a, rng);
        fill_unit_sphere(&mut b, rng);
        acc.push(&mub_sample(table, lambda, &a, &b)?);
    }
    Ok(())
}

/// Sequential Monte Carlo sphere average with Fourier phases.
pub fn mc_mub_average<R: Rng + ?Sized>(d: usize, lambda: &[f64], n: u64, rng: &mut R) -> Result<MubAverageEstimates> {
    if n < 2 {
        return Err(invalid!(InvalidArgument, "need at least 2 samples, got {n}"));
    }
    let table = PhaseTable::fourier(d)?;
    let mut acc = MubAverageAccumulator::new();
    accumulate_mub_samples(&mut acc, &table, lambda, n, rng)?;
    Ok(acc.estimates().expect("n >= 2"))
}

/// Qubit Luo–Park bound for `a = b = (cos t, sin t)` in a state of purity `p`:
/// `q^2 (1 + (q-1) cos^2 t)(1 + (q-1) sin^2 t)` with `q = sqrt(2(1-p))`.
pub fn qubit_mub_theta_lp(p: f64, theta: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid!(InvalidArgument, "qubit purity {p} outside [1/2, 1]"));
    }
    let q = libm::sqrt(2.0 * (1.0 - p));
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let (c2, s2) = (c * c, s * s);
    Ok(q * q * (1.0 + (q - 1.0) * c2) * (1.0 + (q - 1.0) * s2))
}

/// Qubit spectrum `((1-r)/2, (1+r)/2)` with `r = sqrt(2p - 1)`.
pub fn qubit_spectrum_of_purity(p: f64) -> Result<[f64; 2]> {
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid!(InvalidArgument, "qubit purity {p} outside [1/2, 1]"));
    }
    let r = libm::sqrt((2.0 * p - 1.0).max(0.0));
    Ok([0.5 * (1.0 - r), 0.5 * (1.0 + r)])
}

/// One row of the qubit MUB average table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MubAverageRow {
    pub purity: f64,
    pub luo_park_mub_avg: f64,
    pub bound2_mub_avg: f64,
}

/// Qubit MUB averages of the Luo–Park bound and bound 2 on a uniform purity grid.
///
/// Fails if bound 2 ever falls below the Luo–Park value.
pub fn emit_fig2_data(points: usize) -> Result<Vec<MubAverageRow>> {
    let mut rows = Vec::with_capacity(points);
    for p in crate::sphere::purity_grid(points)? {
        let lambda = qubit_spectrum_of_purity(p)?;
        let row = MubAverageRow {
            purity: p,
            luo_park_mub_avg: mub_lp_average(&lambda)?,
            bound2_mub_avg: mub_b2_average(&lambda)?.value,
        };
        if row.bound2_mub_avg < row.luo_park_mub_avg - 1e-15 {
            return Err(Error::NumericalInconsistency {
                what: "qubit MUB dominance of bound 2",
                residue: row.luo_park_mub_avg - row.bound2_mub_avg,
            });
        }
        rows.push(row);
    }
    Ok(rows)
}
