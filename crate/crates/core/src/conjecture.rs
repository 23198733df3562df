//! The weighted commutator ratio `R(A, B) = |[A,B]|_rho^2 / (|A|_rho^2 |B|_rho^2)`
//! and its numerical maximization.
//!
//! Two constants bound the supremum of `R` over nonzero matrices:
//!
//! * `2 lambda_max / lambda_min^2`, proven;
//! * `(lambda_min + lambda_2) / (lambda_min lambda_2)`, conjectured sharp and
//!   attained by an explicit Hermitian pair.
//!
//! [`maximize_ratio`] performs alternating maximization. `R` is invariant
//! under simultaneous unitary conjugation of `A`, `B` and `rho`, so the search
//! runs in the eigenbasis of `rho`. For fixed `B` the ratio is a generalized
//! Rayleigh quotient in the real coordinates of `A`, and the top generalized
//! eigenvector is the exact block maximizer; the same holds with the roles
//! swapped. Every half-step is therefore non-decreasing.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::{commutator, top_eigenpair, weighted_norm_sq, ComplexMatrix, ZERO};
use crate::sampling::{sample_ginibre, sample_hermitian};
use crate::state::{DensityMatrix, Observable};

/// Semi-norms at or below this value make the ratio undefined.
pub const SEMINORM_FLOOR: f64 = 1e-14;

/// Allowed relative decrease of the ratio across one half-step.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// `(l_1 + l_2) / (l_1 l_2)` for an ascending spectrum; `+inf` when `l_1 = 0`.
///
/// The spectrum need not be normalized: `[1, ..., 1]` gives 2.
pub fn conjectured_constant_from_spectrum(spectrum: &[f64]) -> f64 {
    let (l1, l2) = (spectrum[0], spectrum[1]);
    if l1 <= 0.0 {
        f64::INFINITY
    } else {
        (l1 + l2) / (l1 * l2)
    }
}

/// `2 l_max / l_min^2` for an ascending spectrum; `+inf` when `l_min = 0`.
pub fn loose_constant_from_spectrum(spectrum: &[f64]) -> f64 {
    let l1 = spectrum[0];
    if l1 <= 0.0 {
        f64::INFINITY
    } else {
        2.0 * spectrum[spectrum.len() - 1] / (l1 * l1)
    }
}

pub fn conjectured_constant(rho: &DensityMatrix) -> f64 {
    conjectured_constant_from_spectrum(rho.spectrum())
}

pub fn loose_constant(rho: &DensityMatrix) -> f64 {
    loose_constant_from_spectrum(rho.spectrum())
}

/// `R(A, B)` with weight `rho` (any positive semi-definite matrix).
///
/// The numerator is unchanged by `A -> A + alpha I`, the denominator is not,
/// so `R` is scale invariant but not shift invariant.
pub fn ratio<W>(a: &ComplexMatrix, b: &ComplexMatrix, rho: &W) -> Result<f64>
where
    W: AsRef<ComplexMatrix> + ?Sized,
{
    let na = weighted_norm_sq(a, rho)?;
    if !(na > SEMINORM_FLOOR) {
        return Err(Error::NullSeminorm { which: "A", value: na });
    }
    let nb = weighted_norm_sq(b, rho)?;
    if !(nb > SEMINORM_FLOOR) {
        return Err(Error::NullSeminorm { which: "B", value: nb });
    }
    Ok(weighted_norm_sq(&commutator(a, b)?, rho)? / (na * nb))
}

/// Hermitian pair attaining the conjectured constant:
/// `A = l_2 |1><1| - l_1 |2><2|`, `B = |1><2| + |2><1|` on the two lowest eigenvectors.
pub fn equality_witness(rho: &DensityMatrix) -> Result<(Observable, Observable)> {
    let s = rho.spectrum();
    if !(s[0] > 0.0) {
        return Err(invalid!(InvalidArgument, "witness needs a full-rank state, lambda_min = {}", s[0]));
    }
    let v = &rho.eigensystem().vectors;
    let (a, b) = witness_in_basis(s[0], s[1], v);
    Ok((Observable::new(a)?, Observable::new(b)?))
}

fn witness_in_basis(l1: f64, l2: f64, v: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let v1 = v.column(0);
    let v2 = v.column(1);
    let p1 = ComplexMatrix::outer(&v1, &v1);
    let p2 = ComplexMatrix::outer(&v2, &v2);
    let x12 = ComplexMatrix::outer(&v1, &v2);
    let a = &p1.scale_real(l2) - &p2.scale_real(l1);
    let b = &x12 + &x12.adjoint();
    (a, b)
}

/// Search space for the maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptimizerMode {
    /// All complex matrices (`2 d^2` real coordinates).
    #[default]
    Complex,
    /// Hermitian matrices (`d^2` real coordinates).
    Hermitian,
}

impl OptimizerMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Complex => "complex",
            Self::Hermitian => "hermitian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Random starts; one extra start seeded at the equality witness runs last.
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative gain per full iteration below which a start has converged.
    pub tol: f64,
    pub mode: OptimizerMode,
    pub seed_witness: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 500,
            tol: 1e-10,
            mode: OptimizerMode::Complex,
            seed_witness: true,
        }
    }
}

/// A start that was discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartFailure {
    pub index: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub dim: usize,
    /// Ascending spectrum of `rho`.
    pub spectrum: Vec<f64>,
    pub achieved_ratio: f64,
    pub conjectured_constant: f64,
    pub loose_constant: f64,
    /// Maximizing pair in the original basis of `rho`.
    pub witness_a: ComplexMatrix,
    pub witness_b: ComplexMatrix,
    /// Full iterations of the winning start.
    pub iterations: usize,
    /// Starts that ran to completion.
    pub restarts_used: usize,
    /// The winning start stopped on the tolerance rather than `max_iters`.
    pub converged: bool,
    pub mode: OptimizerMode,
    /// Index of the winning start; the witness-seeded start is `restarts`.
    pub best_restart: usize,
    /// Best ratio over random starts only, `None` when there were none.
    pub random_best_ratio: Option<f64>,
    /// Ratio after every half-step of the winning start.
    pub trace: Vec<f64>,
    /// No half-step of any start decreased the ratio beyond [`MONOTONE_SLACK`].
    pub monotone: bool,
    pub failures: Vec<RestartFailure>,
}

impl OptimizationResult {
    /// `achieved / conjectured - 1`.
    pub fn relative_deviation(&self) -> f64 {
        self.achieved_ratio / self.conjectured_constant - 1.0
    }

    /// Same for the best random start.
    pub fn random_relative_deviation(&self) -> Option<f64> {
        self.random_best_ratio.map(|r| r / self.conjectured_constant - 1.0)
    }

    /// The achieved ratio exceeds the conjectured constant by more than `rel_tol`.
    pub fn is_counterexample(&self, rel_tol: f64) -> bool {
        self.achieved_ratio > self.conjectured_constant * (1.0 + rel_tol)
    }

    /// The proven ceiling holds within `rel_tol`.
    pub fn respects_loose_constant(&self, rel_tol: f64) -> bool {
        self.achieved_ratio <= self.loose_constant * (1.0 + rel_tol)
    }
}

/// A real basis of the search space in the eigenbasis of `rho`, each element
/// stored sparsely with its squared weighted norm.
struct Generators {
    dim: usize,
    elements: Vec<Generator>,
}

struct Generator {
    entries: [(usize, usize, Complex64); 2],
    len: usize,
    /// `|G|_rho^2`; the Gram form is diagonal in this basis.
    norm_sq: f64,
}

impl Generator {
    fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries[..self.len]
    }
}

impl Generators {
    fn new(mode: OptimizerMode, lambda: &[f64]) -> Self {
        let d = lambda.len();
        let mut elements = Vec::new();
        let one = |p, q, c: Complex64, norm_sq| Generator {
            entries: [(p, q, c), (0, 0, ZERO)],
            len: 1,
            norm_sq,
        };
        match mode {
            OptimizerMode::Complex => {
                for p in 0..d {
                    for q in 0..d {
                        elements.push(one(p, q, Complex64::new(1.0, 0.0), lambda[q]));
                        elements.push(one(p, q, Complex64::new(0.0, 1.0), lambda[q]));
                    }
                }
            }
            OptimizerMode::Hermitian => {
                let h = core::f64::consts::FRAC_1_SQRT_2;
                for p in 0..d {
                    elements.push(one(p, p, Complex64::new(1.0, 0.0), lambda[p]));
                    for q in p + 1..d {
                        let n = 0.5 * (lambda[p] + lambda[q]);
                        elements.push(Generator {
                            entries: [(p, q, Complex64::new(h, 0.0)), (q, p, Complex64::new(h, 0.0))],
                            len: 2,
                            norm_sq: n,
                        });
                        elements.push(Generator {
                            entries: [(p, q, Complex64::new(0.0, h)), (q, p, Complex64::new(0.0, -h))],
                            len: 2,
                            norm_sq: n,
                        });
                    }
                }
            }
        }
        Self { dim: d, elements }
    }

    fn assemble(&self, x: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for (g, &c) in self.elements.iter().zip(x) {
            for &(p, q, v) in g.entries() {
                m[(p, q)] += v * c;
            }
        }
        m
    }

    /// Real coordinates of `m` projected onto the span (the generators are
    /// Frobenius-orthonormal).
    fn coordinates(&self, m: &ComplexMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|g| g.entries().iter().map(|&(p, q, c)| (c.conj() * m[(p, q)]).re).sum())
            .collect()
    }

    /// Maximizes `|[X, F]|_lambda^2 / |X|_lambda^2` over the span; returns the
    /// maximizer normalized to `|X|_lambda = 1` and the maximal value.
    ///
    /// `warm` (typically the previous iterate) seeds the eigensolver.
    fn best_partner(
        &self,
        fixed: &ComplexMatrix,
        roots: &[f64],
        warm: Option<&ComplexMatrix>,
    ) -> Result<(ComplexMatrix, f64)> {
        let d = self.dim;
        let n = self.elements.len();
        // Column a holds sqrt(lambda_s) [G_a, F]_rs / |G_a|, real and imaginary parts stacked.
        let mut cols: Vec<f64> = alloc::vec![0.0; n * 2 * d * d];
        let mut l = alloc::vec![ZERO; d * d];
        for (a, g) in self.elements.iter().enumerate() {
            l.iter_mut().for_each(|z| *z = ZERO);
            for &(p, q, c) in g.entries() {
                for s in 0..d {
                    l[p * d + s] += c * fixed[(q, s)];
                }
                for r in 0..d {
                    l[r * d + q] -= c * fixed[(r, p)];
                }
            }
            let inv = 1.0 / libm::sqrt(g.norm_sq);
            let col = &mut cols[a * 2 * d * d..(a + 1) * 2 * d * d];
            for r in 0..d {
                for s in 0..d {
                    let z = l[r * d + s] * (roots[s] * inv);
                    col[2 * (r * d + s)] = z.re;
                    col[2 * (r * d + s) + 1] = z.im;
                }
            }
        }
        let len = 2 * d * d;
        let mut c = alloc::vec![0.0; n * n];
        for a in 0..n {
            let ca = &cols[a * len..(a + 1) * len];
            for b in 0..=a {
                let cb = &cols[b * len..(b + 1) * len];
                let v: f64 = ca.iter().zip(cb).map(|(x, y)| x * y).sum();
                c[a * n + b] = v;
                c[b * n + a] = v;
            }
        }
        let start: Vec<f64> = match warm {
            Some(w) => self
                .coordinates(w)
                .iter()
                .zip(&self.elements)
                .map(|(x, g)| x * libm::sqrt(g.norm_sq))
                .collect(),
            None => alloc::vec![0.0; n],
        };
        let (top, z) = top_eigenpair(&c, n, &start)?;
        let x: Vec<f64> = z
            .iter()
            .zip(&self.elements)
            .map(|(zi, g)| zi / libm::sqrt(g.norm_sq))
            .collect();
        Ok((self.assemble(&x), top.max(0.0)))
    }
}

struct Run {
    a: ComplexMatrix,
    b: ComplexMatrix,
    ratio: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
    monotone: bool,
}

fn normalized(m: ComplexMatrix, lambda: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = weighted_norm_sq(&m, lambda)?;
    if !(n > SEMINORM_FLOOR) {
        return Err(Error::NullSeminorm { which: "start", value: n });
    }
    Ok(m.scale_real(1.0 / libm::sqrt(n)))
}

fn run_from(
    gens: &Generators,
    lambda_mat: &ComplexMatrix,
    roots: &[f64],
    start_b: ComplexMatrix,
    opts: &OptimizeOptions,
) -> Result<Run> {
    let mut b = normalized(start_b, lambda_mat)?;
    let (mut a, mut r) = gens.best_partner(&b, roots, None)?;
    let mut trace = alloc::vec![r];
    let mut monotone = true;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        let before = r;
        let (nb, rb) = gens.best_partner(&a, roots, Some(&b))?;
        monotone &= rb >= r * (1.0 - MONOTONE_SLACK);
        trace.push(rb);
        b = nb;
        let (na, ra) = gens.best_partner(&b, roots, Some(&a))?;
        monotone &= ra >= rb * (1.0 - MONOTONE_SLACK);
        trace.push(ra);
        a = na;
        r = ra;
        if before > 0.0 && (r - before) / before < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(Run {
        a,
        b,
        ratio: r,
        iterations,
        converged,
        trace,
        monotone,
    })
}

/// Multistart alternating maximization of `R(A, B)` for fixed `rho`.
///
/// Random starts use indices `0..restarts` and draw `B` from `rng` in order;
/// the witness-seeded start, if enabled, comes last. Ties keep the lowest index.
pub fn maximize_ratio<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    opts: &OptimizeOptions,
    rng: &mut R,
) -> Result<OptimizationResult> {
    let spectrum = rho.spectrum().to_vec();
    let d = spectrum.len();
    if !(spectrum[0] > 0.0) {
        return Err(Error::UnboundedSupremum);
    }
    if opts.restarts == 0 && !opts.seed_witness {
        return Err(invalid!(InvalidArgument, "no starts requested"));
    }
    let gens = Generators::new(opts.mode, &spectrum);
    let lambda_mat = ComplexMatrix::diag(&spectrum);
    let roots: Vec<f64> = spectrum.iter().map(|l| libm::sqrt(*l)).collect();

    let mut starts: Vec<ComplexMatrix> = (0..opts.restarts)
        .map(|_| match opts.mode {
            OptimizerMode::Complex => sample_ginibre(d, rng),
            OptimizerMode::Hermitian => sample_hermitian(d, rng),
        })
        .collect();
    if opts.seed_witness {
        let (_, wb) = witness_in_basis(spectrum[0], spectrum[1], &ComplexMatrix::identity(d));
        starts.push(wb);
    }

    let mut best: Option<(usize, Run)> = None;
    let mut random_best: Option<f64> = None;
    let mut failures = Vec::new();
    let mut monotone = true;
    let mut used = 0;
    for (index, start) in starts.into_iter().enumerate() {
        match run_from(&gens, &lambda_mat, &roots, start, opts) {
            Ok(run) => {
                used += 1;
                monotone &= run.monotone;
                if index < opts.restarts {
                    random_best = Some(random_best.map_or(run.ratio, |r: f64| r.max(run.ratio)));
                }
                if best.as_ref().map_or(true, |(_, b)| run.ratio > b.ratio) {
                    best = Some((index, run));
                }
            }
            Err(error) => failures.push(RestartFailure { index, error }),
        }
    }
    let Some((best_restart, run)) = best else {
        return Err(Error::AllRestartsFailed {
            restarts: failures.len(),
        });
    };
    let v = &rho.eigensystem().vectors;
    Ok(OptimizationResult {
        dim: d,
        conjectured_constant: conjectured_constant_from_spectrum(&spectrum),
        loose_constant: loose_constant_from_spectrum(&spectrum),
        spectrum,
        achieved_ratio: run.ratio,
        witness_a: run.a.conjugate_by(v)?,
        witness_b: run.b.conjugate_by(v)?,
        iterations: run.iterations,
        restarts_used: used,
        converged: run.converged,
        mode: opts.mode,
        best_restart,
        random_best_ratio: random_best,
        trace: run.trace,
        monotone,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::task_rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn sixths() -> DensityMatrix {
        DensityMatrix::from_spectrum(&[1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]).unwrap()
    }

    #[test]
    fn constants() {
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(close(conjectured_constant(&half), 4.0, 1e-14));
        assert!(close(loose_constant(&half), 4.0, 1e-14));
        assert!(close(conjectured_constant(&sixths()), 9.0, 1e-12));
        assert!(close(loose_constant(&sixths()), 36.0, 1e-12));
        let pure = DensityMatrix::from_spectrum(&[0.0, 1.0]).unwrap();
        assert_eq!(conjectured_constant(&pure), f64::INFINITY);
        assert_eq!(loose_constant(&pure), f64::INFINITY);
        assert_eq!(conjectured_constant_from_spectrum(&[1.0, 1.0, 1.0]), 2.0);
        assert_eq!(loose_constant_from_spectrum(&[1.0, 1.0, 1.0]), 2.0);
    }

    #[test]
    fn ratio_examples() {
        let (a, b) = equality_witness(&sixths()).unwrap();
        assert!(close(ratio(a.matrix(), b.matrix(), &sixths()).unwrap(), 9.0, 1e-12));
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        let r = ratio(&ComplexMatrix::pauli_x(), &ComplexMatrix::pauli_y(), &half).unwrap();
        assert!(close(r, 4.0, 1e-14));
        let d = ComplexMatrix::diag(&[1.0, 2.0, 3.0]);
        assert_eq!(ratio(&d, &d.scale_real(2.0), &sixths()).unwrap(), 0.0);
        assert!(matches!(
            ratio(&ComplexMatrix::zeros(2), &ComplexMatrix::pauli_x(), &half),
            Err(Error::NullSeminorm { which: "A", .. })
        ));
        // Unnormalized identity weight: the plain commutator inequality constant.
        let r = ratio(&ComplexMatrix::pauli_x(), &ComplexMatrix::pauli_y(), &ComplexMatrix::identity(2)).unwrap();
        assert!(close(r, 2.0, 1e-14));
    }

    #[test]
    fn witness_degenerate_spectrum() {
        let rho = DensityMatrix::from_spectrum(&[0.25, 0.25, 0.5]).unwrap();
        let (a, b) = equality_witness(&rho).unwrap();
        assert!(close(ratio(a.matrix(), b.matrix(), &rho).unwrap(), 8.0, 1e-12));
        let pure = DensityMatrix::from_spectrum(&[0.0, 1.0]).unwrap();
        assert!(equality_witness(&pure).is_err());
    }

    #[test]
    fn qubit_optimum_is_conjectured_constant() {
        let mut rng = task_rng(31, 0, 0);
        let rho = DensityMatrix::from_spectrum(&[0.3, 0.7]).unwrap();
        let opts = OptimizeOptions {
            seed_witness: false,
            ..Default::default()
        };
        let res = maximize_ratio(&rho, &opts, &mut rng).unwrap();
        assert!(res.relative_deviation().abs() < 1e-6, "{res:?}");
        assert!(res.monotone);
        let r = ratio(&res.witness_a, &res.witness_b, &rho).unwrap();
        assert!(close(r, res.achieved_ratio, 1e-9 * res.achieved_ratio));
    }

    #[test]
    fn qutrit_both_modes() {
        let mut rng = task_rng(32, 0, 0);
        for mode in [OptimizerMode::Complex, OptimizerMode::Hermitian] {
            let opts = OptimizeOptions {
                mode,
                ..Default::default()
            };
            let res = maximize_ratio(&sixths(), &opts, &mut rng).unwrap();
            assert!(res.relative_deviation().abs() < 1e-6, "{mode:?}: {res:?}");
            assert!(res.respects_loose_constant(1e-9));
            assert!(!res.is_counterexample(1e-6));
        }
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let mut rng = task_rng(33, 0, 0);
        let rho = DensityMatrix::from_spectrum(&[0.0, 0.4, 0.6]).unwrap();
        assert_eq!(
            maximize_ratio(&rho, &OptimizeOptions::default(), &mut rng).unwrap_err(),
            Error::UnboundedSupremum
        );
    }
}
