//! Variances, skew information and the five lower bounds on `V(A) V(B)`.
//!
//! | bound        | value                                                   |
//! |--------------|---------------------------------------------------------|
//! | Robertson    | `|<[A,B]>|^2 / 4`                                       |
//! | Schrödinger  | Robertson `+ |<{A,B}>/2 - <A><B>|^2`                    |
//! | Luo–Park     | Robertson `+ C(A) C(B)`, `C(X) = V(X) - I(X)`           |
//! | bound 1      | `lambda_min^2 / (2 lambda_max) * |[A,B]|_rho^2`         |
//! | bound 2      | `lambda_min lambda_2 / (lambda_min + lambda_2) * |[A,B]|_rho^2` |
//!
//! The first four are theorems. Bound 2 rests on the sharp weighted
//! commutator inequality, which is proven for qubits and conjectured in
//! general; reports flag its violations instead of asserting them away.

use crate::error::{invalid, Error, Result};
use crate::linalg::{commutator, weighted_inner_product, weighted_norm_sq, ComplexMatrix};
use crate::state::{cross3, dot3, norm3, BlochVector, DensityMatrix, Observable, BLOCH_TOL};

/// Round-off window below zero in which a classical uncertainty is clipped.
pub const CLASSICAL_CLIP: f64 = 1e-12;
/// Default relative slack for the proven inequalities.
pub const HARD_SLACK: f64 = 1e-10;
/// Default relative slack before a bound-2 violation is recorded.
pub const CONJECTURE_SLACK: f64 = 1e-9;

fn check_dims(x: &Observable, rho: &DensityMatrix) -> Result<()> {
    if x.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: rho.dim(),
        });
    }
    Ok(())
}

/// `Tr(X rho)`.
pub fn expectation(x: &Observable, rho: &DensityMatrix) -> Result<f64> {
    check_dims(x, rho)?;
    let z = x.matrix().trace_product(rho.matrix())?;
    crate::linalg::real_part_checked(z, "expectation value")
}

/// `X - <X> I`.
fn centered(x: &Observable, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let mean = expectation(x, rho)?;
    Ok(x.matrix().shift_diagonal((-mean).into()))
}

/// `Tr(X^2 rho) - Tr(X rho)^2`, evaluated as the weighted norm of the centered observable.
pub fn variance(x: &Observable, rho: &DensityMatrix) -> Result<f64> {
    check_dims(x, rho)?;
    Ok(weighted_norm_sq(&centered(x, rho)?, rho)?.max(0.0))
}

/// Wigner–Yanase skew information `Tr(X^2 rho) - Tr(sqrt(rho) X sqrt(rho) X)`.
///
/// Evaluated as `|[sqrt(rho), X]|_F^2 / 2`, which is manifestly non-negative.
pub fn skew_information(x: &Observable, rho: &DensityMatrix) -> Result<f64> {
    check_dims(x, rho)?;
    let c = commutator(rho.sqrt_matrix(), x.matrix())?;
    Ok(0.5 * c.frobenius_norm_sq())
}

/// Classical part `C(X) = Tr(sqrt(rho) X sqrt(rho) X) - <X>^2 = V(X) - I(X)`.
///
/// Values in `[-1e-12 * max(1, V), 0)` are clipped to zero; anything more
/// negative is a numerical inconsistency.
pub fn classical_uncertainty(x: &Observable, rho: &DensityMatrix) -> Result<f64> {
    check_dims(x, rho)?;
    let xc = centered(x, rho)?;
    let s = rho.sqrt_matrix();
    let sx = s * &xc;
    let c = crate::linalg::real_part_checked(sx.trace_product(&sx)?, "classical uncertainty")?;
    clip_classical(c, variance(x, rho)?)
}

fn clip_classical(c: f64, scale: f64) -> Result<f64> {
    if c >= 0.0 {
        Ok(c)
    } else if c >= -CLASSICAL_CLIP * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NumericalInconsistency {
            what: "negative classical uncertainty",
            residue: c,
        })
    }
}

/// `|[A,B]|_rho^2`.
pub fn commutator_weighted_norm_sq(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<f64> {
    check_dims(a, rho)?;
    check_dims(b, rho)?;
    weighted_norm_sq(&commutator(a.matrix(), b.matrix())?, rho)
}

/// `Tr(A_c B_c rho)` with centered observables: imaginary part is
/// `<[A,B]> / (2i)`, real part the symmetrized covariance.
fn centered_correlation(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<num_complex::Complex64> {
    check_dims(a, rho)?;
    check_dims(b, rho)?;
    weighted_inner_product(&centered(a, rho)?, &centered(b, rho)?, rho)
}

pub fn bound_robertson(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<f64> {
    let z = centered_correlation(a, b, rho)?;
    Ok(z.im * z.im)
}

pub fn bound_schrodinger(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<f64> {
    let z = centered_correlation(a, b, rho)?;
    Ok(z.im * z.im + z.re * z.re)
}

pub fn bound_luo_park(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<f64> {
    Ok(bound_robertson(a, b, rho)? + classical_uncertainty(a, rho)? * classical_uncertainty(b, rho)?)
}

/// `lambda_min^2 / (2 lambda_max)`, zero when `lambda_min = 0`.
pub fn bound_one_prefactor(spectrum: &[f64]) -> f64 {
    let lmin = spectrum[0];
    let lmax = spectrum[spectrum.len() - 1];
    if lmin <= 0.0 {
        0.0
    } else {
        lmin * lmin / (2.0 * lmax)
    }
}

/// A value that falls back to zero on a degenerate spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    /// Set when `lambda_min + lambda_2 = 0`.
    pub degenerate: bool,
}

/// `lambda_min lambda_2 / (lambda_min + lambda_2)` for an ascending spectrum.
pub fn bound_two_prefactor(spectrum: &[f64]) -> Flagged {
    let (l1, l2) = (spectrum[0], spectrum[1]);
    let sum = l1 + l2;
    if sum <= 0.0 {
        Flagged {
            value: 0.0,
            degenerate: true,
        }
    } else {
        Flagged {
            value: l1 * l2 / sum,
            degenerate: false,
        }
    }
}

pub fn bound_one(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<f64> {
    Ok(bound_one_prefactor(rho.spectrum()) * commutator_weighted_norm_sq(a, b, rho)?)
}

pub fn bound_two(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<Flagged> {
    let pre = bound_two_prefactor(rho.spectrum());
    let norm = commutator_weighted_norm_sq(a, b, rho)?;
    Ok(Flagged {
        value: pre.value * norm,
        degenerate: pre.degenerate,
    })
}

/// The five bounds and the variance product for one `(A, B, rho)` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub product: f64,
    pub robertson: f64,
    pub schrodinger: f64,
    pub luo_park: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub dim: usize,
    pub purity: f64,
    /// Bound 2 was forced to zero by a degenerate spectrum.
    pub degenerate: bool,
}

/// Pass flags for each inequality `product >= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InequalityChecks {
    pub robertson: bool,
    pub schrodinger: bool,
    pub luo_park: bool,
    pub bound1: bool,
    /// Conjectured for `d >= 3`.
    pub bound2: bool,
}

impl InequalityChecks {
    pub fn hard_ok(&self) -> bool {
        self.robertson && self.schrodinger && self.luo_park && self.bound1
    }
}

fn holds(product: f64, bound: f64, rel_slack: f64) -> bool {
    bound - product <= rel_slack * product.abs().max(bound.abs())
}

impl BoundReport {
    /// Hard inequalities at `hard_slack`, bound 2 at `conjecture_slack` (both relative).
    pub fn checks(&self, hard_slack: f64, conjecture_slack: f64) -> InequalityChecks {
        InequalityChecks {
            robertson: holds(self.product, self.robertson, hard_slack),
            schrodinger: holds(self.product, self.schrodinger, hard_slack),
            luo_park: holds(self.product, self.luo_park, hard_slack),
            bound1: holds(self.product, self.bound1, hard_slack),
            bound2: holds(self.product, self.bound2, conjecture_slack),
        }
    }

    pub fn default_checks(&self) -> InequalityChecks {
        self.checks(HARD_SLACK, CONJECTURE_SLACK)
    }

    /// `B_S >= B_R`, `B_LP >= B_R`, `B_2 >= B_1` within an absolute slack.
    pub fn ordering_holds(&self, slack: f64) -> bool {
        self.schrodinger >= self.robertson - slack
            && self.luo_park >= self.robertson - slack
            && self.bound2 >= self.bound1 - slack
    }
}

/// All five bounds through the general matrix path.
pub fn bound_report(a: &Observable, b: &Observable, rho: &DensityMatrix) -> Result<BoundReport> {
    let z = centered_correlation(a, b, rho)?;
    let robertson = z.im * z.im;
    let schrodinger = robertson + z.re * z.re;
    let var_a = variance(a, rho)?;
    let var_b = variance(b, rho)?;
    let luo_park = robertson + classical_uncertainty(a, rho)? * classical_uncertainty(b, rho)?;
    let norm = commutator_weighted_norm_sq(a, b, rho)?;
    let pre2 = bound_two_prefactor(rho.spectrum());
    Ok(BoundReport {
        product: var_a * var_b,
        robertson,
        schrodinger,
        luo_park,
        bound1: bound_one_prefactor(rho.spectrum()) * norm,
        bound2: pre2.value * norm,
        dim: rho.dim(),
        purity: rho.purity(),
        degenerate: pre2.degenerate,
    })
}

/// Below this Bloch radius the `(a.c)^2 / |c|^2` term of the qubit Luo–Park
/// factor is replaced by its limit, zero.
pub const BLOCH_ORIGIN_CUTOFF: f64 = 1e-14;

fn require_unit_traceless(v: &BlochVector, name: &str) -> Result<()> {
    if v.a0 != 0.0 || !v.is_normalized(1e-10) {
        return Err(invalid!(
            InvalidArgument,
            "{name} must be traceless with a unit Pauli vector (a0 = {}, |a| = {})",
            v.a0,
            v.norm()
        ));
    }
    Ok(())
}

/// Qubit Luo–Park factor `sqrt(1-r^2) + (1 - r^2 - sqrt(1-r^2)) (x.c)^2 / r^2`.
pub(crate) fn qubit_classical_factor(x: &[f64; 3], c: &[f64; 3], r: f64) -> f64 {
    let one_minus = (1.0 - r * r).max(0.0);
    let s = libm::sqrt(one_minus);
    if r < BLOCH_ORIGIN_CUTOFF {
        return s;
    }
    let proj = dot3(x, c);
    s + (one_minus - s) * proj * proj / (r * r)
}

/// Closed-form bounds for `A = a.sigma`, `B = b.sigma` (unit, traceless) in
/// the state with Bloch vector `c`.
pub fn qubit_bounds_closed_form(a: &BlochVector, b: &BlochVector, c: [f64; 3]) -> Result<BoundReport> {
    require_unit_traceless(a, "a")?;
    require_unit_traceless(b, "b")?;
    let r = norm3(&c);
    if !(r <= 1.0 + BLOCH_TOL) {
        return Err(invalid!(InvalidState, "Bloch vector norm {r} exceeds 1"));
    }
    let r = r.min(1.0);
    let purity = 0.5 * (1.0 + r * r);
    let axb = cross3(&a.vec, &b.vec);
    let cross_sq = dot3(&axb, &axb);
    let triple = dot3(&axb, &c);
    let robertson = triple * triple;
    let ac = dot3(&a.vec, &c);
    let bc = dot3(&b.vec, &c);
    let cov = dot3(&a.vec, &b.vec) - ac * bc;
    let luo_park =
        robertson + qubit_classical_factor(&a.vec, &c, r) * qubit_classical_factor(&b.vec, &c, r);
    Ok(BoundReport {
        product: (1.0 - ac * ac) * (1.0 - bc * bc),
        robertson,
        schrodinger: robertson + cov * cov,
        luo_park,
        bound1: 2.0 * (purity - r) / (1.0 + r) * cross_sq,
        bound2: 2.0 * (1.0 - purity) * cross_sq,
        dim: 2,
        purity,
        degenerate: false,
    })
}

/// State-independent qubit identity `|[A,B]|_rho^2 = 4 |a x b|^2`.
///
/// Only the Pauli parts of `a` and `b` enter; the identity components commute.
pub fn qubit_commutator_norm_identity(a: &BlochVector, b: &BlochVector) -> f64 {
    let axb = cross3(&a.vec, &b.vec);
    4.0 * dot3(&axb, &axb)
}
