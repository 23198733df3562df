//! Dense complex matrices, Hermitian eigensystems, commutators and the plain
//! and state-weighted Frobenius (semi-)norms.

mod eigen;
mod matrix;
mod top;

pub use eigen::{
    hermitian_eigensystem, orthonormality_defect, reconstruction_residual, symmetric_eigen,
    EigenSystem, RealEigenSystem, HERMITICITY_TOL,
};
pub use matrix::ComplexMatrix;
pub use top::top_eigenpair;
pub(crate) use matrix::ZERO;
#[cfg(test)]
pub(crate) use matrix::{I, ONE};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Imaginary residue above which a trace that must be real is rejected.
pub const REAL_RESIDUE_TOL: f64 = 1e-9;

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) + &(b * a))
}

/// Semi-inner product `<A, B>_rho = Tr(A^dagger B rho)`.
///
/// The weight may be any positive semi-definite matrix, normalized or not.
pub fn weighted_inner_product<W>(a: &ComplexMatrix, b: &ComplexMatrix, weight: &W) -> Result<Complex64>
where
    W: AsRef<ComplexMatrix> + ?Sized,
{
    let w = weight.as_ref();
    a.check_same_dim(b)?;
    a.check_same_dim(w)?;
    let n = a.dim();
    // Tr(A^dagger (B W)) = sum_{ji} conj(A_ji) (B W)_ji
    let bw = b * w;
    let mut acc = ZERO;
    for j in 0..n {
        for i in 0..n {
            acc += a[(j, i)].conj() * bw[(j, i)];
        }
    }
    Ok(acc)
}

/// Weighted Frobenius semi-norm squared, `Tr(A^dagger A rho)`.
pub fn weighted_norm_sq<W>(a: &ComplexMatrix, weight: &W) -> Result<f64>
where
    W: AsRef<ComplexMatrix> + ?Sized,
{
    let z = weighted_inner_product(a, a, weight)?;
    real_part_checked(z, "weighted norm")
}

/// Plain Frobenius norm squared, `Tr(A^dagger A)`.
pub fn frobenius_norm_sq(a: &ComplexMatrix) -> f64 {
    a.frobenius_norm_sq()
}

/// Real part of an analytically real quantity, after checking the imaginary residue.
pub(crate) fn real_part_checked(z: Complex64, what: &'static str) -> Result<f64> {
    let residue = z.im.abs();
    if residue > REAL_RESIDUE_TOL * (1.0 + z.re.abs()) {
        return Err(Error::NumericalInconsistency { what, residue });
    }
    Ok(z.re)
}
