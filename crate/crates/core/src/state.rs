//! Density matrices, observables and qubit Bloch representations.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, EigenSystem};
use crate::sampling::{fill_unit_sphere, sample_ginibre, sample_unit_sphere};

/// Eigenvalues above `-PSD_CLIP` are treated as round-off and clipped to zero.
pub const PSD_CLIP: f64 = 1e-12;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed excess of a Bloch vector norm over one.
pub const BLOCH_TOL: f64 = 1e-12;

/// A validated quantum state with its spectral data cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eigen: EigenSystem,
    sqrt_matrix: ComplexMatrix,
    purity: f64,
}

/// `(lambda_min, lambda_second, lambda_max, purity)` of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    pub lambda_min: f64,
    pub lambda_second: f64,
    pub lambda_max: f64,
    pub purity: f64,
}

impl DensityMatrix {
    /// Validates `matrix` as a state of dimension at least two.
    ///
    /// Negative eigenvalues down to `-PSD_CLIP` are clipped to zero and the
    /// spectrum renormalized.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim < 2 {
            return Err(invalid!(InvalidState, "dimension {dim} < 2"));
        }
        let mut eigen = hermitian_eigensystem(&matrix).map_err(|e| match e {
            Error::NotHermitian { defect } => {
                invalid!(InvalidState, "not Hermitian (defect {defect:e})")
            }
            other => other,
        })?;
        let trace: f64 = eigen.values.iter().sum();
        if !((trace - 1.0).abs() <= TRACE_TOL) {
            return Err(invalid!(InvalidState, "trace {trace} != 1"));
        }
        if eigen.values[0] < -PSD_CLIP {
            return Err(invalid!(
                InvalidState,
                "negative eigenvalue {:e}",
                eigen.values[0]
            ));
        }
        let clipped = eigen.values.iter().any(|&l| l < 0.0);
        for l in eigen.values.iter_mut() {
            *l = l.max(0.0);
        }
        if clipped {
            let total: f64 = eigen.values.iter().sum();
            eigen.values.iter_mut().for_each(|l| *l /= total);
        }
        let matrix = if clipped {
            eigen.reconstruct()
        } else {
            matrix.hermitian_part()
        };
        let sqrt_matrix = eigen.map_values(libm::sqrt);
        let purity = eigen.values.iter().map(|l| l * l).sum();
        Ok(Self {
            matrix,
            eigen,
            sqrt_matrix,
            purity,
        })
    }

    /// Diagonal state with the given eigenvalues, in the given order.
    pub fn from_spectrum(spectrum: &[f64]) -> Result<Self> {
        validate_spectrum(spectrum)?;
        Self::new(ComplexMatrix::diag(spectrum))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eigen
    }

    /// Cached positive square root.
    pub fn sqrt_matrix(&self) -> &ComplexMatrix {
        &self.sqrt_matrix
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigen.values[0]
    }

    pub fn lambda_second(&self) -> f64 {
        self.eigen.values[1]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.values[self.dim() - 1]
    }

    pub fn spectral_summary(&self) -> SpectralSummary {
        SpectralSummary {
            lambda_min: self.lambda_min(),
            lambda_second: self.lambda_second(),
            lambda_max: self.lambda_max(),
            purity: self.purity,
        }
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.matrix.conjugate_by(u)?)
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Free-function form of [`DensityMatrix::spectral_summary`].
pub fn spectral_summary(rho: &DensityMatrix) -> SpectralSummary {
    rho.spectral_summary()
}

/// Checks that `spectrum` is a probability vector (up to `PSD_CLIP` round-off).
pub fn validate_spectrum(spectrum: &[f64]) -> Result<()> {
    if spectrum.len() < 2 {
        return Err(invalid!(InvalidSpectrum, "need at least 2 eigenvalues"));
    }
    if let Some(bad) = spectrum.iter().find(|l| !(**l >= -PSD_CLIP)) {
        return Err(invalid!(InvalidSpectrum, "negative or NaN eigenvalue {bad}"));
    }
    let total: f64 = spectrum.iter().sum();
    if !((total - 1.0).abs() <= TRACE_TOL) {
        return Err(invalid!(InvalidSpectrum, "eigenvalues sum to {total}, not 1"));
    }
    Ok(())
}

/// A Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    /// Accepts matrices within the Hermiticity tolerance and symmetrizes them.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if !(defect <= crate::linalg::HERMITICITY_TOL) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn diag(values: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::diag(values),
        }
    }

    /// `a0 I + a . sigma`.
    pub fn from_bloch(b: &BlochVector) -> Self {
        let sx = ComplexMatrix::pauli_x();
        let sy = ComplexMatrix::pauli_y();
        let sz = ComplexMatrix::pauli_z();
        let m = &(&sx.scale_real(b.vec[0]) + &sy.scale_real(b.vec[1])) + &sz.scale_real(b.vec[2]);
        Self {
            matrix: m.shift_diagonal(Complex64::new(b.a0, 0.0)),
        }
    }

    /// Pauli-basis coefficients of a qubit observable.
    pub fn to_bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: 2,
            });
        }
        let m = &self.matrix;
        let coef = |p: &ComplexMatrix| 0.5 * m.trace_product(p).unwrap().re;
        Ok(BlochVector {
            a0: 0.5 * m.trace().re,
            vec: [
                coef(&ComplexMatrix::pauli_x()),
                coef(&ComplexMatrix::pauli_y()),
                coef(&ComplexMatrix::pauli_z()),
            ],
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.matrix.conjugate_by(u)?)
    }
}

impl AsRef<ComplexMatrix> for Observable {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Pauli-basis representation `a0 I + sum_k vec_k sigma_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub a0: f64,
    pub vec: [f64; 3],
}

impl BlochVector {
    pub fn new(a0: f64, vec: [f64; 3]) -> Self {
        Self { a0, vec }
    }

    pub fn traceless(vec: [f64; 3]) -> Self {
        Self { a0: 0.0, vec }
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.vec)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    libm::sqrt(dot3(a, a))
}

/// Qubit state `(I + c . sigma) / 2`.
pub fn density_from_bloch(c: [f64; 3]) -> Result<DensityMatrix> {
    let r = norm3(&c);
    if !(r <= 1.0 + BLOCH_TOL) {
        return Err(invalid!(InvalidState, "Bloch vector norm {r} exceeds 1"));
    }
    let m = Observable::from_bloch(&BlochVector::new(1.0, c)).into_matrix();
    DensityMatrix::new(m.scale_real(0.5))
}

/// Bloch vector `c_k = Tr(rho sigma_k)` of a qubit state.
pub fn bloch_from_density(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 2,
        });
    }
    let m = rho.matrix();
    let c = |p: ComplexMatrix| m.trace_product(&p).unwrap().re;
    Ok([
        c(ComplexMatrix::pauli_x()),
        c(ComplexMatrix::pauli_y()),
        c(ComplexMatrix::pauli_z()),
    ])
}

/// Sampling measure for random states.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SpectrumSpec {
    /// `G G^dagger / Tr(G G^dagger)` with `G` Ginibre.
    #[default]
    HilbertSchmidt,
    /// Diagonal state, ascending Dirichlet(1, ..., 1) eigenvalues.
    FlatSimplex,
    /// Diagonal state with exactly these eigenvalues.
    FixedSpectrum(Vec<f64>),
}

pub fn sample_density<R: Rng + ?Sized>(
    d: usize,
    spec: &SpectrumSpec,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(invalid!(InvalidArgument, "dimension {d} < 2"));
    }
    match spec {
        SpectrumSpec::HilbertSchmidt => {
            let g = sample_ginibre(d, rng);
            let w = &g * &g.adjoint();
            let t = w.trace().re;
            DensityMatrix::new(w.scale_real(1.0 / t))
        }
        SpectrumSpec::FlatSimplex => DensityMatrix::from_spectrum(&sample_flat_simplex(d, rng)),
        SpectrumSpec::FixedSpectrum(lambda) => {
            if lambda.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: lambda.len(),
                });
            }
            DensityMatrix::from_spectrum(lambda)
        }
    }
}

/// Ascending Dirichlet(1, ..., 1) sample: the uniform measure on the simplex.
pub fn sample_flat_simplex<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w.sort_by(f64::total_cmp);
    w
}

/// Unit-normalized random observable.
///
/// For `d = 2` this is `a . sigma` with `a` uniform on `S_2`; for larger `d` it
/// is a diagonal matrix whose eigenvalue vector is uniform on `S_{d-1}`.
pub fn sample_observable_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Observable> {
    match d {
        0 | 1 => Err(invalid!(InvalidArgument, "dimension {d} < 2")),
        2 => {
            let mut a = [0.0; 3];
            fill_unit_sphere(&mut a, rng);
            Ok(Observable::from_bloch(&BlochVector::traceless(a)))
        }
        _ => Ok(Observable::diag(&sample_unit_sphere(d, rng))),
    }
}

/// Random Hermitian observable from the Gaussian unitary ensemble.
pub fn sample_observable_gaussian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Observable {
    Observable {
        matrix: crate::sampling::sample_hermitian(d, rng),
    }
}
