use commutator_bounds::linalg::ComplexMatrix;
use commutator_bounds::sampling::{sample_haar_unitary, task_rng};
use commutator_bounds::state::{
    bloch_from_density, density_from_bloch, sample_density, sample_flat_simplex, validate_spectrum, BlochVector,
    DensityMatrix, Observable, SpectrumSpec,
};
use proptest::prelude::*;

fn bloch_ball() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..=1.0).prop_map(|(x, y, z, r)| {
        let n = (x * x + y * y + z * z).sqrt().max(1e-9);
        [r * x / n, r * y / n, r * z / n]
    })
}

proptest! {
    #[test]
    fn bloch_round_trip(c in bloch_ball()) {
        let rho = density_from_bloch(c).unwrap();
        let back = bloch_from_density(&rho).unwrap();
        for k in 0..3 {
            prop_assert!((back[k] - c[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_eigenvalues_follow_purity(c in bloch_ball()) {
        let rho = density_from_bloch(c).unwrap();
        let p = rho.purity();
        let r = (2.0 * p - 1.0).max(0.0).sqrt();
        prop_assert!((rho.lambda_min() - (1.0 - r) / 2.0).abs() < 1e-10);
        prop_assert!((rho.lambda_max() - (1.0 + r) / 2.0).abs() < 1e-10);
        let r2: f64 = c.iter().map(|x| x * x).sum();
        prop_assert!((p - (1.0 + r2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_cache_squares_to_state(seed: u64, d in 2usize..=8) {
        let mut rng = task_rng(seed, 10, 0);
        let rho = sample_density(d, &SpectrumSpec::HilbertSchmidt, &mut rng).unwrap();
        let s = rho.sqrt_matrix();
        prop_assert!((&(s * s) - rho.matrix()).max_abs() < 1e-12);
        prop_assert!(s.is_hermitian(1e-12));
    }

    #[test]
    fn purity_range_and_spectrum(seed: u64, d in 2usize..=10) {
        let mut rng = task_rng(seed, 11, 0);
        for spec in [SpectrumSpec::HilbertSchmidt, SpectrumSpec::FlatSimplex] {
            let rho = sample_density(d, &spec, &mut rng).unwrap();
            let p = rho.purity();
            prop_assert!(p >= 1.0 / d as f64 - 1e-12 && p <= 1.0 + 1e-12);
            prop_assert!(validate_spectrum(rho.spectrum()).is_ok());
            prop_assert!(rho.spectrum().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn unitary_conjugation_keeps_spectrum(seed: u64, d in 2usize..=6) {
        let mut rng = task_rng(seed, 12, 0);
        let lambda = sample_flat_simplex(d, &mut rng);
        let rho = DensityMatrix::from_spectrum(&lambda).unwrap();
        let u = sample_haar_unitary(d, &mut rng);
        let rotated = rho.conjugate_by(&u).unwrap();
        for (a, b) in rotated.spectrum().iter().zip(&lambda) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn observable_bloch_round_trip(a0 in -2.0f64..2.0, x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0) {
        let b = BlochVector::new(a0, [x, y, z]);
        let back = Observable::from_bloch(&b).to_bloch().unwrap();
        prop_assert!((back.a0 - a0).abs() < 1e-12);
        for k in 0..3 {
            prop_assert!((back.vec[k] - b.vec[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn invalid_states_are_rejected() {
    assert!(DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.6])).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::diag(&[1.5, -0.5])).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::pauli_y()).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::identity(1)).is_err());
    assert!(density_from_bloch([0.8, 0.8, 0.0]).is_err());
}
