use commutator_bounds::bounds::{
    bound_report, commutator_weighted_norm_sq, qubit_bounds_closed_form, qubit_commutator_norm_identity,
    skew_information, variance, classical_uncertainty,
};
use commutator_bounds::sampling::{fill_unit_sphere, sample_haar_unitary, task_rng};
use commutator_bounds::state::{
    density_from_bloch, sample_density, sample_observable_gaussian, BlochVector, Observable, SpectrumSpec,
};
use proptest::prelude::*;

fn unit3(rng: &mut rand_chacha::ChaCha8Rng) -> [f64; 3] {
    let mut v = [0.0; 3];
    fill_unit_sphere(&mut v, rng);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hard_inequalities_and_ordering(seed: u64, d in 2usize..=6) {
        let mut rng = task_rng(seed, 20, 0);
        let rho = sample_density(d, &SpectrumSpec::HilbertSchmidt, &mut rng).unwrap();
        let a = sample_observable_gaussian(d, &mut rng);
        let b = sample_observable_gaussian(d, &mut rng);
        let r = bound_report(&a, &b, &rho).unwrap();
        prop_assert!(r.default_checks().hard_ok(), "{r:?}");
        prop_assert!(r.ordering_holds(1e-12 * (1.0 + r.product)));
        if d == 2 {
            prop_assert!(r.default_checks().bound2, "{r:?}");
        }
    }

    #[test]
    fn bounds_scale_quadratically(seed: u64, d in 2usize..=5, s in 0.1f64..5.0) {
        let mut rng = task_rng(seed, 21, 0);
        let rho = sample_density(d, &SpectrumSpec::FlatSimplex, &mut rng).unwrap();
        let a = sample_observable_gaussian(d, &mut rng);
        let b = sample_observable_gaussian(d, &mut rng);
        let r = bound_report(&a, &b, &rho).unwrap();
        let rs = bound_report(&a.scale(s), &b, &rho).unwrap();
        let s2 = s * s;
        for (x, y) in [
            (r.product, rs.product), (r.robertson, rs.robertson), (r.schrodinger, rs.schrodinger),
            (r.luo_park, rs.luo_park), (r.bound1, rs.bound1), (r.bound2, rs.bound2),
        ] {
            prop_assert!((x * s2 - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn bounds_are_unitarily_invariant(seed: u64, d in 2usize..=5) {
        let mut rng = task_rng(seed, 22, 0);
        let rho = sample_density(d, &SpectrumSpec::HilbertSchmidt, &mut rng).unwrap();
        let a = sample_observable_gaussian(d, &mut rng);
        let b = sample_observable_gaussian(d, &mut rng);
        let u = sample_haar_unitary(d, &mut rng);
        let r = bound_report(&a, &b, &rho).unwrap();
        let ru = bound_report(
            &a.conjugate_by(&u).unwrap(),
            &b.conjugate_by(&u).unwrap(),
            &rho.conjugate_by(&u).unwrap(),
        ).unwrap();
        for (x, y) in [(r.product, ru.product), (r.luo_park, ru.luo_park), (r.bound2, ru.bound2), (r.schrodinger, ru.schrodinger)] {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn variance_splits_into_quantum_and_classical(seed: u64, d in 2usize..=6) {
        let mut rng = task_rng(seed, 23, 0);
        let rho = sample_density(d, &SpectrumSpec::HilbertSchmidt, &mut rng).unwrap();
        let x = sample_observable_gaussian(d, &mut rng);
        let v = variance(&x, &rho).unwrap();
        let i = skew_information(&x, &rho).unwrap();
        let c = classical_uncertainty(&x, &rho).unwrap();
        prop_assert!(i >= 0.0 && c >= 0.0);
        prop_assert!((v - i - c).abs() <= 1e-10 * (1.0 + v));
    }

    #[test]
    fn qubit_closed_form_matches_matrix_path(seed: u64, r in 0.0f64..=1.0) {
        let mut rng = task_rng(seed, 24, 0);
        let (a, b) = (unit3(&mut rng), unit3(&mut rng));
        let dir = unit3(&mut rng);
        let c = [r * dir[0], r * dir[1], r * dir[2]];
        let (ab, bb) = (BlochVector::traceless(a), BlochVector::traceless(b));
        let closed = qubit_bounds_closed_form(&ab, &bb, c).unwrap();
        let rho = density_from_bloch(c).unwrap();
        let m = bound_report(&Observable::from_bloch(&ab), &Observable::from_bloch(&bb), &rho).unwrap();
        for (x, y) in [
            (closed.product, m.product), (closed.robertson, m.robertson), (closed.schrodinger, m.schrodinger),
            (closed.luo_park, m.luo_park), (closed.bound1, m.bound1), (closed.bound2, m.bound2),
        ] {
            prop_assert!((x - y).abs() <= 1e-9, "{closed:?} vs {m:?}");
        }
    }

    #[test]
    fn qubit_commutator_identity(seed: u64, a0 in -2.0f64..2.0, b0 in -2.0f64..2.0, r in 0.0f64..=1.0) {
        let mut rng = task_rng(seed, 25, 0);
        let (a, b, dir) = (unit3(&mut rng), unit3(&mut rng), unit3(&mut rng));
        let (ab, bb) = (BlochVector::new(a0, a), BlochVector::new(b0, b));
        let rho = density_from_bloch([r * dir[0], r * dir[1], r * dir[2]]).unwrap();
        let m = commutator_weighted_norm_sq(&Observable::from_bloch(&ab), &Observable::from_bloch(&bb), &rho).unwrap();
        prop_assert!((m - qubit_commutator_norm_identity(&ab, &bb)).abs() < 1e-10);
    }
}
