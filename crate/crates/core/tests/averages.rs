use commutator_bounds::mub::{
    accumulate_mub_samples, fourier_mub_pair, mub_b2_average, mub_commutator_norm, mub_commutator_norm_average,
    mub_lp_average, mub_vanishing_check, qubit_spectrum_of_purity, MubAverageAccumulator, PhaseTable,
};
use commutator_bounds::sampling::{sample_unit_sphere, task_rng};
use commutator_bounds::sphere::{
    accumulate_qubit_pairs_at, averaged_bounds_qubit, QubitAverageAccumulator,
};
use commutator_bounds::bounds::commutator_weighted_norm_sq;
use commutator_bounds::state::{sample_flat_simplex, DensityMatrix};

#[test]
fn pair_average_does_not_depend_on_state_direction() {
    let p: f64 = 0.8;
    let r = (2.0 * p - 1.0).sqrt();
    let s = r / 3f64.sqrt();
    let mut along_z = QubitAverageAccumulator::new();
    let mut diagonal = QubitAverageAccumulator::new();
    accumulate_qubit_pairs_at(&mut along_z, [0.0, 0.0, r], 100_000, &mut task_rng(1, 30, 0)).unwrap();
    accumulate_qubit_pairs_at(&mut diagonal, [s, s, s], 100_000, &mut task_rng(1, 30, 1)).unwrap();
    let (ez, ed) = (along_z.estimates().unwrap(), diagonal.estimates().unwrap());
    let exact = averaged_bounds_qubit(p).unwrap();
    for (a, b) in ez.as_array().iter().zip(ed.as_array()) {
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() <= 5.0 * se + 1e-15, "{a:?} vs {b:?}");
    }
    assert!(ez.agrees_with(&exact, 4.0) && ed.agrees_with(&exact, 4.0));
}

#[test]
fn bound_one_never_exceeds_bound_two_on_purity_grid() {
    for i in 0..=10_000 {
        let p = 0.5 + 0.5 * i as f64 / 10_000.0;
        let a = averaged_bounds_qubit(p).unwrap();
        assert!(a.bound1 <= a.bound2 + 1e-15, "P = {p}");
        assert!(a.robertson >= 0.0 && a.bound1 >= 0.0);
    }
}

#[test]
fn fourier_tables_are_unbiased() {
    for d in 2..=10 {
        assert!(PhaseTable::fourier(d).unwrap().unbiasedness_defect() < 1e-12, "d = {d}");
    }
}

#[test]
fn phase_sum_agrees_with_matrix_path() {
    let mut rng = task_rng(2, 31, 0);
    for d in 2..=6 {
        for _ in 0..1000 {
            let a = sample_unit_sphere(d, &mut rng);
            let b = sample_unit_sphere(d, &mut rng);
            let lambda = sample_flat_simplex(d, &mut rng);
            let pair = fourier_mub_pair(d, &a, &b).unwrap();
            let rho = DensityMatrix::from_spectrum(&lambda).unwrap();
            let m = commutator_weighted_norm_sq(&pair.observable_a(), &pair.observable_b(), &rho).unwrap();
            let s = mub_commutator_norm(&pair, &lambda).unwrap();
            assert!((m - s).abs() < 1e-9, "d = {d}: {m} vs {s}");
        }
    }
}

#[test]
fn robertson_and_schrodinger_vanish_for_unbiased_pairs() {
    let mut rng = task_rng(3, 32, 0);
    for d in 2..=7 {
        for _ in 0..20 {
            let pair = fourier_mub_pair(d, &sample_unit_sphere(d, &mut rng), &sample_unit_sphere(d, &mut rng)).unwrap();
            let (r, s) = mub_vanishing_check(&pair, &sample_flat_simplex(d, &mut rng)).unwrap();
            assert!(r < 1e-10 && s < 1e-10);
        }
    }
}

#[test]
fn commutator_average_is_state_and_phase_independent() {
    let d = 4;
    let target = mub_commutator_norm_average(d);
    let spectra = [vec![0.1, 0.2, 0.3, 0.4], vec![0.25; 4]];
    let tables = [PhaseTable::fourier(d).unwrap(), PhaseTable::sylvester(d).unwrap()];
    let mut estimates = Vec::new();
    for (si, lambda) in spectra.iter().enumerate() {
        for (ti, table) in tables.iter().enumerate() {
            let mut acc = MubAverageAccumulator::new();
            let mut rng = task_rng(4, 33, (si * 2 + ti) as u64);
            accumulate_mub_samples(&mut acc, table, lambda, 100_000, &mut rng).unwrap();
            let e = acc.estimates().unwrap().commutator_norm;
            assert!(e.agrees_with(target, 4.0), "{e:?} vs {target}");
            estimates.push(e);
        }
    }
    for a in &estimates {
        for b in &estimates {
            let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            assert!((a.mean - b.mean).abs() <= 5.0 * se);
        }
    }
}

#[test]
fn qubit_bound_two_dominates_luo_park_on_average() {
    for i in 0..=10_000 {
        let p = 0.5 + 0.5 * i as f64 / 10_000.0;
        let lambda = qubit_spectrum_of_purity(p).unwrap();
        let b2 = mub_b2_average(&lambda).unwrap().value;
        let lp = mub_lp_average(&lambda).unwrap();
        assert!(b2 >= lp - 1e-15, "P = {p}: {b2} < {lp}");
    }
}
