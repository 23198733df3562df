//! Worker pool and the batched, seed-stable runners behind each command.

use commutator_bounds::bounds::{bound_report, BoundReport};
use commutator_bounds::conjecture::{maximize_ratio, OptimizationResult, OptimizeOptions};
use commutator_bounds::mub::{accumulate_mub_samples, MubAverageAccumulator, MubAverageEstimates, PhaseTable};
use commutator_bounds::sampling::{sample_haar_unitary, task_rng};
use commutator_bounds::sphere::{accumulate_qubit_pairs, QubitAverageAccumulator, QubitAverageEstimates};
use commutator_bounds::state::{sample_density, sample_observable_gaussian, DensityMatrix, SpectrumSpec};
use commutator_bounds::stats::pairwise_merge;
use commutator_bounds::{Error, Result};
use rayon::prelude::*;

use crate::error::CliError;

/// Samples per Monte Carlo batch; each batch owns one random stream.
pub const MC_BATCH: u64 = 8192;

/// Stream domains, one per command family.
pub mod domain {
    pub const COMPARE: u64 = 1;
    pub const QUBIT_AVERAGE: u64 = 2;
    pub const MUB_AVERAGE: u64 = 3;
    pub const CONJECTURE: u64 = 4;
    pub const SPECTRUM: u64 = 5;
}

/// A fixed-size rayon pool.
pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    pub fn new(threads: usize) -> std::result::Result<Self, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| CliError::Pool(e.to_string()))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), ..., f(n-1)` evaluated in parallel, returned in index order.
    pub fn map_indexed<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

/// Sizes of the batches covering `samples`, all `MC_BATCH` but the last.
fn batch_sizes(samples: u64) -> impl Fn(u64) -> u64 {
    move |i| (samples - i * MC_BATCH).min(MC_BATCH)
}

fn batch_count(samples: u64) -> u64 {
    samples.div_ceil(MC_BATCH)
}

fn merge_batches<A: Clone>(batches: Vec<Result<A>>, merge: impl Fn(&mut A, &A)) -> Result<A> {
    let batches = batches.into_iter().collect::<Result<Vec<_>>>()?;
    pairwise_merge(batches, merge).ok_or(Error::InvalidArgument("no samples".into()))
}

fn too_few(samples: u64) -> Error {
    Error::InvalidArgument(format!("need at least 2 samples, got {samples}"))
}

/// Random `(A, B, rho)` triples: states from `spec`, observables from the
/// Gaussian unitary ensemble. Triple `i` uses stream `i`.
pub fn compare_reports(
    workers: &Workers,
    seed: u64,
    dim: usize,
    samples: u64,
    spec: &SpectrumSpec,
) -> Result<Vec<BoundReport>> {
    workers
        .map_indexed(samples, |i| {
            let mut rng = task_rng(seed, domain::COMPARE, i);
            let rho = sample_density(dim, spec, &mut rng)?;
            let a = sample_observable_gaussian(dim, &mut rng);
            let b = sample_observable_gaussian(dim, &mut rng);
            bound_report(&a, &b, &rho)
        })
        .into_iter()
        .collect()
}

/// Parallel version of the qubit pair average at purity `p`.
pub fn qubit_average(workers: &Workers, seed: u64, p: f64, samples: u64) -> Result<QubitAverageEstimates> {
    if samples < 2 {
        return Err(too_few(samples));
    }
    let size = batch_sizes(samples);
    let batches = workers.map_indexed(batch_count(samples), |i| {
        let mut acc = QubitAverageAccumulator::new();
        accumulate_qubit_pairs(&mut acc, p, size(i), &mut task_rng(seed, domain::QUBIT_AVERAGE, i))?;
        Ok(acc)
    });
    let acc = merge_batches(batches, |a, b| a.merge(b))?;
    Ok(acc.estimates().expect("at least 2 samples"))
}

/// Parallel sphere average over unbiased pairs built on `table`.
pub fn mub_average(
    workers: &Workers,
    seed: u64,
    table: &PhaseTable,
    lambda: &[f64],
    samples: u64,
) -> Result<MubAverageEstimates> {
    if samples < 2 {
        return Err(too_few(samples));
    }
    let size = batch_sizes(samples);
    let batches = workers.map_indexed(batch_count(samples), |i| {
        let mut acc = MubAverageAccumulator::new();
        let mut rng = task_rng(seed, domain::MUB_AVERAGE, i);
        accumulate_mub_samples(&mut acc, table, lambda, size(i), &mut rng)?;
        Ok(acc)
    });
    let acc = merge_batches(batches, |a, b| a.merge(b))?;
    Ok(acc.estimates().expect("at least 2 samples"))
}

/// One optimizer trial of a conjecture campaign.
#[derive(Debug, Clone)]
pub struct Trial {
    pub index: u64,
    pub rho: DensityMatrix,
    pub result: Result<OptimizationResult>,
}

/// Trial `t` draws a flat-simplex spectrum, rotates it by a Haar unitary and
/// runs the multistart optimizer, all from stream `t`.
pub fn conjecture_campaign(
    workers: &Workers,
    seed: u64,
    dim: usize,
    trials: u64,
    opts: &OptimizeOptions,
) -> Result<Vec<Trial>> {
    workers
        .map_indexed(trials, |t| {
            let mut rng = task_rng(seed, domain::CONJECTURE, t);
            let diag = sample_density(dim, &SpectrumSpec::FlatSimplex, &mut rng)?;
            let u = sample_haar_unitary(dim, &mut rng);
            let rho = diag.conjugate_by(&u)?;
            let result = maximize_ratio(&rho, opts, &mut rng);
            Ok(Trial { index: t, rho, result })
        })
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches_cover_samples_exactly() {
        for n in [2, MC_BATCH - 1, MC_BATCH, MC_BATCH + 1, 5 * MC_BATCH + 17] {
            let size = batch_sizes(n);
            let total: u64 = (0..batch_count(n)).map(size).sum();
            assert_eq!(total, n);
        }
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let one = Workers::new(1).unwrap();
        let three = Workers::new(3).unwrap();
        let a = qubit_average(&one, 9, 0.7, 3 * MC_BATCH + 5).unwrap();
        let b = qubit_average(&three, 9, 0.7, 3 * MC_BATCH + 5).unwrap();
        assert_eq!(a, b);
        let table = PhaseTable::fourier(3).unwrap();
        let lambda = [0.2, 0.3, 0.5];
        assert_eq!(
            mub_average(&one, 9, &table, &lambda, 20_000).unwrap(),
            mub_average(&three, 9, &table, &lambda, 20_000).unwrap()
        );
        let spec = SpectrumSpec::HilbertSchmidt;
        assert_eq!(
            compare_reports(&one, 9, 3, 50, &spec).unwrap(),
            compare_reports(&three, 9, 3, 50, &spec).unwrap()
        );
    }
}
