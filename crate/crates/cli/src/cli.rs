//! Command-line definitions and the command implementations.

use std::fs;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use commutator_bounds::bounds::{HARD_SLACK, CONJECTURE_SLACK};
use commutator_bounds::conjecture::{OptimizeOptions, OptimizerMode};
use commutator_bounds::mub::{
    emit_fig2_data, mub_b2_average, mub_commutator_norm_average, mub_factor_averages, mub_lp_average, PhaseTable,
};
use commutator_bounds::sampling::task_rng;
use commutator_bounds::sphere::{averaged_bounds_qubit, emit_fig1_data};
use commutator_bounds::state::{sample_flat_simplex, validate_spectrum, SpectrumSpec};
use log::{info, warn};
use serde::Serialize;

use crate::error::{CliError, Outcome};
use crate::format::{self, CompareRecord, EstimateRecord, Fig1Record, Fig2Record, ValueRecord};
use crate::runner::{self, domain, Trial, Workers};

/// |z| beyond which a Monte Carlo estimate is reported as suspicious.
const Z_WARN: f64 = 4.0;

#[derive(Debug, Parser)]
#[command(name = "cbounds", version, about = "Variance-product uncertainty bounds: comparisons, averages and optimizer campaigns")]
pub struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    pub workers: Option<NonZeroUsize>,

    /// Output file [default: stdout].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output encoding [default depends on the command].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateMeasure {
    /// Hilbert–Schmidt random states.
    Hs,
    /// Diagonal states with a uniformly random spectrum.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Phases {
    Fourier,
    /// Walsh–Hadamard phases; dimension must be a power of two.
    Sylvester,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Complex,
    Hermitian,
}

impl From<Mode> for OptimizerMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Complex => OptimizerMode::Complex,
            Mode::Hermitian => OptimizerMode::Hermitian,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All five bounds on random (A, B, rho) triples, one record per triple.
    Compare {
        #[arg(long, value_parser = dimension)]
        dim: usize,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, value_enum, default_value_t = StateMeasure::Hs)]
        states: StateMeasure,
    },
    /// Closed-form qubit pair averages on a uniform purity grid.
    Fig1 {
        #[arg(long, default_value_t = 101, value_parser = grid_points)]
        points: usize,
    },
    /// Closed-form qubit averages over unbiased observable pairs on a purity grid.
    Fig2 {
        #[arg(long, default_value_t = 101, value_parser = grid_points)]
        points: usize,
    },
    /// Monte Carlo sphere averages checked against their closed forms.
    McAverage(McAverageArgs),
    /// Maximize the commutator ratio over random states and compare with the conjectured constant.
    VerifyConjecture(VerifyArgs),
    /// Closed-form averages over unbiased observable pairs for one spectrum.
    MubAverage {
        #[arg(long, value_parser = dimension)]
        dim: Option<usize>,
        #[command(flatten)]
        spectrum: SpectrumArg,
    },
}

#[derive(Debug, Args)]
pub struct SpectrumArg {
    /// Comma-separated eigenvalues [default: uniformly random, from the seed].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub spectrum: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct McAverageArgs {
    /// Qubit pair average at this purity.
    #[arg(long, value_parser = qubit_purity, required_unless_present = "mub", conflicts_with = "mub")]
    pub purity: Option<f64>,
    /// Average over unbiased observable pairs instead.
    #[arg(long)]
    pub mub: bool,
    #[arg(long, value_parser = dimension, requires = "mub")]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub spectrum: SpectrumArg,
    #[arg(long, value_enum, default_value_t = Phases::Fourier, requires = "mub")]
    pub phases: Phases,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1000..))]
    pub samples: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = campaign_dimension)]
    pub dim: usize,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Random starts per trial.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Relative gain per iteration that ends a start.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = Mode::Complex)]
    pub mode: Mode,
    /// Skip the extra start at the analytic equality pair.
    #[arg(long)]
    pub no_witness_start: bool,
    /// Relative excess over the conjectured constant that counts as a counterexample.
    #[arg(long, default_value_t = 1e-8)]
    pub counterexample_tol: f64,
    /// Directory receiving counterexample files.
    #[arg(long, default_value = "counterexamples")]
    pub counterexample_dir: PathBuf,
}

fn dimension(s: &str) -> Result<usize, String> {
    let d: usize = s.parse().map_err(|e| format!("{e}"))?;
    if d < 2 {
        return Err(format!("dimension must be at least 2, got {d}"));
    }
    Ok(d)
}

fn campaign_dimension(s: &str) -> Result<usize, String> {
    let d = dimension(s)?;
    if d > 15 {
        return Err(format!("dimension must be at most 15, got {d}"));
    }
    Ok(d)
}

fn grid_points(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 {
        return Err(format!("need at least 2 points, got {n}"));
    }
    Ok(n)
}

fn qubit_purity(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(0.5..=1.0).contains(&p) {
        return Err(format!("qubit purity must lie in [0.5, 1], got {p}"));
    }
    Ok(p)
}

/// Bytes for the output sink plus the exit status they imply.
struct Report {
    body: String,
    outcome: Outcome,
}

impl Report {
    fn ok(body: String) -> Self {
        Self {
            body,
            outcome: Outcome::Success,
        }
    }
}

impl Cli {
    pub fn run(&self) -> Result<Outcome, CliError> {
        let threads = self
            .workers
            .map(NonZeroUsize::get)
            .or_else(|| std::thread::available_parallelism().ok().map(NonZeroUsize::get))
            .unwrap_or(1);
        let workers = Workers::new(threads)?;
        info!("{} worker thread(s), seed {}", workers.threads(), self.seed);
        let report = match &self.command {
            Command::Compare { dim, samples, states } => self.compare(&workers, *dim, *samples, *states)?,
            Command::Fig1 { points } => self.fig1(*points)?,
            Command::Fig2 { points } => self.fig2(*points)?,
            Command::McAverage(args) => self.mc_average(&workers, args)?,
            Command::VerifyConjecture(args) => self.verify(&workers, args)?,
            Command::MubAverage { dim, spectrum } => self.mub_average(*dim, spectrum)?,
        };
        self.emit(&report.body)?;
        Ok(report.outcome)
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn emit(&self, body: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => fs::write(path, body).map_err(|e| CliError::io(path, e)),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(body.as_bytes())
                    .and_then(|()| stdout.flush())
                    .map_err(|e| CliError::io("<stdout>", e))
            }
        }
    }

    fn compare(&self, workers: &Workers, dim: usize, samples: u64, states: StateMeasure) -> Result<Report, CliError> {
        let spec = match states {
            StateMeasure::Hs => SpectrumSpec::HilbertSchmidt,
            StateMeasure::Flat => SpectrumSpec::FlatSimplex,
        };
        let reports = runner::compare_reports(workers, self.seed, dim, samples, &spec)?;
        let (mut hard, mut conjecture) = (0usize, 0usize);
        let mut records = Vec::with_capacity(reports.len());
        for (i, r) in reports.iter().enumerate() {
            let checks = r.checks(HARD_SLACK, CONJECTURE_SLACK);
            if !checks.hard_ok() {
                warn!("triple {i}: proven inequality violated");
                hard += 1;
            } else if !checks.bound2 {
                warn!("triple {i}: conjectured inequality violated");
                conjecture += 1;
            }
            records.push(CompareRecord::new(i as u64, r, checks));
        }
        let outcome = if hard > 0 {
            Outcome::Failure
        } else if conjecture > 0 {
            Outcome::ConjectureViolation
        } else {
            Outcome::Success
        };
        let body = match self.format_or(Format::Json) {
            Format::Json => format::json_lines(&records),
            Format::Csv => format::compare_csv(&records),
        };
        Ok(Report { body, outcome })
    }

    fn fig1(&self, points: usize) -> Result<Report, CliError> {
        let rows = emit_fig1_data(points)?;
        Ok(Report::ok(match self.format_or(Format::Csv) {
            Format::Csv => format::fig1_csv(&rows),
            Format::Json => format::json_lines(rows.iter().map(Fig1Record::from)),
        }))
    }

    fn fig2(&self, points: usize) -> Result<Report, CliError> {
        let rows = emit_fig2_data(points)?;
        Ok(Report::ok(match self.format_or(Format::Csv) {
            Format::Csv => format::fig2_csv(&rows),
            Format::Json => format::json_lines(rows.iter().map(Fig2Record::from)),
        }))
    }

    /// The explicit spectrum sorted ascending, or a uniformly random one drawn from the seed.
    fn spectrum(&self, dim: Option<usize>, arg: &SpectrumArg) -> Result<Vec<f64>, CliError> {
        match (&arg.spectrum, dim) {
            (Some(s), d) => {
                if let Some(d) = d.filter(|d| *d != s.len()) {
                    return Err(CliError::Usage(format!("--spectrum has {} entries but --dim is {d}", s.len())));
                }
                if s.len() < 2 {
                    return Err(CliError::Usage("--spectrum needs at least 2 entries".into()));
                }
                let mut s = s.clone();
                s.sort_by(f64::total_cmp);
                validate_spectrum(&s).map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(s)
            }
            (None, Some(d)) => Ok(sample_flat_simplex(d, &mut task_rng(self.seed, domain::SPECTRUM, 0))),
            (None, None) => Err(CliError::Usage("give --dim or --spectrum".into())),
        }
    }

    fn mc_average(&self, workers: &Workers, args: &McAverageArgs) -> Result<Report, CliError> {
        let report = if let Some(p) = args.purity {
            let est = runner::qubit_average(workers, self.seed, p, args.samples)?;
            let exact = averaged_bounds_qubit(p)?;
            let estimates = vec![
                EstimateRecord::new("robertson", &est.robertson, exact.robertson),
                EstimateRecord::new("schrodinger", &est.schrodinger, exact.schrodinger),
                EstimateRecord::new("luo_park", &est.luo_park, exact.luo_park),
                EstimateRecord::new("bound1", &est.bound1, exact.bound1),
                EstimateRecord::new("bound2", &est.bound2, exact.bound2),
            ];
            McReport {
                kind: "qubit",
                dim: 2,
                purity: p,
                spectrum: None,
                phases: None,
                estimates,
            }
        } else {
            let lambda = self.spectrum(args.dim, &args.spectrum)?;
            let d = lambda.len();
            let table = match args.phases {
                Phases::Fourier => PhaseTable::fourier(d)?,
                Phases::Sylvester => {
                    PhaseTable::sylvester(d).map_err(|e| CliError::Usage(format!("sylvester phases: {e}")))?
                }
            };
            let est = runner::mub_average(workers, self.seed, &table, &lambda, args.samples)?;
            let (fa, fb) = mub_factor_averages(&lambda)?;
            let estimates = vec![
                EstimateRecord::new("commutator_norm", &est.commutator_norm, mub_commutator_norm_average(d)),
                EstimateRecord::new("a_factor", &est.a_factor, fa),
                EstimateRecord::new("b_factor", &est.b_factor, fb),
                EstimateRecord::new("lp_term", &est.lp_term, mub_lp_average(&lambda)?),
            ];
            McReport {
                kind: "mub",
                dim: d,
                purity: lambda.iter().map(|l| l * l).sum(),
                spectrum: Some(lambda),
                phases: Some(match args.phases {
                    Phases::Fourier => "fourier",
                    Phases::Sylvester => "sylvester",
                }),
                estimates,
            }
        };
        for e in &report.estimates {
            if !(e.z_score.abs() <= Z_WARN) {
                warn!("{}: z = {} against the closed form", e.quantity, e.z_score);
            }
        }
        Ok(Report::ok(match self.format_or(Format::Json) {
            Format::Json => format::json_lines([&report]),
            Format::Csv => format::estimates_csv(&report.estimates),
        }))
    }

    fn mub_average(&self, dim: Option<usize>, arg: &SpectrumArg) -> Result<Report, CliError> {
        let lambda = self.spectrum(dim, arg)?;
        let d = lambda.len();
        let (fa, fb) = mub_factor_averages(&lambda)?;
        let b2 = mub_b2_average(&lambda)?;
        if b2.degenerate {
            warn!("two smallest eigenvalues vanish; the bound-2 average is reported as zero");
        }
        let values = vec![
            ValueRecord {
                quantity: "purity",
                value: lambda.iter().map(|l| l * l).sum(),
            },
            ValueRecord {
                quantity: "commutator_norm_avg",
                value: mub_commutator_norm_average(d),
            },
            ValueRecord {
                quantity: "a_factor_avg",
                value: fa,
            },
            ValueRecord {
                quantity: "b_factor_avg",
                value: fb,
            },
            ValueRecord {
                quantity: "luo_park_mub_avg",
                value: mub_lp_average(&lambda)?,
            },
            ValueRecord {
                quantity: "bound2_mub_avg",
                value: b2.value,
            },
        ];
        Ok(Report::ok(match self.format_or(Format::Json) {
            Format::Json => format::json_lines([MubReport {
                dim: d,
                spectrum: lambda,
                degenerate: b2.degenerate,
                values,
            }]),
            Format::Csv => format::values_csv(&values),
        }))
    }

    fn verify(&self, workers: &Workers, args: &VerifyArgs) -> Result<Report, CliError> {
        if self.format == Some(Format::Csv) {
            return Err(CliError::Usage("verify-conjecture writes JSON lines only".into()));
        }
        if !(args.tol > 0.0) || !(args.counterexample_tol >= 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        let opts = OptimizeOptions {
            restarts: args.restarts,
            max_iters: args.max_iters,
            tol: args.tol,
            mode: args.mode.into(),
            seed_witness: !args.no_witness_start,
        };
        let trials = runner::conjecture_campaign(workers, self.seed, args.dim, args.trials, &opts)?;
        let mut summary = Summary::new(args.dim, args.trials, opts.mode);
        let mut body = String::new();
        for trial in &trials {
            let record = TrialRecord::new(trial, args.counterexample_tol);
            if record.counterexample {
                let path = self.write_counterexample(&args.counterexample_dir, args.dim, trial)?;
                summary.counterexamples.push(path);
            }
            summary.absorb(&record);
            body.push_str(&format::json_lines([&record]));
        }
        body.push_str(&format::json_lines([&summary]));
        let outcome = if !summary.counterexamples.is_empty() {
            Outcome::Counterexample
        } else if summary.all_clean() {
            Outcome::Success
        } else {
            Outcome::Failure
        };
        Ok(Report { body, outcome })
    }

    fn write_counterexample(&self, dir: &Path, dim: usize, trial: &Trial) -> Result<String, CliError> {
        let res = trial.result.as_ref().expect("only successful trials are counterexamples");
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(format!("d{dim}-seed{}-trial{}.json", self.seed, trial.index));
        let doc = Counterexample {
            dim,
            seed: self.seed,
            trial: trial.index,
            spectrum: &res.spectrum,
            achieved_ratio: res.achieved_ratio,
            conjectured_constant: res.conjectured_constant,
            rho: format::matrix_json(trial.rho.matrix()),
            a: format::matrix_json(&res.witness_a),
            b: format::matrix_json(&res.witness_b),
        };
        let text = serde_json::to_string_pretty(&doc).expect("records serialize") + "\n";
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        warn!("counterexample written to {}", path.display());
        Ok(path.display().to_string())
    }
}

#[derive(Debug, Serialize)]
struct McReport {
    kind: &'static str,
    dim: usize,
    purity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phases: Option<&'static str>,
    estimates: Vec<EstimateRecord>,
}

#[derive(Debug, Serialize)]
struct MubReport {
    dim: usize,
    spectrum: Vec<f64>,
    degenerate: bool,
    values: Vec<ValueRecord>,
}

#[derive(Debug, Serialize)]
struct FailureRecord {
    restart: usize,
    error: String,
}

#[derive(Debug, Serialize)]
struct TrialRecord {
    trial: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    spectrum: Vec<f64>,
    achieved_ratio: Option<f64>,
    conjectured_constant: Option<f64>,
    loose_constant: Option<f64>,
    relative_deviation: Option<f64>,
    random_relative_deviation: Option<f64>,
    iterations: usize,
    restarts_used: usize,
    best_restart: Option<usize>,
    converged: bool,
    monotone: bool,
    respects_loose_constant: bool,
    counterexample: bool,
    failures: Vec<FailureRecord>,
}

impl TrialRecord {
    fn new(trial: &Trial, counterexample_tol: f64) -> Self {
        match &trial.result {
            Ok(r) => Self {
                trial: trial.index,
                error: None,
                spectrum: r.spectrum.clone(),
                achieved_ratio: Some(r.achieved_ratio),
                conjectured_constant: Some(r.conjectured_constant),
                loose_constant: Some(r.loose_constant),
                relative_deviation: Some(r.relative_deviation()),
                random_relative_deviation: r.random_relative_deviation(),
                iterations: r.iterations,
                restarts_used: r.restarts_used,
                best_restart: Some(r.best_restart),
                converged: r.converged,
                monotone: r.monotone,
                respects_loose_constant: r.respects_loose_constant(1e-9),
                counterexample: r.is_counterexample(counterexample_tol),
                failures: r
                    .failures
                    .iter()
                    .map(|f| FailureRecord {
                        restart: f.index,
                        error: f.error.to_string(),
                    })
                    .collect(),
            },
            Err(e) => Self {
                trial: trial.index,
                error: Some(e.to_string()),
                spectrum: trial.rho.spectrum().to_vec(),
                achieved_ratio: None,
                conjectured_constant: None,
                loose_constant: None,
                relative_deviation: None,
                random_relative_deviation: None,
                iterations: 0,
                restarts_used: 0,
                best_restart: None,
                converged: false,
                monotone: false,
                respects_loose_constant: false,
                counterexample: false,
                failures: Vec::new(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    summary: bool,
    dim: usize,
    trials: u64,
    mode: &'static str,
    max_relative_deviation: f64,
    max_random_relative_deviation: Option<f64>,
    failed: Vec<u64>,
    not_converged: Vec<u64>,
    not_monotone: Vec<u64>,
    above_loose_constant: Vec<u64>,
    counterexamples: Vec<String>,
}

impl Summary {
    fn new(dim: usize, trials: u64, mode: OptimizerMode) -> Self {
        Self {
            summary: true,
            dim,
            trials,
            mode: mode.as_str(),
            max_relative_deviation: 0.0,
            max_random_relative_deviation: None,
            failed: Vec::new(),
            not_converged: Vec::new(),
            not_monotone: Vec::new(),
            above_loose_constant: Vec::new(),
            counterexamples: Vec::new(),
        }
    }

    fn absorb(&mut self, r: &TrialRecord) {
        if r.error.is_some() {
            warn!("trial {}: {}", r.trial, r.error.as_deref().unwrap_or_default());
            self.failed.push(r.trial);
            return;
        }
        if let Some(dev) = r.relative_deviation {
            self.max_relative_deviation = self.max_relative_deviation.max(dev.abs());
        }
        if let Some(dev) = r.random_relative_deviation {
            let m = self.max_random_relative_deviation.get_or_insert(0.0);
            *m = m.max(dev.abs());
        }
        if !r.converged {
            warn!("trial {}: optimizer hit the iteration cap", r.trial);
            self.not_converged.push(r.trial);
        }
        if !r.monotone {
            self.not_monotone.push(r.trial);
        }
        if !r.respects_loose_constant {
            self.above_loose_constant.push(r.trial);
        }
    }

    fn all_clean(&self) -> bool {
        self.failed.is_empty()
            && self.not_converged.is_empty()
            && self.not_monotone.is_empty()
            && self.above_loose_constant.is_empty()
    }
}

#[derive(Debug, Serialize)]
struct Counterexample<'a> {
    dim: usize,
    seed: u64,
    trial: u64,
    spectrum: &'a [f64],
    achieved_ratio: f64,
    conjectured_constant: f64,
    rho: Vec<Vec<[f64; 2]>>,
    a: Vec<Vec<[f64; 2]>>,
    b: Vec<Vec<[f64; 2]>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn range_checks_are_usage_errors() {
        for args in [
            &["cbounds", "compare", "--dim", "0"][..],
            &["cbounds", "verify-conjecture", "--dim", "16"],
            &["cbounds", "mc-average", "--purity", "0.5", "--samples", "999"],
            &["cbounds", "mc-average", "--purity", "0.4"],
            &["cbounds", "fig1", "--points", "1"],
        ] {
            let err = Cli::try_parse_from(args).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}");
        }
    }
}
