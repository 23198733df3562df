//! Driver layer for `commutator-bounds`: parallel runners with reproducible
//! seeding, CSV/JSON encoders and the `cbounds` command set.
//!
//! Every random quantity is drawn from a stream keyed by
//! `(seed, domain, task)`. Monte Carlo work is cut into fixed-size batches
//! whose results are merged in index order, so the output bytes depend only
//! on the seed and never on the number of worker threads.

pub mod cli;
pub mod error;
pub mod format;
pub mod runner;

pub use error::{CliError, Outcome};
pub use runner::Workers;
