//! CSV and JSON encoders. Every writer returns the complete output as a
//! string so the caller can emit it in one ordered pass.

use std::fmt::Write as _;

use commutator_bounds::bounds::{BoundReport, InequalityChecks};
use commutator_bounds::ComplexMatrix;
use commutator_bounds::mub::MubAverageRow;
use commutator_bounds::sphere::AveragedBounds;
use commutator_bounds::stats::McEstimate;
use serde::Serialize;

pub const FIG1_HEADER: &str = "purity,robertson,schrodinger,luo_park,bound1,bound2";
pub const FIG2_HEADER: &str = "purity,luo_park_mub_avg,bound2_mub_avg";

/// Shortest decimal that parses back to the same `f64`, in exponent form
/// outside `[1e-5, 1e16)`.
pub fn csv_number(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn csv_table<const N: usize>(header: &str, rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut out = String::with_capacity(64);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&csv_number(*v));
        }
        out.push('\n');
    }
    out
}

pub fn fig1_csv(rows: &[AveragedBounds]) -> String {
    csv_table(
        FIG1_HEADER,
        rows.iter()
            .map(|r| [r.purity, r.robertson, r.schrodinger, r.luo_park, r.bound1, r.bound2]),
    )
}

pub fn fig2_csv(rows: &[MubAverageRow]) -> String {
    csv_table(
        FIG2_HEADER,
        rows.iter().map(|r| [r.purity, r.luo_park_mub_avg, r.bound2_mub_avg]),
    )
}

/// One JSON document per line.
pub fn json_lines<T: Serialize>(items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Row-major `[[re, im], ...]` rows.
pub fn matrix_json(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    let d = m.dim();
    (0..d)
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

#[derive(Debug, Serialize)]
pub struct Fig1Record {
    pub purity: f64,
    pub robertson: f64,
    pub schrodinger: f64,
    pub luo_park: f64,
    pub bound1: f64,
    pub bound2: f64,
}

impl From<&AveragedBounds> for Fig1Record {
    fn from(r: &AveragedBounds) -> Self {
        Self {
            purity: r.purity,
            robertson: r.robertson,
            schrodinger: r.schrodinger,
            luo_park: r.luo_park,
            bound1: r.bound1,
            bound2: r.bound2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Fig2Record {
    pub purity: f64,
    pub luo_park_mub_avg: f64,
    pub bound2_mub_avg: f64,
}

impl From<&MubAverageRow> for Fig2Record {
    fn from(r: &MubAverageRow) -> Self {
        Self {
            purity: r.purity,
            luo_park_mub_avg: r.luo_park_mub_avg,
            bound2_mub_avg: r.bound2_mub_avg,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ChecksRecord {
    pub robertson: bool,
    pub schrodinger: bool,
    pub luo_park: bool,
    pub bound1: bool,
    pub bound2: bool,
}

impl From<InequalityChecks> for ChecksRecord {
    fn from(c: InequalityChecks) -> Self {
        Self {
            robertson: c.robertson,
            schrodinger: c.schrodinger,
            luo_park: c.luo_park,
            bound1: c.bound1,
            bound2: c.bound2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CompareRecord {
    pub index: u64,
    pub dim: usize,
    pub purity: f64,
    pub product: f64,
    pub robertson: f64,
    pub schrodinger: f64,
    pub luo_park: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub degenerate: bool,
    pub holds: ChecksRecord,
}

impl CompareRecord {
    pub fn new(index: u64, r: &BoundReport, checks: InequalityChecks) -> Self {
        Self {
            index,
            dim: r.dim,
            purity: r.purity,
            product: r.product,
            robertson: r.robertson,
            schrodinger: r.schrodinger,
            luo_park: r.luo_park,
            bound1: r.bound1,
            bound2: r.bound2,
            degenerate: r.degenerate,
            holds: checks.into(),
        }
    }
}

pub const COMPARE_HEADER: &str =
    "index,dim,purity,product,robertson,schrodinger,luo_park,bound1,bound2,degenerate,\
     holds_robertson,holds_schrodinger,holds_luo_park,holds_bound1,holds_bound2";

pub fn compare_csv(records: &[CompareRecord]) -> String {
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for r in records {
        let nums = [r.purity, r.product, r.robertson, r.schrodinger, r.luo_park, r.bound1, r.bound2];
        let _ = write!(out, "{},{}", r.index, r.dim);
        for v in nums {
            let _ = write!(out, ",{}", csv_number(v));
        }
        let h = &r.holds;
        let _ = writeln!(
            out,
            ",{},{},{},{},{},{}",
            r.degenerate, h.robertson, h.schrodinger, h.luo_park, h.bound1, h.bound2
        );
    }
    out
}

/// A Monte Carlo mean next to its closed-form target.
#[derive(Debug, Serialize)]
pub struct EstimateRecord {
    pub quantity: &'static str,
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub target: f64,
    /// `null` when the standard error vanishes but the mean is off target.
    pub z_score: f64,
}

impl EstimateRecord {
    pub fn new(quantity: &'static str, e: &McEstimate, target: f64) -> Self {
        Self {
            quantity,
            mean: e.mean,
            std_error: e.std_error,
            samples: e.samples,
            target,
            z_score: e.z_score(target),
        }
    }
}

pub const ESTIMATE_HEADER: &str = "quantity,mean,std_error,samples,target,z_score";

pub fn estimates_csv(records: &[EstimateRecord]) -> String {
    let mut out = String::from(ESTIMATE_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.quantity,
            csv_number(r.mean),
            csv_number(r.std_error),
            r.samples,
            csv_number(r.target),
            csv_number(r.z_score)
        );
    }
    out
}

/// A named closed-form value.
#[derive(Debug, Serialize)]
pub struct ValueRecord {
    pub quantity: &'static str,
    pub value: f64,
}

pub fn values_csv(records: &[ValueRecord]) -> String {
    let mut out = String::from("quantity,value\n");
    for r in records {
        let _ = writeln!(out, "{},{}", r.quantity, csv_number(r.value));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -0.25, 1.0 / 3.0, 2.0 / 9.0, 1e-7, 3.2e-300, 1e17, f64::MIN_POSITIVE, 0.1 + 0.2] {
            let s = csv_number(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let digits = s.chars().take_while(|c| *c != 'e').filter(char::is_ascii_digit).count();
            assert!(digits <= 18, "{s}");
        }
        assert_eq!(csv_number(0.5), "0.5");
        assert_eq!(csv_number(1e-7), "1e-7");
    }

    #[test]
    fn tables_use_exact_headers_and_lf() {
        let rows = [AveragedBounds {
            purity: 1.0,
            robertson: 2.0 / 9.0,
            schrodinger: 1.0,
            luo_park: 0.5,
            bound1: 0.0,
            bound2: 0.0,
        }];
        let s = fig1_csv(&rows);
        assert!(s.starts_with("purity,robertson,schrodinger,luo_park,bound1,bound2\n1,"));
        assert!(!s.contains('\r'));
        let t = fig2_csv(&[MubAverageRow {
            purity: 0.5,
            luo_park_mub_avg: 0.0625,
            bound2_mub_avg: 0.0625,
        }]);
        assert_eq!(t, "purity,luo_park_mub_avg,bound2_mub_avg\n0.5,0.0625,0.0625\n");
    }

    #[test]
    fn matrices_encode_as_pairs() {
        let m = ComplexMatrix::from_fn(2, |i, j| commutator_bounds::Complex64::new(i as f64, -(j as f64)));
        let v = serde_json::to_string(&matrix_json(&m)).unwrap();
        assert_eq!(v, "[[[0.0,-0.0],[0.0,-1.0]],[[1.0,-0.0],[1.0,-1.0]]]");
    }
}
