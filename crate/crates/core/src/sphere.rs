//! Qubit bounds averaged over uniformly random observable pairs.
//!
//! For unit `a`, `b` drawn independently and uniformly from `S_2`, the
//! pair-averaged bounds depend on the state only through its purity `P`:
//!
//! ```text
//! <B_R>  = 2(2P-1)/9
//! <B_S>  = <B_R> + 2(2P^2-4P+3)/9
//! <B_LP> = <B_R> + (4/9) ((1-P) + sqrt(2(1-P)))^2
//! <B_1>  = (4/3) (P - sqrt(2P-1)) / (1 + sqrt(2P-1))
//! <B_2>  = (4/3) (1-P)
//! ```

use alloc::vec::Vec;

use rand::Rng;

use crate::bounds::{qubit_bounds_closed_form, BoundReport};
use crate::error::{invalid, Error, Result};
use crate::sampling::fill_unit_sphere;
use crate::state::BlochVector;
use crate::stats::{Accumulator, McEstimate};

pub use crate::sampling::sample_unit_sphere;

/// Pair-averaged qubit bounds at one purity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedBounds {
    pub purity: f64,
    pub robertson: f64,
    pub schrodinger: f64,
    pub luo_park: f64,
    pub bound1: f64,
    pub bound2: f64,
}

impl AveragedBounds {
    pub fn as_array(&self) -> [f64; 5] {
        [self.robertson, self.schrodinger, self.luo_park, self.bound1, self.bound2]
    }
}

fn check_qubit_purity(p: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid!(InvalidArgument, "qubit purity {p} outside [1/2, 1]"));
    }
    Ok(())
}

/// Closed-form pair averages at purity `p`.
pub fn averaged_bounds_qubit(p: f64) -> Result<AveragedBounds> {
    check_qubit_purity(p)?;
    let r = libm::sqrt((2.0 * p - 1.0).max(0.0));
    let robertson = 2.0 * (2.0 * p - 1.0) / 9.0;
    let lp_root = (1.0 - p) + libm::sqrt(2.0 * (1.0 - p));
    Ok(AveragedBounds {
        purity: p,
        robertson,
        schrodinger: robertson + 2.0 * (2.0 * p * p - 4.0 * p + 3.0) / 9.0,
        luo_park: robertson + 4.0 / 9.0 * lp_root * lp_root,
        bound1: 4.0 / 3.0 * (p - r) / (1.0 + r),
        bound2: 4.0 / 3.0 * (1.0 - p),
    })
}

/// Running means of the five qubit bounds over sampled observable pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QubitAverageAccumulator {
    acc: [Accumulator; 5],
}

/// Monte Carlo counterparts of [`AveragedBounds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAverageEstimates {
    pub robertson: McEstimate,
    pub schrodinger: McEstimate,
    pub luo_park: McEstimate,
    pub bound1: McEstimate,
    pub bound2: McEstimate,
}

impl QubitAverageEstimates {
    pub fn as_array(&self) -> [McEstimate; 5] {
        [self.robertson, self.schrodinger, self.luo_park, self.bound1, self.bound2]
    }

    /// Every estimate lies within `sigmas` standard errors of the closed form.
    pub fn agrees_with(&self, exact: &AveragedBounds, sigmas: f64) -> bool {
        self.as_array()
            .iter()
            .zip(exact.as_array())
            .all(|(e, t)| e.agrees_with(t, sigmas))
    }
}

impl QubitAverageAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: &BoundReport) {
        let vals = [r.robertson, r.schrodinger, r.luo_park, r.bound1, r.bound2];
        for (a, v) in self.acc.iter_mut().zip(vals) {
            a.push(v);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.acc.iter_mut().zip(&other.acc) {
            a.merge(b);
        }
    }

    pub fn count(&self) -> u64 {
        self.acc[0].count()
    }

    /// `None` with fewer than two samples.
    pub fn estimates(&self) -> Option<QubitAverageEstimates> {
        Some(QubitAverageEstimates {
            robertson: self.acc[0].estimate()?,
            schrodinger: self.acc[1].estimate()?,
            luo_park: self.acc[2].estimate()?,
            bound1: self.acc[3].estimate()?,
            bound2: self.acc[4].estimate()?,
        })
    }
}

/// Bloch vector of purity `p` along the z axis.
pub fn qubit_state_of_purity(p: f64) -> Result<[f64; 3]> {
    check_qubit_purity(p)?;
    Ok([0.0, 0.0, libm::sqrt((2.0 * p - 1.0).max(0.0))])
}

/// Adds `n` random observable pairs at purity `p` to `acc`.
///
/// The state is fixed along z: the pair average is rotation invariant, so
/// the direction of the Bloch vector does not matter.
pub fn accumulate_qubit_pairs<R: Rng + ?Sized>(
    acc: &mut QubitAverageAccumulator,
    p: f64,
    n: u64,
    rng: &mut R,
) -> Result<()> {
    let c = qubit_state_of_purity(p)?;
    accumulate_qubit_pairs_at(acc, c, n, rng)
}

/// As [`accumulate_qubit_pairs`] with an explicit Bloch vector.
pub fn accumulate_qubit_pairs_at<R: Rng + ?Sized>(
    acc: &mut QubitAverageAccumulator,
    c: [f64; 3],
    n: u64,
    rng: &mut R,
) -> Result<()> {
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    for _ in 0..n {
        fill_unit_sphere(&mut a, rng);
        fill_unit_sphere(&mut b, rng);
        let r = qubit_bounds_closed_form(&BlochVector::traceless(a), &BlochVector::traceless(b), c)?;
        acc.push(&r);
    }
    Ok(())
}

/// Sequential Monte Carlo estimate of the five pair-averaged bounds from `n` pairs.
pub fn monte_carlo_qubit_average<R: Rng + ?Sized>(p: f64, n: u64, rng: &mut R) -> Result<QubitAverageEstimates> {
    if n < 2 {
        return Err(invalid!(InvalidArgument, "need at least 2 samples, got {n}"));
    }
    let mut acc = QubitAverageAccumulator::new();
    accumulate_qubit_pairs(&mut acc, p, n, rng)?;
    Ok(acc.estimates().expect("n >= 2"))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Purities where the averaged bound 2 drops to the averaged Robertson and
/// Schrödinger bounds, in that order.
///
/// The exact values are `7/8` and `sqrt(3) - 1`.
pub fn crossover_purities() -> (f64, f64) {
    let avg = |p: f64| averaged_bounds_qubit(p).expect("bisection stays in [1/2, 1]");
    let p_r = bisect(|p| avg(p).bound2 - avg(p).robertson, 0.5, 1.0, 1e-13);
    let p_s = bisect(|p| avg(p).bound2 - avg(p).schrodinger, 0.5, 1.0, 1e-13);
    (p_r, p_s)
}

/// Monte Carlo second moments `<x_j x_k>` of the uniform measure on `S_{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub dim: usize,
    /// Row-major `d x d`.
    pub entries: Vec<McEstimate>,
}

impl MomentMatrix {
    pub fn get(&self, j: usize, k: usize) -> McEstimate {
        self.entries[j * self.dim + k]
    }

    /// Diagonal within `sigmas` of `1/d`, off-diagonal within `sigmas` of 0.
    pub fn matches_isotropy(&self, sigmas: f64) -> bool {
        let d = self.dim;
        (0..d).all(|j| {
            (0..d).all(|k| {
                let target = if j == k { 1.0 / d as f64 } else { 0.0 };
                self.get(j, k).agrees_with(target, sigmas)
            })
        })
    }
}

pub fn sphere_moment_check<R: Rng + ?Sized>(d: usize, n: u64, rng: &mut R) -> Result<MomentMatrix> {
    if d < 2 || n < 2 {
        return Err(invalid!(InvalidArgument, "need d >= 2 and n >= 2, got d = {d}, n = {n}"));
    }
    let mut acc = alloc::vec![Accumulator::new(); d * d];
    let mut x = alloc::vec![0.0; d];
    for _ in 0..n {
        fill_unit_sphere(&mut x, rng);
        for j in 0..d {
            for k in 0..d {
                acc[j * d + k].push(x[j] * x[k]);
            }
        }
    }
    Ok(MomentMatrix {
        dim: d,
        entries: acc.iter().map(|a| a.estimate().expect("n >= 2")).collect(),
    })
}

/// `points` rows of averaged bounds on a uniform purity grid over `[1/2, 1]`.
///
/// Fails if bound 2 is not non-increasing or Robertson not non-decreasing
/// along the grid.
pub fn emit_fig1_data(points: usize) -> Result<Vec<AveragedBounds>> {
    let rows = purity_grid(points)?
        .into_iter()
        .map(averaged_bounds_qubit)
        .collect::<Result<Vec<_>>>()?;
    for w in rows.windows(2) {
        if w[1].bound2 > w[0].bound2 || w[1].robertson < w[0].robertson {
            return Err(Error::NumericalInconsistency {
                what: "averaged bound monotonicity",
                residue: w[1].purity,
            });
        }
    }
    Ok(rows)
}

/// Uniform grid of `points` purities from `1/2` to `1`, endpoints exact.
pub fn purity_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(invalid!(InvalidArgument, "need at least 2 grid points, got {points}"));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { 1.0 } else { 0.5 + 0.5 * i as f64 / last })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::task_rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn closed_form_endpoints() {
        let h = averaged_bounds_qubit(0.5).unwrap();
        let want = [0.0, 1.0 / 3.0, 1.0, 2.0 / 3.0, 2.0 / 3.0];
        for (g, w) in h.as_array().iter().zip(want) {
            assert!(close(*g, w, 1e-15), "{g} vs {w}");
        }
        let one = averaged_bounds_qubit(1.0).unwrap();
        let want = [2.0 / 9.0, 4.0 / 9.0, 2.0 / 9.0, 0.0, 0.0];
        for (g, w) in one.as_array().iter().zip(want) {
            assert!(close(*g, w, 1e-15), "{g} vs {w}");
        }
        let x = averaged_bounds_qubit(0.875).unwrap();
        assert!(close(x.robertson, 1.0 / 6.0, 1e-15));
        assert!(close(x.bound2, 1.0 / 6.0, 1e-15));
        assert!(averaged_bounds_qubit(0.4).is_err());
        assert!(averaged_bounds_qubit(1.01).is_err());
    }

    #[test]
    fn crossovers() {
        let (p_r, p_s) = crossover_purities();
        assert!(close(p_r, 0.875, 1e-12));
        assert!(close(p_s, libm::sqrt(3.0) - 1.0, 1e-12));
        let a = averaged_bounds_qubit(p_r).unwrap();
        assert!(close(a.robertson, a.bound2, 1e-12));
    }

    #[test]
    fn monte_carlo_small_run_agrees() {
        let mut rng = task_rng(11, 0, 0);
        let est = monte_carlo_qubit_average(0.75, 20_000, &mut rng).unwrap();
        assert!(est.agrees_with(&averaged_bounds_qubit(0.75).unwrap(), 4.0));
    }

    #[test]
    fn pure_state_bound_one_and_two_vanish() {
        let mut rng = task_rng(12, 0, 0);
        let est = monte_carlo_qubit_average(1.0, 1000, &mut rng).unwrap();
        assert_eq!(est.bound1.mean, 0.0);
        assert_eq!(est.bound2.mean, 0.0);
    }

    #[test]
    fn moments_of_three_sphere() {
        let mut rng = task_rng(13, 0, 0);
        let m = sphere_moment_check(3, 20_000, &mut rng).unwrap();
        assert!(m.matches_isotropy(5.0));
        assert!(close((0..3).map(|j| m.get(j, j).mean).sum::<f64>(), 1.0, 1e-12));
    }

    #[test]
    fn fig1_grid() {
        let rows = emit_fig1_data(11).unwrap();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0], averaged_bounds_qubit(0.5).unwrap());
        assert_eq!(rows[10].purity, 1.0);
        for r in &rows {
            assert!(r.luo_park >= r.bound2 - 1e-15 && r.bound2 >= r.bound1 - 1e-15);
        }
        assert!(emit_fig1_data(1).is_err());
    }
}
