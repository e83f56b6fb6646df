//! Deterministic Monte Carlo harness.
//!
//! Every sampler in the crate is validated against its closed form
//! through this module. Reproducibility is the design constraint: a
//! 64-bit master seed plus a task index deterministically select a
//! ChaCha12 stream ([`Streams::stream`]), estimators consume draws in a
//! fixed order, and reductions are sequential — so a report is
//! bit-identical across runs and machines regardless of how callers
//! distribute tasks.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Derives independent, reproducible random streams from a master seed.
///
/// Task indices map to ChaCha stream numbers, so any two distinct tasks
/// never share a sequence; parallel callers hand each task its own
/// stream and reduce in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Streams {
    master: u64,
}

impl Streams {
    /// Harness keyed by a 64-bit master seed.
    pub fn new(master: u64) -> Self {
        Streams { master }
    }

    /// The master seed.
    pub fn master(&self) -> u64 {
        self.master
    }

    /// The random stream for one task.
    pub fn stream(&self, task: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master);
        rng.set_stream(task);
        rng
    }
}

/// A Monte Carlo estimate judged against a closed-form target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    /// Sample statistic.
    pub estimate: f64,
    /// Standard error of the estimate.
    pub stderr: f64,
    /// Number of draws.
    pub n: u64,
    /// Closed-form value being tested.
    pub target: f64,
    /// Significance multiplier for the verdict (default 3).
    pub k_sigma: f64,
    /// Whether `|estimate - target| <= k_sigma * stderr`.
    pub pass: bool,
    /// All draws equal while the estimate misses the target: the sampler
    /// is stuck, not lucky.
    pub degenerate: bool,
}

/// Default verdict width in standard errors.
pub const DEFAULT_K_SIGMA: f64 = 3.0;

/// Estimates `E[sampler]` from `n` draws and judges it against `target`.
pub fn mc_mean<R: Rng + ?Sized>(
    n: u64,
    target: f64,
    k_sigma: f64,
    rng: &mut R,
    mut sampler: impl FnMut(&mut R) -> f64,
) -> McReport {
    debug_assert!(n >= 2);
    // Welford keeps the variance update stable for long runs.
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for i in 0..n {
        let x = sampler(rng);
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let var = m2 / (n - 1) as f64;
    let stderr = (var / n as f64).sqrt();
    let pass = (mean - target).abs() <= k_sigma * stderr;
    McReport {
        estimate: mean,
        stderr,
        n,
        target,
        k_sigma,
        pass,
        degenerate: var == 0.0 && mean != target,
    }
}

/// Total-variation distance between the empirical law of `n` draws and
/// `pmf`, over counts `0..=k_max` plus one lumped tail bucket.
pub fn mc_pmf_tv<R: Rng + ?Sized>(
    n: u64,
    k_max: u64,
    rng: &mut R,
    pmf: impl Fn(u64) -> f64,
    mut sampler: impl FnMut(&mut R) -> u64,
) -> f64 {
    let mut hist = alloc::vec![0u64; k_max as usize + 1];
    let mut tail = 0u64;
    for _ in 0..n {
        let k = sampler(rng);
        if k <= k_max {
            hist[k as usize] += 1;
        } else {
            tail += 1;
        }
    }
    let mut tv = 0.0;
    let mut model_mass = 0.0;
    for (k, &c) in hist.iter().enumerate() {
        let q = pmf(k as u64);
        model_mass += q;
        tv += (c as f64 / n as f64 - q).abs();
    }
    let model_tail = (1.0 - model_mass).max(0.0);
    0.5 * (tv + (tail as f64 / n as f64 - model_tail).abs())
}

/// Report for an indicator estimated by `count` successes in `n` draws.
///
/// The standard error is binomial at the *target* probability, so a
/// degenerate empirical fraction cannot silence the verdict; an all-or-
/// nothing count that still misses the band is flagged as degenerate.
pub fn binomial_report(count: u64, n: u64, target: f64, k_sigma: f64) -> McReport {
    let estimate = count as f64 / n as f64;
    let stderr = (target * (1.0 - target) / n as f64).sqrt();
    let pass = (estimate - target).abs() <= k_sigma * stderr + 1e-12;
    McReport {
        estimate,
        stderr,
        n,
        target,
        k_sigma,
        pass,
        degenerate: (count == 0 || count == n) && !pass,
    }
}

/// Compares the empirical cdf of `n` draws against target cdf values at
/// the given points; one binomial-band report per point.
pub fn mc_cdf_band<R: Rng + ?Sized>(
    n: u64,
    points: &[(f64, f64)],
    k_sigma: f64,
    rng: &mut R,
    mut sampler: impl FnMut(&mut R) -> f64,
) -> Vec<McReport> {
    let mut draws: Vec<f64> = (0..n).map(|_| sampler(rng)).collect();
    draws.sort_by(|a, b| a.partial_cmp(b).expect("cdf draws must not be NaN"));
    points
        .iter()
        .map(|&(y, target)| {
            let count = draws.partition_point(|&x| x <= y) as u64;
            binomial_report(count, n, target, k_sigma)
        })
        .collect()
}
