//! The geometric counting process `G_mu(t)`.
//!
//! `G_mu` is a mixed Poisson process: conditionally on a rate `Lambda`
//! drawn from an exponential law with mean `mu`, it is a homogeneous
//! Poisson process with that rate. Its marginal count at `t` is geometric
//! with parameter `mu t / (1 + mu t)`, but its increments are *dependent*
//! (positively, across disjoint intervals), so path sampling must go
//! through the mixing construction — splicing independent geometric
//! increments together would produce the wrong joint law. The covariance
//! `Cov[G(s), G(t)] = mu s (1 + mu t)` for `s <= t` carries that
//! dependence and is what the time-changed processes inherit.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Intensity of the geometric counting process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcpParams {
    /// Events per unit time, `mu > 0`.
    pub mu: f64,
}

impl GcpParams {
    /// Checks `mu > 0`.
    pub fn validate(&self) -> Result<()> {
        if self.mu > 0.0 && self.mu.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "gcp intensity mu must be positive, got {}",
                self.mu
            )))
        }
    }
}

/// A realized counting path on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountPath {
    event_times: Vec<f64>,
    horizon: f64,
}

impl CountPath {
    /// Event times, strictly increasing, all within `(0, horizon]`.
    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    /// Right end of the observation window.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Total number of events on the window.
    pub fn count(&self) -> u64 {
        self.event_times.len() as u64
    }

    /// Number of events in `[0, t]` (right-continuous step function).
    pub fn count_at(&self, t: f64) -> u64 {
        self.event_times.partition_point(|&x| x <= t) as u64
    }
}

/// `P[G_mu(t) = k] = (1/(1+mu t)) (mu t/(1+mu t))^k`.
pub fn gcp_pmf(k: u64, t: f64, p: &GcpParams) -> f64 {
    let mt = p.mu * t;
    if mt == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ratio = mt / (1.0 + mt);
    // Exponentiation by squaring keeps dyadic cases exact; the log-space
    // fallback covers counts beyond i32 (pure tail estimation, where the
    // power has long since underflowed anyway).
    let pow = if k <= i32::MAX as u64 {
        ratio.powi(k as i32)
    } else {
        (ratio.ln() * k as f64).exp()
    };
    pow / (1.0 + mt)
}

/// Mean `mu t` and variance `mu t (1 + mu t)`.
pub fn gcp_moments(t: f64, p: &GcpParams) -> (f64, f64) {
    let mt = p.mu * t;
    (mt, mt * (1.0 + mt))
}

/// `Cov[G_mu(s), G_mu(t)] = mu s (1 + mu t)` for `0 <= s <= t`.
pub fn gcp_cov(s: f64, t: f64, p: &GcpParams) -> Result<f64> {
    if !(0.0 <= s && s <= t) {
        return Err(Error::domain(format!(
            "covariance arguments must satisfy 0 <= s <= t, got s = {s}, t = {t}"
        )));
    }
    Ok(p.mu * s * (1.0 + p.mu * t))
}

/// Samples a full path by the mixing construction: draw the random rate
/// `Lambda` (exponential, mean `mu`), then a Poisson path at that rate.
pub fn gcp_sample_path<R: Rng + ?Sized>(
    p: &GcpParams,
    horizon: f64,
    rng: &mut R,
) -> Result<CountPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    // Exp::new takes the *rate*; mean mu means rate 1/mu.
    let mixing = Exp::new(1.0 / p.mu).map_err(|e| Error::domain(format!("gcp mixing: {e}")))?;
    let lambda: f64 = mixing.sample(rng);
    let mut event_times = Vec::new();
    if lambda > 0.0 {
        let inter = Exp::new(lambda).map_err(|e| Error::domain(format!("gcp path: {e}")))?;
        let mut t = 0.0;
        loop {
            t += inter.sample(rng);
            if t > horizon {
                break;
            }
            event_times.push(t);
        }
    }
    Ok(CountPath {
        event_times,
        horizon,
    })
}

/// Samples the marginal count `G_mu(t)` directly (geometric law).
///
/// This shortcut matches the *marginal* distribution only; use
/// [`gcp_sample_path`] whenever more than one time point of the same
/// realization is needed.
pub fn gcp_sample_count<R: Rng + ?Sized>(t: f64, p: &GcpParams, rng: &mut R) -> Result<u64> {
    let mt = p.mu * t;
    if mt == 0.0 {
        return Ok(0);
    }
    let dist = Geometric::new(1.0 / (1.0 + mt))
        .map_err(|e| Error::domain(format!("gcp marginal: {e}")))?;
    Ok(dist.sample(rng))
}

/// Draws a Poisson count with the given mean (shared by the process
/// samplers; mean 0 yields 0).
pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist =
        Poisson::new(mean).map_err(|e| Error::domain(format!("poisson(mean {mean}): {e}")))?;
    Ok(dist.sample(rng) as u64)
}
