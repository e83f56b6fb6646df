//! Truncated probability mass tables with tail-mass estimation.
//!
//! Closed-form pmf evaluators produce one value per count; normalization
//! checks and total-variation tests need a *table* plus an estimate of
//! the mass beyond it. [`adaptive_pmf`] grows the table geometrically and
//! fits the tail with whichever of two decay models explains the data
//! better:
//!
//! * geometric decay `p(k) ∝ r^k` — subordinators with finite exponential
//!   moments (tempered stable, gamma, inverse Gaussian) and the geometric
//!   clock itself;
//! * power-law decay `p(k) ∝ k^{-1-β}` — the stable family, whose counts
//!   have no finite mean.
//!
//! Truncation stops when the estimated tail is negligible or when the
//! extrapolated total mass stabilizes between doublings (the tail-model
//! error then no longer moves the answer).

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::series::Kahan;
use crate::Result;

/// Fitted tail-decay model for the mass beyond a truncated table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// `p(k) ≈ p(K) r^{k-K}`; carries the fitted ratio.
    Geometric { ratio: f64 },
    /// `p(k) ≈ p(K) (k/K)^{-1-beta}`; carries the fitted `beta`.
    PowerLaw { beta: f64 },
    /// Last entries are zero to double precision; no tail worth modeling.
    Negligible,
}

/// A truncated pmf with its estimated tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    tail_mass: f64,
    tail_model: TailModel,
    converged: bool,
}

impl Pmf {
    /// Mass values for `k = 0..=truncation_index()`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest tabulated count.
    pub fn truncation_index(&self) -> u64 {
        (self.probs.len() - 1) as u64
    }

    /// Estimated mass beyond the table.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Which decay model produced the tail estimate.
    pub fn tail_model(&self) -> TailModel {
        self.tail_model
    }

    /// Whether the adaptive loop met its stopping rule before the cap.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Tabulated mass plus estimated tail; 1 up to evaluator and model
    /// error for a genuine probability law.
    pub fn total_mass(&self) -> f64 {
        let mut k = Kahan::default();
        for &p in &self.probs {
            k.add(p);
        }
        k.add(self.tail_mass);
        k.value()
    }
}

/// Stopping policy for [`adaptive_pmf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// First table size (entries `0..=k_init`).
    pub k_init: usize,
    /// Hard cap on the table size.
    pub k_cap: usize,
    /// A tail estimate below this is negligible outright.
    pub tail_tol: f64,
    /// Doubling stops once consecutive total-mass extrapolations agree
    /// this closely.
    pub consistency_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            k_init: 64,
            k_cap: 1 << 20,
            tail_tol: 1e-9,
            consistency_tol: 2.5e-7,
        }
    }
}

/// Fits the tail beyond index `k_top` from the anchor entries at
/// `k_top/2`, `3 k_top/4` and `k_top`.
fn fit_tail(probs: &[f64]) -> (f64, TailModel) {
    let k_top = probs.len() - 1;
    let p_end = probs[k_top];
    if !(p_end > 1e-300) {
        return (0.0, TailModel::Negligible);
    }
    let p_half = probs[k_top / 2];
    let p_mid = probs[3 * k_top / 4];
    if !(p_half > 0.0 && p_mid > 0.0 && p_half >= p_end) {
        // Not a decaying tail yet; report a conservative placeholder so
        // the caller keeps doubling.
        return (f64::INFINITY, TailModel::Negligible);
    }

    // Geometric model through the anchors at k_top/2 and k_top predicts
    // sqrt(p_half * p_end) at 3 k_top / 4; the power model predicts
    // p_half * 1.5^{-(1+beta)}.
    let span = (k_top - k_top / 2) as f64;
    let ratio = (p_end / p_half).powf(1.0 / span);
    let geom_pred = (p_half * p_end).sqrt();

    let one_plus_beta = (p_half / p_end).ln() / ((k_top as f64) / (k_top / 2) as f64).ln();
    let beta = one_plus_beta - 1.0;
    let power_pred = p_half * 1.5f64.powf(-one_plus_beta);

    let geom_err = (geom_pred / p_mid).ln().abs();
    let power_err = (power_pred / p_mid).ln().abs();

    if geom_err <= power_err || beta <= 0.0 {
        if ratio >= 1.0 {
            return (f64::INFINITY, TailModel::Negligible);
        }
        // sum_{k > K} p(K) r^{k-K} = p(K) r / (1 - r)
        (p_end * ratio / (1.0 - ratio), TailModel::Geometric { ratio })
    } else {
        // sum_{k > K} ~ integral of p(K) (k/K)^{-1-beta} = p(K) K / beta
        (
            p_end * k_top as f64 / beta,
            TailModel::PowerLaw { beta },
        )
    }
}

/// Builds a pmf table adaptively.
///
/// `eval(k_max)` must return the masses for `k = 0..=k_max`; it is called
/// with geometrically growing `k_max`, so a batch evaluator whose cost is
/// linear in `k_max` keeps the total cost linear too.
pub fn adaptive_pmf(
    policy: &TruncationPolicy,
    mut eval: impl FnMut(usize) -> Result<Vec<f64>>,
) -> Result<Pmf> {
    let mut k_max = policy.k_init.max(8);
    let mut prev_total: Option<f64> = None;
    loop {
        let probs = eval(k_max)?;
        debug_assert_eq!(probs.len(), k_max + 1);
        let (tail, model) = fit_tail(&probs);
        let mut sum = Kahan::default();
        for &p in &probs {
            sum.add(p);
        }
        let finished_tail = tail.is_finite() && tail <= policy.tail_tol;
        let total = sum.value() + if tail.is_finite() { tail } else { 0.0 };
        let consistent = tail.is_finite()
            && prev_total.is_some_and(|prev| (total - prev).abs() <= policy.consistency_tol);
        if finished_tail || consistent || 2 * k_max > policy.k_cap {
            return Ok(Pmf {
                probs,
                tail_mass: if tail.is_finite() { tail } else { 0.0 },
                tail_model: model,
                converged: finished_tail || consistent,
            });
        }
        prev_total = Some(total);
        k_max *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn geometric_law_truncates_and_normalizes() {
        // p(k) = (1-r) r^k, exact geometric.
        let r: f64 = 0.8;
        let pmf = adaptive_pmf(&TruncationPolicy::default(), |k_max| {
            Ok((0..=k_max).map(|k| (1.0 - r) * r.powi(k as i32)).collect())
        })
        .unwrap();
        assert!(pmf.converged());
        assert!(matches!(pmf.tail_model(), TailModel::Geometric { ratio } if (ratio - r).abs() < 1e-6));
        assert!(
            (pmf.total_mass() - 1.0).abs() < 1e-8,
            "total {}",
            pmf.total_mass()
        );
    }

    #[test]
    fn power_law_tail_is_fitted() {
        // p(k) ∝ (k+1)^{-1.7}: zeta(1.7)-normalized power law.
        let beta = 0.7f64;
        let z: f64 = (0..4_000_000).map(|k| ((k + 1) as f64).powf(-1.0 - beta)).sum::<f64>()
            + ((4_000_000f64).powf(-beta)) / beta;
        let pmf = adaptive_pmf(
            &TruncationPolicy {
                consistency_tol: 1e-7,
                ..TruncationPolicy::default()
            },
            |k_max| {
                Ok((0..=k_max)
                    .map(|k| ((k + 1) as f64).powf(-1.0 - beta) / z)
                    .collect())
            },
        )
        .unwrap();
        assert!(matches!(pmf.tail_model(), TailModel::PowerLaw { beta: b } if (b - beta).abs() < 0.05),
            "{:?}", pmf.tail_model());
        assert!(
            (pmf.total_mass() - 1.0).abs() < 1e-5,
            "total {} at K {}",
            pmf.total_mass(),
            pmf.truncation_index()
        );
    }

    #[test]
    fn finite_support_is_negligible_tail() {
        let pmf = adaptive_pmf(&TruncationPolicy::default(), |k_max| {
            let mut v = vec![0.0; k_max + 1];
            v[0] = 0.25;
            v[1] = 0.75;
            Ok(v)
        })
        .unwrap();
        assert_eq!(pmf.tail_mass(), 0.0);
        assert_eq!(pmf.tail_model(), TailModel::Negligible);
        assert_eq!(pmf.total_mass(), 1.0);
        assert!(pmf.converged());
    }
}
