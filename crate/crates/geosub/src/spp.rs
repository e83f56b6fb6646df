//! Subordinated Poisson processes: a Poisson process evaluated at an
//! independent subordinator clock.
//!
//! For a Poisson process `N` with rate `lambda` and a subordinator `D`
//! with Laplace exponent `f`, the count `N(D(t))` has probability
//! generating function `E[u^{N(D(t))}] = exp(-t f(lambda (1 - u)))`, so
//! `P[N(D(t)) = k]` is `(-1)^k` times the `k`-th Taylor coefficient of
//! `u -> exp(-t f(lambda u))` at `u = 1`. The generic evaluator reads
//! those coefficients off a [`Jet`](crate::jet::Jet); the stable and
//! tempered-stable families additionally admit explicit single series
//! (the space-fractional Poisson process and its tempered variant), which
//! are faster for tables and serve as an independent cross-check.
//!
//! The stable family produces counts with polynomial tails and no finite
//! mean; every other supported family has finite moments of all orders.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::Error;
use crate::gcp::poisson_count;
use crate::series::{Kahan, SeriesControl, TERM_OVERFLOW_GUARD};
use crate::subordinators::SubordinatorSpec;
use crate::Result;

/// Rate of the underlying Poisson process plus the subordinator clock.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SppParams {
    /// Poisson rate of the parent process.
    pub lambda: f64,
    /// Law of the random clock.
    pub sub: SubordinatorSpec,
}

impl SppParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain("lambda must be positive and finite"));
        }
        self.sub.validate()
    }
}

/// Shared validation for evaluation times.
pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain("time must be finite and nonnegative"));
    }
    Ok(())
}

/// Range guard applied to every pmf value: tiny negatives (series
/// round-off) are clamped to zero, anything worse is a convergence
/// failure carrying the offending value.
pub(crate) fn finish_pmf(v: f64, terms: usize, last_term: f64) -> Result<f64> {
    if !v.is_finite() || v < -1e-9 || v > 1.0 + 1e-9 {
        return Err(Error::Convergence {
            terms,
            partial: v,
            last_term,
            tol: 1e-9,
        });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// `P[N(D(t)) = k]` for any subordinator family, via jet arithmetic on
/// the generating function `exp(-t f(lambda u))`.
pub fn spp_pmf_generic(k: u64, t: f64, p: &SppParams, ctl: &SeriesControl) -> Result<f64> {
    let table = spp_pmf_table_generic(k as usize, t, p, ctl)?;
    Ok(table[k as usize])
}

/// All of `P[N(D(t)) = k]` for `k = 0..=k_max` from a single jet.
///
/// Cost is quadratic in the truncation order, so prefer this over
/// repeated scalar calls when a table is needed.
pub fn spp_pmf_table_generic(
    k_max: usize,
    t: f64,
    p: &SppParams,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    p.validate()?;
    check_time(t)?;
    if t == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    let order = ctl.jet_order_for(k_max);
    let g = p.sub.taylor_coeffs_at(p.lambda, order).scale(-t).exp();
    let last = g.coeff(k_max).abs();
    (0..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            finish_pmf(sign * g.coeff(k), order, last)
        })
        .collect()
}

/// Signed exponential-series weights `(-x)^r / r!`, truncated once every
/// neglected `weight * binomial` product is provably below 1e-22 (the
/// generalized binomials `C(alpha r, k)` are bounded by `2^{alpha r}`).
fn signed_exp_weights(x: f64, alpha: f64, ctl: &SeriesControl) -> Result<Vec<f64>> {
    let growth = 2f64.powf(alpha);
    let mut w = 1.0f64;
    let mut bound = 1.0f64;
    let mut out = vec![1.0f64];
    for r in 1..=ctl.max_terms {
        w *= -x / r as f64;
        bound *= growth * x / r as f64;
        if w.abs() > TERM_OVERFLOW_GUARD {
            return Err(Error::SeriesOverflow {
                terms: r,
                magnitude: w.abs(),
            });
        }
        out.push(w);
        if bound < 1e-22 && r >= 8 {
            return Ok(out);
        }
    }
    Err(Error::Convergence {
        terms: ctl.max_terms,
        partial: f64::NAN,
        last_term: w.abs(),
        tol: 1e-22,
    })
}

/// Space-fractional pmf table: `P[k]` for `k = 0..=k_max` where the clock
/// is the `alpha`-stable subordinator.
///
/// Evaluates `(-1)^k sum_r ((-lambda^alpha t)^r / r!) C(alpha r, k)` with
/// the binomials updated incrementally in `k`, so the table costs
/// `O(k_max * terms)`. The series alternates: absolute accuracy degrades
/// like `exp(lambda^alpha t) * eps`, so for `lambda^alpha t` beyond ~25
/// the generic jet evaluator is the better tool.
pub fn spp_pmf_sfpp_table(
    k_max: usize,
    t: f64,
    lambda: f64,
    alpha: f64,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    spp_pmf_tsfpp_table(k_max, t, lambda, alpha, 0.0, ctl)
}

/// Scalar convenience wrapper over [`spp_pmf_sfpp_table`].
pub fn spp_pmf_sfpp(k: u64, t: f64, lambda: f64, alpha: f64, ctl: &SeriesControl) -> Result<f64> {
    let table = spp_pmf_sfpp_table(k as usize, t, lambda, alpha, ctl)?;
    Ok(table[k as usize])
}

/// Tempered space-fractional pmf table for `k = 0..=k_max`.
///
/// Evaluates the tempered series
/// `(lambda/(lambda+nu))^k e^{nu^alpha t} (-1)^k
///  sum_m ((-(lambda+nu)^alpha t)^m / m!) C(alpha m, k)`;
/// `nu = 0` reduces it to the space-fractional series exactly (same code
/// path, prefactors equal to one).
pub fn spp_pmf_tsfpp_table(
    k_max: usize,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda must be positive and finite"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1]"));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain("nu must be finite and nonnegative"));
    }
    check_time(t)?;
    if t == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }

    let x = (lambda + nu).powf(alpha) * t;
    let lift = nu.powf(alpha) * t; // exp(nu^alpha t) prefactor, in logs
    if lift > 700.0 {
        return Err(Error::SeriesOverflow {
            terms: 0,
            magnitude: lift.exp(),
        });
    }
    let weights = signed_exp_weights(x, alpha, ctl)?;
    let prefactor = lift.exp();
    let ratio = lambda / (lambda + nu);

    // binom[r] tracks C(alpha r, k) across k via
    // C(a, k) = C(a, k-1) (a - k + 1) / k, starting from C(a, 0) = 1.
    let mut binom = vec![1.0f64; weights.len()];
    let mut out = Vec::with_capacity(k_max + 1);
    let mut ratio_pow = 1.0f64;
    for k in 0..=k_max {
        if k > 0 {
            let kf = k as f64;
            for (r, b) in binom.iter_mut().enumerate() {
                *b *= (alpha * r as f64 - (kf - 1.0)) / kf;
            }
            ratio_pow *= ratio;
        }
        let mut acc = Kahan::default();
        for (w, b) in weights.iter().zip(&binom) {
            acc.add(w * b);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let v = prefactor * ratio_pow * sign * acc.value();
        out.push(finish_pmf(v, weights.len(), weights.last().copied().unwrap_or(0.0).abs())?);
    }
    Ok(out)
}

/// Scalar convenience wrapper over [`spp_pmf_tsfpp_table`].
pub fn spp_pmf_tsfpp(
    k: u64,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    let table = spp_pmf_tsfpp_table(k as usize, t, lambda, alpha, nu, ctl)?;
    Ok(table[k as usize])
}

/// Mean and variance of `N(D(t))`.
///
/// `E = lambda t m1` and `Var = lambda^2 t v1 + lambda t m1` where
/// `(m1, v1)` are the unit-time mean and variance of the clock. Errors
/// with [`Error::NonFiniteMoment`] for the stable family.
pub fn spp_moments(t: f64, p: &SppParams) -> Result<(f64, f64)> {
    p.validate()?;
    check_time(t)?;
    let um = p.sub.unit_moments();
    let (m1, _) = um.require_finite("spp_moments")?;
    let mean = p.lambda * t * m1;
    let var = p.lambda * p.lambda * t * um.variance + mean;
    Ok((mean, var))
}

/// Draws `N(D(t))` exactly: first the clock value, then a Poisson count.
pub fn spp_sample<R: Rng + ?Sized>(t: f64, p: &SppParams, rng: &mut R) -> Result<u64> {
    p.validate()?;
    check_time(t)?;
    let d = p.sub.sample(t, rng)?;
    poisson_count(p.lambda * d, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::Streams;
    use crate::numerics::generalized_binomial;
    use crate::pmf::{adaptive_pmf, TailModel, TruncationPolicy};

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    /// Independently computed space-fractional pmf values at
    /// lambda = 0.5, alpha = 0.7, t = 1 (40-digit arithmetic, frozen).
    const SFPP_TABLE: [f64; 7] = [
        0.54033162547318718773,
        0.23282919171921222245,
        0.085087491521407933494,
        0.037387935494867350493,
        0.020370333460255380375,
        0.012895120303961665383,
        0.0089804793165508567146,
    ];

    /// Frozen tempered values at lambda = 0.5, alpha = 0.6, nu = 0.3, t = 1.
    const TSFPP_TABLE: [f64; 5] = [
        0.67766901796907244464,
        0.22228128088013088363,
        0.064240248449296593758,
        0.021203638216150248267,
        0.0080883432811330455431,
    ];

    /// Negative binomial pmf values for the gamma clock
    /// (p = 1.4, beta = 2.2, lambda = 0.9, t = 1.3), frozen from the
    /// closed form C(k + pt - 1, k) (lambda/(lambda+beta))^k
    /// (beta/(lambda+beta))^{pt}.
    const NB_TABLE: [f64; 5] = [
        0.53571153323322960493,
        0.28306306175355809448,
        0.11587323398879523287,
        0.042835718113277205441,
        0.014985592352854557839,
    ];

    #[test]
    fn sfpp_matches_frozen_values() {
        let table = spp_pmf_sfpp_table(6, 1.0, 0.5, 0.7, &ctl()).unwrap();
        for (k, want) in SFPP_TABLE.iter().enumerate() {
            assert!(
                (table[k] - want).abs() < 1e-13,
                "k={k}: {} vs {}",
                table[k],
                want
            );
        }
        // k = 0 closed form: exp(-lambda^alpha t).
        let atom = (-(0.5f64.powf(0.7))).exp();
        assert!((table[0] - atom).abs() < 1e-15);
    }

    #[test]
    fn tsfpp_matches_frozen_values() {
        let table = spp_pmf_tsfpp_table(4, 1.0, 0.5, 0.6, 0.3, &ctl()).unwrap();
        for (k, want) in TSFPP_TABLE.iter().enumerate() {
            assert!(
                (table[k] - want).abs() < 1e-13,
                "k={k}: {} vs {}",
                table[k],
                want
            );
        }
        // k = 0 closed form: exp(-t ((lambda+nu)^alpha - nu^alpha)).
        let atom = (-(0.8f64.powf(0.6) - 0.3f64.powf(0.6))).exp();
        assert!((table[0] - atom).abs() < 1e-15);
    }

    #[test]
    fn binomial_recurrence_matches_product_form() {
        // The in-table incremental update of C(alpha r, k) must agree
        // with the direct product evaluation.
        let (alpha, lambda, t) = (0.7f64, 0.5f64, 1.0f64);
        let x = lambda.powf(alpha) * t;
        let weights = signed_exp_weights(x, alpha, &ctl()).unwrap();
        for k in [1u64, 3, 7, 19] {
            let direct: f64 = {
                let mut acc = Kahan::default();
                for (r, w) in weights.iter().enumerate() {
                    acc.add(w * generalized_binomial(alpha * r as f64, k as u32));
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * acc.value()
            };
            let via_table = spp_pmf_sfpp(k, t, lambda, alpha, &ctl()).unwrap();
            assert!(
                (direct - via_table).abs() < 1e-14,
                "k={k}: {direct} vs {via_table}"
            );
        }
    }

    #[test]
    fn generic_jet_agrees_with_series() {
        // Stable family.
        let p = SppParams {
            lambda: 0.5,
            sub: SubordinatorSpec::Stable { alpha: 0.7 },
        };
        let jet = spp_pmf_table_generic(15, 1.0, &p, &ctl()).unwrap();
        let series = spp_pmf_sfpp_table(15, 1.0, 0.5, 0.7, &ctl()).unwrap();
        for k in 0..=15 {
            assert!(
                (jet[k] - series[k]).abs() < 1e-12,
                "stable k={k}: {} vs {}",
                jet[k],
                series[k]
            );
        }
        // Tempered family.
        let p = SppParams {
            lambda: 0.5,
            sub: SubordinatorSpec::TemperedStable {
                alpha: 0.6,
                nu: 0.3,
            },
        };
        let jet = spp_pmf_table_generic(12, 1.0, &p, &ctl()).unwrap();
        let series = spp_pmf_tsfpp_table(12, 1.0, 0.5, 0.6, 0.3, &ctl()).unwrap();
        for k in 0..=12 {
            assert!(
                (jet[k] - series[k]).abs() < 1e-12,
                "tempered k={k}: {} vs {}",
                jet[k],
                series[k]
            );
        }
    }

    #[test]
    fn gamma_clock_is_negative_binomial() {
        let p = SppParams {
            lambda: 0.9,
            sub: SubordinatorSpec::Gamma { p: 1.4, beta: 2.2 },
        };
        let table = spp_pmf_table_generic(4, 1.3, &p, &ctl()).unwrap();
        for (k, want) in NB_TABLE.iter().enumerate() {
            assert!(
                (table[k] - want).abs() < 5e-13,
                "k={k}: {} vs {}",
                table[k],
                want
            );
        }
    }

    #[test]
    fn tempering_vanishes_smoothly() {
        // nu = 0 is the space-fractional law exactly; small nu perturbs
        // the pmf at rate O(nu^alpha), the regularity of the exponent.
        let sf = spp_pmf_sfpp_table(10, 1.0, 0.5, 0.7, &ctl()).unwrap();
        let t0 = spp_pmf_tsfpp_table(10, 1.0, 0.5, 0.7, 0.0, &ctl()).unwrap();
        let nu = 1e-10f64;
        let teps = spp_pmf_tsfpp_table(10, 1.0, 0.5, 0.7, nu, &ctl()).unwrap();
        let scale = nu.powf(0.7);
        for k in 0..=10 {
            assert_eq!(sf[k], t0[k], "k={k}");
            assert!((sf[k] - teps[k]).abs() < 10.0 * scale, "k={k}");
        }
    }

    #[test]
    fn alpha_one_is_poisson() {
        let (lambda, t) = (1.1f64, 0.9f64);
        let table = spp_pmf_sfpp_table(10, t, lambda, 1.0, &ctl()).unwrap();
        let mut poisson = (-(lambda * t)).exp();
        for (k, got) in table.iter().enumerate() {
            if k > 0 {
                poisson *= lambda * t / k as f64;
            }
            assert!((got - poisson).abs() < 1e-14, "k={k}: {got} vs {poisson}");
        }
        // Continuity as alpha -> 1.
        let near = spp_pmf_sfpp_table(8, 1.0, 1.0, 0.999, &ctl()).unwrap();
        let mut pois = (-1.0f64).exp();
        for (k, got) in near.iter().enumerate() {
            if k > 0 {
                pois /= k as f64;
            }
            assert!((got - pois).abs() < 1e-2, "k={k}: {got} vs {pois}");
        }
    }

    #[test]
    fn sfpp_table_normalizes_with_power_tail() {
        let pmf = adaptive_pmf(&TruncationPolicy::default(), |k_max| {
            spp_pmf_sfpp_table(k_max, 1.0, 0.5, 0.7, &ctl())
        })
        .unwrap();
        assert!(pmf.converged());
        assert!(
            matches!(pmf.tail_model(), TailModel::PowerLaw { beta } if (beta - 0.7).abs() < 0.05),
            "{:?}",
            pmf.tail_model()
        );
        assert!(
            (pmf.total_mass() - 1.0).abs() < 1e-5,
            "total {}",
            pmf.total_mass()
        );
    }

    #[test]
    fn moments_examples() {
        // Tempered clock: m1 = alpha nu^{alpha-1}, v1 = alpha(1-alpha)nu^{alpha-2}.
        let p = SppParams {
            lambda: 1.0,
            sub: SubordinatorSpec::TemperedStable { alpha: 0.6, nu: 1.0 },
        };
        let (mean, var) = spp_moments(1.0, &p).unwrap();
        assert!((mean - 0.6).abs() < 1e-15);
        assert!((var - 0.84).abs() < 1e-15);

        // Gamma clock at t = 2.
        let p = SppParams {
            lambda: 2.0,
            sub: SubordinatorSpec::Gamma { p: 1.0, beta: 1.0 },
        };
        let (mean, var) = spp_moments(2.0, &p).unwrap();
        assert!((mean - 4.0).abs() < 1e-15);
        assert!((var - 12.0).abs() < 1e-15);

        // Stable clock has no finite mean.
        let p = SppParams {
            lambda: 1.0,
            sub: SubordinatorSpec::Stable { alpha: 0.7 },
        };
        assert!(matches!(
            spp_moments(1.0, &p),
            Err(Error::NonFiniteMoment(_))
        ));

        // t = 0 collapses to zero.
        let p = SppParams {
            lambda: 1.0,
            sub: SubordinatorSpec::Gamma { p: 1.0, beta: 1.0 },
        };
        assert_eq!(spp_moments(0.0, &p).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn zero_time_is_point_mass() {
        let p = SppParams {
            lambda: 0.7,
            sub: SubordinatorSpec::InverseGaussian {
                delta: 1.0,
                gamma: 1.0,
            },
        };
        let table = spp_pmf_table_generic(5, 0.0, &p, &ctl()).unwrap();
        assert_eq!(table[0], 1.0);
        assert!(table[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sampler_matches_gamma_law() {
        let p = SppParams {
            lambda: 0.9,
            sub: SubordinatorSpec::Gamma { p: 1.4, beta: 2.2 },
        };
        let t = 1.3;
        let mut rng = Streams::new(0x5bb0_01).stream(0);
        let n = 30_000usize;
        let k_top = 40usize;
        let mut hist = vec![0u64; k_top + 1];
        let mut mean_acc = 0.0f64;
        for _ in 0..n {
            let k = spp_sample(t, &p, &mut rng).unwrap();
            mean_acc += k as f64;
            hist[(k as usize).min(k_top)] += 1;
        }
        let table = spp_pmf_table_generic(k_top, t, &p, &ctl()).unwrap();
        let model_head: f64 = table[..k_top].iter().sum();
        // Lumped-tail cell plus the head cells.
        let mut tv = ((1.0 - model_head).max(0.0) - hist[k_top] as f64 / n as f64).abs();
        for k in 0..k_top {
            tv += (table[k] - hist[k] as f64 / n as f64).abs();
        }
        let tv = tv / 2.0;
        assert!(tv < 0.02, "TV distance {tv}");

        let (mean, var) = spp_moments(t, &p).unwrap();
        let se = (var / n as f64).sqrt();
        assert!(
            (mean_acc / n as f64 - mean).abs() < 4.0 * se,
            "mean {} vs {} (se {})",
            mean_acc / n as f64,
            mean,
            se
        );
    }

    #[test]
    fn sampler_matches_tempered_series() {
        let p = SppParams {
            lambda: 0.5,
            sub: SubordinatorSpec::TemperedStable {
                alpha: 0.6,
                nu: 0.3,
            },
        };
        let t = 1.0;
        let mut rng = Streams::new(0x5bb0_02).stream(0);
        let n = 30_000usize;
        let k_top = 30usize;
        let mut hist = vec![0u64; k_top + 1];
        for _ in 0..n {
            let k = spp_sample(t, &p, &mut rng).unwrap();
            hist[(k as usize).min(k_top)] += 1;
        }
        let table = spp_pmf_tsfpp_table(k_top, t, 0.5, 0.6, 0.3, &ctl()).unwrap();
        let model_head: f64 = table[..k_top].iter().sum();
        let mut tv = ((1.0 - model_head).max(0.0) - hist[k_top] as f64 / n as f64).abs();
        for k in 0..k_top {
            tv += (table[k] - hist[k] as f64 / n as f64).abs();
        }
        let tv = tv / 2.0;
        assert!(tv < 0.02, "TV distance {tv}");
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(spp_pmf_tsfpp(0, 1.0, -1.0, 0.5, 0.1, &ctl()).is_err());
        assert!(spp_pmf_tsfpp(0, 1.0, 1.0, 1.5, 0.1, &ctl()).is_err());
        assert!(spp_pmf_tsfpp(0, 1.0, 1.0, 0.5, -0.1, &ctl()).is_err());
        assert!(spp_pmf_tsfpp(0, -1.0, 1.0, 0.5, 0.1, &ctl()).is_err());
        let bad = SppParams {
            lambda: 0.0,
            sub: SubordinatorSpec::Stable { alpha: 0.5 },
        };
        assert!(bad.validate().is_err());
    }
}
