//! Levy subordinator families: Laplace exponents, local expansions,
//! unit-time moments, and exact marginal samplers.
//!
//! A subordinator `D^f(t)` is a nondecreasing Levy process determined by
//! its Bernstein function `f` through `E[e^{-s D^f(t)}] = e^{-t f(s)}`.
//! [`SubordinatorSpec`] enumerates the supported families of `f` and
//! exposes everything the process layers need:
//!
//! * [`SubordinatorSpec::laplace_exponent`] — `f(s)` itself;
//! * [`SubordinatorSpec::taylor_coeffs_at`] — the [`Jet`] of `u ↦ f(λu)`
//!   at `u = 1`, which seeds every derivative-based pmf formula;
//! * [`SubordinatorSpec::unit_moments`] — `E[D^f(1)]` and `Var[D^f(1)]`
//!   as extended reals (the stable family has no finite moments);
//! * [`SubordinatorSpec::sample`] — a draw of `D^f(t)` whose Laplace
//!   transform is exactly `e^{-t f(s)}`.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma as GammaDist, InverseGaussian};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::jet::Jet;
use crate::numerics::generalized_binomial;
use crate::Result;

/// Iteration guard for the tempered-stable rejection loop.
const REJECTION_GUARD: u64 = 10_000_000;

/// Once `t * nu^alpha` exceeds this bound the tempered-stable acceptance
/// rate `e^{-t nu^alpha}` drops below 1e-4 and the draw is split in half.
const TEMPERING_SPLIT: f64 = 9.210340371976184; // ln(1e4)

/// Maximum recursive halvings of the tempered-stable time argument.
const TEMPERING_MAX_DEPTH: u32 = 24;

/// One weighted component of a mixed stable exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableComponent {
    /// Mixture weight `c`, nonnegative; weights sum to one.
    pub weight: f64,
    /// Stability index in `(0, 1)`.
    pub alpha: f64,
}

/// One weighted component of a mixed tempered-stable exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperedComponent {
    /// Mixture weight `c`, nonnegative; weights sum to one.
    pub weight: f64,
    /// Stability index in `(0, 1)`.
    pub alpha: f64,
    /// Tempering parameter, positive.
    pub nu: f64,
}

/// A Bernstein-function family with parameters.
///
/// Serialized form is a plain JSON object tagged by `family`, e.g.
/// `{"family":"tempered_stable","alpha":0.6,"nu":1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SubordinatorSpec {
    /// `f(s) = s^alpha`.
    Stable { alpha: f64 },
    /// `f(s) = (s + nu)^alpha - nu^alpha`.
    TemperedStable { alpha: f64, nu: f64 },
    /// `f(s) = p * ln(1 + s / beta)`.
    Gamma { p: f64, beta: f64 },
    /// `f(s) = delta * (sqrt(2 s + gamma^2) - gamma)`.
    InverseGaussian { delta: f64, gamma: f64 },
    /// `f(s) = sum_i c_i * s^{alpha_i}`.
    MixedStable { components: Vec<StableComponent> },
    /// `f(s) = sum_i c_i * ((s + nu_i)^{alpha_i} - nu_i^{alpha_i})`.
    MixedTempered { components: Vec<TemperedComponent> },
}

/// Unit-time moments of `D^f(1)` as extended reals.
///
/// The pure stable family (and any mixture containing it) has infinite
/// mean; consumers must check [`UnitMoments::is_finite`] before using the
/// values in moment formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMoments {
    /// `E[D^f(1)] = f'(0+)`.
    pub mean: f64,
    /// `E[(D^f(1))^2]`.
    pub second_moment: f64,
    /// `Var[D^f(1)] = -f''(0+)`.
    pub variance: f64,
}

impl UnitMoments {
    fn from_mean_var(mean: f64, variance: f64) -> Self {
        UnitMoments {
            mean,
            second_moment: variance + mean * mean,
            variance,
        }
    }

    const INFINITE: UnitMoments = UnitMoments {
        mean: f64::INFINITY,
        second_moment: f64::INFINITY,
        variance: f64::INFINITY,
    };

    /// Whether all three moments are finite.
    pub fn is_finite(&self) -> bool {
        self.mean.is_finite() && self.second_moment.is_finite() && self.variance.is_finite()
    }

    /// Extracts `(mean, second_moment)` or reports which operation needed
    /// finite moments.
    pub(crate) fn require_finite(&self, op: &'static str) -> Result<(f64, f64)> {
        if self.is_finite() {
            Ok((self.mean, self.second_moment))
        } else {
            Err(Error::NonFiniteMoment(op))
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "stability index alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {x}")))
    }
}

impl SubordinatorSpec {
    /// Checks the per-family parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match self {
            SubordinatorSpec::Stable { alpha } => check_alpha(*alpha),
            SubordinatorSpec::TemperedStable { alpha, nu } => {
                check_alpha(*alpha)?;
                check_positive("nu", *nu)
            }
            SubordinatorSpec::Gamma { p, beta } => {
                check_positive("p", *p)?;
                check_positive("beta", *beta)
            }
            SubordinatorSpec::InverseGaussian { delta, gamma } => {
                check_positive("delta", *delta)?;
                check_positive("gamma", *gamma)
            }
            SubordinatorSpec::MixedStable { components } => {
                let mut total = 0.0;
                if components.is_empty() {
                    return Err(Error::domain("mixture needs at least one component"));
                }
                for c in components {
                    check_alpha(c.alpha)?;
                    if !(c.weight >= 0.0 && c.weight.is_finite()) {
                        return Err(Error::domain(format!(
                            "mixture weight must be nonnegative, got {}",
                            c.weight
                        )));
                    }
                    total += c.weight;
                }
                check_weight_sum(total)
            }
            SubordinatorSpec::MixedTempered { components } => {
                let mut total = 0.0;
                if components.is_empty() {
                    return Err(Error::domain("mixture needs at least one component"));
                }
                for c in components {
                    check_alpha(c.alpha)?;
                    check_positive("nu", c.nu)?;
                    if !(c.weight >= 0.0 && c.weight.is_finite()) {
                        return Err(Error::domain(format!(
                            "mixture weight must be nonnegative, got {}",
                            c.weight
                        )));
                    }
                    total += c.weight;
                }
                check_weight_sum(total)
            }
        }
    }

    /// The Laplace exponent `f(s)`, for `s >= 0`.
    ///
    /// `f(0) = 0` exactly for every family; `f` is nondecreasing and
    /// concave.
    pub fn laplace_exponent(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        match self {
            SubordinatorSpec::Stable { alpha } => s.powf(*alpha),
            SubordinatorSpec::TemperedStable { alpha, nu } => {
                (s + nu).powf(*alpha) - nu.powf(*alpha)
            }
            SubordinatorSpec::Gamma { p, beta } => p * (s / beta).ln_1p(),
            SubordinatorSpec::InverseGaussian { delta, gamma } => {
                delta * ((2.0 * s + gamma * gamma).sqrt() - gamma)
            }
            SubordinatorSpec::MixedStable { components } => components
                .iter()
                .map(|c| c.weight * s.powf(c.alpha))
                .sum(),
            SubordinatorSpec::MixedTempered { components } => components
                .iter()
                .map(|c| c.weight * ((s + c.nu).powf(c.alpha) - c.nu.powf(c.alpha)))
                .sum(),
        }
    }

    /// Taylor coefficients of `u ↦ f(λu)` at `u = 1`, through order `k`.
    ///
    /// Coefficient `j` equals `(d^j/du^j f(λu)|_{u=1}) / j!`; coefficient 0
    /// is bitwise equal to [`Self::laplace_exponent`]`(λ)`.
    pub fn taylor_coeffs_at(&self, lambda: f64, order: usize) -> Jet {
        let mut c = vec![0.0f64; order + 1];
        match self {
            SubordinatorSpec::Stable { alpha } => {
                // f(λu) = λ^α (1 + (u-1))^α: coefficient j is λ^α C(α, j).
                let scale = lambda.powf(*alpha);
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj = scale * generalized_binomial(*alpha, j as u32);
                }
            }
            SubordinatorSpec::TemperedStable { alpha, nu } => {
                // (λu+ν)^α = (λ+ν)^α (1 + λ(u-1)/(λ+ν))^α.
                let base = (lambda + nu).powf(*alpha);
                let ratio = lambda / (lambda + nu);
                let mut pow = 1.0;
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj = base * generalized_binomial(*alpha, j as u32) * pow;
                    pow *= ratio;
                }
                c[0] -= nu.powf(*alpha);
            }
            SubordinatorSpec::Gamma { p, beta } => {
                // p ln(1+λu/β) = p ln(1+λ/β) + p ln(1 + λ(u-1)/(β+λ)).
                let ratio = lambda / (beta + lambda);
                c[0] = p * (lambda / beta).ln_1p();
                let mut pow = 1.0;
                for (j, cj) in c.iter_mut().enumerate().skip(1) {
                    pow *= ratio;
                    *cj = p * pow / (j as f64) * if j % 2 == 0 { -1.0 } else { 1.0 };
                }
            }
            SubordinatorSpec::InverseGaussian { delta, gamma } => {
                // δ√(2λu+γ²) = δ√(2λ+γ²) (1 + 2λ(u-1)/(2λ+γ²))^{1/2}.
                let base = (2.0 * lambda + gamma * gamma).sqrt();
                let ratio = 2.0 * lambda / (2.0 * lambda + gamma * gamma);
                let mut pow = 1.0;
                for (j, cj) in c.iter_mut().enumerate() {
                    *cj = delta * base * generalized_binomial(0.5, j as u32) * pow;
                    pow *= ratio;
                }
                c[0] -= delta * gamma;
            }
            SubordinatorSpec::MixedStable { components } => {
                for comp in components {
                    let part = SubordinatorSpec::Stable { alpha: comp.alpha }
                        .taylor_coeffs_at(lambda, order);
                    for (cj, pj) in c.iter_mut().zip(part.coeffs()) {
                        *cj += comp.weight * pj;
                    }
                }
            }
            SubordinatorSpec::MixedTempered { components } => {
                for comp in components {
                    let part = SubordinatorSpec::TemperedStable {
                        alpha: comp.alpha,
                        nu: comp.nu,
                    }
                    .taylor_coeffs_at(lambda, order);
                    for (cj, pj) in c.iter_mut().zip(part.coeffs()) {
                        *cj += comp.weight * pj;
                    }
                }
            }
        }
        // Pin the order-0 coefficient to the exponent itself so the two
        // evaluation routes can never drift apart.
        c[0] = self.laplace_exponent(lambda);
        Jet::from_coeffs(c)
    }

    /// Mean, second moment and variance of `D^f(1)`.
    ///
    /// Stable components make every moment infinite; the result then
    /// carries `f64::INFINITY` rather than an error so that callers can
    /// distinguish "not finite" from "invalid parameters".
    pub fn unit_moments(&self) -> UnitMoments {
        match self {
            SubordinatorSpec::Stable { .. } => UnitMoments::INFINITE,
            SubordinatorSpec::TemperedStable { alpha, nu } => {
                let mean = alpha * nu.powf(alpha - 1.0);
                let var = alpha * (1.0 - alpha) * nu.powf(alpha - 2.0);
                UnitMoments::from_mean_var(mean, var)
            }
            SubordinatorSpec::Gamma { p, beta } => {
                UnitMoments::from_mean_var(p / beta, p / (beta * beta))
            }
            SubordinatorSpec::InverseGaussian { delta, gamma } => {
                UnitMoments::from_mean_var(delta / gamma, delta / (gamma * gamma * gamma))
            }
            SubordinatorSpec::MixedStable { .. } => UnitMoments::INFINITE,
            SubordinatorSpec::MixedTempered { components } => {
                // Independent components add, so means and variances add.
                let mut mean = 0.0;
                let mut var = 0.0;
                for c in components {
                    mean += c.weight * c.alpha * c.nu.powf(c.alpha - 1.0);
                    var += c.weight * c.alpha * (1.0 - c.alpha) * c.nu.powf(c.alpha - 2.0);
                }
                UnitMoments::from_mean_var(mean, var)
            }
        }
    }

    /// Draws `D^f(t)`; the draw's Laplace transform is `e^{-t f(s)}`.
    ///
    /// Routes: stable via the one-sided-stable transformation method
    /// scaled by `t^{1/α}`; tempered stable via exponential-tilting
    /// rejection on stable proposals (halving `t` while the acceptance
    /// rate is below 1e-4); gamma as a shape-`pt` rate-`β` gamma draw;
    /// inverse Gaussian via the two-root inversion method with mean
    /// `δt/γ` and shape `(δt)^2`. Mixtures sum independent component
    /// draws taken at the weighted times `c_i t`, because Laplace
    /// exponents add.
    pub fn sample<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain(format!("time must be nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        match self {
            SubordinatorSpec::Stable { alpha } => Ok(t.powf(1.0 / alpha) * stable_standard(*alpha, rng)),
            SubordinatorSpec::TemperedStable { alpha, nu } => {
                tempered_stable_sample(*alpha, *nu, t, rng, 0)
            }
            SubordinatorSpec::Gamma { p, beta } => {
                let dist = GammaDist::new(p * t, 1.0 / beta)
                    .map_err(|e| Error::domain(format!("gamma sampler: {e}")))?;
                Ok(dist.sample(rng))
            }
            SubordinatorSpec::InverseGaussian { delta, gamma } => {
                let dist = InverseGaussian::new(delta * t / gamma, (delta * t) * (delta * t))
                    .map_err(|e| Error::domain(format!("inverse gaussian sampler: {e}")))?;
                Ok(dist.sample(rng))
            }
            SubordinatorSpec::MixedStable { components } => {
                let mut sum = 0.0;
                for c in components {
                    if c.weight > 0.0 {
                        sum += SubordinatorSpec::Stable { alpha: c.alpha }
                            .sample(c.weight * t, rng)?;
                    }
                }
                Ok(sum)
            }
            SubordinatorSpec::MixedTempered { components } => {
                let mut sum = 0.0;
                for c in components {
                    if c.weight > 0.0 {
                        sum += SubordinatorSpec::TemperedStable {
                            alpha: c.alpha,
                            nu: c.nu,
                        }
                        .sample(c.weight * t, rng)?;
                    }
                }
                Ok(sum)
            }
        }
    }
}

fn check_weight_sum(total: f64) -> Result<()> {
    if (total - 1.0).abs() <= 1e-9 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "mixture weights must sum to 1, got {total}"
        )))
    }
}

/// Standard one-sided stable draw with Laplace transform `e^{-s^α}`.
///
/// Kanter's representation: `S = (a(U) / E)^{(1-α)/α}` with `U` uniform on
/// `(0,1)`, `E` standard exponential and
/// `a(u) = sin(απu)^{α/(1-α)} sin((1-α)πu) / sin(πu)^{1/(1-α)}`,
/// evaluated in log space (`a` has finite limits at both endpoints, so the
/// log combination is stable across the whole interval).
fn stable_standard<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = loop {
        let u = rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let e: f64 = loop {
        let e = Exp1.sample(rng);
        if e > 0.0 {
            break e;
        }
    };
    let pu = core::f64::consts::PI * u;
    let ln_a = alpha / (1.0 - alpha) * (alpha * pu).sin().ln() + ((1.0 - alpha) * pu).sin().ln()
        - 1.0 / (1.0 - alpha) * pu.sin().ln();
    ((1.0 - alpha) / alpha * (ln_a - e.ln())).exp()
}

/// Tempered-stable draw by exponential tilting: propose a stable draw `X`
/// at time `t`, accept with probability `e^{-νX}`; overall acceptance rate
/// is `e^{-t ν^α}`, so `t` is halved recursively while that rate is below
/// 1e-4 and the two halves are summed (independent increments).
fn tempered_stable_sample<R: Rng + ?Sized>(
    alpha: f64,
    nu: f64,
    t: f64,
    rng: &mut R,
    depth: u32,
) -> Result<f64> {
    if t * nu.powf(alpha) > TEMPERING_SPLIT {
        if depth >= TEMPERING_MAX_DEPTH {
            return Err(Error::SamplerDegenerate(format!(
                "tempered-stable split depth {depth} exceeded at t = {t}, nu = {nu}, alpha = {alpha}"
            )));
        }
        let half = tempered_stable_sample(alpha, nu, t / 2.0, rng, depth + 1)?;
        return Ok(half + tempered_stable_sample(alpha, nu, t / 2.0, rng, depth + 1)?);
    }
    let scale = t.powf(1.0 / alpha);
    for _ in 0..REJECTION_GUARD {
        let x = scale * stable_standard(alpha, rng);
        // Accept with probability e^{-νx}; ln U < -νx avoids underflow.
        let u: f64 = loop {
            let u = rng.random::<f64>();
            if u > 0.0 {
                break u;
            }
        };
        if u.ln() < -nu * x {
            return Ok(x);
        }
    }
    Err(Error::SamplerDegenerate(format!(
        "tempered-stable rejection exceeded {REJECTION_GUARD} iterations \
         (t = {t}, nu = {nu}, alpha = {alpha})"
    )))
}
