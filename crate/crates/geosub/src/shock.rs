//! Shock-model reliability driven by geometric-clock arrivals: the
//! extreme model (the system dies at the first shock it fails to
//! survive) and the cumulative model (death once integer damage reaches
//! a threshold), with closed forms, Monte Carlo verification, and the
//! parameter sweeps behind sensitivity studies.
//!
//! Both models reduce to the count law. Surviving each shock
//! independently with probability `q` makes the reliability the count's
//! generating function at `q`, `R(t) = 1 / (1 + mu t c)` with
//! `c = 1 - e^{-f(lambda (1 - q))}`; accumulating unit-time subordinated
//! Poisson damage per shock makes total damage the subordinated count
//! itself, so the cumulative reliability is a pmf partial sum.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gcp::{gcp_sample_count, GcpParams};
use crate::gscpp::JumpLaw;
use crate::gspp::{gspp_pgf, gspp_pmf_table_generic, gspp_sample, GsppParams};
use crate::mc::{binomial_report, McReport, Streams, DEFAULT_K_SIGMA};
use crate::series::{Kahan, SeriesControl};
use crate::spp::{check_time, SppParams};
use crate::subordinators::SubordinatorSpec;
use crate::Result;

/// Extreme shock model: shocks arrive as a geometric-clock subordinated
/// count, each survived independently with probability `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeShockModel {
    /// Probability of surviving a single shock.
    pub q: f64,
    /// Law of the shock-arrival count.
    pub arrivals: GsppParams,
}

impl ExtremeShockModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && (0.0..=1.0).contains(&self.q)) {
            return Err(Error::domain("survival probability q must lie in [0, 1]"));
        }
        self.arrivals.validate()
    }
}

/// Cumulative shock model: shocks arrive on the geometric clock, each
/// deals a unit-time subordinated Poisson damage, and the system fails
/// once total damage reaches `threshold_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeShockModel {
    /// Damage the system cannot reach and live, `>= 1`.
    pub threshold_t: u64,
    /// Shock-arrival clock.
    pub shock_process: GcpParams,
    /// Per-shock damage: a subordinated Poisson variable at unit time.
    pub damage_law: SppParams,
}

impl CumulativeShockModel {
    pub fn validate(&self) -> Result<()> {
        if self.threshold_t == 0 {
            return Err(Error::domain("damage threshold must be at least 1"));
        }
        self.shock_process.validate()?;
        self.damage_law.validate()
    }

    /// Total damage is exactly the subordinated count on the clock.
    fn damage_count(&self) -> GsppParams {
        GsppParams {
            spp: self.damage_law.clone(),
            gcp: self.shock_process.clone(),
        }
    }
}

/// `c = 1 - e^{-f(lambda (1 - q))}`, the per-unit-time kill intensity.
fn kill_rate(m: &ExtremeShockModel) -> f64 {
    let s = m.arrivals.spp.lambda * (1.0 - m.q);
    1.0 - (-m.arrivals.spp.sub.laplace_exponent(s)).exp()
}

/// `P[lifetime > t] = 1 / (1 + mu t c)` in closed form.
///
/// Equals 1 at `t = 0`, decreases to 0, and is exactly the count's
/// generating function at `q`.
pub fn extreme_reliability(t: f64, m: &ExtremeShockModel) -> Result<f64> {
    m.validate()?;
    check_time(t)?;
    Ok(1.0 / (1.0 + m.arrivals.gcp.mu * t * kill_rate(m)))
}

/// Failure rate `r(t) = -R'(t) / R(t) = mu c / (1 + mu t c)`, decreasing
/// from `mu c` at `t = 0`.
pub fn extreme_failure_rate(t: f64, m: &ExtremeShockModel) -> Result<f64> {
    m.validate()?;
    check_time(t)?;
    let mc = m.arrivals.gcp.mu * kill_rate(m);
    Ok(mc / (1.0 + mc * t))
}

/// Mean of the two-state product `prod_i X_i` over the count, with
/// `X_i ~ Bernoulli(q)`: the generating function at `q`.
///
/// This is the zero-allowing special case of the multiplicative
/// process's mean (whose factor laws must stay strictly positive), and
/// it coincides with [`extreme_reliability`]: the product is 1 exactly
/// while every shock has been survived.
pub fn two_state_product_mean(t: f64, m: &ExtremeShockModel) -> Result<f64> {
    m.validate()?;
    gspp_pgf(m.q, t, &m.arrivals)
}

/// Monte Carlo check of the closed form: per grid point, `n` systems
/// are pushed through the two-state product construction and the
/// survival fraction is judged against [`extreme_reliability`] at
/// [`DEFAULT_K_SIGMA`] binomial standard errors.
pub fn extreme_mc(t_grid: &[f64], m: &ExtremeShockModel, n: u64, seed: u64) -> Result<Vec<McReport>> {
    m.validate()?;
    if n < 2 {
        return Err(Error::domain("Monte Carlo needs at least 2 draws"));
    }
    let streams = Streams::new(seed);
    t_grid
        .iter()
        .enumerate()
        .map(|(task, &t)| {
            let target = extreme_reliability(t, m)?;
            let mut rng = streams.stream(task as u64);
            let mut survived = 0u64;
            for _ in 0..n {
                let shocks = gspp_sample(t, &m.arrivals, &mut rng)?;
                let mut alive = true;
                for _ in 0..shocks {
                    if rng.random::<f64>() >= m.q {
                        alive = false;
                        break;
                    }
                }
                survived += u64::from(alive);
            }
            Ok(binomial_report(survived, n, target, DEFAULT_K_SIGMA))
        })
        .collect()
}

/// `P[lifetime > t] = P[damage(t) < T]`: a pmf partial sum of the
/// subordinated count, via the jet table.
pub fn cumulative_reliability(t: f64, m: &CumulativeShockModel, ctl: &SeriesControl) -> Result<f64> {
    m.validate()?;
    check_time(t)?;
    let table = gspp_pmf_table_generic((m.threshold_t - 1) as usize, t, &m.damage_count(), ctl)?;
    let mut acc = Kahan::default();
    for &w in &table {
        acc.add(w);
    }
    Ok(acc.value())
}

/// Monte Carlo check of [`cumulative_reliability`]: simulate the damage
/// count directly and judge the fraction `{damage < T}` binomially.
pub fn cumulative_mc(
    t_grid: &[f64],
    m: &CumulativeShockModel,
    n: u64,
    seed: u64,
    ctl: &SeriesControl,
) -> Result<Vec<McReport>> {
    m.validate()?;
    if n < 2 {
        return Err(Error::domain("Monte Carlo needs at least 2 draws"));
    }
    let damage = m.damage_count();
    let streams = Streams::new(seed);
    t_grid
        .iter()
        .enumerate()
        .map(|(task, &t)| {
            let target = cumulative_reliability(t, m, ctl)?;
            let mut rng = streams.stream(task as u64);
            let mut alive = 0u64;
            for _ in 0..n {
                let z = gspp_sample(t, &damage, &mut rng)?;
                alive += u64::from(z < m.threshold_t);
            }
            Ok(binomial_report(alive, n, target, DEFAULT_K_SIGMA))
        })
        .collect()
}

/// Monte Carlo estimate with no closed-form target attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Grid point the estimate refers to.
    pub t: f64,
    /// Estimated survival probability.
    pub estimate: f64,
    /// Empirical binomial standard error.
    pub stderr: f64,
    /// Number of simulated systems.
    pub n: u64,
}

/// Estimation-only path for arbitrary integer damage laws: shocks from
/// the geometric clock, iid damage from `damage`, failure at accumulated
/// damage `>= threshold`. No closed form is claimed; the result carries
/// empirical standard errors only.
pub fn cumulative_mc_damage(
    t_grid: &[f64],
    shock_process: &GcpParams,
    damage: &JumpLaw,
    threshold: u64,
    n: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    shock_process.validate()?;
    damage.validate()?;
    if damage
        .mass_pairs()
        .iter()
        .any(|&(x, w)| w > 0.0 && !(x >= 0.0 && x == x.floor()))
    {
        return Err(Error::domain(
            "cumulative damage law must have nonnegative integer support",
        ));
    }
    if threshold == 0 {
        return Err(Error::domain("damage threshold must be at least 1"));
    }
    if n < 2 {
        return Err(Error::domain("Monte Carlo needs at least 2 draws"));
    }
    let streams = Streams::new(seed);
    t_grid
        .iter()
        .enumerate()
        .map(|(task, &t)| {
            check_time(t)?;
            let mut rng = streams.stream(task as u64);
            let mut alive = 0u64;
            let limit = threshold as f64;
            for _ in 0..n {
                let shocks = gcp_sample_count(t, shock_process, &mut rng)?;
                let mut total = 0.0;
                let mut ok = true;
                for _ in 0..shocks {
                    total += damage.sample(&mut rng);
                    if total >= limit {
                        ok = false;
                        break;
                    }
                }
                alive += u64::from(ok);
            }
            let estimate = alive as f64 / n as f64;
            Ok(McEstimate {
                t,
                estimate,
                stderr: (estimate * (1.0 - estimate) / n as f64).sqrt(),
                n,
            })
        })
        .collect()
}

/// Which model parameter a sensitivity sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Q,
    Alpha,
    Lambda,
    Mu,
}

impl SweepParameter {
    /// Column label used in sweep tables.
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Q => "q",
            SweepParameter::Alpha => "alpha",
            SweepParameter::Lambda => "lambda",
            SweepParameter::Mu => "mu",
        }
    }
}

/// One row of a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    /// Swept parameter's name.
    pub parameter: &'static str,
    /// Value the parameter takes in this row.
    pub value: f64,
    /// Evaluation time.
    pub t: f64,
    pub reliability: f64,
    pub failure_rate: f64,
}

/// Reliability and failure-rate curves with one parameter varied and the
/// rest held at the base model, rows in deterministic (value-major)
/// order.
///
/// Alpha sweeps require a stable-family clock, since only there is alpha
/// a free scalar of the model.
pub fn sensitivity_sweep(
    base: &ExtremeShockModel,
    parameter: SweepParameter,
    values: &[f64],
    t_grid: &[f64],
) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let mut rows = Vec::with_capacity(values.len() * t_grid.len());
    for &value in values {
        let model = with_parameter(base, parameter, value)?;
        for &t in t_grid {
            rows.push(SweepRow {
                parameter: parameter.name(),
                value,
                t,
                reliability: extreme_reliability(t, &model)?,
                failure_rate: extreme_failure_rate(t, &model)?,
            });
        }
    }
    Ok(rows)
}

/// The base model with one parameter replaced.
fn with_parameter(
    base: &ExtremeShockModel,
    parameter: SweepParameter,
    value: f64,
) -> Result<ExtremeShockModel> {
    let mut model = base.clone();
    match parameter {
        SweepParameter::Q => model.q = value,
        SweepParameter::Lambda => model.arrivals.spp.lambda = value,
        SweepParameter::Mu => model.arrivals.gcp.mu = value,
        SweepParameter::Alpha => match model.arrivals.spp.sub {
            SubordinatorSpec::Stable { ref mut alpha } => *alpha = value,
            _ => {
                return Err(Error::domain(
                    "alpha sweeps need the stable clock family",
                ))
            }
        },
    }
    model.validate()?;
    Ok(model)
}
