//! Compound counts on the geometric clock: each arrival of the
//! subordinated count carries an iid jump, and the process records the
//! running jump total.
//!
//! Writing `X(t)` for the geometric-clock count and `X_i` for the jumps,
//! the process is `Y(t) = sum_{i <= X(t)} X_i`. Every evaluator here
//! works through the conditional law: `P[Y(t) in A] = sum_m P[X(t) = m]
//! P[X_1 + ... + X_m in A]`, with the count weights taken from the jet
//! route (the cancellation-free master path) and truncated once their
//! captured mass reaches `1 - abs_tol`. Jump laws are stored in one of
//! three shapes — integer pmf, density on a uniform grid, or a finite
//! atom list — and the pmf/cdf routines state which shapes they accept.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gcp::gcp_sample_count;
use crate::gspp::{gspp_pmf_table_generic, GsppParams, MomentTriple};
use crate::series::{Kahan, SeriesControl};
use crate::spp::{check_time, spp_sample};
use crate::Result;

/// Slack accepted around total mass 1 by [`JumpLaw::validate`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Coarsest grid step the convolution cdf accepts; the gridded law is a
/// midpoint discretization with `O(step^2)` bias, and beyond this step
/// the bias would dwarf every tolerance used here.
pub const MAX_GRID_STEP: f64 = 0.25;

/// Law of a single jump.
///
/// `Discrete` lives on `0, 1, 2, ...` with `P[X = j] = pmf[j]`. `Grid`
/// stores density values on the uniform grid `origin + j * step` and
/// places mass `step * values[j]` at the j-th node. `Atoms` is an
/// explicit finite support: `P[X = points[i]] = weights[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum JumpLaw {
    /// Integer support with the given probabilities.
    Discrete { pmf: Vec<f64> },
    /// Density sampled on a uniform grid; mass `step * values[j]` sits
    /// at `origin + j * step`.
    Grid {
        origin: f64,
        step: f64,
        values: Vec<f64>,
    },
    /// Finite list of atoms and their probabilities.
    Atoms { points: Vec<f64>, weights: Vec<f64> },
}

impl JumpLaw {
    /// Checks shape, finiteness, nonnegativity, and normalization to
    /// within [`NORMALIZATION_TOL`].
    pub fn validate(&self) -> Result<()> {
        match self {
            JumpLaw::Discrete { pmf } => {
                if pmf.is_empty() {
                    return Err(Error::domain("discrete jump law needs at least one entry"));
                }
                check_masses(pmf.iter().copied(), 1.0)?;
            }
            JumpLaw::Grid {
                origin,
                step,
                values,
            } => {
                if !origin.is_finite() {
                    return Err(Error::domain("grid origin must be finite"));
                }
                if !(step.is_finite() && *step > 0.0) {
                    return Err(Error::domain("grid step must be positive and finite"));
                }
                if values.is_empty() {
                    return Err(Error::domain("grid jump law needs at least one node"));
                }
                check_masses(values.iter().copied(), *step)?;
            }
            JumpLaw::Atoms { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(Error::domain(
                        "atom jump law needs matching, nonempty points and weights",
                    ));
                }
                if points.iter().any(|x| !x.is_finite()) {
                    return Err(Error::domain("atom points must be finite"));
                }
                check_masses(weights.iter().copied(), 1.0)?;
            }
        }
        Ok(())
    }

    /// Support/mass pairs in storage order (zero-mass nodes included).
    pub(crate) fn mass_pairs(&self) -> Vec<(f64, f64)> {
        match self {
            JumpLaw::Discrete { pmf } => pmf
                .iter()
                .enumerate()
                .map(|(j, &p)| (j as f64, p))
                .collect(),
            JumpLaw::Grid {
                origin,
                step,
                values,
            } => values
                .iter()
                .enumerate()
                .map(|(j, &v)| (origin + j as f64 * step, step * v))
                .collect(),
            JumpLaw::Atoms { points, weights } => points
                .iter()
                .copied()
                .zip(weights.iter().copied())
                .collect(),
        }
    }

    /// `E[X]` of a validated law.
    pub fn moment1(&self) -> f64 {
        let mut acc = Kahan::default();
        for (x, w) in self.mass_pairs() {
            acc.add(x * w);
        }
        acc.value()
    }

    /// `E[X^2]` of a validated law.
    pub fn moment2(&self) -> f64 {
        let mut acc = Kahan::default();
        for (x, w) in self.mass_pairs() {
            acc.add(x * x * w);
        }
        acc.value()
    }

    /// `E[X^{beta - 1}]` for nonnegative support.
    ///
    /// `beta = 1` is exactly 1 for any law; mass at the origin makes the
    /// transform infinite for `beta < 1` and contributes nothing for
    /// `beta > 1`. Negative support is rejected.
    pub fn mellin(&self, beta: f64) -> Result<f64> {
        if !beta.is_finite() {
            return Err(Error::domain("mellin order must be finite"));
        }
        if beta == 1.0 {
            return Ok(1.0);
        }
        let mut acc = Kahan::default();
        for (x, w) in self.mass_pairs() {
            if w == 0.0 {
                continue;
            }
            if x < 0.0 {
                return Err(Error::domain(
                    "mellin transform requires nonnegative jump support",
                ));
            }
            if x == 0.0 {
                if beta < 1.0 {
                    return Err(Error::NonFiniteMoment("jump law mellin below order one"));
                }
                continue; // 0^{beta-1} = 0 for beta > 1
            }
            acc.add(w * x.powf(beta - 1.0));
        }
        Ok(acc.value())
    }

    /// Whether every point carrying mass is strictly positive.
    pub fn strictly_positive(&self) -> bool {
        self.mass_pairs().iter().all(|&(x, w)| w == 0.0 || x > 0.0)
    }

    /// Draws one jump from a validated law by inverse cdf.
    ///
    /// The normalization slack (at most [`NORMALIZATION_TOL`]) lands on
    /// the last support point.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let pairs = self.mass_pairs();
        let mut acc = 0.0;
        for &(x, w) in &pairs {
            acc += w;
            if u < acc {
                return x;
            }
        }
        pairs.last().map(|&(x, _)| x).unwrap_or(0.0)
    }
}

/// Nonnegativity/finiteness plus total mass `scale * sum = 1` up to
/// [`NORMALIZATION_TOL`].
fn check_masses(masses: impl Iterator<Item = f64>, scale: f64) -> Result<()> {
    let mut acc = Kahan::default();
    for w in masses {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::domain("jump masses must be finite and nonnegative"));
        }
        acc.add(w);
    }
    let total = scale * acc.value();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::domain(format!(
            "jump law must have total mass 1, got {total}"
        )));
    }
    Ok(())
}

/// Compound process: geometric-clock count plus a jump law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GscppParams {
    /// Law of the driving count.
    pub gspp: GsppParams,
    /// Law of one jump.
    pub jumps: JumpLaw,
}

impl GscppParams {
    pub fn validate(&self) -> Result<()> {
        self.gspp.validate()?;
        self.jumps.validate()
    }
}

/// Mean, variance, and covariance coefficients of the jump total.
///
/// One unit of the geometric clock contributes an iid block `chi` with
/// `E[chi] = lambda m1 E[X]` and `E[chi^2] = lambda m1 E[X^2] +
/// lambda^2 m2 E[X]^2` (`m1`, `m2` the clock's raw unit moments), and
/// conditioning on the clock gives `Cov(s, u) = mu s E[chi^2] +
/// (mu E[chi])^2 s u` for `s <= u` — same shape as the plain count, and
/// literally equal to it when the jumps are identically 1. The stored
/// `variance` is `cov(t, t)`, so the triple is internally consistent by
/// construction.
pub fn gscpp_moments(t: f64, p: &GscppParams) -> Result<MomentTriple> {
    p.validate()?;
    check_time(t)?;
    let um = p.gspp.spp.sub.unit_moments();
    let (m1, m2) = um.require_finite("gscpp_moments")?;
    let (l, m) = (p.gspp.spp.lambda, p.gspp.gcp.mu);
    let ex = p.jumps.moment1();
    let ex2 = p.jumps.moment2();
    let a = l * m * (m1 * ex2 + l * m2 * (ex * ex));
    let b = l * l * m * m * m1 * m1 * (ex * ex);
    Ok(MomentTriple {
        t,
        mean: l * m * t * m1 * ex,
        variance: a * t + b * t * t,
        cov_a: a,
        cov_b: b,
    })
}

/// Extends a pmf table until its captured mass reaches `1 - ctl.abs_tol`.
///
/// Heavy-tailed counts (a pure stable clock has pmf tail `~ k^{-1-alpha}`)
/// cannot reach that mass within any workable table; the honest outcome
/// there is [`Error::Convergence`] carrying the mass actually captured.
pub(crate) fn mass_table_until(
    ctl: &SeriesControl,
    mut eval: impl FnMut(usize) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let mut m_max = 64usize.min(ctl.max_terms.max(8));
    loop {
        let table = eval(m_max)?;
        let mut mass = Kahan::default();
        for &w in &table {
            mass.add(w);
        }
        let mass = mass.value();
        if 1.0 - mass <= ctl.abs_tol {
            return Ok(table);
        }
        if m_max >= ctl.max_terms {
            return Err(Error::Convergence {
                terms: m_max,
                partial: mass,
                last_term: *table.last().expect("mass table is never empty"),
                tol: ctl.abs_tol,
            });
        }
        m_max = (m_max * 2).min(ctl.max_terms);
    }
}

/// Count weights `P[X(t) = m]` from the jet route, extended until their
/// captured mass reaches `1 - ctl.abs_tol`.
pub(crate) fn gspp_mass_table(t: f64, p: &GsppParams, ctl: &SeriesControl) -> Result<Vec<f64>> {
    mass_table_until(ctl, |m_max| gspp_pmf_table_generic(m_max, t, p, ctl))
}

/// `a * b` truncated to the first `cap` coefficients.
fn convolve_trunc(a: &[f64], b: &[f64], cap: usize) -> Vec<f64> {
    let len = (a.len() + b.len() - 1).min(cap);
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 || i >= len {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `P[Y(t) = k]` for an integer-supported jump law.
pub fn gscpp_pmf_discrete(k: u64, t: f64, p: &GscppParams, ctl: &SeriesControl) -> Result<f64> {
    let table = gscpp_pmf_discrete_table(k as usize, t, p, ctl)?;
    Ok(table[k as usize])
}

/// All of `P[Y(t) = k]`, `k = 0..=k_max`, for an integer-supported jump
/// law: the count-conditional sum `sum_m P[X(t) = m] h^{*m}(k)` with the
/// convolution powers built iteratively and truncated at `k_max`.
pub fn gscpp_pmf_discrete_table(
    k_max: usize,
    t: f64,
    p: &GscppParams,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    p.validate()?;
    check_time(t)?;
    let h = match &p.jumps {
        JumpLaw::Discrete { pmf } => pmf,
        _ => {
            return Err(Error::domain(
                "gscpp_pmf_discrete requires an integer-supported jump law",
            ))
        }
    };
    let mut out = vec![Kahan::default(); k_max + 1];
    if t == 0.0 {
        out[0].add(1.0);
        return Ok(out.iter().map(Kahan::value).collect());
    }
    let weights = gspp_mass_table(t, &p.gspp, ctl)?;
    // First index carrying mass; h^{*m} then lives on [m * s0, ..] and
    // stops touching the table once m * s0 > k_max.
    let s0 = h.iter().position(|&x| x > 0.0).unwrap_or(h.len());
    let mut conv = vec![1.0f64];
    for (m, &w) in weights.iter().enumerate() {
        if m > 0 {
            if s0 > 0 && m * s0 > k_max {
                break;
            }
            conv = convolve_trunc(&conv, h, k_max + 1);
        }
        for (o, &c) in out.iter_mut().zip(conv.iter()) {
            o.add(w * c);
        }
    }
    Ok(out.iter().map(Kahan::value).collect())
}

/// Probability masses on a uniform grid; the shared currency of the
/// convolution cdf routes here and in the multiplicative module.
#[derive(Debug, Clone)]
pub(crate) struct GridMasses {
    pub(crate) origin: f64,
    pub(crate) step: f64,
    pub(crate) w: Vec<f64>,
}

impl GridMasses {
    /// Convolution with `law` (same step), truncated to `max_len` nodes.
    pub(crate) fn convolve(&self, law: &GridMasses, max_len: usize) -> GridMasses {
        debug_assert!(
            (self.step - law.step).abs() <= 1e-12 * self.step.abs(),
            "convolution needs a common grid step"
        );
        GridMasses {
            origin: self.origin + law.origin,
            step: self.step,
            w: convolve_trunc(&self.w, &law.w, max_len),
        }
    }

    /// Mass at or below `y`, with a half-ulp of slack on node positions.
    pub(crate) fn cdf_at(&self, y: f64) -> f64 {
        let slop = self.step * 1e-9;
        let mut acc = Kahan::default();
        for (j, &w) in self.w.iter().enumerate() {
            if self.origin + j as f64 * self.step > y + slop {
                break;
            }
            acc.add(w);
        }
        acc.value()
    }
}

/// `P[Y(t) <= y]` at several points from one sweep of convolutions.
///
/// Discrete jump laws go through the pmf table; gridded laws convolve
/// mass vectors (bias `O(step^2)` from the midpoint discretization, so
/// steps above [`MAX_GRID_STEP`] are rejected). Atom laws have no
/// additive convolution route here — put them on a grid instead.
pub fn gscpp_cdf_many(ys: &[f64], t: f64, p: &GscppParams, ctl: &SeriesControl) -> Result<Vec<f64>> {
    p.validate()?;
    check_time(t)?;
    if ys.iter().any(|y| y.is_nan()) {
        return Err(Error::domain("cdf points must not be NaN"));
    }
    let y_max = ys.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if t == 0.0 {
        return Ok(ys.iter().map(|&y| f64::from(y >= 0.0)).collect());
    }
    match &p.jumps {
        JumpLaw::Discrete { .. } => {
            if y_max > 1e7 {
                return Err(Error::domain(
                    "discrete cdf horizon too large; largest point must be at most 1e7",
                ));
            }
            let k_cap = y_max.max(0.0).floor() as usize;
            let table = gscpp_pmf_discrete_table(k_cap, t, p, ctl)?;
            let mut prefix = Vec::with_capacity(table.len());
            let mut acc = Kahan::default();
            for &w in &table {
                acc.add(w);
                prefix.push(acc.value());
            }
            Ok(ys
                .iter()
                .map(|&y| {
                    if y < 0.0 {
                        0.0
                    } else {
                        prefix[(y.floor() as usize).min(k_cap)]
                    }
                })
                .collect())
        }
        JumpLaw::Grid {
            origin,
            step,
            values,
        } => {
            if *step > MAX_GRID_STEP {
                return Err(Error::domain(format!(
                    "grid step {step} too coarse for the convolution cdf (max {MAX_GRID_STEP})"
                )));
            }
            let law = GridMasses {
                origin: *origin,
                step: *step,
                w: values.iter().map(|&v| step * v).collect(),
            };
            let weights = gspp_mass_table(t, &p.gspp, ctl)?;
            // Nonnegative support lets each power be truncated at y_max;
            // signed support keeps full length.
            let nonneg = law.origin >= 0.0;
            let cap = if nonneg && y_max.is_finite() {
                (((y_max - law.origin).max(0.0) / law.step) as usize).saturating_add(2)
            } else {
                usize::MAX
            };
            let mut cum = vec![Kahan::default(); ys.len()];
            for (c, &y) in cum.iter_mut().zip(ys) {
                if y >= 0.0 {
                    c.add(weights[0]); // m = 0: atom at zero
                }
            }
            let mut conv = law.clone();
            for (m, &wm) in weights.iter().enumerate().skip(1) {
                if m > 1 {
                    conv = conv.convolve(&law, cap);
                    if conv.w.is_empty() {
                        break;
                    }
                }
                if nonneg && conv.origin > y_max {
                    break;
                }
                for (c, &y) in cum.iter_mut().zip(ys) {
                    c.add(wm * conv.cdf_at(y));
                }
            }
            Ok(cum.iter().map(Kahan::value).collect())
        }
        JumpLaw::Atoms { .. } => Err(Error::domain(
            "additive cdf needs a discrete or gridded jump law; put atoms on a grid",
        )),
    }
}

/// `P[Y(t) <= y]`; see [`gscpp_cdf_many`].
pub fn gscpp_cdf(y: f64, t: f64, p: &GscppParams, ctl: &SeriesControl) -> Result<f64> {
    Ok(gscpp_cdf_many(core::slice::from_ref(&y), t, p, ctl)?[0])
}

/// Draws `Y(t)` via the nested compound representation: a geometric
/// count of unit-time inner counts, each arrival carrying one jump.
pub fn gscpp_sample<R: Rng + ?Sized>(t: f64, p: &GscppParams, rng: &mut R) -> Result<f64> {
    p.validate()?;
    check_time(t)?;
    let g = gcp_sample_count(t, &p.gspp.gcp, rng)?;
    let mut total = 0.0;
    for _ in 0..g {
        let k = spp_sample(1.0, &p.gspp.spp, rng)?;
        for _ in 0..k {
            total += p.jumps.sample(rng);
        }
    }
    Ok(total)
}
