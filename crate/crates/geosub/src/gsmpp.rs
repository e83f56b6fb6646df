//! Multiplicative counterpart of the compound process: each arrival of
//! the geometric-clock count multiplies a running product by an iid
//! strictly positive factor, `Y(t) = prod_{i <= X(t)} X_i`, with `Y = 1`
//! until the first arrival.
//!
//! Everything reduces to the count law again: `P[Y(t) <= y] =
//! P[X(t) = 0] 1{y >= 1} + sum_{m >= 1} P[X(t) = m] P[V_m <= y]` where
//! `V_m` is a product of `m` iid factors, and the Mellin transform
//! `E[Y(t)^{beta-1}]` is the count's generating function evaluated at
//! `E[X^{beta-1}]`. Atom-supported factors get the exact product law
//! (with value merging); gridded factors move to log space where the
//! product is an ordinary convolution, reusing the additive machinery.
//! The generating-function route is certified only on `E[X^{beta-1}]
//! <= 1`; larger arguments are refused rather than extrapolated.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gcp::GcpParams;
use crate::gscpp::{gspp_mass_table, mass_table_until, GridMasses, JumpLaw};
use crate::gspp::{
    geometric_series_table, gspp_pgf, gspp_sample, tsfpp_params, GsppParams,
};
use crate::series::{Kahan, SeriesControl};
use crate::spp::check_time;
use crate::Result;

/// Largest atom count the exact product law may reach before the grid
/// route becomes mandatory.
const PRODUCT_CAP: usize = 1 << 18;

/// Multiplicative process: geometric-clock count plus a factor law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsmppParams {
    /// Law of the driving count.
    pub gspp: GsppParams,
    /// Law of one multiplicative factor; support must be strictly
    /// positive.
    pub factors: JumpLaw,
}

impl GsmppParams {
    pub fn validate(&self) -> Result<()> {
        self.gspp.validate()?;
        self.factors.validate()?;
        if !self.factors.strictly_positive() {
            return Err(Error::domain(
                "multiplicative factors must have strictly positive support",
            ));
        }
        Ok(())
    }
}

/// `P[Y(t) <= y]` at several points from one pass over the count law.
pub fn gsmpp_cdf_many(ys: &[f64], t: f64, p: &GsmppParams, ctl: &SeriesControl) -> Result<Vec<f64>> {
    p.validate()?;
    check_time(t)?;
    if ys.iter().any(|y| y.is_nan()) {
        return Err(Error::domain("cdf points must not be NaN"));
    }
    if t == 0.0 {
        return Ok(ys.iter().map(|&y| f64::from(y >= 1.0)).collect());
    }
    let weights = gspp_mass_table(t, &p.gspp, ctl)?;
    cdf_many_with_weights(ys, &weights, &p.factors)
}

/// `P[Y(t) <= y]`; see [`gsmpp_cdf_many`].
pub fn gsmpp_cdf(y: f64, t: f64, p: &GsmppParams, ctl: &SeriesControl) -> Result<f64> {
    Ok(gsmpp_cdf_many(core::slice::from_ref(&y), t, p, ctl)?[0])
}

/// Mixes `P[V_m <= y]` over the given count weights.
fn cdf_many_with_weights(ys: &[f64], weights: &[f64], factors: &JumpLaw) -> Result<Vec<f64>> {
    let atoms: Vec<(f64, f64)> = factors
        .mass_pairs()
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .collect();
    match factors {
        JumpLaw::Discrete { .. } | JumpLaw::Atoms { .. } => cdf_by_products(ys, weights, &atoms),
        JumpLaw::Grid { .. } => {
            if atoms.len() == 1 {
                // A one-node grid is an atom; the exact route is free.
                return cdf_by_products(ys, weights, &atoms);
            }
            cdf_by_log_grid(ys, weights, &atoms)
        }
    }
}

/// Exact product-law route for finitely many atoms.
fn cdf_by_products(ys: &[f64], weights: &[f64], atoms: &[(f64, f64)]) -> Result<Vec<f64>> {
    let mut cum = vec![Kahan::default(); ys.len()];
    for (c, &y) in cum.iter_mut().zip(ys) {
        if y >= 1.0 {
            c.add(weights[0]); // empty product
        }
    }
    let mut dist = vec![(1.0f64, 1.0f64)];
    for &wm in weights.iter().skip(1) {
        dist = product_step(&dist, atoms)?;
        for (c, &y) in cum.iter_mut().zip(ys) {
            c.add(wm * cdf_of_atoms(&dist, y));
        }
    }
    Ok(cum.iter().map(Kahan::value).collect())
}

/// One more factor on an atom-supported product law, merging values that
/// agree to relative `1e-12`.
fn product_step(dist: &[(f64, f64)], atoms: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut raw = Vec::with_capacity(dist.len() * atoms.len());
    for &(v, pv) in dist {
        for &(a, wa) in atoms {
            raw.push((v * a, pv * wa));
        }
    }
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("product values are finite"));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
    for (v, w) in raw {
        match merged.last_mut() {
            Some(last) if v - last.0 <= 1e-12 * v => last.1 += w,
            _ => merged.push((v, w)),
        }
    }
    if merged.len() > PRODUCT_CAP {
        return Err(Error::domain(
            "product support too rich for the exact route; use a gridded factor law",
        ));
    }
    Ok(merged)
}

/// Mass at or below `y` in a sorted atom list.
fn cdf_of_atoms(dist: &[(f64, f64)], y: f64) -> f64 {
    let bound = y + 1e-12 * y.abs();
    let mut acc = Kahan::default();
    for &(v, w) in dist {
        if v > bound {
            break;
        }
        acc.add(w);
    }
    acc.value()
}

/// Log-space route for gridded factors: masses are scattered onto a
/// uniform grid in `u = ln x` (linear cloud-in-cell split, so the law's
/// total mass and log-mean are preserved), products become sums, and the
/// additive convolution machinery takes over. Evaluation happens at
/// `ln y`; `y <= 0` collects nothing.
fn cdf_by_log_grid(ys: &[f64], weights: &[f64], atoms: &[(f64, f64)]) -> Result<Vec<f64>> {
    let (u_min, u_max) = atoms.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &(x, _)| {
        let u = x.ln();
        (lo.min(u), hi.max(u))
    });
    // Resolve the finest local node spacing of the source grid,
    // `step / x_max`, so the resampling bias stays far below every
    // tolerance used downstream.
    let x_max = atoms.iter().fold(0.0f64, |m, &(x, _)| m.max(x));
    let min_gap = atoms
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::MAX, f64::min);
    let h_target = (min_gap / x_max).max(1e-6);
    let n_u = (((u_max - u_min) / h_target).ceil() as usize + 2).max(8);
    let h_u = (u_max - u_min) / (n_u - 1) as f64;
    let mut w_log = vec![0.0f64; n_u];
    for &(x, w) in atoms {
        let pos = (x.ln() - u_min) / h_u;
        let j = (pos.floor() as usize).min(n_u - 2);
        let frac = pos - j as f64;
        w_log[j] += w * (1.0 - frac);
        w_log[j + 1] += w * frac;
    }
    let law = GridMasses {
        origin: u_min,
        step: h_u,
        w: w_log,
    };

    let ln_ys: Vec<f64> = ys
        .iter()
        .map(|&y| if y > 0.0 { y.ln() } else { f64::NEG_INFINITY })
        .collect();
    let ln_y_max = ln_ys.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let nonneg = law.origin >= 0.0;
    let cap = if nonneg && ln_y_max.is_finite() {
        (((ln_y_max - law.origin).max(0.0) / law.step) as usize).saturating_add(2)
    } else {
        usize::MAX
    };

    let mut cum = vec![Kahan::default(); ys.len()];
    for (c, &y) in cum.iter_mut().zip(ys) {
        if y >= 1.0 {
            c.add(weights[0]);
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
        if nonneg && conv.origin > ln_y_max {
            break;
        }
        for (c, &u) in cum.iter_mut().zip(&ln_ys) {
            c.add(wm * conv.cdf_at(u));
        }
    }
    Ok(cum.iter().map(Kahan::value).collect())
}

/// Mellin transform `E[Y(t)^{beta-1}]` in closed form: the count's
/// generating function at `x = E[X^{beta-1}]`.
///
/// Certified only for `x <= 1` (factor laws pulled toward values above 1
/// push `x` past 1, where the generating function's closed form leaves
/// its domain); larger arguments return [`Error::ValidityRegion`].
pub fn gsmpp_mellin(beta: f64, t: f64, p: &GsmppParams) -> Result<f64> {
    p.validate()?;
    check_time(t)?;
    let x = p.factors.mellin(beta)?;
    if x > 1.0 {
        return Err(Error::ValidityRegion {
            detail: format!("mellin argument E[X^(beta-1)] = {x} exceeds 1"),
            fallback: "gsmpp_cdf",
        });
    }
    gspp_pgf(x, t, &p.gspp)
}

/// Conditioning cross-check of [`gsmpp_mellin`]: `sum_m P[X(t) = m] x^m`
/// with the count weights truncated by captured mass (a bound that is
/// only valid for `x <= 1`, so the same strip is enforced).
pub fn gsmpp_mellin_series(beta: f64, t: f64, p: &GsmppParams, ctl: &SeriesControl) -> Result<f64> {
    p.validate()?;
    check_time(t)?;
    let x = p.factors.mellin(beta)?;
    if x > 1.0 {
        return Err(Error::ValidityRegion {
            detail: format!("mellin argument E[X^(beta-1)] = {x} exceeds 1"),
            fallback: "gsmpp_cdf",
        });
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let weights = gspp_mass_table(t, &p.gspp, ctl)?;
    let mut acc = Kahan::default();
    let mut xm = 1.0;
    for &w in &weights {
        acc.add(w * xm);
        xm *= x;
    }
    Ok(acc.value())
}

/// `E[Y(t)]`, the Mellin transform at order 2.
pub fn gsmpp_mean(t: f64, p: &GsmppParams) -> Result<f64> {
    gsmpp_mellin(2.0, t, p)
}

/// `P[Y(t) = 1]` for the tempered-stable clock, in closed form:
/// `1 / (1 + mu t (1 - e^{nu^alpha - (lambda + nu)^alpha}))`. This is the
/// count's probability of zero, so it equals the plain pmf at 0; `nu = 0`
/// gives the stable-clock special case.
pub fn gsmpp_atom_at_one(t: f64, lambda: f64, alpha: f64, nu: f64, mu: f64) -> Result<f64> {
    let sub = if nu == 0.0 {
        crate::subordinators::SubordinatorSpec::Stable { alpha }
    } else {
        crate::subordinators::SubordinatorSpec::TemperedStable { alpha, nu }
    };
    sub.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda must be positive and finite"));
    }
    GcpParams { mu }.validate()?;
    check_time(t)?;
    let fe = sub.laplace_exponent(lambda); // (lambda + nu)^alpha - nu^alpha
    Ok(1.0 / (1.0 + mu * t * (1.0 - (-fe).exp())))
}

/// Strict tempered-clock cdf: count weights from the explicit
/// geometric-resummation series, surfacing [`Error::ValidityRegion`]
/// outside `mu t e^{nu^alpha} < 1 + mu t` and [`Error::SeriesOverflow`]
/// where the series cannot certify full precision.
pub fn gsmpp_tempered_cdf_series(
    y: f64,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    mu: f64,
    factors: &JumpLaw,
    ctl: &SeriesControl,
) -> Result<f64> {
    factors.validate()?;
    if !factors.strictly_positive() {
        return Err(Error::domain(
            "multiplicative factors must have strictly positive support",
        ));
    }
    check_time(t)?;
    if t == 0.0 {
        return Ok(f64::from(y >= 1.0));
    }
    let weights = mass_table_until(ctl, |m_max| {
        geometric_series_table(m_max, t, lambda, alpha, nu, mu, ctl)
    })?;
    Ok(cdf_many_with_weights(core::slice::from_ref(&y), &weights, factors)?[0])
}

/// Tempered-clock cdf: the explicit series where it is valid and fully
/// accurate, the generic jet-weight route otherwise.
pub fn gsmpp_tempered_cdf(
    y: f64,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    mu: f64,
    factors: &JumpLaw,
    ctl: &SeriesControl,
) -> Result<f64> {
    match gsmpp_tempered_cdf_series(y, t, lambda, alpha, nu, mu, factors, ctl) {
        Err(Error::ValidityRegion { .. }) | Err(Error::SeriesOverflow { .. }) => {
            let p = GsmppParams {
                gspp: tsfpp_params(lambda, alpha, nu, mu),
                factors: factors.clone(),
            };
            gsmpp_cdf(y, t, &p, ctl)
        }
        other => other,
    }
}

/// Draws `Y(t)`: the count via its compound representation, then the
/// product of that many factors, accumulated in log space.
pub fn gsmpp_sample<R: Rng + ?Sized>(t: f64, p: &GsmppParams, rng: &mut R) -> Result<f64> {
    p.validate()?;
    let n = gspp_sample(t, &p.gspp, rng)?;
    let mut log_y = 0.0;
    for _ in 0..n {
        log_y += p.factors.sample(rng).ln();
    }
    Ok(log_y.exp())
}
