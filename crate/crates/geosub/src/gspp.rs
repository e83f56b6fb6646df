//! Subordinated Poisson processes on a geometric clock: the count
//! `X(t) = N(D(G(t)))` whose outer time change `G` is the geometric
//! counting process.
//!
//! `X(t)` is a compound of iid unit-time subordinated-Poisson counts over
//! a geometric number of summands, so its generating function is the
//! geometric pgf composed with `exp(-f(lambda(1-u)))`:
//!
//! ```text
//! E[u^{X(t)}] = 1 / (1 + mu t (1 - e^{-f(lambda (1 - u))})).
//! ```
//!
//! Three evaluation routes are provided and cross-checked:
//!
//! * the **generic jet pipeline** (exp, affine map, reciprocal), which is
//!   subtraction-free for every supported clock family — the Taylor
//!   coefficients of `f(lambda u)` alternate in sign beyond the first,
//!   so every term of the exp and reciprocal recurrences lands with the
//!   same sign and no cancellation occurs at any order;
//! * **explicit series** for the stable and tempered-stable families,
//!   built from scaled geometric polynomials, valid on an explicit
//!   parameter region and guarded against the alternating-term
//!   cancellation that sets in as the region's edge is approached;
//! * the **conditioning sum** over the geometric count, the module's
//!   brute-force oracle (and the fallback outside a series' region).
//!
//! Moments come from a two-coefficient covariance form
//! `Cov(s, t) = a s + b s t` for `s <= t`; the long-horizon correlation
//! tends to the *positive constant* [`correlation_limit`], approached at
//! rate `1/t` with coefficient [`correlation_asymptote`].

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::Error;
use crate::gcp::{gcp_pmf, gcp_sample_count, GcpParams};
use crate::numerics::{generalized_binomial, ScaledGeomWeights};
use crate::series::{Kahan, SeriesControl, STOP_RUN};
use crate::spp::{check_time, finish_pmf, spp_pmf_table_generic, spp_sample, SppParams};
use crate::subordinators::SubordinatorSpec;
use crate::Result;

/// Inner subordinated-Poisson parameters plus the geometric clock rate.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GsppParams {
    /// Poisson rate and subordinator of the inner process.
    pub spp: SppParams,
    /// Geometric counting clock.
    pub gcp: GcpParams,
}

impl GsppParams {
    pub fn validate(&self) -> Result<()> {
        self.spp.validate()?;
        self.gcp.validate()
    }
}

/// A series term is "quiet" below this magnitude; three consecutive quiet
/// rows end the row extension for the current count.
const ROW_QUIET_TOL: f64 = 1e-30;

/// Mean, variance, and the two-coefficient covariance of the count.
///
/// `cov(s, u) = cov_a * s + cov_b * s * u` for `0 <= s <= u`; the stored
/// `variance` is literally `cov(t, t)` (same expression, same order of
/// operations).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentTriple {
    /// Evaluation horizon the mean/variance refer to.
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    /// Coefficient of `s` in the covariance.
    pub cov_a: f64,
    /// Coefficient of `s t` in the covariance.
    pub cov_b: f64,
}

impl MomentTriple {
    /// `Cov(X(s), X(u))` for `0 <= s <= u`.
    pub fn cov(&self, s: f64, u: f64) -> Result<f64> {
        if !(0.0 <= s && s <= u) {
            return Err(Error::domain("covariance requires 0 <= s <= u"));
        }
        Ok(self.cov_a * s + self.cov_b * s * u)
    }

    /// `Corr(X(s), X(u))` for `0 < s <= u`.
    pub fn corr(&self, s: f64, u: f64) -> Result<f64> {
        if !(0.0 < s && s <= u) {
            return Err(Error::domain("correlation requires 0 < s <= u"));
        }
        let c = self.cov(s, u)?;
        let vs = self.cov(s, s)?;
        let vu = self.cov(u, u)?;
        Ok(c / (vs * vu).sqrt())
    }
}

/// Covariance coefficients `(a, b)` with `Cov(s,t) = a s + b s t`:
/// `a = lambda mu (lambda m2 + m1)`, `b = (lambda mu m1)^2` in terms of
/// the clock's unit-time moments.
fn cov_coeffs(p: &GsppParams) -> Result<(f64, f64)> {
    p.validate()?;
    let um = p.spp.sub.unit_moments();
    let (m1, m2) = um.require_finite("gspp_moments")?;
    let (l, m) = (p.spp.lambda, p.gcp.mu);
    Ok((l * m * (l * m2 + m1), l * l * m * m * m1 * m1))
}

/// Mean, variance and covariance coefficients at horizon `t`.
pub fn gspp_moments(t: f64, p: &GsppParams) -> Result<MomentTriple> {
    check_time(t)?;
    let (a, b) = cov_coeffs(p)?;
    let um = p.spp.sub.unit_moments();
    let (m1, _) = um.require_finite("gspp_moments")?;
    Ok(MomentTriple {
        t,
        mean: p.spp.lambda * p.gcp.mu * t * m1,
        variance: a * t + b * t * t,
        cov_a: a,
        cov_b: b,
    })
}

/// Probability generating function `E[z^{X(t)}]` for `z` in `[0, 1]`.
pub fn gspp_pgf(z: f64, t: f64, p: &GsppParams) -> Result<f64> {
    p.validate()?;
    check_time(t)?;
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain("pgf argument must lie in [0, 1]"));
    }
    let f = p.spp.sub.laplace_exponent(p.spp.lambda * (1.0 - z));
    Ok(1.0 / (1.0 + p.gcp.mu * t * (1.0 - (-f).exp())))
}

/// `P[X(t) = k]` for any clock family via the jet pipeline.
pub fn gspp_pmf_generic(k: u64, t: f64, p: &GsppParams, ctl: &SeriesControl) -> Result<f64> {
    let table = gspp_pmf_table_generic(k as usize, t, p, ctl)?;
    Ok(table[k as usize])
}

/// All of `P[X(t) = k]`, `k = 0..=k_max`, from one jet.
pub fn gspp_pmf_table_generic(
    k_max: usize,
    t: f64,
    p: &GsppParams,
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
    let mt = p.gcp.mu * t;
    let inner = p
        .spp
        .sub
        .taylor_coeffs_at(p.spp.lambda, order)
        .scale(-1.0)
        .exp(); // e^{-f(lambda u)}
    let g = inner.scale(-mt).add_constant(1.0 + mt).reciprocal()?;
    let last = g.coeff(k_max).abs();
    (0..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            finish_pmf(sign * g.coeff(k), order, last)
        })
        .collect()
}

/// Conditioning-sum oracle: `P[X(t) = k] = sum_n P[G(t) = n] P[S_n = k]`
/// where `S_n` is the inner count at integer horizon `n`.
///
/// The inner pmfs come from the (cancellation-free) jet route, so this
/// stays accurate even where the explicit series diverge; it is the
/// fallback named by the series' validity errors, and the brute-force
/// oracle the tests compare every other evaluator against.
pub fn gspp_pmf_conditioning(k: u64, t: f64, p: &GsppParams, ctl: &SeriesControl) -> Result<f64> {
    let table = gspp_pmf_table_conditioning(k as usize, t, p, ctl)?;
    Ok(table[k as usize])
}

/// Table form of [`gspp_pmf_conditioning`].
pub fn gspp_pmf_table_conditioning(
    k_max: usize,
    t: f64,
    p: &GsppParams,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    p.validate()?;
    check_time(t)?;
    if t == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    let mut acc = vec![Kahan::default(); k_max + 1];
    let mut mass = Kahan::default();
    let mut n = 0u64;
    loop {
        let w = gcp_pmf(n, t, &p.gcp);
        let inner = spp_pmf_table_generic(k_max, n as f64, &p.spp, ctl)?;
        for (a, v) in acc.iter_mut().zip(&inner) {
            a.add(w * v);
        }
        mass.add(w);
        n += 1;
        // Remaining geometric mass bounds the truncation error per entry.
        if 1.0 - mass.value() < 1e-13 {
            break;
        }
        if n as usize > ctl.max_terms {
            return Err(Error::Convergence {
                terms: ctl.max_terms,
                partial: mass.value(),
                last_term: w,
                tol: 1e-13,
            });
        }
    }
    acc.into_iter()
        .map(|a| finish_pmf(a.value(), n as usize, 0.0))
        .collect()
}

/// Explicit-series engine shared by the stable (`nu = 0`) and
/// tempered-stable families.
///
/// Conditioning on the geometric count and swapping sums turns the pmf
/// into a single series over scaled geometric polynomials:
///
/// ```text
/// P[X(t) = k] = ((-1)^k / den) (lambda/(lambda+nu))^k
///               sum_m C(alpha m, k) (-q)^m u_m,
/// den = 1 + mu t (1 - e^{nu^alpha}),   y = mu t e^{nu^alpha} / den,
/// q   = (lambda+nu)^alpha / rho,       rho = ln(1 + 1/y),
/// ```
///
/// with `u_m = rho^m w_m(y)/m!` the scaled geometric-polynomial weights.
/// Three explicit guards delimit the route: the geometric resummation
/// needs `mu t e^{nu^alpha} < 1 + mu t` ([`Error::ValidityRegion`]); the
/// series converges only for `q < 1` ([`Error::SeriesOverflow`] with
/// `terms = 0`); and even inside the convergence region the terms with
/// `alpha m > k` alternate strictly and peak near `(alpha/ln(1/q))^k`
/// times the result, so the evaluator tracks the accumulated term
/// magnitude and refuses (again [`Error::SeriesOverflow`], with the
/// cancellation factor as `magnitude`) once round-off can no longer
/// certify ~1e-11 relative accuracy — the jet route is exact there.
/// Binomials are updated incrementally in `k`, so a table costs
/// `O(k_max * rows)`; the row budget scales with `k_max` because the
/// series length grows linearly with the count.
pub(crate) fn geometric_series_table(
    k_max: usize,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda must be positive and finite"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1)"));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain("nu must be finite and nonnegative"));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain("mu must be positive and finite"));
    }
    check_time(t)?;
    if t == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }

    let mt = mu * t;
    let e_nu = nu.powf(alpha).exp();
    let den = 1.0 + mt * (1.0 - e_nu);
    if den <= 0.0 {
        return Err(Error::ValidityRegion {
            detail: format!(
                "mu t e^(nu^alpha) = {:.6e} must stay below 1 + mu t = {:.6e}",
                mt * e_nu,
                1.0 + mt
            ),
            fallback: "gspp_pmf_conditioning",
        });
    }
    let y = mt * e_nu / den;
    let rho = (1.0 / y).ln_1p();
    let q = (lambda + nu).powf(alpha) / rho;
    if q >= 1.0 {
        // Terms grow like q^m: divergent series, no finite partial sum
        // is meaningful.
        return Err(Error::SeriesOverflow {
            terms: 0,
            magnitude: q,
        });
    }
    let ratio = lambda / (lambda + nu);
    let row_budget = ctl.max_terms.max(2 * k_max + 64);

    // Row m holds C(alpha m, k) (updated across k) and (-q)^m u_m.
    struct Row {
        c: f64,
        v: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut gw = ScaledGeomWeights::new(y, rho);
    let mut q_pow = 1.0f64; // (-q)^m for the last appended row
    let mut ratio_pow = 1.0f64;
    let mut out = Vec::with_capacity(k_max + 1);

    for k in 0..=k_max {
        if k > 0 {
            let kf = k as f64;
            for (m, row) in rows.iter_mut().enumerate() {
                row.c *= (alpha * m as f64 - (kf - 1.0)) / kf;
            }
            ratio_pow *= ratio;
        }
        // Extend rows until the trailing STOP_RUN are quiet at this k.
        let mut quiet = rows
            .iter()
            .rev()
            .take_while(|r| (r.c * r.v).abs() < ROW_QUIET_TOL)
            .take(STOP_RUN)
            .count();
        while quiet < STOP_RUN {
            if rows.len() >= row_budget {
                return Err(Error::Convergence {
                    terms: rows.len(),
                    partial: f64::NAN,
                    last_term: rows.last().map(|r| (r.c * r.v).abs()).unwrap_or(0.0),
                    tol: ROW_QUIET_TOL,
                });
            }
            let m = rows.len();
            let v = if m == 0 {
                1.0
            } else {
                q_pow *= -q;
                q_pow * gw.next_weight()
            };
            let c = generalized_binomial(alpha * m as f64, k as u32);
            if (c * v).abs() < ROW_QUIET_TOL {
                quiet += 1;
            } else {
                quiet = 0;
            }
            rows.push(Row { c, v });
        }
        let mut acc = Kahan::default();
        let mut sum_abs = 0.0f64;
        for row in &rows {
            let term = row.c * row.v;
            acc.add(term);
            sum_abs += term.abs();
        }
        let sum = acc.value();
        // Alternating-cancellation guard: the compensated sum is good to
        // a few eps of the accumulated magnitude; refuse once that can
        // no longer certify the result to ~1e-11 relative.
        let err_est = 4.0 * f64::EPSILON * sum_abs;
        if err_est > 1e-11 * sum.abs() {
            return Err(Error::SeriesOverflow {
                terms: rows.len(),
                magnitude: sum_abs / sum.abs().max(f64::MIN_POSITIVE),
            });
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let value = sign * ratio_pow * sum / den;
        out.push(finish_pmf(value, rows.len(), ROW_QUIET_TOL)?);
    }
    Ok(out)
}

fn sfpp_params(lambda: f64, alpha: f64, mu: f64) -> GsppParams {
    GsppParams {
        spp: SppParams {
            lambda,
            sub: SubordinatorSpec::Stable { alpha },
        },
        gcp: GcpParams { mu },
    }
}

pub(crate) fn tsfpp_params(lambda: f64, alpha: f64, nu: f64, mu: f64) -> GsppParams {
    GsppParams {
        spp: SppParams {
            lambda,
            sub: if nu == 0.0 {
                SubordinatorSpec::Stable { alpha }
            } else {
                SubordinatorSpec::TemperedStable { alpha, nu }
            },
        },
        gcp: GcpParams { mu },
    }
}

/// Strict space-fractional series for the stable clock; errors with
/// [`Error::SeriesOverflow`] where the series diverges
/// (`lambda^alpha >= ln(1 + 1/(mu t))`, reported with `terms = 0`) or
/// where alternating cancellation exhausts f64 precision (`terms > 0`,
/// `magnitude` = cancellation factor).
pub fn gspp_pmf_sfpp_series(
    k: u64,
    t: f64,
    lambda: f64,
    alpha: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    let table = geometric_series_table(k as usize, t, lambda, alpha, 0.0, mu, ctl)?;
    Ok(table[k as usize])
}

/// `P[X(t) = k]` for the stable clock: the explicit series where it
/// converges *and* retains full f64 accuracy, the generic jet route
/// otherwise.
pub fn gspp_pmf_sfpp(
    k: u64,
    t: f64,
    lambda: f64,
    alpha: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    match gspp_pmf_sfpp_series(k, t, lambda, alpha, mu, ctl) {
        Err(Error::SeriesOverflow { .. }) => {
            gspp_pmf_generic(k, t, &sfpp_params(lambda, alpha, mu), ctl)
        }
        other => other,
    }
}

/// Table variant of [`gspp_pmf_sfpp`] with the same fallback.
pub fn gspp_pmf_sfpp_table(
    k_max: usize,
    t: f64,
    lambda: f64,
    alpha: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    match geometric_series_table(k_max, t, lambda, alpha, 0.0, mu, ctl) {
        Err(Error::SeriesOverflow { .. }) => {
            gspp_pmf_table_generic(k_max, t, &sfpp_params(lambda, alpha, mu), ctl)
        }
        other => other,
    }
}

/// Strict tempered series; errors with [`Error::ValidityRegion`] when the
/// geometric resummation fails (`mu t e^{nu^alpha} >= 1 + mu t`) and with
/// [`Error::SeriesOverflow`] when the series diverges.
pub fn gspp_pmf_tsfpp_series(
    k: u64,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    let table = geometric_series_table(k as usize, t, lambda, alpha, nu, mu, ctl)?;
    Ok(table[k as usize])
}

/// `P[X(t) = k]` for the tempered-stable clock: the explicit series on
/// its validity region, the conditioning sum outside it.
pub fn gspp_pmf_tsfpp(
    k: u64,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    match gspp_pmf_tsfpp_series(k, t, lambda, alpha, nu, mu, ctl) {
        Err(Error::ValidityRegion { .. }) | Err(Error::SeriesOverflow { .. }) => {
            gspp_pmf_conditioning(k, t, &tsfpp_params(lambda, alpha, nu, mu), ctl)
        }
        other => other,
    }
}

/// Table variant of [`gspp_pmf_tsfpp`] with the same fallback (via the
/// generic jet table, which equals the conditioning sum in closed form).
pub fn gspp_pmf_tsfpp_table(
    k_max: usize,
    t: f64,
    lambda: f64,
    alpha: f64,
    nu: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    match geometric_series_table(k_max, t, lambda, alpha, nu, mu, ctl) {
        Err(Error::ValidityRegion { .. }) | Err(Error::SeriesOverflow { .. }) => {
            gspp_pmf_table_generic(k_max, t, &tsfpp_params(lambda, alpha, nu, mu), ctl)
        }
        other => other,
    }
}

/// Draws `X(t)` via the compound representation: a geometric count of
/// iid unit-time inner counts.
pub fn gspp_sample<R: Rng + ?Sized>(t: f64, p: &GsppParams, rng: &mut R) -> Result<u64> {
    p.validate()?;
    check_time(t)?;
    let g = gcp_sample_count(t, &p.gcp, rng)?;
    let mut total = 0u64;
    for _ in 0..g {
        total += spp_sample(1.0, &p.spp, rng)?;
    }
    Ok(total)
}

/// Density of the first time the stable-clock count reaches `k`, via a
/// 5-point central stencil on the survival function
/// `P[T_k > s] = sum_{j<k} P[X(s) = j]`.
///
/// The step adapts to `s` (`h = min(1e-3 max(s, 0.1), s/4)`). Values
/// below `-1e-7` raise a convergence diagnostic; smaller negatives (pure
/// round-off) clamp to zero.
pub fn first_passage_density(
    k: u64,
    s: f64,
    p: &GsppParams,
    ctl: &SeriesControl,
) -> Result<f64> {
    p.validate()?;
    let alpha = match p.spp.sub {
        SubordinatorSpec::Stable { alpha } => alpha,
        _ => {
            return Err(Error::domain(
                "first_passage_density is defined for the stable clock family",
            ))
        }
    };
    if k == 0 {
        return Err(Error::domain("first passage requires k >= 1"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("s must be positive and finite"));
    }
    let (lambda, mu) = (p.spp.lambda, p.gcp.mu);
    let survival = |x: f64| -> Result<f64> {
        let table = gspp_pmf_sfpp_table((k - 1) as usize, x, lambda, alpha, mu, ctl)?;
        let mut acc = Kahan::default();
        for v in table {
            acc.add(v);
        }
        Ok(acc.value())
    };
    let h = (1e-3 * s.max(0.1)).min(s / 4.0);
    let w_m2 = survival(s - 2.0 * h)?;
    let w_m1 = survival(s - h)?;
    let w_p1 = survival(s + h)?;
    let w_p2 = survival(s + 2.0 * h)?;
    // density = -d/ds survival.
    let d = -(w_m2 - 8.0 * w_m1 + 8.0 * w_p1 - w_p2) / (12.0 * h);
    if d < -1e-7 {
        return Err(Error::Convergence {
            terms: 4,
            partial: d,
            last_term: h,
            tol: 1e-7,
        });
    }
    Ok(d.max(0.0))
}

/// Closed-form first-passage density for the stable clock, kept as an
/// independent comparison route for [`first_passage_density`].
///
/// Termwise `s`-differentiation of the pmf series needs the derivative
/// of the geometric polynomials; rather than differentiating the
/// polynomial sum termwise (whose naive index form degenerates at the
/// zeroth power), the derivative is taken through the exact identity
/// `w_r'(y) = (w_{r+1}(y)/y - w_r(y)) / (1 + y)` in the same scaled
/// weights used by the pmf series, so the route stays overflow-free.
/// Valid where the pmf series converges (`lambda^alpha < ln(1+1/(mu s))`);
/// diverges with [`Error::SeriesOverflow`] otherwise.
pub fn first_passage_closed_sfpp(
    k: u64,
    s: f64,
    lambda: f64,
    alpha: f64,
    mu: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("first passage requires k >= 1"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda must be positive and finite"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1)"));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain("mu must be positive and finite"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("s must be positive and finite"));
    }
    let y = mu * s;
    let rho = (1.0 / y).ln_1p();
    let q = lambda.powf(alpha) / rho;
    if q >= 1.0 {
        return Err(Error::SeriesOverflow {
            terms: 0,
            magnitude: q,
        });
    }
    // sc_r = sum_{j<k} (-1)^j C(alpha r, j).
    let sc = |r: usize| -> f64 {
        let a = alpha * r as f64;
        let mut term = 1.0f64; // C(a, 0)
        let mut acc = 0.0f64;
        for j in 0..k {
            if j > 0 {
                term *= (a - (j as f64 - 1.0)) / j as f64;
            }
            acc += if j % 2 == 0 { term } else { -term };
        }
        acc
    };

    let mut gw = ScaledGeomWeights::new(y, rho);
    let mut u_next = gw.next_weight(); // u_1
    let mut q_pow = 1.0f64;
    let mut acc = Kahan::default();
    let mut quiet = 0usize;
    for r in 1..=ctl.max_terms {
        q_pow *= -q;
        let u_r = u_next;
        u_next = gw.next_weight();
        // w_r'(y) in scaled form via w_r' = (w_{r+1}/y - w_r)/(1+y).
        let w_deriv_scaled = (u_next * (r as f64 + 1.0) / (rho * y) - u_r) / (1.0 + y);
        let term = q_pow * sc(r) * w_deriv_scaled;
        acc.add(term);
        if term.abs() < ctl.abs_tol {
            quiet += 1;
            if quiet >= STOP_RUN {
                return Ok(-mu * acc.value());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Convergence {
        terms: ctl.max_terms,
        partial: -mu * acc.value(),
        last_term: 0.0,
        tol: ctl.abs_tol,
    })
}

/// Index of dispersion `Var/E` for the tempered-stable clock:
/// `I(t) = 1 + lambda (1-alpha)/nu + lambda alpha nu^{alpha-1} (1 + mu t)`.
///
/// Always exceeds 1: the count is overdispersed at every horizon.
pub fn dispersion_index(t: f64, lambda: f64, alpha: f64, nu: f64, mu: f64) -> Result<f64> {
    let p = tsfpp_params(lambda, alpha, nu, mu);
    if nu == 0.0 {
        return Err(Error::domain("dispersion index requires nu > 0"));
    }
    p.validate()?;
    check_time(t)?;
    Ok(1.0 + lambda * (1.0 - alpha) / nu + lambda * alpha * nu.powf(alpha - 1.0) * (1.0 + mu * t))
}

/// True long-horizon limit of `Corr(X(s), X(t))` as `t -> infinity`,
/// namely `sqrt(s b / (a + b s))` — a *positive constant*, not a decaying
/// function: the geometric clock's mixing random variable correlates the
/// process across all horizons.
pub fn correlation_limit(s: f64, p: &GsppParams) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("s must be positive and finite"));
    }
    let (a, b) = cov_coeffs(p)?;
    Ok((s * b / (a + b * s)).sqrt())
}

/// First-order coefficient of the approach to [`correlation_limit`]:
///
/// ```text
/// Corr(X(s), X(t)) = limit + asymptote / (2 t) + O(t^{-2}),
/// ```
///
/// i.e. `asymptote = 2 lim t (Corr - limit) = limit * a / b`. This is the
/// natural finite constant attached to the correlation's large-`t`
/// behaviour; `Corr * t` itself diverges linearly because the limit is
/// positive.
pub fn correlation_asymptote(s: f64, p: &GsppParams) -> Result<f64> {
    let (a, b) = cov_coeffs(p)?;
    Ok(correlation_limit(s, p)? * a / b)
}

/// [`correlation_limit`] for the identity clock `f(s) = s` (the plain
/// Poisson process on the geometric clock), where `m1 = m2 = 1`.
pub fn correlation_limit_poisson(s: f64, lambda: f64, mu: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("s must be positive and finite"));
    }
    if !(lambda > 0.0 && lambda.is_finite() && mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain("lambda and mu must be positive and finite"));
    }
    let a = lambda * mu * (lambda + 1.0);
    let b = lambda * lambda * mu * mu;
    Ok((s * b / (a + b * s)).sqrt())
}

/// [`correlation_asymptote`] for the identity clock `f(s) = s`.
pub fn correlation_asymptote_poisson(s: f64, lambda: f64, mu: f64) -> Result<f64> {
    let a = lambda * mu * (lambda + 1.0);
    let b = lambda * lambda * mu * mu;
    Ok(correlation_limit_poisson(s, lambda, mu)? * a / b)
}
