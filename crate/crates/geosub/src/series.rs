//! Adaptive series summation with compensated accumulation.
//!
//! Every closed-form series in the crate runs through [`sum_series`] so
//! that truncation policy, overflow guards and diagnostics are uniform:
//!
//! * terms are accumulated with Kahan compensation (optional but on by
//!   default) so alternating series lose as little as possible;
//! * summation stops once [`STOP_RUN`] consecutive terms fall below the
//!   absolute tolerance — a single small term of an alternating series is
//!   not evidence of convergence;
//! * any term whose magnitude exceeds [`TERM_OVERFLOW_GUARD`] aborts with
//!   [`Error::SeriesOverflow`] instead of polluting the sum with infinities.

use crate::error::Error;
use crate::Result;

/// Consecutive sub-tolerance terms required before a series is accepted.
pub const STOP_RUN: usize = 3;

/// Term magnitude at which a series is declared divergent for doubles.
pub const TERM_OVERFLOW_GUARD: f64 = 1e280;

/// Truncation and accumulation policy for series evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute tolerance on individual terms.
    pub abs_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
    /// Compensated (Kahan) accumulation toggle.
    pub kahan: bool,
    /// Truncation order for jet-based evaluators; `None` selects
    /// `max(k_requested, 32)`.
    pub jet_order: Option<usize>,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            abs_tol: 1e-12,
            max_terms: 10_000,
            kahan: true,
            jet_order: None,
        }
    }
}

impl SeriesControl {
    /// Jet truncation order for a pmf request up to index `k`.
    pub(crate) fn jet_order_for(&self, k: usize) -> usize {
        self.jet_order.unwrap_or_else(|| k.max(32))
    }
}

/// Compensated accumulator (Kahan–Babuska).
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Convergence record attached to series results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// Terms consumed.
    pub terms: usize,
    /// Largest term magnitude seen (cancellation indicator).
    pub max_term: f64,
    /// Magnitude of the last term added.
    pub last_term: f64,
}

impl Convergence {
    /// Crude bound on accumulated round-off: one ulp per term of the
    /// largest intermediate magnitude.
    pub fn roundoff_estimate(&self) -> f64 {
        self.max_term * (self.terms as f64) * f64::EPSILON
    }
}

/// Sum `term(r)` for `r = 0, 1, ...` until [`STOP_RUN`] consecutive terms
/// drop below `ctl.abs_tol`, the budget runs out, or a term overflows.
pub fn sum_series(
    ctl: &SeriesControl,
    mut term: impl FnMut(usize) -> f64,
) -> Result<(f64, Convergence)> {
    let mut kahan = Kahan::default();
    let mut naive = 0.0f64;
    let mut max_term = 0.0f64;
    let mut last = 0.0f64;
    let mut quiet_run = 0usize;

    for r in 0..ctl.max_terms {
        let t = term(r);
        last = t;
        let m = t.abs();
        if !m.is_finite() || m > TERM_OVERFLOW_GUARD {
            return Err(Error::SeriesOverflow {
                terms: r,
                magnitude: m,
            });
        }
        if m > max_term {
            max_term = m;
        }
        if ctl.kahan {
            kahan.add(t);
        } else {
            naive += t;
        }
        if m < ctl.abs_tol {
            quiet_run += 1;
            if quiet_run >= STOP_RUN {
                let value = if ctl.kahan { kahan.value() } else { naive };
                return Ok((
                    value,
                    Convergence {
                        terms: r + 1,
                        max_term,
                        last_term: m,
                    },
                ));
            }
        } else {
            quiet_run = 0;
        }
    }

    Err(Error::Convergence {
        terms: ctl.max_terms,
        partial: if ctl.kahan { kahan.value() } else { naive },
        last_term: last.abs(),
        tol: ctl.abs_tol,
    })
}
