//! Combinatorial special functions: Stirling numbers of the second kind,
//! geometric polynomials, and generalized binomial coefficients.
//!
//! The geometric polynomials
//!
//! ```text
//! w_n(y) = sum_{k=0}^{n} S(n, k) k! y^k
//! ```
//!
//! turn moment sums over a geometric law into closed forms through the
//! geometric-like series identity
//!
//! ```text
//! sum_{k>=0} k^n y^k = w_n(y / (1 - y)) / (1 - y),   |y| < 1,
//! ```
//!
//! which is what the geometric-clock pmf series are built from.
//!
//! Generalized binomials are evaluated as falling-factorial products, never
//! as gamma-function quotients: `Gamma(a r + 1) / Gamma(a r + 1 - k)` hits
//! poles at non-positive integer arguments where the product form is exact.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

/// Largest `n` accepted by [`stirling2`] and [`geometric_polynomial`].
pub const MAX_N: u32 = 170;

/// Stirling number of the second kind `S(n, k)`: partitions of an
/// `n`-element set into `k` non-empty blocks.
///
/// Exact integer evaluation via the triangular recurrence
/// `S(n, k) = k S(n-1, k) + S(n-1, k-1)`. Errors with [`Error::Range`]
/// if the value overflows `u128` (first happens in row `n = 44`) or if
/// `k > n` is inverted (`k > n` simply yields 0) or `n > MAX_N`.
pub fn stirling2(n: u32, k: u32) -> Result<u128> {
    if n > MAX_N {
        return Err(Error::Range { op: "stirling2", n });
    }
    if k > n {
        return Ok(0);
    }
    if n == 0 {
        return Ok(1); // S(0,0) = 1
    }
    if k == 0 {
        return Ok(0);
    }
    // Row-by-row: row[j] = S(i, j). Only the band of entries that can
    // reach (n, k) is updated — row i needs j in [k - (n - i), min(i, k)] —
    // so near-diagonal targets like S(170, 170) = 1 do not overflow on
    // unrelated mid-row entries.
    let kk = k as usize;
    let mut row: Vec<u128> = vec![0; kk + 1];
    row[0] = 1; // S(0,0)
    for i in 1..=n {
        let hi = kk.min(i as usize);
        let lo = 1.max(kk.saturating_sub((n - i) as usize));
        // Walk downwards so row[j-1] is still the previous row's value.
        for j in (lo..=hi).rev() {
            let scaled = (j as u128)
                .checked_mul(row[j])
                .ok_or(Error::Range { op: "stirling2", n })?;
            row[j] = scaled
                .checked_add(row[j - 1])
                .ok_or(Error::Range { op: "stirling2", n })?;
        }
        row[0] = 0; // S(i, 0) = 0 for i >= 1
    }
    Ok(row[kk])
}

/// Geometric polynomial `w_n(y) = sum_k S(n, k) k! y^k`.
///
/// Evaluated through a floating-point Stirling triangle (all recurrence
/// terms are non-negative, so the triangle is computed without
/// cancellation) with compensated accumulation of the defining sum.
/// Errors with [`Error::Range`] when the result is not finite.
pub fn geometric_polynomial(n: u32, y: f64) -> Result<f64> {
    if n > MAX_N {
        return Err(Error::Range {
            op: "geometric_polynomial",
            n,
        });
    }
    let nn = n as usize;
    // f64 Stirling row for this n.
    let mut row: Vec<f64> = vec![0.0; nn + 1];
    row[0] = 1.0;
    for i in 1..=nn {
        for j in (1..=i).rev() {
            row[j] = (j as f64) * row[j] + row[j - 1];
        }
        row[0] = 0.0;
    }
    let mut acc = crate::series::Kahan::default();
    let mut kfact_yk = 1.0f64; // k! y^k, built incrementally
    for (k, s) in row.iter().enumerate() {
        if k > 0 {
            kfact_yk *= (k as f64) * y;
        }
        acc.add(s * kfact_yk);
    }
    let v = acc.value();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range {
            op: "geometric_polynomial",
            n,
        })
    }
}

/// Falling factorial `a (a-1) ... (a-k+1)`.
pub fn falling_factorial(a: f64, k: u32) -> f64 {
    let mut p = 1.0f64;
    for i in 0..k {
        p *= a - i as f64;
    }
    p
}

/// Generalized binomial coefficient `C(a, k) = a(a-1)...(a-k+1) / k!` for
/// real `a`, evaluated as a product of `k` pole-free ratios.
pub fn generalized_binomial(a: f64, k: u32) -> f64 {
    let mut p = 1.0f64;
    for i in 0..k {
        p *= (a - i as f64) / (i as f64 + 1.0);
    }
    p
}

/// Incremental generator of the scaled geometric-polynomial weights
///
/// ```text
/// u_n = rho^n w_n(y) / n!
/// ```
///
/// via `u_n = y sum_{k<n} u_k rho^{n-k} / (n-k)!`, a rescaling of
/// `w_n(y) = y sum_{k<n} C(n, k) w_k(y)`. The raw `w_n(y)` overflow `f64`
/// near `n ~ 170` even when the series terms that consume them are tiny;
/// folding the geometric factor `rho^n` and `1/n!` into the recurrence
/// keeps every intermediate on the scale of the series term itself.
pub(crate) struct ScaledGeomWeights {
    y: f64,
    rho: f64,
    /// u_0..u_n so far.
    u: Vec<f64>,
    /// rho^m / m! for m = 0..=n.
    c: Vec<f64>,
}

impl ScaledGeomWeights {
    pub(crate) fn new(y: f64, rho: f64) -> Self {
        ScaledGeomWeights {
            y,
            rho,
            u: vec![1.0],
            c: vec![1.0],
        }
    }

    /// `u_n` for the next `n`, extending the history.
    pub(crate) fn next_weight(&mut self) -> f64 {
        let n = self.u.len();
        let cm = self.c[n - 1] * self.rho / n as f64;
        self.c.push(cm);
        let mut acc = crate::series::Kahan::default();
        for (k, uk) in self.u.iter().enumerate() {
            acc.add(uk * self.c[n - k]);
        }
        let un = self.y * acc.value();
        self.u.push(un);
        un
    }
}
