//! Truncated Taylor-series (jet) arithmetic.
//!
//! A [`Jet`] of order `K` stores the Taylor coefficients
//! `c_j = g^(j)(u0) / j!` of a function around an expansion point, here
//! always `u0 = 1`. Sums, products, exponentials and reciprocals of jets
//! propagate those coefficients exactly (the first `K + 1` coefficients of
//! the result are the true Taylor coefficients of the composite function),
//! so a `K`-th derivative at the expansion point is read off a jet instead
//! of being estimated by finite differences.
//!
//! This is the workhorse of every generic pmf evaluator in the crate: the
//! probability generating functions at play are compositions of `exp`,
//! affine maps and one reciprocal, all of which are closed under jet
//! arithmetic. `P[N = k]` is `(-1)^k c_k` of the relevant composite.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

#[allow(unused_imports)]
use num_traits::Float;

/// Taylor coefficients `c_0 ..= c_K` of a scalar function at `u = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// Jet with the given coefficients; `coeffs[j] = g^(j)(1) / j!`.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least its constant term");
        Jet { c: coeffs }
    }

    /// The constant function `x`.
    pub fn constant(x: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x;
        Jet { c }
    }

    /// Truncation order `K` (highest retained derivative).
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    /// Coefficient `c_j`, zero beyond the truncation order.
    pub fn coeff(&self, j: usize) -> f64 {
        self.c.get(j).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// `j`-th derivative at the expansion point, `c_j * j!`.
    pub fn derivative(&self, j: usize) -> f64 {
        let mut fact = 1.0f64;
        for i in 1..=j {
            fact *= i as f64;
        }
        self.coeff(j) * fact
    }

    /// Coefficient-wise sum; operands must share the truncation order.
    pub fn add(&self, other: &Jet) -> Jet {
        assert_eq!(self.order(), other.order(), "jet order mismatch");
        Jet {
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Coefficient-wise scaling by `s`.
    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            c: self.c.iter().map(|a| a * s).collect(),
        }
    }

    /// Add a constant to the zeroth coefficient.
    pub fn add_constant(&self, s: f64) -> Jet {
        let mut c = self.c.clone();
        c[0] += s;
        Jet { c }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Jet) -> Jet {
        assert_eq!(self.order(), other.order(), "jet order mismatch");
        let k = self.order();
        let mut c = vec![0.0; k + 1];
        for n in 0..=k {
            let mut s = 0.0f64;
            for j in 0..=n {
                s += self.c[j] * other.c[n - j];
            }
            c[n] = s;
        }
        Jet { c }
    }

    /// `exp` of the jet via the standard ODE recurrence
    /// `n b_n = sum_{j=1}^{n} j a_j b_{n-j}` with `b_0 = exp(a_0)`.
    pub fn exp(&self) -> Jet {
        let k = self.order();
        let mut b = vec![0.0; k + 1];
        b[0] = self.c[0].exp();
        for n in 1..=k {
            let mut s = 0.0f64;
            for j in 1..=n {
                s += (j as f64) * self.c[j] * b[n - j];
            }
            b[n] = s / n as f64;
        }
        Jet { c: b }
    }

    /// Reciprocal jet via `r_n = -(1/h_0) sum_{j=1}^{n} h_j r_{n-j}`.
    ///
    /// Errors with [`Error::Domain`] when the constant term vanishes (the
    /// reciprocal has no Taylor expansion there).
    pub fn reciprocal(&self) -> Result<Jet> {
        if self.c[0] == 0.0 {
            return Err(Error::domain(
                "jet reciprocal requires a nonzero constant term",
            ));
        }
        let k = self.order();
        let inv0 = 1.0 / self.c[0];
        let mut r = vec![0.0; k + 1];
        r[0] = inv0;
        for n in 1..=k {
            let mut s = 0.0f64;
            for j in 1..=n {
                s += self.c[j] * r[n - j];
            }
            r[n] = -inv0 * s;
        }
        Ok(Jet { c: r })
    }
}
