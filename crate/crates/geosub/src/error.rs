//! Error type shared by all modules.

use alloc::string::String;

/// Everything that can go wrong while evaluating or sampling a law.
///
/// Series failures carry enough state (partial sum, tail estimate, term
/// count) for a caller to decide whether the partial answer is usable;
/// validity-region failures name the alternative evaluation route.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact-integer or floating-point result left the representable range.
    #[error("range error in {op}: n = {n} overflows the representable range")]
    Range { op: &'static str, n: u32 },

    /// A series did not meet the tolerance within the term budget.
    #[error(
        "series did not converge after {terms} terms (partial sum {partial:e}, \
         last term {last_term:e}, tolerance {tol:e})"
    )]
    Convergence {
        terms: usize,
        partial: f64,
        last_term: f64,
        tol: f64,
    },

    /// Series terms overflowed before convergence; the generic jet route
    /// has no such restriction and should be used instead.
    #[error(
        "series terms overflowed at term {terms} (magnitude {magnitude:e}); \
         use the generic jet evaluator for these parameters"
    )]
    SeriesOverflow { terms: usize, magnitude: f64 },

    /// Parameters violate a closed-form validity region.
    #[error("outside validity region: {detail}; fall back to {fallback}")]
    ValidityRegion {
        detail: String,
        fallback: &'static str,
    },

    /// A required subordinator moment is non-finite (stable-law components).
    #[error("non-finite subordinator moment: {0}")]
    NonFiniteMoment(&'static str),

    /// A rejection sampler exceeded its iteration guard.
    #[error("sampler degenerate: {0}")]
    SamplerDegenerate(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
