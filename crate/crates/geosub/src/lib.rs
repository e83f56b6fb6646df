//! Poisson-type processes run on a geometric counting clock.
//!
//! The library evaluates and simulates three nested families of counting /
//! compound models. The base clock is the geometric counting process
//! `G_mu(t)`, a mixed Poisson process whose random rate is exponential with
//! mean `mu`; its marginal at time `t` is geometric. On top of it sit:
//!
//! * [`gspp`] — a subordinated Poisson process `N^f(G_mu(t))`, where `N^f`
//!   is a Poisson process time-changed by a Levy subordinator with Laplace
//!   exponent `f` (see [`subordinators`] for the supported exponent
//!   families and [`spp`] for the inner process);
//! * [`gscpp`] — the compound variant, summing i.i.d. jumps at the event
//!   times of `N^f(G_mu(t))`;
//! * [`gsmpp`] — the multiplicative variant, multiplying i.i.d. positive
//!   factors at those event times.
//!
//! All probability-mass, moment and distribution formulas come with
//! exact-law samplers, so every closed form in the crate can be checked
//! against Monte Carlo estimates produced by the deterministic harness in
//! [`mc`]. The [`shock`] module applies the counting law to extreme- and
//! cumulative-shock reliability models.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature for embedded use. File formats and the command-line
//! front-end live in the companion `geosub-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod gcp;
pub mod gscpp;
pub mod gsmpp;
pub mod gspp;
pub mod jet;
pub mod mc;
pub mod numerics;
pub mod pmf;
pub mod series;
pub mod shock;
pub mod spp;
pub mod subordinators;

pub use error::Error;
pub use series::SeriesControl;
pub use subordinators::SubordinatorSpec;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
