//! One module per subcommand; each consumes the merged [`RunConfig`]
//! and renders a [`Table`](crate::output::Table).
//!
//! [`RunConfig`]: crate::config::RunConfig

pub mod moments;
pub mod pmf;
pub mod reliability;
pub mod simulate;
pub mod sweep;
pub mod validate;
