//! `moments`: mean, variance and covariance-with-the-first-grid-time
//! over the evaluation grid.

use geosub::gcp::{gcp_cov, gcp_moments};
use geosub::gscpp::{gscpp_moments, GscppParams};
use geosub::gspp::gspp_moments;
use geosub::spp::spp_moments;

use crate::config::{Process, RunConfig};
use crate::error::CliError;
use crate::output::{deliver, Cell, Table};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let times = cfg.times()?;
    let t0 = times[0];

    let mut table = Table::new(&["t", "mean", "variance", "cov_with_t0"]);
    for &t in &times {
        let (s, u) = (t0.min(t), t0.max(t));
        let (mean, variance, cov) = match cfg.require_process()? {
            Process::Gcp => {
                let p = cfg.gcp_params()?;
                let (mean, var) = gcp_moments(t, &p);
                (mean, var, gcp_cov(s, u, &p)?)
            }
            Process::Spp => {
                // Independent stationary increments: Cov(s, u) = Var(s).
                let p = cfg.spp_params()?;
                let (mean, var) = spp_moments(t, &p)?;
                (mean, var, spp_moments(s, &p)?.1)
            }
            Process::Gspp => {
                let m = gspp_moments(t, &cfg.gspp_params()?)?;
                (m.mean, m.variance, m.cov(s, u)?)
            }
            Process::Gscpp => {
                let p = GscppParams {
                    gspp: cfg.gspp_params()?,
                    jumps: cfg.require_jumps()?.clone(),
                };
                let m = gscpp_moments(t, &p)?;
                (m.mean, m.variance, m.cov(s, u)?)
            }
            Process::Gsmpp => {
                return Err(CliError::usage(
                    "the multiplicative process has no general closed-form moment table; \
                     its mean is the count's generating function at E[X] via the library's \
                     mellin evaluator",
                ))
            }
        };
        table.push(vec![
            Cell::Num(t),
            Cell::Num(mean),
            Cell::Num(variance),
            Cell::Num(cov),
        ]);
    }
    deliver(&table, cfg)
}
