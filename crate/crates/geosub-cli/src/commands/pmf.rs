//! `pmf`: probability mass table of the configured process at one time.

use geosub::gcp::gcp_pmf;
use geosub::gscpp::{gscpp_pmf_discrete_table, GscppParams};
use geosub::gspp::gspp_pmf_table_generic;
use geosub::spp::spp_pmf_table_generic;

use crate::config::{Process, RunConfig};
use crate::error::CliError;
use crate::output::{deliver, Cell, Table};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let t = cfg.require_t()?;
    let k_max = cfg.k_max();
    let ctl = cfg.series_control();

    let (probs, route) = match cfg.require_process()? {
        Process::Gcp => {
            let p = cfg.gcp_params()?;
            let probs = (0..=k_max as u64).map(|k| gcp_pmf(k, t, &p)).collect();
            (probs, "geometric closed form")
        }
        Process::Spp => {
            let p = cfg.spp_params()?;
            (spp_pmf_table_generic(k_max, t, &p, &ctl)?, "jet series")
        }
        Process::Gspp => {
            let p = cfg.gspp_params()?;
            (gspp_pmf_table_generic(k_max, t, &p, &ctl)?, "jet series")
        }
        Process::Gscpp => {
            let p = GscppParams {
                gspp: cfg.gspp_params()?,
                jumps: cfg.require_jumps()?.clone(),
            };
            let probs = gscpp_pmf_discrete_table(k_max, t, &p, &ctl)?;
            (probs, "count-jump convolution")
        }
        Process::Gsmpp => {
            return Err(CliError::usage(
                "the multiplicative process is continuous apart from its atom at 1 and has \
                 no pmf; use the library's distribution-function evaluators instead",
            ))
        }
    };

    let mut table = Table::new(&["k", "pmf", "diagnostic"]);
    for (k, p) in probs.iter().enumerate() {
        table.push(vec![
            Cell::Int(k as u64),
            Cell::Num(*p),
            Cell::Text(route.to_string()),
        ]);
    }
    deliver(&table, cfg)
}
