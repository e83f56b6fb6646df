//! `reliability`: closed-form reliability curves — extreme model with
//! `--q`, cumulative model with `--threshold`.

use geosub::shock::{
    cumulative_reliability, extreme_failure_rate, extreme_reliability, CumulativeShockModel,
    ExtremeShockModel,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{deliver, Cell, Table};

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let times = cfg.times()?;
    match (cfg.q, cfg.threshold) {
        (Some(_), Some(_)) => Err(CliError::usage(
            "pass either --q (extreme model) or --threshold (cumulative model), not both",
        )),
        (None, None) => Err(CliError::usage(
            "reliability needs --q (extreme model) or --threshold (cumulative model)",
        )),
        (Some(q), None) => {
            let model = ExtremeShockModel {
                q,
                arrivals: cfg.gspp_params()?,
            };
            let mut table = Table::new(&["t", "reliability", "failure_rate"]);
            for &t in &times {
                table.push(vec![
                    Cell::Num(t),
                    Cell::Num(extreme_reliability(t, &model)?),
                    Cell::Num(extreme_failure_rate(t, &model)?),
                ]);
            }
            deliver(&table, cfg)
        }
        (None, Some(threshold_t)) => {
            let model = CumulativeShockModel {
                threshold_t,
                shock_process: cfg.gcp_params()?,
                damage_law: cfg.spp_params()?,
            };
            let ctl = cfg.series_control();
            let mut table = Table::new(&["t", "reliability"]);
            for &t in &times {
                table.push(vec![
                    Cell::Num(t),
                    Cell::Num(cumulative_reliability(t, &model, &ctl)?),
                ]);
            }
            deliver(&table, cfg)
        }
    }
}
