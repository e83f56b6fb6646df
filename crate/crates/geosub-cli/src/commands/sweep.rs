//! `sweep`: figure-style sensitivity sweeps of the extreme-shock
//! reliability over q, alpha, lambda and mu, one output file per swept
//! parameter.
//!
//! Without `--out` the four sweeps are concatenated to stdout (the
//! `parameter_name` column keeps them apart). With `--n` each row also
//! carries a Monte Carlo band from independently seeded streams; the
//! orchestration itself stays single-threaded and deterministic.

use geosub::gcp::GcpParams;
use geosub::gspp::GsppParams;
use geosub::shock::{extreme_mc, sensitivity_sweep, ExtremeShockModel, SweepParameter};
use geosub::spp::SppParams;
use geosub::SubordinatorSpec;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::output::{echo_config, write_file, Cell, Table};

/// Swept values per parameter, bracketing the baseline.
const Q_VALUES: &[f64] = &[0.5, 0.6, 0.7, 0.8, 0.9];
const ALPHA_VALUES: &[f64] = &[0.4, 0.5, 0.6, 0.7, 0.8];
const LAMBDA_VALUES: &[f64] = &[0.5, 1.0, 1.5, 2.0];
const MU_VALUES: &[f64] = &[0.5, 1.0, 1.5, 2.0];

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    // Baseline model; defaults are the canonical figure baseline.
    let base = ExtremeShockModel {
        q: cfg.q.unwrap_or(0.7),
        arrivals: GsppParams {
            spp: SppParams {
                lambda: cfg.lambda.unwrap_or(1.0),
                sub: cfg
                    .subordinator
                    .clone()
                    .unwrap_or(SubordinatorSpec::Stable { alpha: 0.6 }),
            },
            gcp: GcpParams {
                mu: cfg.mu.unwrap_or(1.0),
            },
        },
    };
    let t_grid = match &cfg.t_grid {
        Some(grid) if !grid.is_empty() => grid.clone(),
        _ => (0..=20).map(|i| 0.25 * i as f64).collect(),
    };
    let with_mc = cfg.n.is_some();

    let plan = [
        (SweepParameter::Q, Q_VALUES),
        (SweepParameter::Alpha, ALPHA_VALUES),
        (SweepParameter::Lambda, LAMBDA_VALUES),
        (SweepParameter::Mu, MU_VALUES),
    ];
    let columns: &[&'static str] = if with_mc {
        &[
            "parameter_name",
            "parameter_value",
            "t",
            "reliability",
            "failure_rate",
            "mc_estimate",
            "mc_stderr",
        ]
    } else {
        &[
            "parameter_name",
            "parameter_value",
            "t",
            "reliability",
            "failure_rate",
        ]
    };

    let mut tables = Vec::with_capacity(plan.len());
    for (pi, (parameter, values)) in plan.iter().enumerate() {
        let rows = sensitivity_sweep(&base, *parameter, values, &t_grid)?;
        let mut table = Table::new(columns);
        if with_mc {
            let n = cfg.n();
            for (vi, &value) in values.iter().enumerate() {
                let mut model = base.clone();
                set_parameter(&mut model, *parameter, value);
                // One derived master seed per (parameter, value) keeps
                // every band reproducible and independent.
                let master = cfg
                    .seed()
                    .wrapping_add(((pi * 64 + vi + 1) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let reports = extreme_mc(&t_grid, &model, n, master)?;
                for (row, rep) in rows[vi * t_grid.len()..(vi + 1) * t_grid.len()]
                    .iter()
                    .zip(&reports)
                {
                    table.push(vec![
                        Cell::Text(row.parameter.to_string()),
                        Cell::Num(row.value),
                        Cell::Num(row.t),
                        Cell::Num(row.reliability),
                        Cell::Num(row.failure_rate),
                        Cell::Num(rep.estimate),
                        Cell::Num(rep.stderr),
                    ]);
                }
            }
        } else {
            for row in &rows {
                table.push(vec![
                    Cell::Text(row.parameter.to_string()),
                    Cell::Num(row.value),
                    Cell::Num(row.t),
                    Cell::Num(row.reliability),
                    Cell::Num(row.failure_rate),
                ]);
            }
        }
        tables.push((parameter.name(), table));
    }

    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::io(&format!("creating {}", dir.display()), e))?;
            let ext = match cfg.format() {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            for (name, table) in &tables {
                let body = match cfg.format() {
                    OutputFormat::Csv => table.to_csv()?,
                    OutputFormat::Json => table.to_json(cfg),
                };
                write_file(&dir.join(format!("sweep_{name}.{ext}")), &body)?;
            }
            echo_config(&dir.join("sweep"), cfg)
        }
        None => {
            for (_, table) in &tables {
                let body = match cfg.format() {
                    OutputFormat::Csv => table.to_csv()?,
                    OutputFormat::Json => table.to_json(cfg),
                };
                print!("{body}");
            }
            Ok(())
        }
    }
}

/// Mirror of the sweep's parameter substitution for the MC bands; a
/// non-stable alpha sweep has already been rejected by the closed-form
/// pass above.
fn set_parameter(model: &mut ExtremeShockModel, parameter: SweepParameter, value: f64) {
    match parameter {
        SweepParameter::Q => model.q = value,
        SweepParameter::Lambda => model.arrivals.spp.lambda = value,
        SweepParameter::Mu => model.arrivals.gcp.mu = value,
        SweepParameter::Alpha => {
            if let SubordinatorSpec::Stable { ref mut alpha } = model.arrivals.spp.sub {
                *alpha = value;
            }
        }
    }
}
