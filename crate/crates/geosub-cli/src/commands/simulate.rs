//! `simulate`: exact-law draws written to a sample file, with a summary
//! JSON object on stdout.

use geosub::gcp::gcp_sample_count;
use geosub::gscpp::{gscpp_sample, GscppParams};
use geosub::gsmpp::{gsmpp_sample, GsmppParams};
use geosub::gspp::gspp_sample;
use geosub::mc::Streams;
use geosub::spp::spp_sample;

use crate::config::{OutputFormat, Process, RunConfig};
use crate::error::CliError;
use crate::output::{echo_config, write_file, Cell, Table};

fn draw_all(
    n: u64,
    mut draw: impl FnMut() -> Result<Cell, geosub::Error>,
) -> Result<Vec<Cell>, geosub::Error> {
    (0..n).map(|_| draw()).collect()
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out.clone().ok_or_else(|| {
        CliError::usage("simulate writes a sample file; pass --out <path>")
    })?;
    let t = cfg.require_t()?;
    let n = cfg.n();
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let mut rng = Streams::new(cfg.seed()).stream(0);

    // Counts stay integers in the output; compound sums and products are
    // doubles.
    let process = cfg.require_process()?;
    let samples = match process {
        Process::Gcp => {
            let p = cfg.gcp_params()?;
            draw_all(n, || Ok(Cell::Int(gcp_sample_count(t, &p, &mut rng)?)))?
        }
        Process::Spp => {
            let p = cfg.spp_params()?;
            draw_all(n, || Ok(Cell::Int(spp_sample(t, &p, &mut rng)?)))?
        }
        Process::Gspp => {
            let p = cfg.gspp_params()?;
            draw_all(n, || Ok(Cell::Int(gspp_sample(t, &p, &mut rng)?)))?
        }
        Process::Gscpp => {
            let p = GscppParams {
                gspp: cfg.gspp_params()?,
                jumps: cfg.require_jumps()?.clone(),
            };
            draw_all(n, || Ok(Cell::Num(gscpp_sample(t, &p, &mut rng)?)))?
        }
        Process::Gsmpp => {
            let p = GsmppParams {
                gspp: cfg.gspp_params()?,
                factors: cfg.require_jumps()?.clone(),
            };
            draw_all(n, || Ok(Cell::Num(gsmpp_sample(t, &p, &mut rng)?)))?
        }
    };

    let mut table = Table::new(&["i", "value"]);
    // Welford running mean/variance for the summary.
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, cell) in samples.into_iter().enumerate() {
        let x = match cell {
            Cell::Int(v) => v as f64,
            Cell::Num(v) => v,
            _ => unreachable!("samples are numeric"),
        };
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
        min = min.min(x);
        max = max.max(x);
        table.push(vec![Cell::Int(i as u64), cell]);
    }
    let stderr = if n > 1 {
        (m2 / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };

    let body = match cfg.format() {
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => table.to_json(cfg),
    };
    write_file(&out, &body)?;
    echo_config(&out, cfg)?;

    let summary = serde_json::json!({
        "process": process.name(),
        "t": t,
        "n": n,
        "seed": cfg.seed(),
        "mean": mean,
        "stderr": stderr,
        "min": min,
        "max": max,
        "out": out,
    });
    println!("{summary}");
    Ok(())
}
