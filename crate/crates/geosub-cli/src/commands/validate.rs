//! `validate`: a fixed, seeded Monte Carlo battery checking every
//! sampler against its closed form, reported one row per check.
//!
//! The battery's parameters are canonical and hard-wired so the report
//! is comparable across runs; only `--n`, `--seed`, `--format` and
//! `--out` come from the configuration. The command exits nonzero when
//! any check fails.

use geosub::gcp::{gcp_pmf, gcp_sample_count, GcpParams};
use geosub::gscpp::{gscpp_moments, gscpp_sample, GscppParams, JumpLaw};
use geosub::gspp::{gspp_moments, gspp_sample, GsppParams};
use geosub::mc::{mc_mean, mc_pmf_tv, McReport, Streams, DEFAULT_K_SIGMA};
use geosub::shock::{
    cumulative_mc, extreme_mc, CumulativeShockModel, ExtremeShockModel,
};
use geosub::spp::SppParams;
use geosub::{SeriesControl, SubordinatorSpec};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{deliver, Cell, Table};

fn tempered_count() -> GsppParams {
    GsppParams {
        spp: SppParams {
            lambda: 1.0,
            sub: SubordinatorSpec::TemperedStable {
                alpha: 0.6,
                nu: 1.0,
            },
        },
        gcp: GcpParams { mu: 1.0 },
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n().max(2);
    let seed = cfg.seed();
    let streams = Streams::new(seed);
    let ctl = SeriesControl::default();
    let mut rows: Vec<(String, McReport)> = Vec::new();
    let mut task = 0u64;
    let mut next = || {
        let rng = streams.stream(task);
        task += 1;
        rng
    };

    // Geometric clock: total variation of the sampled law. The
    // statistical floor of the empirical TV scales as 1/sqrt(n), so the
    // threshold is anchored at 0.01 for n = 1e5 and scaled accordingly.
    let gcp = GcpParams { mu: 1.0 };
    let tv = mc_pmf_tv(
        n,
        30,
        &mut next(),
        |k| gcp_pmf(k, 1.0, &gcp),
        |rng| gcp_sample_count(1.0, &gcp, rng).unwrap(),
    );
    let tv_bound = 0.01 * (1e5 / n as f64).sqrt();
    rows.push((
        "gcp_pmf_total_variation".into(),
        McReport {
            estimate: tv,
            stderr: 0.0,
            n,
            target: tv_bound,
            k_sigma: 0.0,
            pass: tv < tv_bound,
            degenerate: false,
        },
    ));

    // Count mean at the canonical tempered point.
    let count = tempered_count();
    let mean = gspp_moments(2.0, &count)?.mean;
    let rep = mc_mean(n, mean, DEFAULT_K_SIGMA, &mut next(), |rng| {
        gspp_sample(2.0, &count, rng).unwrap() as f64
    });
    rows.push(("gspp_mean_tempered".into(), rep));

    // Subordinator samplers: empirical Laplace transform at s = 1, t = 1.
    let families: [(&str, SubordinatorSpec); 4] = [
        ("stable", SubordinatorSpec::Stable { alpha: 0.6 }),
        (
            "tempered_stable",
            SubordinatorSpec::TemperedStable {
                alpha: 0.6,
                nu: 1.0,
            },
        ),
        ("gamma", SubordinatorSpec::Gamma { p: 1.4, beta: 2.2 }),
        (
            "inverse_gaussian",
            SubordinatorSpec::InverseGaussian {
                delta: 1.3,
                gamma: 0.8,
            },
        ),
    ];
    for (name, spec) in &families {
        let target = (-spec.laplace_exponent(1.0)).exp();
        let rep = mc_mean(n, target, DEFAULT_K_SIGMA, &mut next(), |rng| {
            (-spec.sample(1.0, rng).unwrap()).exp()
        });
        rows.push((format!("laplace_{name}"), rep));
    }

    // Compound mean (Wald identity).
    let compound = GscppParams {
        gspp: tempered_count(),
        jumps: JumpLaw::Atoms {
            points: vec![0.5, 2.0],
            weights: vec![0.75, 0.25],
        },
    };
    let mean = gscpp_moments(1.5, &compound)?.mean;
    let rep = mc_mean(n, mean, DEFAULT_K_SIGMA, &mut next(), |rng| {
        gscpp_sample(1.5, &compound, rng).unwrap()
    });
    rows.push(("gscpp_mean_wald".into(), rep));

    // Extreme shock baseline at two horizons.
    let extreme = ExtremeShockModel {
        q: 0.7,
        arrivals: GsppParams {
            spp: SppParams {
                lambda: 1.0,
                sub: SubordinatorSpec::Stable { alpha: 0.6 },
            },
            gcp: GcpParams { mu: 1.0 },
        },
    };
    for (t, rep) in [1.0, 2.0]
        .iter()
        .zip(extreme_mc(&[1.0, 2.0], &extreme, n, seed.wrapping_add(101))?)
    {
        rows.push((format!("extreme_shock_t{t}"), rep));
    }

    // Cumulative shock at threshold 3.
    let cumulative = CumulativeShockModel {
        threshold_t: 3,
        shock_process: GcpParams { mu: 1.0 },
        damage_law: SppParams {
            lambda: 1.0,
            sub: SubordinatorSpec::TemperedStable {
                alpha: 0.6,
                nu: 1.0,
            },
        },
    };
    let rep = cumulative_mc(&[1.0], &cumulative, n, seed.wrapping_add(202), &ctl)?;
    rows.push(("cumulative_shock_t1".into(), rep[0]));

    let mut table = Table::new(&[
        "check", "n", "estimate", "target", "stderr", "k_sigma", "pass",
    ]);
    let mut failed = 0usize;
    for (check, rep) in &rows {
        failed += usize::from(!rep.pass);
        table.push(vec![
            Cell::Text(check.clone()),
            Cell::Int(rep.n),
            Cell::Num(rep.estimate),
            Cell::Num(rep.target),
            Cell::Num(rep.stderr),
            Cell::Num(rep.k_sigma),
            Cell::Bool(rep.pass),
        ]);
    }
    deliver(&table, cfg)?;
    if failed > 0 {
        return Err(CliError::ChecksFailed {
            failed,
            total: rows.len(),
        });
    }
    Ok(())
}
