//! Acceptance battery: one test per release criterion, in order, each
//! ending in a single `criterion NN PASS` line with its measured figures
//! (visible under `--nocapture`, and automatically on failure).
//!
//! Criterion 7 is expected to fail. It demands that `Corr(X(s), X(t)) * t`
//! settle at the classical finite constants by `t = 10^4`, but the
//! correlation of a geometric-clock count converges to a *positive*
//! constant, so the product grows linearly without bound. The test first
//! verifies the behaviour that does hold — the limit and the first-order
//! approach coefficient exposed by `correlation_limit` and
//! `correlation_asymptote` — and then applies the criterion literally.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use geosub::gcp::{gcp_pmf, gcp_sample_count, GcpParams};
use geosub::gscpp::{gscpp_moments, gscpp_pmf_discrete_table, GscppParams, JumpLaw};
use geosub::gspp::{
    correlation_asymptote, correlation_asymptote_poisson, correlation_limit,
    correlation_limit_poisson, dispersion_index, gspp_moments, gspp_pmf_conditioning,
    gspp_pmf_generic, gspp_pmf_sfpp_table, gspp_pmf_table_conditioning, gspp_pmf_table_generic,
    gspp_pmf_tsfpp_table, gspp_sample, GsppParams,
};
use geosub::gsmpp::gsmpp_atom_at_one;
use geosub::mc::{mc_pmf_tv, Streams};
use geosub::pmf::{adaptive_pmf, TruncationPolicy};
use geosub::shock::{
    cumulative_mc, cumulative_reliability, extreme_failure_rate, extreme_mc, extreme_reliability,
    sensitivity_sweep, two_state_product_mean, CumulativeShockModel, ExtremeShockModel,
    SweepParameter,
};
use geosub::spp::{spp_pmf_sfpp_table, spp_pmf_table_generic, spp_pmf_tsfpp_table, SppParams};
use geosub::{SeriesControl, SubordinatorSpec};

fn gspp(lambda: f64, sub: SubordinatorSpec, mu: f64) -> GsppParams {
    GsppParams {
        spp: SppParams { lambda, sub },
        gcp: GcpParams { mu },
    }
}

/// Tempered-stable baseline: alpha 0.6, nu 1, lambda = mu = 1.
fn tempered_count() -> GsppParams {
    gspp(
        1.0,
        SubordinatorSpec::TemperedStable {
            alpha: 0.6,
            nu: 1.0,
        },
        1.0,
    )
}

/// Extreme-shock baseline: q 0.7 on a stable(0.6) clock, lambda = mu = 1.
fn baseline_shock() -> ExtremeShockModel {
    ExtremeShockModel {
        q: 0.7,
        arrivals: gspp(1.0, SubordinatorSpec::Stable { alpha: 0.6 }, 1.0),
    }
}

/// Mean and standard error of an f64 sample, by Welford's recurrence.
fn mean_and_stderr(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut n = 0u64;
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for x in xs {
        n += 1;
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    let var = m2 / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[test]
fn criterion_01_count_sampler_matches_the_geometric_law() {
    let start = Instant::now();
    let p = GcpParams { mu: 1.0 };
    let mut rng = Streams::new(0xACC0_0001).stream(0);
    let tv = mc_pmf_tv(
        100_000,
        40,
        &mut rng,
        |k| gcp_pmf(k, 1.0, &p),
        |rng| gcp_sample_count(1.0, &p, rng).expect("valid parameters"),
    );
    let elapsed = start.elapsed();
    assert!(tv < 0.01, "total variation {tv} is not below 0.01");
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 01 PASS: total variation {tv:.5} at n = 100000 in {elapsed:?}");
}

#[test]
fn criterion_02_sampled_moments_match_the_closed_forms() {
    let start = Instant::now();
    let p = tempered_count();
    let closed = gspp_moments(2.0, &p).expect("valid parameters");
    assert_eq!(closed.mean, 1.2);
    assert_eq!(closed.variance, 3.84);

    let n = 100_000u64;
    let mut rng = Streams::new(0xACC0_0002).stream(0);
    let draws: Vec<f64> = (0..n)
        .map(|_| gspp_sample(2.0, &p, &mut rng).expect("valid parameters") as f64)
        .collect();
    let (mean, se_mean) = mean_and_stderr(draws.iter().copied());
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    // Asymptotic standard error of the sample variance via the fourth
    // central moment.
    let m4 = draws.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
    let se_var = ((m4 - var * var) / n as f64).sqrt();

    let elapsed = start.elapsed();
    assert!(
        (mean - closed.mean).abs() <= 3.0 * se_mean,
        "mean {mean} vs {} at stderr {se_mean}",
        closed.mean
    );
    assert!(
        (var - closed.variance).abs() <= 3.0 * se_var,
        "variance {var} vs {} at stderr {se_var}",
        closed.variance
    );
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 02 PASS: mean {mean:.4} (target 1.2, se {se_mean:.4}), \
         variance {var:.4} (target 3.84, se {se_var:.4}) in {elapsed:?}"
    );
}

#[test]
fn criterion_03_three_pmf_routes_agree_on_the_stable_clock() {
    let start = Instant::now();
    let ctl = SeriesControl::default();
    let (lambda, alpha, mu, t) = (0.5, 0.7, 1.0, 1.0);
    let p = gspp(lambda, SubordinatorSpec::Stable { alpha }, mu);

    let generic = gspp_pmf_table_generic(15, t, &p, &ctl).expect("jet route");
    let series = gspp_pmf_sfpp_table(15, t, lambda, alpha, mu, &ctl).expect("series route");
    let mut worst = 0.0f64;
    for k in 0..=15usize {
        let conditioned = gspp_pmf_conditioning(k as u64, t, &p, &ctl).expect("conditioning");
        worst = worst
            .max((generic[k] - series[k]).abs())
            .max((generic[k] - conditioned).abs())
            .max((series[k] - conditioned).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst <= 1e-8, "largest pairwise gap {worst:e}");
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("criterion 03 PASS: largest pairwise gap {worst:.2e} over k <= 15 in {elapsed:?}");
}

#[test]
fn criterion_04_adaptive_truncation_normalizes_every_evaluator() {
    let ctl = SeriesControl::default();
    // Light-tailed clock families keep the adaptive doubling shallow; the
    // heavy stable tail is pinned instead by the frozen-value and
    // route-agreement criteria.
    let policy = TruncationPolicy {
        k_cap: 1 << 14,
        ..TruncationPolicy::default()
    };
    let families = [
        SubordinatorSpec::TemperedStable {
            alpha: 0.7,
            nu: 0.4,
        },
        SubordinatorSpec::Gamma { p: 1.1, beta: 1.7 },
        SubordinatorSpec::InverseGaussian {
            delta: 1.3,
            gamma: 0.8,
        },
    ];
    let grid = [(0.5, 1.0, 1.0), (1.0, 0.5, 2.0), (2.0, 2.0, 0.7)];

    let mut worst = 0.0f64;
    let mut tables = 0u32;
    for sub in &families {
        for &(lambda, mu, t) in &grid {
            let p = gspp(lambda, sub.clone(), mu);
            let compound = GscppParams {
                gspp: p.clone(),
                jumps: JumpLaw::Discrete {
                    pmf: vec![0.25, 0.75],
                },
            };
            let evaluators: [&dyn Fn(usize) -> geosub::Result<Vec<f64>>; 5] = [
                &|k| Ok((0..=k).map(|j| gcp_pmf(j as u64, t, &p.gcp)).collect()),
                &|k| spp_pmf_table_generic(k, t, &p.spp, &ctl),
                &|k| gspp_pmf_table_generic(k, t, &p, &ctl),
                &|k| gspp_pmf_table_conditioning(k, t, &p, &ctl),
                &|k| gscpp_pmf_discrete_table(k, t, &compound, &ctl),
            ];
            for eval in evaluators {
                let pmf = adaptive_pmf(&policy, eval).expect("adaptive table");
                assert!(pmf.converged(), "truncation hit the cap");
                worst = worst.max((pmf.total_mass() - 1.0).abs());
                tables += 1;
            }
        }
    }
    assert!(worst <= 1e-6, "largest |total - 1| is {worst:e}");
    println!("criterion 04 PASS: {tables} adaptive tables, largest |total - 1| {worst:.2e}");
}

#[test]
fn criterion_05_zero_tempering_reduces_to_the_stable_law() {
    let ctl = SeriesControl::default();
    let (lambda, alpha, mu, t) = (0.5, 0.6, 1.0, 1.0);
    let gspp_stable = gspp_pmf_sfpp_table(10, t, lambda, alpha, mu, &ctl).expect("stable table");
    let gspp_tempered =
        gspp_pmf_tsfpp_table(10, t, lambda, alpha, 0.0, mu, &ctl).expect("tempered table");
    let spp_stable = spp_pmf_sfpp_table(10, t, lambda, alpha, &ctl).expect("stable inner table");
    let spp_tempered =
        spp_pmf_tsfpp_table(10, t, lambda, alpha, 0.0, &ctl).expect("tempered inner table");

    let mut worst = 0.0f64;
    for k in 0..=10usize {
        worst = worst
            .max((gspp_stable[k] - gspp_tempered[k]).abs())
            .max((spp_stable[k] - spp_tempered[k]).abs());
    }
    assert!(worst <= 1e-10, "largest gap {worst:e}");
    println!("criterion 05 PASS: largest nu = 0 reduction gap {worst:.2e} over k <= 10");
}

#[test]
fn criterion_06_the_count_is_overdispersed_with_a_consistent_index() {
    let p = tempered_count();
    let mut min_index = f64::INFINITY;
    for i in 1..=20 {
        let t = 0.25 * i as f64;
        let index = dispersion_index(t, 1.0, 0.6, 1.0, 1.0).expect("valid parameters");
        assert!(index > 1.0, "dispersion index {index} at t = {t}");
        let m = gspp_moments(t, &p).expect("valid parameters");
        let gap = (index * m.mean - m.variance).abs();
        assert!(
            gap <= 1e-12 * m.variance,
            "index * mean vs variance differ by {gap:e} at t = {t}"
        );
        min_index = min_index.min(index);
    }
    println!("criterion 06 PASS: dispersion index > 1 on the grid (min {min_index:.4})");
}

#[test]
fn criterion_07_correlation_times_horizon_settles_at_the_claimed_constants() {
    let s = 1.0;
    let t = 1e4;

    // Identity clock f(s) = s at lambda = mu = 1: Cov(X(s), X(u)) =
    // a s + b s u with a = 2 and b = 1.
    let limit_id = correlation_limit_poisson(s, 1.0, 1.0).expect("valid parameters");
    let claimed_id = correlation_asymptote_poisson(s, 1.0, 1.0).expect("valid parameters");
    assert!((limit_id - 1.0 / 3.0f64.sqrt()).abs() <= 1e-15);
    assert!((claimed_id - 2.0 / 3.0f64.sqrt()).abs() <= 1e-15);
    let (a, b) = (2.0, 1.0);
    let corr_id = (a * s + b * s * t) / ((a * s + b * s * s) * (a * t + b * t * t)).sqrt();

    // Tempered-stable clock at the baseline parameters.
    let p = tempered_count();
    let limit_ts = correlation_limit(s, &p).expect("valid parameters");
    let claimed_ts = correlation_asymptote(s, &p).expect("valid parameters");
    assert!((claimed_ts - 2.0 / 1.56f64.sqrt()).abs() <= 1e-14);
    let corr_ts = gspp_moments(t, &p)
        .expect("valid parameters")
        .corr(s, t)
        .expect("ordered horizons");

    // What actually holds at large t: the correlation approaches its
    // positive limit with first-order coefficient `claimed`, i.e.
    // Corr = limit + claimed / (2 t) + O(1/t^2).
    assert!(((corr_id - limit_id) * 2.0 * t / claimed_id - 1.0).abs() <= 0.01);
    assert!(((corr_ts - limit_ts) * 2.0 * t / claimed_ts - 1.0).abs() <= 0.01);

    // The criterion taken literally: Corr(s, t) * t within 2% of the
    // claimed constants at t = 1e4.
    let measured_id = corr_id * t;
    let measured_ts = corr_ts * t;
    assert!(
        (measured_id / claimed_id - 1.0).abs() <= 0.02
            && (measured_ts / claimed_ts - 1.0).abs() <= 0.02,
        "criterion 07 FAIL: Corr(s, t) * t does not settle at the claimed constants. At \
         t = 1e4 it reaches {measured_id:.0} (identity clock) and {measured_ts:.0} \
         (tempered clock) against claimed {claimed_id:.4} and {claimed_ts:.4}. The \
         correlation itself converges to the positive constants {limit_id:.6} and \
         {limit_ts:.6} — see correlation_limit / correlation_limit_poisson — because the \
         geometric clock's mixing rate correlates the count across all horizons, so the \
         product Corr * t grows linearly. The claimed constants are instead the first-order \
         coefficients of the approach, Corr = limit + claimed / (2 t) + O(1/t^2), exposed \
         as correlation_asymptote / correlation_asymptote_poisson and verified above."
    );
    println!("criterion 07 PASS: Corr * t within 2% of the claimed constants");
}

#[test]
fn criterion_08_extreme_shock_closed_form_matches_the_two_state_product() {
    let m = baseline_shock();
    let grid = [0.5, 1.0, 2.0, 4.0];
    let reports = extreme_mc(&grid, &m, 100_000, 0xACC0_0008).expect("valid model");
    for (t, report) in grid.iter().zip(&reports) {
        let closed = extreme_reliability(*t, &m).expect("valid model");
        assert_eq!(report.target, closed, "target must be the closed form");
        assert!(
            report.pass,
            "t = {t}: estimate {} vs {} at stderr {}",
            report.estimate, report.target, report.stderr
        );
    }

    // The failure rate is the negative log-derivative of reliability;
    // check against a five-point stencil.
    let h = 1e-2;
    let mut worst = 0.0f64;
    for &t in &grid {
        let f = |x: f64| -extreme_reliability(x, &m).expect("valid model").ln();
        let stencil =
            (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) / (12.0 * h);
        let rate = extreme_failure_rate(t, &m).expect("valid model");
        worst = worst.max(((stencil - rate) / rate).abs());
    }
    assert!(worst <= 1e-6, "largest relative rate gap {worst:e}");
    println!(
        "criterion 08 PASS: Monte Carlo within 3 sigma on {grid:?}, \
         rate stencil gap {worst:.2e}"
    );
}

/// GEOSUB_* variables cleared so ambient configuration cannot leak in.
const ENV_VARS: &[&str] = &[
    "GEOSUB_CONFIG",
    "GEOSUB_PROCESS",
    "GEOSUB_FAMILY",
    "GEOSUB_ALPHA",
    "GEOSUB_NU",
    "GEOSUB_LAMBDA",
    "GEOSUB_MU",
    "GEOSUB_T",
    "GEOSUB_T_GRID",
    "GEOSUB_K_MAX",
    "GEOSUB_Q",
    "GEOSUB_THRESHOLD",
    "GEOSUB_JUMPS",
    "GEOSUB_N",
    "GEOSUB_SEED",
    "GEOSUB_OUT",
    "GEOSUB_FORMAT",
    "GEOSUB_TOL",
    "GEOSUB_MAX_TERMS",
];

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("geosub-acceptance-{name}"));
    if dir.exists() {
        fs::remove_dir_all(&dir).expect("clear scratch dir");
    }
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

#[test]
fn criterion_09_reliability_orderings_hold_and_goldens_are_byte_stable() {
    // Pointwise orderings across the sweep grids.
    let base = baseline_shock();
    let t_grid = [0.5, 1.0, 2.0, 4.0];
    let cases: [(SweepParameter, &[f64], bool); 4] = [
        (SweepParameter::Q, &[0.5, 0.6, 0.7, 0.8, 0.9], true),
        (SweepParameter::Alpha, &[0.4, 0.5, 0.6, 0.7, 0.8], true),
        (SweepParameter::Lambda, &[0.5, 1.0, 1.5, 2.0], false),
        (SweepParameter::Mu, &[0.5, 1.0, 1.5, 2.0], false),
    ];
    for (parameter, values, increasing) in cases {
        let rows = sensitivity_sweep(&base, parameter, values, &t_grid).expect("valid sweep");
        for j in 0..t_grid.len() {
            for i in 1..values.len() {
                let prev = rows[(i - 1) * t_grid.len() + j].reliability;
                let cur = rows[i * t_grid.len() + j].reliability;
                assert!(
                    if increasing { cur > prev } else { cur < prev },
                    "{:?} sweep not {} at t = {}: {prev} then {cur}",
                    parameter,
                    if increasing { "increasing" } else { "decreasing" },
                    t_grid[j]
                );
            }
        }
    }

    // Golden CSVs are byte-stable under a fixed seed, Monte Carlo
    // columns included.
    let first = scratch("golden-a");
    let second = scratch("golden-b");
    for dir in [&first, &second] {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_geosub"));
        for var in ENV_VARS {
            cmd.env_remove(var);
        }
        let out = cmd
            .args([
                "sweep",
                "--t-grid",
                "0.5,1,2,4",
                "--n",
                "400",
                "--seed",
                "9",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .expect("spawn geosub");
        assert!(out.status.success(), "sweep failed: {out:?}");
    }
    for name in ["sweep_q", "sweep_alpha", "sweep_lambda", "sweep_mu"] {
        let a = fs::read(first.join(format!("{name}.csv"))).expect("first golden");
        let b = fs::read(second.join(format!("{name}.csv"))).expect("second golden");
        assert_eq!(a, b, "{name}.csv must be byte-stable under a fixed seed");
    }
    println!("criterion 09 PASS: orderings hold on all four sweeps; goldens byte-stable");
}

#[test]
fn criterion_10_cumulative_shock_closed_form_matches_the_simulation() {
    let ctl = SeriesControl::default();
    for threshold in [1u64, 3, 5] {
        let m = CumulativeShockModel {
            threshold_t: threshold,
            shock_process: GcpParams { mu: 1.0 },
            damage_law: SppParams {
                lambda: 1.0,
                sub: SubordinatorSpec::TemperedStable {
                    alpha: 0.6,
                    nu: 1.0,
                },
            },
        };
        let grid = [1.0, 2.0];
        let reports =
            cumulative_mc(&grid, &m, 100_000, 0xACC0_0010 + threshold, &ctl).expect("valid model");
        for (t, report) in grid.iter().zip(&reports) {
            let closed = cumulative_reliability(*t, &m, &ctl).expect("valid model");
            assert_eq!(report.target, closed, "target must be the closed form");
            assert!(
                report.pass,
                "threshold {threshold}, t = {t}: estimate {} vs {} at stderr {}",
                report.estimate, report.target, report.stderr
            );
        }
    }
    println!("criterion 10 PASS: survival within 3 sigma for thresholds 1, 3, 5");
}

#[test]
fn criterion_11_the_three_reductions_collapse_exactly() {
    let ctl = SeriesControl::default();

    // Unit jumps collapse the compound law to the count.
    let count = tempered_count();
    let compound = GscppParams {
        gspp: count.clone(),
        jumps: JumpLaw::Discrete {
            pmf: vec![0.0, 1.0],
        },
    };
    let count_pmf = gspp_pmf_table_generic(20, 1.0, &count, &ctl).expect("count table");
    let compound_pmf =
        gscpp_pmf_discrete_table(20, 1.0, &compound, &ctl).expect("compound table");
    let mut worst_pmf = 0.0f64;
    for k in 0..=20usize {
        worst_pmf = worst_pmf.max((count_pmf[k] - compound_pmf[k]).abs());
    }
    assert!(worst_pmf <= 1e-10, "largest pmf gap {worst_pmf:e}");
    let cm = gscpp_moments(1.5, &compound).expect("compound moments");
    let gm = gspp_moments(1.5, &count).expect("count moments");
    assert!((cm.mean - gm.mean).abs() <= 1e-12 * gm.mean);
    assert!((cm.variance - gm.variance).abs() <= 1e-12 * gm.variance);

    // The multiplicative atom at 1 is the count's zero class.
    let atom = gsmpp_atom_at_one(1.0, 1.0, 0.6, 1.0, 1.0).expect("valid parameters");
    let zero = gspp_pmf_generic(0, 1.0, &count, &ctl).expect("zero mass");
    assert!((atom - zero).abs() <= 1e-12, "atom {atom} vs pmf(0) {zero}");

    // Bernoulli factors tie the two-state product mean to the extreme
    // reliability; the factor mean enters through the Mellin transform
    // at order 2.
    let m = baseline_shock();
    let bernoulli = JumpLaw::Atoms {
        points: vec![0.0, 1.0],
        weights: vec![0.3, 0.7],
    };
    assert_eq!(bernoulli.mellin(2.0).expect("finite support"), 0.7);
    let mut worst_mean = 0.0f64;
    for t in [0.5, 1.0, 2.0, 4.0] {
        let product = two_state_product_mean(t, &m).expect("valid model");
        let reliability = extreme_reliability(t, &m).expect("valid model");
        worst_mean = worst_mean.max((product - reliability).abs());
    }
    assert!(worst_mean <= 1e-12, "largest mean gap {worst_mean:e}");
    println!(
        "criterion 11 PASS: pmf gap {worst_pmf:.2e}, atom gap {:.2e}, mean gap {worst_mean:.2e}",
        (atom - zero).abs()
    );
}

#[test]
fn criterion_12_subordinator_samplers_match_their_laplace_transforms() {
    let families = [
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
    let s_points = [0.25, 0.5, 1.0, 2.0, 4.0];
    let streams = Streams::new(0xACC0_0012);
    let mut worst_sigma = 0.0f64;
    for (task, (name, spec)) in families.iter().enumerate() {
        let mut rng = streams.stream(task as u64);
        let draws: Vec<f64> = (0..100_000)
            .map(|_| spec.sample(1.0, &mut rng).expect("valid parameters"))
            .collect();
        for &s in &s_points {
            let target = (-spec.laplace_exponent(s)).exp();
            let (mean, stderr) = mean_and_stderr(draws.iter().map(|d| (-s * d).exp()));
            let sigmas = (mean - target).abs() / stderr;
            assert!(
                sigmas <= 3.0,
                "{name} at s = {s}: estimate {mean} vs {target} at stderr {stderr}"
            );
            worst_sigma = worst_sigma.max(sigmas);
        }
    }
    assert!(worst_sigma.is_finite());
    println!(
        "criterion 12 PASS: all four families within 3 sigma at 5 points \
         (worst {worst_sigma:.2} sigma)"
    );
}
