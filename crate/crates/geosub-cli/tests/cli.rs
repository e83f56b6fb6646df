//! End-to-end checks of the `geosub` binary: exact output bytes,
//! configuration precedence, file round-trips, seeded reproducibility,
//! and the machine-readable error contract.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

/// Every variable the binary reads, cleared from each invocation so
/// ambient configuration cannot leak into the assertions.
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

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn geosub() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_geosub"));
    for var in ENV_VARS {
        cmd.env_remove(var);
    }
    cmd
}

fn run(cmd: &mut Command) -> Run {
    let out = cmd.output().expect("spawn geosub");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("stdout is utf8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is utf8"),
    }
}

/// Fresh per-test directory under the system temp root.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("geosub-cli-{name}"));
    if dir.exists() {
        fs::remove_dir_all(&dir).expect("clear scratch dir");
    }
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn error_json(run: &Run) -> serde_json::Value {
    let value: serde_json::Value =
        serde_json::from_str(run.stderr.trim()).expect("stderr is an error object");
    value["error"].clone()
}

#[test]
fn the_geometric_pmf_example_prints_exact_dyadic_rows() {
    let run = run(geosub().args([
        "pmf",
        "--process",
        "gcp",
        "--mu",
        "1",
        "--t",
        "1",
        "--k-max",
        "3",
    ]));
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert_eq!(
        run.stdout,
        "k,pmf,diagnostic\n\
         0,0.5,geometric closed form\n\
         1,0.25,geometric closed form\n\
         2,0.125,geometric closed form\n\
         3,0.0625,geometric closed form\n"
    );
}

#[test]
fn moment_tables_carry_the_covariance_anchor() {
    let run = run(geosub().args([
        "moments",
        "--process",
        "gspp",
        "--family",
        "tempered_stable",
        "--alpha",
        "0.6",
        "--nu",
        "1",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t-grid",
        "1,2",
    ]));
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert_eq!(
        run.stdout,
        "t,mean,variance,cov_with_t0\n1,0.6,1.56,1.56\n2,1.2,3.84,1.92\n"
    );
}

#[test]
fn reliability_tables_match_the_closed_forms() {
    let extreme = run(geosub().args([
        "reliability",
        "--q",
        "0.7",
        "--family",
        "stable",
        "--alpha",
        "0.6",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t-grid",
        "0.5,1,2,4",
    ]));
    assert_eq!(extreme.code, 0, "stderr: {}", extreme.stderr);
    assert_eq!(
        extreme.stdout,
        "t,reliability,failure_rate\n\
         0.5,0.8386911601166508,0.32261767976669853\n\
         1,0.7221947610429758,0.27780523895702436\n\
         2,0.5651837533804828,0.21740812330975862\n\
         4,0.39390671433507785,0.15152332141623054\n"
    );

    let cumulative = run(geosub().args([
        "reliability",
        "--threshold",
        "3",
        "--family",
        "tempered_stable",
        "--alpha",
        "0.6",
        "--nu",
        "1",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t-grid",
        "1,2",
    ]));
    assert_eq!(cumulative.code, 0, "stderr: {}", cumulative.stderr);
    assert_eq!(
        cumulative.stdout,
        "t,reliability\n1,0.9225882176817635\n2,0.8248339527147145\n"
    );
}

#[test]
fn compound_pmf_tables_require_an_integer_supported_law() {
    let dir = scratch("jumps");
    let atoms = dir.join("atoms.json");
    fs::write(
        &atoms,
        r#"{"kind":"atoms","points":[1.0,2.0],"weights":[0.5,0.5]}"#,
    )
    .expect("write atoms law");
    let discrete = dir.join("discrete.json");
    fs::write(&discrete, r#"{"kind":"discrete","pmf":[0.25,0.75]}"#).expect("write discrete law");

    let base = [
        "pmf",
        "--process",
        "gscpp",
        "--family",
        "tempered_stable",
        "--alpha",
        "0.6",
        "--nu",
        "1",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t",
        "1",
        "--k-max",
        "1",
    ];

    let rejected = run(geosub()
        .args(base)
        .args(["--jumps", atoms.to_str().unwrap()]));
    assert_eq!(rejected.code, 3);
    assert_eq!(error_json(&rejected)["kind"], "domain");

    let accepted = run(geosub()
        .args(base)
        .args(["--jumps", discrete.to_str().unwrap()]));
    assert_eq!(accepted.code, 0, "stderr: {}", accepted.stderr);
    assert_eq!(
        accepted.stdout,
        "k,pmf,diagnostic\n\
         0,0.7524339240000536,count-jump convolution\n\
         1,0.1366606166528453,count-jump convolution\n"
    );
}

#[test]
fn flags_beat_environment_which_beats_the_config_file() {
    let dir = scratch("precedence");
    let config = dir.join("run.json");
    fs::write(&config, r#"{"process":"gcp","mu":2.0,"t":1.0,"k_max":0}"#).expect("write config");
    let config = config.to_str().unwrap();

    // File only: mu = 2 gives pmf(0) = 1/3.
    let file_only = run(geosub().args(["pmf", "--config", config]));
    assert_eq!(file_only.code, 0, "stderr: {}", file_only.stderr);
    assert!(file_only.stdout.contains("0,0.3333333333333333,"));

    // Environment overrides the file: mu = 4 gives pmf(0) = 0.2.
    let env_over_file = run(geosub()
        .args(["pmf", "--config", config])
        .env("GEOSUB_MU", "4"));
    assert_eq!(env_over_file.code, 0, "stderr: {}", env_over_file.stderr);
    assert!(env_over_file.stdout.contains("0,0.2,"));

    // An explicit flag overrides both: mu = 1 gives pmf(0) = 0.5.
    let flag_over_env = run(geosub()
        .args(["pmf", "--config", config, "--mu", "1"])
        .env("GEOSUB_MU", "4"));
    assert_eq!(flag_over_env.code, 0, "stderr: {}", flag_over_env.stderr);
    assert!(flag_over_env.stdout.contains("0,0.5,"));
}

#[test]
fn the_config_echo_reproduces_the_run() {
    let dir = scratch("echo");
    let first = dir.join("draws.csv");
    let args = [
        "simulate",
        "--process",
        "gspp",
        "--family",
        "tempered_stable",
        "--alpha",
        "0.6",
        "--nu",
        "1",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t",
        "2",
        "--n",
        "200",
        "--seed",
        "11",
    ];
    let direct = run(geosub()
        .args(args)
        .args(["--out", first.to_str().unwrap()]));
    assert_eq!(direct.code, 0, "stderr: {}", direct.stderr);

    // The echoed config alone must reproduce the draws byte for byte.
    let echo = dir.join("draws.csv.config.json");
    let second = dir.join("replay.csv");
    let replay = run(geosub().args([
        "simulate",
        "--config",
        echo.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]));
    assert_eq!(replay.code, 0, "stderr: {}", replay.stderr);
    assert_eq!(
        fs::read(&first).expect("first table"),
        fs::read(&second).expect("replayed table"),
        "echoed config must replay identically"
    );

    // The run summary is machine readable and names the inputs.
    let summary: serde_json::Value =
        serde_json::from_str(direct.stdout.trim()).expect("summary is JSON");
    assert_eq!(summary["process"], "gspp");
    assert_eq!(summary["n"], 200);
    assert_eq!(summary["seed"], 11);
}

#[test]
fn json_output_embeds_the_resolved_config() {
    let run = run(geosub().args([
        "pmf",
        "--process",
        "gcp",
        "--mu",
        "1",
        "--t",
        "1",
        "--k-max",
        "1",
        "--format",
        "json",
    ]));
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).expect("document is JSON");
    assert_eq!(doc["config"]["process"], "gcp");
    assert_eq!(doc["config"]["mu"], 1.0);
    assert_eq!(doc["rows"][0]["k"], 0);
    assert_eq!(doc["rows"][0]["pmf"], 0.5);
    assert_eq!(doc["rows"][1]["pmf"], 0.25);
}

#[test]
fn sweep_outputs_are_byte_stable_under_a_fixed_seed() {
    let first = scratch("sweep-a");
    let second = scratch("sweep-b");
    for dir in [&first, &second] {
        let run = run(geosub().args([
            "sweep",
            "--t-grid",
            "0.5,1,2",
            "--n",
            "300",
            "--seed",
            "7",
            "--out",
            dir.to_str().unwrap(),
        ]));
        assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    }
    for name in ["sweep_q", "sweep_alpha", "sweep_lambda", "sweep_mu"] {
        let a = fs::read(first.join(format!("{name}.csv"))).expect("first sweep file");
        let b = fs::read(second.join(format!("{name}.csv"))).expect("second sweep file");
        assert_eq!(a, b, "{name}.csv must be byte-stable under a fixed seed");
        let text = String::from_utf8(a).expect("sweep csv is utf8");
        assert!(
            text.starts_with(
                "parameter_name,parameter_value,t,reliability,failure_rate,mc_estimate,mc_stderr"
            ),
            "--n adds the Monte Carlo columns"
        );
    }
    assert!(first.join("sweep.config.json").exists());
}

#[test]
fn the_validation_battery_passes_at_moderate_sample_sizes() {
    let run = run(geosub().args(["validate", "--n", "4000"]));
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let mut lines = run.stdout.lines();
    assert_eq!(
        lines.next(),
        Some("check,n,estimate,target,stderr,k_sigma,pass")
    );
    let mut rows = 0;
    for line in lines {
        assert!(line.ends_with(",true"), "failing check: {line}");
        rows += 1;
    }
    assert!(rows >= 9, "battery should cover all canonical checks");
}

#[test]
fn failures_follow_the_error_contract() {
    // Missing required input: usage, exit 2.
    let usage = run(geosub().args(["pmf", "--process", "gcp", "--mu", "1"]));
    assert_eq!(usage.code, 2);
    let err = error_json(&usage);
    assert_eq!(err["code"], 2);
    assert_eq!(err["kind"], "usage");

    // Negative rate reaches the library's domain validation: exit 3.
    let domain = run(geosub().args([
        "pmf",
        "--process",
        "gspp",
        "--family",
        "stable",
        "--alpha",
        "0.6",
        "--lambda",
        "-1",
        "--mu",
        "1",
        "--t",
        "1",
    ]));
    assert_eq!(domain.code, 3);
    assert_eq!(error_json(&domain)["kind"], "domain");

    // A truncated series budget surfaces as a convergence failure: exit 5.
    let dir = scratch("convergence");
    let jumps = dir.join("discrete.json");
    fs::write(&jumps, r#"{"kind":"discrete","pmf":[0.25,0.75]}"#).expect("write jump law");
    let convergence = run(geosub().args([
        "pmf",
        "--process",
        "gscpp",
        "--family",
        "stable",
        "--alpha",
        "0.6",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t",
        "1",
        "--jumps",
        jumps.to_str().unwrap(),
        "--k-max",
        "40",
        "--max-terms",
        "64",
    ]));
    assert_eq!(convergence.code, 5);
    assert_eq!(error_json(&convergence)["kind"], "convergence");

    // The multiplicative process has no pmf to tabulate: usage, exit 2.
    let gsmpp = run(geosub().args([
        "pmf",
        "--process",
        "gsmpp",
        "--family",
        "stable",
        "--alpha",
        "0.6",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t",
        "1",
    ]));
    assert_eq!(gsmpp.code, 2);
    assert_eq!(error_json(&gsmpp)["kind"], "usage");

    // Unknown keys in a config file are rejected, not ignored.
    let config = dir.join("typo.json");
    fs::write(&config, r#"{"process":"gcp","mu":1.0,"t":1.0,"muu":2.0}"#).expect("write config");
    let unknown = run(geosub().args(["pmf", "--config", config.to_str().unwrap()]));
    assert_eq!(unknown.code, 2);
    assert_eq!(error_json(&unknown)["kind"], "usage");

    // A missing jumps file is an io failure: exit 6.
    let missing = run(geosub().args([
        "pmf",
        "--process",
        "gscpp",
        "--family",
        "stable",
        "--alpha",
        "0.6",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--t",
        "1",
        "--jumps",
        dir.join("absent.json").to_str().unwrap(),
    ]));
    assert_eq!(missing.code, 6);
    assert_eq!(error_json(&missing)["kind"], "io");

    // Simulation without a destination cannot do anything useful.
    let no_out = run(geosub().args([
        "simulate",
        "--process",
        "gcp",
        "--mu",
        "1",
        "--t",
        "1",
        "--n",
        "10",
    ]));
    assert_eq!(no_out.code, 2);
    assert_eq!(error_json(&no_out)["kind"], "usage");
}
