use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_coded-caching"));
    cmd.env("CODED_CACHE_THREADS", "1");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    root.join(name).to_string_lossy().into_owned()
}

/// Data rows of a CSV output, skipping `#` comments and the header.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let header: Vec<&str> = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    rows(text).into_iter().map(|r| r[idx].clone()).collect()
}

fn rate_decentralized(n: f64, k: f64, m: f64) -> f64 {
    if m == 0.0 {
        return n.min(k);
    }
    let q = m / n;
    k * (1.0 - q) * (n / (k * m) * (1.0 - (1.0 - q).powf(k))).min(n / k)
}

#[test]
fn analytic_memory_sweep_has_eleven_rows() {
    let out = run(&["analytic", "--files", "100", "--users", "20", "--memory", "0:25:2.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("M,R_U,R_D,R_C,R_star\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 11);
    for row in &rows {
        let m: f64 = row[0].parse().unwrap();
        let r_u: f64 = row[1].parse().unwrap();
        let r_d: f64 = row[2].parse().unwrap();
        assert!((r_u - 20.0 * (1.0 - m / 100.0)).abs() < 1e-9);
        let expect = rate_decentralized(100.0, 20.0, m);
        assert!((r_d - expect).abs() <= 1e-10 * expect.max(1.0), "M={m}: {r_d} vs {expect}");
    }
    assert_eq!(rows[10][1], "15");
}

#[test]
fn verify_decodes_every_demand_vector() {
    let out = run(&[
        "verify", "--files", "3", "--users", "3", "--memory", "1", "--file-bits", "1200",
        "--demands", "worst-exhaustive",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("27/27 demand vectors decoded"));
}

#[test]
fn two_user_simulation_matches_three_quarters() {
    let out = run(&[
        "simulate", "--files", "2", "--users", "2", "--memory", "1", "--file-bits", "1000000",
        "--demands", "distinct",
    ]);
    assert!(out.status.success());
    let rate: f64 = column(&stdout(&out), "measured_rate")[0].parse().unwrap();
    assert!((rate - 0.75).abs() <= 0.02 * 0.75, "{rate}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "sweep", "--files", "4", "--users", "3", "--memory", "0:4:1", "--file-bits", "2000",
        "--demands", "random", "--trials", "3", "--seed", "7",
    ];
    let a = run(&args);
    let b = bin().args(args).env("CODED_CACHE_THREADS", "3").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("# seed=7\n"));
}

#[test]
fn trials_report_sample_std() {
    let out = run(&[
        "simulate", "--files", "3", "--users", "2", "--memory", "1", "--demands", "random",
        "--trials", "4",
    ]);
    let text = stdout(&out);
    let std: f64 = column(&text, "std_rate")[0].parse().unwrap();
    assert!(std >= 0.0);
    assert_eq!(column(&text, "trials")[0], "4");
}

#[test]
fn json_and_csv_carry_the_same_values() {
    let args = ["analytic", "--files", "10", "--users", "5", "--memory", "0:10:5"];
    let csv = stdout(&run(&args));
    let json_out = run(&[&args[..], &["--format", "json"]].concat());
    let doc: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let r_d = column(&csv, "R_D");
    assert_eq!(rows.len(), r_d.len());
    for (row, text) in rows.iter().zip(&r_d) {
        assert_eq!(row["R_D"].as_f64().unwrap(), text.parse::<f64>().unwrap());
    }
}

#[test]
fn approximation_columns_follow_their_ranges() {
    let out = run(&[
        "analytic", "--files", "100", "--users", "5", "--memory", "0:100:20", "--approx",
    ]);
    let text = stdout(&out);
    let small = column(&text, "approx_small");
    let large = column(&text, "approx_large");
    assert_eq!(small[0], "5");
    assert_eq!(large[0], "");
    // M = N/K = 20 lies in both ranges
    assert_eq!(small[1], "2.5");
    assert_eq!(large[1], "4");
    assert_eq!(small[2], "");
}

#[test]
fn mixture_weights_sum_to_one() {
    let out = run(&["analytic", "--files", "16", "--users", "16", "--memory", "4", "--mixture"]);
    assert!(out.status.success());
    let p: f64 = column(&stdout(&out), "p_s")
        .iter()
        .map(|x| x.parse::<f64>().unwrap())
        .sum();
    assert!((p - 1.0).abs() < 1e-9);
}

#[test]
fn tree_reports_every_link_and_decodes() {
    let out = run(&[
        "tree", "--topology", &data("tree6.json"), "--files", "6", "--memory", "2",
        "--file-bits", "20000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# decoded=true"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 11);
    let leaves: Vec<_> = rows.iter().filter(|r| r[2] == "1").collect();
    assert_eq!(leaves.len(), 6);
    for leaf in leaves {
        let rate: f64 = leaf[5].parse().unwrap();
        assert!((rate - 2.0 / 3.0).abs() < 0.05, "{rate}");
    }
}

#[test]
fn shared_caches_track_the_formula() {
    let out = run(&[
        "shared", "--files", "6", "--users", "6", "--memory", "1.25", "--file-bits", "60000",
        "--group-size", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let measured: f64 = column(&text, "measured_rate")[0].parse().unwrap();
    let predicted: f64 = column(&text, "R_shared")[0].parse().unwrap();
    assert!((measured - predicted).abs() / predicted < 0.03);
    assert_eq!(column(&text, "decoded")[0], "true");
}

#[test]
fn async_rounds_follow_arrivals() {
    let out = run(&[
        "async", "--files", "3", "--users", "3", "--memory", "1", "--file-bits", "1200",
        "--segments", "4", "--arrivals", &data("staggered.csv"),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        column(&text, "users"),
        ["1", "1;2", "1;2", "1;2;3", "2;3", "3", "3"]
    );
    assert!(text.contains("# delays=0;0.5;0.5\n"));
    assert!(text.contains("# decoded=true\n"));
}

#[test]
fn invalid_config_exits_with_one_line() {
    let out = run(&["simulate", "--files", "2", "--users", "2", "--memory", "3"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: "));
}

#[test]
fn simulate_rejects_ranges() {
    let out = run(&["simulate", "--files", "2", "--users", "2", "--memory", "0:2:1"]);
    assert!(!out.status.success());
}

#[test]
fn explicit_demands_are_one_based() {
    let out = run(&[
        "simulate", "--files", "3", "--users", "3", "--memory", "1", "--file-bits", "3000",
        "--demands", "1,1,3",
    ]);
    assert!(out.status.success());
    assert_eq!(column(&stdout(&out), "demands")[0], "1;1;3");
    let bad = run(&["simulate", "--files", "3", "--users", "3", "--memory", "1", "--demands", "1,4,2"]);
    assert!(!bad.status.success());
}

#[test]
fn exhaustive_simulation_names_the_worst_demands() {
    let out = run(&[
        "simulate", "--files", "2", "--users", "2", "--memory", "1", "--file-bits", "4000",
        "--demands", "worst-exhaustive",
    ]);
    let text = stdout(&out);
    let worst = &column(&text, "demands")[0];
    assert!(worst == "1;2" || worst == "2;1", "{worst}");
}

#[test]
fn gaps_stay_within_bounds() {
    let out = run(&["gaps", "--max-files", "8", "--max-users", "8", "--points", "16"]);
    let text = stdout(&out);
    let ratios: Vec<f64> = column(&text, "ratio").iter().map(|r| r.parse().unwrap()).collect();
    assert!(ratios[0] <= 12.0 && ratios[1] <= 1.6);
}
