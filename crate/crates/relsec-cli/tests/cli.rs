//! End-to-end tests of the `relsec` binary: exit codes, CSV shape,
//! determinism, and the config round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn relsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relsec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("relsec-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn list_presets_names_all_variants() {
    let out = relsec(&["--list-presets"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in [
        "fig2",
        "fig2-rs2",
        "fig3",
        "fig3-th15",
        "fig4-n1",
        "fig4-n2",
        "fig4-n3",
        "fig4",
        "fig5",
        "fig5-bsk10",
    ] {
        assert!(text.contains(id), "missing preset {id} in:\n{text}");
    }
}

#[test]
fn sweep_emits_cartesian_csv() {
    let out = relsec(&[
        "sweep",
        "--preset",
        "fig2",
        "--snr-db",
        "0:20:10",
        "--engines",
        "analytic",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "snr_db,scheme,engine,outage,stderr,trials,seed");
    // 3 SNR points x 3 schemes x 1 engine
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines[1].starts_with("0,TS,analytic,"));
    assert!(lines[9].starts_with("20,OS,analytic,"));
}

#[test]
fn sweep_reruns_byte_identical() {
    let args = [
        "sweep",
        "--preset",
        "fig4-n2",
        "--snr-db",
        "6:18:6",
        "--engines",
        "analytic,mc",
        "--trials",
        "20000",
        "--seed",
        "42",
    ];
    let a = relsec(&args);
    let b = relsec(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    // engine columns: mc rows carry stderr/trials/seed, analytic rows don't
    let text = stdout(&a);
    let mc_row = text
        .lines()
        .find(|l| l.contains(",mc,"))
        .expect("has mc rows");
    assert!(mc_row.ends_with(",20000,42"));
    let an_row = text
        .lines()
        .find(|l| l.contains(",analytic,"))
        .expect("has analytic rows");
    assert!(an_row.ends_with(",,,"));
}

#[test]
fn unknown_preset_is_config_error() {
    let out = relsec(&["sweep", "--preset", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_override_is_config_error() {
    let out = relsec(&["sweep", "--preset", "fig2", "--override", "bogus=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = relsec(&["sweep", "--preset", "fig2", "--override", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_preset_requires_link_overrides() {
    let out = relsec(&["sweep", "--preset", "custom", "--snr-db", "0:10:5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = relsec(&[
        "sweep",
        "--preset",
        "custom",
        "--snr-db",
        "0:10:5",
        "--override",
        "n=2",
        "--override",
        "beta_sk=10,10",
        "--override",
        "beta_kd=10,10",
        "--override",
        "alpha_ke=3,3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).lines().count(), 1 + 3 * 3);
}

#[test]
fn assert_agreement_passes_on_consistent_run() {
    let out = relsec(&[
        "sweep",
        "--preset",
        "fig4-n1",
        "--snr-db",
        "8:16:8",
        "--engines",
        "analytic,mc",
        "--trials",
        "200000",
        "--seed",
        "42",
        "--assert-agreement",
        "3sigma",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn assert_agreement_detects_mismatch() {
    // With a handful of trials the estimate is so coarse that a tight
    // sigma multiple must trip on some point of the grid.
    let out = relsec(&[
        "sweep",
        "--preset",
        "fig2",
        "--snr-db",
        "0:20:4",
        "--engines",
        "analytic,mc",
        "--trials",
        "10",
        "--seed",
        "1",
        "--assert-agreement",
        "0.001sigma",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle disagreement"));
}

#[test]
fn assert_agreement_requires_both_engines() {
    let out = relsec(&[
        "sweep",
        "--preset",
        "fig2",
        "--engines",
        "analytic",
        "--assert-agreement",
        "3sigma",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn show_config_round_trips_through_sweep() {
    let show = relsec(&["show-config", "--preset", "fig5-bsk10"]);
    assert!(show.status.success());
    let cfg_path = tmp_path("roundtrip.cfg");
    std::fs::write(&cfg_path, stdout(&show)).unwrap();

    let direct = relsec(&[
        "sweep",
        "--preset",
        "fig5-bsk10",
        "--snr-db",
        "0:40:20",
        "--engines",
        "analytic",
    ]);
    let via_config = relsec(&[
        "sweep",
        "--config",
        cfg_path.to_str().unwrap(),
        "--snr-db",
        "0:40:20",
        "--engines",
        "analytic",
    ]);
    assert!(direct.status.success() && via_config.status.success());
    assert_eq!(direct.stdout, via_config.stdout);
    std::fs::remove_file(&cfg_path).ok();
}

#[test]
fn emit_config_is_reparseable_and_canonical() {
    let cfg_path = tmp_path("emitted.cfg");
    let out = relsec(&[
        "sweep",
        "--preset",
        "fig3",
        "--snr-db",
        "6:12:3",
        "--engines",
        "analytic",
        "--override",
        "alpha_ke=1,2,3,4",
        "--emit-config",
        cfg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&cfg_path).unwrap();
    let spec = relsec::parse_config(&text).unwrap();
    assert_eq!(relsec::emit_config(&spec), text);
    std::fs::remove_file(&cfg_path).ok();
}

#[test]
fn config_parse_error_carries_line_info() {
    let cfg_path = tmp_path("broken.cfg");
    std::fs::write(&cfg_path, "[sweep]\npreset = fig2\ntrials = soon\n").unwrap();
    let out = relsec(&["sweep", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("trials"), "{err}");
    std::fs::remove_file(&cfg_path).ok();
}

#[test]
fn out_flag_writes_file() {
    let csv_path = tmp_path("out.csv");
    let out = relsec(&[
        "sweep",
        "--preset",
        "fig2",
        "--snr-db",
        "10:10:1",
        "--engines",
        "analytic",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);
    std::fs::remove_file(&csv_path).ok();
}
