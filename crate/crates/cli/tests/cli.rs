use std::fs;
use std::process::{Command, Output};

fn teleport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teleport"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn state_prints_ghz_at_rest() {
    let out = teleport(&["state", "--channel", "ghz"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).take(8).collect();
    assert!(rows[0].starts_with("+0.50000000+0.00000000i"));
    assert!(rows[7].ends_with("+0.50000000+0.00000000i"));
    assert!(text.contains("trace 1.000000000000"));
}

#[test]
fn closed_form_state() {
    let out = teleport(&[
        "state",
        "--channel",
        "w",
        "--r1",
        "0.3",
        "--r2",
        "0.3",
        "--r3",
        "0.3",
        "--form",
        "closed",
    ]);
    assert!(out.status.success());
}

#[test]
fn teleport_spot_value() {
    let out = teleport(&[
        "teleport",
        "--channel",
        "w",
        "--alpha-sq",
        "0.5",
        "--r",
        "0.5",
        "--bell",
        "psi_plus",
        "--charlie",
        "z0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("correction X valid true"));
    let closed: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("fidelity_closed "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((closed - 0.6816).abs() < 5e-4);
}

#[test]
fn invalid_inputs_exit_one() {
    assert_eq!(
        teleport(&["teleport", "--channel", "ghz", "--charlie", "z0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(teleport(&["teleport", "--r", "1.0"]).status.code(), Some(1));
    assert_eq!(
        teleport(&["state", "--channel", "bell"]).status.code(),
        Some(1)
    );
    assert_eq!(
        teleport(&["sweep", "--grid-step", "0", "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(teleport(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn io_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out_dir = blocker.join("sub");
    let out = teleport(&[
        "sweep",
        "--grid-stop",
        "0.1",
        "--grid-step",
        "0.1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.conf");
    let out = teleport(&["--config", missing.to_str().unwrap(), "compare"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_and_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = teleport(&[
        "sweep",
        "--grid-stop",
        "0.4",
        "--grid-step",
        "0.2",
        "--figures",
        "--svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("channel,info_kind,r0,r1,r2,r3,alpha_sq,bell,charlie,probability,fidelity_oracle,fidelity_closed,valid\n"));
    // 3 channels x 3 points x (1 + 3 r0 values)
    assert_eq!(csv.lines().count(), 1 + 36);
    for panel in ["fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b"] {
        assert!(dir.path().join(format!("{panel}.csv")).exists());
        assert!(dir.path().join(format!("{panel}.svg")).exists());
    }
    let fig2b = fs::read_to_string(dir.path().join("fig2b.csv")).unwrap();
    assert_eq!(fig2b.lines().count(), 1 + 3 * 3);
}

#[test]
fn sweep_is_byte_stable() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = teleport(&[
            "sweep",
            "--grid-step",
            "0.13",
            "--branches",
            "all_branches",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
        fs::read(dir.path().join("sweep.csv")).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn config_file_with_cli_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# comparison\nchannel=all\ninfo-kind=non_accelerated\ngrid-stop=0.2\ngrid-step=0.1\nalpha_sq=0.9\n").unwrap();
    let out = teleport(&[
        "--config",
        conf.to_str().unwrap(),
        "compare",
        "--alpha-sq",
        "0.5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("# group info_kind=non_accelerated r0=-\n"));
    assert_eq!(text.matches("# group").count(), 1);
    assert!(text.contains(",3,"));

    fs::write(&conf, "colour=blue\n").unwrap();
    let out = teleport(&["--config", conf.to_str().unwrap(), "compare"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn audit_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("audit.csv");
    let out = teleport(&[
        "audit",
        "--grid-step",
        "0.4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# fidelity formulas"));
    assert_eq!(
        text.lines()
            .filter(|l| l.contains(",MISMATCH") || l.contains(",CONFIRMED"))
            .count(),
        8 + 7
    );
    assert!(text.contains("\nw,7,7,"));
}
