//! End-to-end checks of the binary: exit codes, file outputs, and
//! worker-count independence of the emitted bytes.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_impact-billiards"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir =
        std::env::temp_dir().join(format!("impact-billiards-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const CROSS: &str = r#"{
  "polygon": {"quadrants": {
    "++": {"xs": [1.0, 2.0], "ys": [2.0, 1.0]},
    "-+": {"xs": [1.0, 2.0], "ys": [2.0, 1.0]},
    "--": {"xs": [1.0, 2.0], "ys": [2.0, 1.0]},
    "+-": {"xs": [1.0, 2.0], "ys": [2.0, 1.0]}}},
  "v1": {"kind": "quadratic", "omega": 1.0},
  "v2": {"kind": "quadratic", "omega": 1.0}
}"#;

#[test]
fn validate_and_exit_codes() {
    let dir = workdir("codes");
    let cfg = dir.join("cross.json");
    std::fs::write(&cfg, CROSS).unwrap();

    let out = bin()
        .args(["validate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("polygon ok"));

    // unknown flag: usage, exit 1
    let out = bin()
        .args(["validate", "--config"])
        .arg(&cfg)
        .args(["--bogus", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("usage")
            || String::from_utf8_lossy(&out.stderr).contains("commands")
    );

    // invalid polygon: domain error, exit 2
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        CROSS.replace(
            "\"xs\": [1.0, 2.0], \"ys\": [2.0, 1.0]}}",
            "\"xs\": [2.0, 1.0], \"ys\": [2.0, 1.0]}}",
        ),
    )
    .unwrap();
    let out = bin()
        .args(["validate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // unreadable config: IO error, exit 3
    let out = bin()
        .args(["validate", "--config", "/nonexistent/path.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // domain error in parameters: exit 2
    let out = bin()
        .args(["genus", "--config"])
        .arg(&cfg)
        .args(["--E", "-1.0", "--e1-steps", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn genus_and_psi_table_emit_csv() {
    let dir = workdir("tables");
    let cfg = dir.join("cross.json");
    std::fs::write(&cfg, CROSS).unwrap();
    let out_csv = dir.join("genus.csv");
    let out = bin()
        .args(["genus", "--config"])
        .arg(&cfg)
        .args(["--E", "2.0", "--e1-steps", "100", "--out"])
        .arg(&out_csv)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert!(text.starts_with("E1,genus\n"));
    assert_eq!(text.lines().count(), 101);
    // the symmetric cross at E=2 sweeps 1 -> 5 -> 1
    assert!(text.lines().any(|l| l.ends_with(",5")));
    assert!(text.lines().nth(1).unwrap().ends_with(",1"));

    let out = bin()
        .args(["psi-table", "--config"])
        .arg(&cfg)
        .args(["--E", "1.0", "--x-steps", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("x,E,psi,dpsi_dE\n"));
    assert!(text.trim_end().lines().last().unwrap().ends_with("-inf"));
}

#[test]
fn sweep_is_worker_count_invariant() {
    let dir = workdir("sweep");
    let cfg = dir.join("cross.json");
    std::fs::write(&cfg, CROSS).unwrap();
    let (a, b) = (dir.join("w1.csv"), dir.join("w3.csv"));
    for (workers, path) in [("1", &a), ("3", &b)] {
        let out = bin()
            .args(["sweep", "--config"])
            .arg(&cfg)
            .args([
                "--E",
                "2.0",
                "--e1-steps",
                "257",
                "--m",
                "1",
                "--n",
                "1",
                "--c",
                "1.0",
                "--seed",
                "9",
                "--workers",
                workers,
                "--out",
            ])
            .arg(path)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let wa = std::fs::read(&a).unwrap();
    let wb = std::fs::read(&b).unwrap();
    assert_eq!(wa, wb, "sweep output depends on worker count");
    let text = String::from_utf8(wa).unwrap();
    assert!(text.starts_with("E1,genus,delta_green,delta_red,u_sign\n"));
    assert!(text.contains(",U-"));
}

#[test]
fn iembd_emits_svg_and_csv() {
    let dir = workdir("iembd");
    let cfg = dir.join("cross.json");
    std::fs::write(&cfg, CROSS).unwrap();
    let svg = dir.join("d.svg");
    let csv = dir.join("d.csv");
    let out_arg = format!("{},{}", svg.display(), csv.display());
    let out = bin()
        .args(["iembd", "--config"])
        .arg(&cfg)
        .args(["--emax", "4.0", "--res", "64", "--out", &out_arg])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<?xml"));
    assert!(svg_text.contains("data-multiplicity=\"4\""));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("E,E1,genus,"));
    assert_eq!(csv_text.lines().count(), 64 * 64 + 1);
}

#[test]
fn resonance_scenarios_and_simulation() {
    let dir = workdir("res");
    let cfg = dir.join("cross.json");
    std::fs::write(&cfg, CROSS).unwrap();
    let scen = dir.join("scenario.csv");
    let out = bin()
        .args(["resonance", "--config"])
        .arg(&cfg)
        .args(["--m", "1", "--n", "1", "--c", "1.0", "--E", "2.0", "--out"])
        .arg(&scen)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&scen).unwrap();
    assert!(text.starts_with("e1_lo,e1_hi,scenario,"));
    assert!(text.contains(",cp,") || text.contains(",coex,") || text.contains(",ue"));

    let traj = dir.join("traj.csv");
    let ev = dir.join("events.csv");
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args([
            "--E",
            "2.0",
            "--E1",
            "1.0",
            "--start",
            "0.3,-0.2,1,1",
            "--t",
            "30.0",
            "--sample-dt",
            "0.05",
            "--out",
        ])
        .arg(&traj)
        .arg("--events-out")
        .arg(&ev)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&traj).unwrap();
    assert!(text.starts_with("t,x,y,px,py\n"));
    assert!(text.lines().count() > 30 / 5 * 100 / 2); // many samples
    let ev_text = std::fs::read_to_string(&ev).unwrap();
    assert!(ev_text.starts_with("index,t,wall,quadrant,axis,extremal_side\n"));
    assert!(ev_text.lines().count() > 3);
}

#[test]
fn ergodic_test_reports_deterministically() {
    let dir = workdir("ergodic");
    let cfg = dir.join("cross.json");
    // non-resonant pair so the test passes on this level set
    std::fs::write(
        &cfg,
        CROSS.replace(
            "\"v1\": {\"kind\": \"quadratic\", \"omega\": 1.0}",
            "\"v1\": {\"kind\": \"quadratic\", \"omega\": 1.4142135623730951}",
        ),
    )
    .unwrap();
    let (ja, jb) = (dir.join("a.json"), dir.join("b.json"));
    for path in [&ja, &jb] {
        let out = bin()
            .args(["ergodic-test", "--config"])
            .arg(&cfg)
            .args([
                "--E",
                "0.4",
                "--E1",
                "0.2",
                "--T",
                "800",
                "--grid",
                "16",
                "--starts",
                "4",
                "--seed",
                "11",
                "--tol",
                "0.2",
                "--out-json",
            ])
            .arg(path)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = std::fs::read(&ja).unwrap();
    let b = std::fs::read(&jb).unwrap();
    assert_eq!(a, b);
    let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert!(parsed["sup_cell_error"].as_f64().unwrap() >= 0.0);
    assert!(parsed["passed"].as_bool().unwrap());
}
