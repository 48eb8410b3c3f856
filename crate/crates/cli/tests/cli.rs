use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landau-lab"))
        .args(args)
        .env_remove("LANDAU_LAB_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn sf_values() {
    assert_eq!(stdout(&lab(&["sf", "laguerre", "--n", "1", "--t", "2"])).trim(), "-1.00000000000000");
    // M(-3, 1; 2) = L_3(2) = -1/3
    assert_eq!(stdout(&lab(&["sf", "kummer-m", "--a", "-3", "--zeta", "2"])).trim(), "-0.333333333333333");
    assert_eq!(stdout(&lab(&["sf", "elliptic-k", "--m", "0"])).trim(), "1.57079632679490");
    let gl = stdout(&lab(&["sf", "gauss-legendre", "--n", "3"]));
    assert_eq!(gl.lines().count(), 3);
}

#[test]
fn sf_usage_errors() {
    assert!(!lab(&["sf", "laguerre", "--t", "2"]).status.success());
    assert!(!lab(&["sf", "elliptic-k", "--m", "1.5"]).status.success());
}

#[test]
fn kernel_projection_diagonal() {
    // P_n(x, x) = B/(2π)
    let out = stdout(&lab(&["kernel", "projection", "--n", "3", "--x", "0.2", "0.1", "--y", "0.2", "0.1"]));
    let re: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
    assert!((re - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-13);
}

#[test]
fn zero_amplitude_gives_zero_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "zero.toml",
        "n_range = [0, 6]\n[potential]\ntype = \"bump\"\namplitude = 0.0\nradius = 1.0\n",
    );
    let out = stdout(&lab(&["clusters", "--config", &cfg]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "n,width,width_sqrt_n,mu0,mu1,mu2");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        for cell in row.split(',').skip(1) {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0, "{row}");
        }
    }
}

#[test]
fn clusters_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "n_range = [0, 12]\ntruncation = { n_max = 100, k_max = 25 }\n");
    let a = stdout(&lab(&["clusters", "--config", &cfg, "--jobs", "1"]));
    let b = stdout(&lab(&["clusters", "--config", &cfg, "--jobs", "3"]));
    let c = stdout(&lab(&["clusters", "--config", &cfg]));
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.lines().count(), 14);
}

#[test]
fn json_report_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "n_range = [0, 4]\ntruncation = { n_max = 100, k_max = 25 }\nformat = \"json\"\n");
    let out = dir.path().join("out");
    stdout(&lab(&["clusters", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("clusters.json")).unwrap()).unwrap();
    assert_eq!(doc["provenance"]["truncation"]["n_max"], 100);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
    assert!(doc["detail"][3]["deviations"].as_array().unwrap().len() > 1);
}

#[test]
fn config_round_trip_is_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "b = 2.0\nt_list = [0.3]\n[potential]\ntype = \"scaled_sum\"\nbumps = [{ amplitude = 0.1, radius = 0.5 }]\n",
    );
    let canon = stdout(&lab(&["config", "--config", &cfg]));
    let again = write(dir.path(), "canon.toml", &canon);
    assert_eq!(stdout(&lab(&["config", "--config", &again])), canon);
    assert!(canon.contains("scale = 1.0"));
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "b = 0.0\n");
    let o = lab(&["clusters", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn insufficient_truncation_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", "n_range = [0, 20]\ntruncation = { n_max = 30, k_max = 25 }\n");
    let o = lab(&["clusters", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation insufficient"));
}

#[test]
fn check_truncation_passes_at_default_cutoffs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "n_range = [0, 10]\ntruncation = { n_max = 100, k_max = 25 }\n");
    let plain = stdout(&lab(&["clusters", "--config", &cfg]));
    let checked = stdout(&lab(&["clusters", "--config", &cfg, "--check-truncation"]));
    assert_eq!(plain, checked);
}

#[test]
fn strong_potential_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "[potential]\ntype = \"bump\"\namplitude = 10.0\nradius = 1.0\n");
    let o = lab(&["verify", "--config", &cfg]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("outside the validated regime"), "{text}");
}
