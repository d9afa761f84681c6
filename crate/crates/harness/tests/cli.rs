use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
[grid]
bounds = [[-10.0, 10.0]]
modes = 64

[model]
beta = -1.0
sigma = 2

[scheme]
name = "crank-nicolson"
dt = 0.01
t_final = 0.05

[init]
kind = "gaussian"

[output]
snapshots = 2
prefix = "cli"
"#;

fn nlsrelax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsrelax")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let target = dir.path().join("out");
    let out = nlsrelax(&["run", &config, "-o", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[scheme]"), "resolved config is echoed");
    assert!(target.join("cli_crank-nicolson_dt1e-2.csv").exists());
    assert!(target.join("cli_crank-nicolson_dt1e-2_snap0000.toml").exists());
    assert!(target.join("cli_crank-nicolson_dt1e-2_snap0003.bin").exists());
}

#[test]
fn invalid_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SMALL.replace("modes = 64", "modes = -4"), "grid.modes"),
        (SMALL.replace("t_final = 0.05", "t_final = 0.055"), "t_final"),
        (SMALL.replace("prefix = \"cli\"", "prefix = \"cli\"\ncolour = 1"), "colour"),
        (SMALL.replace("crank-nicolson", "leapfrog"), "leapfrog"),
        (SMALL.replace("beta = -1.0", "beta = -1.0\nalpha2 = 0.5"), "alpha"),
    ];
    for (text, needle) in cases {
        let config = write_config(dir.path(), &text);
        let out = nlsrelax(&["run", &config, "-o", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{needle}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{needle}: {}", stderr(&out));
    }
    let out = nlsrelax(&["run", "no-such-config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("[output]", "[solver]\nfp_max_iter = 1\n\n[output]");
    let config = write_config(dir.path(), &text);
    let out = nlsrelax(&["run", &config, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let out = nlsrelax(&["run", &config, "-o", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn converge_prints_slopes_and_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("t_final = 0.05", "t_final = 0.1");
    let config = write_config(dir.path(), &text);
    let out = nlsrelax(&["converge", &config, "--dts", "0.02,0.01,0.002", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("solution error slope"));
    let tables: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with("_convergence.csv"))
        .collect();
    assert_eq!(tables.len(), 1);

    let narrow = nlsrelax(&["converge", &config, "--dts", "0.02,0.01,0.005"]);
    assert_eq!(narrow.status.code(), Some(2));
}

#[test]
fn catalog_is_listed_and_described() {
    let out = nlsrelax(&["list-experiments"]);
    assert_eq!(out.status.code(), Some(0));
    let listing = String::from_utf8_lossy(&out.stdout);
    for name in ["quintic", "septic", "vortex-2d", "dipolar-bec", "dark-solitons-defocusing-mu2.5"] {
        assert!(listing.contains(name), "{name}");
    }
    let out = nlsrelax(&["describe", "septic"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let parsed = nlsrelax::parse_config_str(&text).unwrap();
    assert_eq!(parsed.model.sigma, Some(3));
    assert_eq!(nlsrelax(&["describe", "nothing"]).status.code(), Some(2));
}
