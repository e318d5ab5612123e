//! The `hstn` binary end to end: outputs, exit codes and flag handling.

use std::path::Path;
use std::process::{Command, Output};

use hstn_cli::output::{determinism_hash, read_csv, COLUMNS, SWEEP_SCHEMA};

const BASE: &str = r#"
name = "smoke"
seed = 5
methods = ["exact", "asymptotic", "numeric", "montecarlo"]

[sweep]
axis = "eta"
start = 20
stop = 30
step = 5

[monte_carlo]
trials = 20000

[system]
relays = 2
path_loss_exp = 2
threshold_db = 0

[hardware]
kappa_s = 0.3
kappa_u = 0.3

[satellite]
m_su = 1
b_su = 0.063
omega_su = 0.0007

[terrestrial]
family = "nakagami"
m_ud = 1
omega_ud = 1

[mobility]
height_h = 40
radius_r = 80
walk_range = 40
v_vert_min = 0.1
v_vert_max = 30
stay_probability = 0.5
"#;

fn hstn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hstn"))
        .args(args)
        .current_dir(dir)
        .env_remove("HSTN_WORKERS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn sweep_writes_schema_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "smoke.toml", BASE);
    let o = hstn(&["sweep", "--config", &cfg, "--out", "out.csv", "--workers", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SWEEP_SCHEMA));
    assert_eq!(lines.next(), Some(COLUMNS.join(",").as_str()));
    let rows = read_csv(&dir.path().join("out.csv")).unwrap();
    assert_eq!(rows.len(), 4 * 3);
    let methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    let want: Vec<&str> = ["exact", "asymptotic", "numeric", "montecarlo"]
        .iter()
        .flat_map(|m| [*m; 3])
        .collect();
    assert_eq!(methods, want);
    assert_eq!(rows[..3].iter().map(|r| r.x_value_db).collect::<Vec<_>>(), [20.0, 25.0, 30.0]);
    for r in &rows {
        assert_eq!(r.status, "ok");
        assert!(r.op_value.unwrap() > 0.0);
        assert_eq!(r.trials.is_some(), r.method == "montecarlo");
    }
    assert!(stdout(&o).contains(&determinism_hash(&rows)));
}

#[test]
fn empty_sweep_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("stop = 30", "stop = 20").replace(
        "methods = [\"exact\", \"asymptotic\", \"numeric\", \"montecarlo\"]",
        "methods = [\"exact\"]",
    );
    let cfg = write(dir.path(), "one.toml", &text);
    let o = hstn(&["sweep", "--config", &cfg, "--out", "one.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_csv(&dir.path().join("one.csv")).unwrap().len(), 1);
    let o = hstn(&["plot", "one.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("one.svg").exists());
}

#[test]
fn output_defaults_to_the_file_then_the_name() {
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("methods = [\"exact\", \"asymptotic\", \"numeric\", \"montecarlo\"]", "methods = [\"exact\"]");
    let cfg = write(dir.path(), "a.toml", &text);
    assert!(hstn(&["sweep", "--config", &cfg], dir.path()).status.success());
    assert!(dir.path().join("smoke.csv").exists());
    let cfg = write(dir.path(), "b.toml", &format!("output = \"named.csv\"\n{text}"));
    assert!(hstn(&["sweep", "--config", &cfg], dir.path()).status.success());
    assert!(dir.path().join("named.csv").exists());
}

#[test]
fn config_errors_exit_one_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &BASE.replace("relays = 2", "relays = 2\nrelais = 3"));
    let o = hstn(&["sweep", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("relais") && err.contains("line"), "{err}");

    let cfg = write(dir.path(), "bad2.toml", &BASE.replace("step = 5", "step = 0"));
    let o = hstn(&["sweep", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sweep.step"));

    let o = hstn(&["sweep"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = hstn(&["ceiling", "--kappa-s", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstn(&["sweep", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let cfg = write(dir.path(), "ok.toml", &BASE.replace("\"numeric\", \"montecarlo\"", "\"numeric\""));
    let o = hstn(&["sweep", "--config", &cfg, "--out", "no/such/dir/out.csv"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = hstn(&["plot", "nothing.csv"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn all_points_failing_exits_two() {
    // 10^4000 overflows: every point's SNR is infinite
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("start = 20", "start = 4000").replace("stop = 30", "stop = 4010");
    let cfg = write(dir.path(), "inf.toml", &text);
    let o = hstn(&["sweep", "--config", &cfg, "--out", "inf.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    // a partial failure keeps going and flags the row
    let text = BASE.replace("stop = 30", "stop = 4000").replace("step = 5", "step = 3980");
    let cfg = write(dir.path(), "part.toml", &text);
    let o = hstn(&["sweep", "--config", &cfg, "--out", "part.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("part.csv")).unwrap();
    assert!(rows.iter().filter(|r| r.x_value_db == 20.0).all(|r| r.status == "ok"));
    assert!(rows.iter().filter(|r| r.x_value_db == 4000.0).all(|r| r.status.starts_with("error: ")));
    let o = hstn(&["plot", "part.csv", "--out", "part.svg"], dir.path());
    assert!(o.status.success());
    let svg = std::fs::read_to_string(dir.path().join("part.svg")).unwrap();
    assert!(svg.contains("excluded: error"));
}

#[test]
fn plot_reports_missing_columns() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "thin.csv", "scenario,method,x_value_db\na,exact,1\n");
    let o = hstn(&["plot", "thin.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing column `x_axis_name`"), "{}", stderr(&o));
}

#[test]
fn worker_flag_beats_environment_and_neither_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "mc.toml", &BASE.replace("\"exact\", \"asymptotic\", \"numeric\", ", ""));
    let run = |env: Option<&str>, flag: Option<&str>, out: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_hstn"));
        c.args(["sweep", "--config", &cfg, "--out", out]).current_dir(dir.path());
        c.env_remove("HSTN_WORKERS");
        if let Some(e) = env {
            c.env("HSTN_WORKERS", e);
        }
        if let Some(f) = flag {
            c.args(["--workers", f]);
        }
        c.output().unwrap()
    };
    // an invalid environment value is ignored when the flag is given
    let o = run(Some("0"), Some("3"), "a.csv");
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(Some("0"), None, "b.csv");
    assert_eq!(o.status.code(), Some(1), "environment value is read");
    let o = run(Some("2"), None, "c.csv");
    assert!(o.status.success());
    let a = read_csv(&dir.path().join("a.csv")).unwrap();
    let c = read_csv(&dir.path().join("c.csv")).unwrap();
    assert_eq!(determinism_hash(&a), determinism_hash(&c));
}

#[test]
fn seed_and_trials_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "mc.toml", &BASE.replace("\"exact\", \"asymptotic\", \"numeric\", ", ""));
    let go = |extra: &[&str], out: &str| {
        let mut args = vec!["sweep", "--config", cfg.as_str(), "--out", out];
        args.extend_from_slice(extra);
        assert!(hstn(&args, dir.path()).status.success());
        read_csv(&dir.path().join(out)).unwrap()
    };
    let base = go(&[], "base.csv");
    let same = go(&["--seed", "5"], "same.csv");
    let other = go(&["--seed", "6"], "other.csv");
    let more = go(&["--trials", "40000"], "more.csv");
    assert_eq!(determinism_hash(&base), determinism_hash(&same));
    assert_ne!(determinism_hash(&base), determinism_hash(&other));
    assert!(more.iter().all(|r| r.trials == Some(40000)));
    assert!(base.iter().all(|r| r.trials == Some(20000)));
}

#[test]
fn ceiling_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstn(&["ceiling", "--kappa-s", "0.1", "--kappa-u", "0.1"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("16.968 dB"));
    let o = hstn(&["ceiling", "--kappa-s", "0"], dir.path());
    assert!(stdout(&o).contains("infinite (no ceiling)"));
}

#[test]
fn mobility_check_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstn(&["mobility-check", "--samples", "200000", "--out", "mob.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("snapshot L1") && out.contains("trajectory L1"), "{out}");
    assert!(std::fs::read_to_string(dir.path().join("mob.csv")).unwrap().starts_with("# hstn-mobility-csv v1"));

    // a full experiment file is accepted; p_s = 1 skips the trajectory
    let cfg = write(dir.path(), "still.toml", &BASE.replace("stay_probability = 0.5", "stay_probability = 1.0"));
    let o = hstn(&["mobility-check", "--config", &cfg, "--samples", "1000", "--out", "m2.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("skipped"));

    let o = hstn(&["mobility-check", "--samples", "0", "--out", "m3.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reproduce_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstn(&["reproduce", "fig2", "--out", "f2.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("f2.csv")).unwrap();
    assert_eq!(rows.len(), 6 * 2 * 13);
    let svg = std::fs::read_to_string(dir.path().join("f2.svg")).unwrap();
    assert!(svg.contains("rician K=2 heavy"));
    let o = hstn(&["reproduce", "fig9"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
