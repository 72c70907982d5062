//! The binary end to end: exit codes, error messages and output files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sleepsense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sleepsense")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A short generated session: one turn at 15 s, one talk burst at 20 s.
fn short_session(root: &Path, items: &str) -> std::path::PathBuf {
    let scen = root.join("scenario.txt");
    fs::write(&scen, format!("duration=30\nseed=2\n{items}")).unwrap();
    let out = root.join("session");
    let o = sleepsense(&["generate", "--scenario", path(&scen), "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn unknown_preset_names_the_valid_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sleepsense(&["generate", "--preset", "nap", "--out", path(tmp.path())]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("unknown preset 'nap'"), "{e}");
    for p in ["posture_test", "trouble_sleeping", "successful_sleeping"] {
        assert!(e.contains(p), "{e}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(sleepsense(&["detect"]).status.code(), Some(2));
    assert_eq!(sleepsense(&["frobnicate"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    // both sources at once
    let o = sleepsense(&["generate", "--preset", "posture_test", "--scenario", "x", "--out", path(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    // --duration outside successful_sleeping
    let o = sleepsense(&["generate", "--preset", "posture_test", "--duration", "60", "--out", path(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_threads_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let s = short_session(tmp.path(), "");
    let o = sleepsense(&["detect", "--session", path(&s), "--out", path(&tmp.path().join("d")), "--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn full_pipeline_and_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let s = short_session(tmp.path(), "item=15 17 full_turn 0.5\nitem=20 21 talk 0.5\n");
    let d = tmp.path().join("det");
    let o = sleepsense(&["detect", "--session", path(&s), "--out", path(&d), "--export-clips"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "frames=900 motion=1 light=0 noise=1");
    for f in ["events.log", "scores.csv", "epochs.csv", "config.applied"] {
        assert!(d.join(f).is_file(), "{f}");
    }
    let clips: Vec<_> = fs::read_dir(d.join("clips")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(clips.len(), 3, "{clips:?}"); // depth+color for motion, audio for noise

    let o = sleepsense(&["report", "--session", path(&s), "--detection", path(&d)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(d.join("report.txt")).unwrap();
    assert_eq!(report, String::from_utf8_lossy(&o.stdout));
    assert!(report.contains("duration_seconds=30"));
    assert!(report.contains("cole_proxy_efficiency=n/a"), "{report}");

    let gt = s.join("groundtruth.log");
    let o = sleepsense(&["compare", "--events", path(&d.join("events.log")), "--groundtruth", path(&gt)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    // dropping the detected noise event must cost recall
    let log = fs::read_to_string(d.join("events.log")).unwrap();
    let kept: String = log.lines().filter(|l| !l.starts_with("channel=noise")).map(|l| format!("{l}\n")).collect();
    let partial = tmp.path().join("partial.log");
    fs::write(&partial, kept).unwrap();
    let o = sleepsense(&["compare", "--events", path(&partial), "--groundtruth", path(&gt)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("noise precision=1.000 recall=0.000"));
}

#[test]
fn calm_session_reports_full_sleep() {
    let tmp = tempfile::tempdir().unwrap();
    let scen = tmp.path().join("calm.txt");
    fs::write(&scen, "duration=70\n").unwrap();
    let s = tmp.path().join("s");
    assert!(sleepsense(&["generate", "--scenario", path(&scen), "--out", path(&s)]).status.success());
    let d = tmp.path().join("d");
    assert!(sleepsense(&["detect", "--session", path(&s), "--out", path(&d)]).status.success());
    let o = sleepsense(&["report", "--session", path(&s), "--detection", path(&d), "--out", path(&tmp.path().join("r"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = fs::read_to_string(tmp.path().join("r/report.txt")).unwrap();
    for line in ["calmness_percent=100.00", "sleep_efficiency=1.0000", "cole_proxy_efficiency=1.0000", "efficiencies_diverge=false"] {
        assert!(r.lines().any(|l| l == line), "missing {line} in\n{r}");
    }
}

#[test]
fn missing_config_keys_fall_back_to_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let s = short_session(tmp.path(), "");
    let cfg = tmp.path().join("cfg.txt");
    fs::write(&cfg, "# only one override\ndepth_threshold=0.03\n").unwrap();
    let d = tmp.path().join("d");
    let o = sleepsense(&["detect", "--session", path(&s), "--config", path(&cfg), "--out", path(&d)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let applied = fs::read_to_string(d.join("config.applied")).unwrap();
    assert!(applied.lines().any(|l| l == "depth_threshold=0.03"));
    assert!(applied.lines().any(|l| l == "color_threshold=0.05"));
    assert!(applied.lines().any(|l| l == "depth_gmm_components=3"));

    fs::write(&cfg, "depth_treshold=0.03\n").unwrap();
    let o = sleepsense(&["detect", "--session", path(&s), "--config", path(&cfg), "--out", path(&d)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("depth_treshold"), "{}", stderr(&o));
}

#[test]
fn corrupt_sessions_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let s = short_session(tmp.path(), "");
    let d = tmp.path().join("d");
    let detect = || sleepsense(&["detect", "--session", path(&s), "--out", path(&d)]);

    let manifest = fs::read_to_string(s.join("manifest.txt")).unwrap();
    // one column short of the declared width
    fs::write(s.join("manifest.txt"), manifest.replace("depth_width=64", "depth_width=63")).unwrap();
    let o = detect();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("manifest mismatch: depth stream size"), "{}", stderr(&o));
    fs::write(s.join("manifest.txt"), &manifest).unwrap();

    // 11-bit overflow in the first pixel
    let mut depth = fs::read(s.join("depth.raw")).unwrap();
    depth[..2].copy_from_slice(&4000u16.to_le_bytes());
    fs::write(s.join("depth.raw"), &depth).unwrap();
    let o = detect();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invalid depth sample 4000 in frame 0"), "{}", stderr(&o));

    fs::remove_file(s.join("audio.raw")).unwrap();
    let o = detect();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("corrupt session"), "{}", stderr(&o));
    assert!(!d.join("events.log").exists());
}

#[test]
fn report_needs_detection_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let s = short_session(tmp.path(), "");
    let empty = tmp.path().join("nothing");
    fs::create_dir(&empty).unwrap();
    let o = sleepsense(&["report", "--session", path(&s), "--detection", path(&empty)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!empty.join("report.txt").exists());
}
