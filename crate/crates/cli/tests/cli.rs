use std::fs;
use std::path::Path;

use clap::Parser;
use optoarray_cli::{run, Cli, EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn invoke(args: &[&str]) -> Run {
    let cli = Cli::try_parse_from(std::iter::once("optoarray").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(cli, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn with_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn scan_stack_emits_provenance_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "s.conf", "[stack]\nn = 3\nzeta_re = -0.5\n[sweep]\nsamples = 5\n");
    let r = invoke(&["scan-stack", "--config", &cfg]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(lines[0].starts_with("# optoarray "));
    assert!(lines.contains(&"# command = scan-stack"));
    assert!(lines.contains(&"# stack.n = 3"));
    assert!(lines.contains(&"# sweep.start = 0.001"));
    assert!(lines.contains(&"d,R,T"));
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn lossy_scan_adds_absorption_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "s.conf", "[stack]\nn = 3\nzeta_re = -0.5\nzeta_im = 0.01\n[sweep]\nsamples = 3\n");
    let r = invoke(&["scan-stack", "--config", &cfg]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.lines().any(|l| l == "d,R,T,A"));
}

#[test]
fn config_overrides_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "o.conf", "[sweep]\nsamples = 4\n");
    let r = invoke(&["scan-stack", "--preset", "fig2", "--config", &cfg]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("# sweep.samples = 4"));
    assert_eq!(r.stdout.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn single_element_coupling_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "c.conf", "[stack]\nn = 1\nzeta_re = -0.5\n");
    let r = invoke(&["coupling", "--config", &cfg]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.stderr.starts_with("error:"));
    assert!(r.stdout.is_empty());
}

#[test]
fn tiny_search_range_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "o.conf", "[optimize]\nn_max = 1\n[sweep]\nsamples = 2\n");
    let r = invoke(&["optimize", "--config", &cfg]);
    assert_eq!(r.code, EXIT_VALIDATION);
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "s.conf", "[stack]\nn = 3\nzeta_re = -0.5\nzeta = 1\n");
    let r = invoke(&["scan-stack", "--config", &cfg]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.stderr.contains("stack.zeta"), "{}", r.stderr);
}

#[test]
fn malformed_value_and_missing_file_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "s.conf", "[stack]\nn = three\nzeta_re = -0.5\n");
    assert_eq!(invoke(&["scan-stack", "--config", &cfg]).code, EXIT_VALIDATION);
    let missing = dir.path().join("absent.conf").display().to_string();
    assert_eq!(invoke(&["scan-stack", "--config", &missing]).code, EXIT_VALIDATION);
}

#[test]
fn preset_for_another_command_is_refused() {
    let r = invoke(&["coupling", "--preset", "fig2"]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.stderr.contains("scan-stack"));
    assert_eq!(invoke(&["coupling", "--preset", "nope"]).code, EXIT_VALIDATION);
}

#[test]
fn presets_are_listed() {
    let r = invoke(&["presets"]);
    assert_eq!(r.code, EXIT_OK);
    for name in ["fig2", "fig3", "fig6-l1", "fig11b", "bare"] {
        assert!(r.stdout.lines().any(|l| l == name), "{name}");
    }
}

#[test]
fn selftest_passes_and_injected_faults_fail() {
    let r = invoke(&["selftest"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
    let (summary, checks) = r.stdout.trim_end().rsplit_once('\n').map(|(a, b)| (b, a)).unwrap();
    assert!(checks.lines().all(|l| l.starts_with("PASS")));
    assert!(summary.ends_with("0 failed"));
    let r = invoke(&["selftest", "--inject", "element-sign"]);
    assert_eq!(r.code, EXIT_NUMERIC);
    assert!(r.stdout.lines().any(|l| l.starts_with("FAIL")));
    assert_eq!(invoke(&["selftest", "--inject", "chebyshev"]).code, EXIT_NUMERIC);
}

#[test]
fn output_file_receives_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "s.conf", "[stack]\nn = 2\nzeta_re = -1\n[sweep]\nsamples = 3\n");
    let out = dir.path().join("t.csv");
    let r = invoke(&["scan-stack", "--config", &cfg, "--out", &out.display().to_string()]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.is_empty());
    assert!(fs::read_to_string(out).unwrap().contains("d,R,T"));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(
        dir.path(),
        "m.conf",
        "command = cavity-map\n[stack]\nn = 4\nzeta_re = -0.5\npoint = 1\n[map]\naxis = sinusoid\namplitude_samples = 5\nk_samples = 21\n",
    );
    let outputs: Vec<String> = ["1", "4", "16"]
        .iter()
        .map(|w| {
            let r = invoke(&["cavity-map", "--config", &cfg, "--workers", w]);
            assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
            r.stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}
