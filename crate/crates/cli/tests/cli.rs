use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], input: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embtensor")).args(args).arg(input).output().expect("binary runs")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("embtensor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Residual lines of each `[check …]` section, with the route name dropped.
fn supports(machine: &str) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for line in machine.lines() {
        if line.starts_with("[check ") {
            out.push(Vec::new());
        } else if let (Some(r), Some(cur)) = (line.strip_prefix("residual = "), out.last_mut()) {
            cur.push(r.to_string());
        }
    }
    out
}

#[test]
fn abelian_is_lie() {
    let o = run(&["check-lie"], &fixture("abelian.emb"));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: verified"));
}

#[test]
fn heisenberg_action_is_coherent() {
    let o = run(&["check-coherence"], &fixture("heisenberg.emb"));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn perturbed_tensor_fails_on_both_routes() {
    let o = run(&["check-tensor", "--format", "machine"], &fixture("heisenberg-perturbed.emb"));
    assert_eq!(o.status.code(), Some(1));
    let s = supports(&stdout(&o));
    assert_eq!(s.len(), 2);
    assert!(!s[0].is_empty());
    assert_eq!(s[0], s[1]);
}

#[test]
fn zero_denominator_is_an_input_error() {
    let path = scratch("bad.emb", "[space E]\nx -1\n\n[brackets E symmetric]\nx x -> x \"1/0\"\n");
    let o = run(&["check-lie"], &path);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.emb:5:10"), "{err}");
}

#[test]
fn unknown_keys_and_missing_files_are_input_errors() {
    let path = scratch("key.emb", "[settings]\ncolour = 3\n");
    assert_eq!(run(&["check-lie"], &path).status.code(), Some(2));
    assert_eq!(run(&["check-lie"], &fixture("missing.emb")).status.code(), Some(2));
    assert_eq!(run(&["check-lie", "--bound", "0"], &fixture("abelian.emb")).status.code(), Some(2));
}

#[test]
fn flags_override_settings() {
    let o = run(&["check-lie", "--bound", "2", "--seed", "9"], &fixture("abelian.emb"));
    let s = stdout(&o);
    assert!(s.contains("bound: 2\n") && s.contains("seed: 9\n"), "{s}");
}

#[test]
fn reports_are_byte_stable_and_untimed() {
    for format in ["text", "machine"] {
        let a = run(&["deform", "--format", format], &fixture("heisenberg.emb"));
        let b = run(&["deform", "--format", format], &fixture("heisenberg.emb"));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        assert!(!stdout(&a).contains("wall time"));
        assert!(String::from_utf8(a.stderr).unwrap().contains("wall time"));
    }
}

#[test]
fn constructed_output_parses_back() {
    let o = run(&["build-product"], &fixture("heisenberg.emb"));
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let body = s.split("# constructed\n").nth(1).expect("constructed section");
    let file = embtensor_cli::format::parse(body).unwrap();
    assert_eq!(embtensor_cli::format::serialize(&file), body);
}

#[test]
fn not_a_tensor_has_no_deformation_complex() {
    let o = run(&["deform"], &fixture("mixed-degrees.emb"));
    assert_eq!(o.status.code(), Some(1));
}
