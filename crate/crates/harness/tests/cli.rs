use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn varcap(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varcap")).args(args).arg("--out").arg(out).output().expect("spawn varcap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_passes_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = varcap(&["verify"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("PASS fixture.sphere.prefix"), "{summary}");
    assert!(!summary.contains("FAIL"), "{summary}");
}

#[test]
fn verify_with_config_runs_suites() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("line_circle_sandwich.toml");
    let o = varcap(&["verify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS cheby.submult.i1"));
}

#[test]
fn basis_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("sphere_basis.toml");
    let o = varcap(&["basis", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = std::fs::read_to_string(dir.path().join("basis.tsv")).unwrap();
    let want = std::fs::read_to_string(fixture("golden/sphere_basis_s3.tsv")).unwrap();
    assert_eq!(got, want);
    let counts = std::fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert!(counts.lines().nth(4).unwrap().starts_with("3,7,16,"), "{counts}");
}

#[test]
fn unknown_config_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("line_circle.toml")).unwrap().replace("candidates", "candidatez");
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, text).unwrap();
    std::fs::copy(fixture("line.json"), dir.path().join("line.json")).unwrap();
    let o = varcap(&["basis", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("candidatez") && err.contains("line"), "{err}");
}

#[test]
fn off_variety_point_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("sphere.json"), dir.path().join("sphere.json")).unwrap();
    std::fs::write(dir.path().join("pts.json"), "[[1, 0, 0], [0, 1, 0], [1, 1, 1]]").unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "variety = \"sphere.json\"\ns_max = 2\nseed = 1\n\n[compact]\nkind = \"point_list\"\npath = \"pts.json\"\n").unwrap();
    let o = varcap(&["cheby", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sample 2 is off the variety"), "{}", stderr(&o));
}

#[test]
fn limits_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = varcap(&["limits"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(dir.path().join("limits.csv").exists());
}

#[test]
fn cheby_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("line_interval.toml");
    let o = varcap(&["cheby", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for f in ["y_i1.csv", "y_tilde.csv", "principal.csv", "t_s.csv", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn diameter_output_is_deterministic() {
    let cfg = fixture("line_circle_sandwich.toml");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = varcap(&["diameter", "--config", cfg.to_str().unwrap(), "--threads", "2"], d.path());
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "series.csv") && names.iter().any(|n| n == "fekete_points.csv"));
    for n in names {
        let x = std::fs::read(a.path().join(&n)).unwrap();
        let y = std::fs::read(b.path().join(&n)).unwrap();
        assert_eq!(x, y, "{n:?} differs");
    }
}
