use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semidiscrete_cli::mesh::{flag, parse_obj, parse_ply};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semidiscrete"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_config(verb: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = configs().join(config);
    let mut args = vec![verb, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .map(|d| d.map(|e| e.unwrap().file_name().into_string().unwrap()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn parallel_family_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let o = run_config("parallel", "enneper.toml", d, &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let names = files(a.path());
    assert_eq!(names.iter().filter(|n| n.ends_with(".obj")).count(), 3);
    assert_eq!(names.iter().filter(|n| n.ends_with(".ply")).count(), 3);
    assert_eq!(names.iter().filter(|n| n.ends_with(".curvature.csv")).count(), 3);
    assert!(!names.iter().any(|n| n.starts_with('.')));
    assert_eq!(names, files(b.path()));
    for n in &names {
        assert_eq!(fs::read(a.path().join(n)).unwrap(), fs::read(b.path().join(n)).unwrap(), "{n}");
    }
}

#[test]
fn resonant_lambda_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = fs::read_to_string(configs().join("cmc1.toml")).unwrap().replace("lambda = 0.01", "lambda = 6.25");
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out");
    let o = run(&["analyze", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("1 − λσ ≠ 0"), "{err}");
    assert!(files(&out).is_empty());
}

#[test]
fn numerical_failure_quarantines_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("analyze", "cmc1.toml", dir.path(), &["--lambda-sweep", "0.01,1e4"]);
    assert_eq!(o.status.code(), Some(3));
    let names = files(dir.path());
    assert!(!names.is_empty());
    assert!(names.iter().all(|n| n.ends_with(".quarantine")), "{names:?}");
}

#[test]
fn flag_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("analyze", "enneper.toml", dir.path(), &["--tol", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_config("analyze", "enneper.toml", dir.path(), &["--tol", "constraint"]);
    assert_eq!(o.status.code(), Some(2));
    let seeds = configs().join("seeds.csv");
    let o = run_config("generate", "enneper.toml", dir.path(), &["--seed-strips", seeds.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["analyze", "--config", "/nonexistent/job.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generate_writes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = configs().join("seeds.csv");
    let o = run_config("generate", "propagated.toml", dir.path(), &["--seed-strips", seeds.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("propagated_theta0.0000.samples.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 61);
    assert!(text.starts_with("k,t,piece,sheet,x1,x2,x3,x4,n1,n2,n3,n4\n"));
}

#[test]
fn export_writes_parseable_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("export", "brlw.toml", dir.path(), &["--tol", "constraint=1e-8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names = files(dir.path());
    assert_eq!(names.len(), 8, "{names:?}");
    for n in names.iter().filter(|n| n.ends_with(".ply")) {
        let ply = parse_ply(&fs::read_to_string(dir.path().join(n)).unwrap()).unwrap();
        let obj = parse_obj(&fs::read_to_string(dir.path().join(n.replace(".ply", ".obj"))).unwrap()).unwrap();
        assert_eq!(ply.vertices.len(), 5 * 101);
        assert_eq!(ply.vertices, obj.vertices);
        assert_eq!(ply.faces, obj.faces);
        // H³₊ images sit in the unit ball.
        assert!(ply.vertices.iter().all(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2] < 1.0));
        let k = ply.properties.iter().position(|p| p == "K").unwrap();
        let f = ply.properties.iter().position(|p| p == "flags").unwrap();
        let mut finite = 0;
        for row in &ply.rows {
            if row[k].is_finite() {
                finite += 1;
            } else {
                assert_ne!(row[f] as u8 & (flag::NO_KH | flag::INFINITE_KH), 0);
            }
        }
        assert!(finite > 400);
    }
}

#[test]
fn reports_for_maximal_and_minimal() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("analyze", "maximal.toml", dir.path(), &[]);
    assert!(o.status.success());
    let summary = fs::read_to_string(dir.path().join("maximal.summary.txt")).unwrap();
    let edges: usize = summary
        .lines()
        .find_map(|l| l.trim().strip_prefix("singular edges: "))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(edges > 0);
    assert!(summary.contains("maximal-surface adjacency (singular vertex next to singular edge): pass"));

    let dir = tempfile::tempdir().unwrap();
    let o = run_config("analyze", "enneper.toml", dir.path(), &[]);
    assert!(o.status.success());
    let summary = fs::read_to_string(dir.path().join("enneper.summary.txt")).unwrap();
    assert!(summary.contains("singular edges: not applicable (Riemannian ambient)"));
    let sing = fs::read_to_string(dir.path().join("enneper_theta0.0000.singularity.csv")).unwrap();
    assert!(sing.lines().skip(1).all(|l| l.split(',').nth(5) == Some("n/a")));
}

#[test]
fn weingarten_table_has_s_theta_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("analyze", "brlw.toml", dir.path(), &[]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(dir.path().join("brlw.weingarten.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().get(1), Some("s_theta"));
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let theta: f64 = rec[0].parse().unwrap();
        let st: f64 = rec[1].parse().unwrap();
        assert!((st - 0.5 * (-2.0 * theta).exp()).abs() < 1e-15);
        assert_eq!(&rec[6], "true");
        rows += 1;
    }
    assert_eq!(rows, 4);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["selftest", "--out", dir.path().to_str().unwrap()]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
}
