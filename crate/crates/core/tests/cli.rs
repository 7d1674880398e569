use std::path::Path;
use std::process::{Command, Output};

use polydot_cmpc::field::FieldModulus;
use polydot_cmpc::matrix::Matrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tempfile::TempDir;

fn polydot(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydot"))
        .args(args)
        .current_dir(dir)
        .env_remove("POLYDOT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_random(dir: &Path, name: &str, m: usize, seed: u64) -> Matrix {
    let q = FieldModulus::mersenne61();
    let a = Matrix::random(&q, m, m, &mut ChaCha20Rng::seed_from_u64(seed));
    std::fs::write(dir.join(name), a.to_text(&q)).unwrap();
    a
}

#[test]
fn count_examples() {
    let dir = TempDir::new().unwrap();
    let o = polydot(dir.path(), &["count", "--s", "2", "--t", "1", "--z", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("polydot=7\n") && text.contains("region=ψ1\n"),
        "{text}"
    );

    let o = polydot(
        dir.path(),
        &["count", "--s", "4", "--t", "15", "--z", "100"],
    );
    let text = stdout(&o);
    assert!(text.contains("polydot=1909\n") && text.contains("winner=polydot\n"));

    let o = polydot(dir.path(), &["count", "--s", "0", "--t", "2", "--z", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s must be ≥ 1"));
}

#[test]
fn sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let o = polydot(
        dir.path(),
        &[
            "sweep", "--s", "4", "--t", "15", "--zmin", "1", "--zmax", "300", "--out", "fig1.csv",
        ],
    );
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "s,t,z,n_polydot,region,n_entangled,n_ssmm,n_gcsa,winner"
    );
    assert_eq!(lines.len(), 301);
    assert!(lines[100].starts_with("4,15,100,1909,"));
    assert!(!csv.contains('\r'));

    let o = polydot(dir.path(), &["sweep", "--product", "36", "--z", "42"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let shapes: Vec<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(
        shapes,
        ["1,36", "2,18", "3,12", "4,9", "6,6", "9,4", "12,3", "18,2", "36,1"]
    );
}

#[test]
fn sweep_errors() {
    let dir = TempDir::new().unwrap();
    let o = polydot(
        dir.path(),
        &[
            "sweep", "--s", "4", "--t", "15", "--zmin", "5", "--zmax", "4",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = polydot(
        dir.path(),
        &[
            "sweep",
            "--s",
            "4",
            "--t",
            "15",
            "--zmin",
            "1",
            "--zmax",
            "4",
            "--out",
            "missing/dir/x.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_identity() {
    let dir = TempDir::new().unwrap();
    let q = FieldModulus::mersenne61();
    let id = Matrix::identity(2).to_text(&q);
    std::fs::write(dir.path().join("i.txt"), &id).unwrap();
    let o = polydot(
        dir.path(),
        &[
            "run", "i.txt", "i.txt", "--s", "2", "--t", "1", "--z", "2", "--out", "y.txt",
        ],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("self_check=ok"));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("y.txt")).unwrap(),
        id
    );
}

#[test]
fn run_random_reports_counts() {
    let dir = TempDir::new().unwrap();
    let q = FieldModulus::mersenne61();
    let a = write_random(dir.path(), "a.txt", 4, 1);
    let b = write_random(dir.path(), "b.txt", 4, 2);
    let o = polydot(
        dir.path(),
        &[
            "run", "a.txt", "b.txt", "--s", "2", "--t", "2", "--z", "2", "--out", "y.txt",
        ],
    );
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("N=17\n")
            && text.contains("master_evaluations=6\n")
            && text.contains("self_check=ok\n")
    );
    let (y, yq) =
        Matrix::parse_text(&std::fs::read_to_string(dir.path().join("y.txt")).unwrap()).unwrap();
    assert_eq!(yq, q);
    assert_eq!(y, a.transpose().mul(&q, &b).unwrap());
}

#[test]
fn run_errors() {
    let dir = TempDir::new().unwrap();
    write_random(dir.path(), "a.txt", 6, 1);
    let o = polydot(
        dir.path(),
        &["run", "a.txt", "a.txt", "--s", "4", "--t", "2", "--z", "1"],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = polydot(
        dir.path(),
        &[
            "run", "a.txt", "nope.txt", "--s", "2", "--t", "2", "--z", "1",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(dir.path().join("bad.txt"), "2 7\n1 2\n3\n").unwrap();
    let o = polydot(
        dir.path(),
        &[
            "run", "bad.txt", "bad.txt", "--s", "1", "--t", "1", "--z", "1",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_env_and_flag() {
    let dir = TempDir::new().unwrap();
    write_random(dir.path(), "a.txt", 4, 3);
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_polydot"));
        cmd.current_dir(dir.path())
            .args(["run", "a.txt", "a.txt", "--s", "2", "--t", "2", "--z", "3"])
            .env_remove("POLYDOT_SEED");
        if let Some(e) = env {
            cmd.env("POLYDOT_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        cmd.output().unwrap().status.success()
    };
    assert!(run(Some("5"), None));
    assert!(run(Some("5"), Some("6")));
    assert!(!run(Some("not-a-number"), None));
}

#[test]
fn verify_scalar_rows() {
    let dir = TempDir::new().unwrap();
    let o = polydot(
        dir.path(),
        &["verify", "--smax", "1", "--tmax", "1", "--zpad", "10"],
    );
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("discrepancies=0"));
}

#[test]
fn verify_catches_mutation() {
    let dir = TempDir::new().unwrap();
    let o = polydot(
        dir.path(),
        &["verify", "--smax", "3", "--tmax", "3", "--mutate-psi3"],
    );
    assert_eq!(o.status.code(), Some(6));
    assert!(stdout(&o).contains("equivalence s=2 t=2 z=1 region=psi3 formula=16 oracle=15\n"));
    // t = 1 rows contain no psi3 points, so only the mutation can fail there
    let o = polydot(dir.path(), &["verify", "--smax", "3", "--tmax", "1"]);
    assert!(o.status.success());
}

#[test]
fn audit_modes() {
    let dir = TempDir::new().unwrap();
    let base = [
        "audit",
        "--s",
        "2",
        "--t",
        "2",
        "--z",
        "2",
        "--m",
        "4",
        "--subsets",
        "100",
    ];
    let o = polydot(dir.path(), &base);
    assert!(o.status.success());
    assert!(stdout(&o).contains("passed=100\n"));

    let o = polydot(
        dir.path(),
        &["audit", "--s", "3", "--t", "2", "--z", "1", "--m", "6"],
    );
    assert!(o.status.success());

    let mut corrupt = base.to_vec();
    corrupt.push("--corrupt-shares");
    let o = polydot(dir.path(), &corrupt);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("first_failure"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    write_random(dir.path(), "a.txt", 6, 4);
    write_random(dir.path(), "b.txt", 6, 5);
    let args = [
        "run", "a.txt", "b.txt", "--s", "3", "--t", "2", "--z", "4", "--seed", "11",
    ];
    let first = polydot(dir.path(), &args);
    let second = polydot(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    let args = ["sweep", "--product", "36", "--z", "42"];
    assert_eq!(
        polydot(dir.path(), &args).stdout,
        polydot(dir.path(), &args).stdout
    );
}
