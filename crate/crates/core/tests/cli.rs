use std::path::Path;
use std::process::{Command, Output};

fn graphorder(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphorder"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

#[test]
fn order_go_on_fixture() {
    let dir = fixture_dir();
    let out = graphorder(&dir, &["--w", "3", "order", "--input", "five_graph.txt", "--algo", "go"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "F=7");
    let out = graphorder(&dir, &["--w", "3", "order", "--input", "five_graph.txt", "--algo", "brute"]);
    assert_eq!(stdout(&out).trim(), "F=7");
}

#[test]
fn eval_on_edgeless_graph() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.txt"), "n 4\n").unwrap();
    std::fs::write(dir.path().join("p.txt"), "0\n1\n2\n3\n").unwrap();
    let out = graphorder(dir.path(), &["eval", "--input", "g.txt", "--perm", "p.txt"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "F=0");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(graphorder(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(graphorder(dir.path(), &["order", "--bogus"]).status.code(), Some(2));
    let help = graphorder(dir.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn file_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = graphorder(dir.path(), &["order", "--input", "missing.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.txt"));

    std::fs::write(dir.path().join("bad.txt"), "0 1\n1 x\n").unwrap();
    let out = graphorder(dir.path(), &["order", "--input", "bad.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.txt") && err.contains("line 2"), "{err}");
}

#[test]
fn bad_config_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "unknown_key = 3\n").unwrap();
    std::fs::write(dir.path().join("g.txt"), "0 1\n").unwrap();
    let out = graphorder(dir.path(), &["--config", "c.toml", "order", "--input", "g.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c.toml"));
}

#[test]
fn render_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.txt"), "n 7\n0 1\n2 3\n").unwrap();
    let out = graphorder(dir.path(), &["render-matrix", "--input", "g.txt", "--format", "plain", "--out", "m.pgm"]);
    assert!(out.status.success());
    let img = std::fs::read_to_string(dir.path().join("m.pgm")).unwrap();
    assert!(img.starts_with("P2\n7 7\n255\n"));
    assert_eq!(img.lines().count(), 3 + 7);

    graphorder(dir.path(), &["render-matrix", "--input", "g.txt", "--cell", "3", "--out", "s.pgm"]);
    let raw = std::fs::read(dir.path().join("s.pgm")).unwrap();
    assert!(raw.starts_with(b"P5\n3 3\n255\n"));
    assert_eq!(raw.len(), b"P5\n3 3\n255\n".len() + 9);
}

#[test]
fn partition_and_cost_outputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("star.txt"), "0 1\n0 2\n0 3\n0 4\n").unwrap();
    let out = graphorder(
        dir.path(),
        &["partition", "--input", "star.txt", "--method", "order-sweep", "--k", "2", "--out", "p.csv"],
    );
    assert_eq!(stdout(&out).trim(), "RF=1.200000");
    let csv = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(csv, "0,1,0\n0,2,0\n0,3,1\n0,4,1\n");

    let out = graphorder(dir.path(), &["compress-cost", "--input", "star.txt", "--block", "2", "--block", "5"]);
    assert_eq!(stdout(&out), "b,cost_nz,cost_r\n2,3,0.333333333333\n5,1,1.000000000000\n");

    let out = graphorder(dir.path(), &["partition", "--input", "star.txt", "--method", "order-sweep", "--k", "9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn merge_flag_keeps_a_bijection() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fan.txt"), "0 1\n0 2\n0 3\n3 4\n").unwrap();
    let out = graphorder(dir.path(), &["--merge", "--w", "2", "order", "--input", "fan.txt", "--out", "p.txt"]);
    assert!(out.status.success());
    let mut ids: Vec<usize> = std::fs::read_to_string(dir.path().join("p.txt"))
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    ids.sort();
    assert_eq!(ids, vec![0, 1, 2, 3, 4]);
}

#[test]
fn train_then_order_with_model() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.toml"),
        "w = 3\nhidden_phi = 8\nembed = 8\nhidden_rho = 8\npolicy_hidden = 8\nglobal_steps = 40\n\
         warmup_steps = 4\nrl_steps = 2\ntrajectory_len = 2\neval_size = 20\nbatch_size = 8\n",
    )
    .unwrap();
    assert!(graphorder(dir.path(), &["--seed", "1", "generate", "--model", "er", "--n", "25", "--p", "0.2", "--out", "g.txt"])
        .status
        .success());
    for mode in ["don", "don-rl"] {
        let out = graphorder(
            dir.path(),
            &["--config", "c.toml", "train", "--input", "g.txt", "--mode", mode, "--checkpoint", "m.ckpt", "--metrics", "m.csv", "--timing"],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
        assert!(csv.starts_with("step,loss,rmse,wall_ms\n"));
        let out = graphorder(dir.path(), &["--w", "3", "order", "--input", "g.txt", "--algo", "don", "--model", "m.ckpt"]);
        assert!(out.status.success());
        assert!(stdout(&out).starts_with("F="));
    }
    let out = graphorder(dir.path(), &["order", "--input", "g.txt", "--algo", "don"]);
    assert_eq!(out.status.code(), Some(1));
}
