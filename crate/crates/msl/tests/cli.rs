use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn msl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_msl"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn same_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "rb.cfg",
        "experiment = rb_sweep\nseed = 3\ntrials = 2000\nn = 12, 20\ninstances = 2\nout_csv = a.csv\nout_json = a.json\n",
    );
    let first = msl().arg("run").arg(&cfg).env("RAYON_NUM_THREADS", "1").output().unwrap();
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let aj = fs::read(dir.path().join("a.json")).unwrap();
    let second = msl().arg("run").arg(&cfg).env("RAYON_NUM_THREADS", "4").output().unwrap();
    assert_eq!(code(&second), 0);
    assert_eq!(a, fs::read(dir.path().join("a.csv")).unwrap());
    assert_eq!(aj, fs::read(dir.path().join("a.json")).unwrap());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 5);
}

#[test]
fn different_seeds_differ() {
    let run = |seed: &str| {
        let out = msl()
            .args(["eval", "--alg", "rb", "--trials", "500", "--seed", seed, "--matroid"])
            .arg(data("k4.mat"))
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        out.stdout
    };
    assert_ne!(run("1"), run("2"));
    assert_eq!(run("1"), run("1"));
}

#[test]
fn missing_matroid_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.cfg", "experiment = eval\nseed = 1\nalg = rb\nmatroid = absent.mat\n");
    assert_eq!(code(&msl().arg("run").arg(&cfg).output().unwrap()), 3);
    let out =
        msl().args(["eval", "--alg", "rb", "--seed", "1", "--matroid", "/definitely/absent.mat"]).output().unwrap();
    assert_eq!(code(&out), 3);
    assert_eq!(code(&msl().args(["run", "/definitely/absent.cfg"]).output().unwrap()), 3);
}

#[test]
fn parse_errors_exit_2_and_validation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad_syntax = write(dir.path(), "a.cfg", "experiment = rb_sweep\nseed = 1\ntrials = many\n");
    assert_eq!(code(&msl().arg("run").arg(&bad_syntax).output().unwrap()), 2);
    let no_seed = write(dir.path(), "b.cfg", "experiment = rb_sweep\n");
    assert_eq!(code(&msl().arg("run").arg(&no_seed).output().unwrap()), 3);
    let zero = write(dir.path(), "c.cfg", "experiment = ledger\nseed = 1\ntrials = 0\n");
    assert_eq!(code(&msl().arg("run").arg(&zero).output().unwrap()), 3);
    let bad_matroid = write(dir.path(), "m.mat", "m = uniform 2\n");
    let out = msl().args(["eval", "--alg", "rb", "--seed", "1", "--matroid"]).arg(&bad_matroid).output().unwrap();
    assert_eq!(code(&out), 2);
    let too_big = write(dir.path(), "big.mat", "m = uniform 2 9\n");
    let out =
        msl().args(["eval", "--alg", "rb", "--seed", "1", "--exact", "--matroid"]).arg(&too_big).output().unwrap();
    assert_eq!(code(&out), 3);
    assert_eq!(code(&msl().args(["eval", "--alg", "magic", "--seed", "1", "--matroid", "x"]).output().unwrap()), 2);
    assert_eq!(code(&msl().args(["ledger"]).output().unwrap()), 2);
}

#[test]
fn ledger_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ledger.csv");
    let out = msl().args(["ledger", "--seed", "9", "--trials", "2000", "--out-csv"]).arg(&csv).output().unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("fixture,wrapper,weights,"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0,true")));
}

#[test]
fn eval_exact_on_k4() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("k4.json");
    let out = msl()
        .args(["eval", "--alg", "classical", "--seed", "4", "--exact", "--matroid"])
        .arg(data("k4.mat"))
        .arg("--out-json")
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["exact"], true);
    assert_eq!(row["trials"], 720);
    assert_eq!(row["bound"], "inf");
    assert_eq!(row["violations"], 0);
}

#[test]
fn shipped_configs_run() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["eval.cfg", "compose.cfg"] {
        let text = fs::read_to_string(data(name)).unwrap();
        let text = text
            .replace("matroid = ", &format!("matroid = {}/", data("").display()))
            .replace("trials = 10000", "trials = 1000");
        let cfg = write(dir.path(), name, &text);
        let out = msl().arg("run").arg(&cfg).output().unwrap();
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
    let plan: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/compose.json")).unwrap()).unwrap();
    assert_eq!(plan["plan"]["claim_thickness"], 2);
    assert_eq!(plan["plan"]["thickness"], 0);
}

#[test]
fn compose_two_sum_with_classical_leaves() {
    let out = msl()
        .args(["compose", "--leaf", "classical", "--trials", "1000", "--seed", "2", "--matroid"])
        .arg(data("two_sum.mat"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.ends_with(" ok")));
}

#[test]
fn compose_without_decomposition_exits_3() {
    let out = msl().args(["compose", "--seed", "2", "--matroid"]).arg(data("k4.mat")).output().unwrap();
    assert_eq!(code(&out), 3);
}
