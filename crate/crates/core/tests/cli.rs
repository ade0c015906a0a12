use std::path::Path;
use std::process::{Command, Output};

fn mazurlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mazurlab"))
        .args(args)
        .env_remove("MAZURLAB_THREADS")
        .output()
        .expect("spawn mazurlab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_writes_one_record_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let args = ["verify", "--lemma", "power_contraction", "--dims", "1..4", "--trials", "500", "--seed", "7", "--out"];
    let run = mazurlab(&[&args[..], &[out.to_str().unwrap()]].concat());
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));

    let report = read_json(&out);
    let cells = report["summary"]["cells"].as_array().unwrap().len();
    assert_eq!(cells, 4 * 10 * 4);
    assert_eq!(report["records"].as_array().unwrap().len(), 500 * cells);
    assert_eq!(report["summary"]["failures"], 0);
    assert!(report["summary"]["max_ratios"]["power_contraction"].as_f64().unwrap() <= 1.0 + 1e-8);
    assert!(report["config"].is_object());

    let stdout = String::from_utf8_lossy(&run.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("cell ")).count(), cells);
}

#[test]
fn verify_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for (path, seq) in paths.iter().zip([false, true]) {
        let mut args = vec!["verify", "--lemma", "main_theorem,anticommutator_up", "--dims", "2,3", "--trials", "20"];
        args.extend(["--seed", "11", "--out", path.to_str().unwrap()]);
        if seq {
            args.push("--sequential");
        }
        assert_eq!(code(&mazurlab(&args)), 0);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    // the config records the execution mode; everything else must agree
    let strip = |bytes: &[u8]| {
        let mut v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
        v["config"].as_object_mut().unwrap().remove("exec");
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn sweep_writes_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let args = ["sweep", "--p", "1", "--q", "1.1,1.5,2", "--dim", "3", "--restarts", "8", "--iters", "2000"];
    let run = mazurlab(&[&args[..], &["--seed", "7", "--out", out.to_str().unwrap()]].concat());
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));

    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["p", "q", "best_ratio", "seed", "iters"]);
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, q) in rows.iter().zip([1.1, 1.5, 2.0]) {
        assert_eq!(row[1].parse::<f64>().unwrap(), q);
        let best: f64 = row[2].parse().unwrap();
        assert!(best >= 1.0 && best.is_finite());
    }
}

#[test]
fn search_json_has_best_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let run = mazurlab(&["search", "--p", "2", "--q", "2", "--dim", "2", "--restarts", "2", "--iters", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let v = read_json(&out);
    assert_eq!(v["result"]["best_ratio"], 1.0);
    assert_eq!(v["best_pair"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&mazurlab(&["verify", "--trials", "5"])), 2);
    assert_eq!(code(&mazurlab(&["sweep", "--p", "1", "--out", "x.csv"])), 2);
    assert_eq!(code(&mazurlab(&["verify", "--out", "x.json", "--colour", "red"])), 2);
    assert_eq!(code(&mazurlab(&["verify", "--dims", "4..2", "--out", "x.json"])), 2);
    assert_eq!(code(&mazurlab(&["verify", "--lemma", "nope", "--out", "x.json"])), 2);

    let bad_threads = Command::new(env!("CARGO_BIN_EXE_mazurlab"))
        .args(["selftest", "--instances", "1"])
        .env("MAZURLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad_threads), 2);
}

#[test]
fn selftest_passes_and_detects_coarse_quadrature() {
    let ok = mazurlab(&["selftest"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert_eq!(stdout.lines().filter(|l| l.contains("c_theta quadrature delta")).count(), 9);

    let bad = mazurlab(&["selftest", "--instances", "10", "--debug-quadrature-nodes", "10"]);
    assert_eq!(code(&bad), 3);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}
