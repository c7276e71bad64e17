use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_otoc-lab");

const SMALL_SWAP: &str = "experiment = \"swap-case\"\nseed = 4\n\n[swap-case]\nmax-steps = 2\nmc-samples = 50\n";

fn lab(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("OTOC_LAB_OUT").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn shipped() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    v.sort();
    v
}

#[test]
fn list_names_every_experiment() {
    let out = lab(&["list-experiments"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "swap-case",
        "haar-bound-sweep",
        "xxz-decay",
        "du-crosscheck",
        "concentration",
        "chaotic-diagnostic",
        "global-haar-nu",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
}

#[test]
fn shipped_configs_run_and_verify() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().to_str().unwrap();
    for cfg in shipped() {
        let stem = cfg.file_stem().unwrap().to_str().unwrap().to_string();
        let out = lab(&["run", cfg.to_str().unwrap(), "--out", out_dir]);
        assert_eq!(code(&out), 0, "{stem}: {}", stderr(&out));
        let csv = tmp.path().join(format!("{stem}.csv"));
        let json = tmp.path().join(format!("{stem}.json"));
        assert!(csv.exists() && json.exists(), "{stem}: record pair missing");
        for record in [&csv, &json] {
            let v = lab(&["verify", record.to_str().unwrap()]);
            assert_eq!(code(&v), 0, "{stem}: {}", String::from_utf8_lossy(&v.stdout));
        }
    }
}

#[test]
fn thread_count_does_not_change_the_bytes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL_SWAP);
    let mut csvs = Vec::new();
    for (i, extra) in [&["--threads", "1"][..], &["--threads", "4"][..], &["--sequential"][..]].iter().enumerate() {
        let dir = tmp.path().join(format!("run{i}"));
        let mut args = vec!["run", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = lab(&args);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        csvs.push(fs::read(dir.join("small.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);
}

#[test]
fn seed_override_lands_in_the_sidecar() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL_SWAP);
    let out = lab(&["run", cfg.to_str().unwrap(), "--seed", "99", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let side: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("small.json")).unwrap()).unwrap();
    assert_eq!(side["seed"], 99);
    assert_eq!(side["config"]["seed"], 99);
    assert_eq!(side["experiment"], "swap-case");
}

#[test]
fn output_directory_from_the_environment() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL_SWAP);
    let target = tmp.path().join("from-env");
    let out = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap()])
        .env("OTOC_LAB_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(target.join("small.csv").exists());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&lab(&["run"])), 2);
    assert_eq!(code(&lab(&["frobnicate"])), 2);
    assert_eq!(code(&lab(&["run", "--experiment", "swap-case", "--threads", "0"])), 2);
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL_SWAP);
    let out = lab(&["run", cfg.to_str().unwrap(), "--experiment", "xxz-decay"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert_eq!(code(&lab(&["verify", tmp.path().join("absent.json").to_str().unwrap()])), 2);
    assert_eq!(code(&lab(&["verify", cfg.to_str().unwrap()])), 2);
}

#[test]
fn malformed_toml_reports_its_line() {
    let tmp = TempDir::new().unwrap();
    let bad = write(tmp.path(), "bad.toml", "experiment = \"swap-case\"\nseed = \n");
    let out = lab(&["run", bad.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    let unknown = write(tmp.path(), "unknown.toml", "experiment = \"swap-case\"\n[swap-case]\nmax-stepz = 2\n");
    assert_eq!(code(&lab(&["run", unknown.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()])), 2);
}

#[test]
fn oversized_runs_exit_three() {
    let tmp = TempDir::new().unwrap();
    let big = write(tmp.path(), "big.toml", "experiment = \"swap-case\"\n[swap-case]\nmax-steps = 10\n");
    let out = lab(&["run", big.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let wide = write(tmp.path(), "wide.toml", "experiment = \"global-haar-nu\"\n[global-haar-nu]\nqubits = 9\n");
    assert_eq!(code(&lab(&["run", wide.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()])), 3);
}

fn small_record(tmp: &TempDir) -> PathBuf {
    let cfg = write(tmp.path(), "small.toml", SMALL_SWAP);
    let out = lab(&["run", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    tmp.path().join("small.csv")
}

#[test]
fn tampered_values_fail_verification() {
    let tmp = TempDir::new().unwrap();
    let csv = small_record(&tmp);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.split("\r\n").map(str::to_string).collect();
    let col = lines[0].split(',').position(|c| c == "g_exact").unwrap();
    let mut cells: Vec<String> = lines[1].split(',').map(str::to_string).collect();
    cells[col] = "5.0000000000000000e-1".into();
    lines[1] = cells.join(",");
    fs::write(&csv, lines.join("\r\n")).unwrap();
    let out = lab(&["verify", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL swap-g"));
}

#[test]
fn dropped_rows_fail_the_sidecar_match() {
    let tmp = TempDir::new().unwrap();
    let csv = small_record(&tmp);
    let text = fs::read_to_string(&csv).unwrap();
    let kept: Vec<&str> = text.split_inclusive("\r\n").take(3).collect();
    fs::write(&csv, kept.concat()).unwrap();
    let out = lab(&["verify", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL sidecar-match"));
}

#[test]
fn ragged_csv_is_a_parse_error_with_a_line() {
    let tmp = TempDir::new().unwrap();
    let csv = small_record(&tmp);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<&str> = text.split("\r\n").collect();
    lines[2] = "1,2";
    fs::write(&csv, lines.join("\r\n")).unwrap();
    let out = lab(&["verify", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}
