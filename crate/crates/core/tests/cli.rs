use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use wbider::algebra::{AlgebraKind, AlgebraSpec};
use wbider::io::{self, MapFile};
use wbider::maps::{BilinearMapWindow, LinearMapWindow};
use wbider::scalar::int;

fn wbider(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbider"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write_map(dir: &Path, name: &str, m: &MapFile) -> String {
    let p = dir.join(name);
    std::fs::write(&p, io::map_file_to_string(m)).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn classify_reports_core_dimensions() {
    for (alg, problem, dim) in [
        ("vir", "biderivation", 1),
        ("witt", "biderivation", 1),
        ("w22", "symmetric-biderivation", 0),
    ] {
        let out = wbider(&["classify", "--algebra", alg, "--problem", problem, "--window", "4"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let r = json(&out);
        assert_eq!(r["core_dimension"], dim);
        assert_eq!(r["residual_check"], "pass");
        assert_eq!(r["N"], 4);
        assert_eq!(r["M"], 8);
        assert_eq!(r["K"], 2);
    }
}

#[test]
fn report_field_order() {
    let out = wbider(&["classify", "--algebra", "witt", "--problem", "biderivation", "--window", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "\"algebra\"",
        "\"problem\"",
        "\"N\"",
        "\"M\"",
        "\"K\"",
        "\"raw_dimension\"",
        "\"core_dimension\"",
        "\"core_basis\"",
        "\"parameters\"",
        "\"residual_check\"",
        "\"timings_ms\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn reports_are_byte_identical_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (i, extra) in [None, Some("--parallel")].into_iter().enumerate() {
        let path = dir.path().join(format!("r{i}.json"));
        let mut args = vec![
            "classify",
            "--algebra",
            "w22",
            "--problem",
            "commuting",
            "--window",
            "3",
            "--output",
            path.to_str().unwrap(),
        ];
        args.extend(extra);
        assert_eq!(wbider(&args).status.code(), Some(0));
        texts.push(io::strip_timings(&std::fs::read_to_string(&path).unwrap()).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn core_basis_round_trips_through_verify_map() {
    let dir = tempfile::tempdir().unwrap();
    for (alg, problem, check) in [
        ("w22", "biderivation", "biderivation"),
        ("vir", "commuting", "commuting"),
        ("w22-centerless", "derivation", "derivation"),
    ] {
        let out = wbider(&["classify", "--algebra", alg, "--problem", problem, "--window", "3"]);
        assert_eq!(out.status.code(), Some(0));
        let r = json(&out);
        for (i, m) in r["core_basis"].as_array().unwrap().iter().enumerate() {
            let p = dir.path().join(format!("{alg}-{problem}-{i}.json"));
            std::fs::write(&p, serde_json::to_string(m).unwrap()).unwrap();
            let v = wbider(&["verify-map", "--input", p.to_str().unwrap(), "--check", check]);
            assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
        }
    }
}

#[test]
fn verify_map_examples() {
    let dir = tempfile::tempdir().unwrap();
    let vir: AlgebraSpec = AlgebraKind::Virasoro.into();
    let w22: AlgebraSpec = AlgebraKind::W22.into();

    let inner = MapFile::Bilinear(BilinearMapWindow::inner_biderivation(&int(1), vir, 3).unwrap());
    let p = write_map(dir.path(), "inner.json", &inner);
    let out = wbider(&["verify-map", "--input", &p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], "pass");

    let omega = MapFile::Linear(LinearMapWindow::omega_table(w22, 3).unwrap());
    let p = write_map(dir.path(), "omega.json", &omega);
    let out = wbider(&["verify-map", "--input", &p, "--check", "derivation"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["result"], "fail");
    assert!(r["failures"].as_array().unwrap().len() <= 10);
    assert!(r["failure_count"].as_u64().unwrap() > 10);

    let d = MapFile::Linear(LinearMapWindow::standard_d(w22, 1).unwrap());
    let p = write_map(dir.path(), "d.json", &d);
    let out = wbider(&["verify-map", "--input", &p, "--check", "commuting", "--summary"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(L(1), H(-1)): -2·H(0)"), "{text}");
}

#[test]
fn verify_map_on_w22_centerless_d() {
    let dir = tempfile::tempdir().unwrap();
    let a: AlgebraSpec = AlgebraKind::W22Centerless.into();
    let d = MapFile::Linear(LinearMapWindow::standard_d(a, 3).unwrap());
    let p = write_map(dir.path(), "d.json", &d);
    assert_eq!(wbider(&["verify-map", "--input", &p]).status.code(), Some(0));
    let out = wbider(&["verify-map", "--input", &p, "--algebra", "w22"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn center_command() {
    for (alg, expected) in [
        ("vir", serde_json::json!([[{"family":"c","coeff":"1/1"}]])),
        ("witt", serde_json::json!([])),
        ("w22", serde_json::json!([[{"family":"c","coeff":"1/1"}]])),
        ("w22-centerless", serde_json::json!([])),
    ] {
        let out = wbider(&["center", "--algebra", alg, "--window", "4"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["basis"], expected, "{alg}");
    }
    let out = wbider(&["classify", "--problem", "center", "--algebra", "vir", "--summary"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "center of vir on window 5: {1·c}\n");
}

#[test]
fn usage_errors_exit_1() {
    let cases: &[&[&str]] = &[
        &["classify", "--algebra", "sl2", "--problem", "biderivation"],
        &["classify", "--algebra", "vir", "--problem", "nonsense"],
        &["classify", "--algebra", "vir", "--window", "3", "--core", "4"],
        &["classify", "--algebra", "vir", "--window", "3", "--value-radius", "5"],
        &["verify-map"],
        &["verify-map", "--input", "/nonexistent/map.json"],
    ];
    for args in cases {
        let out = wbider(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.starts_with("wbider: "), "{err}");
        assert_eq!(err.lines().count(), 1, "{err}");
    }
}

#[test]
fn malformed_map_files_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let a: AlgebraSpec = AlgebraKind::Witt.into();
    let mut j = io::linear_map_to_json(&LinearMapWindow::identity(a, 2));
    j.entries.remove(1);
    let p = dir.path().join("gap.json");
    std::fs::write(&p, serde_json::to_string(&j).unwrap()).unwrap();
    assert_eq!(wbider(&["verify-map", "--input", p.to_str().unwrap()]).status.code(), Some(1));
    let p = dir.path().join("garbage.json");
    std::fs::write(&p, "{not json").unwrap();
    assert_eq!(wbider(&["verify-map", "--input", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn small_window_is_not_classified() {
    let out = wbider(&["classify", "--algebra", "vir", "--problem", "biderivation", "--window", "1", "--core", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("not in the classified family"));
}
