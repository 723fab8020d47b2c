use std::process::{Command, Output};

use serde_json::Value;

const DISK: &str = r#"{"type":"ball","center":[0,0],"radius":1}"#;
const BALL3: &str = r#"{"type":"ball","center":[0,0,0],"radius":1}"#;
const SQUARE: &str = r#"{"type":"hpoly","A":[[1,0],[-1,0],[0,1],[0,-1]],"b":[1,1,1,1]}"#;
const TRIANGLE: &str = r#"{"type":"vpoly","vertices":[[0,0],[1,0],[0,1]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_santalo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn polar_on_the_disk_matches_the_closed_form() {
    let out = run(&["polar", "--body", DISK, "--x", "0.5,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let value = v["value"].as_f64().unwrap();
    let want = std::f64::consts::PI / 0.75f64.powf(1.5);
    assert!((value - want).abs() < 1e-9 * want, "{value} vs {want}");
    assert!((v["ball_closed_form"].as_f64().unwrap() - want).abs() < 1e-12);
    assert!(v["relative_spread"].as_f64().unwrap() < 1e-2);
}

#[test]
fn polar_on_the_square_gives_the_cross_polytope_area() {
    let out = run(&["polar", "--body", SQUARE, "--x", "0,0", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("route,value,estimated_error"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let section: f64 = rows.iter().find(|r| r[0] == "section").unwrap()[1].parse().unwrap();
    assert!((section - 2.0).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let outside = run(&["polar", "--body", DISK, "--x", "1.5,0"]);
    assert_eq!(code(&outside), 3);
    assert!(String::from_utf8_lossy(&outside.stderr).contains("point not strictly interior"));

    assert_eq!(code(&run(&["polar", "--body", DISK, "--x", "0.1,0,0"])), 2);
    assert_eq!(code(&run(&["santalo", "--body", r#"{"type":"ball","center":[0,0]}"#])), 2);
    assert_eq!(code(&run(&["santalo", "--body", "/nonexistent/body.json"])), 2);
    assert_eq!(code(&run(&["floating", "--body", DISK, "--delta", "0.7"])), 2);
    assert_eq!(code(&run(&["region", "--body", DISK, "--t", "8", "--dirs", "0"])), 2);
    assert_eq!(code(&run(&["asa", "--body", DISK, "--t", "8,4"])), 2);
    assert_eq!(code(&run(&["region", "--body", DISK])), 2);
}

#[test]
fn santalo_reports_volume_products() {
    let disk = json(&run(&["santalo", "--body", DISK]));
    assert!((disk["volume_product"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let square = json(&run(&["santalo", "--body", SQUARE]));
    let p = square["volume_product"].as_f64().unwrap();
    assert!((p - 8.0 / std::f64::consts::PI.powi(2)).abs() < 1e-4);
    let tri = json(&run(&["santalo", "--body", TRIANGLE]));
    let x0 = &tri["solution"]["x0"];
    // the support integrand has kinks at the vertex normals
    for k in 0..2 {
        assert!((x0[k].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-4);
    }
}

#[test]
fn region_radials_on_the_disk() {
    let out = run(&["region", "--body", DISK, "--t", "8", "--dirs", "64"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let want = (1.0 - 8f64.powf(-2.0 / 3.0)).sqrt();
    let radials = v["radials"].as_array().unwrap();
    assert_eq!(radials.len(), 64);
    for r in radials {
        assert!((r["radial"].as_f64().unwrap() - want).abs() < 1e-8);
    }
    assert!((v["volume"].as_f64().unwrap() - 0.75 * std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn floating_reports_pass_on_the_square() {
    let out = run(&["floating", "--body", SQUARE, "--delta", "0.1", "--dirs", "16"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["empty"], Value::Bool(false));
    assert_eq!(v["radials"].as_array().unwrap().len(), 16);
}

#[test]
fn asa_on_the_ball() {
    let out = run(&["asa", "--body", BALL3, "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,estimate,extrapolated,direct"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((row[2] / two_pi - 1.0).abs() < 0.01);
    assert!((row[3] / (2.0 * two_pi) - 1.0).abs() < 1e-12);
}

#[test]
fn verify_all_passes_on_the_square() {
    let out = run(&["verify", "--body", SQUARE, "--suite", "all"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() > 20);
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    for args in [
        vec!["polar", "--body", TRIANGLE, "--x", "0.2,0.3", "--seed", "7"],
        vec!["santalo", "--body", SQUARE, "--seed", "3", "--format", "csv"],
        vec!["verify", "--body", TRIANGLE, "--suite", "prop1", "--seed", "5"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = run(&["polar", "--body", TRIANGLE, "--x", "0.2,0.3", "--seed", "7"]);
    let b = run(&["polar", "--body", TRIANGLE, "--x", "0.2,0.3", "--seed", "8"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["santalo", "--body", TRIANGLE, "--format", "csv"];
    let one = Command::new(env!("CARGO_BIN_EXE_santalo")).args(args).env("SANTALO_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_santalo")).args(args).env("SANTALO_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_santalo")).args(args).env("SANTALO_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = std::env::temp_dir().join(format!("santalo-cli-test-{}.csv", std::process::id()));
    let out = run(&["region", "--body", DISK, "--t", "2", "--dirs", "4", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("u1,u2,radial\n"));
    assert_eq!(text.lines().count(), 5);
}
