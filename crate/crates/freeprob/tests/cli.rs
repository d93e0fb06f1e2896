//! End-to-end tests of the command-line interface: exit-code contract,
//! reproducible reports, and the documented example invocations.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeprob"))
        .args(args)
        .env("FREEPROB_THREADS", "2")
        .output()
        .expect("spawn freeprob")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn exit_code_contract() {
    // 0: pass
    let out = run(&["check", "--fsd", "--catalog", "dirac", "--a", "0", "--grid", "1e-2,1e2,6,12"]);
    assert_eq!(out.status.code(), Some(0));

    // 1: fail with witness
    let out = run(&[
        "check", "--fsd", "--catalog", "free_poisson", "--lambda", "1", "--alpha", "1",
        "--grid", "1e-2,1e2,12,24",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert!(doc["report"]["checks"][0]["witness"]["value_im"].as_f64().unwrap() > 10.0);

    // 3: usage errors (no check selected; unknown catalog; bad file)
    let out = run(&["check", "--catalog", "dirac"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["check", "--fsd", "--catalog", "nonsense"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["check", "--fsd", "--input", "/nonexistent/measure.json"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["cumulants", "--catalog", "student_t3"]);
    assert_eq!(out.status.code(), Some(3), "no moments -> usage error");
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "check", "--fsd", "--catalog", "semicircle", "--a", "0", "--r", "2",
        "--grid", "1e-2,1e2,8,16",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "identical config must give identical bytes");
}

#[test]
fn cumulants_cli_examples() {
    let out = run(&["cumulants", "--catalog", "gaussian", "--order", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let kappa: Vec<String> = doc["report"]["kappa"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(kappa, ["0", "1", "0", "1", "0", "4"]);

    let out = run(&["cumulants", "--catalog", "semicircle", "--r", "2", "--order", "6"]);
    let doc = stdout_json(&out);
    let kappa: Vec<String> = doc["report"]["kappa"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(kappa, ["0", "1", "0", "0", "0", "0"]);

    let out = run(&["cumulants", "--catalog", "free_poisson", "--order", "4"]);
    let doc = stdout_json(&out);
    let kappa: Vec<String> = doc["report"]["kappa"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(kappa, ["1", "1", "1", "1"]);
}

#[test]
fn density_cli_awk_at_zero() {
    let out = run(&[
        "density", "--catalog", "awk", "--c", "0", "--points", "-3:3:0.1", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // find the t = 0 row and check the standard normal value
    let row = text
        .lines()
        .find(|l| l.starts_with("0.0000000000000000e0,") || l.starts_with("-0.0000000000000000e0,"))
        .or_else(|| {
            text.lines().find(|l| {
                l.split(',')
                    .next()
                    .and_then(|v| v.parse::<f64>().ok())
                    .map(|t| t.abs() < 1e-12)
                    .unwrap_or(false)
            })
        })
        .expect("t = 0 row present");
    let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.398942).abs() < 1e-5, "density at 0: {v}");
}

#[test]
fn transform_cli_examples() {
    // closed form: C'(-i) of the standard semicircle is -2i
    let out = run(&[
        "transform", "--op", "cprime", "--catalog", "semicircle", "--r", "2", "--point", "-1i",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert!((doc["report"]["value"]["re"].as_f64().unwrap()).abs() < 1e-12);
    assert!((doc["report"]["value"]["im"].as_f64().unwrap() + 2.0).abs() < 1e-12);

    // student t3 Cauchy transform against the independent residue formula
    // G(z) = 1/(z + i sqrt 3) + i sqrt 3 / (z + i sqrt 3)^2 at z = 2i
    let out = run(&[
        "transform", "--op", "cauchy", "--catalog", "student_t3", "--point", "2i",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let got = num_complex::Complex64::new(
        doc["report"]["value"]["re"].as_f64().unwrap(),
        doc["report"]["value"]["im"].as_f64().unwrap(),
    );
    let d = num_complex::Complex64::new(0.0, 2.0 + 3f64.sqrt());
    let expect = d.inv() + num_complex::Complex64::new(0.0, 3f64.sqrt()) / (d * d);
    assert!((got - expect).norm() < 1e-8, "{got} vs {expect}");

    // triplet-only measures reject direct Cauchy evaluation: exit 3
    let out = run(&[
        "transform", "--op", "cauchy", "--catalog", "free_gamma", "--point", "2i",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn measure_json_input_roundtrip() {
    // export a measure document and feed it back through --input
    let json = freeprob::measures::measure_to_json(
        &freeprob::measures::catalog_lookup(
            "free_poisson",
            &"lambda=1, alpha=1".parse().unwrap(),
        )
        .unwrap(),
    );
    let path = std::env::temp_dir().join("freeprob-cli-measure.json");
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out = run(&[
        "check", "--fsd-cumulant", "--order", "2", "--input", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "free Poisson fails the Hankel FSD test");
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["hankel"][0]["leading_minors"][1], "-1");
}

#[test]
fn kerov_cli() {
    let out = run(&["check", "--kerov", "--catalog", "awk", "--c", "1", "--grid", "1e-2,1e2,6,12"]);
    assert_eq!(out.status.code(), Some(0));
}
