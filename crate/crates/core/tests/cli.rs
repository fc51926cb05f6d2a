use std::path::Path;
use std::process::Command;

use eichler_core::cli::RunConfig;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn eichler(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_eichler")).args(args).current_dir(dir).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn validate(schema: &str, text: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{schema}.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let instance: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    instance
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn cusps_tables() {
    let dir = tempfile::tempdir().unwrap();
    let r = eichler(dir.path(), &["--group", "Gamma0(4)", "cusps"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = validate("cusps", &r.stdout);
    let rows: Vec<(String, i64)> = v["cusps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["cusp"].as_str().unwrap().to_string(), c["width"].as_i64().unwrap()))
        .collect();
    assert_eq!(rows, vec![("inf".into(), 1), ("0".into(), 4), ("1/2".into(), 1)]);
    let r = eichler(dir.path(), &["cusps"]);
    let v = validate("cusps", &r.stdout);
    assert_eq!(v["cusps"].as_array().unwrap().len(), 1);
    assert_eq!(v["cusps"][0]["cusp"], "inf");
    let r = eichler(dir.path(), &["--group", "Gamma0(4)", "--format", "csv", "cusps"]);
    assert_eq!(r.stdout.lines().count(), 4);
    assert_eq!(eichler(dir.path(), &["--group", "Gamma0(0)", "cusps"]).code, 2);
}

#[test]
fn form_output() {
    let dir = tempfile::tempdir().unwrap();
    let r = eichler(dir.path(), &["--terms", "20", "form", "--at", "0,1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = validate("form", &r.stdout);
    assert_eq!(num(&v["expansion"]["coeffs"][1][0]), -24.0);
    assert!((num(&v["values"][0]["value"][0]) - 0.001_785_369_850_642_157).abs() < 1e-15);
    let r = eichler(dir.path(), &["--terms", "5", "--form", "eisenstein(4)", "--format", "csv", "form"]);
    assert_eq!(r.stdout.lines().nth(2).unwrap(), "eisenstein(4),1,2.4000000000000000e2,0.0000000000000000e0");
    let file = dir.path().join("e.json");
    std::fs::write(&file, serde_json::to_string(&v["expansion"]).unwrap()).unwrap();
    let r = eichler(dir.path(), &["--form", "e.json", "--weight", "12", "form"]);
    assert_eq!(validate("form", &r.stdout)["expansion"], v["expansion"]);
    assert_eq!(eichler(dir.path(), &["--form", "e.json", "form"]).code, 2);
}

#[test]
fn period_polynomials() {
    let dir = tempfile::tempdir().unwrap();
    let r = eichler(dir.path(), &["period-poly", "--word", "T", "--route", "both"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = validate("period-poly", &r.stdout);
    assert!(num(&v["cross_residual"]) < 1e-6);
    for word in ["S", "I", "1,5,0,1"] {
        let r = eichler(dir.path(), &["period-poly", "--word", word]);
        let v = validate("period-poly", &r.stdout);
        for route in ["direct", "integral"] {
            assert!(v[route]["coeffs"].as_array().unwrap().iter().all(|c| num(&c[0]) == 0.0 && num(&c[1]) == 0.0));
        }
    }
    let r = eichler(dir.path(), &["--format", "csv", "period-poly", "--word", "TS", "--route", "integral"]);
    assert_eq!(r.stdout.lines().count(), 12);
    let r = eichler(dir.path(), &["--form", "e.json", "--weight", "12.5", "period-poly"]);
    assert_eq!(r.code, 2);
    let expansion = r#"{"kappa": 0.0, "lambda": 1.0, "start": 1, "coeffs": [[1, 0]]}"#;
    std::fs::write(dir.path().join("half.json"), expansion).unwrap();
    let r = eichler(dir.path(), &["--form", "half.json", "--weight", "12.5", "period-poly"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("sampled"), "{}", r.stderr);
}

#[test]
fn cocycle_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let zero = eichler(d, &["--out", "zero.json", "cocycle", "make", "--kind", "zero"]);
    assert_eq!(zero.code, 0);
    validate("cocycle", &std::fs::read_to_string(d.join("zero.json")).unwrap());
    let r = eichler(d, &["cocycle", "coboundary", "zero.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(validate("cocycle-coboundary", &r.stdout)["verdict"], "coboundary");

    eichler(d, &["--out", "delta.json", "cocycle", "make"]);
    let r = eichler(d, &["cocycle", "verify", "delta.json"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(validate("cocycle-verify", &r.stdout)["pass"], true);
    let r = eichler(d, &["cocycle", "coboundary", "delta.json"]);
    assert_eq!(validate("cocycle-coboundary", &r.stdout)["verdict"], "not-coboundary");
    let r = eichler(d, &["cocycle", "parabolic", "delta.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(validate("cocycle-parabolic", &r.stdout)["parabolic"], true);

    let text = std::fs::read_to_string(d.join("delta.json")).unwrap();
    std::fs::write(d.join("cut.json"), &text[..text.len() / 2]).unwrap();
    let r = eichler(d, &["cocycle", "verify", "cut.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line"), "{}", r.stderr);
    assert_eq!(eichler(d, &["cocycle", "verify", "missing.json"]).code, 2);
    assert_eq!(eichler(d, &["--format", "csv", "cocycle", "verify", "delta.json"]).code, 2);
}

#[test]
fn threshold_command() {
    let dir = tempfile::tempdir().unwrap();
    let r = eichler(dir.path(), &["threshold", "2", "1", "4", "0"]);
    assert_eq!(r.code, 0);
    let v = validate("threshold", &r.stdout);
    assert_eq!((num(&v["e"]), num(&v["eta"]), num(&v["psi"])), (3.0, 10.0, 10.0));
    assert_eq!(v["kprime"], 14);
    assert_eq!(eichler(dir.path(), &["threshold", "2", "1"]).code, 2);
}

#[test]
fn poincare_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    eichler(d, &["--out", "zero.json", "cocycle", "make", "--kind", "zero"]);
    let r = eichler(d, &["--bound", "2000", "poincare", "eval", "zero.json", "--at", "0.1,1.5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = validate("poincare-eval", &r.stdout);
    assert_eq!(v["points"][0]["series"]["value"], serde_json::json!([0.0, 0.0]));
    assert_eq!(v["points"][0]["series"]["kprime"], 18);

    let out = eichler(d, &["--out", "x2.json", "cocycle", "make", "--kind", "coboundary", "--rho", "[[0,0],[0,0],[1,0]]"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let args = ["--bound", "20000", "poincare", "construct", "x2.json", "--phi0", "[[1,0],[0,0],[1,0]]"];
    let r = eichler(d, &args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = validate("poincare-construct", &r.stdout);
    for check in v["checks"].as_array().unwrap() {
        assert!(num(&check["residual"]) < 10.0 * num(&check["error_estimate"]), "{check}");
    }
    let again = eichler(d, &args);
    assert_eq!(again.stdout, r.stdout);

    let r = eichler(d, &["--bound", "2000", "poincare", "transform", "x2.json", "--word", "T"]);
    assert_eq!(r.code, 1, "translation value of the unshifted coboundary is nonzero");
    let r = eichler(d, &["--bound", "2000", "poincare", "eval", "zero.json", "--kprime", "12"]);
    assert!(r.stderr.contains("warning"), "{}", r.stderr);
    validate("poincare-eval", &r.stdout);
    let r = eichler(d, &["--bound", "2000", "poincare", "transform", "zero.json", "--word", "T S"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    validate("poincare-transform", &r.stdout);
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { group: "Gamma0(6)".into(), n_terms: 30, ..Default::default() };
    let text = serde_json::to_string_pretty(&cfg).unwrap();
    validate("run-config", &text);
    assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
    std::fs::write(dir.path().join("run.json"), &text).unwrap();
    let r = eichler(dir.path(), &["--config", "run.json", "cusps"]);
    assert_eq!(validate("cusps", &r.stdout)["group"], "Gamma0(6)");
    let r = eichler(dir.path(), &["--config", "run.json", "--group", "SL2Z", "cusps"]);
    assert_eq!(validate("cusps", &r.stdout)["group"], "SL2Z");
    std::fs::write(dir.path().join("bad.json"), r#"{"group": "SL2Z", "colour": 1}"#).unwrap();
    assert_eq!(eichler(dir.path(), &["--config", "bad.json", "cusps"]).code, 2);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(eichler(dir.path(), &[]).code, 2);
    assert_eq!(eichler(dir.path(), &["--help"]).code, 0);
    assert_eq!(eichler(dir.path(), &["period-poly", "--word", "X"]).code, 2);
    assert_eq!(eichler(dir.path(), &["--multiplier", "nonsense", "period-poly"]).code, 2);
    assert_eq!(eichler(dir.path(), &["--group", "Gamma0(3)", "period-poly", "--word", "T"]).code, 2);
}
