mod common;

use common::{code, csv_rows, hankel, report, schema, validate};
use serde_json::{json, Value};

fn omega(table: &Value, r: u64, s: u64) -> (f64, f64) {
    let e = table["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["r"] == r && e["s"] == s)
        .unwrap_or_else(|| panic!("no entry ({r},{s})"));
    (e["omega"]["re"].as_f64().unwrap(), e["omega"]["im"].as_f64().unwrap())
}

fn close(got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "{got} vs {want}");
}

#[test]
fn grunsky_tables() {
    let r = report(&["grunsky", "--family", "koebe", "--max-index", "5"], 0);
    let table = &r["results"]["tables"][0]["table"];
    let (re, im) = omega(table, 1, 1);
    close(re, 1.0, 1e-10);
    close(im, 0.0, 1e-10);
    close(omega(table, 3, 3).0, 1.0 / 3.0, 1e-10);
    for (p, q) in [(1, 3), (1, 5), (3, 5)] {
        close(omega(table, p, q).0, 0.0, 1e-10);
    }
    assert_eq!(table["entries"].as_array().unwrap().len(), 9);

    let r = report(&["grunsky", "--family", "identity"], 0);
    let entries = r["results"]["tables"][0]["table"]["entries"].as_array().unwrap().clone();
    assert_eq!(entries.len(), 16);
    assert!(entries.iter().all(|e| e["omega"] == json!({"re": 0.0, "im": 0.0})));

    let r = report(&["grunsky", "--family", "kfold", "--params", "3"], 0);
    let (re, im) = omega(&r["results"]["tables"][0]["table"], 1, 1);
    close(re.hypot(im), 0.0, 1e-12);
    let h31 = &r["results"]["tables"][0]["hankel"]["h31"];
    close(h31["re"].as_f64().unwrap(), -4.0 / 9.0, 1e-12);
}

#[test]
fn grunsky_needs_enough_order() {
    let out = hankel(&["grunsky", "--family", "koebe", "--order", "6", "--max-index", "7"]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_outcomes() {
    let r = report(&["verify", "--family", "koebe"], 0);
    let row = &r["results"]["functions"][0];
    assert_eq!(row["pass"], true);
    assert!(row["max_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["results"]["all_pass"], true);

    let r = report(&["verify", "--family", "identity"], 0);
    let moduli = r["results"]["functions"][0]["residual_moduli"].as_object().unwrap();
    assert_eq!(moduli.len(), 5);
    assert!(moduli.values().all(|v| v.as_f64() == Some(0.0)));

    // not certified: residuals are reported but never fail the run
    let r = report(&["verify", "--family", "raw", "--params", "1,3,0,0,0"], 0);
    let row = &r["results"]["functions"][0];
    assert_eq!(row["certified"], false);
    assert_eq!(row["informational_only"], true);
    assert_eq!(row["pass"], false);
}

#[test]
fn verify_flags_the_quoted_a5_relation_on_threefold_koebe() {
    let r = report(&["verify", "--family", "kfold", "--params", "3"], 1);
    let row = &r["results"]["functions"][0];
    close(row["residual_moduli"]["a5"].as_f64().unwrap(), 5.0 / 9.0, 1e-10);
    assert!(row["a5_omega13_residual"].as_f64().unwrap() < 1e-10);
    for name in ["a2", "a3", "a4", "omega_identity"] {
        assert!(row["residual_moduli"][name].as_f64().unwrap() < 1e-10, "{name}");
    }
    assert_eq!(r["results"]["all_pass"], false);
}

#[test]
fn audit_reports() {
    let r = report(&["audit", "--family", "koebe"], 0);
    let a = &r["results"]["reports"][0];
    close(a["chain_residuals"]["h22_headline"].as_f64().unwrap(), 8.0 / 3.0, 1e-9);
    assert_eq!(a["violations"], json!([]));
    let extrema = &r["results"]["extrema"];
    close(extrema["phi"]["value"].as_f64().unwrap(), 2.0, 1e-9);
    assert_eq!(extrema["psi"]["claimed"], 1.0);
    close(extrema["psi"]["value"].as_f64().unwrap(), 4.0 * 15f64.sqrt() / 15.0, 1e-8);

    let r = report(&["audit", "--family", "identity"], 0);
    let a = &r["results"]["reports"][0];
    for b in ["b1", "b2", "b3"] {
        assert_eq!(a[b], 0.0, "{b}");
    }

    let r = report(&["audit", "--family", "kfold", "--params", "3"], 0);
    close(r["results"]["reports"][0]["abs_h31"].as_f64().unwrap(), 4.0 / 9.0, 1e-10);
}

#[test]
fn audit_refuses_short_truncation() {
    let out = hankel(&["audit", "--family", "koebe", "--order", "9"]);
    assert_eq!(code(&out), 3);
    report(&["audit", "--family", "koebe", "--order", "10"], 0);
}

#[test]
fn search_reports() {
    let args = [
        "search", "--family", "herglotz", "--atoms", "1", "--objective", "abs_h22", "--seed", "42",
        "--restarts", "8",
    ];
    let a = report(&args, 0);
    close(a["results"]["best_value"].as_f64().unwrap(), 1.0, 1e-6);
    let b = report(&args, 0);
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["results"]["history"].as_array().unwrap().len(), 8);

    let r = report(&["search", "--restarts", "1", "--max-evals", "1"], 0);
    assert_eq!(r["results"]["evals_used"], 1);
    assert_eq!(r["results"]["history"].as_array().unwrap().len(), 1);
    assert_eq!(r["results"]["budget_exhausted"], true);
}

#[test]
fn search_recovers_threefold_value_with_four_atoms() {
    let r = report(&["search", "--atoms", "4", "--objective", "abs_h31", "--seed", "7"], 0);
    assert!(r["results"]["best_value"].as_f64().unwrap() >= 4.0 / 9.0 - 1e-6);
    assert_eq!(r["results"]["best_function"]["certified"], true);
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["grunsky"],
        vec!["grunsky", "--family", "nope"],
        vec!["grunsky", "--family", "koebe", "--params", "1,2"],
        vec!["grunsky", "--family", "herglotz", "--params", "0.5,0,0.4,1"],
        vec!["grunsky", "--family", "raw", "--params", "2,1"],
        vec!["grunsky", "--family", "koebe", "--max-index", "4"],
        vec!["grunsky", "--family", "koebe", "--format", "xml"],
        vec!["search", "--objective", "abs_h99x"],
        vec!["search", "--atoms", "17"],
        vec!["search", "--restarts", "0"],
        vec!["frobnicate"],
        vec!["verify", "--config", "/nonexistent/config.json"],
    ] {
        let out = hankel(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn config_file_blocks_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        serde_json::to_string(&json!({
            "verify": {
                "functions": [
                    {"family": "koebe", "params": [0.4]},
                    {"family": "convex-herglotz", "params": [0.25, 0.0, 0.75, 2.0]},
                    {"family": "identity"}
                ],
                "order": 10
            },
            "search": {"atoms": 1, "objective": "abs_h22", "restarts": 2, "seed": 5, "max_evals": 400}
        }))
        .unwrap(),
    )
    .unwrap();
    let path = config.to_str().unwrap();

    // the convex member trips only the quoted a5 relation
    let r = report(&["verify", "--config", path], 1);
    assert_eq!(r["inputs"]["order"], 10);
    let rows = r["results"]["functions"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["function"]["family"], "convex");
    let passes: Vec<bool> = rows.iter().map(|row| row["pass"].as_bool().unwrap()).collect();
    assert_eq!(passes, vec![true, false, true]);
    let moduli = rows[1]["residual_moduli"].as_object().unwrap();
    assert!(moduli.iter().all(|(name, v)| (name == "a5") == (v.as_f64().unwrap() > 1e-9)));
    assert!(rows[1]["a5_omega13_residual"].as_f64().unwrap() < 1e-9);

    // a flag family replaces the list; a flag order replaces the file's
    let r = report(&["verify", "--config", path, "--family", "identity", "--order", "12"], 0);
    assert_eq!(r["results"]["functions"].as_array().unwrap().len(), 1);
    assert_eq!(r["inputs"]["order"], 12);

    let r = report(&["search", "--config", path, "--restarts", "3"], 0);
    assert_eq!(r["inputs"]["spec"]["restarts"], 3);
    assert_eq!(r["inputs"]["spec"]["max_evals"], 400);
    assert_eq!(r["inputs"]["spec"]["seed"], 5);

    // the grunsky block is absent, so only flags count
    assert_eq!(code(&hankel(&["grunsky", "--config", path])), 2);
    report(&["grunsky", "--config", path, "--family", "koebe"], 0);

    std::fs::write(&config, r#"{"verify": {"family": "koebe", "colour": 1}}"#).unwrap();
    assert_eq!(code(&hankel(&["verify", "--config", path])), 2);
    std::fs::write(&config, r#"{"plot": {}}"#).unwrap();
    assert_eq!(code(&hankel(&["verify", "--config", path, "--family", "koebe"])), 2);
    std::fs::write(&config, "{not json").unwrap();
    assert_eq!(code(&hankel(&["verify", "--config", path])), 2);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    let run = hankel(&["grunsky", "--family", "koebe", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    assert!(run.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["command"], "grunsky");
}

fn sample_runs() -> Vec<Vec<&'static str>> {
    vec![
        vec!["grunsky", "--family", "convex-kfold", "--params", "2"],
        vec!["grunsky", "--family", "raw", "--params", "1,0.5,-0.25", "--order", "8"],
        vec!["verify", "--family", "herglotz", "--params", "0.3,1.0,0.7,-2.0"],
        vec!["verify", "--family", "raw", "--params", "1,3,0,0,0"],
        vec!["audit", "--family", "convex-koebe", "--params", "0.7"],
        vec!["search", "--family", "convex-herglotz", "--atoms", "2", "--restarts", "2", "--max-evals", "300"],
        vec!["search", "--family", "koebe", "--objective", "abs_a4", "--restarts", "2"],
    ]
}

#[test]
fn every_report_validates_against_the_schema() {
    let schema = schema();
    for args in sample_runs() {
        let out = hankel(&args);
        assert!([0, 1].contains(&code(&out)), "{args:?}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        if let Err(e) = validate(&schema, &v) {
            panic!("{args:?}: {e}");
        }
    }
    let v = report(&["verify", "--family", "kfold", "--params", "3"], 1);
    validate(&schema, &v).unwrap();
}

#[test]
fn schema_rejects_malformed_reports() {
    let schema = schema();
    let good = report(&["grunsky", "--family", "koebe"], 0);
    validate(&schema, &good).unwrap();

    let mut v = good.clone();
    v["schema_version"] = json!("2.0.0");
    assert!(validate(&schema, &v).is_err());

    let mut v = good.clone();
    v.as_object_mut().unwrap().remove("timings");
    assert!(validate(&schema, &v).is_err());

    let mut v = good.clone();
    v["results"]["tables"][0]["table"]["entries"][0]["omega"] = json!([1.0, 0.0]);
    assert!(validate(&schema, &v).is_err());

    let mut v = good;
    v["command"] = json!("audit");
    assert!(validate(&schema, &v).is_err());
}

#[test]
fn csv_and_json_carry_the_same_values() {
    for args in sample_runs() {
        let json_out = hankel(&args);
        let mut csv_args = args.clone();
        csv_args.extend(["--format", "csv"]);
        let csv_out = hankel(&csv_args);
        assert_eq!(code(&json_out), code(&csv_out), "{args:?}");

        let v: Value = serde_json::from_slice(&json_out.stdout).unwrap();
        let rows = csv_rows(&csv_out.stdout);
        let mut leaves = 0;
        for (path, text) in &rows {
            if path.starts_with("/timings") || path == "/inputs/format" {
                continue;
            }
            let expected = v.pointer(path).unwrap_or_else(|| panic!("{args:?}: {path} missing in JSON"));
            leaves += 1;
            match expected {
                Value::Number(n) => {
                    let got: f64 = text.parse().unwrap();
                    assert_eq!(got, n.as_f64().unwrap(), "{args:?}: {path}");
                    if n.is_f64() {
                        let digits = text.split(['e', 'E']).next().unwrap().replace(['-', '.'], "");
                        assert_eq!(digits.len(), 17, "{path}: {text}");
                    }
                }
                Value::String(s) => assert_eq!(text, s, "{path}"),
                Value::Bool(b) => assert_eq!(text, &b.to_string(), "{path}"),
                Value::Null => assert!(text.is_empty(), "{path}"),
                _ => panic!("{path} is not a leaf"),
            }
        }
        let json_leaves = count_leaves(&v) - count_leaves(&v["timings"]) - 1;
        assert_eq!(leaves, json_leaves, "{args:?}");
    }
}

fn count_leaves(v: &Value) -> usize {
    match v {
        Value::Object(m) => m.values().map(count_leaves).sum(),
        Value::Array(a) => a.iter().map(count_leaves).sum(),
        _ => 1,
    }
}

#[test]
fn negative_parameters_parse() {
    let r = report(&["grunsky", "--family", "koebe", "--params", "-0.5"], 0);
    let (re, im) = omega(&r["results"]["tables"][0]["table"], 1, 1);
    close(re, (-0.5f64).cos(), 1e-12);
    close(im, (-0.5f64).sin(), 1e-12);
}
