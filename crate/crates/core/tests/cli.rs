use k3lines::cli::{run, EXIT_ERROR, EXIT_NOT_K3, EXIT_OK};
use k3lines::families::catalog_names;
use serde_json::Value;

fn k3(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut all = vec!["k3lines"];
    all.extend_from_slice(args);
    let code = run(all, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = k3(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn catalog_list_names_every_entry() {
    let (code, text, _) = k3(&["catalog", "list"]);
    assert_eq!(code, EXIT_OK);
    for n in catalog_names() {
        assert!(text.contains(n), "{n}");
    }
    let v = json(&["catalog", "list", "--format", "json"]);
    assert_eq!(v.as_array().unwrap().len(), catalog_names().len());
    assert!(text.contains("Ex. 6.1"));
}

#[test]
fn fermat_report() {
    let v = json(&["analyze", "--catalog", "fermat", "--lines", "both"]);
    assert_eq!(v["schema"], "k3lines.report/1");
    assert_eq!(v["lines"]["count"], 112);
    assert_eq!(v["lines"]["complete"], true);
    assert_eq!(v["lines"]["oracle"]["agree"], true);
    assert_eq!(v["graph"]["degrees"], serde_json::json!({"30": 112}));
    assert_eq!(v["summary"]["audit_failures"], 0);
    assert_eq!(v["summary"]["types"], serde_json::json!({"(10, 0)QC": 112}));
    assert!(v["claims"].as_array().unwrap().iter().all(|c| c["status"] == "PASS"));
}

#[test]
fn polynomial_and_json_inputs_agree() {
    let a = k3(&["analyze", "x0^4 + x1^4 + x2^4 + x3^4", "--lines", "brute:1"]);
    let src = r#"{"field": "3^1", "terms": [
        {"exps": [4,0,0,0], "coeff": "1"}, {"exps": [0,4,0,0], "coeff": "1"},
        {"exps": [0,0,4,0], "coeff": "1"}, {"exps": [0,0,0,4], "coeff": "1"}]}"#;
    let b = k3(&["analyze", src, "--lines", "brute:1"]);
    assert_eq!(a.0, EXIT_OK, "{}", a.2);
    assert_eq!(a, b);
}

#[test]
fn not_a_quartic_exits_2() {
    let (code, _, err) = k3(&["analyze", "x0^3 + x1^3 + x2^3 + x3^3"]);
    assert_eq!(code, EXIT_NOT_K3);
    assert!(err.contains("not a quartic"), "{err}");
    // three planes: positive-dimensional singular locus
    let (code, _, err) = k3(&["analyze", "--catalog", "ex61", "--param", "a=inf", "--allow-degenerate"]);
    assert_eq!(code, EXIT_NOT_K3, "{err}");
}

#[test]
fn parse_errors_carry_line_and_column() {
    let (code, _, err) = k3(&["analyze", "x0^4 + x1^4 +\n x2^4 + * x3^4"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("line 2, column 9"), "{err}");
    let (code, _, err) = k3(&["analyze", "{\"field\": \"3^1\",\n \"terms\": [}"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn bad_flags_are_rejected() {
    assert_eq!(k3(&["analyze", "x0^4", "--lines", "fast"]).0, EXIT_ERROR);
    assert_eq!(k3(&["analyze", "x0^4", "--max-ext", "9"]).0, EXIT_ERROR);
    assert_eq!(k3(&["analyze", "--catalog", "nosuch"]).0, EXIT_ERROR);
    assert_eq!(k3(&["analyze", "--catalog", "ex61", "--param", "b=1"]).0, EXIT_ERROR);
    let (code, _, err) = k3(&["analyze", "--catalog", "ex61", "--param", "a=inf"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("union of three planes"), "{err}");
}

#[test]
fn reports_are_byte_stable_and_independent_of_jobs() {
    let args = ["analyze", "--catalog", "ex33_deg2_v14", "--seed", "7"];
    let serial = k3(&[&args[..], &["--jobs", "1"]].concat());
    let parallel = k3(&[&args[..], &["--jobs", "4"]].concat());
    let again = k3(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(serial.0, EXIT_OK, "{}", serial.2);
    assert_eq!(serial, parallel);
    assert_eq!(parallel, again);
}

#[test]
fn text_format_mirrors_json() {
    let (_, text, _) = k3(&["analyze", "--catalog", "fermat", "--lines", "brute:2", "--format", "text"]);
    let v = json(&["analyze", "--catalog", "fermat", "--lines", "brute:2"]);
    for key in v.as_object().unwrap().keys() {
        assert!(text.lines().any(|l| l.starts_with(&format!("{key}:"))), "{key}");
    }
    assert!(text.contains("schema: k3lines.report/1"));
}

#[test]
fn quick_battery_passes_on_fermat() {
    let (code, out, err) = k3(&["verify-battery", "--quick", "--only", "fermat"]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 5, "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn corrupted_entry_is_pinpointed() {
    let (code, out, _) = k3(&["verify-battery", "--only", "fermat", "--corrupt", "fermat"]);
    assert_ne!(code, EXIT_OK);
    let fails: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(!fails.is_empty(), "{out}");
    assert!(fails.iter().all(|l| l.contains("fermat")));
    assert!(fails.iter().any(|l| l.contains("number of lines")));
}
