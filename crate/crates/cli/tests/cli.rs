use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn run(args: &[&str], input: &Value) -> (i32, Value, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mfstar"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.to_string().as_bytes()).unwrap();
    let out: Output = child.wait_with_output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v, text)
}

fn m(rows: &[&[&str]]) -> Value {
    json!({ "entries": rows })
}

fn a2() -> Value {
    json!({ "f": "x^2 + y^3", "A": m(&[&["x", "y"], &["-y^2", "x"]]), "B": m(&[&["x", "-y"], &["y^2", "x"]]) })
}

fn two_layer() -> Value {
    json!({
        "xs": ["x^2 + y^3", "x^2 + y^5"],
        "layers": [
            { "A": m(&[&["x^2 + y^3"]]), "B": m(&[&["1"]]) },
            { "A": m(&[&["x^2 + y^5"]]), "B": m(&[&["1"]]) }
        ],
        "blocks": { "1,2": m(&[&["1"]]) },
        "gens": [
            { "mf": { "f": "x^2 + y^3", "A": m(&[&["x^2 + y^3"]]), "B": m(&[&["1"]]) }, "d": 0 },
            { "mf": { "f": "x^2 + y^5", "A": m(&[&["x^2 + y^5"]]), "B": m(&[&["1"]]) }, "d": 0 }
        ]
    })
}

#[test]
fn mf_verify_catalog_entry_and_corruption() {
    let (code, out, _) = run(&["catalog", "get", "A", "-p", "m=2", "-p", "j=1"], &Value::Null);
    assert_eq!(code, 0);
    let mf = out["result"]["entry"]["factorizations"][0].clone();
    let (code, out, _) = run(&["mf", "verify"], &mf);
    assert_eq!((code, out["ok"].clone(), out["op"].clone()), (0, json!(true), json!("mf verify")));

    let mut bad = a2();
    bad["A"] = m(&[&["x", "y"], &["y^2", "x"]]);
    let (code, out, _) = run(&["mf", "verify"], &bad);
    assert_eq!(code, 1);
    assert_eq!(out["ok"], json!(false));
}

#[test]
fn malformed_input_and_unknown_commands() {
    let (code, out, _) = run(&["gb"], &json!({ "gens": ["x +* y"] }));
    assert_eq!(code, 2);
    assert!(out["error"]["message"].as_str().unwrap().contains("position"));
    let (code, _, _) = run(&["mf", "verify"], &json!({ "f": "x" }));
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"], &Value::Null);
    assert_eq!(code, 2);
}

#[test]
fn theorem0_round_trip_and_determinism() {
    let (code, out, text) = run(&["cert", "theorem0"], &two_layer());
    assert_eq!(code, 0);
    let rep = &out["result"];
    assert_eq!(rep["level"], json!(2));
    assert_eq!(rep["radius_bound"], json!(1));
    let (_, _, again) = run(&["cert", "theorem0"], &two_layer());
    assert_eq!(text, again);

    let cert = rep["certificate"].clone();
    let (code, verified, _) = run(&["cert", "verify"], &cert);
    assert_eq!(code, 0);
    assert_eq!(verified["result"]["level"], json!(2));

    // a tampered summand witness is rejected
    let mut bad = cert.clone();
    bad["body"]["extension"]["e"]["entries"][0][0] = json!("2");
    let (code, _, _) = run(&["cert", "verify"], &bad);
    assert_eq!(code, 1);
}

#[test]
fn exactness_with_oracle() {
    let claim = json!({
        "modules": [
            { "ideal": [], "P": { "rows": 1, "cols": 1, "entries": [["x*y"]] } },
            { "ideal": [], "P": { "rows": 2, "cols": 2, "entries": [["x", "0"], ["0", "y"]] } }
        ],
        "maps": [m(&[&["y"], &["x"]])],
        "injective": true,
        "surjective": true
    });
    let (code, out, _) = run(&["mod", "check-exact", "--truncation-oracle", "4"], &claim);
    assert_eq!(code, 1, "{out}");
    assert_eq!(out["result"]["oracle"]["agrees"], json!(true));

    let mut good = claim.clone();
    good["modules"][1]["P"] = json!({ "rows": 1, "cols": 1, "entries": [["x*y"]] });
    good["maps"] = json!([m(&[&["1"]])]);
    let (code, out, _) = run(&["mod", "check-exact", "--truncation-oracle", "4", "--field", "Fp:101"], &good);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["result"]["oracle"]["exact"], json!(true));
}

#[test]
fn groebner_commands() {
    let (code, out, _) = run(&["gb", "--order", "lex"], &json!({ "gens": ["x - y", "y^2 - 1"] }));
    assert_eq!(code, 0);
    assert_eq!(out["result"]["basis"].as_array().unwrap().len(), 2);
    let (code, out, _) = run(&["nf", "--order", "lex"], &json!({ "gens": ["x^2 + y^3"], "f": "x^2" }));
    assert_eq!(code, 0);
    assert_eq!(out["result"]["nf"], json!([{ "c": "-1", "e": [0, 3] }]));
    let (code, out, _) = run(&["ker"], &json!({ "A": m(&[&["x", "y"]]) }));
    assert_eq!(code, 0);
    assert_eq!(out["result"]["kernel"]["cols"], json!(1));
    let (code, _, _) = run(&["lift"], &json!({ "A": m(&[&["x", "y"]]), "b": ["1"] }));
    assert_eq!(code, 1);
    let (code, out, _) = run(&["lift"], &json!({ "A": m(&[&["x", "y"]]), "b": ["x^2 + y^2"] }));
    assert_eq!(code, 0);
    assert_eq!(out["result"]["x"].as_array().unwrap().len(), 2);
}

#[test]
fn star_commands() {
    let fm = two_layer();
    for op in ["assemble", "build-c", "reduce-c", "lemma3"] {
        let (code, out, _) = run(&["star", op], &fm);
        assert_eq!(code, 0, "{op}: {out}");
    }
    let doc = json!({ "module": { "P": m(&[&["x^4 + x^2*y^5 + x^2*y^3 + y^8"]]) }, "xs": ["x^2 + y^3", "x^2 + y^5"] });
    let (code, out, _) = run(&["star", "filtrate"], &doc);
    assert_eq!(code, 0, "{out}");
    let re = out["result"]["filtered"].clone();
    let (code, _, _) = run(&["star", "assemble"], &re);
    assert_eq!(code, 0);
    let mut three = fm.clone();
    three["xs"] = json!(["x", "y", "x + y"]);
    three["layers"] = json!([
        { "A": m(&[&["x"]]), "B": m(&[&["1"]]) },
        { "A": m(&[&["y"]]), "B": m(&[&["1"]]) },
        { "A": m(&[&["x + y"]]), "B": m(&[&["1"]]) }
    ]);
    three["blocks"] = json!({ "1,2": m(&[&["1"]]), "2,3": m(&[&["1"]]) });
    three["k"] = json!(1);
    let (code, out, _) = run(&["star", "reassoc"], &three);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["result"]["claims"].as_array().unwrap().len(), 4);
}

#[test]
fn catalog_registry() {
    let dir = std::env::temp_dir().join(format!("mfstar-cli-reg-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let d = dir.to_str().unwrap();
    let entry = json!({
        "name": "cusp",
        "ring": { "vars": ["x", "y"], "field": "Q", "order": "grevlex" },
        "f": "x^2 + y^3",
        "factorizations": [a2()]
    });
    let (code, _, _) = run(&["catalog", "register", "--registry", d], &entry);
    assert_eq!(code, 0);
    let (_, out, _) = run(&["catalog", "list", "--registry", d], &Value::Null);
    let names: Vec<&str> = out["result"]["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"cusp") && names.contains(&"E8"));
    let (code, _, _) = run(&["catalog", "get", "cusp", "--registry", d], &Value::Null);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["catalog", "get", "D", "-p", "n=3"], &Value::Null);
    assert_eq!(code, 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn mf_and_cert_transformers() {
    let (code, out, _) = run(&["mf", "syzygy"], &a2());
    assert_eq!(code, 0);
    let (code, _, _) = run(&["mf", "periodicity"], &out["result"]["mf"]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["mf", "sum"], &json!({ "mfs": [a2(), a2()] }));
    assert_eq!((code, out["result"]["mf"]["A"]["rows"].clone()), (0, json!(4)));
    let (code, _, _) = run(&["mf", "scale"], &json!({ "A": m(&[&["x", "y"], &["-y^2", "x"]]), "x": "y", "y": "x^2 + y^3" }));
    assert_eq!(code, 0);
    let (code, _, _) = run(&["mf", "from-presentation"], &json!({ "A": m(&[&["x", "y"], &["-y^2", "x"]]), "f": "x^2 + y^3" }));
    assert_eq!(code, 0);

    let cert = json!({
        "mode": "closed",
        "ideal": ["x^2 + y^3"],
        "generator": { "module": { "ideal": ["x^2 + y^3"], "P": a2()["A"] }, "syzygies": [] },
        "level": 1,
        "target": { "ideal": ["x^2 + y^3"], "P": a2()["A"] },
        "body": { "summand": { "blocks": ["G"], "n": m(&[&["1", "0"], &["0", "1"]]), "e": m(&[&["1", "0"], &["0", "1"]]) } }
    });
    let (code, _, _) = run(&["cert", "verify"], &cert);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["cert", "lemma5"], &json!({ "certificate": cert, "mf": a2() }));
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["result"]["certificate"]["mode"], json!("additive"));
    let (code, out, _) = run(&["cert", "scale"], &json!({ "certificate": cert, "B": a2()["B"], "x": "y" }));
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = run(&["cert", "verify"], &out["result"]["certificate"]);
    assert_eq!(code, 0);
}
