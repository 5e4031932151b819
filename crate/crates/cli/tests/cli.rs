use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use drinfeld_rat::expr::parse;
use drinfeld_rat::laurent::{deg_to_u, LaurentJson};
use drinfeld_rat::tate::{TateSeries, TateSeriesJson};
use drinfeld_rat::{Ctx, FieldParams, FiniteField, Laurent, Q};

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn drat(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_drat")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn drat_json(args: &[&str]) -> (i32, Value) {
    let (code, text) = drat(args);
    (code, serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")))
}

fn spec_arg(name: &str) -> String {
    specs().join(name).to_string_lossy().into_owned()
}

fn write_spec(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("drat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn f9_ctx(e: u32) -> Ctx {
    let f = FiniteField::with_generator_name(FieldParams { p: 3, m: 1, big_m: 2 }, "i").unwrap();
    Ctx::new(f, e, 400)
}

fn laurent(ctx: &Ctx, v: &Value) -> Laurent {
    let j: LaurentJson = serde_json::from_value(strip_deg(v)).unwrap();
    Laurent::from_json(ctx, &j).unwrap()
}

fn strip_deg(v: &Value) -> Value {
    let mut v = v.clone();
    v.as_object_mut().unwrap().remove("deg");
    v
}

fn rational(v: &Value) -> Q {
    Q::new(v[0].as_i64().unwrap(), v[1].as_i64().unwrap())
}

#[test]
fn periods_match_the_golden_file() {
    let (code, out) = drat_json(&["periods", "--spec", &spec_arg("cm_q3.json")]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["result"]["N"], 2);
    let golden: Value =
        serde_json::from_str(include_str!("golden/cm_q3_periods.json")).unwrap();
    let e = out["provenance"]["stopping"]["e"].as_u64().unwrap() as u32;
    let ctx = f9_ctx(e);
    let f = ctx.field.clone();
    let periods = &out["result"]["periods"];
    let ours_pi: Vec<Laurent> = (0..2).map(|j| laurent(&ctx, &periods["pi"][j])).collect();
    let ours_eta: Vec<Laurent> = (0..2).map(|j| laurent(&ctx, &periods["eta"][0][j])).collect();
    assert_eq!(ours_pi[0].deg(), Some(Q::new(-3, 4)));
    assert_eq!(ours_pi[1].deg(), Some(Q::new(3, 4)));
    for j in 0..2 {
        let gold = |g: &Value| {
            let v = parse(g["series"].as_str().unwrap(), 3).unwrap().eval(&ctx, &Default::default()).unwrap();
            v.truncate(deg_to_u(rational(&g["order"]), e).unwrap())
        };
        let (gp, ge) = (gold(&golden["pi"][j]), gold(&golden["eta"][j]));
        // one F_3^x scalar per basis vector
        let c = f.div(gp.sign(), ours_pi[j].sign()).unwrap();
        assert!(f.in_base_field(c));
        assert!(ours_pi[j].scale(c).agrees_to(&gp, gp.prec()), "pi_{}", j + 1);
        assert!(ours_eta[j].scale(c).agrees_to(&ge, ge.prec()), "eta_{}", j + 1);
    }
}

#[test]
fn carlitz_reports_residue_check() {
    for q in ["2", "3", "4"] {
        let (code, out) = drat_json(&["carlitz", "--q", q, "--t-trunc", "12"]);
        assert_eq!(code, 0, "{out}");
        let checks = &out["result"]["checks"];
        assert_eq!(checks["residue"], true);
        assert_eq!(checks["period"], true);
        assert_eq!(checks["omega"], true);
        assert_eq!(out["provenance"]["t_trunc"], 12);
    }
    let (code, out) = drat_json(&["carlitz", "--q", "6"]);
    assert_eq!(code, 1);
    assert_eq!(out["failures"][0]["class"], "invalid");
}

#[test]
fn verify_passes_on_a_seeded_random_module() {
    let (code, out) = drat_json(&["verify", "--seed", "7", "--rank", "2"]);
    assert_eq!(code, 0, "{out}");
    let checks = out["result"]["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert_eq!(out["provenance"]["spec"]["seed"], 7);
    // the recorded spec replays the same module
    let spec = serde_json::to_string(&out["provenance"]["spec"]).unwrap();
    let path = write_spec("replay.json", &spec);
    let (code, again) = drat_json(&["verify", "--spec", &path]);
    assert_eq!(code, 0);
    assert_eq!(again["result"]["module"], out["result"]["module"]);
}

#[test]
fn output_is_deterministic() {
    let args = ["rat", "--spec", &spec_arg("half_carlitz_q4.json")];
    let (a, b) = (drat(&args), drat(&args));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let (_, v) = drat(&["verify", "--seed", "11", "--rank", "3"]);
    let (_, w) = drat(&["verify", "--seed", "11", "--rank", "3"]);
    assert_eq!(v, w);
}

#[test]
fn emitted_series_round_trip() {
    let (code, out) = drat_json(&["rat", "--spec", &spec_arg("cm_q3.json"), "--t-trunc", "6"]);
    assert_eq!(code, 0);
    let e = out["provenance"]["stopping"]["e"].as_u64().unwrap() as u32;
    let ctx = f9_ctx(e);
    for row in out["result"]["product"]["pi"].as_array().unwrap() {
        for entry in row.as_array().unwrap() {
            let j: TateSeriesJson = serde_json::from_value(entry.clone()).unwrap();
            let s = TateSeries::from_json(&ctx, &j).unwrap();
            assert_eq!(s.to_json(), j);
        }
    }
    for x in out["result"]["torsion"]["xi"].as_array().unwrap() {
        let v = laurent(&ctx, x);
        assert_eq!(serde_json::to_value(v.to_json()).unwrap(), strip_deg(x));
        assert_eq!(rational(&x["deg"]), v.deg().unwrap());
    }
}

#[test]
fn provenance_records_hash_and_stopping() {
    let (code, out) = drat_json(&["rat", "--spec", &spec_arg("half_carlitz_q8.json"), "--epsilon", "q^-40"]);
    assert_eq!(code, 0, "{out}");
    let p = &out["provenance"];
    assert_eq!(p["log_q_epsilon"], -40);
    assert_eq!(p["spec_sha256"].as_str().unwrap().len(), 64);
    assert!(rational(&p["stopping"]["log_q_delta"]) < Q::from(0));
    assert!(p["stopping"]["factors"].as_u64().unwrap() >= 1);
    let (_, other) = drat_json(&["rat", "--spec", &spec_arg("half_carlitz_q8.json")]);
    assert_ne!(other["provenance"]["spec_sha256"], p["spec_sha256"]);
}

#[test]
fn missing_roots_enlarge_the_field() {
    // sqrt(-1) is needed for the Carlitz torsion over F_3
    let path = write_spec("carlitz_f3.json", r#"{"field":{"p":3},"coeffs":["1"]}"#);
    let (code, out) = drat_json(&["torsion", "--spec", &path]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["provenance"]["field"]["M"], 2);
}

#[test]
fn bad_specs_fail_with_classes() {
    let cases = [
        (r#"{"field":{"p":3},"coeffs":["1"],"extra":0}"#, "parse"),
        (r#"{"field":{"p":3},"coeffs":["θ^{1/0}", "1"]}"#, "parse"),
        (r#"{"field":{"p":3},"coeffs":["sqrt(θ^3 - θ - 1)", "1"]}"#, "parse"),
        (r#"{"field":{"p":4},"coeffs":["1"]}"#, "invalid"),
        (r#"{"field":{"p":3},"coeffs":["1"],"command":"rat"}"#, "invalid"),
    ];
    for (i, (text, class)) in cases.iter().enumerate() {
        let path = write_spec(&format!("bad{i}.json"), text);
        let (code, out) = drat_json(&["polygon", "--spec", &path]);
        assert_eq!(code, 1, "{text}");
        assert_eq!(out["ok"], false);
        assert_eq!(out["failures"][0]["class"], *class, "{text}: {out}");
    }
    let (code, out) = drat_json(&["rat"]);
    assert_eq!(code, 1);
    assert!(out["failures"][0]["message"].as_str().unwrap().contains("--spec"));
}

#[test]
fn polygon_reports_slopes_as_rationals() {
    let (code, out) = drat_json(&["polygon", "--spec", &spec_arg("cm_q3.json"), "--pretty"]);
    assert_eq!(code, 0);
    let slopes: Vec<Q> = out["result"]["polygon"]["slopes"].as_array().unwrap().iter().map(rational).collect();
    assert_eq!(slopes, vec![Q::new(-7, 4), Q::new(3, 4)]);
    assert_eq!(rational(&out["result"]["radius"]["log_q_r_phi"]), Q::new(-3, 4));
}
