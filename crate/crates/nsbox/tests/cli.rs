use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use nsbox::cli::{run, Io};
use nsbox::json;
use nsbox_core::boxes::{mermin_family, svetlichny_family};
use nsbox_core::{Scalar, TripartiteBox};
use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;

fn nsbox(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nsbox"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

/// In-process run: exit code, stdout, stderr.
fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut stdin: &[u8] = &[];
    let code = run(
        std::iter::once("nsbox").chain(args.iter().copied()),
        &mut Io { stdin: &mut stdin, stdout: &mut out, stderr: &mut err },
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn box_text(b: &TripartiteBox) -> String {
    json::to_text(&json::tripartite_to_json(b))
}

fn parse(text: &str) -> Value {
    serde_json::from_str(text).expect("stdout is JSON")
}

#[test]
fn gen_emits_the_family() {
    let out = nsbox(&["gen", "--family", "svf", "--param", "1/2"], None);
    assert_eq!(out.status.code(), Some(0));
    let b = json::tripartite_from_json(&parse(&String::from_utf8(out.stdout).unwrap())).unwrap();
    assert_eq!(b, svetlichny_family(&Scalar::ratio(1, 2)).unwrap());
    assert!(out.stderr.is_empty());
}

#[test]
fn gen_accepts_surd_parameters() {
    let (code, out, _) = call(&["gen", "--family", "svf", "--param", "0+1/2*sqrt2"]);
    assert_eq!(code, 0);
    assert_eq!(json::tripartite_from_json(&parse(&out)).unwrap(), svetlichny_family(&Scalar::inv_sqrt2()).unwrap());
    let (code, _, err) = call(&["gen", "--family", "svf", "--param", "2"]);
    assert_eq!(code, 1, "{err}");
    let (code, _, _) = call(&["gen", "--family", "svf", "--param", "0.5"]);
    assert_eq!(code, 2);
}

#[test]
fn superlocal_reports_genuine_for_svf_half() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "svf.json", &box_text(&svetlichny_family(&Scalar::ratio(1, 2)).unwrap()));
    let (code, out, _) = call(&["superlocal", "--in", arg(&f), "--d", "2"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["genuine"], Value::Bool(true));
    assert_eq!(v["verdicts"][0]["cut"], "A|BC");
    assert_eq!(v["verdicts"][0]["status"], "superlocal");
    assert_eq!(v["verdicts"][0]["certificate"], serde_json::json!({"rank": 3, "d": 2}));
}

#[test]
fn strength_outside_r_is_a_domain_error() {
    // a ⊕ b ⊕ c = xyz, uniformly otherwise: nonsignaling but outside R
    let b = TripartiteBox::from_fn(|o, x| {
        if o[0] ^ o[1] ^ o[2] == x[0] & x[1] & x[2] {
            Scalar::ratio(1, 4)
        } else {
            Scalar::zero()
        }
    });
    assert!(b.validate().is_valid());
    let out = nsbox(&["strength", "--in", "-"], Some(&box_text(&b)));
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8(out.stderr).unwrap().contains("not in Svetlichny-box polytope"));
}

#[test]
fn verify_appendix_witness_and_tampering() {
    let dir = TempDir::new().unwrap();
    let target = write(&dir, "svf.json", &box_text(&svetlichny_family(&Scalar::ratio(1, 2)).unwrap()));
    let (code, witness, _) = call(&["gen", "--appendix", "a", "--param", "1/2"]);
    assert_eq!(code, 0);
    let w = write(&dir, "w.json", &witness);
    assert_eq!(call(&["verify", "--witness", arg(&w), "--in", arg(&target)]).0, 0);

    let mut doc = parse(&witness);
    doc["terms"][0]["weight"] = Value::String("1/3".into());
    let bad = write(&dir, "bad.json", &json::to_text(&doc));
    assert_eq!(call(&["verify", "--witness", arg(&bad), "--in", arg(&target)]).0, 1);
}

#[test]
fn verify_rank_certificate() {
    let dir = TempDir::new().unwrap();
    let mf = write(&dir, "mf.json", &box_text(&mermin_family(&Scalar::ratio(1, 2)).unwrap()));
    let good = write(&dir, "c.json", r#"{"rank": 3, "d": 2}"#);
    assert_eq!(call(&["verify", "--witness", arg(&good), "--in", arg(&mf)]).0, 0);
    let wrong = write(&dir, "c2.json", r#"{"rank": 4, "d": 2, "cut": "B|AC"}"#);
    assert_eq!(call(&["verify", "--witness", arg(&wrong), "--in", arg(&mf)]).0, 1);
    let verdict = write(&dir, "v.json", r#"{"cut": "A|BC", "status": "superlocal", "certificate": {"rank": 3, "d": 2}}"#);
    assert_eq!(call(&["verify", "--witness", arg(&verdict), "--in", arg(&mf)]).0, 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nsbox(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(nsbox(&["eval"], None).status.code(), Some(2));
    let out = nsbox(&["eval", "--in", "-"], Some("{not json"));
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let (code, _, err) = call(&["eval", "--in", "/nonexistent/box.json"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    assert_eq!(nsbox(&["--help"], None).status.code(), Some(0));
}

#[test]
fn eval_reads_stdin_and_is_byte_stable() {
    let text = box_text(&mermin_family(&Scalar::one()).unwrap());
    let first = nsbox(&["eval", "--in", "-"], Some(&text));
    let second = nsbox(&["eval", "--in", "-"], Some(&text));
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let v = parse(&String::from_utf8(first.stdout).unwrap());
    let m0000 = v["inequalities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["family"] == "mermin" && e["label"] == "0000")
        .unwrap()
        .clone();
    assert_eq!(m0000["value"], serde_json::json!({"a": "4", "b": "0"}));
    assert_eq!(m0000["at_max"], Value::Bool(true));
}

#[test]
fn verbose_summary_goes_to_stderr() {
    let text = box_text(&mermin_family(&Scalar::one()).unwrap());
    let quiet = nsbox(&["eval", "--in", "-"], Some(&text));
    let loud = nsbox(&["--verbose", "eval", "--in", "-"], Some(&text));
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(quiet.stderr.is_empty());
    assert!(!loud.stderr.is_empty());
}

#[test]
fn quantum_presets_snap_to_the_families() {
    let (code, out, _) = call(&["quantum", "--theta", "pi/4", "--preset", "mermin"]);
    assert_eq!(code, 0);
    assert_eq!(json::tripartite_from_json(&parse(&out)).unwrap(), mermin_family(&Scalar::one()).unwrap());
    let (code, out, _) = call(&["quantum", "--theta", "pi/4"]);
    assert_eq!(code, 0);
    assert_eq!(json::tripartite_from_json(&parse(&out)).unwrap(), svetlichny_family(&Scalar::one()).unwrap());
    // sin 0.6 is off the lattice
    let (code, _, err) = call(&["quantum", "--theta", "0.3"]);
    assert_eq!(code, 1, "{err}");
    let (code, out, _) = call(&["quantum", "--theta", "0.3", "--float"]);
    assert_eq!(code, 0);
    assert!(json::float_box_from_json(&parse(&out)).is_ok());
}

#[test]
fn quantum_reads_state_and_settings_files() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![[0.0, 0.0]; 8];
    amps[0] = [h, 0.0];
    amps[7] = [h, 0.0];
    let state = write(&dir, "s.json", &serde_json::json!({ "amplitudes": amps }).to_string());
    let settings = write(
        &dir,
        "x.json",
        r#"{"alice": [[1,0,0],[0,1,0]], "bob": [[1,0,0],[0,1,0]], "charlie": [[0,-1,0],[1,0,0]]}"#,
    );
    let (code, out, err) = call(&["quantum", "--state", arg(&state), "--settings", arg(&settings)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(json::tripartite_from_json(&parse(&out)).unwrap(), mermin_family(&Scalar::one()).unwrap());
    let skew = write(&dir, "y.json", r#"{"alice": [[1,1,0],[0,1,0]], "bob": [[1,0,0],[0,1,0]], "charlie": [[0,1,0],[1,0,0]]}"#);
    assert_eq!(call(&["quantum", "--state", arg(&state), "--settings", arg(&skew)]).0, 2);
}

fn reports_for(b: &TripartiteBox) -> Vec<(Vec<&'static str>, String)> {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "b.json", &box_text(b));
    let mut reports = Vec::new();
    for args in [
        vec!["eval"],
        vec!["membership"],
        vec!["membership", "--polytope", "L"],
        vec!["strength"],
        vec!["superlocal", "--d", "2"],
        vec!["superlocal", "--d", "4", "--cut", "A|BC"],
    ] {
        let mut full = vec![args[0], "--in", arg(&f)];
        full.extend(&args[1..]);
        let (code, out, err) = call(&full);
        assert_eq!(code, 0, "{args:?}: {err}");
        reports.push((args, out));
    }
    reports
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn every_report_passes_verify(k in 1i64..=8, mermin in any::<bool>()) {
        let p = Scalar::ratio(k, 8);
        let b = if mermin { mermin_family(&p).unwrap() } else { svetlichny_family(&p).unwrap() };
        let dir = TempDir::new().unwrap();
        let target = write(&dir, "b.json", &box_text(&b));
        for (args, report) in reports_for(&b) {
            let w = write(&dir, "w.json", &report);
            let (code, _, err) = call(&["verify", "--witness", arg(&w), "--in", arg(&target)]);
            prop_assert_eq!(code, 0, "{:?} does not verify: {}", args, err);
        }
    }
}
