//! JSON encodings of boxes, reports, witnesses, quantum states and settings.
//!
//! Exact scalars travel as strings (`"1/8+1/16*sqrt2"`) or as `{"a","b"}`
//! objects of rational strings; both are accepted on input. Objects are
//! backed by ordered maps, so output is byte-stable.

use nsbox_core::boxes::TRI_LEN;
use nsbox_core::inequalities::{InequalityFamily, InequalityValue};
use nsbox_core::membership::{MembershipReport, MembershipWitness, Polytope};
use nsbox_core::strengths::StrengthReport;
use nsbox_core::superlocality::{
    BipartiteDecomposition, GenuineReport, PairClass, RankCertificate, Status, SublocalDecomposition, Term, Verdict,
};
use nsbox_core::{AnyBox, BipartiteBox, Cut, Scalar, SingleBox, TripartiteBox, VertexLabel};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::quantum::{Amplitudes, Density, FloatBox, MeasurementSettings, QuantumError, ThreeQubitState, C64};

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{0}")]
pub struct JsonError(pub String);

impl From<QuantumError> for JsonError {
    fn from(e: QuantumError) -> Self {
        JsonError(e.to_string())
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError(msg.into()))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| JsonError(format!("missing field {key:?}")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str, JsonError> {
    field(v, key)?.as_str().ok_or_else(|| JsonError(format!("field {key:?} must be a string")))
}

fn bool_field(v: &Value, key: &str) -> Result<bool, JsonError> {
    field(v, key)?.as_bool().ok_or_else(|| JsonError(format!("field {key:?} must be a boolean")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize, JsonError> {
    field(v, key)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| JsonError(format!("field {key:?} must be a nonnegative integer")))
}

fn array_field<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, JsonError> {
    field(v, key)?.as_array().ok_or_else(|| JsonError(format!("field {key:?} must be an array")))
}

fn parse_with<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, JsonError> {
    s.parse().map_err(|_| JsonError(format!("malformed {what} {s:?}")))
}

pub fn scalar_to_string(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn scalar_to_object(s: &Scalar) -> Value {
    json!({ "a": s.rational_part().to_string(), "b": s.surd_part().to_string() })
}

fn rational_part(v: &Value) -> Result<Scalar, JsonError> {
    match v {
        Value::String(s) => parse_with(s, "rational"),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Scalar::int(i)),
            None => err(format!("non-integer number {n}; write fractions as strings")),
        },
        _ => err("rational must be a string or integer"),
    }
}

/// Accepts `"p/q+r/s*sqrt2"`, `{"a": "p/q", "b": "r/s"}` or an integer.
pub fn parse_scalar(v: &Value) -> Result<Scalar, JsonError> {
    match v {
        Value::Object(m) => {
            let part = |k| m.get(k).map_or(Ok(Scalar::zero()), rational_part);
            let (a, b) = (part("a")?, part("b")?);
            if !a.is_rational() || !b.is_rational() {
                return err("the parts of {\"a\",\"b\"} must be rational");
            }
            Ok(a + b * Scalar::sqrt2())
        }
        _ => rational_part(v),
    }
}

fn bits(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn parse_bits<const N: usize>(s: &str) -> Result<[u8; N], JsonError> {
    let v: Vec<u8> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => err(format!("malformed bit string {s:?}")),
        })
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| JsonError(format!("expected {N} bits, got {s:?}")))
}

/// Key `"outputs|inputs"` for an entry of an `n`-party box.
fn entry_key(n: usize, index: usize) -> String {
    let (o, x) = (index % (1 << n), index >> n);
    let digits = |v: usize| (0..n).rev().map(|k| char::from(b'0' + ((v >> k) & 1) as u8)).collect::<String>();
    format!("{}|{}", digits(o), digits(x))
}

fn key_index(n: usize, key: &str) -> Result<usize, JsonError> {
    let bad = || JsonError(format!("malformed entry key {key:?}"));
    let (o, x) = key.split_once('|').ok_or_else(bad)?;
    if o.len() != n || x.len() != n {
        return Err(bad());
    }
    let value = |s: &str| usize::from_str_radix(s, 2).map_err(|_| bad());
    Ok((value(x)? << n) + value(o)?)
}

fn entries_to_json(n: usize, entries: &[Scalar]) -> Value {
    let map: Map<String, Value> =
        entries.iter().enumerate().map(|(i, e)| (entry_key(n, i), scalar_to_object(e))).collect();
    json!({ "parties": n, "entries": map })
}

fn entries_from_json(v: &Value) -> Result<(usize, Vec<Scalar>), JsonError> {
    let n = usize_field(v, "parties")?;
    if !(1..=3).contains(&n) {
        return err(format!("unsupported number of parties {n}"));
    }
    let map = field(v, "entries")?.as_object().ok_or_else(|| JsonError("\"entries\" must be an object".into()))?;
    let mut entries = vec![Scalar::zero(); 1 << (2 * n)];
    for (k, e) in map {
        entries[key_index(n, k)?] = parse_scalar(e)?;
    }
    Ok((n, entries))
}

pub fn tripartite_to_json(b: &TripartiteBox) -> Value {
    entries_to_json(3, b.entries())
}

pub fn bipartite_to_json(b: &BipartiteBox) -> Value {
    entries_to_json(2, b.entries())
}

pub fn single_to_json(b: &SingleBox) -> Value {
    entries_to_json(1, b.entries())
}

pub fn box_to_json(b: &AnyBox) -> Value {
    match b {
        AnyBox::Tripartite(t) => tripartite_to_json(t),
        AnyBox::Bipartite(p) => bipartite_to_json(p),
    }
}

/// Reads a two- or three-party box. Omitted entries are zero; validity is
/// left to the caller.
pub fn box_from_json(v: &Value) -> Result<AnyBox, JsonError> {
    let (n, entries) = entries_from_json(v)?;
    let bad = |e: nsbox_core::BoxError| JsonError(e.to_string());
    match n {
        3 => Ok(AnyBox::Tripartite(TripartiteBox::from_raw(entries).map_err(bad)?)),
        2 => Ok(AnyBox::Bipartite(BipartiteBox::from_raw(entries).map_err(bad)?)),
        _ => err("expected a two- or three-party box"),
    }
}

pub fn tripartite_from_json(v: &Value) -> Result<TripartiteBox, JsonError> {
    match box_from_json(v)? {
        AnyBox::Tripartite(b) => Ok(b),
        AnyBox::Bipartite(_) => err("expected a three-party box"),
    }
}

pub fn bipartite_from_json(v: &Value) -> Result<BipartiteBox, JsonError> {
    match box_from_json(v)? {
        AnyBox::Bipartite(b) => Ok(b),
        AnyBox::Tripartite(_) => err("expected a two-party box"),
    }
}

pub fn single_from_json(v: &Value) -> Result<SingleBox, JsonError> {
    let (n, e) = entries_from_json(v)?;
    if n != 1 {
        return err("expected a one-party box");
    }
    SingleBox::new(std::array::from_fn(|i| e[i].clone())).map_err(|e| JsonError(e.to_string()))
}

pub fn float_box_to_json(b: &FloatBox) -> Value {
    let map: Map<String, Value> = b.entries.iter().enumerate().map(|(i, e)| (entry_key(3, i), json!(e))).collect();
    json!({ "parties": 3, "entries": map })
}

pub fn float_box_from_json(v: &Value) -> Result<FloatBox, JsonError> {
    if usize_field(v, "parties")? != 3 {
        return err("expected a three-party box");
    }
    let map = field(v, "entries")?.as_object().ok_or_else(|| JsonError("\"entries\" must be an object".into()))?;
    let mut entries = [0.0; TRI_LEN];
    for (k, e) in map {
        entries[key_index(3, k)?] = e.as_f64().ok_or_else(|| JsonError(format!("entry {k} must be a number")))?;
    }
    Ok(FloatBox { entries })
}

fn family_tag(f: InequalityFamily) -> &'static str {
    match f {
        InequalityFamily::Svetlichny => "svetlichny",
        InequalityFamily::Mermin => "mermin",
        InequalityFamily::Chsh => "chsh",
    }
}

pub fn inequalities_to_json(values: &[InequalityValue]) -> Value {
    let list: Vec<Value> = values
        .iter()
        .map(|v| {
            json!({
                "family": family_tag(v.family),
                "label": bits(&v.label),
                "value": scalar_to_object(&v.value),
                "bound": v.bound,
                "violated": v.violated,
                "at_max": v.at_max,
            })
        })
        .collect();
    json!({ "inequalities": list })
}

/// Reads back `(family, label, value)` triples.
pub fn inequalities_from_json(v: &Value) -> Result<Vec<(String, String, Scalar)>, JsonError> {
    array_field(v, "inequalities")?
        .iter()
        .map(|e| Ok((str_field(e, "family")?.to_string(), str_field(e, "label")?.to_string(), parse_scalar(field(e, "value")?)?)))
        .collect()
}

pub fn inequality_key(v: &InequalityValue) -> (String, String, Scalar) {
    (family_tag(v.family).to_string(), bits(&v.label), v.value.clone())
}

pub fn witness_to_json(w: &MembershipWitness) -> Value {
    let mut m = Map::new();
    m.insert("polytope".into(), json!(w.polytope.name()));
    m.insert("feasible".into(), json!(w.feasible));
    if w.feasible {
        let weights: Map<String, Value> = w.weights.iter().map(|(l, c)| (l.to_string(), scalar_to_string(c))).collect();
        m.insert("weights".into(), Value::Object(weights));
    }
    if let Some(y) = &w.farkas {
        m.insert("farkas".into(), Value::Array(y.iter().map(scalar_to_string).collect()));
    }
    Value::Object(m)
}

pub fn witness_from_json(v: &Value) -> Result<MembershipWitness, JsonError> {
    let polytope: Polytope = parse_with(str_field(v, "polytope")?, "polytope")?;
    let feasible = bool_field(v, "feasible")?;
    let weights = match v.get("weights") {
        Some(Value::Object(m)) => m
            .iter()
            .map(|(k, c)| Ok((parse_with::<VertexLabel>(k, "vertex label")?, parse_scalar(c)?)))
            .collect::<Result<Vec<_>, JsonError>>()?,
        Some(_) => return err("\"weights\" must be an object"),
        None => Vec::new(),
    };
    let farkas = match v.get("farkas") {
        Some(Value::Array(a)) => Some(a.iter().map(parse_scalar).collect::<Result<Vec<_>, _>>()?),
        Some(_) => return err("\"farkas\" must be an array"),
        None => None,
    };
    Ok(MembershipWitness { polytope, feasible, weights, farkas })
}

pub fn membership_report_to_json(r: &MembershipReport) -> Value {
    json!({
        "nonsignaling": r.nonsignaling,
        "in_r": r.in_r,
        "in_l2": r.in_l2,
        "in_l": r.in_l,
        "witnesses": r.witnesses.iter().map(witness_to_json).collect::<Vec<_>>(),
    })
}

pub fn membership_report_from_json(v: &Value) -> Result<MembershipReport, JsonError> {
    Ok(MembershipReport {
        nonsignaling: bool_field(v, "nonsignaling")?,
        in_r: bool_field(v, "in_r")?,
        in_l2: bool_field(v, "in_l2")?,
        in_l: bool_field(v, "in_l")?,
        witnesses: array_field(v, "witnesses")?.iter().map(witness_from_json).collect::<Result<_, _>>()?,
    })
}

fn label_or_null(l: &Option<[u8; 4]>) -> Value {
    l.as_ref().map_or(Value::Null, |b| json!(bits(b)))
}

fn label_from(v: &Value, key: &str) -> Result<Option<[u8; 4]>, JsonError> {
    match field(v, key)? {
        Value::Null => Ok(None),
        Value::String(s) => parse_bits(s).map(Some),
        _ => err(format!("field {key:?} must be a bit string or null")),
    }
}

pub fn strength_to_json(r: &StrengthReport) -> Value {
    json!({
        "svetlichny_strength": scalar_to_string(&r.svetlichny_strength),
        "svetlichny_label": label_or_null(&r.svetlichny_label),
        "mermin_strength": scalar_to_string(&r.mermin_strength),
        "mermin_label": label_or_null(&r.mermin_label),
        "balanced": r.balanced,
        "residual": tripartite_to_json(&r.residual),
        "residual_witness": witness_to_json(&r.residual_witness),
    })
}

pub fn strength_from_json(v: &Value) -> Result<StrengthReport, JsonError> {
    Ok(StrengthReport {
        svetlichny_strength: parse_scalar(field(v, "svetlichny_strength")?)?,
        svetlichny_label: label_from(v, "svetlichny_label")?,
        mermin_strength: parse_scalar(field(v, "mermin_strength")?)?,
        mermin_label: label_from(v, "mermin_label")?,
        balanced: bool_field(v, "balanced")?,
        residual: tripartite_from_json(field(v, "residual")?)?,
        residual_witness: witness_from_json(field(v, "residual_witness")?)?,
    })
}

fn class_tag(c: PairClass) -> &'static str {
    match c {
        PairClass::Local => "local",
        PairClass::NonSignaling => "ns",
        PairClass::Unconstrained => "unconstrained",
    }
}

fn parse_class(s: &str) -> Result<PairClass, JsonError> {
    match s {
        "local" => Ok(PairClass::Local),
        "ns" => Ok(PairClass::NonSignaling),
        "unconstrained" => Ok(PairClass::Unconstrained),
        _ => err(format!("unknown pair class {s:?}")),
    }
}

pub fn decomposition_to_json(w: &SublocalDecomposition) -> Value {
    let terms: Vec<Value> = w
        .terms
        .iter()
        .map(|t| {
            json!({
                "weight": scalar_to_string(&t.weight),
                "single": single_to_json(&t.single),
                "pair": bipartite_to_json(&t.pair),
            })
        })
        .collect();
    json!({ "cut": w.cut.to_string(), "class": class_tag(w.class), "terms": terms })
}

pub fn decomposition_from_json(v: &Value) -> Result<SublocalDecomposition, JsonError> {
    let cut: Cut = parse_with(str_field(v, "cut")?, "cut")?;
    let class = parse_class(str_field(v, "class")?)?;
    let terms = array_field(v, "terms")?
        .iter()
        .map(|t| {
            Ok(Term {
                weight: parse_scalar(field(t, "weight")?)?,
                single: single_from_json(field(t, "single")?)?,
                pair: bipartite_from_json(field(t, "pair")?)?,
            })
        })
        .collect::<Result<_, JsonError>>()?;
    Ok(SublocalDecomposition { cut, class, terms })
}

pub fn bipartite_decomposition_to_json(w: &BipartiteDecomposition) -> Value {
    let terms: Vec<Value> = w
        .terms
        .iter()
        .map(|(weight, bob, charlie)| {
            json!({ "weight": scalar_to_string(weight), "bob": single_to_json(bob), "charlie": single_to_json(charlie) })
        })
        .collect();
    json!({ "terms": terms })
}

pub fn bipartite_decomposition_from_json(v: &Value) -> Result<BipartiteDecomposition, JsonError> {
    let terms = array_field(v, "terms")?
        .iter()
        .map(|t| {
            Ok((
                parse_scalar(field(t, "weight")?)?,
                single_from_json(field(t, "bob")?)?,
                single_from_json(field(t, "charlie")?)?,
            ))
        })
        .collect::<Result<_, JsonError>>()?;
    Ok(BipartiteDecomposition { terms })
}

fn status_tag(s: Status) -> &'static str {
    match s {
        Status::Sublocal => "sublocal",
        Status::Superlocal => "superlocal",
        Status::Unknown => "unknown",
    }
}

fn parse_status(s: &str) -> Result<Status, JsonError> {
    match s {
        "sublocal" => Ok(Status::Sublocal),
        "superlocal" => Ok(Status::Superlocal),
        "unknown" => Ok(Status::Unknown),
        _ => err(format!("unknown status {s:?}")),
    }
}

fn verdict_fields<W>(v: &Verdict<W>, witness: impl Fn(&W) -> Value) -> Value {
    let mut m = Map::new();
    m.insert("cut".into(), v.cut.map_or(Value::Null, |c| json!(c.to_string())));
    m.insert("d".into(), json!(v.d));
    m.insert("status".into(), json!(status_tag(v.status)));
    if let Some(c) = &v.certificate {
        m.insert("certificate".into(), json!({ "rank": c.rank, "d": c.d }));
    }
    if let Some(w) = &v.witness {
        m.insert("witness".into(), witness(w));
    }
    Value::Object(m)
}

fn verdict_from<W>(v: &Value, witness: impl Fn(&Value) -> Result<W, JsonError>) -> Result<Verdict<W>, JsonError> {
    let cut = match v.get("cut") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(parse_with::<Cut>(s, "cut")?),
        Some(_) => return err("\"cut\" must be a string or null"),
    };
    let certificate = match v.get("certificate") {
        Some(c) => Some(RankCertificate { rank: usize_field(c, "rank")?, d: usize_field(c, "d")? }),
        None => None,
    };
    let status = parse_status(str_field(v, "status")?)?;
    // a bare certificate carries its own d
    let d = match (v.get("d"), &certificate) {
        (Some(_), _) => usize_field(v, "d")?,
        (None, Some(c)) => c.d,
        (None, None) => return err("missing field \"d\""),
    };
    let witness = v.get("witness").map(witness).transpose()?;
    Ok(Verdict { cut, d, status, witness, certificate })
}

pub fn verdict_to_json(v: &Verdict<SublocalDecomposition>) -> Value {
    verdict_fields(v, decomposition_to_json)
}

pub fn verdict_from_json(v: &Value) -> Result<Verdict<SublocalDecomposition>, JsonError> {
    verdict_from(v, decomposition_from_json)
}

pub fn bipartite_verdict_to_json(v: &Verdict<BipartiteDecomposition>) -> Value {
    verdict_fields(v, bipartite_decomposition_to_json)
}

pub fn bipartite_verdict_from_json(v: &Value) -> Result<Verdict<BipartiteDecomposition>, JsonError> {
    verdict_from(v, bipartite_decomposition_from_json)
}

pub fn genuine_to_json(r: &GenuineReport) -> Value {
    json!({
        "d": r.d,
        "genuine": r.genuine,
        "absolute": r.absolute,
        "verdicts": r.verdicts.iter().map(verdict_to_json).collect::<Vec<_>>(),
    })
}

pub fn genuine_from_json(v: &Value) -> Result<GenuineReport, JsonError> {
    Ok(GenuineReport {
        d: usize_field(v, "d")?,
        genuine: bool_field(v, "genuine")?,
        absolute: bool_field(v, "absolute")?,
        verdicts: array_field(v, "verdicts")?.iter().map(verdict_from_json).collect::<Result<_, _>>()?,
    })
}

fn complex_from(v: &Value) -> Result<C64, JsonError> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => err("complex numbers are [re, im] pairs of numbers"),
        },
        _ => err("complex numbers are [re, im] pairs of numbers"),
    }
}

/// `{"amplitudes": [[re, im] × 8]}` or `{"density": [[[re, im] × 8] × 8]}`.
pub fn state_from_json(v: &Value) -> Result<ThreeQubitState, JsonError> {
    if let Some(a) = v.get("amplitudes") {
        let a = a.as_array().filter(|a| a.len() == 8).ok_or_else(|| JsonError("need 8 amplitudes".into()))?;
        let amps = a.iter().map(complex_from).collect::<Result<Vec<_>, _>>()?;
        return Ok(ThreeQubitState::pure(Amplitudes::from_vec(amps))?);
    }
    let rows = array_field(v, "density")?;
    if rows.len() != 8 {
        return err("density matrix must be 8×8");
    }
    let mut rho = Density::zeros();
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|a| a.len() == 8).ok_or_else(|| JsonError("density matrix must be 8×8".into()))?;
        for (c, e) in row.iter().enumerate() {
            rho[(r, c)] = complex_from(e)?;
        }
    }
    Ok(ThreeQubitState::mixed(rho)?)
}

pub fn state_to_json(s: &ThreeQubitState) -> Value {
    let pair = |z: &C64| json!([z.re, z.im]);
    match s {
        ThreeQubitState::Pure(psi) => json!({ "amplitudes": psi.iter().map(pair).collect::<Vec<_>>() }),
        ThreeQubitState::Mixed(rho) => json!({
            "density": (0..8).map(|r| (0..8).map(|c| pair(&rho[(r, c)])).collect::<Vec<_>>()).collect::<Vec<_>>()
        }),
    }
}

const PARTY_KEYS: [&str; 3] = ["alice", "bob", "charlie"];

/// `{"alice": [[x,y,z], [x,y,z]], "bob": …, "charlie": …}`, one Bloch
/// vector per input.
pub fn settings_from_json(v: &Value) -> Result<MeasurementSettings, JsonError> {
    let mut dirs = [[[0.0; 3]; 2]; 3];
    for (p, key) in PARTY_KEYS.iter().enumerate() {
        let inputs = array_field(v, key)?;
        if inputs.len() != 2 {
            return err(format!("{key} needs two Bloch vectors"));
        }
        for (x, n) in inputs.iter().enumerate() {
            let n = n.as_array().filter(|n| n.len() == 3).ok_or_else(|| JsonError("Bloch vectors have 3 components".into()))?;
            for (k, c) in n.iter().enumerate() {
                dirs[p][x][k] = c.as_f64().ok_or_else(|| JsonError("Bloch components must be numbers".into()))?;
            }
        }
    }
    Ok(MeasurementSettings::new(dirs)?)
}

pub fn settings_to_json(s: &MeasurementSettings) -> Value {
    let m: Map<String, Value> = PARTY_KEYS.iter().enumerate().map(|(p, k)| (k.to_string(), json!(s.directions()[p]))).collect();
    Value::Object(m)
}

/// Pretty-printed with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsbox_core::boxes::{bb84_family, svetlichny_family};
    use proptest::prelude::*;

    #[test]
    fn entry_keys_follow_the_index_order() {
        assert_eq!(entry_key(3, 0), "000|000");
        assert_eq!(entry_key(3, nsbox_core::boxes::tri_index([1, 0, 1], [1, 1, 0])), "101|110");
        assert_eq!(entry_key(2, nsbox_core::boxes::bi_index([0, 1], [1, 0])), "01|10");
        assert_eq!(entry_key(1, 3), "1|1");
        for i in 0..64 {
            assert_eq!(key_index(3, &entry_key(3, i)).unwrap(), i);
        }
    }

    #[test]
    fn scalar_encodings_agree() {
        let s: Scalar = "3/4-1/2*sqrt2".parse().unwrap();
        assert_eq!(parse_scalar(&scalar_to_object(&s)).unwrap(), s);
        assert_eq!(parse_scalar(&scalar_to_string(&s)).unwrap(), s);
        assert_eq!(parse_scalar(&json!(1)).unwrap(), Scalar::one());
        assert!(parse_scalar(&json!(0.5)).is_err());
        assert!(parse_scalar(&json!({"a": "1/2+1/2*sqrt2"})).is_err());
    }

    #[test]
    fn omitted_entries_are_zero() {
        let v = json!({"parties": 2, "entries": {"00|00": "1"}});
        let AnyBox::Bipartite(b) = box_from_json(&v).unwrap() else { panic!("bipartite") };
        assert_eq!(b.entries().iter().filter(|e| e.is_zero()).count(), 15);
        assert!(box_from_json(&json!({"parties": 3, "entries": {"00|000": "1"}})).is_err());
    }

    #[test]
    fn bipartite_family_round_trips() {
        let b = AnyBox::Bipartite(bb84_family(&Scalar::ratio(1, 2)).unwrap());
        assert_eq!(box_from_json(&box_to_json(&b)).unwrap(), b);
    }

    proptest! {
        #[test]
        fn svetlichny_boxes_round_trip(k in 1i64..=16) {
            let mu = Scalar::ratio(k, 16);
            let b = svetlichny_family(&mu).unwrap();
            let text = to_text(&tripartite_to_json(&b));
            let back: Value = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(tripartite_from_json(&back).unwrap(), b);
        }
    }
}
