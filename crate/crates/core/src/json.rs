//! JSON encodings shared by the CLI and the C bindings.
//!
//! Exact integers are written as decimal strings, rationals as `"p/q"`,
//! floats as JSON numbers. Readers accept a bare payload or a CLI envelope
//! whose `"result"` field holds it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::determinant::DetReport;
use crate::error::{usage, Result};
use crate::gcdtensor::{CpDecomposition, IncidenceMatrix, Weights};
use crate::poset::{MeetSemilattice, Valuation};
use crate::scalar::{format_rational, format_rational_pq, parse_bigint, parse_rational, ScalarKind};
use crate::tensor::Tensor;
use crate::AnyTensor;

/// The payload inside a CLI envelope, or the value itself.
pub fn payload<'a>(v: &'a Value, key: &str) -> &'a Value {
    match v.get("result") {
        Some(inner) if v.get(key).is_none() => inner,
        _ => v,
    }
}

pub fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn tensor_to_json(t: &AnyTensor) -> Value {
    let shape = t.shape();
    let order = shape.len();
    let dim = shape.first().copied().unwrap_or(0);
    let entries: Vec<Value> = match t {
        AnyTensor::Int(t) => t.entries().iter().map(|x| Value::String(x.to_string())).collect(),
        AnyTensor::Rational(t) => t
            .entries()
            .iter()
            .map(|x| Value::String(format_rational_pq(x)))
            .collect(),
        AnyTensor::Float(t) => t.entries().iter().map(|&x| float_value(x)).collect(),
    };
    let mut out = json!({
        "order": order,
        "dim": dim,
        "scalar": t.kind().as_str(),
        "entries": entries,
    });
    if shape.iter().any(|&e| e != dim) {
        out["shape"] = json!(shape);
    }
    out
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| usage(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| usage(format!("field {key:?} must be a nonnegative integer")))
}

fn exact_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(usage(format!("expected a number or numeric string, got {other}"))),
    }
}

pub fn parse_rational_value(v: &Value) -> Result<BigRational> {
    parse_rational(&exact_text(v)?)
}

pub fn tensor_from_json(v: &Value) -> Result<AnyTensor> {
    let v = payload(v, "entries");
    let order = as_usize(v, "order")?;
    let dim = as_usize(v, "dim")?;
    let shape = match v.get("shape") {
        Some(s) => serde_json::from_value::<Vec<usize>>(s.clone())
            .map_err(|_| usage("field \"shape\" must be a list of extents"))?,
        None => vec![dim; order],
    };
    if shape.len() != order {
        return Err(usage(format!("shape has {} extents for order {order}", shape.len())));
    }
    let kind: ScalarKind = serde_json::from_value(field(v, "scalar")?.clone())
        .map_err(|_| usage("field \"scalar\" must be int, rational or float64"))?;
    let entries = field(v, "entries")?
        .as_array()
        .ok_or_else(|| usage("field \"entries\" must be a list"))?;
    Ok(match kind {
        ScalarKind::Int => AnyTensor::Int(Tensor::from_vec(
            shape,
            entries
                .iter()
                .map(|e| exact_text(e).and_then(|s| parse_bigint(&s)))
                .collect::<Result<Vec<BigInt>>>()?,
        )?),
        ScalarKind::Rational => AnyTensor::Rational(Tensor::from_vec(
            shape,
            entries.iter().map(parse_rational_value).collect::<Result<_>>()?,
        )?),
        ScalarKind::Float64 => AnyTensor::Float(Tensor::from_vec(
            shape,
            entries
                .iter()
                .map(|e| match e {
                    Value::Number(n) => n.as_f64().ok_or_else(|| usage("float entry out of range")),
                    Value::String(s) => s.trim().parse::<f64>().map_err(|_| usage(format!("bad float {s:?}"))),
                    other => Err(usage(format!("bad float entry {other}"))),
                })
                .collect::<Result<_>>()?,
        )?),
    })
}

pub fn weights_to_json(w: &Weights) -> Value {
    match w {
        Weights::Int(w) => json!(w.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        Weights::Rational(w) => json!(w.iter().map(format_rational).collect::<Vec<_>>()),
        Weights::Float(w) => Value::Array(w.iter().map(|&x| float_value(x)).collect()),
    }
}

pub fn decomposition_to_json(d: &CpDecomposition) -> Value {
    let witness = d.rank_witness();
    json!({
        "order": d.order,
        "dim": d.dim,
        "scheme": d.scheme,
        "columns": d.columns,
        "weights": weights_to_json(&d.weights),
        "vectors": d.vectors,
        "rank": witness.rank,
        "spanning": witness.spanning,
        "certificate_withheld": d.certificate_withheld,
    })
}

pub fn incidence_to_json<L: serde::Serialize + Clone>(e: &IncidenceMatrix<L>) -> Value {
    let rows: Vec<Vec<u8>> = (0..e.rows())
        .map(|i| (0..e.cols()).map(|j| u8::from(e.get(i, j))).collect())
        .collect();
    json!({
        "row_labels": e.row_labels(),
        "col_labels": e.col_labels(),
        "matrix": rows,
    })
}

pub fn det_report_to_json(r: &DetReport) -> Value {
    json!({
        "method": r.method.as_str(),
        "bases": r.bases.iter().map(format_rational).collect::<Vec<_>>(),
        "exponent": r.exponent.to_string(),
        "value": r.value.as_ref().map(format_rational),
        "expanded": r.expanded(),
    })
}

/// A lattice file: the order, and optionally a valuation.
pub struct LatticeSpec {
    pub lattice: MeetSemilattice,
    pub valuation: Option<Valuation<BigRational>>,
}

pub fn lattice_from_json(v: &Value) -> Result<LatticeSpec> {
    let v = payload(v, "elements");
    let elements: Vec<String> = serde_json::from_value(field(v, "elements")?.clone())
        .map_err(|_| usage("field \"elements\" must be a list of labels"))?;
    let pairs: Vec<(String, String)> = match v.get("pairs") {
        Some(p) => serde_json::from_value(p.clone())
            .map_err(|_| usage("field \"pairs\" must be a list of [below, above] label pairs"))?,
        None => Vec::new(),
    };
    let lattice = MeetSemilattice::new(&elements, &pairs)?;
    let valuation = match v.get("g") {
        None | Some(Value::Null) => None,
        Some(Value::Object(map)) => {
            let values = map
                .iter()
                .map(|(k, x)| Ok((k.clone(), parse_rational_value(x)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            Some(Valuation::from_map(&lattice, &values)?)
        }
        Some(_) => return Err(usage("field \"g\" must map labels to values")),
    };
    Ok(LatticeSpec { lattice, valuation })
}

pub fn lattice_to_json(l: &MeetSemilattice, g: Option<&Valuation<BigRational>>) -> Value {
    let pairs: Vec<[String; 2]> = l.order_pairs().into_iter().map(|(a, b)| [a, b]).collect();
    let mut out = json!({
        "elements": l.labels(),
        "pairs": pairs,
    });
    if let Some(g) = g {
        let map: Map<String, Value> = g
            .to_map(l)
            .into_iter()
            .map(|(k, v)| (k, Value::String(format_rational(&v))))
            .collect();
        out["g"] = Value::Object(map);
    }
    out
}
