//! Deterministic report assembly: every command emits one JSON object
//! (canonically serialized, so identical inputs give identical bytes) or a
//! flattened plain-text rendering of the same object.

use serde_json::{Map, Number, Value};

use crate::classify::ClassificationReport;
use crate::fileio::{canonical_json, fmt_f64};
use crate::tol::Tolerance;

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format \"{other}\" (expected \"json\" or \"text\")")),
        }
    }
}

pub fn float(x: f64) -> Value {
    Number::from_f64(if x == 0.0 { 0.0 } else { x })
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn integer(x: usize) -> Value {
    Value::Number(Number::from(x as u64))
}

/// Common header fields shared by every command report.
pub fn base_report(command: &str, input_digest: Option<&str>, tol: &Tolerance) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    map.insert(
        "tool_version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    map.insert(
        "input_digest".into(),
        match input_digest {
            Some(d) => Value::String(d.into()),
            None => Value::Null,
        },
    );
    map.insert("tolerance".into(), float(tol.eq_tol));
    map.insert("rank_tolerance".into(), float(tol.rank_tol));
    map
}

/// Named residual list as a JSON object.
pub fn named_residuals(items: &[(String, f64)]) -> Value {
    let mut map = Map::new();
    for (name, r) in items {
        map.insert(name.clone(), float(*r));
    }
    Value::Object(map)
}

/// The full classification outcome as a JSON object.
pub fn classification_value(r: &ClassificationReport) -> Value {
    let mut map = Map::new();
    map.insert("dim_h".into(), integer(r.dim_h));
    map.insert("is_partial_isometry".into(), Value::Bool(r.is_partial_isometry));
    map.insert(
        "partial_isometry_residual".into(),
        float(r.partial_isometry_residual),
    );
    map.insert(
        "range_projection_residual".into(),
        float(r.range_projection_residual),
    );
    map.insert(
        "source_projection_residual".into(),
        float(r.source_projection_residual),
    );
    map.insert("is_mpi".into(), Value::Bool(r.is_mpi));
    let mut axioms = Map::new();
    for (name, value) in [
        ("pentagon", r.mpi_axioms[0]),
        ("projection_exchange", r.mpi_axioms[1]),
        ("range_commutation", r.mpi_axioms[2]),
        ("source_commutation", r.mpi_axioms[3]),
    ] {
        axioms.insert(name.into(), float(value));
    }
    map.insert("axiom_residuals".into(), Value::Object(axioms));
    map.insert(
        "derived_identity_residuals".into(),
        Value::Array(r.derived_identities.iter().map(|&x| float(x)).collect()),
    );
    map.insert("is_unital".into(), Value::Bool(r.is_unital));
    map.insert(
        "unit_difference".into(),
        r.unit_difference.map(float).unwrap_or(Value::Null),
    );
    map.insert("star_closed_a".into(), Value::Bool(r.star_closed_a));
    map.insert("star_closed_ahat".into(), Value::Bool(r.star_closed_ahat));
    map.insert("is_regular".into(), Value::Bool(r.is_regular));
    map.insert("theorem_consistent".into(), Value::Bool(r.theorem_consistent));
    map.insert("is_unitary".into(), Value::Bool(r.is_unitary));
    map.insert("verdict".into(), Value::String(r.verdict.to_string()));
    let mut dims = Map::new();
    dims.insert("dim_a".into(), integer(r.dimensions.dim_a));
    dims.insert("dim_ahat".into(), integer(r.dimensions.dim_ahat));
    dims.insert("dim_a_left".into(), integer(r.dimensions.dim_a_left));
    dims.insert("dim_a_right".into(), integer(r.dimensions.dim_a_right));
    dims.insert("dim_c_of_v".into(), integer(r.dimensions.dim_c_of_v));
    dims.insert("rank_v".into(), integer(r.dimensions.rank_v));
    map.insert("dimensions".into(), Value::Object(dims));
    map.insert("pairing_rank".into(), integer(r.pairing_rank));
    map.insert("details".into(), named_residuals(&r.details));
    Value::Object(map)
}

/// Strips measurement fields from a report value, keeping only decisions:
/// booleans, integers (dimensions, ranks), and strings (verdicts).  Float
/// leaves are residuals — measurements that legitimately differ in the last
/// bits between two operators that are equal up to machine precision — so
/// "field-for-field identical" comparisons are made over the structural
/// remainder.
pub fn structural_only(v: &Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.iter()
                .filter_map(|(k, val)| {
                    let filtered = structural_only(val);
                    if filtered.is_null() {
                        None
                    } else {
                        Some((k.clone(), filtered))
                    }
                })
                .collect(),
        ),
        Value::Array(items) => Value::Array(
            items
                .iter()
                .map(structural_only)
                .filter(|x| !x.is_null())
                .collect(),
        ),
        Value::Number(n) => {
            if n.as_i64().is_some() || n.as_u64().is_some() {
                v.clone()
            } else {
                Value::Null
            }
        }
        Value::Null => Value::Null,
        other => other.clone(),
    }
}

/// Renders a report in the requested format, ending with a newline.
pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = canonical_json(v);
            s.push('\n');
            s
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", v, &mut lines);
            let mut s = lines.join("\n");
            s.push('\n');
            s
        }
    }
}

fn flatten(prefix: &str, v: &Value, lines: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for key in keys {
                let path = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten(&path, &map[key], lines);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, lines);
            }
        }
        Value::Null => lines.push(format!("{prefix}: none")),
        Value::Bool(b) => lines.push(format!("{prefix}: {b}")),
        Value::Number(n) => {
            let rendered = if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                fmt_f64(n.as_f64().unwrap_or(f64::NAN))
            };
            lines.push(format!("{prefix}: {rendered}"));
        }
        Value::String(s) => lines.push(format!("{prefix}: {s}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::mpi::{nonunital_reference, MpiCandidate};

    #[test]
    fn text_rendering_is_flat_and_sorted() {
        let v: Value = serde_json::json!({
            "zeta": 1,
            "alpha": {"b": true, "a": [1.0, 2.0]},
        });
        let text = render(&v, Format::Text);
        let expected = "alpha.a[0]: 1.0000000000000000e0\nalpha.a[1]: 2.0000000000000000e0\nalpha.b: true\nzeta: 1\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn classification_report_serializes_deterministically() {
        let c = MpiCandidate::new(nonunital_reference(), Tolerance::default()).unwrap();
        let r = classify(&c).unwrap();
        let a = render(&classification_value(&r), Format::Json);
        let r2 = classify(&c).unwrap();
        let b = render(&classification_value(&r2), Format::Json);
        assert_eq!(a, b);
        assert!(a.contains("\"verdict\":\"MPI, non-unital\""));
    }

    #[test]
    fn base_report_echoes_the_tolerance() {
        let tol = Tolerance::uniform(0.25).unwrap();
        let map = base_report("classify", Some("ab"), &tol);
        let s = render(&Value::Object(map), Format::Json);
        assert!(s.contains("\"tolerance\":2.5000000000000000e-1"));
        assert!(s.contains("\"command\":\"classify\""));
    }
}
