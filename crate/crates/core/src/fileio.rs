//! Self-describing JSON files for operators, plain matrices, and algebra
//! presentations, plus the canonical serialization used for byte-identical
//! output.
//!
//! Three kinds are understood, discriminated by a `"kind"` field:
//!
//! * `"operator2"` — an operator on `H⊗H`; `"dim"` is the dimension `d` of
//!   `H`, `"data"` holds `d⁴` row-major `[re, im]` pairs.
//! * `"matrix"` — a plain matrix; square with `"dim"`, or rectangular with
//!   `"rows"`/`"cols"`; `"data"` holds row-major `[re, im]` pairs.
//! * `"presentation"` — structure tensors of a finite-dimensional algebra:
//!   `"mult"` as `mult[k][i][j]` (coefficient of `b_k` in `b_i·b_j`),
//!   `"delta"` as `delta[i][j][k]` (coefficient of `b_i⊗b_j` in `Δ(b_k)`),
//!   `"counit"`, `"unit"`, `"haar"` as length-`n` vectors, `"antipode"` and
//!   `"star"` as `n×n` coefficient matrices, each complex entry an
//!   `[re, im]` pair, plus `"labels"`.
//!
//! Reading accepts any valid JSON layout; writing is canonical — keys
//! sorted, floats rendered with 17 significant digits, `-0` normalized —
//! so identical content yields identical bytes.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::builder::WhaPresentation;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Parsed content of an input file.
pub enum FileContent {
    /// An operator on `H⊗H` with `dim H = dim`.
    Operator2 { dim: usize, matrix: Matrix },
    /// A plain (possibly rectangular) matrix.
    PlainMatrix { matrix: Matrix },
    /// Structure tensors of an algebra with coalgebra structure.
    Presentation(Box<WhaPresentation>),
}

impl FileContent {
    pub fn kind(&self) -> &'static str {
        match self {
            FileContent::Operator2 { .. } => "operator2",
            FileContent::PlainMatrix { .. } => "matrix",
            FileContent::Presentation(_) => "presentation",
        }
    }
}

/// A parsed file together with the digest of its raw bytes.
pub struct LoadedFile {
    pub content: FileContent,
    /// Lowercase hex SHA-256 of the file bytes as read.
    pub digest: String,
}

/// Lowercase hex SHA-256 digest of a byte string.
pub fn digest_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads and parses one input file.
pub fn read_file(path: &Path) -> Result<LoadedFile> {
    let bytes = fs::read(path)?;
    let content = parse_bytes(&bytes)?;
    Ok(LoadedFile { content, digest: digest_hex(&bytes) })
}

/// Parses a document from raw bytes.
pub fn parse_bytes(bytes: &[u8]) -> Result<FileContent> {
    let v: Value = serde_json::from_slice(bytes)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Format("the document must be a JSON object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Format("missing string field \"kind\"".into()))?;
    match kind {
        "operator2" => parse_operator2(obj),
        "matrix" => parse_matrix(obj),
        "presentation" => parse_presentation(obj),
        other => Err(Error::Format(format!(
            "unknown kind \"{other}\" (expected \"operator2\", \"matrix\", or \"presentation\")"
        ))),
    }
}

fn get_dim(obj: &Map<String, Value>, field: &str) -> Result<usize> {
    let d = obj
        .get(field)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Format(format!("missing positive integer field \"{field}\"")))?;
    if d == 0 || d > 1 << 16 {
        return Err(Error::Format(format!("field \"{field}\" out of range: {d}")));
    }
    Ok(d as usize)
}

fn parse_pair(v: &Value) -> Result<Complex64> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Format("each entry must be an [re, im] pair".into()))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| Error::Format("entry parts must be numbers".into()))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| Error::Format("entry parts must be numbers".into()))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(Error::Format("entries must be finite".into()));
    }
    Ok(Complex64::new(re, im))
}

fn parse_pair_vec(v: &Value, len: usize, field: &str) -> Result<Vec<Complex64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Format(format!("field \"{field}\" must be an array")))?;
    if arr.len() != len {
        return Err(Error::Format(format!(
            "field \"{field}\" has {} entries, expected {len}",
            arr.len()
        )));
    }
    arr.iter().map(parse_pair).collect()
}

fn required<'a>(obj: &'a Map<String, Value>, field: &str) -> Result<&'a Value> {
    obj.get(field)
        .ok_or_else(|| Error::Format(format!("missing field \"{field}\"")))
}

fn parse_operator2(obj: &Map<String, Value>) -> Result<FileContent> {
    let dim = get_dim(obj, "dim")?;
    let side = dim * dim;
    let data = parse_pair_vec(required(obj, "data")?, side * side, "data")?;
    let matrix = Matrix::from_vec(side, side, data)?;
    Ok(FileContent::Operator2 { dim, matrix })
}

fn parse_matrix(obj: &Map<String, Value>) -> Result<FileContent> {
    let (rows, cols) = if obj.contains_key("rows") || obj.contains_key("cols") {
        (get_dim(obj, "rows")?, get_dim(obj, "cols")?)
    } else {
        let d = get_dim(obj, "dim")?;
        (d, d)
    };
    let data = parse_pair_vec(required(obj, "data")?, rows * cols, "data")?;
    let matrix = Matrix::from_vec(rows, cols, data)?;
    Ok(FileContent::PlainMatrix { matrix })
}

/// Parses a rank-3 tensor laid out as nested arrays `t[a][b][c]` into the
/// flat layout chosen by `index`.
fn parse_tensor3(
    v: &Value,
    n: usize,
    field: &str,
    index: impl Fn(usize, usize, usize) -> usize,
) -> Result<Vec<Complex64>> {
    let outer = v
        .as_array()
        .filter(|a| a.len() == n)
        .ok_or_else(|| Error::Format(format!("field \"{field}\" must be an {n}×{n}×{n} tensor")))?;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n * n];
    for (a, row) in outer.iter().enumerate() {
        let mid = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| Error::Format(format!("field \"{field}\" must be an {n}×{n}×{n} tensor")))?;
        for (b, inner) in mid.iter().enumerate() {
            let entries = parse_pair_vec(inner, n, field)?;
            for (c, z) in entries.into_iter().enumerate() {
                out[index(a, b, c)] = z;
            }
        }
    }
    Ok(out)
}

fn parse_coeff_matrix(v: &Value, n: usize, field: &str) -> Result<Matrix> {
    let outer = v
        .as_array()
        .filter(|a| a.len() == n)
        .ok_or_else(|| Error::Format(format!("field \"{field}\" must be an {n}×{n} matrix")))?;
    let mut m = Matrix::zeros(n, n);
    for (i, row) in outer.iter().enumerate() {
        let entries = parse_pair_vec(row, n, field)?;
        for (j, z) in entries.into_iter().enumerate() {
            m.set(i, j, z);
        }
    }
    Ok(m)
}

fn parse_presentation(obj: &Map<String, Value>) -> Result<FileContent> {
    let n = get_dim(obj, "dim")?;
    let labels_v = required(obj, "labels")?
        .as_array()
        .filter(|a| a.len() == n)
        .ok_or_else(|| Error::Format(format!("field \"labels\" must list {n} strings")))?;
    let mut labels = Vec::with_capacity(n);
    for l in labels_v {
        labels.push(
            l.as_str()
                .ok_or_else(|| Error::Format("labels must be strings".into()))?
                .to_string(),
        );
    }
    // mult[k][i][j] is the coefficient of b_k in b_i·b_j.
    let mult = parse_tensor3(required(obj, "mult")?, n, "mult", |k, i, j| k * n * n + i * n + j)?;
    // delta[i][j][k] is the coefficient of b_i⊗b_j in Δ(b_k).
    let delta = parse_tensor3(required(obj, "delta")?, n, "delta", |i, j, k| (i * n + j) * n + k)?;
    let counit = parse_pair_vec(required(obj, "counit")?, n, "counit")?;
    let antipode = parse_coeff_matrix(required(obj, "antipode")?, n, "antipode")?;
    let star = parse_coeff_matrix(required(obj, "star")?, n, "star")?;
    let unit = parse_pair_vec(required(obj, "unit")?, n, "unit")?;
    let haar = parse_pair_vec(required(obj, "haar")?, n, "haar")?;
    Ok(FileContent::Presentation(Box::new(WhaPresentation {
        n,
        labels,
        mult,
        delta,
        counit,
        antipode,
        star,
        unit,
        haar,
    })))
}

/// Formats a float with 17 significant digits, normalizing `-0`.
/// Non-finite values (which no valid report produces) render as `null`.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Renders a JSON value canonically: object keys sorted, floats through
/// [`fmt_f64`], no insignificant whitespace.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"))
        }
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("string serialization"));
                out.push(':');
                write_canonical(&map[key], out);
            }
            out.push('}');
        }
    }
}

fn pair_value(z: Complex64) -> Value {
    Value::Array(vec![float_value(z.re), float_value(z.im)])
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(if x == 0.0 { 0.0 } else { x })
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn data_value(m: &Matrix) -> Value {
    Value::Array(m.vectorize().into_iter().map(pair_value).collect())
}

/// JSON value for an operator on `H⊗H` (`dim H = dim`).
pub fn operator2_value(dim: usize, m: &Matrix) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::String("operator2".into()));
    obj.insert("dim".into(), Value::Number(serde_json::Number::from(dim as u64)));
    obj.insert("data".into(), data_value(m));
    Value::Object(obj)
}

/// JSON value for a plain matrix (square matrices use `dim`, rectangular
/// ones `rows`/`cols`).
pub fn matrix_value(m: &Matrix) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::String("matrix".into()));
    if m.is_square() {
        obj.insert("dim".into(), Value::Number(serde_json::Number::from(m.rows() as u64)));
    } else {
        obj.insert("rows".into(), Value::Number(serde_json::Number::from(m.rows() as u64)));
        obj.insert("cols".into(), Value::Number(serde_json::Number::from(m.cols() as u64)));
    }
    obj.insert("data".into(), data_value(m));
    Value::Object(obj)
}

/// JSON value for a presentation, nested-array layout as documented above.
pub fn presentation_value(p: &WhaPresentation) -> Value {
    let n = p.n;
    let tensor3 = |at: &dyn Fn(usize, usize, usize) -> Complex64| -> Value {
        Value::Array(
            (0..n)
                .map(|a| {
                    Value::Array(
                        (0..n)
                            .map(|b| {
                                Value::Array((0..n).map(|c| pair_value(at(a, b, c))).collect())
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let coeff_matrix = |m: &Matrix| -> Value {
        Value::Array(
            (0..n)
                .map(|i| Value::Array((0..n).map(|j| pair_value(m.get(i, j))).collect()))
                .collect(),
        )
    };
    let vector = |v: &[Complex64]| -> Value { Value::Array(v.iter().map(|&z| pair_value(z)).collect()) };

    let mut obj = Map::new();
    obj.insert("kind".into(), Value::String("presentation".into()));
    obj.insert("dim".into(), Value::Number(serde_json::Number::from(n as u64)));
    obj.insert(
        "labels".into(),
        Value::Array(p.labels.iter().map(|l| Value::String(l.clone())).collect()),
    );
    obj.insert("mult".into(), tensor3(&|k, i, j| p.m(k, i, j)));
    obj.insert("delta".into(), tensor3(&|i, j, k| p.d(i, j, k)));
    obj.insert("counit".into(), vector(&p.counit));
    obj.insert("antipode".into(), coeff_matrix(&p.antipode));
    obj.insert("star".into(), coeff_matrix(&p.star));
    obj.insert("unit".into(), vector(&p.unit));
    obj.insert("haar".into(), vector(&p.haar));
    Value::Object(obj)
}

/// Writes a JSON value canonically to a file (with a trailing newline).
pub fn write_canonical_file(path: &Path, v: &Value) -> Result<()> {
    let mut s = canonical_json(v);
    s.push('\n');
    fs::write(path, s.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::WhaPresentation;
    use crate::mpi;

    #[test]
    fn operator_roundtrips_through_bytes() {
        let v = mpi::nonunital_reference();
        let value = operator2_value(2, &v);
        let text = canonical_json(&value);
        match parse_bytes(text.as_bytes()).unwrap() {
            FileContent::Operator2 { dim, matrix } => {
                assert_eq!(dim, 2);
                assert!(matrix.close_to(&v, 0.0));
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn canonical_output_is_stable() {
        let v = mpi::nonunital_reference();
        let a = canonical_json(&operator2_value(2, &v));
        let b = canonical_json(&operator2_value(2, &v));
        assert_eq!(a, b);
        // keys sorted: data < dim < kind
        let di = a.find("\"data\"").unwrap();
        let dm = a.find("\"dim\"").unwrap();
        let ki = a.find("\"kind\"").unwrap();
        assert!(di < dm && dm < ki);
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(fmt_f64(-0.0), fmt_f64(0.0));
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn rectangular_matrices_carry_explicit_shape() {
        let m = Matrix::from_fn(2, 3, |i, j| Complex64::new((i * 3 + j) as f64, -1.0));
        let text = canonical_json(&matrix_value(&m));
        match parse_bytes(text.as_bytes()).unwrap() {
            FileContent::PlainMatrix { matrix } => {
                assert_eq!(matrix.rows(), 2);
                assert_eq!(matrix.cols(), 3);
                assert!(matrix.close_to(&m, 0.0));
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn presentation_roundtrips_exactly() {
        let p = WhaPresentation::matrix_algebra(2).unwrap();
        let text = canonical_json(&presentation_value(&p));
        match parse_bytes(text.as_bytes()).unwrap() {
            FileContent::Presentation(q) => {
                assert_eq!(q.n, p.n);
                assert_eq!(q.labels, p.labels);
                assert_eq!(q.mult, p.mult);
                assert_eq!(q.delta, p.delta);
                assert_eq!(q.counit, p.counit);
                assert!(q.antipode.close_to(&p.antipode, 0.0));
                assert!(q.star.close_to(&p.star, 0.0));
                assert_eq!(q.unit, p.unit);
                assert_eq!(q.haar, p.haar);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(matches!(parse_bytes(b"not json"), Err(Error::Json(_))));
        assert!(matches!(parse_bytes(b"[1,2]"), Err(Error::Format(_))));
        assert!(matches!(
            parse_bytes(br#"{"kind":"operator2","dim":2,"data":[[1.0,0.0]]}"#),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            parse_bytes(br#"{"kind":"mystery","dim":2,"data":[]}"#),
            Err(Error::Format(_))
        ));
        // non-finite entries
        assert!(matches!(
            parse_bytes(br#"{"kind":"matrix","dim":1,"data":[[1e999,0.0]]}"#),
            Err(Error::Format(_)) | Err(Error::Json(_))
        ));
    }

    #[test]
    fn digest_matches_known_vector() {
        // SHA-256 of the empty string.
        assert_eq!(
            digest_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
