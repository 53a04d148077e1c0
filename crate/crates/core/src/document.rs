//! Self-describing operator and family documents.
//!
//! Documents are UTF-8 JSON with a top-level object. Operators carry
//! `"type"` (`linear`, `multilinear`, or `polynomial`), `"domains"` as a
//! list of `{"dim", "q"}` descriptors, `"codomain"`, and `"coefficients"`
//! as nested arrays with the codomain index outermost followed by the slot
//! indices in order. Polynomials may carry an explicit `"degree"`; when
//! absent it is inferred from the nesting depth. Families carry `"type"`
//! (`vector-family` or `functional-family`), `"space"`, `"members"` as a
//! list of coordinate rows, and for functional families an optional
//! `"shape"`.
//!
//! Rendering and parsing round-trip bit-exactly: coefficients print as the
//! shortest decimal that recovers the same binary value. Parse errors name
//! the offending field path and, where the text allows it, the line.

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::operators::{AnyOperator, HomogeneousPolynomial, LinearOperator, MultilinearOperator};
use crate::seqnorms::{FunctionalFamily, VectorFamily};
use crate::spaces::{Exponent, Functional, NormedSpace, Vector};
use crate::tensor::Tensor;

/// Symmetry slack beyond which a polynomial document earns a warning.
const SYMMETRY_NOTE_TOL: f64 = 1e-12;

/// Parsed operator plus any notes produced while reading it (currently
/// only the symmetrization notice for asymmetric polynomial coefficients).
#[derive(Debug, Clone)]
pub struct ParsedOperator {
    pub op: AnyOperator,
    pub warnings: Vec<String>,
}

/// Parsed family document.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyDocument {
    Vectors(VectorFamily),
    Functionals(FunctionalFamily),
}

fn doc_err(path: &str, line: Option<usize>, message: impl Into<String>) -> Error {
    let message = message.into();
    let message = match line {
        Some(l) => format!("line {l}: {message}"),
        None => message,
    };
    Error::Document { path: path.to_string(), message }
}

fn parse_root(path: &str, text: &str) -> Result<Map<String, Value>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        doc_err(path, Some(e.line()), format!("{}", e))
    })?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(doc_err(path, Some(1), "top-level value must be an object")),
    }
}

fn get_field<'a>(
    map: &'a Map<String, Value>,
    path: &str,
    text: &str,
    field: &str,
) -> Result<&'a Value> {
    map.get(field)
        .ok_or_else(|| doc_err(path, key_line(text, field), format!("missing field \"{field}\"")))
}

fn exponent_from(v: &Value, path: &str, field_path: &str) -> Result<Exponent> {
    match v {
        Value::String(s) if s == "inf" => Ok(Exponent::Infinity),
        Value::Number(n) => {
            let raw = n.as_f64().unwrap_or(f64::NAN);
            Exponent::new(raw).map_err(|_| {
                doc_err(
                    path,
                    None,
                    format!("{field_path}: exponent {raw} must lie in [1, inf] or be \"inf\""),
                )
            })
        }
        _ => Err(doc_err(
            path,
            None,
            format!("{field_path}: expected a number or \"inf\""),
        )),
    }
}

fn space_from(v: &Value, path: &str, field_path: &str) -> Result<NormedSpace> {
    let obj = v.as_object().ok_or_else(|| {
        doc_err(path, None, format!("{field_path}: expected an object with \"dim\" and \"q\""))
    })?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| doc_err(path, None, format!("{field_path}.dim: expected a positive integer")))?;
    if dim == 0 {
        return Err(doc_err(path, None, format!("{field_path}.dim: must be at least 1")));
    }
    let q = exponent_from(
        obj.get("q")
            .ok_or_else(|| doc_err(path, None, format!("{field_path}.q: missing")))?,
        path,
        &format!("{field_path}.q"),
    )?;
    Ok(NormedSpace::new(dim as usize, q))
}

/// Flatten a nested coefficient array against the expected shape, rejecting
/// ragged levels and non-finite leaves with the index path of the fault.
fn read_nested(
    v: &Value,
    shape: &[usize],
    path: &str,
    text: &str,
    index_path: &mut String,
    out: &mut Vec<f64>,
) -> Result<()> {
    if shape.is_empty() {
        let x = v.as_f64().ok_or_else(|| {
            doc_err(
                path,
                anchor_line(text, index_path),
                format!("coefficients{index_path}: expected a number"),
            )
        })?;
        out.push(x);
        return Ok(());
    }
    let arr = v.as_array().ok_or_else(|| {
        doc_err(
            path,
            anchor_line(text, index_path),
            format!("coefficients{index_path}: expected an array of length {}", shape[0]),
        )
    })?;
    if arr.len() != shape[0] {
        return Err(doc_err(
            path,
            anchor_line(text, index_path),
            format!(
                "coefficients{index_path}: expected {} entries, found {}",
                shape[0],
                arr.len()
            ),
        ));
    }
    for (i, item) in arr.iter().enumerate() {
        let len = index_path.len();
        index_path.push_str(&format!("[{i}]"));
        read_nested(item, &shape[1..], path, text, index_path, out)?;
        index_path.truncate(len);
    }
    Ok(())
}

fn nesting_depth(v: &Value) -> usize {
    match v {
        Value::Array(items) => 1 + items.first().map(nesting_depth).unwrap_or(0),
        _ => 0,
    }
}

/// Parse an operator document. `path` labels diagnostics only; the text is
/// supplied by the caller.
pub fn parse_operator_document(path: &str, text: &str) -> Result<ParsedOperator> {
    let map = parse_root(path, text)?;
    let kind = get_field(&map, path, text, "type")?
        .as_str()
        .ok_or_else(|| doc_err(path, key_line(text, "type"), "type: expected a string"))?;
    let codomain = space_from(get_field(&map, path, text, "codomain")?, path, "codomain")?;
    let domains_value = get_field(&map, path, text, "domains")?;
    let domains_raw = domains_value.as_array().ok_or_else(|| {
        doc_err(path, key_line(text, "domains"), "domains: expected an array of spaces")
    })?;
    if domains_raw.is_empty() {
        return Err(doc_err(path, key_line(text, "domains"), "domains: must not be empty"));
    }
    let domains = domains_raw
        .iter()
        .enumerate()
        .map(|(i, v)| space_from(v, path, &format!("domains[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = get_field(&map, path, text, "coefficients")?;

    let mut warnings = Vec::new();
    let op = match kind {
        "linear" => {
            if domains.len() != 1 {
                return Err(doc_err(
                    path,
                    key_line(text, "domains"),
                    format!("domains: a linear operator takes exactly 1 domain, found {}", domains.len()),
                ));
            }
            let shape = [codomain.dim, domains[0].dim];
            let mut data = Vec::with_capacity(shape.iter().product());
            read_nested(coeffs, &shape, path, text, &mut String::new(), &mut data)?;
            AnyOperator::Linear(LinearOperator::new(data, domains[0], codomain).expect("shape checked"))
        }
        "multilinear" => {
            let mut shape = vec![codomain.dim];
            shape.extend(domains.iter().map(|d| d.dim));
            let mut data = Vec::with_capacity(shape.iter().product());
            read_nested(coeffs, &shape, path, text, &mut String::new(), &mut data)?;
            let tensor = Tensor::new(shape, data).expect("shape checked");
            AnyOperator::Multilinear(
                MultilinearOperator::new(tensor, domains, codomain).expect("shape checked"),
            )
        }
        "polynomial" => {
            if domains.len() != 1 {
                return Err(doc_err(
                    path,
                    key_line(text, "domains"),
                    format!("domains: a polynomial has exactly 1 domain, found {}", domains.len()),
                ));
            }
            let inferred = nesting_depth(coeffs).saturating_sub(1);
            let degree = match map.get("degree") {
                Some(v) => {
                    let d = v.as_u64().ok_or_else(|| {
                        doc_err(path, key_line(text, "degree"), "degree: expected a positive integer")
                    })? as usize;
                    if d != inferred {
                        return Err(doc_err(
                            path,
                            key_line(text, "degree"),
                            format!("degree: declared {d} but coefficients nest to degree {inferred}"),
                        ));
                    }
                    d
                }
                None => inferred,
            };
            if degree == 0 {
                return Err(doc_err(
                    path,
                    key_line(text, "coefficients"),
                    "coefficients: polynomial degree must be at least 1",
                ));
            }
            let mut shape = vec![codomain.dim];
            shape.extend(std::iter::repeat(domains[0].dim).take(degree));
            let mut data = Vec::with_capacity(shape.iter().product());
            read_nested(coeffs, &shape, path, text, &mut String::new(), &mut data)?;
            let tensor = Tensor::new(shape, data).expect("shape checked");
            let (pol, deviation) =
                HomogeneousPolynomial::new_symmetrized(degree, tensor, domains[0], codomain)
                    .expect("shape checked");
            if deviation > SYMMETRY_NOTE_TOL {
                warnings.push(format!(
                    "coefficients not symmetric (deviation {deviation:e}); symmetrized by averaging over slot permutations"
                ));
            }
            AnyOperator::Polynomial(pol)
        }
        other => {
            return Err(doc_err(
                path,
                key_line(text, "type"),
                format!("type: unknown operator type {other:?} (expected linear, multilinear, or polynomial)"),
            ));
        }
    };
    Ok(ParsedOperator { op, warnings })
}

/// Parse a family document.
pub fn parse_family_document(path: &str, text: &str) -> Result<FamilyDocument> {
    let map = parse_root(path, text)?;
    let kind = get_field(&map, path, text, "type")?
        .as_str()
        .ok_or_else(|| doc_err(path, key_line(text, "type"), "type: expected a string"))?;
    let space = space_from(get_field(&map, path, text, "space")?, path, "space")?;
    let members_value = get_field(&map, path, text, "members")?;
    let rows = members_value.as_array().ok_or_else(|| {
        doc_err(path, key_line(text, "members"), "members: expected an array of coordinate rows")
    })?;
    if rows.is_empty() {
        return Err(doc_err(path, key_line(text, "members"), "members: must not be empty"));
    }
    let mut coords_rows = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let items = row.as_array().ok_or_else(|| {
            doc_err(
                path,
                anchor_line_for(text, "members", &format!("[{i}]")),
                format!("members[{i}]: expected an array of {} numbers", space.dim),
            )
        })?;
        if items.len() != space.dim {
            return Err(doc_err(
                path,
                anchor_line_for(text, "members", &format!("[{i}]")),
                format!("members[{i}]: expected {} entries, found {}", space.dim, items.len()),
            ));
        }
        let coords = items
            .iter()
            .enumerate()
            .map(|(j, v)| {
                v.as_f64().ok_or_else(|| {
                    doc_err(path, None, format!("members[{i}][{j}]: expected a number"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        coords_rows.push(coords);
    }
    match kind {
        "vector-family" => {
            let members = coords_rows
                .into_iter()
                .map(|c| Vector::new(c, space).expect("length checked"))
                .collect();
            Ok(FamilyDocument::Vectors(VectorFamily::new(members)?))
        }
        "functional-family" => {
            let members: Vec<Functional> = coords_rows
                .into_iter()
                .map(|c| Functional::new(c, space).expect("length checked"))
                .collect();
            let shape = match map.get("shape") {
                Some(v) => {
                    let arr = v.as_array().ok_or_else(|| {
                        doc_err(path, key_line(text, "shape"), "shape: expected an array of integers")
                    })?;
                    let dims = arr
                        .iter()
                        .enumerate()
                        .map(|(i, x)| {
                            x.as_u64().map(|u| u as usize).ok_or_else(|| {
                                doc_err(path, None, format!("shape[{i}]: expected a positive integer"))
                            })
                        })
                        .collect::<Result<Vec<usize>>>()?;
                    Some(dims)
                }
                None => None,
            };
            let fam = FunctionalFamily::with_shape(members, shape).map_err(|e| {
                doc_err(path, key_line(text, "shape"), format!("shape: {e}"))
            })?;
            Ok(FamilyDocument::Functionals(fam))
        }
        other => Err(doc_err(
            path,
            key_line(text, "type"),
            format!("type: unknown family type {other:?} (expected vector-family or functional-family)"),
        )),
    }
}

fn number(x: f64) -> Value {
    Value::Number(Number::from_f64(x).expect("coefficients are finite"))
}

fn nested_from(data: &[f64], shape: &[usize]) -> Value {
    if shape.is_empty() {
        return number(data[0]);
    }
    let stride: usize = shape[1..].iter().product();
    Value::Array(
        (0..shape[0])
            .map(|i| nested_from(&data[i * stride..(i + 1) * stride], &shape[1..]))
            .collect(),
    )
}

fn space_value(s: NormedSpace) -> Value {
    let mut obj = Map::new();
    obj.insert("dim".into(), Value::from(s.dim as u64));
    obj.insert("q".into(), serde_json::to_value(s.q).expect("exponent serializes"));
    Value::Object(obj)
}

/// Render an operator document; parsing it back recovers the operator
/// bit-exactly.
pub fn render_operator_document(op: &AnyOperator) -> String {
    let mut obj = Map::new();
    match op {
        AnyOperator::Linear(t) => {
            obj.insert("type".into(), Value::from("linear"));
            obj.insert("domains".into(), Value::Array(vec![space_value(t.domain)]));
            obj.insert("codomain".into(), space_value(t.codomain));
            obj.insert(
                "coefficients".into(),
                nested_from(&t.matrix, &[t.codomain.dim, t.domain.dim]),
            );
        }
        AnyOperator::Multilinear(t) => {
            obj.insert("type".into(), Value::from("multilinear"));
            obj.insert(
                "domains".into(),
                Value::Array(t.domains.iter().map(|d| space_value(*d)).collect()),
            );
            obj.insert("codomain".into(), space_value(t.codomain));
            obj.insert("coefficients".into(), nested_from(t.tensor.data(), t.tensor.shape()));
        }
        AnyOperator::Polynomial(p) => {
            obj.insert("type".into(), Value::from("polynomial"));
            obj.insert("domains".into(), Value::Array(vec![space_value(p.domain)]));
            obj.insert("codomain".into(), space_value(p.codomain));
            obj.insert("degree".into(), Value::from(p.degree as u64));
            obj.insert("coefficients".into(), nested_from(p.tensor().data(), p.tensor().shape()));
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("renderable");
    text.push('\n');
    text
}

/// Render a family document; parsing it back recovers the family.
pub fn render_family_document(fam: &FamilyDocument) -> String {
    let mut obj = Map::new();
    match fam {
        FamilyDocument::Vectors(f) => {
            obj.insert("type".into(), Value::from("vector-family"));
            obj.insert("space".into(), space_value(f.space()));
            obj.insert(
                "members".into(),
                Value::Array(
                    f.members()
                        .iter()
                        .map(|v| Value::Array(v.coords.iter().map(|&c| number(c)).collect()))
                        .collect(),
                ),
            );
        }
        FamilyDocument::Functionals(f) => {
            obj.insert("type".into(), Value::from("functional-family"));
            obj.insert("space".into(), space_value(f.space()));
            obj.insert(
                "members".into(),
                Value::Array(
                    f.members()
                        .iter()
                        .map(|v| Value::Array(v.coords.iter().map(|&c| number(c)).collect()))
                        .collect(),
                ),
            );
            if let Some(shape) = f.shape() {
                obj.insert(
                    "shape".into(),
                    Value::Array(shape.iter().map(|&s| Value::from(s as u64)).collect()),
                );
            }
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("renderable");
    text.push('\n');
    text
}

/// 1-based line of the first occurrence of a quoted key, for anchoring
/// diagnostics about that field.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let pos = text.find(&needle)?;
    Some(text[..pos].bytes().filter(|&b| b == b'\n').count() + 1)
}

fn anchor_line(text: &str, index_path: &str) -> Option<usize> {
    anchor_line_for(text, "coefficients", index_path)
}

/// 1-based line of the element at `index_path` (like "[2][0]") inside the
/// array value of `key`. Walks the raw text so the line refers to the
/// document as written; gives up (None) on any surprise.
fn anchor_line_for(text: &str, key: &str, index_path: &str) -> Option<usize> {
    let indices: Vec<usize> = index_path
        .split(['[', ']'])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().ok())
        .collect::<Option<Vec<_>>>()?;
    let needle = format!("\"{key}\"");
    let mut pos = text.find(&needle)? + needle.len();
    let bytes = text.as_bytes();
    // Skip to the opening bracket of the array value.
    while pos < bytes.len() && bytes[pos] != b'[' {
        pos += 1;
    }
    for (level, &target) in indices.iter().enumerate() {
        if pos >= bytes.len() || bytes[pos] != b'[' {
            return None;
        }
        // Advance past the '[' of this level, then walk to element `target`
        // by counting top-level commas.
        pos += 1;
        let mut elem = 0usize;
        let mut depth = 0usize;
        let mut in_string = false;
        let mut escaped = false;
        while pos < bytes.len() && (bytes[pos] as char).is_whitespace() {
            pos += 1;
        }
        while pos < bytes.len() && elem < target {
            let b = bytes[pos];
            if in_string {
                if escaped {
                    escaped = false;
                } else if b == b'\\' {
                    escaped = true;
                } else if b == b'"' {
                    in_string = false;
                }
            } else {
                match b {
                    b'"' => in_string = true,
                    b'[' | b'{' => depth += 1,
                    b']' | b'}' => {
                        if depth == 0 {
                            return None;
                        }
                        depth -= 1;
                    }
                    b',' if depth == 0 => {
                        elem += 1;
                    }
                    _ => {}
                }
            }
            pos += 1;
        }
        if elem < target {
            return None;
        }
        while pos < bytes.len() && (bytes[pos] as char).is_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return None;
        }
        // Deeper levels need another array here; otherwise anchor at what
        // was found.
        if level + 1 < indices.len() && bytes[pos] != b'[' {
            break;
        }
    }
    Some(text[..pos].bytes().filter(|&b| b == b'\n').count() + 1)
}
