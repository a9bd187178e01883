//! JSON catalogs of spaces, operators and tensors.
//!
//! A catalog is either a list of entries or an object with an `entries`
//! list. Every entry has a `label` and a `kind`; parameters sit next to them
//! or inside a `params` object:
//!
//! ```json
//! {"label": "linf2", "field": "real", "kind": "lp", "p": "inf", "dim": 2}
//! {"label": "hex", "kind": "polyhedral", "vertices": [["1","0"], ["1","1"], ...]}
//! {"label": "w", "kind": "euclidean-weighted", "weights": [1, 4]}
//! {"label": "pi", "kind": "tensor-pi", "left": "l12", "right": "linf2"}
//! {"label": "L", "kind": "operator-space", "domain": "linf2", "codomain": "l12"}
//! {"label": "d", "kind": "dual-of", "of": "hex"}
//! {"label": "swap", "kind": "operator", "space": "l12", "matrix": [["0","1"],["1","0"]]}
//! {"label": "u", "kind": "tensor", "left": "l22", "right": "l22", "coefficients": [[1,0],[0,1]]}
//! ```
//!
//! Scalars are JSON numbers, rational strings such as `"1/3"`, or `[re, im]`
//! pairs. Entries may only refer to labels defined earlier in the file.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use numrange::scalar::{format_rational, parse_rational};
use numrange::{dual_space, operator_space, tensor_space, Config, Exponent, Field, Matrix, NormKind, NormedSpace, Operator, Rat, RatVec, TensorElement, TensorKind, C64};

use crate::CliError;

/// The catalog shipped with the tool.
pub const DEFAULT_CATALOG: &str = include_str!("../catalog/default.json");

/// Environment variable naming the default catalog file.
pub const CATALOG_ENV: &str = "NUMRANGE_CATALOG";

#[derive(Clone, Debug)]
pub enum Item {
    Space(NormedSpace),
    Operator(Operator),
    Tensor(TensorElement),
}

impl Item {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Item::Space(_) => "space",
            Item::Operator(_) => "operator",
            Item::Tensor(_) => "tensor",
        }
    }
}

/// Loaded catalog in file order.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    order: Vec<String>,
    items: BTreeMap<String, Item>,
}

impl Catalog {
    pub fn labels(&self) -> &[String] {
        &self.order
    }

    pub fn get(&self, label: &str) -> Result<&Item, CliError> {
        self.items.get(label).ok_or_else(|| CliError::UnknownLabel(label.to_string()))
    }

    pub fn space(&self, label: &str) -> Result<&NormedSpace, CliError> {
        match self.get(label)? {
            Item::Space(s) => Ok(s),
            other => Err(CliError::WrongKind {
                label: label.to_string(),
                expected: "space",
                found: other.kind_name(),
            }),
        }
    }

    pub fn operator(&self, label: &str) -> Result<&Operator, CliError> {
        match self.get(label)? {
            Item::Operator(t) => Ok(t),
            other => Err(CliError::WrongKind {
                label: label.to_string(),
                expected: "operator",
                found: other.kind_name(),
            }),
        }
    }

    pub fn tensor(&self, label: &str) -> Result<&TensorElement, CliError> {
        match self.get(label)? {
            Item::Tensor(u) => Ok(u),
            other => Err(CliError::WrongKind {
                label: label.to_string(),
                expected: "tensor",
                found: other.kind_name(),
            }),
        }
    }

    /// All spaces in file order.
    pub fn spaces(&self) -> Vec<NormedSpace> {
        self.order
            .iter()
            .filter_map(|l| match &self.items[l] {
                Item::Space(s) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    fn insert(&mut self, label: String, item: Item, entry: usize) -> Result<(), CliError> {
        if self.items.contains_key(&label) {
            return Err(entry_error(entry, &label, "duplicate label"));
        }
        self.order.push(label.clone());
        self.items.insert(label, item);
        Ok(())
    }
}

fn entry_error(entry: usize, label: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Catalog {
        entry,
        label: label.to_string(),
        message: msg.to_string(),
    }
}

pub fn load_catalog_file(path: &Path, cfg: &Config) -> Result<Catalog, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_catalog(&text, cfg)
}

/// Parses and validates a catalog document.
pub fn parse_catalog(text: &str, cfg: &Config) -> Result<Catalog, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Json(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let entries = match &doc {
        Value::Array(a) => a.clone(),
        Value::Object(o) => match o.get("entries") {
            Some(Value::Array(a)) => a.clone(),
            _ => return Err(CliError::Json("catalog object needs an \"entries\" list".into())),
        },
        _ => return Err(CliError::Json("catalog must be a list or an object".into())),
    };
    let mut cat = Catalog::default();
    for (k, e) in entries.iter().enumerate() {
        let obj = flatten(e).ok_or_else(|| entry_error(k, "?", "entry is not an object"))?;
        let label = match obj.get("label") {
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            _ => return Err(entry_error(k, "?", "missing label")),
        };
        let item = parse_entry(&obj, &cat, cfg).map_err(|m| entry_error(k, &label, m))?;
        cat.insert(label, item, k)?;
    }
    Ok(cat)
}

fn flatten(e: &Value) -> Option<Map<String, Value>> {
    let mut obj = e.as_object()?.clone();
    if let Some(Value::Object(p)) = obj.remove("params") {
        for (k, v) in p {
            obj.entry(k).or_insert(v);
        }
    }
    Some(obj)
}

fn get_str<'a>(o: &'a Map<String, Value>, key: &str) -> Result<&'a str, String> {
    o.get(key).and_then(Value::as_str).ok_or_else(|| format!("missing string field \"{key}\""))
}

fn field_of(o: &Map<String, Value>) -> Result<Field, String> {
    match o.get("field").and_then(Value::as_str).unwrap_or("real") {
        "real" => Ok(Field::Real),
        "complex" => Ok(Field::Complex),
        other => Err(format!("unknown field {other:?}")),
    }
}

fn parse_exponent(v: &Value) -> Result<Exponent, String> {
    match v {
        Value::Number(n) => Ok(Exponent::Finite(n.as_f64().ok_or("bad exponent")?)),
        Value::String(s) => match s.trim() {
            "inf" | "infinity" | "Infinity" | "oo" => Ok(Exponent::Infinity),
            t => t.parse::<f64>().map(Exponent::Finite).map_err(|_| format!("bad exponent {s:?}")),
        },
        _ => Err("exponent must be a number or \"inf\"".into()),
    }
}

/// A scalar literal; rational when it is an integer or a rational string.
enum Scalar {
    Exact(Rat),
    Float(C64),
}

fn parse_scalar(v: &Value) -> Result<Scalar, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar::Exact(Rat::from_integer(i.into())))
            } else {
                Ok(Scalar::Float(C64::new(n.as_f64().ok_or("bad number")?, 0.0)))
            }
        }
        Value::String(s) => parse_rational(s).map(Scalar::Exact).map_err(|e| e.to_string()),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or("complex entries are [re, im] numbers")?;
            let im = a[1].as_f64().ok_or("complex entries are [re, im] numbers")?;
            Ok(Scalar::Float(C64::new(re, im)))
        }
        _ => Err(format!("not a scalar: {v}")),
    }
}

fn to_c64(s: &Scalar) -> C64 {
    match s {
        Scalar::Exact(r) => C64::new(numrange::scalar::rat_to_f64(r), 0.0),
        Scalar::Float(c) => *c,
    }
}

/// Rows of scalars; `Ok((float rows, Some(rational rows)))` when all exact.
fn parse_rows(v: &Value) -> Result<(Vec<Vec<C64>>, Option<Vec<RatVec>>), String> {
    let rows = v.as_array().ok_or("expected a list of rows")?;
    let mut fl = Vec::new();
    let mut ra: Option<Vec<RatVec>> = Some(Vec::new());
    for r in rows {
        let r = r.as_array().ok_or("expected a row (list of scalars)")?;
        let sc: Vec<Scalar> = r.iter().map(parse_scalar).collect::<Result<_, _>>()?;
        fl.push(sc.iter().map(to_c64).collect());
        ra = ra.and_then(|mut acc| {
            let row: Option<RatVec> = sc
                .iter()
                .map(|s| match s {
                    Scalar::Exact(q) => Some(q.clone()),
                    Scalar::Float(_) => None,
                })
                .collect();
            acc.push(row?);
            Some(acc)
        });
    }
    Ok((fl, ra))
}

fn rational_rows(v: &Value, what: &str) -> Result<Vec<RatVec>, String> {
    match parse_rows(v)? {
        (_, Some(r)) => Ok(r),
        _ => Err(format!("{what} must be exact rationals (integers or \"p/q\" strings)")),
    }
}

fn parse_entry(o: &Map<String, Value>, cat: &Catalog, cfg: &Config) -> Result<Item, String> {
    let label = get_str(o, "label")?;
    let kind = get_str(o, "kind")?;
    let field = field_of(o)?;
    let space_ref = |key: &str| -> Result<NormedSpace, String> {
        let l = get_str(o, key)?;
        cat.space(l).cloned().map_err(|e| e.to_string())
    };
    let sp = match kind {
        "lp" => {
            let dim = o.get("dim").and_then(Value::as_u64).ok_or("missing positive integer \"dim\"")? as usize;
            let p = parse_exponent(o.get("p").ok_or("missing \"p\"")?)?;
            NormedSpace::lp(dim, p, field).map_err(|e| e.to_string())?
        }
        "polyhedral" => {
            if field != Field::Real {
                return Err("polyhedral spaces are real".into());
            }
            let vertices = o.get("vertices").map(|v| rational_rows(v, "vertices")).transpose()?;
            let facets = o.get("facets").map(|v| rational_rows(v, "facets")).transpose()?;
            match (vertices, facets) {
                (Some(v), f) => NormedSpace::polyhedral(label, v, f),
                (None, Some(f)) => NormedSpace::polyhedral_from_facets(label, f),
                (None, None) => return Err("polyhedral entry needs \"vertices\" or \"facets\"".into()),
            }
            .map_err(|e| e.to_string())?
        }
        "euclidean-weighted" => {
            let w: Vec<f64> = o
                .get("weights")
                .and_then(Value::as_array)
                .ok_or("missing \"weights\"")?
                .iter()
                .map(|v| v.as_f64().ok_or("weights are numbers"))
                .collect::<Result<_, _>>()?;
            NormedSpace::weighted_euclidean(w, field).map_err(|e| e.to_string())?
        }
        "tensor-pi" | "tensor-eps" => {
            let k = if kind == "tensor-pi" { TensorKind::Pi } else { TensorKind::Eps };
            tensor_space(&space_ref("left")?, &space_ref("right")?, k).map_err(|e| e.to_string())?
        }
        "operator-space" => operator_space(&space_ref("domain")?, &space_ref("codomain")?).map_err(|e| e.to_string())?,
        "dual-of" => dual_space(&space_ref("of")?),
        "operator" => {
            let dom = space_ref("space").or_else(|_| space_ref("domain"))?;
            let cod = if o.contains_key("codomain") { space_ref("codomain")? } else { dom.clone() };
            let (fl, ra) = parse_rows(o.get("matrix").ok_or("missing \"matrix\"")?)?;
            let t = match ra {
                Some(rows) => Operator::from_rational(&dom, &cod, rows),
                None => {
                    let cols = fl.first().map_or(0, Vec::len);
                    let m = Matrix::new(fl.len(), cols, fl.concat()).map_err(|e| e.to_string())?;
                    Operator::new(&dom, &cod, m)
                }
            }
            .map_err(|e| e.to_string())?;
            return Ok(Item::Operator(t));
        }
        "tensor" => {
            let (l, r) = (space_ref("left")?, space_ref("right")?);
            let (fl, _) = parse_rows(o.get("coefficients").ok_or("missing \"coefficients\"")?)?;
            let cols = fl.first().map_or(0, Vec::len);
            let m = Matrix::new(fl.len(), cols, fl.concat()).map_err(|e| e.to_string())?;
            return TensorElement::new(&l, &r, m).map(Item::Tensor).map_err(|e| e.to_string());
        }
        other => return Err(format!("unknown kind {other:?}")),
    };
    if sp.field() != field && !matches!(kind, "tensor-pi" | "tensor-eps" | "operator-space" | "dual-of") {
        return Err("field mismatch".into());
    }
    Ok(Item::Space(sp.relabel(label).with_config(cfg)))
}

fn rat_rows_json(rows: &[RatVec]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(|q| Value::String(format_rational(q))).collect())).collect())
}

fn field_name(f: Field) -> &'static str {
    match f {
        Field::Real => "real",
        Field::Complex => "complex",
    }
}

fn component_label(s: &NormedSpace, cat: &Catalog) -> Value {
    let found = cat.spaces().into_iter().find(|c| c.same_as(s)).map(|c| c.label().to_string());
    Value::String(found.unwrap_or_else(|| s.label().to_string()))
}

/// Serializes the spaces and operators of a catalog; rationals are written
/// as canonical `"p/q"` strings so they read back exactly.
pub fn catalog_to_json(cat: &Catalog) -> Value {
    let mut entries = Vec::new();
    for label in cat.labels() {
        let e = match &cat.items[label] {
            Item::Space(s) => {
                let mut e = json!({"label": label, "field": field_name(s.field())});
                let o = e.as_object_mut().expect("object");
                match s.kind() {
                    NormKind::Lp(p) => {
                        o.insert("kind".into(), "lp".into());
                        let p = match p {
                            Exponent::Infinity => "inf".to_string(),
                            Exponent::Finite(v) => format!("{v}"),
                        };
                        o.insert("p".into(), p.into());
                        o.insert("dim".into(), s.dim().into());
                    }
                    NormKind::Polyhedral => {
                        o.insert("kind".into(), "polyhedral".into());
                        if let Some((v, f)) = s.polyhedral_data() {
                            o.insert("vertices".into(), rat_rows_json(&v));
                            o.insert("facets".into(), rat_rows_json(&f));
                        }
                    }
                    NormKind::WeightedEuclidean(w) => {
                        o.insert("kind".into(), "euclidean-weighted".into());
                        o.insert("weights".into(), json!(w));
                    }
                    NormKind::TensorPi(a, b) | NormKind::TensorEps(a, b) => {
                        let k = if matches!(s.kind(), NormKind::TensorPi(..)) { "tensor-pi" } else { "tensor-eps" };
                        o.insert("kind".into(), k.into());
                        o.insert("left".into(), component_label(a, cat));
                        o.insert("right".into(), component_label(b, cat));
                    }
                    NormKind::OperatorSpace(a, b) => {
                        o.insert("kind".into(), "operator-space".into());
                        o.insert("domain".into(), component_label(a, cat));
                        o.insert("codomain".into(), component_label(b, cat));
                    }
                }
                e
            }
            Item::Operator(t) => {
                let matrix = match t.rational() {
                    Some(r) => rat_rows_json(r),
                    None => {
                        let m = t.matrix();
                        Value::Array(
                            (0..m.rows())
                                .map(|i| Value::Array(m.row(i).iter().map(|c| if c.im == 0.0 { json!(c.re) } else { json!([c.re, c.im]) }).collect()))
                                .collect(),
                        )
                    }
                };
                json!({"label": label, "kind": "operator", "domain": component_label(t.domain(), cat),
                       "codomain": component_label(t.codomain(), cat), "matrix": matrix})
            }
            Item::Tensor(u) => {
                let m = u.coefficients();
                let rows: Vec<Value> = (0..m.rows())
                    .map(|i| Value::Array(m.row(i).iter().map(|c| if c.im == 0.0 { json!(c.re) } else { json!([c.re, c.im]) }).collect()))
                    .collect();
                json!({"label": label, "kind": "tensor", "left": component_label(u.left(), cat),
                       "right": component_label(u.right(), cat), "coefficients": rows})
            }
        };
        entries.push(e);
    }
    json!({ "entries": entries })
}

/// Parses a comma-separated vector literal such as `1,-1/2,0.25`.
pub fn parse_vector(s: &str) -> Result<Vec<C64>, CliError> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match parse_rational(t) {
                Ok(r) => Ok(C64::new(numrange::scalar::rat_to_f64(&r), 0.0)),
                Err(_) => t.parse::<f64>().map(|v| C64::new(v, 0.0)).map_err(|_| CliError::Usage(format!("bad vector component {t:?}"))),
            }
        })
        .collect()
}

/// Exact form of a vector literal when every component is rational.
pub fn parse_vector_exact(s: &str) -> Option<RatVec> {
    s.split(',').map(|t| parse_rational(t.trim()).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_loads() {
        let cat = parse_catalog(DEFAULT_CATALOG, &Config::default()).unwrap();
        assert_eq!(cat.labels(), ["l12", "l13", "linf2", "linf3", "linf4", "l22", "cl22", "hex", "rot", "swap", "shift", "hexrot", "cdiag", "idt"]);
        assert_eq!(cat.spaces().len(), 8);
        let hex = cat.space("hex").unwrap();
        assert_eq!(hex.facets().unwrap().len(), 6);
    }

    #[test]
    fn rationals_round_trip() {
        let text = r#"[{"label":"h","kind":"polyhedral",
            "vertices":[["1","0"],["1/3","1"],["-2/3","1"],["-1","0"],["-1/3","-1"],["2/3","-1"]]}]"#;
        let cfg = Config::default();
        let cat = parse_catalog(text, &cfg).unwrap();
        let out = catalog_to_json(&cat);
        let again = parse_catalog(&out.to_string(), &cfg).unwrap();
        assert_eq!(catalog_to_json(&again), out);
        assert!(out.to_string().contains("\"1/3\""));
        let v = again.space("h").unwrap().vertices().unwrap();
        assert!(v.contains(&vec![Rat::new(1.into(), 3.into()), Rat::from_integer(1.into())]));
    }

    #[test]
    fn bad_vertex_names_entry() {
        let text = r#"[{"label":"ok","kind":"lp","p":"1","dim":2},
            {"label":"bad","kind":"polyhedral","vertices":[["3/2","0"],["-3/2","0"],["0","1"],["0","-1"]],
             "facets":[["1","1"],["1","-1"],["-1","1"],["-1","-1"]]}]"#;
        let err = parse_catalog(text, &Config::default()).unwrap_err().to_string();
        assert!(err.contains("bad") && err.contains("entry 1"), "{err}");
    }

    #[test]
    fn unknown_reference_is_reported() {
        let text = r#"[{"label":"t","kind":"tensor-pi","left":"nope","right":"nope"}]"#;
        let err = parse_catalog(text, &Config::default()).unwrap_err().to_string();
        assert!(err.contains("nope"), "{err}");
    }
}
