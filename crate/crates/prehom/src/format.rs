//! JSON files: forms, partial targets, matrices and scalars.
//!
//! Rationals are strings `"p/q"` (or `"p"`), quadratic-extension values are
//! objects `{"a": "p/q", "b": "p/q", "d": n}` and floats are JSON numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use prehom_core::invariants::QuadraticForm;
use prehom_core::perturb::PartialTarget;
use prehom_core::{AlternatingForm, FormShape, Matrix, QuadExt, Rational, Scalar};
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("bad index tuple \"{0}\"")]
    BadIndex(String),
    #[error("indices not strictly increasing: \"{0}\"")]
    NotIncreasing(String),
    #[error("index out of range in \"{key}\" (dimension {dim})")]
    OutOfRange { key: String, dim: usize },
    #[error("zero denominator in \"{0}\"")]
    ZeroDenominator(String),
    #[error("bad scalar {0}")]
    BadScalar(String),
    #[error("missing or invalid field \"{0}\"")]
    Field(&'static str),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] prehom_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// Scalar kinds that can appear in files.
pub trait JsonScalar: Scalar {
    const KIND: &'static str;
    fn to_json(&self) -> Value;
    /// `d` is the file-level extension parameter, if any.
    fn from_json(v: &Value, d: Option<i64>) -> Result<Self>;
}

pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || FormatError::BadScalar(format!("\"{s}\""));
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(FormatError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(n, d))
}

fn rational_from_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(BigInt::from(n.as_i64().unwrap_or(0)))),
        other => Err(FormatError::BadScalar(other.to_string())),
    }
}

impl JsonScalar for Rational {
    const KIND: &'static str = "rational";

    fn to_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }

    fn from_json(v: &Value, _d: Option<i64>) -> Result<Self> {
        rational_from_value(v)
    }
}

impl JsonScalar for f64 {
    const KIND: &'static str = "float";

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map(Value::Number).unwrap_or(Value::Null)
    }

    fn from_json(v: &Value, _d: Option<i64>) -> Result<Self> {
        v.as_f64().ok_or_else(|| FormatError::BadScalar(v.to_string()))
    }
}

impl JsonScalar for QuadExt {
    const KIND: &'static str = "quadext";

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("a".into(), Value::String(rational_to_string(&self.a)));
        m.insert("b".into(), Value::String(rational_to_string(&self.b)));
        m.insert("d".into(), Value::from(self.d));
        Value::Object(m)
    }

    fn from_json(v: &Value, d: Option<i64>) -> Result<Self> {
        let (a, b, vd) = match v {
            Value::Object(m) => {
                let a = m.get("a").map(rational_from_value).transpose()?.unwrap_or_else(<Rational as Zero>::zero);
                let b = m.get("b").map(rational_from_value).transpose()?.unwrap_or_else(<Rational as Zero>::zero);
                let vd = match m.get("d") {
                    Some(x) => Some(x.as_i64().ok_or(FormatError::Field("d"))?),
                    None => None,
                };
                (a, b, vd)
            }
            other => (rational_from_value(other)?, <Rational as Zero>::zero(), None),
        };
        if let (Some(x), Some(y)) = (vd, d) {
            if x != y {
                return Err(FormatError::BadScalar(format!("value with d = {x} in a file with d = {y}")));
            }
        }
        match vd.or(d) {
            Some(d) if d != 0 => Ok(QuadExt::new(a, b, d)?),
            _ if Zero::is_zero(&b) => Ok(QuadExt::rational(a)),
            _ => Err(FormatError::BadScalar(format!("{v} has an irrational part but no d"))),
        }
    }
}

/// A complex number as `{"re": …, "im": …}`.
pub fn complex_to_json(re: f64, im: f64) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), re.to_json());
    m.insert("im".into(), im.to_json());
    Value::Object(m)
}

/// `"1,2,3"` to `[1, 2, 3]`, checked against `dim` and `degree`.
pub fn parse_index(key: &str, dim: usize, degree: usize) -> Result<Vec<usize>> {
    let idx: Vec<usize> = key
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| FormatError::BadIndex(key.to_string()))?;
    if idx.len() != degree {
        return Err(FormatError::BadIndex(key.to_string()));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FormatError::NotIncreasing(key.to_string()));
    }
    if idx.iter().any(|&i| i == 0 || i > dim) {
        return Err(FormatError::OutOfRange { key: key.to_string(), dim });
    }
    Ok(idx)
}

pub fn index_key(idx: &[usize]) -> String {
    let mut s = String::new();
    for (k, i) in idx.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        let _ = write!(s, "{i}");
    }
    s
}

fn extension_of(x: &AlternatingForm<QuadExt>) -> Option<i64> {
    x.iter().map(|(_, v)| v.d).find(|&d| d != 0)
}

/// Canonical JSON of a form: fixed key order, coefficients in index order,
/// zero coefficients omitted.
pub fn form_to_json<S: JsonScalar>(x: &AlternatingForm<S>, d: Option<i64>) -> Value {
    let mut m = Map::new();
    m.insert("dim".into(), Value::from(x.dim()));
    m.insert("degree".into(), Value::from(x.degree()));
    m.insert("scalar".into(), Value::from(S::KIND));
    if let Some(d) = d {
        m.insert("d".into(), Value::from(d));
    }
    let mut coeffs = Map::new();
    for (idx, v) in x.iter() {
        if !v.is_zero() {
            coeffs.insert(index_key(idx), v.to_json());
        }
    }
    m.insert("coeffs".into(), Value::Object(coeffs));
    Value::Object(m)
}

/// A form with any supported scalar type.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyForm {
    Rational(AlternatingForm<Rational>),
    Float(AlternatingForm<f64>),
    Quad { form: AlternatingForm<QuadExt>, d: Option<i64> },
}

impl AnyForm {
    pub fn dim(&self) -> usize {
        match self {
            AnyForm::Rational(x) => x.dim(),
            AnyForm::Float(x) => x.dim(),
            AnyForm::Quad { form, .. } => form.dim(),
        }
    }

    pub fn shape(&self) -> Result<FormShape> {
        Ok(match self {
            AnyForm::Rational(x) => x.shape()?,
            AnyForm::Float(x) => x.shape()?,
            AnyForm::Quad { form, .. } => form.shape()?,
        })
    }

    /// Real values; for `d < 0` the real part.
    pub fn to_f64(&self) -> AlternatingForm<f64> {
        match self {
            AnyForm::Rational(x) => x.map_scalars(|v| v.to_real()),
            AnyForm::Float(x) => x.clone(),
            AnyForm::Quad { form, .. } => form.map_scalars(|v| v.to_real()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyForm::Rational(x) => form_to_json(x, None),
            AnyForm::Float(x) => form_to_json(x, None),
            AnyForm::Quad { form, d } => {
                let d = d.or_else(|| extension_of(form));
                let canon = form.map_scalars(|v| match d {
                    Some(d) if v.d == 0 => v.clone().with_d(d).unwrap_or_else(|_| v.clone()),
                    _ => v.clone(),
                });
                form_to_json(&canon, d)
            }
        }
    }
}

fn coeffs_into<S: JsonScalar>(obj: &Map<String, Value>, dim: usize, degree: usize, d: Option<i64>) -> Result<AlternatingForm<S>> {
    let coeffs = obj.get("coeffs").and_then(Value::as_object).ok_or(FormatError::Field("coeffs"))?;
    let mut x = AlternatingForm::<S>::zero(dim, degree)?;
    for (key, v) in coeffs {
        let idx = parse_index(key, dim, degree)?;
        x.insert_strict(&idx, S::from_json(v, d)?)?;
    }
    Ok(x)
}

pub fn form_from_value(v: &Value) -> Result<AnyForm> {
    let obj = v.as_object().ok_or(FormatError::Field("dim"))?;
    let dim = obj.get("dim").and_then(Value::as_u64).ok_or(FormatError::Field("dim"))? as usize;
    let degree = obj.get("degree").and_then(Value::as_u64).ok_or(FormatError::Field("degree"))? as usize;
    let scalar = obj.get("scalar").and_then(Value::as_str).unwrap_or("rational");
    let d = match obj.get("d") {
        None | Some(Value::Null) => None,
        Some(x) => Some(x.as_i64().ok_or(FormatError::Field("d"))?),
    };
    match scalar {
        "rational" => Ok(AnyForm::Rational(coeffs_into(obj, dim, degree, d)?)),
        "float" => Ok(AnyForm::Float(coeffs_into(obj, dim, degree, d)?)),
        "quadext" => Ok(AnyForm::Quad { form: coeffs_into(obj, dim, degree, d)?, d }),
        _ => Err(FormatError::Field("scalar")),
    }
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))
}

pub fn parse_form(text: &str) -> Result<AnyForm> {
    form_from_value(&parse_json(text)?)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn read_form(path: &Path) -> Result<AnyForm> {
    parse_form(&read_text(path)?)
}

/// Target files: `{"values": {"1,2,3": 0.5, …}}`; extra keys are ignored.
/// Every constrained index of `shape` must be present.
pub fn target_from_value(v: &Value, shape: FormShape) -> Result<PartialTarget> {
    let obj = v.as_object().ok_or(FormatError::Field("values"))?;
    let values = obj.get("values").and_then(Value::as_object).ok_or(FormatError::Field("values"))?;
    let (dim, degree) = match shape {
        FormShape::Case1 => (6, 3),
        FormShape::Case2 => (7, 3),
        FormShape::Case3 { n } => (2 * n, 2),
    };
    let mut map = BTreeMap::new();
    for (key, val) in values {
        let idx = parse_index(key, dim, degree)?;
        let f = match val {
            Value::String(s) => prehom_core::scalar::rational_to_f64(&parse_rational(s)?),
            other => f64::from_json(other, None)?,
        };
        map.insert(idx, f);
    }
    Ok(PartialTarget::new(shape, map)?)
}

pub fn parse_target(text: &str, shape: FormShape) -> Result<PartialTarget> {
    target_from_value(&parse_json(text)?, shape)
}

pub fn target_to_json(y: &PartialTarget) -> Value {
    let mut values = Map::new();
    for (idx, v) in y.iter() {
        values.insert(index_key(idx), v.to_json());
    }
    let mut m = Map::new();
    m.insert("case".into(), Value::from(y.shape().case_number()));
    if let FormShape::Case3 { n } = y.shape() {
        m.insert("n".into(), Value::from(n));
    }
    m.insert("values".into(), Value::Object(values));
    Value::Object(m)
}

pub fn matrix_to_json<S: JsonScalar>(m: &Matrix<S>) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(JsonScalar::to_json).collect())).collect())
}

pub fn gram_to_json<S: JsonScalar>(q: &QuadraticForm<S>) -> Value {
    matrix_to_json(q.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use prehom_core::representatives::{make_rep, RepName};

    #[test]
    fn parses_case1_w() {
        let f = parse_form(r#"{"dim":6,"degree":3,"scalar":"rational","coeffs":{"1,2,3":"1","4,5,6":"1"}}"#).unwrap();
        assert_eq!(f, AnyForm::Rational(make_rep(RepName::Case1W).unwrap()));
    }

    #[test]
    fn distinct_error_messages() {
        let bad_order = parse_form(r#"{"dim":6,"degree":3,"coeffs":{"2,1,3":"1"}}"#).unwrap_err().to_string();
        let zero_den = parse_form(r#"{"dim":6,"degree":3,"coeffs":{"1,2,3":"1/0"}}"#).unwrap_err().to_string();
        let malformed = parse_form(r#"{"dim":6,"degree":3,"coeffs":{"1,2,3":"1"}"#).unwrap_err().to_string();
        let bad_tuple = parse_form(r#"{"dim":6,"degree":3,"coeffs":{"1,2":"1"}}"#).unwrap_err().to_string();
        assert!(bad_order.contains("indices not strictly increasing"));
        assert!(zero_den.contains("zero denominator"));
        assert!(malformed.contains("malformed JSON"));
        assert!(bad_tuple.contains("bad index tuple"));
        let all = [&bad_order, &zero_den, &malformed, &bad_tuple];
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn rationals_reduce() {
        assert_eq!(rational_to_string(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(rational_to_string(&parse_rational("-8/4").unwrap()), "-2");
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"dim":6,"degree":3,"scalar":"rational","coeffs":{"4,5,6":"2/4","1,2,3":"1","1,2,4":"0"}}"#;
        let once = parse_form(text).unwrap().to_json();
        let twice = parse_form(&once.to_string()).unwrap().to_json();
        assert_eq!(once, twice);
        assert_eq!(once.to_string(), r#"{"dim":6,"degree":3,"scalar":"rational","coeffs":{"1,2,3":"1","4,5,6":"1/2"}}"#);
    }

    #[test]
    fn quadext_round_trip() {
        let text = r#"{"dim":6,"degree":3,"scalar":"quadext","d":2,"coeffs":{"1,2,3":{"a":"1","b":"1/2"},"4,5,6":"3"}}"#;
        let f = parse_form(text).unwrap();
        let j = f.to_json();
        assert_eq!(parse_form(&j.to_string()).unwrap().to_json(), j);
        assert_eq!(j["coeffs"]["4,5,6"]["d"], 2);
        assert!(parse_form(r#"{"dim":6,"degree":3,"scalar":"quadext","coeffs":{"1,2,3":{"a":"1","b":"1"}}}"#).is_err());
    }

    #[test]
    fn float_target() {
        let y = parse_target(r#"{"values":{"1,2":0.5,"1,3":-0.25,"2,3":"1/4"}}"#, FormShape::Case3 { n: 2 }).unwrap();
        assert_eq!(y.get(&[1, 3]), -0.25);
        assert_eq!(y.get(&[2, 3]), 0.25);
        assert!(parse_target(r#"{"values":{"1,2":0.5}}"#, FormShape::Case3 { n: 2 }).is_err());
    }
}
