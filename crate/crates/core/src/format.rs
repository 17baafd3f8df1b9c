//! JSON file formats shared by the CLI and the tests.
//!
//! Exact scalars are written as `"p/q"` strings (`"p"` for integers) so that
//! output is byte-stable; floats are written as JSON numbers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::gallery::{Exponent, PointConfiguration};
use crate::metric::{PointId, PointedMetricSpace};
use crate::scalar::{Mode, Scalar};
use crate::transport::{Measure, NormCertificate};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Domain(#[from] Error),
}

fn schema(msg: impl Into<String>) -> FormatError {
    FormatError::Schema(msg.into())
}

#[derive(Debug, Serialize, Deserialize)]
struct SpaceFile {
    points: Vec<String>,
    base: usize,
    dist: Vec<Vec<Value>>,
    #[serde(default = "default_mode")]
    mode: Mode,
}

fn default_mode() -> Mode {
    Mode::Exact
}

/// Parses one scalar entry in the given mode. Exact mode accepts integers and
/// `"p/q"`/`"p"` strings; float mode accepts any JSON number.
pub fn parse_scalar(v: &Value, mode: Mode) -> Result<Scalar, FormatError> {
    match (mode, v) {
        (Mode::Exact, Value::Number(n)) if n.is_i64() || n.is_u64() => {
            Ok(serde_json::from_value::<Scalar>(v.clone())?)
        }
        (Mode::Exact, Value::String(s)) => match s.parse::<Scalar>() {
            Ok(x) if x.is_exact() => Ok(x),
            _ => Err(schema(format!("{s:?} is not an exact scalar"))),
        },
        (Mode::Float, Value::Number(n)) => {
            n.as_f64().filter(|x| x.is_finite()).map(Scalar::Float).ok_or_else(|| schema(format!("bad float {n}")))
        }
        (Mode::Float, Value::String(s)) => {
            s.parse::<Scalar>().map(|x| x.in_mode(Mode::Float)).map_err(|e| schema(e.to_string()))
        }
        _ => Err(schema(format!("{v} is not a valid {mode} scalar"))),
    }
}

pub fn parse_space(text: &str) -> Result<PointedMetricSpace, FormatError> {
    let file: SpaceFile = serde_json::from_str(text)?;
    let dist = file
        .dist
        .iter()
        .map(|row| row.iter().map(|v| parse_scalar(v, file.mode)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let space = PointedMetricSpace::new(file.points, dist, file.base)?;
    if space.mode() != file.mode {
        // an all-rational matrix declared as float
        return Ok(space.to_float());
    }
    Ok(space)
}

pub fn space_value(space: &PointedMetricSpace) -> Value {
    json!({
        "points": space.names(),
        "base": space.base().0,
        "dist": space.matrix(),
        "mode": space.mode(),
    })
}

/// Space JSON with the configuration's exponent and coordinates added.
pub fn configuration_value(config: &PointConfiguration, space: &PointedMetricSpace) -> Value {
    let mut v = space_value(space);
    let p = match config.exponent {
        Exponent::One => json!(1),
        Exponent::P(p) => json!(p),
        Exponent::Infinity => json!("inf"),
    };
    v["p"] = p;
    v["coordinates"] = json!(config.coordinates);
    v
}

fn resolve(space: &PointedMetricSpace, key: &str) -> Result<PointId, FormatError> {
    space.resolve(key).ok_or_else(|| schema(format!("unknown point {key:?}")))
}

/// Reads `{"<key>": scalar, ...}` where keys are point names or indices.
pub fn parse_point_map(space: &PointedMetricSpace, v: &Value) -> Result<Vec<(PointId, Scalar)>, FormatError> {
    let obj = v.as_object().ok_or_else(|| schema("expected an object keyed by point"))?;
    obj.iter().map(|(k, x)| Ok((resolve(space, k)?, parse_scalar(x, space.mode())?))).collect()
}

/// Measure file: `{"coeffs": {"<point>": scalar, ...}}`.
pub fn parse_measure(space: &PointedMetricSpace, text: &str) -> Result<Measure, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    let coeffs = v.get("coeffs").ok_or_else(|| schema("measure file needs a \"coeffs\" object"))?;
    Ok(Measure::canonicalize(space, parse_point_map(space, coeffs)?)?)
}

pub fn measure_value(measure: &Measure) -> Value {
    let coeffs: BTreeMap<String, &Scalar> = measure.iter().map(|(p, a)| (p.0.to_string(), a)).collect();
    json!({ "coeffs": coeffs })
}

pub fn certificate_value(cert: &NormCertificate) -> Value {
    let plan: Vec<Value> = cert
        .plan
        .shipments()
        .iter()
        .map(|s| json!([s.source.0, s.target.0, s.mass]))
        .collect();
    json!({
        "value": cert.value,
        "plan": plan,
        "witness": cert.witness.values,
    })
}

/// Index map file for a bijection: `{"map": [targetIndex, ...]}` or a bare
/// array.
pub fn parse_map(text: &str) -> Result<Vec<PointId>, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    let arr = v.get("map").unwrap_or(&v);
    let ids: Vec<usize> = serde_json::from_value(arr.clone())?;
    Ok(ids.into_iter().map(PointId).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{gen_ejenega, gen_ellp_embed};

    #[test]
    fn space_round_trip_is_byte_stable() {
        let m = gen_ejenega(3).unwrap();
        let text = space_value(&m).to_string();
        let back = parse_space(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(space_value(&back).to_string(), text);
    }

    #[test]
    fn float_space_round_trip() {
        let (config, b) = gen_ellp_embed(3.0, 3).unwrap();
        let text = configuration_value(&config, &b.target).to_string();
        let back = parse_space(&text).unwrap();
        assert_eq!(back.mode(), Mode::Float);
        assert_eq!(back, b.target);
    }

    #[test]
    fn exact_space_accepts_integers_and_fractions() {
        let text = r#"{"points":["0","a"],"base":0,"dist":[[0,"3/2"],["3/2",0]],"mode":"exact"}"#;
        let m = parse_space(text).unwrap();
        assert_eq!(*m.d(PointId(0), PointId(1)), Scalar::ratio(3, 2));
        let bad = r#"{"points":["0","a"],"base":0,"dist":[[0,1.5],[1.5,0]],"mode":"exact"}"#;
        assert!(matches!(parse_space(bad), Err(FormatError::Schema(_))));
        let asym = r#"{"points":["0","a"],"base":0,"dist":[[0,1],[2,0]]}"#;
        assert!(matches!(parse_space(asym), Err(FormatError::Domain(Error::Asymmetric { .. }))));
        assert!(matches!(parse_space("{"), Err(FormatError::Json(_))));
    }

    #[test]
    fn measure_by_name_or_index() {
        let m = gen_ejenega(2).unwrap();
        let mu = parse_measure(&m, r#"{"coeffs": {"z": "1/2", "1": 1, "@2": -1, "0": 4}}"#).unwrap();
        assert_eq!(mu.len(), 3);
        assert_eq!(measure_value(&mu), json!({"coeffs": {"1": "1", "2": "-1", "3": "1/2"}}));
        assert!(parse_measure(&m, r#"{"coeffs": {"q": 1}}"#).is_err());
    }
}
