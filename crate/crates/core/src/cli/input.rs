//! Reading vectors, families and point sets from JSON files.
//!
//! Scalars may be JSON numbers, rational strings (`"-2/3"`), exact decimals
//! (`"0.25"`) or square roots of rationals (`"sqrt(1/2)"`, `"-sqrt(3)"`).
//! Vectors are dense JSON lists or the sparse `{"v": {"<index>": "<p>/<q>"}}`
//! form with 1-based indices.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Pow;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gauss::RootRat;
use crate::seqvec::{parse_rat, rat_from_f64, FinVec, Rat};

pub fn read_json(path: &str) -> Result<Value> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Io(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// A rational from a JSON number or a string; floats convert exactly.
pub fn scalar_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(Rat::from_integer(u.into()))
            } else {
                rat_from_f64(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Value::String(s) => text_rat(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn text_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let bad = || Error::Parse(format!("invalid decimal {s:?}"));
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den: BigInt = Pow::pow(BigInt::from(10), frac.len() as u32);
        let r = Rat::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    parse_rat(t)
}

pub fn scalar_root(v: &Value) -> Result<RootRat> {
    if let Value::String(s) = v {
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, t),
        };
        if let Some(inner) = body.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let root = RootRat::sqrt_of(text_rat(inner)?)?;
            return Ok(if neg { root.negate() } else { root });
        }
    }
    scalar_rat(v).map(RootRat::from_rat)
}

/// A sparse vector as `index → entry`.
fn sparse<T>(v: &Value, entry: impl Fn(&Value) -> Result<T>) -> Result<BTreeMap<usize, T>> {
    let mut out = BTreeMap::new();
    match v {
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                out.insert(i + 1, entry(x)?);
            }
        }
        Value::Object(obj) => {
            let map = obj
                .get("v")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse("sparse vectors are {\"v\": {index: value}}".into()))?;
            for (k, x) in map {
                let j: usize = k.trim().parse().map_err(|_| Error::Parse(format!("invalid index {k:?}")))?;
                if j == 0 {
                    return Err(Error::DomainError("indices are 1-based".into()));
                }
                out.insert(j, entry(x)?);
            }
        }
        other => return Err(Error::Parse(format!("expected a vector, got {other}"))),
    }
    Ok(out)
}

pub fn finvec(v: &Value) -> Result<FinVec> {
    let map = sparse(v, scalar_rat)?;
    FinVec::from_entries(map.into_iter().map(|(j, r)| (j as u64, r)))
}

/// A list of vectors, densified to a common dimension: `dim` when given,
/// else the largest length or index present.
pub fn family(v: &Value, dim: Option<usize>) -> Result<Vec<Vec<RootRat>>> {
    let items = v.as_array().ok_or_else(|| Error::Parse("a family is a JSON list of vectors".into()))?;
    let maps: Vec<BTreeMap<usize, RootRat>> = items.iter().map(|x| sparse(x, scalar_root)).collect::<Result<_>>()?;
    let widest = maps.iter().filter_map(|m| m.keys().next_back().copied()).max().unwrap_or(0);
    let d = match dim {
        Some(d) if d < widest => return Err(Error::DimensionMismatch { expected: d, got: widest }),
        Some(d) => d,
        None => widest,
    };
    Ok(maps
        .into_iter()
        .map(|m| (1..=d).map(|j| m.get(&j).cloned().unwrap_or_else(RootRat::zero)).collect())
        .collect())
}

pub fn float_family(v: &Value, dim: Option<usize>) -> Result<Vec<Vec<f64>>> {
    Ok(family(v, dim)?.iter().map(|x| x.iter().map(RootRat::to_f64).collect()).collect())
}

/// Dense point lists must be rectangular; sparse points share the largest index.
pub fn points(v: &Value) -> Result<Vec<Vec<f64>>> {
    let items = v.as_array().ok_or_else(|| Error::Parse("points are a JSON list of vectors".into()))?;
    let dense: Vec<usize> = items.iter().filter_map(|x| x.as_array().map(Vec::len)).collect();
    if let (Some(&first), Some(&bad)) = (dense.first(), dense.iter().find(|&&l| l != dense[0])) {
        return Err(Error::DimensionMismatch { expected: first, got: bad });
    }
    let pts = float_family(v, None)?;
    if pts.is_empty() || pts[0].is_empty() {
        return Err(Error::DomainError("no points given".into()));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqvec::rat;
    use serde_json::json;

    #[test]
    fn scalars() {
        assert_eq!(scalar_rat(&json!(3)).unwrap(), rat(3, 1));
        assert_eq!(scalar_rat(&json!(0.5)).unwrap(), rat(1, 2));
        assert_eq!(scalar_rat(&json!("-2/4")).unwrap(), rat(-1, 2));
        assert_eq!(scalar_rat(&json!("0.1")).unwrap(), rat(1, 10));
        assert_eq!(scalar_rat(&json!("-1.25")).unwrap(), rat(-5, 4));
        assert!(scalar_rat(&json!("1.2.3")).is_err());
        assert!(scalar_rat(&json!(true)).is_err());
        let r = scalar_root(&json!("-sqrt(1/2)")).unwrap();
        assert_eq!(r.square(), &rat(1, 2));
        assert!(r.to_f64() < 0.0);
        assert_eq!(scalar_root(&json!("sqrt(4)")).unwrap().to_rat(), Some(rat(2, 1)));
    }

    #[test]
    fn vectors_dense_and_sparse() {
        let a = finvec(&json!([0, 0, 1, 1])).unwrap();
        let b = finvec(&json!({"v": {"3": "1", "4": "1"}})).unwrap();
        assert_eq!(a, b);
        assert!(finvec(&json!({"v": {"0": "1"}})).is_err());
        let f = family(&json!([[1, 2], {"v": {"3": "1/2"}}]), None).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|x| x.len() == 3));
        assert!(family(&json!([[1, 2, 3]]), Some(2)).is_err());
        assert!(family(&json!([["sqrt(2)"]]), None).unwrap()[0][0].to_rat().is_none());
        assert!(matches!(points(&json!([[1, 2], [3]])), Err(Error::DimensionMismatch { .. })));
        assert_eq!(points(&json!([[1, 2], [3, 4]])).unwrap()[1], vec![3.0, 4.0]);
    }
}
