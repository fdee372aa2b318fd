use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::seqvec::{parse_rat, two, FinVec, Rat};

/// One unfolding of the norm recursion.
///
/// A `Split` with parameter `n` has at most `n` parts on successive
/// intervals `n < [lo_1, hi_1] < [lo_2, hi_2] < …`; its value is half the
/// sum of the children's values. A `Leaf(j)` evaluates to `|x_j|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertNode {
    Leaf(u64),
    Split { n: u64, parts: Vec<Part> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub lo: u64,
    pub hi: u64,
    pub child: CertNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormCertificate {
    /// Claimed value of the tree on the vector it was produced for.
    pub value: Rat,
    pub root: CertNode,
}

/// Checks every structural invariant of the tree.
pub fn validate_structure(cert: &NormCertificate) -> Result<()> {
    check_node(&cert.root, 1, u64::MAX)
}

fn check_node(node: &CertNode, lo: u64, hi: u64) -> Result<()> {
    match node {
        CertNode::Leaf(j) => {
            if *j == 0 {
                return Err(Error::MalformedCertificate("leaf index 0".into()));
            }
            if *j < lo || *j > hi {
                return Err(Error::MalformedCertificate(format!(
                    "leaf {j} outside ancestor interval [{lo}, {hi}]"
                )));
            }
            Ok(())
        }
        CertNode::Split { n, parts } => {
            if *n == 0 {
                return Err(Error::MalformedCertificate("split with n = 0".into()));
            }
            if parts.is_empty() {
                return Err(Error::MalformedCertificate("split without parts".into()));
            }
            if parts.len() as u64 > *n {
                return Err(Error::MalformedCertificate(format!(
                    "{} parts exceed the budget n = {n}",
                    parts.len()
                )));
            }
            if parts[0].lo <= *n {
                return Err(Error::MalformedCertificate(format!(
                    "min A_1 = {} does not exceed n = {n}",
                    parts[0].lo
                )));
            }
            for (i, part) in parts.iter().enumerate() {
                if part.lo > part.hi {
                    return Err(Error::MalformedCertificate(format!(
                        "empty interval [{}, {}]",
                        part.lo, part.hi
                    )));
                }
                if i > 0 && parts[i - 1].hi >= part.lo {
                    return Err(Error::MalformedCertificate(format!(
                        "intervals [{}, {}] and [{}, {}] are not successive",
                        parts[i - 1].lo,
                        parts[i - 1].hi,
                        part.lo,
                        part.hi
                    )));
                }
                check_node(&part.child, lo.max(part.lo), hi.min(part.hi))?;
            }
            Ok(())
        }
    }
}

fn eval(node: &CertNode, x: &FinVec) -> Rat {
    match node {
        CertNode::Leaf(j) => x.get(*j).abs(),
        CertNode::Split { parts, .. } => {
            let sum: Rat = parts.iter().map(|p| eval(&p.child, x)).sum();
            sum / two()
        }
    }
}

/// Evaluates the tree on `x`.
pub fn certificate_value(cert: &NormCertificate, x: &FinVec) -> Result<Rat> {
    validate_structure(cert)?;
    Ok(eval(&cert.root, x))
}

/// Structural check, claimed value check, and the bound
/// `certificate_value ≤ ‖x‖_T`.
pub fn validate_certificate(cert: &NormCertificate, x: &FinVec) -> Result<bool> {
    let value = certificate_value(cert, x)?;
    if value != cert.value {
        return Ok(false);
    }
    Ok(value <= super::tsirelson_norm(x).value)
}

/// Linearisation `λ_j = 2^{-depth(j)}` with `⟨λ, |x|⟩ = certificate_value`.
pub fn norming_functional(cert: &NormCertificate) -> Result<FinVec> {
    validate_structure(cert)?;
    let mut out = BTreeMap::new();
    collect(&cert.root, Rat::one(), &mut out);
    FinVec::from_entries(out)
}

fn collect(node: &CertNode, weight: Rat, out: &mut BTreeMap<u64, Rat>) {
    match node {
        CertNode::Leaf(j) => {
            *out.entry(*j).or_insert_with(Rat::zero) += weight;
        }
        CertNode::Split { parts, .. } => {
            let half = &weight / two();
            for p in parts {
                collect(&p.child, half.clone(), out);
            }
        }
    }
}

impl CertNode {
    pub fn depth(&self) -> usize {
        match self {
            CertNode::Leaf(_) => 0,
            CertNode::Split { parts, .. } => 1 + parts.iter().map(|p| p.child.depth()).max().unwrap_or(0),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CertNode::Leaf(j) => serde_json::json!({ "leaf": j }),
            CertNode::Split { n, parts } => {
                let parts: Vec<Value> = parts
                    .iter()
                    .map(|p| serde_json::json!({ "lo": p.lo, "hi": p.hi, "child": p.child.to_json() }))
                    .collect();
                serde_json::json!({ "split": { "n": n, "parts": parts } })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<CertNode> {
        let bad = |msg: &str| Error::MalformedCertificate(msg.to_string());
        let obj = v.as_object().ok_or_else(|| bad("node must be an object"))?;
        if let Some(j) = obj.get("leaf") {
            let j = j.as_u64().ok_or_else(|| bad("leaf must be a positive integer"))?;
            return Ok(CertNode::Leaf(j));
        }
        let split = obj.get("split").ok_or_else(|| bad("expected \"leaf\" or \"split\""))?;
        let n = split
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("split.n must be a positive integer"))?;
        let raw_parts = split
            .get("parts")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("split.parts must be a list"))?;
        let mut parts = Vec::with_capacity(raw_parts.len());
        for p in raw_parts {
            let lo = p.get("lo").and_then(Value::as_u64).ok_or_else(|| bad("part.lo"))?;
            let hi = p.get("hi").and_then(Value::as_u64).ok_or_else(|| bad("part.hi"))?;
            let child = CertNode::from_json(p.get("child").ok_or_else(|| bad("part.child"))?)?;
            parts.push(Part { lo, hi, child });
        }
        Ok(CertNode::Split { n, parts })
    }
}

impl Serialize for NormCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("value", &self.value.to_string())?;
        map.serialize_entry("tree", &self.root.to_json())?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for NormCertificate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        let value = v
            .get("value")
            .and_then(Value::as_str)
            .ok_or_else(|| de::Error::custom("certificate.value must be a rational string"))?;
        let value = parse_rat(value).map_err(de::Error::custom)?;
        let tree = v.get("tree").ok_or_else(|| de::Error::custom("certificate.tree missing"))?;
        let root = CertNode::from_json(tree).map_err(de::Error::custom)?;
        Ok(NormCertificate { value, root })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqvec::rat;

    fn split(n: u64, parts: Vec<(u64, u64, CertNode)>) -> CertNode {
        CertNode::Split {
            n,
            parts: parts.into_iter().map(|(lo, hi, child)| Part { lo, hi, child }).collect(),
        }
    }

    fn cert(root: CertNode, value: Rat) -> NormCertificate {
        NormCertificate { value, root }
    }

    #[test]
    fn leaf_value() {
        let c = cert(CertNode::Leaf(3), rat(2, 1));
        let x = FinVec::from_ratios(&[(3, -2, 1)]);
        assert_eq!(certificate_value(&c, &x).unwrap(), rat(2, 1));
        assert!(validate_certificate(&c, &x).unwrap());
    }

    #[test]
    fn split_value() {
        let c = cert(
            split(2, vec![(3, 3, CertNode::Leaf(3)), (4, 4, CertNode::Leaf(4))]),
            rat(1, 1),
        );
        let x = FinVec::from_ratios(&[(3, 1, 1), (4, 1, 1)]);
        assert_eq!(certificate_value(&c, &x).unwrap(), rat(1, 1));
        assert!(validate_certificate(&c, &x).unwrap());
    }

    #[test]
    fn admissibility_violation_is_rejected() {
        let c = cert(
            split(2, vec![(2, 2, CertNode::Leaf(2)), (4, 4, CertNode::Leaf(4))]),
            rat(1, 1),
        );
        let x = FinVec::from_ratios(&[(2, 1, 1), (4, 1, 1)]);
        assert!(matches!(certificate_value(&c, &x), Err(Error::MalformedCertificate(_))));
        assert!(matches!(norming_functional(&c), Err(Error::MalformedCertificate(_))));
    }

    #[test]
    fn other_structural_violations() {
        let overlapping = cert(
            split(3, vec![(4, 5, CertNode::Leaf(4)), (5, 6, CertNode::Leaf(6))]),
            rat(0, 1),
        );
        assert!(validate_structure(&overlapping).is_err());
        let too_many = cert(
            split(2, vec![(3, 3, CertNode::Leaf(3)), (4, 4, CertNode::Leaf(4)), (5, 5, CertNode::Leaf(5))]),
            rat(0, 1),
        );
        assert!(validate_structure(&too_many).is_err());
        let stray_leaf = cert(split(2, vec![(3, 4, CertNode::Leaf(7))]), rat(0, 1));
        assert!(validate_structure(&stray_leaf).is_err());
    }

    #[test]
    fn overclaimed_value_fails_validation() {
        let c = cert(CertNode::Leaf(3), rat(5, 1));
        let x = FinVec::from_ratios(&[(3, 1, 1)]);
        assert!(!validate_certificate(&c, &x).unwrap());
    }

    #[test]
    fn functional_coefficients() {
        let leaf = cert(CertNode::Leaf(5), rat(1, 1));
        assert_eq!(norming_functional(&leaf).unwrap(), FinVec::from_ratios(&[(5, 1, 1)]));

        let one_level = cert(
            split(2, vec![(3, 3, CertNode::Leaf(3)), (4, 4, CertNode::Leaf(4))]),
            rat(1, 1),
        );
        assert_eq!(
            norming_functional(&one_level).unwrap(),
            FinVec::from_ratios(&[(3, 1, 2), (4, 1, 2)])
        );

        let inner = split(3, vec![(4, 4, CertNode::Leaf(4)), (5, 5, CertNode::Leaf(5))]);
        let two_level = cert(split(2, vec![(3, 3, CertNode::Leaf(3)), (4, 9, inner)]), rat(0, 1));
        let lambda = norming_functional(&two_level).unwrap();
        assert_eq!(lambda.get(3), rat(1, 2));
        assert_eq!(lambda.get(4), rat(1, 4));
        assert_eq!(lambda.get(5), rat(1, 4));
    }

    #[test]
    fn json_round_trip() {
        let c = cert(
            split(3, vec![(4, 4, CertNode::Leaf(4)), (5, 6, split(5, vec![(6, 6, CertNode::Leaf(6))]))]),
            rat(3, 4),
        );
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains(r#""split":{"n":3"#));
        let back: NormCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
