//! Finitely supported sequences with exact rational entries.
//!
//! A [`FinVec`] is an element of `c00`: a map from 1-based indices to nonzero
//! rationals. Zero entries are never stored, so the empty map is the zero
//! vector.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let parsed = Rat::from_str(t).map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    Ok(parsed)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float to a rational.
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

/// Strictly increasing list of distinct positive indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(Vec<u64>);

impl IndexSet {
    pub fn new(mut indices: Vec<u64>) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::DomainError("indices are 1-based".into()));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(IndexSet(indices))
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// The integer interval `[lo, hi]`; empty when `lo > hi`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        let lo = lo.max(1);
        if lo > hi {
            return IndexSet::empty();
        }
        IndexSet((lo..=hi).collect())
    }

    pub fn contains(&self, j: u64) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<u64> for IndexSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut v: Vec<u64> = iter.into_iter().filter(|&j| j > 0).collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }
}

/// Finitely supported rational sequence `x = sum x_j e_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FinVec {
    entries: BTreeMap<u64, Rat>,
}

impl FinVec {
    pub fn zero() -> Self {
        FinVec::default()
    }

    /// Builds a vector from `(index, value)` pairs. Zero values are dropped;
    /// repeated indices are summed.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Rat)>,
    {
        let mut map: BTreeMap<u64, Rat> = BTreeMap::new();
        for (j, v) in entries {
            if j == 0 {
                return Err(Error::DomainError("indices are 1-based".into()));
            }
            *map.entry(j).or_insert_with(Rat::zero) += v;
        }
        map.retain(|_, v| !v.is_zero());
        Ok(FinVec { entries: map })
    }

    /// Vector with `values[i]` at index `i + 1`.
    pub fn from_dense(values: &[Rat]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u64 + 1, v.clone()))
            .collect();
        FinVec { entries }
    }

    /// Convenience constructor from integer ratios, e.g. `&[(3, 1, 1), (4, -1, 2)]`.
    pub fn from_ratios(entries: &[(u64, i64, i64)]) -> Self {
        FinVec::from_entries(entries.iter().map(|&(j, p, q)| (j, rat(p, q))))
            .expect("1-based indices")
    }

    pub fn unit(j: u64) -> Self {
        FinVec::from_ratios(&[(j, 1, 1)])
    }

    pub fn get(&self, j: u64) -> Rat {
        self.entries.get(&j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rat)> {
        self.entries.iter().map(|(&j, v)| (j, v))
    }

    pub fn support(&self) -> IndexSet {
        IndexSet(self.entries.keys().copied().collect())
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    pub fn restrict(&self, set: &IndexSet) -> FinVec {
        let entries = self
            .entries
            .iter()
            .filter(|(j, _)| set.contains(**j))
            .map(|(&j, v)| (j, v.clone()))
            .collect();
        FinVec { entries }
    }

    /// Restriction to the integer interval `[lo, hi]`.
    pub fn restrict_range(&self, lo: u64, hi: u64) -> FinVec {
        let entries = self
            .entries
            .range(lo..=hi)
            .map(|(&j, v)| (j, v.clone()))
            .collect();
        FinVec { entries }
    }

    pub fn sup_norm(&self) -> Rat {
        self.entries
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn l1_norm(&self) -> Rat {
        self.entries.values().map(|v| v.abs()).sum()
    }

    pub fn l2_norm_sq(&self) -> Rat {
        self.entries.values().map(|v| v * v).sum()
    }

    pub fn abs(&self) -> FinVec {
        let entries = self.entries.iter().map(|(&j, v)| (j, v.abs())).collect();
        FinVec { entries }
    }

    pub fn abs_square(&self) -> FinVec {
        let entries = self.entries.iter().map(|(&j, v)| (j, v * v)).collect();
        FinVec { entries }
    }

    /// Negates the entries whose index is in `flipped`.
    pub fn flip_signs(&self, flipped: &IndexSet) -> FinVec {
        let entries = self
            .entries
            .iter()
            .map(|(&j, v)| (j, if flipped.contains(j) { -v } else { v.clone() }))
            .collect();
        FinVec { entries }
    }

    pub fn scale(&self, c: &Rat) -> FinVec {
        if c.is_zero() {
            return FinVec::zero();
        }
        let entries = self.entries.iter().map(|(&j, v)| (j, v * c)).collect();
        FinVec { entries }
    }

    pub fn add(&self, other: &FinVec) -> FinVec {
        FinVec::from_entries(
            self.iter()
                .chain(other.iter())
                .map(|(j, v)| (j, v.clone())),
        )
        .expect("indices already validated")
    }

    /// `sum_j self_j * other_j`.
    pub fn dot(&self, other: &FinVec) -> Rat {
        self.iter()
            .map(|(j, v)| v * other.get(j))
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    /// Dense coordinates `x_1 ..= x_len`.
    pub fn to_dense(&self, len: usize) -> Vec<Rat> {
        (1..=len as u64).map(|j| self.get(j)).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.values().all(|v| !v.is_negative())
    }
}

impl fmt::Display for FinVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (j, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{j}:{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct FinVecJson {
    v: BTreeMap<String, String>,
}

impl Serialize for FinVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // Keys are emitted in numeric order.
        use serde::ser::SerializeMap;
        struct Entries<'a>(&'a BTreeMap<u64, Rat>);
        impl Serialize for Entries<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (j, v) in self.0 {
                    map.serialize_entry(&j.to_string(), &v.to_string())?;
                }
                map.end()
            }
        }
        let mut outer = serializer.serialize_map(Some(1))?;
        outer.serialize_entry("v", &Entries(&self.entries))?;
        outer.end()
    }
}

impl<'de> Deserialize<'de> for FinVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FinVecJson::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(raw.v.len());
        for (k, v) in raw.v {
            let j: u64 = k
                .trim()
                .parse()
                .map_err(|_| de::Error::custom(format!("invalid index {k:?}")))?;
            let value = parse_rat(&v).map_err(de::Error::custom)?;
            entries.push((j, value));
        }
        FinVec::from_entries(entries).map_err(de::Error::custom)
    }
}

/// `true` when `r` is the square of a rational; returns the root.
pub fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rat::new(rn, rd))
    } else {
        None
    }
}

/// `serialize_with` helper: a rational as its `"p/q"` string.
pub fn ser_rat<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn two() -> Rat {
    Rat::one() + Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(entries: &[(u64, i64, i64)]) -> FinVec {
        FinVec::from_ratios(entries)
    }

    #[test]
    fn restrict_examples() {
        let x = v(&[(1, 1, 1), (2, 1, 1)]);
        assert_eq!(x.restrict(&IndexSet::new(vec![2]).unwrap()), v(&[(2, 1, 1)]));
        let y = v(&[(3, 1, 2)]);
        assert!(y.restrict(&IndexSet::empty()).is_zero());
        let z = v(&[(1, 1, 1), (4, -2, 1), (7, 3, 1)]);
        assert_eq!(
            z.restrict(&IndexSet::new(vec![4, 7, 9]).unwrap()),
            v(&[(4, -2, 1), (7, 3, 1)])
        );
    }

    #[test]
    fn elementary_norms() {
        let x = v(&[(3, 1, 1), (4, 1, 1)]);
        assert_eq!(x.sup_norm(), rat(1, 1));
        assert_eq!(x.l1_norm(), rat(2, 1));
        assert_eq!(x.l2_norm_sq(), rat(2, 1));

        let zero = FinVec::zero();
        assert_eq!(zero.sup_norm(), Rat::zero());
        assert_eq!(zero.l1_norm(), Rat::zero());
        assert_eq!(zero.l2_norm_sq(), Rat::zero());

        let w = v(&[(1, -3, 2), (5, 1, 1)]);
        assert_eq!(w.sup_norm(), rat(3, 2));
        assert_eq!(w.l1_norm(), rat(5, 2));
        assert_eq!(w.l2_norm_sq(), rat(13, 4));
    }

    #[test]
    fn abs_square_examples() {
        assert_eq!(v(&[(3, 1, 1), (4, -1, 1)]).abs_square(), v(&[(3, 1, 1), (4, 1, 1)]));
        assert!(FinVec::zero().abs_square().is_zero());
        assert_eq!(v(&[(2, 1, 2)]).abs_square(), v(&[(2, 1, 4)]));
    }

    #[test]
    fn zero_entries_are_not_stored() {
        let x = FinVec::from_entries(vec![(2, rat(0, 1)), (3, rat(1, 1)), (3, rat(-1, 1))]).unwrap();
        assert!(x.is_zero());
        assert!(FinVec::from_entries(vec![(0, rat(1, 1))]).is_err());
    }

    #[test]
    fn json_form() {
        let x = v(&[(3, 1, 1), (10, -2, 3)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"v":{"3":"1","10":"-2/3"}}"#);
        let back: FinVec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<FinVec>(r#"{"v":{"0":"1"}}"#).is_err());
        assert!(serde_json::from_str::<FinVec>(r#"{"v":{"2":"1/0"}}"#).is_err());
    }

    #[test]
    fn rational_sqrt_detects_squares() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(1, 2)), None);
        assert_eq!(rational_sqrt(&rat(0, 1)), Some(rat(0, 1)));
    }

    fn arb_vec() -> impl Strategy<Value = FinVec> {
        proptest::collection::vec((1u64..20, -6i64..=6, 1i64..=4), 0..8)
            .prop_map(|e| FinVec::from_entries(e.into_iter().map(|(j, p, q)| (j, rat(p, q)))).unwrap())
    }

    proptest! {
        #[test]
        fn sup_le_l1_with_equality_iff_small_support(x in arb_vec()) {
            prop_assert!(x.sup_norm() <= x.l1_norm());
            prop_assert_eq!(x.sup_norm() == x.l1_norm(), x.support_len() <= 1);
        }

        #[test]
        fn restrict_idempotent_and_monotone(x in arb_vec(), set in proptest::collection::vec(1u64..20, 0..10)) {
            let a: IndexSet = set.into_iter().collect();
            let once = x.restrict(&a);
            prop_assert_eq!(once.restrict(&a), once.clone());
            prop_assert!(once.support().as_slice().iter().all(|j| a.contains(*j)));
        }

        #[test]
        fn abs_square_ignores_signs(x in arb_vec(), flips in proptest::collection::vec(1u64..20, 0..10)) {
            let sigma: IndexSet = flips.into_iter().collect();
            prop_assert_eq!(x.abs_square(), x.flip_signs(&sigma).abs_square());
        }
    }
}
