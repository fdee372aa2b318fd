//! Exact evaluation of the Tsirelson norm `‖·‖_T`, its 2-convexification
//! `T⁽²⁾`, and Johnson's modified norm `‖·‖_𝒯` with its convexification.
//!
//! `‖x‖_T` is the fixed point of
//!
//! ```text
//! ‖x‖ = max( ‖x‖_∞ , ½ sup Σ_{i≤n} ‖P_{A_i} x‖ )   over  n < A_1 < … < A_n,
//! ```
//!
//! computed here by an interval dynamic program ([`tsirelson_norm`]) and
//! independently by exhaustive search over all admissible subset families
//! ([`tsirelson_norm_bruteforce`]). Every DP result carries a
//! [`NormCertificate`]: the admissible tree realising the value.

mod brute;
mod cert;
mod dp;

use std::ops::Add;

use num_traits::Zero;

use crate::error::Result;
use crate::seqvec::{FinVec, Rat};

pub use brute::{
    modified_norm, modified_norm_with_cap, modified_t2_norm_sq, tsirelson_norm_bruteforce,
    tsirelson_norm_bruteforce_with_cap, DEFAULT_BRUTE_CAP,
};
pub use cert::{certificate_value, norming_functional, validate_certificate, validate_structure, CertNode, NormCertificate, Part};
pub use dp::DpStats;

/// Scalar type the norm engines work over: exact rationals or floats.
pub trait Magnitude: Clone + PartialOrd + Zero + Add<Output = Self> {
    fn half(&self) -> Self;
}

impl Magnitude for Rat {
    fn half(&self) -> Self {
        self / crate::seqvec::two()
    }
}

impl Magnitude for f64 {
    fn half(&self) -> Self {
        self * 0.5
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormResult {
    pub value: Rat,
    pub certificate: NormCertificate,
    pub stats: DpStats,
}

/// `‖x‖_T` with a certificate tree.
pub fn tsirelson_norm(x: &FinVec) -> NormResult {
    let (indices, mags): (Vec<u64>, Vec<Rat>) = x.iter().map(|(j, v)| (j, num_traits::Signed::abs(v))).unzip();
    let solved = dp::solve(&indices, &mags, true);
    let root = solved.tree.expect("tree requested");
    NormResult {
        certificate: NormCertificate {
            value: solved.value.clone(),
            root,
        },
        value: solved.value,
        stats: solved.stats,
    }
}

/// `‖x‖_T` for a nonnegative float sequence given as `(index, |x_j|)` pairs
/// with strictly increasing indices.
pub fn tsirelson_norm_f64(indices: &[u64], mags: &[f64]) -> f64 {
    dp::solve(indices, mags, false).value
}

/// `‖x‖_𝒯` for a nonnegative float sequence, by exhaustive search; the caller
/// keeps the support within [`DEFAULT_BRUTE_CAP`].
pub fn modified_f64(indices: &[u64], mags: &[f64]) -> f64 {
    brute::modified_subsets(indices, mags)
}

/// `‖x‖²_{T⁽²⁾} = ‖(x_j²)‖_T`, exact.
pub fn t2_norm_sq(x: &FinVec) -> NormResult {
    tsirelson_norm(&x.abs_square())
}

/// `‖x‖_{T⁽²⁾}` as a float: the correctly rounded square root of the
/// float nearest to the exact squared norm, so within about one ulp.
pub fn t2_norm(x: &FinVec) -> f64 {
    crate::seqvec::rat_to_f64(&t2_norm_sq(x).value).sqrt()
}

/// Evaluates a norm on a space selected by name; used by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    T,
    T2,
    Modified,
    Modified2,
}

impl Space {
    pub fn parse(s: &str) -> Option<Space> {
        match s {
            "T" | "t" => Some(Space::T),
            "T2" | "t2" => Some(Space::T2),
            "mod" => Some(Space::Modified),
            "mod2" => Some(Space::Modified2),
            _ => None,
        }
    }
}

/// Exact value of the requested norm (squared for the 2-convexified spaces).
pub fn exact_value(space: Space, x: &FinVec, brute: bool) -> Result<Rat> {
    match (space, brute) {
        (Space::T, false) => Ok(tsirelson_norm(x).value),
        (Space::T, true) => tsirelson_norm_bruteforce(x),
        (Space::T2, false) => Ok(t2_norm_sq(x).value),
        (Space::T2, true) => tsirelson_norm_bruteforce(&x.abs_square()),
        (Space::Modified, _) => modified_norm(x),
        (Space::Modified2, _) => modified_t2_norm_sq(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqvec::{rat, IndexSet};
    use proptest::prelude::*;

    fn v(entries: &[(u64, i64, i64)]) -> FinVec {
        FinVec::from_ratios(entries)
    }

    #[test]
    fn documented_values() {
        assert_eq!(tsirelson_norm(&FinVec::unit(5)).value, rat(1, 1));

        let r = tsirelson_norm(&v(&[(3, 1, 1), (4, 1, 1)]));
        assert_eq!(r.value, rat(1, 1));
        match &r.certificate.root {
            CertNode::Split { n, parts } => {
                assert_eq!(*n, 2);
                assert_eq!(parts.len(), 2);
                assert_eq!((parts[0].lo, parts[0].hi), (3, 3));
                assert_eq!((parts[1].lo, parts[1].hi), (4, 4));
            }
            other => panic!("expected a split, got {other:?}"),
        }

        let r = tsirelson_norm(&v(&[(3, 1, 1), (4, 1, 1), (5, 1, 1), (6, 1, 1)]));
        assert_eq!(r.value, rat(3, 2));
        match &r.certificate.root {
            CertNode::Split { n, parts } => {
                assert_eq!(*n, 3);
                let singles: Vec<_> = parts.iter().map(|p| (p.lo, p.hi)).collect();
                assert_eq!(singles, vec![(4, 4), (5, 5), (6, 6)]);
            }
            other => panic!("expected a split, got {other:?}"),
        }

        assert_eq!(tsirelson_norm(&v(&[(1, 1, 1), (2, 1, 1), (3, 1, 1), (4, 1, 1)])).value, rat(1, 1));
    }

    #[test]
    fn zero_vector_has_trivial_certificate() {
        let r = tsirelson_norm(&FinVec::zero());
        assert_eq!(r.value, rat(0, 1));
        assert!(validate_certificate(&r.certificate, &FinVec::zero()).unwrap());
    }

    #[test]
    fn t2_values() {
        let r = t2_norm_sq(&v(&[(3, 1, 1), (4, 1, 1)]));
        assert_eq!(r.value, rat(1, 1));
        assert_eq!(t2_norm(&v(&[(3, 1, 1), (4, 1, 1)])), 1.0);
        assert_eq!(t2_norm_sq(&FinVec::unit(7)).value, rat(1, 1));
        assert_eq!(
            t2_norm_sq(&v(&[(3, 1, 1), (4, 1, 1), (5, 1, 1), (6, 1, 1)])).value,
            rat(3, 2)
        );
        assert_eq!(t2_norm_sq(&v(&[(3, 1, 1), (4, -1, 1)])).value, rat(1, 1));
    }

    #[test]
    fn float_engine_matches_exact_on_dyadics() {
        let x = v(&[(2, 1, 2), (3, 1, 1), (4, -2, 1), (6, 1, 4), (7, 1, 1), (9, 3, 2)]);
        let exact = tsirelson_norm(&x).value;
        let (idx, mags): (Vec<u64>, Vec<f64>) =
            x.iter().map(|(j, r)| (j, crate::seqvec::rat_to_f64(r).abs())).unzip();
        assert_eq!(tsirelson_norm_f64(&idx, &mags), crate::seqvec::rat_to_f64(&exact));
    }

    fn arb_vec(max_index: u64, len: usize) -> impl Strategy<Value = FinVec> {
        proptest::collection::vec((1u64..=max_index, -4i64..=4, 1i64..=2), 0..len).prop_map(|e| {
            FinVec::from_entries(e.into_iter().map(|(j, p, q)| (j, rat(p, q)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_between_sup_and_l1(x in arb_vec(14, 10)) {
            let t = tsirelson_norm(&x).value;
            prop_assert!(x.sup_norm() <= t);
            prop_assert!(t <= x.l1_norm());
        }

        #[test]
        fn dp_agrees_with_bruteforce(x in arb_vec(9, 9)) {
            prop_assert_eq!(tsirelson_norm(&x).value, tsirelson_norm_bruteforce(&x).unwrap());
        }

        #[test]
        fn certificates_are_sound(x in arb_vec(12, 10)) {
            let r = tsirelson_norm(&x);
            prop_assert!(validate_certificate(&r.certificate, &x).unwrap());
            prop_assert_eq!(certificate_value(&r.certificate, &x).unwrap(), r.value.clone());
            let lambda = norming_functional(&r.certificate).unwrap();
            prop_assert_eq!(lambda.dot(&x.abs()), r.value);
        }

        #[test]
        fn unconditional(x in arb_vec(12, 9), flips in proptest::collection::vec(1u64..=12, 0..6)) {
            let sigma: IndexSet = flips.into_iter().collect();
            prop_assert_eq!(tsirelson_norm(&x).value, tsirelson_norm(&x.flip_signs(&sigma)).value);
        }

        #[test]
        fn restriction_monotone(x in arb_vec(12, 9), keep in proptest::collection::vec(1u64..=12, 0..8)) {
            let a: IndexSet = keep.into_iter().collect();
            prop_assert!(tsirelson_norm(&x.restrict(&a)).value <= tsirelson_norm(&x).value);
        }

        #[test]
        fn homogeneous_and_subadditive(x in arb_vec(10, 7), y in arb_vec(10, 7), p in -5i64..=5, q in 1i64..=3) {
            let c = rat(p, q);
            let nx = tsirelson_norm(&x).value;
            prop_assert_eq!(tsirelson_norm(&x.scale(&c)).value, num_traits::Signed::abs(&c) * nx.clone());
            let ny = tsirelson_norm(&y).value;
            prop_assert!(tsirelson_norm(&x.add(&y)).value <= nx + ny);
        }
    }
}
