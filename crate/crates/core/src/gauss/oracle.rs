use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::seqvec::{rat_to_f64, rational_sqrt, FinVec, Rat};
use crate::tsirelson::{self, DEFAULT_BRUTE_CAP};

/// Exact real of the form `sign · √square`.
///
/// Rationals are the case where `square` is a perfect square. The form is
/// closed under negation, and sums stay exact when the two radicands are
/// commensurable (their quotient is a rational square).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootRat {
    sign: i8,
    square: Rat,
}

impl RootRat {
    pub fn zero() -> Self {
        RootRat { sign: 0, square: Rat::zero() }
    }

    pub fn from_rat(r: Rat) -> Self {
        let sign = match r.cmp(&Rat::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
        RootRat { sign, square: &r * &r }
    }

    /// `√q` for a nonnegative rational `q`.
    pub fn sqrt_of(q: Rat) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::DomainError(format!("square root of negative {q}")));
        }
        let sign = if q.is_zero() { 0 } else { 1 };
        Ok(RootRat { sign, square: q })
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The squared value, always rational.
    pub fn square(&self) -> &Rat {
        &self.square
    }

    pub fn negate(&self) -> Self {
        RootRat { sign: -self.sign, square: self.square.clone() }
    }

    pub fn abs(&self) -> Self {
        RootRat { sign: self.sign.abs(), square: self.square.clone() }
    }

    /// The value as a rational, when it is one.
    pub fn to_rat(&self) -> Option<Rat> {
        let root = rational_sqrt(&self.square)?;
        Some(if self.sign < 0 { -root } else { root })
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * rat_to_f64(&self.square).sqrt()
    }

    /// Exact sum, or `None` when the radicands are incommensurable.
    pub fn checked_add(&self, other: &RootRat) -> Option<RootRat> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        // self = s1 r √q2 with r = √(q1/q2) rational
        let r = rational_sqrt(&(&self.square / &other.square))?;
        let coeff = Rat::from_integer(self.sign.into()) * r + Rat::from_integer(other.sign.into());
        let sign = match coeff.cmp(&Rat::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
        Some(RootRat { sign, square: &coeff * &coeff * &other.square })
    }
}

impl std::fmt::Display for RootRat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_rat() {
            Some(r) => write!(f, "{r}"),
            None if self.sign < 0 => write!(f, "-sqrt({})", self.square),
            None => write!(f, "sqrt({})", self.square),
        }
    }
}

/// Which norm a coordinate span carries. Coordinate `i` of a span vector is
/// the sequence index `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    /// `ℓ_p`, with `f64::INFINITY` for the sup norm.
    Lp(f64),
    Tsirelson,
    T2,
    Mod2,
    /// `max_k |⟨f_k, x⟩|` for a symmetric, spanning functional list.
    Polytope(Vec<Vec<Rat>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceOracle {
    pub dim: usize,
    pub kind: NormKind,
}

impl SpaceOracle {
    pub fn new(dim: usize, kind: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DomainError("dimension must be positive".into()));
        }
        match &kind {
            NormKind::Lp(p) if !(*p >= 1.0) => {
                return Err(Error::DomainError(format!("l_p needs p >= 1, got {p}")));
            }
            NormKind::Mod2 if dim > DEFAULT_BRUTE_CAP => {
                return Err(Error::SupportTooLarge { size: dim, cap: DEFAULT_BRUTE_CAP });
            }
            NormKind::Polytope(fs) => {
                if fs.is_empty() {
                    return Err(Error::DomainError("polytope needs at least one functional".into()));
                }
                for f in fs {
                    if f.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: f.len() });
                    }
                }
            }
            _ => {}
        }
        Ok(SpaceOracle { dim, kind })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, NormKind::Lp(p))
    }

    pub fn euclidean(dim: usize) -> Self {
        SpaceOracle { dim, kind: NormKind::Lp(2.0) }
    }

    /// Parses `l1`, `l2`, `linf`, `l<p>`, `lp:<p>`, `T`, `T2`, `mod2`
    /// (polytopes need their functionals and are built with [`SpaceOracle::new`]).
    pub fn parse_tag(tag: &str, dim: usize) -> Result<Self> {
        let kind = match tag {
            "T" | "t" | "tsirelson" | "tsirelson_span" => NormKind::Tsirelson,
            "T2" | "t2" | "t2_span" => NormKind::T2,
            "mod2" | "mod2_span" => NormKind::Mod2,
            "linf" | "l_inf" => NormKind::Lp(f64::INFINITY),
            other => {
                let p = other
                    .strip_prefix("lp:")
                    .or_else(|| other.strip_prefix('l'))
                    .ok_or_else(|| Error::Parse(format!("unknown space tag {tag:?}")))?;
                let p: f64 = p.parse().map_err(|_| Error::Parse(format!("unknown space tag {tag:?}")))?;
                NormKind::Lp(p)
            }
        };
        Self::new(dim, kind)
    }

    pub fn tag(&self) -> String {
        match &self.kind {
            NormKind::Lp(p) if p.is_infinite() => "linf".into(),
            NormKind::Lp(p) => format!("l{p}"),
            NormKind::Tsirelson => "T".into(),
            NormKind::T2 => "T2".into(),
            NormKind::Mod2 => "mod2".into(),
            NormKind::Polytope(_) => "polytope".into(),
        }
    }

    /// `true` when [`SpaceOracle::norm_sq_exact`] can succeed for rational input.
    pub fn is_rational(&self) -> bool {
        match self.kind {
            NormKind::Lp(p) => p == 1.0 || p == 2.0 || p.is_infinite(),
            _ => true,
        }
    }

    pub fn is_hilbert(&self) -> bool {
        matches!(self.kind, NormKind::Lp(p) if p == 2.0)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::Lp(p) => lp_norm(x, *p),
            NormKind::Tsirelson => {
                let (idx, mags) = span_support(x.iter().map(|v| v.abs()));
                tsirelson::tsirelson_norm_f64(&idx, &mags)
            }
            NormKind::T2 => {
                let (idx, mags) = span_support(x.iter().map(|v| v * v));
                tsirelson::tsirelson_norm_f64(&idx, &mags).sqrt()
            }
            NormKind::Mod2 => {
                let (idx, mags) = span_support(x.iter().map(|v| v * v));
                tsirelson::modified_f64(&idx, &mags).sqrt()
            }
            NormKind::Polytope(fs) => fs
                .iter()
                .map(|f| f.iter().zip(x).map(|(a, b)| rat_to_f64(a) * b).sum::<f64>().abs())
                .fold(0.0, f64::max),
        }
    }

    /// Exact `‖x‖²`, or `None` when it is not reachable in exact arithmetic
    /// (non-rational `p`, or surd coordinates where the norm needs sums).
    pub fn norm_sq_exact(&self, x: &[RootRat]) -> Option<Rat> {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::Lp(p) if *p == 2.0 => Some(x.iter().map(|v| v.square().clone()).sum()),
            NormKind::Lp(p) if p.is_infinite() => {
                Some(x.iter().map(|v| v.square().clone()).max().unwrap_or_else(Rat::zero))
            }
            NormKind::Lp(p) if *p == 1.0 => {
                let mut acc = RootRat::zero();
                for v in x {
                    acc = acc.checked_add(&v.abs())?;
                }
                Some(acc.square().clone())
            }
            NormKind::Lp(_) => None,
            NormKind::Tsirelson => {
                let dense: Option<Vec<Rat>> = x.iter().map(RootRat::to_rat).collect();
                let t = tsirelson::tsirelson_norm(&FinVec::from_dense(&dense?)).value;
                Some(&t * &t)
            }
            NormKind::T2 => {
                let squares: Vec<Rat> = x.iter().map(|v| v.square().clone()).collect();
                Some(tsirelson::tsirelson_norm(&FinVec::from_dense(&squares)).value)
            }
            NormKind::Mod2 => {
                let squares: Vec<Rat> = x.iter().map(|v| v.square().clone()).collect();
                tsirelson::modified_norm(&FinVec::from_dense(&squares)).ok()
            }
            NormKind::Polytope(fs) => {
                let dense: Option<Vec<Rat>> = x.iter().map(RootRat::to_rat).collect();
                let dense = dense?;
                let best = fs
                    .iter()
                    .map(|f| f.iter().zip(&dense).map(|(a, b)| a * b).sum::<Rat>().abs())
                    .max()
                    .unwrap_or_else(Rat::zero);
                Some(&best * &best)
            }
        }
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let scale = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale * x.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn span_support(mags: impl Iterator<Item = f64>) -> (Vec<u64>, Vec<f64>) {
    mags.enumerate()
        .filter(|(_, m)| *m != 0.0)
        .map(|(i, m)| (i as u64 + 1, m))
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqvec::rat;

    fn rr(p: i64, q: i64) -> RootRat {
        RootRat::from_rat(rat(p, q))
    }

    #[test]
    fn root_rat_arithmetic() {
        let a = RootRat::sqrt_of(rat(2, 1)).unwrap();
        let b = RootRat::sqrt_of(rat(8, 1)).unwrap();
        let sum = a.checked_add(&b).unwrap();
        assert_eq!(sum.square(), &rat(18, 1));
        assert!(a.checked_add(&RootRat::sqrt_of(rat(3, 1)).unwrap()).is_none());
        assert_eq!(rr(1, 2).checked_add(&rr(-3, 2)).unwrap(), rr(-1, 1));
        assert!(a.checked_add(&a.negate()).unwrap().is_zero());
        assert_eq!(rr(-3, 4).to_rat(), Some(rat(-3, 4)));
        assert_eq!(a.to_rat(), None);
    }

    #[test]
    fn tags() {
        assert_eq!(SpaceOracle::parse_tag("l1", 2).unwrap().kind, NormKind::Lp(1.0));
        assert_eq!(SpaceOracle::parse_tag("lp:3", 2).unwrap().kind, NormKind::Lp(3.0));
        assert_eq!(SpaceOracle::parse_tag("l3", 2).unwrap().kind, NormKind::Lp(3.0));
        assert_eq!(SpaceOracle::parse_tag("T2", 2).unwrap().kind, NormKind::T2);
        assert!(SpaceOracle::parse_tag("l0.5", 2).is_err());
        assert!(SpaceOracle::parse_tag("bogus", 2).is_err());
        assert!(SpaceOracle::parse_tag("mod2", 13).is_err());
    }

    #[test]
    fn exact_and_float_norms_agree() {
        let x = vec![rr(1, 2), rr(-1, 1), rr(0, 1), rr(2, 1)];
        let xf: Vec<f64> = x.iter().map(RootRat::to_f64).collect();
        for tag in ["l1", "l2", "linf", "T", "T2", "mod2"] {
            let o = SpaceOracle::parse_tag(tag, 4).unwrap();
            let exact = rat_to_f64(&o.norm_sq_exact(&x).unwrap());
            let float = o.norm(&xf);
            assert!((exact - float * float).abs() < 1e-12, "{tag}: {exact} vs {float}");
        }
        let o = SpaceOracle::parse_tag("l3", 4).unwrap();
        assert!(o.norm_sq_exact(&x).is_none());
        assert!((o.norm(&xf) - (0.125f64 + 1.0 + 8.0).powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn polytope_norm() {
        // ℓ∞² as a polytope
        let fs = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        let o = SpaceOracle::new(2, NormKind::Polytope(fs)).unwrap();
        assert_eq!(o.norm(&[0.5, -2.0]), 2.0);
        assert_eq!(o.norm_sq_exact(&[rr(1, 2), rr(-2, 1)]), Some(rat(4, 1)));
    }

    #[test]
    fn t2_exact_with_surd_coordinates() {
        let o = SpaceOracle::parse_tag("T2", 4).unwrap();
        let half = RootRat::sqrt_of(rat(1, 2)).unwrap();
        let x = vec![RootRat::zero(), RootRat::zero(), half.clone(), half.negate()];
        // ‖(0,0,1/2,1/2)‖_T = 1/2
        assert_eq!(o.norm_sq_exact(&x), Some(rat(1, 2)));
    }
}
