//! Exhaustive evaluators memoized on subsets of the support.
//!
//! Both recursions are evaluated for every subset `S` of the support in
//! increasing bitmask order, so every proper subset (and every tail
//! `S ∩ (m, ∞)`) is already known when `S` is reached. The only
//! self-referential family, the single block `S` itself, contributes
//! `½‖S‖ ≤ ‖S‖` and is skipped.

use num_traits::Signed;

use super::Magnitude;
use crate::error::{Error, Result};
use crate::seqvec::{FinVec, Rat};

pub const DEFAULT_BRUTE_CAP: usize = 12;

fn check_cap(x: &FinVec, cap: usize) -> Result<()> {
    let size = x.support_len();
    if size > cap || size > 24 {
        return Err(Error::SupportTooLarge { size, cap });
    }
    Ok(())
}

fn split_support(x: &FinVec) -> (Vec<u64>, Vec<Rat>) {
    x.iter().map(|(j, v)| (j, v.abs())).unzip()
}

/// Shared tables: `val[S]` and `fam[S][b]`, the best total over families of
/// at most `b` blocks drawn from `S` under the variant's ordering rule.
struct Subsets<S> {
    val: Vec<S>,
    fam: Vec<Vec<S>>,
}

impl<S: Magnitude> Subsets<S> {
    fn new(k: usize) -> Self {
        let size = 1usize << k;
        Subsets {
            val: vec![S::zero(); size],
            fam: vec![Vec::new(); size],
        }
    }

    fn fam(&self, mask: usize, b: usize) -> S {
        if mask == 0 || b == 0 {
            return S::zero();
        }
        let row = &self.fam[mask];
        row[b.min(row.len()) - 1].clone()
    }
}

fn sup_of<S: Magnitude>(mask: usize, mags: &[S]) -> S {
    let mut best = S::zero();
    let mut m = mask;
    while m != 0 {
        let p = m.trailing_zeros() as usize;
        if mags[p] > best {
            best = mags[p].clone();
        }
        m &= m - 1;
    }
    best
}

/// Mask of the positions of `mask` whose index is ≥ `threshold`.
fn tail_mask(mask: usize, indices: &[u64], threshold: u64) -> usize {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let p = m.trailing_zeros() as usize;
        if indices[p] >= threshold {
            out |= 1 << p;
        }
        m &= m - 1;
    }
    out
}

/// `‖x‖_T` over all admissible families of arbitrary finite subsets.
pub fn tsirelson_norm_bruteforce(x: &FinVec) -> Result<Rat> {
    tsirelson_norm_bruteforce_with_cap(x, DEFAULT_BRUTE_CAP)
}

pub fn tsirelson_norm_bruteforce_with_cap(x: &FinVec, cap: usize) -> Result<Rat> {
    check_cap(x, cap)?;
    let (indices, mags) = split_support(x);
    Ok(tsirelson_subsets(&indices, &mags))
}

pub(crate) fn tsirelson_subsets<S: Magnitude>(indices: &[u64], mags: &[S]) -> S {
    let k = indices.len();
    if k == 0 {
        return S::zero();
    }
    let mut t: Subsets<S> = Subsets::new(k);
    let full = (1usize << k) - 1;

    for mask in 1..=full {
        let size = mask.count_ones() as usize;
        let low = mask.trailing_zeros() as usize;
        let without_low = mask & !(1 << low);

        // Families A_1 < A_2 < … inside `mask`, A_1 ≠ mask: either the lowest
        // element is unused, or A_1 contains it and the rest lies above max A_1.
        let mut excl: Vec<S> = (1..=size).map(|b| t.fam(without_low, b)).collect();
        let mut sub = without_low;
        loop {
            let a1 = sub | (1 << low);
            if a1 != mask {
                let top = usize::BITS - 1 - a1.leading_zeros();
                let rest = mask & !((1usize << (top + 1)) - 1);
                let head = t.val[a1].clone();
                for b in 1..=size {
                    let cand = head.clone() + t.fam(rest, b - 1);
                    if cand > excl[b - 1] {
                        excl[b - 1] = cand;
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & without_low;
        }

        let mut best = sup_of(mask, mags);
        let max_index = indices[usize::BITS as usize - 1 - mask.leading_zeros() as usize];
        for n in 1..max_index {
            let tail = tail_mask(mask, indices, n + 1);
            if tail == 0 {
                break;
            }
            let tail_size = tail.count_ones() as usize;
            let budget = usize::try_from(n).map_or(tail_size, |n| n.min(tail_size));
            let sum = if tail == mask {
                excl[budget - 1].clone()
            } else {
                t.fam(tail, budget)
            };
            let cand = sum.half();
            if cand > best {
                best = cand;
            }
        }

        t.val[mask] = best.clone();
        t.fam[mask] = excl
            .into_iter()
            .map(|e| if best > e { best.clone() } else { e })
            .collect();
    }
    t.val[full].clone()
}

/// `‖x‖_𝒯`: blocks are disjoint arbitrary subsets of `[n, ∞)`, at most
/// `(n+1)^n` of them.
pub fn modified_norm(x: &FinVec) -> Result<Rat> {
    modified_norm_with_cap(x, DEFAULT_BRUTE_CAP)
}

pub fn modified_norm_with_cap(x: &FinVec, cap: usize) -> Result<Rat> {
    check_cap(x, cap)?;
    let (indices, mags) = split_support(x);
    Ok(modified_subsets(&indices, &mags))
}

/// `‖abs_square(x)‖_𝒯`, the squared `𝒯⁽²⁾` norm.
pub fn modified_t2_norm_sq(x: &FinVec) -> Result<Rat> {
    modified_norm(&x.abs_square())
}

/// `min((n+1)^n, limit)` without overflow.
fn block_budget(n: u64, limit: usize) -> usize {
    let base = n.saturating_add(1);
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(base as u128);
        if acc >= limit as u128 {
            return limit;
        }
    }
    (acc as usize).min(limit)
}

pub(crate) fn modified_subsets<S: Magnitude>(indices: &[u64], mags: &[S]) -> S {
    let k = indices.len();
    if k == 0 {
        return S::zero();
    }
    let mut t: Subsets<S> = Subsets::new(k);
    let full = (1usize << k) - 1;

    for mask in 1..=full {
        let size = mask.count_ones() as usize;
        let low = mask.trailing_zeros() as usize;
        let without_low = mask & !(1 << low);

        // Collections of disjoint blocks inside `mask`, excluding {mask}:
        // the lowest element is unused, or it lies in a block B.
        let mut excl: Vec<S> = (1..=size).map(|b| t.fam(without_low, b)).collect();
        let mut sub = without_low;
        loop {
            let block = sub | (1 << low);
            if block != mask {
                let rest = mask & !block;
                let head = t.val[block].clone();
                for b in 1..=size {
                    let cand = head.clone() + t.fam(rest, b - 1);
                    if cand > excl[b - 1] {
                        excl[b - 1] = cand;
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & without_low;
        }

        let mut best = sup_of(mask, mags);
        let max_index = indices[usize::BITS as usize - 1 - mask.leading_zeros() as usize];
        for n in 1..=max_index {
            let tail = tail_mask(mask, indices, n);
            if tail == 0 {
                break;
            }
            let budget = block_budget(n, tail.count_ones() as usize);
            let sum = if tail == mask {
                excl[budget - 1].clone()
            } else {
                t.fam(tail, budget)
            };
            let cand = sum.half();
            if cand > best {
                best = cand;
            }
        }

        t.val[mask] = best.clone();
        t.fam[mask] = excl
            .into_iter()
            .map(|e| if best > e { best.clone() } else { e })
            .collect();
    }
    t.val[full].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqvec::rat;

    fn v(entries: &[(u64, i64, i64)]) -> FinVec {
        FinVec::from_ratios(entries)
    }

    #[test]
    fn brute_documented_values() {
        assert_eq!(tsirelson_norm_bruteforce(&v(&[(3, 1, 1), (4, 1, 1)])).unwrap(), rat(1, 1));
        assert_eq!(tsirelson_norm_bruteforce(&FinVec::unit(1)).unwrap(), rat(1, 1));
        assert_eq!(
            tsirelson_norm_bruteforce(&v(&[(3, 1, 1), (4, 1, 1), (5, 1, 1), (6, 1, 1)])).unwrap(),
            rat(3, 2)
        );
        assert_eq!(
            tsirelson_norm_bruteforce(&v(&[(1, 1, 1), (2, 1, 1), (3, 1, 1), (4, 1, 1)])).unwrap(),
            rat(1, 1)
        );
    }

    #[test]
    fn brute_cap() {
        let x = FinVec::from_dense(&vec![rat(1, 1); 13]);
        assert!(matches!(
            tsirelson_norm_bruteforce(&x),
            Err(Error::SupportTooLarge { size: 13, cap: 12 })
        ));
        assert!(matches!(modified_norm(&x), Err(Error::SupportTooLarge { .. })));
        assert!(tsirelson_norm_bruteforce_with_cap(&x, 13).is_ok());
    }

    #[test]
    fn modified_documented_values() {
        for j in [1, 2, 7, 40] {
            assert_eq!(modified_norm(&FinVec::unit(j)).unwrap(), rat(1, 1));
        }
        assert_eq!(modified_norm(&v(&[(1, 1, 1), (2, 1, 1)])).unwrap(), rat(1, 1));
        assert_eq!(modified_norm(&v(&[(1, 1, 1), (2, 1, 1), (3, 1, 1)])).unwrap(), rat(1, 1));
        assert_eq!(modified_t2_norm_sq(&FinVec::unit(3)).unwrap(), rat(1, 1));
        assert_eq!(modified_t2_norm_sq(&v(&[(1, 1, 1), (2, -1, 1)])).unwrap(), rat(1, 1));
        assert_eq!(modified_t2_norm_sq(&v(&[(1, 1, 2)])).unwrap(), rat(1, 4));
    }

    #[test]
    fn modified_dominates_tsirelson() {
        // n + 1 ≤ min A_1 and n blocks is a special case of the modified rule.
        let cases = [
            v(&[(3, 1, 1), (4, 1, 1), (5, 1, 1), (6, 1, 1)]),
            v(&[(1, 2, 1), (2, 1, 1), (5, -1, 1), (6, 1, 2), (9, 1, 1)]),
            v(&[(2, 1, 1), (3, 1, 1), (4, 1, 1), (5, 1, 1), (6, 1, 1), (7, 1, 1), (8, 1, 1)]),
        ];
        for x in cases {
            let t = tsirelson_norm_bruteforce(&x).unwrap();
            let m = modified_norm(&x).unwrap();
            assert!(t <= m, "{x}: T = {t}, mod = {m}");
            assert!(m <= x.l1_norm());
        }
    }

    #[test]
    fn budget_saturates() {
        assert_eq!(block_budget(1, 12), 2);
        assert_eq!(block_budget(2, 12), 9);
        assert_eq!(block_budget(3, 12), 12);
        assert_eq!(block_budget(1_000_000, 5), 5);
    }
}
