//! Iterated logarithms, the Ackermann-type hierarchy
//! `g_0(n) = n + 1`, `g_{i+1}(n) = g_i^{(n)}(n)`, its two inverses, and the
//! recursive Euclidean-distortion bound
//!
//! ```text
//! Δ(n) ≤ min(√n, 4D²Δ(4K ln(n+1))²).
//! ```

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrowthResult {
    Exact(BigUint),
    ExceedsCap(BigUint),
}

impl GrowthResult {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            GrowthResult::Exact(v) => Some(v),
            GrowthResult::ExceedsCap(_) => None,
        }
    }
}

impl fmt::Display for GrowthResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthResult::Exact(v) => write!(f, "{v}"),
            GrowthResult::ExceedsCap(_) => f.write_str("EXCEEDS_CAP"),
        }
    }
}

/// `exp^height(base)`: towers too tall for a float, kept symbolically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tower {
    pub height: u32,
    pub base: f64,
}

impl Tower {
    /// `a_i` with `a_1 = 1`, `a_{i+1} = e^{a_i}`.
    pub fn a(i: u32) -> Tower {
        Tower { height: i.saturating_sub(1), base: 1.0 }
    }

    fn exceeds_one(&self) -> bool {
        match self.height {
            0 => self.base > 1.0,
            1 => self.base > 0.0,
            _ => true,
        }
    }
}

/// Number of natural logarithms needed to bring `x` down to at most 1.
pub fn log_star(x: f64) -> Result<u32> {
    if !(x >= 1.0) {
        return Err(Error::DomainError(format!("log* needs x >= 1, got {x}")));
    }
    Ok(log_star_tower(Tower { height: 0, base: x }))
}

pub fn log_star_tower(mut t: Tower) -> u32 {
    let mut count = 0;
    while t.exceeds_one() {
        if t.height > 0 {
            t.height -= 1;
        } else {
            t.base = t.base.ln();
        }
        count += 1;
    }
    count
}

/// `n·2^n`, or `None` above `cap`.
fn times_pow2(n: &BigUint, cap: &BigUint) -> Option<BigUint> {
    let shift = n.to_u64().filter(|&s| s <= cap.bits() + 1)?;
    let v = n << shift;
    (v <= *cap).then_some(v)
}

/// `g_k(n)`, exact while every iterate stays at most `cap`.
pub fn ackermann_g(k: u32, n: &BigUint, cap: &BigUint) -> GrowthResult {
    match g_capped(k, n, cap) {
        Some(v) => GrowthResult::Exact(v),
        None => GrowthResult::ExceedsCap(cap.clone()),
    }
}

fn g_capped(k: u32, n: &BigUint, cap: &BigUint) -> Option<BigUint> {
    if n > cap {
        return None;
    }
    let v = match k {
        0 => n + 1u32,
        1 => n << 1u32,
        2 => return times_pow2(n, cap),
        _ => {
            // Iterates increase strictly, so the loop ends within n steps or on the cap.
            let mut x = n.clone();
            let mut steps = BigUint::zero();
            while steps < *n {
                x = g_capped(k - 1, &x, cap)?;
                steps += 1u32;
            }
            x
        }
    };
    (v <= *cap).then_some(v)
}

/// `min{k ≥ 0 : g_k(2) ≥ n}`, never materializing a value above `n`.
pub fn alpha(n: &BigUint) -> u32 {
    let two = BigUint::from(2u32);
    let cap = n.max(&two).clone();
    (0..)
        .find(|&k| g_capped(k, &two, &cap).is_none_or(|v| v >= *n))
        .expect("g_k(2) is unbounded in k")
}

/// The `k` with `g_k(k) < n ≤ g_{k+1}(k+1)`.
pub fn alpha_diag(n: &BigUint) -> Result<u32> {
    if *n <= BigUint::one() {
        return Err(Error::DomainError(format!("alpha_diag needs n >= 2, got {n}")));
    }
    Ok((0..)
        .find(|&k: &u32| g_capped(k + 1, &BigUint::from(k + 1), n).is_none_or(|v| v >= *n))
        .expect("g_k(k) is unbounded in k"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBoundQuery {
    pub n: f64,
    pub k: f64,
    pub d: f64,
}

impl DeltaBoundQuery {
    pub fn new(n: f64, k: f64, d: f64) -> Result<Self> {
        if !(n >= 1.0) || !(k > 0.0) || !(d >= 1.0) || !n.is_finite() || !k.is_finite() || !d.is_finite() {
            return Err(Error::DomainError(format!("need n >= 1, K > 0, D >= 1; got n={n}, K={k}, D={d}")));
        }
        Ok(DeltaBoundQuery { n, k, d })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaBound {
    pub value: f64,
    /// Arguments visited, starting at `n`.
    pub chain: Vec<f64>,
    /// Why the chain stopped: `"base"` (4K ln(t+1) ≥ t), `"fixed-point"` (the
    /// argument stopped moving) or `"unit"` (t ≤ 1).
    pub stop: &'static str,
}

const STALL: f64 = 1e-12;

/// Upper bound on `Δ(n)` from the recursion, with John's `√t` at the bottom.
///
/// For `K` large enough the map `t ↦ 4K ln(t+1)` has a fixed point above the
/// base region and the chain only converges to it; evaluation stops once the
/// argument moves by less than a relative `1e-12`. Any stopping point gives a
/// valid bound because each level also takes the minimum with `√t`.
pub fn delta_bound(q: &DeltaBoundQuery) -> DeltaBound {
    let mut chain = vec![q.n];
    let mut t = q.n;
    let stop = loop {
        if t <= 1.0 {
            break "unit";
        }
        let next = 4.0 * q.k * (t + 1.0).ln();
        if next >= t {
            break "base";
        }
        if (t - next) / t <= STALL {
            break "fixed-point";
        }
        chain.push(next);
        t = next;
    };
    // Below dimension 1 only the zero space remains, whose distortion is 1.
    let base = |t: f64| if t < 1.0 { 1.0 } else { t.sqrt() };
    let mut value = base(t);
    for &s in chain.iter().rev().skip(1) {
        value = base(s).min(4.0 * q.d * q.d * value * value);
    }
    DeltaBound { value, chain, stop }
}

/// Smallest `c ≥ 0` with `2^{2^{c·log*(n)}} ≥ Δ̂(n)` on every grid point.
pub fn fit_log_star_constant(grid: &[f64], k: f64, d: f64) -> Result<f64> {
    let mut c: f64 = 0.0;
    for &n in grid {
        let q = DeltaBoundQuery::new(n, k, d)?;
        let v = delta_bound(&q).value;
        let ls = log_star(n)?;
        if ls == 0 || v <= 2.0 {
            continue;
        }
        c = c.max(v.log2().log2() / f64::from(ls));
    }
    Ok(c)
}
