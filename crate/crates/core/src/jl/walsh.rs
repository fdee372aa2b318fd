//! Walsh expansions `Φ_g(ε) = Σ_A g_A W_A(ε) x_A` over the cube `{−1,1}^m`.
//!
//! Subsets `A ⊆ {1..m}` and sign vectors `ε` are both bitmasks: bit `i` of
//! `ε` set means `ε_{i+1} = −1`, so `W_A(ε) = (−1)^{popcount(A & ε)}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::PointSet;
use crate::error::{Error, Result};

pub const MAX_M: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct WalshEnsemble {
    pub m: usize,
    /// `base[A]` is `x_A`; `2^m` vectors of a common dimension.
    pub base: Vec<Vec<f64>>,
    /// `g[A]`.
    pub g: Vec<f64>,
    pub seed: u64,
}

/// Smallest `m` with `k(k+1)/2 ≤ 2^m`, i.e. `2^{m−1} < k(k+1)/2 ≤ 2^m`.
pub fn padding_m(k: usize) -> usize {
    let target = (k * (k + 1) / 2).max(1);
    let mut m = 0;
    while (1usize << m) < target {
        m += 1;
    }
    m
}

pub fn walsh_sign(a: usize, eps: usize) -> f64 {
    if (a & eps).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_m(m: usize) -> Result<()> {
    if m > MAX_M {
        return Err(Error::MTooLarge { m, cap: MAX_M });
    }
    Ok(())
}

impl WalshEnsemble {
    pub fn new(m: usize, base: Vec<Vec<f64>>, g: Vec<f64>, seed: u64) -> Result<Self> {
        check_m(m)?;
        let size = 1usize << m;
        if base.len() != size {
            return Err(Error::DimensionMismatch { expected: size, got: base.len() });
        }
        if g.len() != size {
            return Err(Error::DimensionMismatch { expected: size, got: g.len() });
        }
        let dim = base.first().map_or(0, Vec::len);
        if let Some(bad) = base.iter().find(|x| x.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
        }
        Ok(WalshEnsemble { m, base, g, seed })
    }

    /// Pads a family in a `k`-dimensional space with zero vectors to `2^m`
    /// members (`m` from [`padding_m`], raised if the family is larger) and
    /// draws `g_A` i.i.d. standard Gaussian from `seed`.
    pub fn from_family(family: &[Vec<f64>], k: usize, seed: u64) -> Result<Self> {
        let mut m = padding_m(k);
        while (1usize << m) < family.len() {
            m += 1;
        }
        Self::padded(m, family, k, seed)
    }

    /// Same, with `m` given; the family must have at most `2^m` members.
    pub fn padded(m: usize, family: &[Vec<f64>], k: usize, seed: u64) -> Result<Self> {
        check_m(m)?;
        if family.len() > 1 << m {
            return Err(Error::DimensionMismatch { expected: 1 << m, got: family.len() });
        }
        let dim = family.first().map_or(k, Vec::len);
        let mut base = family.to_vec();
        base.resize(1 << m, vec![0.0; dim]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = (0..1usize << m).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self::new(m, base, g, seed)
    }

    pub fn dim(&self) -> usize {
        self.base.first().map_or(0, Vec::len)
    }

    /// `Φ_g(ε)` for every `ε`, indexed by its bitmask, by a fast
    /// Walsh–Hadamard transform per coordinate.
    pub fn phi(&self) -> Vec<Vec<f64>> {
        let size = 1usize << self.m;
        let dim = self.dim();
        let mut out = vec![vec![0.0; dim]; size];
        let mut h = vec![0.0; size];
        for c in 0..dim {
            for (a, hv) in h.iter_mut().enumerate() {
                *hv = self.g[a] * self.base[a][c];
            }
            fwht(&mut h);
            for (e, hv) in h.iter().enumerate() {
                out[e][c] = *hv;
            }
        }
        out
    }

    /// `Σ_A g_A² ‖x_A‖²` for a given norm.
    pub fn weighted_sum(&self, norm: impl Fn(&[f64]) -> f64) -> f64 {
        self.base.iter().zip(&self.g).map(|(x, g)| g * g * norm(x).powi(2)).sum()
    }

    /// The ensemble with `g'_A = W_A(ε₀) g_A`.
    pub fn resigned(&self, eps0: usize) -> Self {
        let g = self.g.iter().enumerate().map(|(a, g)| walsh_sign(a, eps0) * g).collect();
        WalshEnsemble { g, ..self.clone() }
    }
}

/// In-place unnormalized transform `h(e) ← Σ_a (−1)^{|a∧e|} h(a)`.
fn fwht(h: &mut [f64]) {
    let mut len = 1;
    while len < h.len() {
        for chunk in h.chunks_mut(2 * len) {
            let (lo, hi) = chunk.split_at_mut(len);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        len *= 2;
    }
}

/// `U_g = {Φ_g(ε)} ∪ {x_A} ∪ {0}`, duplicates removed.
pub fn walsh_pointset(ensemble: &WalshEnsemble) -> PointSet {
    let mut points = ensemble.phi();
    points.extend(ensemble.base.iter().cloned());
    points.push(vec![0.0; ensemble.dim()]);
    let all = PointSet { points, dim: ensemble.dim() };
    let keep = all.distinct();
    PointSet { points: keep.into_iter().map(|i| all.points[i].clone()).collect(), dim: all.dim }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityCheck {
    /// `2^{-m} Σ_ε ‖Σ_A W_A(ε) z_A‖₂²`
    pub lhs: f64,
    /// `Σ_A ‖z_A‖₂²`
    pub rhs: f64,
    /// `|lhs − rhs| / rhs`, or `|lhs|` when `rhs = 0`.
    pub residual: f64,
    pub holds: bool,
}

/// Evaluates both sides by direct character sums (no transform).
pub fn walsh_orthogonality_check(m: usize, z: &[Vec<f64>], tol: f64) -> Result<OrthogonalityCheck> {
    check_m(m)?;
    let size = 1usize << m;
    if z.len() != size {
        return Err(Error::DimensionMismatch { expected: size, got: z.len() });
    }
    let dim = z.first().map_or(0, Vec::len);
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let rhs: f64 = z.iter().map(|v| sq(v)).sum();
    let mut total = 0.0;
    let mut acc = vec![0.0; dim];
    for e in 0..size {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for (a, za) in z.iter().enumerate() {
            let s = walsh_sign(a, e);
            for (x, y) in acc.iter_mut().zip(za) {
                *x += s * y;
            }
        }
        total += sq(&acc);
    }
    let lhs = total / size as f64;
    let residual = if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { lhs.abs() };
    Ok(OrthogonalityCheck { lhs, rhs, residual, holds: residual <= tol })
}
