//! Carathéodory reduction of `A = Σ u_i⊗u_i` to at most `d(d+1)/2` rank-one
//! summands, and the branch-selecting family reduction built on it.
//!
//! With `A = Σ c_i u_i⊗u_i`, `c_1 ≥ c_2 ≥ …`, the families
//! `v_i = √(c_i/c_1) u_i` and `w_i = √(1 − c_i/c_1) u_i` have Gaussian
//! covariances `A/c_1` and `(1 − 1/c_1)A`. Their second moments and their
//! squared-norm sums both add up to those of `u`, so one of the two has a
//! ratio at least as large as the original.

use super::{paired_gaussian_ratios, RatioKind, VectorFamily};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

const SINGULAR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ConeReduction {
    /// `permutation[k]` is the input index of the `k`-th output slot.
    pub permutation: Vec<usize>,
    /// Nonincreasing.
    pub weights: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
}

impl ConeReduction {
    pub fn nonzero_weights(&self) -> usize {
        self.weights.iter().filter(|&&c| c > 0.0).count()
    }

    /// `‖Σ c_k u_k⊗u_k − Σ u_i⊗u_i‖_F / ‖Σ u_i⊗u_i‖_F`.
    pub fn relative_residual(&self, inputs: &[Vec<f64>]) -> f64 {
        let d = inputs.first().map_or(0, Vec::len);
        let a = covariance(inputs.iter().map(|u| (1.0, u.as_slice())), d);
        let b = covariance(
            self.permutation.iter().zip(&self.weights).map(|(&i, &c)| (c, inputs[i].as_slice())),
            d,
        );
        frobenius_diff(&a, &b) / frobenius(&a).max(f64::MIN_POSITIVE)
    }
}

/// `Σ c u⊗u` as a dense `d × d` matrix.
pub fn covariance<'a, I>(terms: I, d: usize) -> Vec<Vec<f64>>
where
    I: IntoIterator<Item = (f64, &'a [f64])>,
{
    let mut out = vec![vec![0.0; d]; d];
    for (c, u) in terms {
        for j in 0..d {
            for k in 0..d {
                out[j][k] += c * u[j] * u[k];
            }
        }
    }
    out
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn frobenius_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Upper triangle of `u⊗u` with off-diagonals scaled by `√2`, so Euclidean
/// distances between vectorizations are Frobenius distances.
fn vectorize(u: &[f64]) -> Vec<f64> {
    let d = u.len();
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for j in 0..d {
        out.push(u[j] * u[j]);
        for k in j + 1..d {
            out.push(std::f64::consts::SQRT_2 * u[j] * u[k]);
        }
    }
    out
}

/// A nonzero `α` with `Σ_j α_j cols[j] = 0`; `cols.len()` exceeds the row count.
fn null_vector(cols: &[Vec<f64>]) -> Vec<f64> {
    let rows = cols[0].len();
    let n = cols.len();
    let mut m: Vec<Vec<f64>> = (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut col_order: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while rank < rows {
        let mut best = (0.0, rank, rank);
        for (r, row) in m.iter().enumerate().skip(rank) {
            for (c, x) in row.iter().enumerate().skip(rank) {
                if x.abs() > best.0 {
                    best = (x.abs(), r, c);
                }
            }
        }
        if best.0 <= SINGULAR * scale {
            break;
        }
        m.swap(rank, best.1);
        for row in m.iter_mut() {
            row.swap(rank, best.2);
        }
        col_order.swap(rank, best.2);
        let pivot = m[rank][rank];
        m[rank].iter_mut().for_each(|x| *x /= pivot);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[rank] != 0.0 {
                let f = row[rank];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    // Free column `rank` gets coefficient 1, the pivots solve for the rest.
    let mut alpha = vec![0.0; n];
    alpha[col_order[rank]] = 1.0;
    for r in 0..rank {
        alpha[col_order[r]] = -m[r][rank];
    }
    alpha
}

pub fn caratheodory_reduce(vectors: &[Vec<f64>]) -> Result<ConeReduction> {
    let m = vectors.len();
    if m == 0 || vectors.iter().all(|u| u.iter().all(|&x| x == 0.0)) {
        return Err(Error::DegenerateInput("all vectors are zero".into()));
    }
    let d = vectors[0].len();
    if let Some(bad) = vectors.iter().find(|u| u.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
    }
    let cap = d * (d + 1) / 2;
    let vecs: Vec<Vec<f64>> = vectors.iter().map(|u| vectorize(u)).collect();
    let mut c: Vec<f64> = vectors
        .iter()
        .map(|u| if u.iter().any(|&x| x != 0.0) { 1.0 } else { 0.0 })
        .collect();

    loop {
        let active: Vec<usize> = (0..m).filter(|&i| c[i] > 0.0).collect();
        if active.len() <= cap {
            break;
        }
        let chosen = &active[..cap + 1];
        let cols: Vec<Vec<f64>> = chosen.iter().map(|&i| vecs[i].clone()).collect();
        let mut alpha = null_vector(&cols);
        if !alpha.iter().any(|&a| a > 0.0) {
            alpha.iter_mut().for_each(|a| *a = -*a);
        }
        let (mut t, mut hit) = (f64::INFINITY, 0);
        for (k, &a) in alpha.iter().enumerate() {
            if a > 0.0 && c[chosen[k]] / a < t {
                t = c[chosen[k]] / a;
                hit = k;
            }
        }
        for (k, &a) in alpha.iter().enumerate() {
            let i = chosen[k];
            c[i] = (c[i] - t * a).max(0.0);
        }
        c[chosen[hit]] = 0.0;
    }

    let mut permutation: Vec<usize> = (0..m).collect();
    permutation.sort_by(|&a, &b| c[b].total_cmp(&c[a]));
    let weights: Vec<f64> = permutation.iter().map(|&i| c[i]).collect();
    let c1 = weights[0];
    let (v, w) = permutation
        .iter()
        .zip(&weights)
        .map(|(&i, &ci)| {
            let r = ci / c1;
            let sv = r.sqrt();
            let sw = (1.0 - r).max(0.0).sqrt();
            let u = &vectors[i];
            (u.iter().map(|x| sv * x).collect(), u.iter().map(|x| sw * x).collect())
        })
        .unzip();
    Ok(ConeReduction { permutation, weights, v, w })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlmReduction {
    pub family: VectorFamily,
    /// Input index each surviving vector is a rescaling of.
    pub origin: Vec<usize>,
    pub rounds: usize,
    /// `true` where a round kept the `v` branch.
    pub kept_v: Vec<bool>,
}

/// Reduces a family to at most `d(d+1)/2` nonzero vectors without lowering
/// its Gaussian ratio (up to Monte-Carlo error in the branch choice).
pub fn flm_reduce(family: &VectorFamily, kind: RatioKind, mc_samples: usize, seed: u64) -> Result<VectorFamily> {
    flm_reduce_traced(family, kind, mc_samples, seed).map(|r| r.family)
}

pub fn flm_reduce_traced(family: &VectorFamily, kind: RatioKind, mc_samples: usize, seed: u64) -> Result<FlmReduction> {
    let space = family.space.clone();
    let d = space.dim;
    let cap = d * (d + 1) / 2;
    let is_nonzero = |u: &Vec<f64>| u.iter().any(|&x| x != 0.0);
    let all = family.to_f64();
    if family.len() <= cap {
        return Ok(FlmReduction {
            family: family.clone(),
            origin: (0..family.len()).collect(),
            rounds: 0,
            kept_v: Vec::new(),
        });
    }
    let (mut origin, mut current): (Vec<usize>, Vec<Vec<f64>>) =
        all.into_iter().enumerate().filter(|(_, u)| is_nonzero(u)).unzip();
    if current.is_empty() {
        return Err(Error::DegenerateInput("all vectors are zero".into()));
    }
    let mut kept_v = Vec::new();
    while current.len() > cap {
        let red = caratheodory_reduce(&current)?;
        let round = kept_v.len() as u64;
        let use_v = if red.w.iter().any(is_nonzero) {
            let fv = VectorFamily::float(red.v.clone(), space.clone())?;
            let fw = VectorFamily::float(red.w.clone(), space.clone())?;
            let p = paired_gaussian_ratios(&fv, &fw, kind, mc_samples, derive_seed(seed, "flm-round", round))?;
            p.diff <= 0.0
        } else {
            true
        };
        kept_v.push(use_v);
        let branch = if use_v { red.v } else { red.w };
        let (o, c): (Vec<usize>, Vec<Vec<f64>>) = red
            .permutation
            .iter()
            .zip(branch)
            .filter(|(_, u)| is_nonzero(u))
            .map(|(&k, u)| (origin[k], u))
            .unzip();
        origin = o;
        current = c;
    }
    Ok(FlmReduction {
        family: VectorFamily::float(current, space)?,
        origin,
        rounds: kept_v.len(),
        kept_v,
    })
}
