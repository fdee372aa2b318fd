//! Flat vectors in Tsirelson space: nonnegative `x` with `‖x‖_T` small
//! against the tail mass `Σ_{j≥3} x_j`, and the cotype-2 lower bounds they
//! give for coordinate subspaces of `T⁽²⁾`.
//!
//! The minimum of `θ(x) = ‖x‖_T / Σ_{j≥3} x_j` over `x ≥ 0` supported in
//! `[1, N]` is found by cutting planes. Every admissible tree gives a
//! norming functional `λ` with `⟨λ, x⟩ ≤ ‖x‖_T` on `x ≥ 0`, and `‖x‖_T` is
//! the maximum over the finitely many trees, so
//!
//! ```text
//! min t   s.t.  ⟨λ, x⟩ ≤ t  (λ in the pool),  Σ_{j≥3} x_j ≥ 1,  x ≥ 0
//! ```
//!
//! is a relaxation that becomes exact once the pool contains a tree norming
//! its optimum. Each round adds the tree that norms the current LP optimum.

mod lp;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth;
use crate::seqvec::{rat_to_f64, ser_rat, FinVec, Rat};
use crate::tsirelson::{norming_functional, tsirelson_norm, CertNode, NormCertificate};

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 16;

fn tail_mass(x: &FinVec) -> Rat {
    x.iter().filter(|(j, _)| *j >= 3).map(|(_, v)| v.clone()).sum()
}

/// `θ(x) = ‖x‖_T / Σ_{j≥3} x_j`.
pub fn flatness(x: &FinVec) -> Result<Rat> {
    if let Some((j, _)) = x.iter().find(|(_, v)| v.is_negative()) {
        return Err(Error::NegativeEntry(j));
    }
    let tail = tail_mass(x);
    if tail.is_zero() {
        return Err(Error::ZeroTail);
    }
    Ok(tsirelson_norm(x).value / tail)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatWitness {
    pub x: FinVec,
    pub n_bound: usize,
    #[serde(serialize_with = "ser_rat")]
    pub theta: Rat,
    pub certificate: NormCertificate,
}

impl FlatWitness {
    pub fn new(x: FinVec, n_bound: usize) -> Result<Self> {
        check_bound(n_bound)?;
        if let Some(j) = x.max_index().filter(|&j| j > n_bound as u64) {
            return Err(Error::DomainError(format!("index {j} is outside [1, {n_bound}]")));
        }
        let theta = flatness(&x)?;
        let certificate = tsirelson_norm(&x).certificate;
        Ok(FlatWitness { x, n_bound, theta, certificate })
    }
}

fn check_bound(n: usize) -> Result<()> {
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(Error::BadSupportBound(n));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Round {
    pub round: usize,
    /// LP optimum: a lower bound on `min θ`.
    #[serde(serialize_with = "ser_rat")]
    pub lp_value: Rat,
    /// `θ` of the LP optimizer: an upper bound on `min θ`.
    #[serde(serialize_with = "ser_rat")]
    pub theta: Rat,
    pub pool_size: usize,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub witness: FlatWitness,
    pub rounds: Vec<Round>,
    /// `true` when the last LP value equals the true norm at its optimizer,
    /// so `witness.theta` is the exact minimum.
    pub converged: bool,
    #[serde(skip)]
    pub pool: Vec<CertNode>,
    #[serde(skip)]
    pub functionals: Vec<FinVec>,
}

impl SearchReport {
    pub fn lp_rounds(&self) -> usize {
        self.rounds.len()
    }
}

/// The dual of the relaxation over the current pool, in standard form.
///
/// Columns `μ_k` (one per functional), `ν`, and slacks `s_j`; rows
/// `Σ_k μ_k λ_kj − [j≥3]ν − s_j = 0` for `j = 1..N` and `Σ_k μ_k = 1`;
/// objective `min −ν`. Its multipliers `y` are the primal optimum:
/// `x_j = y_j` and `t = −y_{N+1}`.
fn solve_relaxation(pool: &[FinVec], n: usize) -> (FinVec, Rat, usize) {
    let p = pool.len();
    let cols = p + 1 + n;
    let mut a = vec![vec![Rat::zero(); cols]; n + 1];
    for (k, lambda) in pool.iter().enumerate() {
        for (j, v) in lambda.iter() {
            a[j as usize - 1][k] = v.clone();
        }
        a[n][k] = Rat::from_integer(1.into());
    }
    for j in 0..n {
        if j >= 2 {
            a[j][p] = Rat::from_integer((-1).into());
        }
        a[j][p + 1 + j] = Rat::from_integer((-1).into());
    }
    let mut b = vec![Rat::zero(); n + 1];
    b[n] = Rat::from_integer(1.into());
    let mut c = vec![Rat::zero(); cols];
    c[p] = Rat::from_integer((-1).into());
    let sol = lp::solve(&a, &b, &c).expect("the relaxation is feasible and bounded");
    let x = FinVec::from_entries((0..n).map(|j| (j as u64 + 1, sol.y[j].clone()))).expect("indices start at 1");
    (x, -sol.y[n].clone(), sol.pivots)
}

/// Cutting-plane minimization of `θ` over supports in `[1, N]`.
pub fn search_flat(n: usize, max_rounds: usize) -> Result<SearchReport> {
    check_bound(n)?;
    let mut pool: Vec<CertNode> = (1..=n as u64).map(CertNode::Leaf).collect();
    let mut functionals: Vec<FinVec> = (1..=n as u64).map(FinVec::unit).collect();
    let mut rounds = Vec::new();
    let mut best: Option<(Rat, FinVec)> = None;
    let mut converged = false;

    for round in 1..=max_rounds {
        let (x, t, pivots) = solve_relaxation(&functionals, n);
        let norm = tsirelson_norm(&x);
        let theta = &norm.value / tail_mass(&x);
        rounds.push(Round { round, lp_value: t.clone(), theta: theta.clone(), pool_size: pool.len(), pivots });
        if best.as_ref().is_none_or(|(b, _)| theta < *b) {
            best = Some((theta, x.clone()));
        }
        if norm.value <= t {
            converged = true;
            break;
        }
        functionals.push(norming_functional(&norm.certificate)?);
        pool.push(norm.certificate.root);
    }

    // Coordinates 1 and 2 carry no tail mass; dropping them cannot raise the norm.
    let x = match best {
        Some((_, x)) => x.restrict_range(3, n as u64),
        None => FinVec::unit(3),
    };
    Ok(SearchReport { witness: FlatWitness::new(x, n)?, rounds, converged, pool, functionals })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CotypeCertificate {
    /// The subspace is `span{e_1..e_N}` in `T⁽²⁾`.
    pub dim: usize,
    /// `y_j² = x_j`; the family is `{y_j e_j}`.
    pub squares: FinVec,
    /// `(Σ_j x_j) / ‖Σ_j x_j e_j‖_T`, the exact sign-average cotype ratio.
    #[serde(serialize_with = "ser_rat")]
    pub ratio: Rat,
    pub c2_lower: f64,
    /// The stronger `2^k/k` asserted for `N = g_k(2)`; claimed, not certified here.
    #[serde(rename = "paper_claimed")]
    pub claimed_bound: Option<f64>,
    pub claimed_note: Option<&'static str>,
}

/// Every sign pattern of `{y_j e_j}` has `T⁽²⁾` norm² `‖Σ x_j e_j‖_T`
/// (unconditionality), so the sign average is exact and gives the ratio.
pub fn cotype_certificate_from_witness(w: &FlatWitness) -> Result<CotypeCertificate> {
    flatness(&w.x)?;
    let total: Rat = w.x.iter().map(|(_, v)| v.clone()).sum();
    let ratio = total / tsirelson_norm(&w.x).value;
    let claimed_bound = claimed_for(w.n_bound);
    Ok(CotypeCertificate {
        dim: w.n_bound,
        squares: w.x.clone(),
        c2_lower: rat_to_f64(&ratio).sqrt(),
        ratio,
        claimed_note: claimed_bound.map(|_| "claimed, not certified here"),
        claimed_bound,
    })
}

/// `2^k/k` when `N = g_k(2)` for some `k ≥ 1`.
fn claimed_for(n: usize) -> Option<f64> {
    let cap = num_bigint::BigUint::from(n);
    (1..8u32).find_map(|k| {
        let v = growth::ackermann_g(k, &num_bigint::BigUint::from(2u32), &cap);
        (v.exact() == Some(&cap)).then(|| 2f64.powi(k as i32) / f64::from(k))
    })
}
