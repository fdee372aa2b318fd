//! The "embeddable point sets force bounded type and cotype" mechanism, run
//! numerically.
//!
//! For each draw of `g`, the Walsh point set `U_g` of a padded family is
//! embedded by [`jl_embed`] applied to the raw coordinates (a Euclidean proxy
//! for the source norm). The composite `S` is the JL map rescaled so that
//! `‖x − y‖ ≤ ‖Sx − Sy‖₂ ≤ D‖x − y‖` on `U_g`, with `D` measured against the
//! source norm. Since `0 ∈ U_g`, Walsh orthogonality then gives
//!
//! ```text
//! Σ g_A²‖x_A‖² / D²  ≤  E_ε‖Φ_g(ε)‖²  ≤  D² Σ g_A²‖x_A‖²
//! ```
//!
//! and both sides are checked per trial.

use rayon::prelude::*;
use serde::Serialize;

use super::{distortion_of_map, jl_embed, walsh_pointset, WalshEnsemble};
use crate::error::Result;
use crate::gauss::{SpaceOracle, VectorFamily};
use crate::seed::derive_seed;

/// Slack for float roundoff in the per-trial inequalities.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismTrial {
    pub trial: usize,
    pub points: usize,
    pub target_dim: usize,
    pub jl_attempts: usize,
    /// Distortion of the JL map on the Euclidean proxy.
    pub jl_distortion: f64,
    /// Distortion of the same map measured from the source norm into `ℓ₂`.
    pub total_distortion: f64,
    /// `total_distortion / jl_distortion`: the share of the constant owed to
    /// the source norm not being Euclidean.
    pub euclidean_factor: f64,
    /// `E_ε‖Φ_g(ε)‖²`.
    pub lhs: f64,
    /// `Σ g_A²‖x_A‖²`.
    pub weighted_norms: f64,
    /// `lhs / (D² Σ g_A²‖x_A‖²)`, at most 1.
    pub type_ratio: f64,
    /// `Σ g_A²‖x_A‖² / (D² lhs)`, at most 1.
    pub cotype_ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismReport {
    pub space: String,
    pub m: usize,
    pub family_size: usize,
    /// How source points reach the Euclidean embedding step.
    pub proxy: &'static str,
    pub eps: f64,
    pub constant: f64,
    pub seed: u64,
    pub trials: Vec<MechanismTrial>,
    pub max_type_ratio: f64,
    pub max_cotype_ratio: f64,
    pub all_hold: bool,
    /// Trial averages of `lhs` and of `Σ g_A²‖x_A‖²`, estimating
    /// `E_g‖Σ g_A x_A‖²` and `Σ‖x_A‖²`.
    pub mean_lhs: f64,
    pub mean_weighted_norms: f64,
}

fn run_trial(family: &[Vec<f64>], space: &SpaceOracle, eps: f64, constant: f64, seed: u64, trial: usize) -> Result<MechanismTrial> {
    let trial_seed = derive_seed(seed, "mechanism-trial", trial as u64);
    let ens = WalshEnsemble::from_family(family, space.dim, derive_seed(trial_seed, "g", 0))?;
    let points = walsh_pointset(&ens);
    let emb = jl_embed(&points, eps, constant, derive_seed(trial_seed, "jl", 0))?;
    let total = distortion_of_map(&points, &emb.map, space, &SpaceOracle::euclidean(emb.target_dim))?;
    let d2 = total.distortion * total.distortion;

    let phi = ens.phi();
    let lhs = phi.iter().map(|p| space.norm(p).powi(2)).sum::<f64>() / phi.len() as f64;
    let weighted = ens.weighted_sum(|x| space.norm(x));
    let type_ratio = if weighted > 0.0 { lhs / (d2 * weighted) } else { 0.0 };
    let cotype_ratio = if lhs > 0.0 { weighted / (d2 * lhs) } else { 0.0 };
    Ok(MechanismTrial {
        trial,
        points: points.len(),
        target_dim: emb.target_dim,
        jl_attempts: emb.attempts,
        jl_distortion: emb.report.distortion,
        total_distortion: total.distortion,
        euclidean_factor: total.distortion / emb.report.distortion,
        lhs,
        weighted_norms: weighted,
        type_ratio,
        cotype_ratio,
        holds: type_ratio <= 1.0 + SLACK && cotype_ratio <= 1.0 + SLACK,
    })
}

pub fn jl_mechanism_experiment(
    family: &VectorFamily,
    eps: f64,
    constant: f64,
    seed: u64,
    trials: usize,
) -> Result<MechanismReport> {
    let vectors = family.to_f64();
    let space = &family.space;
    let m = WalshEnsemble::from_family(&vectors, space.dim, 0)?.m;
    let rows: Vec<MechanismTrial> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&vectors, space, eps, constant, seed, t))
        .collect::<Result<_>>()?;
    let mean = |f: fn(&MechanismTrial) -> f64| {
        if rows.is_empty() {
            0.0
        } else {
            rows.iter().map(f).sum::<f64>() / rows.len() as f64
        }
    };
    Ok(MechanismReport {
        space: space.tag(),
        m,
        family_size: vectors.len(),
        proxy: "coordinates",
        eps,
        constant,
        seed,
        max_type_ratio: rows.iter().map(|r| r.type_ratio).fold(0.0, f64::max),
        max_cotype_ratio: rows.iter().map(|r| r.cotype_ratio).fold(0.0, f64::max),
        all_hold: rows.iter().all(|r| r.holds),
        mean_lhs: mean(|r| r.lhs),
        mean_weighted_norms: mean(|r| r.weighted_norms),
        trials: rows,
    })
}
