//! Sign-average (exact) and Gaussian Monte-Carlo estimates of
//!
//! ```text
//! type:   E‖Σ g_i x_i‖² / Σ‖x_i‖²        cotype: Σ‖x_i‖² / E‖Σ g_i x_i‖²
//! ```
//!
//! Monte-Carlo samples are drawn in fixed-size blocks, block `b` from its own
//! ChaCha stream, so the output for a seed does not depend on how many
//! threads evaluate the blocks.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{Coords, RootRat, VectorFamily};
use crate::error::{Error, Result};
use crate::seqvec::{rat_to_f64, Rat};

pub const RADEMACHER_CAP: usize = 20;
const BLOCK: usize = 1024;
const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioKind {
    Type,
    Cotype,
}

impl RatioKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "type" => Some(RatioKind::Type),
            "cotype" => Some(RatioKind::Cotype),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimateMode {
    #[serde(rename = "rademacher-exact")]
    RademacherExact,
    #[serde(rename = "gaussian-mc")]
    GaussianMc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioEstimate {
    pub kind: RatioKind,
    pub mode: EstimateMode,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
    /// Exact rational value when the enumeration ran in exact arithmetic.
    pub exact: Option<Rat>,
}

impl RatioEstimate {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

/// Exact average over all `2^n` sign patterns.
pub fn rademacher_ratio(family: &VectorFamily, kind: RatioKind) -> Result<RatioEstimate> {
    let n = family.len();
    if n > RADEMACHER_CAP {
        return Err(Error::TooManyVectors { count: n, cap: RADEMACHER_CAP });
    }
    if n == 0 {
        return Err(Error::ZeroFamily("empty family".into()));
    }
    if let Coords::Exact(vectors) = &family.coords {
        if let Some((sum_sq, mean)) = exact_sign_average(family, vectors) {
            let ratio = match kind {
                RatioKind::Type if sum_sq.is_zero() => return Err(zero_norms()),
                RatioKind::Cotype if mean.is_zero() => return Err(zero_sums()),
                RatioKind::Type => &mean / &sum_sq,
                RatioKind::Cotype => &sum_sq / &mean,
            };
            let point = rat_to_f64(&ratio);
            return Ok(RatioEstimate {
                kind,
                mode: EstimateMode::RademacherExact,
                point,
                ci_low: point,
                ci_high: point,
                samples: 1u64 << n,
                seed: 0,
                exact: Some(ratio),
            });
        }
    }

    let vectors = family.to_f64();
    let oracle = &family.space;
    let sum_sq: f64 = vectors.iter().map(|x| oracle.norm(x).powi(2)).sum();
    let dim = oracle.dim;
    // ε and −ε give the same norm: fix the first sign.
    let patterns = 1u64 << (n - 1);
    let total: f64 = (0..patterns)
        .map(|mask| {
            let mut acc = vectors[0].clone();
            for (i, x) in vectors.iter().enumerate().skip(1) {
                let s = if mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 };
                for c in 0..dim {
                    acc[c] += s * x[c];
                }
            }
            oracle.norm(&acc).powi(2)
        })
        .sum();
    let mean = total / patterns as f64;
    let point = match kind {
        RatioKind::Type if sum_sq == 0.0 => return Err(zero_norms()),
        RatioKind::Cotype if mean == 0.0 => return Err(zero_sums()),
        RatioKind::Type => mean / sum_sq,
        RatioKind::Cotype => sum_sq / mean,
    };
    Ok(RatioEstimate {
        kind,
        mode: EstimateMode::RademacherExact,
        point,
        ci_low: point,
        ci_high: point,
        samples: 1u64 << n,
        seed: 0,
        exact: None,
    })
}

fn zero_norms() -> Error {
    Error::ZeroFamily("sum of squared norms is 0".into())
}

fn zero_sums() -> Error {
    Error::ZeroFamily("every sign sum has norm 0".into())
}

fn exact_sign_average(family: &VectorFamily, vectors: &[Vec<RootRat>]) -> Option<(Rat, Rat)> {
    let oracle = &family.space;
    if !oracle.is_rational() {
        return None;
    }
    let mut sum_sq = Rat::zero();
    for x in vectors {
        sum_sq += oracle.norm_sq_exact(x)?;
    }
    let n = vectors.len();
    let patterns = 1u64 << (n - 1);
    let mut total = Rat::zero();
    for mask in 0..patterns {
        let mut acc = vectors[0].clone();
        for (i, x) in vectors.iter().enumerate().skip(1) {
            let flip = mask >> (i - 1) & 1 == 1;
            for (a, v) in acc.iter_mut().zip(x) {
                let term = if flip { v.negate() } else { v.clone() };
                *a = a.checked_add(&term)?;
            }
        }
        total += oracle.norm_sq_exact(&acc)?;
    }
    Some((sum_sq, total / Rat::from_integer(patterns.into())))
}

/// Per-sample squared norms `‖Σ g_i x_i‖²` for several families sharing
/// the Gaussian coefficients by position.
fn sample_norms(families: &[Vec<Vec<f64>>], oracle: &super::SpaceOracle, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let width = families.iter().map(Vec::len).max().unwrap_or(0);
    let dim = oracle.dim;
    let blocks = samples.div_ceil(BLOCK);
    let per_block: Vec<Vec<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut out = vec![Vec::with_capacity(count); families.len()];
            let mut g = vec![0.0; width];
            let mut acc = vec![0.0; dim];
            for _ in 0..count {
                for gi in g.iter_mut() {
                    *gi = StandardNormal.sample(&mut rng);
                }
                for (f, fam) in families.iter().enumerate() {
                    acc.iter_mut().for_each(|a| *a = 0.0);
                    for (gi, x) in g.iter().zip(fam) {
                        for (a, xc) in acc.iter_mut().zip(x) {
                            *a += gi * xc;
                        }
                    }
                    out[f].push(oracle.norm(&acc).powi(2));
                }
            }
            out
        })
        .collect();
    let mut merged = vec![Vec::with_capacity(samples); families.len()];
    for block in per_block {
        for (f, vals) in block.into_iter().enumerate() {
            merged[f].extend(vals);
        }
    }
    merged
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var)
}

fn estimate_from(norms: &[f64], sum_sq: f64, kind: RatioKind, seed: u64) -> Result<RatioEstimate> {
    let (mean, var) = mean_var(norms);
    let hw = Z95 * (var / norms.len() as f64).sqrt();
    let (point, ci_low, ci_high) = match kind {
        RatioKind::Type => {
            if sum_sq == 0.0 {
                return Err(zero_norms());
            }
            (mean / sum_sq, (mean - hw) / sum_sq, (mean + hw) / sum_sq)
        }
        RatioKind::Cotype => {
            if mean == 0.0 {
                return Err(zero_sums());
            }
            let high = if mean - hw > 0.0 { sum_sq / (mean - hw) } else { f64::INFINITY };
            (sum_sq / mean, sum_sq / (mean + hw), high)
        }
    };
    Ok(RatioEstimate {
        kind,
        mode: EstimateMode::GaussianMc,
        point,
        ci_low,
        ci_high,
        samples: norms.len() as u64,
        seed,
        exact: None,
    })
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 100 {
        return Err(Error::DomainError(format!("need at least 100 samples, got {samples}")));
    }
    Ok(())
}

/// Monte-Carlo estimate with a 95% normal confidence interval.
pub fn gaussian_ratio(family: &VectorFamily, kind: RatioKind, samples: usize, seed: u64) -> Result<RatioEstimate> {
    check_samples(samples)?;
    if family.is_empty() {
        return Err(Error::ZeroFamily("empty family".into()));
    }
    let vectors = family.to_f64();
    let sum_sq: f64 = vectors.iter().map(|x| family.space.norm(x).powi(2)).sum();
    let norms = sample_norms(std::slice::from_ref(&vectors), &family.space, samples, seed);
    estimate_from(&norms[0], sum_sq, kind, seed)
}

/// Two estimates driven by the same Gaussians (common random numbers).
#[derive(Debug, Clone, PartialEq)]
pub struct PairedEstimate {
    pub first: RatioEstimate,
    pub second: RatioEstimate,
    /// `second.point − first.point`.
    pub diff: f64,
    /// Standard error of `diff` from the paired per-sample differences
    /// (delta method for the cotype orientation).
    pub diff_se: f64,
}

/// Coefficient `g_i` multiplies the `i`-th vector of both families, so the
/// families should be aligned by position.
pub fn paired_gaussian_ratios(
    first: &VectorFamily,
    second: &VectorFamily,
    kind: RatioKind,
    samples: usize,
    seed: u64,
) -> Result<PairedEstimate> {
    check_samples(samples)?;
    if first.space != second.space {
        return Err(Error::DomainError("paired families must share a space".into()));
    }
    let a = first.to_f64();
    let b = second.to_f64();
    let oracle = &first.space;
    let sa: f64 = a.iter().map(|x| oracle.norm(x).powi(2)).sum();
    let sb: f64 = b.iter().map(|x| oracle.norm(x).powi(2)).sum();
    let norms = sample_norms(&[a, b], oracle, samples, seed);
    let ea = estimate_from(&norms[0], sa, kind, seed)?;
    let eb = estimate_from(&norms[1], sb, kind, seed)?;

    let (ma, _) = mean_var(&norms[0]);
    let (mb, _) = mean_var(&norms[1]);
    let influence = |n: f64, s: f64, m: f64| match kind {
        RatioKind::Type => n / s,
        RatioKind::Cotype => -s / (m * m) * (n - m),
    };
    let diffs: Vec<f64> = norms[0]
        .iter()
        .zip(&norms[1])
        .map(|(&na, &nb)| influence(nb, sb, mb) - influence(na, sa, ma))
        .collect();
    let (_, var) = mean_var(&diffs);
    Ok(PairedEstimate {
        diff: eb.point - ea.point,
        diff_se: (var / samples as f64).sqrt(),
        first: ea,
        second: eb,
    })
}

/// `c₂ ≤ T₂·C₂`; meaningful only when both inputs are true upper bounds.
pub fn kwapien_upper(t2_upper: f64, c2_upper: f64) -> Result<f64> {
    for v in [t2_upper, c2_upper] {
        if !(v >= 1.0) {
            return Err(Error::InvalidBound { value: v });
        }
    }
    Ok(t2_upper * c2_upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C2Lower {
    pub value: f64,
    pub mode: EstimateMode,
    /// `true` for exact sign enumeration; Monte-Carlo input only estimates.
    pub certified: bool,
}

/// Any `S` with `‖x‖ ≤ ‖Sx‖₂ ≤ D‖x‖` forces either ratio to be at most `D²`,
/// hence `c₂ ≥ √ratio`.
pub fn c2_lower_from_witness(est: &RatioEstimate) -> C2Lower {
    C2Lower {
        value: est.point.sqrt(),
        mode: est.mode,
        certified: est.mode == EstimateMode::RademacherExact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::SpaceOracle;
    use crate::seqvec::rat;

    fn unit(dim: usize, i: usize) -> Vec<Rat> {
        (0..dim).map(|c| if c == i { rat(1, 1) } else { rat(0, 1) }).collect()
    }

    #[test]
    fn l1_plane_type_ratio_is_two() {
        let o = SpaceOracle::parse_tag("l1", 2).unwrap();
        let fam = VectorFamily::rational(vec![unit(2, 0), unit(2, 1)], o).unwrap();
        let est = rademacher_ratio(&fam, RatioKind::Type).unwrap();
        assert_eq!(est.exact, Some(rat(2, 1)));
        assert_eq!(est.ci_low, est.point);
        let lower = c2_lower_from_witness(&est);
        assert!((lower.value - 2f64.sqrt()).abs() < 1e-15);
        assert!(lower.certified);
    }

    #[test]
    fn hilbert_orthonormal_ratios_are_one() {
        let o = SpaceOracle::euclidean(3);
        let fam = VectorFamily::rational((0..3).map(|i| unit(3, i)).collect(), o).unwrap();
        assert_eq!(rademacher_ratio(&fam, RatioKind::Type).unwrap().exact, Some(rat(1, 1)));
        assert_eq!(rademacher_ratio(&fam, RatioKind::Cotype).unwrap().exact, Some(rat(1, 1)));
    }

    #[test]
    fn t2_diagonal_cotype_ratio_is_two() {
        let o = SpaceOracle::parse_tag("T2", 4).unwrap();
        let fam = VectorFamily::rational(vec![unit(4, 2), unit(4, 3)], o).unwrap();
        let est = rademacher_ratio(&fam, RatioKind::Cotype).unwrap();
        assert_eq!(est.exact, Some(rat(2, 1)));
        assert!((c2_lower_from_witness(&est).value - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn float_enumeration_matches_exact() {
        let o = SpaceOracle::parse_tag("l1", 2).unwrap();
        let fam = VectorFamily::float(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, -0.5]], o.clone()).unwrap();
        let exact_fam =
            VectorFamily::rational(vec![unit(2, 0), unit(2, 1), vec![rat(1, 2), rat(-1, 2)]], o).unwrap();
        let f = rademacher_ratio(&fam, RatioKind::Type).unwrap();
        let e = rademacher_ratio(&exact_fam, RatioKind::Type).unwrap();
        assert!(f.exact.is_none());
        assert!((f.point - e.point).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        let o = SpaceOracle::euclidean(2);
        let zero = VectorFamily::rational(vec![vec![rat(0, 1), rat(0, 1)]], o.clone()).unwrap();
        assert!(matches!(rademacher_ratio(&zero, RatioKind::Type), Err(Error::ZeroFamily(_))));
        assert!(matches!(rademacher_ratio(&zero, RatioKind::Cotype), Err(Error::ZeroFamily(_))));
        let many = VectorFamily::rational(vec![unit(2, 0); 21], o.clone()).unwrap();
        assert!(matches!(rademacher_ratio(&many, RatioKind::Type), Err(Error::TooManyVectors { .. })));
        let fam = VectorFamily::rational(vec![unit(2, 0)], o).unwrap();
        assert!(gaussian_ratio(&fam, RatioKind::Type, 99, 1).is_err());
    }

    #[test]
    fn kwapien_product() {
        assert_eq!(kwapien_upper(1.0, 1.0).unwrap(), 1.0);
        assert!((kwapien_upper(2f64.sqrt(), 2f64.sqrt()).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(kwapien_upper(1.5, 2.0).unwrap(), 3.0);
        assert!(matches!(kwapien_upper(0.9, 2.0), Err(Error::InvalidBound { .. })));
        assert!(kwapien_upper(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn gaussian_l2_is_one_within_ci() {
        let o = SpaceOracle::euclidean(2);
        let fam = VectorFamily::rational(vec![unit(2, 0), unit(2, 1)], o).unwrap();
        let est = gaussian_ratio(&fam, RatioKind::Type, 100_000, 11).unwrap();
        assert!(est.ci_low <= 1.0 && 1.0 <= est.ci_high, "{est:?}");
        assert!(est.ci_low <= est.point && est.point <= est.ci_high);
    }

    #[test]
    fn gaussian_l1_matches_closed_form() {
        // E(|g1| + |g2|)² = 2 + 4/π
        let o = SpaceOracle::parse_tag("l1", 2).unwrap();
        let fam = VectorFamily::rational(vec![unit(2, 0), unit(2, 1)], o).unwrap();
        let expected = (2.0 + 4.0 / std::f64::consts::PI) / 2.0;
        let est = gaussian_ratio(&fam, RatioKind::Type, 100_000, 5).unwrap();
        assert!(est.ci_low <= expected && expected <= est.ci_high, "{est:?} vs {expected}");
        let again = gaussian_ratio(&fam, RatioKind::Type, 100_000, 5).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn closed_form_oracle_by_quadrature() {
        // Independent check of 2 + 4/π: ∫∫ (|a|+|b|)² φ(a)φ(b) by the midpoint rule.
        let h = 0.01;
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let grid: Vec<f64> = (0..1200).map(|i| -6.0 + h * (i as f64 + 0.5)).collect();
        let mut total = 0.0;
        for &a in &grid {
            for &b in &grid {
                total += (a.abs() + b.abs()).powi(2) * phi(a) * phi(b) * h * h;
            }
        }
        assert!((total - (2.0 + 4.0 / std::f64::consts::PI)).abs() < 1e-4);
    }

    #[test]
    fn paired_estimates_share_randomness() {
        let o = SpaceOracle::parse_tag("l1", 2).unwrap();
        let fam = VectorFamily::rational(vec![unit(2, 0), unit(2, 1)], o).unwrap();
        let p = paired_gaussian_ratios(&fam, &fam, RatioKind::Cotype, 1000, 3).unwrap();
        assert_eq!(p.diff, 0.0);
        assert_eq!(p.diff_se, 0.0);
        assert_eq!(p.first, gaussian_ratio(&fam, RatioKind::Cotype, 1000, 3).unwrap());
    }
}
