//! Dense Gaussian projections and pairwise distortion measurement.

use std::collections::HashMap;

use ndarray::{s, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::SpaceOracle;
use crate::seed::derive_seed;

pub const MAX_ATTEMPTS: usize = 100;
const DIRECT_LIMIT: usize = 512;
const ROW_BLOCK: usize = 128;
// Gram-based squared distances below this fraction of ‖x‖²+‖y‖² are redone directly.
const CANCELLATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    pub points: Vec<Vec<f64>>,
    pub dim: usize,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
        }
        Ok(PointSet { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the first occurrence of each distinct point (bitwise, with
    /// `-0.0` read as `0.0`).
    pub fn distinct(&self) -> Vec<usize> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            let key: Vec<u64> = p.iter().map(|&x| (x + 0.0).to_bits()).collect();
            if seen.insert(key, i).is_none() {
                out.push(i);
            }
        }
        out
    }
}

/// `x ↦ scale · matrix · x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: Array2<f64>,
    pub scale: f64,
}

impl LinearMap {
    pub fn new(matrix: Array2<f64>, scale: f64) -> Result<Self> {
        if matrix.nrows() == 0 || !(scale > 0.0) {
            return Err(Error::DomainError("map needs a target dimension and a positive scale".into()));
        }
        Ok(LinearMap { matrix, scale })
    }

    pub fn identity(dim: usize) -> Self {
        LinearMap { matrix: Array2::eye(dim), scale: 1.0 }
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .rows()
            .into_iter()
            .map(|row| self.scale * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix.rows().into_iter().map(|r| r.iter().map(|a| a * self.scale).collect()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub distortion: f64,
    pub argmin: (usize, usize),
    pub argmax: (usize, usize),
    pub pairs: u64,
}

/// Exact extremes of `‖Lx_i − Lx_j‖_target / ‖x_i − x_j‖_source` over
/// distinct pairs; pairs with both distances 0 are skipped.
pub fn distortion_of_map(
    points: &PointSet,
    map: &LinearMap,
    source: &SpaceOracle,
    target: &SpaceOracle,
) -> Result<DistortionReport> {
    if source.dim != points.dim || map.source_dim() != points.dim {
        return Err(Error::DimensionMismatch { expected: points.dim, got: map.source_dim() });
    }
    if target.dim != map.target_dim() {
        return Err(Error::DimensionMismatch { expected: map.target_dim(), got: target.dim });
    }
    let images: Vec<Vec<f64>> = points.points.iter().map(|p| map.apply(p)).collect();
    let mut ext = Extremes::new();
    for i in 0..points.len() {
        for j in 0..i {
            let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>();
            let s = source.norm(&diff(&points.points[i], &points.points[j]));
            let t = target.norm(&diff(&images[i], &images[j]));
            if s == 0.0 {
                if t == 0.0 {
                    continue;
                }
                return Err(Error::RatioUndefined(j, i));
            }
            ext.push(t / s, (j, i));
        }
    }
    ext.report()
}

struct Extremes {
    min: f64,
    max: f64,
    argmin: (usize, usize),
    argmax: (usize, usize),
    pairs: u64,
}

impl Extremes {
    fn new() -> Self {
        Extremes { min: f64::INFINITY, max: 0.0, argmin: (0, 0), argmax: (0, 0), pairs: 0 }
    }

    fn push(&mut self, r: f64, pair: (usize, usize)) {
        self.pairs += 1;
        if r < self.min {
            self.min = r;
            self.argmin = pair;
        }
        if r > self.max {
            self.max = r;
            self.argmax = pair;
        }
    }

    fn distortion(&self) -> f64 {
        if self.pairs == 0 {
            1.0
        } else {
            self.max / self.min
        }
    }

    fn report(&self) -> Result<DistortionReport> {
        if self.pairs == 0 {
            return Err(Error::AllPointsCoincide);
        }
        Ok(DistortionReport {
            min_ratio: self.min,
            max_ratio: self.max,
            distortion: self.distortion(),
            argmin: self.argmin,
            argmax: self.argmax,
            pairs: self.pairs,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub map: LinearMap,
    pub report: DistortionReport,
    pub target_dim: usize,
    /// Draws used, including the successful one; 0 when no reduction was
    /// possible and the identity was returned.
    pub attempts: usize,
}

/// `⌈C·ln n / ε²⌉`, at least 1 and at most `source_dim`.
pub fn target_dimension(n: usize, eps: f64, constant: f64, source_dim: usize) -> usize {
    let d = (constant * (n as f64).ln() / (eps * eps)).ceil();
    (d.max(1.0) as usize).min(source_dim.max(1))
}

/// Squared Euclidean distances between distinct points, `n(n−1)/2` entries in
/// row order `(1,0), (2,0), (2,1), …`.
struct Pairs {
    rows: Array2<f64>,
    norms: Vec<f64>,
}

impl Pairs {
    fn new(rows: Array2<f64>) -> Self {
        let norms = rows.rows().into_iter().map(|r| r.dot(&r)).collect();
        Pairs { rows, norms }
    }

    fn n(&self) -> usize {
        self.rows.nrows()
    }

    fn direct(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.rows.row(i), self.rows.row(j));
        a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    /// Calls `f(i, j, d²)` for all `j < i`, one block of rows at a time;
    /// stops early when `f` returns `false` at the end of a block.
    fn for_each(&self, mut f: impl FnMut(usize, usize, f64) -> bool) {
        let n = self.n();
        if n <= DIRECT_LIMIT {
            for i in 1..n {
                for j in 0..i {
                    if !f(i, j, self.direct(i, j)) && j == i - 1 {
                        return;
                    }
                }
            }
            return;
        }
        let mut r0 = 1;
        while r0 < n {
            let r1 = (r0 + ROW_BLOCK).min(n);
            let block: ArrayView2<f64> = self.rows.slice(s![r0..r1, ..]);
            let prefix = self.rows.slice(s![0..r1 - 1, ..]);
            let gram = block.dot(&prefix.t());
            let mut keep = true;
            for (bi, g_row) in gram.axis_iter(Axis(0)).enumerate() {
                let i = r0 + bi;
                for j in 0..i {
                    let scale = self.norms[i] + self.norms[j];
                    let mut d2 = scale - 2.0 * g_row[j];
                    if d2 < CANCELLATION * scale {
                        d2 = self.direct(i, j);
                    }
                    keep &= f(i, j, d2);
                }
            }
            if !keep {
                return;
            }
            r0 = r1;
        }
    }
}

fn to_array(points: &PointSet, keep: &[usize]) -> Array2<f64> {
    let mut a = Array2::zeros((keep.len(), points.dim));
    for (r, &i) in keep.iter().enumerate() {
        for (c, &x) in points.points[i].iter().enumerate() {
            a[[r, c]] = x;
        }
    }
    a
}

fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = 1.0 / (rows as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || {
        let z: f64 = StandardNormal.sample(&mut rng);
        s * z
    })
}

fn check_params(eps: f64, constant: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadEpsilon(eps));
    }
    if !(constant > 0.0) {
        return Err(Error::DomainError(format!("constant must be positive, got {constant}")));
    }
    Ok(())
}

/// Distinct points as rows, with their squared pairwise distances.
struct Prepared {
    keep: Vec<usize>,
    src: Array2<f64>,
    source: Vec<f64>,
}

impl Prepared {
    fn new(points: &PointSet) -> Result<Self> {
        let keep = points.distinct();
        if keep.len() < 2 {
            return Err(Error::AllPointsCoincide);
        }
        let src = to_array(points, &keep);
        let mut source = Vec::with_capacity(keep.len() * (keep.len() - 1) / 2);
        Pairs::new(src.clone()).for_each(|_, _, d2| {
            source.push(d2);
            true
        });
        Ok(Prepared { keep, src, source })
    }

    /// Measures one draw, abandoning it once the distortion passes `limit`.
    /// Returns the extremes seen and whether every pair was visited.
    fn measure(&self, matrix: &Array2<f64>, limit: f64) -> (Extremes, bool) {
        let image = Pairs::new(self.src.dot(&matrix.t()));
        let mut ext = Extremes::new();
        let mut k = 0;
        image.for_each(|i, j, t2| {
            ext.push((t2 / self.source[k]).sqrt(), (self.keep[j], self.keep[i]));
            k += 1;
            ext.distortion() <= limit
        });
        (ext, k == self.source.len())
    }
}

/// `true` when the JL dimension does not reduce the source dimension.
fn nothing_to_reduce(points: &PointSet, eps: f64, constant: f64, d: usize) -> bool {
    d == points.dim && (constant * (points.len() as f64).ln() / (eps * eps)).ceil() >= d as f64
}

/// Draws Gaussian maps into `⌈C ln n/ε²⌉` dimensions until one has
/// distortion at most `1 + ε` on the Euclidean point set, then rescales it so
/// the smallest pairwise ratio is exactly 1.
///
/// When that dimension is not below the source dimension there is nothing to
/// reduce and the identity (distortion 1) is returned.
pub fn jl_embed(points: &PointSet, eps: f64, constant: f64, seed: u64) -> Result<Embedding> {
    check_params(eps, constant)?;
    let prep = Prepared::new(points)?;
    let d = target_dimension(points.len(), eps, constant, points.dim);
    if nothing_to_reduce(points, eps, constant, d) {
        let map = LinearMap::identity(d);
        let report = distortion_of_map(points, &map, &SpaceOracle::euclidean(d), &SpaceOracle::euclidean(d))?;
        return Ok(Embedding { map, report, target_dim: d, attempts: 0 });
    }

    let limit = 1.0 + eps;
    let mut best_seen = f64::INFINITY;
    for attempt in 0..MAX_ATTEMPTS {
        let matrix = gaussian_matrix(d, points.dim, derive_seed(seed, "jl-draw", attempt as u64));
        let (ext, complete) = prep.measure(&matrix, limit);
        let dist = ext.distortion();
        best_seen = best_seen.min(dist);
        if complete && dist <= limit {
            let r_min = ext.min;
            let report = DistortionReport {
                min_ratio: 1.0,
                max_ratio: ext.max / r_min,
                distortion: dist,
                argmin: ext.argmin,
                argmax: ext.argmax,
                pairs: ext.pairs,
            };
            return Ok(Embedding {
                map: LinearMap { matrix, scale: 1.0 / r_min },
                report,
                target_dim: d,
                attempts: attempt + 1,
            });
        }
    }
    Err(Error::EmbeddingFailed { attempts: MAX_ATTEMPTS, best_distortion: best_seen })
}

/// Outcome of a single draw, without retries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JlTrial {
    pub seed: u64,
    pub target_dim: usize,
    pub success: bool,
    /// Exact on success; on failure the draw is abandoned early and this is
    /// only a lower bound on its distortion.
    pub distortion: f64,
}

/// The first draw [`jl_embed`] would make with `seed`, judged against `1 + ε`.
pub fn jl_trial(points: &PointSet, eps: f64, constant: f64, seed: u64) -> Result<JlTrial> {
    jl_trials(points, eps, constant, &[seed]).map(|mut v| v.remove(0))
}

/// [`jl_trial`] for many seeds, sharing the source distances.
pub fn jl_trials(points: &PointSet, eps: f64, constant: f64, seeds: &[u64]) -> Result<Vec<JlTrial>> {
    check_params(eps, constant)?;
    let prep = Prepared::new(points)?;
    let d = target_dimension(points.len(), eps, constant, points.dim);
    if nothing_to_reduce(points, eps, constant, d) {
        return Ok(seeds.iter().map(|&seed| JlTrial { seed, target_dim: d, success: true, distortion: 1.0 }).collect());
    }
    let limit = 1.0 + eps;
    Ok(seeds
        .par_iter()
        .map(|&seed| {
            let matrix = gaussian_matrix(d, points.dim, derive_seed(seed, "jl-draw", 0));
            let (ext, complete) = prep.measure(&matrix, limit);
            let distortion = ext.distortion();
            JlTrial { seed, target_dim: d, success: complete && distortion <= limit, distortion }
        })
        .collect())
}

/// Exact distortion of the draw [`jl_trial`] judges, measured over every pair.
pub fn jl_draw_distortion(points: &PointSet, eps: f64, constant: f64, seed: u64) -> Result<f64> {
    check_params(eps, constant)?;
    let prep = Prepared::new(points)?;
    let d = target_dimension(points.len(), eps, constant, points.dim);
    if nothing_to_reduce(points, eps, constant, d) {
        return Ok(1.0);
    }
    let matrix = gaussian_matrix(d, points.dim, derive_seed(seed, "jl-draw", 0));
    Ok(prep.measure(&matrix, f64::INFINITY).0.distortion())
}

/// `n` i.i.d. standard Gaussian points in `R^dim`.
pub fn gaussian_points(n: usize, dim: usize, seed: u64) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSet::new((0..n).map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn l1(d: usize) -> SpaceOracle {
        SpaceOracle::parse_tag("l1", d).unwrap()
    }

    #[test]
    fn identity_and_doubling() {
        let ps = PointSet::new(vec![vec![0.0, 1.0], vec![3.0, -1.0], vec![2.0, 2.0]]).unwrap();
        let e = SpaceOracle::euclidean(2);
        let r = distortion_of_map(&ps, &LinearMap::identity(2), &e, &e).unwrap();
        assert_eq!(r.distortion, 1.0);
        let two = LinearMap::new(Array2::eye(2), 2.0).unwrap();
        let r = distortion_of_map(&ps, &two, &e, &e).unwrap();
        assert_eq!((r.min_ratio, r.max_ratio, r.distortion), (2.0, 2.0, 1.0));
    }

    #[test]
    fn l1_square_into_l2() {
        let ps = PointSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let r = distortion_of_map(&ps, &LinearMap::identity(2), &l1(2), &SpaceOracle::euclidean(2)).unwrap();
        assert_eq!(r.pairs, 6);
        assert!((r.distortion - 2f64.sqrt()).abs() < 1e-15);
        assert!((r.min_ratio - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coincident_and_undefined() {
        let e = SpaceOracle::euclidean(2);
        let ps = PointSet::new(vec![vec![1.0, 1.0]; 3]).unwrap();
        assert_eq!(distortion_of_map(&ps, &LinearMap::identity(2), &e, &e), Err(Error::AllPointsCoincide));
        assert_eq!(jl_embed(&ps, 0.5, 8.0, 0).unwrap_err(), Error::AllPointsCoincide);
        // non-injective source norm keeps a pair at distance 0
        let flat = SpaceOracle::new(
            2,
            crate::gauss::NormKind::Polytope(vec![vec![crate::seqvec::rat(1, 1), crate::seqvec::rat(0, 1)]]),
        )
        .unwrap();
        let ps = PointSet::new(vec![vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(distortion_of_map(&ps, &LinearMap::identity(2), &flat, &e), Err(Error::RatioUndefined(0, 1)));
    }

    #[test]
    fn scale_covariance() {
        let ps = PointSet::new(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 0.5], vec![-1.0, 2.0, 0.0]]).unwrap();
        let m = Array2::from_shape_vec((2, 3), vec![1.0, 2.0, 0.0, -1.0, 0.5, 3.0]).unwrap();
        let a = LinearMap::new(m.clone(), 1.0).unwrap();
        let b = LinearMap::new(m, 3.0).unwrap();
        let (src, tgt) = (l1(3), SpaceOracle::euclidean(2));
        let ra = distortion_of_map(&ps, &a, &src, &tgt).unwrap();
        let rb = distortion_of_map(&ps, &b, &src, &tgt).unwrap();
        assert!((rb.min_ratio - 3.0 * ra.min_ratio).abs() < 1e-12);
        assert!((rb.max_ratio - 3.0 * ra.max_ratio).abs() < 1e-12);
        assert!((rb.distortion - ra.distortion).abs() < 1e-12);
    }

    #[test]
    fn trial_matches_first_embed_draw() {
        let ps = gaussian_points(60, 400, 9).unwrap();
        let t = jl_trial(&ps, 0.5, 8.0, 11).unwrap();
        assert_eq!(t.target_dim, 132);
        let e = jl_embed(&ps, 0.5, 8.0, 11).unwrap();
        if t.success {
            assert_eq!(e.attempts, 1);
            assert_eq!(e.report.distortion, t.distortion);
        } else {
            assert!(e.attempts > 1);
        }
        assert_eq!(jl_trial(&ps, 0.0, 8.0, 1), Err(Error::BadEpsilon(0.0)));
        let full = jl_draw_distortion(&ps, 0.5, 8.0, 11).unwrap();
        assert!(full >= t.distortion);
        assert_eq!(full <= 1.5, t.success);
    }

    #[test]
    fn two_points_embed_isometrically() {
        let ps = PointSet::new(vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.0, 4.0]]).unwrap();
        let e = jl_embed(&ps, 1.0, 0.1, 3).unwrap();
        assert_eq!((e.attempts, e.target_dim), (1, 1));
        assert_eq!(e.report.min_ratio, 1.0);
        assert_eq!(e.report.distortion, 1.0);
    }

    #[test]
    fn no_reduction_means_identity() {
        let ps = PointSet::new(vec![vec![0.0, 1.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let e = jl_embed(&ps, 0.5, 8.0, 0).unwrap();
        assert_eq!(e.attempts, 0);
        assert_eq!(e.map, LinearMap::identity(2));
        assert_eq!(e.report.distortion, 1.0);
    }

    #[test]
    fn bad_epsilon() {
        let ps = PointSet::new(vec![vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(jl_embed(&ps, 0.0, 8.0, 0).unwrap_err(), Error::BadEpsilon(0.0));
        assert!(jl_embed(&ps, 1.5, 8.0, 0).is_err());
    }

    #[test]
    fn target_dimension_formula() {
        assert_eq!(target_dimension(2000, 0.5, 8.0, 300), 244);
        assert_eq!(target_dimension(2000, 0.5, 8.0, 100), 100);
        assert_eq!(target_dimension(2, 1.0, 0.1, 5), 1);
    }

    #[test]
    fn report_is_normalized_and_checked_independently() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec<f64>> = (0..40).map(|_| (0..60).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let ps = PointSet::new(pts).unwrap();
        let e = jl_embed(&ps, 1.0, 8.0, 17).unwrap();
        assert_eq!(e.report.min_ratio, 1.0);
        assert!(e.report.distortion <= 2.0);
        let eu = SpaceOracle::euclidean(60);
        let r = distortion_of_map(&ps, &e.map, &eu, &SpaceOracle::euclidean(e.target_dim)).unwrap();
        assert!((r.min_ratio - 1.0).abs() < 1e-9);
        assert!((r.distortion - e.report.distortion).abs() < 1e-9);
        assert_eq!(jl_embed(&ps, 1.0, 8.0, 17).unwrap(), e);
    }

    #[test]
    fn blocked_path_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<Vec<f64>> = (0..600).map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let a = Array2::from_shape_vec((600, 5), pts.concat()).unwrap();
        let p = Pairs::new(a);
        let mut worst: f64 = 0.0;
        p.for_each(|i, j, d2| {
            let direct = p.direct(i, j);
            worst = worst.max((d2 - direct).abs() / direct);
            true
        });
        assert!(worst < 1e-9, "{worst}");
    }
}
