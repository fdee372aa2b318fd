//! Gaussian random projection of a point cloud and its measured distortion.
//!
//! Run with `cargo run --release --example jl_embedding`.

use banach_gauge::jl::{gaussian_points, jl_embed, jl_trials, target_dimension};
use banach_gauge::seed::derive_seed;

fn main() -> banach_gauge::Result<()> {
    let (n, dim, eps, constant) = (300, 2000, 0.5, 8.0);
    let points = gaussian_points(n, dim, 1)?;
    println!("{n} gaussian points in R^{dim}, target dimension {}", target_dimension(n, eps, constant, dim));

    let e = jl_embed(&points, eps, constant, 2)?;
    println!(
        "embedded into R^{} after {} draw(s): distortion {:.4} over {} pairs",
        e.target_dim, e.attempts, e.report.distortion, e.report.pairs
    );

    let seeds: Vec<u64> = (0..20).map(|i| derive_seed(3, "jl-trial", i)).collect();
    let trials = jl_trials(&points, eps, constant, &seeds)?;
    let ok = trials.iter().filter(|t| t.success).count();
    println!("single-draw success rate at distortion <= {}: {ok}/{}", 1.0 + eps, trials.len());
    Ok(())
}
