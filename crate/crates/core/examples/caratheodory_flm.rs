//! Carathéodory cone reduction of a covariance, and the family reduction that
//! keeps a ratio estimate while shrinking to `dim` vectors.
//!
//! Run with `cargo run --example caratheodory_flm`.

use banach_gauge::gauss::{caratheodory_reduce, flm_reduce_traced, RatioKind, SpaceOracle, VectorFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> banach_gauge::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (dim, count) = (4, 30);
    let vectors: Vec<Vec<f64>> =
        (0..count).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();

    let red = caratheodory_reduce(&vectors)?;
    println!(
        "{count} vectors in R^{dim}: {} nonzero weights, relative covariance residual {:.2e}",
        red.nonzero_weights(),
        red.relative_residual(&vectors)
    );
    let live: Vec<String> = red.weights.iter().filter(|w| **w > 0.0).map(|w| format!("{w:.3}")).collect();
    println!("weights: {}", live.join(" "));

    let fam = VectorFamily::float(vectors, SpaceOracle::lp(dim, 3.0)?)?;
    let traced = flm_reduce_traced(&fam, RatioKind::Type, 20_000, 11)?;
    println!(
        "l3 type reduction: {} -> {} vectors in {} rounds, survivors rescale inputs {:?}",
        fam.len(),
        traced.family.len(),
        traced.rounds,
        traced.origin
    );
    Ok(())
}
