//! log*, the Ackermann hierarchy, its inverses and the recursive distortion
//! bound.
//!
//! Run with `cargo run --example growth_hierarchy`.

use banach_gauge::growth::{ackermann_g, alpha, alpha_diag, delta_bound, log_star, log_star_tower, DeltaBoundQuery, Tower};
use num_bigint::BigUint;

fn main() -> banach_gauge::Result<()> {
    for x in [1.0, 2.0, 16.0, 1e6, 1e300] {
        println!("log*({x:e}) = {}", log_star(x)?);
    }
    println!("log*(a_7) = {}", log_star_tower(Tower::a(7)));

    let cap = BigUint::from(10u32).pow(100);
    for k in 1..=4 {
        let row: Vec<String> = (1..=4u32).map(|n| ackermann_g(k, &BigUint::from(n), &cap).to_string()).collect();
        println!("g_{k}(1..4) = {}", row.join(", "));
    }
    for n in [4u64, 16, 2048, 1_000_000] {
        let n = BigUint::from(n);
        println!("alpha({n}) = {}, diagonal alpha({n}) = {}", alpha(&n), alpha_diag(&n)?);
    }

    let b = delta_bound(&DeltaBoundQuery::new(1e6, 1.0, 1.0)?);
    println!(
        "distortion bound at n = 1e6: {:.6} (stop: {}, {} levels, last argument {:.6})",
        b.value,
        b.stop,
        b.chain.len(),
        b.chain.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}
