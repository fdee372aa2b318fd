//! Exact Tsirelson norms with certificates, checked against brute force.
//!
//! Run with `cargo run --example tsirelson_norms`.

use banach_gauge::seqvec::FinVec;
use banach_gauge::tsirelson::{
    norming_functional, tsirelson_norm, tsirelson_norm_bruteforce, validate_certificate, t2_norm_sq,
};

fn main() -> banach_gauge::Result<()> {
    let vectors = [
        ("e_1 + e_2", FinVec::from_ratios(&[(1, 1, 1), (2, 1, 1)])),
        ("e_3 + e_4", FinVec::from_ratios(&[(3, 1, 1), (4, 1, 1)])),
        ("flat on [3, 5]", FinVec::from_ratios(&[(3, 1, 3), (4, 1, 3), (5, 1, 3)])),
        ("mixed signs", FinVec::from_ratios(&[(2, 3, 1), (5, -1, 2), (6, 2, 1), (9, -1, 1), (11, 1, 4)])),
    ];
    for (name, x) in &vectors {
        let r = tsirelson_norm(x);
        let brute = tsirelson_norm_bruteforce(x)?;
        assert_eq!(r.value, brute);
        assert!(validate_certificate(&r.certificate, x)?);
        let f = norming_functional(&r.certificate)?;
        println!("{name}: x = {x}");
        println!("  ||x||_T = {} (brute force agrees), tree depth {}", r.value, r.certificate.root.depth());
        println!("  norming functional f = {f}, <f, |x|> = {}", f.dot(&x.abs()));
        println!("  ||x||_T2^2 = {}", t2_norm_sq(x).value);
    }

    // The DP scales well past the brute-force cap.
    let long = FinVec::from_ratios(&(1..=40).map(|j| (j, 1, j as i64)).collect::<Vec<_>>());
    let r = tsirelson_norm(&long);
    println!("harmonic block on [1, 40]: ||x||_T = {:.6} ({} memo entries)",
        banach_gauge::seqvec::rat_to_f64(&r.value), r.stats.memo_entries);
    Ok(())
}
