//! Johnson's modified norm against the Tsirelson norm on small supports.
//!
//! Run with `cargo run --example modified_norms`.

use banach_gauge::seqvec::{rat_to_f64, FinVec};
use banach_gauge::tsirelson::{modified_norm, modified_t2_norm_sq, t2_norm_sq, tsirelson_norm};

fn main() -> banach_gauge::Result<()> {
    let samples = [
        FinVec::from_ratios(&[(1, 1, 1), (2, 1, 1)]),
        FinVec::from_ratios(&[(2, 1, 1), (3, 1, 1), (4, 1, 1)]),
        FinVec::from_ratios(&[(3, 1, 2), (4, -1, 2), (7, 1, 1), (8, 1, 3)]),
        FinVec::from_ratios(&(4..=10).map(|j| (j, 1, 1)).collect::<Vec<_>>()),
    ];
    println!("{:<40} {:>10} {:>10} {:>10} {:>10}", "x", "T", "mod", "T2^2", "mod2^2");
    for x in &samples {
        let t = tsirelson_norm(x).value;
        let m = modified_norm(x)?;
        let t2 = t2_norm_sq(x).value;
        let m2 = modified_t2_norm_sq(x)?;
        // Admissible families are a subset of the modified ones.
        assert!(t <= m && t2 <= m2);
        println!("{:<40} {:>10} {:>10} {:>10} {:>10}", x.to_string(), t, m, t2, m2);
    }
    let x = &samples[3];
    let ratio = rat_to_f64(&modified_t2_norm_sq(x)?) / rat_to_f64(&t2_norm_sq(x).value);
    println!("squared ratio mod2/T2 on the flat block [4, 10]: {ratio:.4}");
    Ok(())
}
