//! Walsh point sets: the orthogonality identity, and the experiment that
//! turns a Euclidean embedding into type and cotype inequalities.
//!
//! Run with `cargo run --release --example walsh_mechanism`.

use banach_gauge::gauss::{SpaceOracle, VectorFamily};
use banach_gauge::jl::{jl_mechanism_experiment, walsh_orthogonality_check, walsh_pointset, WalshEnsemble};

fn main() -> banach_gauge::Result<()> {
    let family = vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 5.0], vec![3.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]];
    let ens = WalshEnsemble::from_family(&family, 3, 9)?;
    let check = walsh_orthogonality_check(ens.m, &ens.base, 1e-10)?;
    println!(
        "m = {}: sign average {:.6} vs sum of squares {:.6} (residual {:.1e})",
        ens.m, check.lhs, check.rhs, check.residual
    );
    println!("point set has {} points in R^{}", walsh_pointset(&ens).len(), ens.dim());

    let fam = VectorFamily::float(family, SpaceOracle::lp(3, 1.0)?)?;
    let rep = jl_mechanism_experiment(&fam, 0.5, 8.0, 4, 50)?;
    println!(
        "l1 mechanism over {} trials: max type ratio {:.4}, max cotype ratio {:.4}, all hold: {}",
        rep.trials.len(),
        rep.max_type_ratio,
        rep.max_cotype_ratio,
        rep.all_hold
    );
    Ok(())
}
