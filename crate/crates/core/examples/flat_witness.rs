//! Cutting-plane search for the flattest vector on [3, N] and the cotype
//! certificate it yields in T2.
//!
//! Run with `cargo run --release --example flat_witness`.

use banach_gauge::flatsearch::{cotype_certificate_from_witness, search_flat};

fn main() -> banach_gauge::Result<()> {
    for n in 3..=8 {
        let rep = search_flat(n, 200)?;
        let cert = cotype_certificate_from_witness(&rep.witness)?;
        println!(
            "N = {n}: theta* = {} after {} LP round(s), converged {}; cotype ratio {}, c2 >= {:.4}",
            rep.witness.theta,
            rep.lp_rounds(),
            rep.converged,
            cert.ratio,
            cert.c2_lower
        );
    }
    let rep = search_flat(8, 200)?;
    println!("witness for N = 8: {}", rep.witness.x);
    Ok(())
}
