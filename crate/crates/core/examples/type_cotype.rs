//! Type-2 and cotype-2 ratios: exact sign averages, Gaussian Monte Carlo and
//! the Kwapień product bound.
//!
//! Run with `cargo run --example type_cotype`.

use banach_gauge::gauss::{
    c2_lower_from_witness, gaussian_ratio, kwapien_upper, rademacher_ratio, NormKind, RatioKind, RootRat,
    SpaceOracle, VectorFamily,
};
use banach_gauge::seqvec::rat;

fn main() -> banach_gauge::Result<()> {
    // In l1 the unit vectors are as far from Hilbertian as it gets.
    let dim = 6;
    let units: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| f64::from(i == j)).collect()).collect();
    for (p, label) in [(1.0, "l1"), (2.0, "l2"), (f64::INFINITY, "linf")] {
        let fam = VectorFamily::float(units.clone(), SpaceOracle::lp(dim, p)?)?;
        let ty = rademacher_ratio(&fam, RatioKind::Type)?;
        let co = rademacher_ratio(&fam, RatioKind::Cotype)?;
        println!("{label}: type ratio {:.4}, cotype ratio {:.4}", ty.point, co.point);
    }

    // Gaussian estimate with a confidence interval.
    let fam = VectorFamily::float(units, SpaceOracle::lp(dim, 1.0)?)?;
    let g = gaussian_ratio(&fam, RatioKind::Type, 200_000, 7)?;
    println!("l1 gaussian type ratio {:.4} in [{:.4}, {:.4}]", g.point, g.ci_low, g.ci_high);

    // An exact witness in T2: two flat coordinates.
    let half = RootRat::sqrt_of(rat(1, 2))?;
    let z = RootRat::zero();
    let vecs = vec![vec![half.clone(), z.clone(), z.clone(), z.clone()], vec![z.clone(), z.clone(), z, half]];
    let fam = VectorFamily::exact(vecs, SpaceOracle::new(4, NormKind::T2)?)?;
    let est = rademacher_ratio(&fam, RatioKind::Cotype)?;
    let lower = c2_lower_from_witness(&est);
    println!(
        "T2 cotype witness: exact ratio {}, so c2 >= {:.6} (certified: {})",
        est.exact.as_ref().map(ToString::to_string).unwrap_or_default(),
        lower.value,
        lower.certified
    );
    println!("Kwapien: T2(X) <= 1.5 and C2(X) <= 2 give d(X, l2) <= {:.4}", kwapien_upper(1.5, 2.0)?);
    Ok(())
}
