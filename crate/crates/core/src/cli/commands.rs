//! One function per subcommand, each returning an unrendered body.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::input;
use super::output::{format_f64, render, to_value};
use super::{
    CaratheodoryArgs, CertArgs, Command, CompareArgs, Ctx, DeltaArgs, FlatArgs, GrowthQuery, JlEmbedArgs, KindArg,
    MechanismArgs, ModeArg, NormArgs, RatioArgs, Rendered, SpaceArg, WalshArgs,
};
use crate::error::{Error, Result};
use crate::flatsearch::{cotype_certificate_from_witness, search_flat, FlatWitness};
use crate::gauss::{
    c2_lower_from_witness, caratheodory_reduce, gaussian_ratio, rademacher_ratio, RatioKind, RootRat, SpaceOracle,
    VectorFamily,
};
use crate::growth::{ackermann_g, alpha, alpha_diag, delta_bound, log_star, DeltaBoundQuery};
use crate::jl::{self, gaussian_points, jl_mechanism_experiment, jl_trials, walsh_orthogonality_check, walsh_pointset};
use crate::jl::{PointSet, WalshEnsemble};
use crate::seed::derive_seed;
use crate::seqvec::{rat, rat_to_f64, FinVec, Rat};
use crate::tsirelson::{exact_value, modified_t2_norm_sq, t2_norm_sq, tsirelson_norm, Space, DEFAULT_BRUTE_CAP};

pub(super) fn run(cmd: Command, ctx: &Ctx) -> Result<Rendered> {
    match cmd {
        Command::Norm(a) => norm(a),
        Command::Ratio(a) => ratio(a, ctx),
        Command::Caratheodory(a) => caratheodory(a),
        Command::JlEmbed(a) => jl_embed(a, ctx),
        Command::JlMechanism(a) => jl_mechanism(a, ctx),
        Command::Walsh(a) => walsh(a, ctx),
        Command::Growth { query } => growth(query),
        Command::DeltaBound(a) => delta(a),
        Command::FlatSearch(a) => flat_search(a),
        Command::CotypeCert(a) => cotype_cert(a),
        Command::CompareNorms(a) => compare_norms(a, ctx),
        Command::Sweep(a) => super::sweep::run(a, ctx),
    }
}

fn plain(body: Value) -> Rendered {
    Rendered::Json { body, seed: None }
}

fn seeded(body: Value, seed: u64) -> Rendered {
    Rendered::Json { body, seed: Some(seed) }
}

fn write_file(path: &str, text: &str) -> Result<()> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Error::Io(format!("{path}: {e}")))
}

/// CSV cell text; floats keep 17 significant digits as in JSON.
pub(super) fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        other => render(other),
    }
}

pub(super) fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells is UTF-8"))
}

/// Rows of a list of flat records; columns in field order of the first one.
fn records_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let values: Vec<Value> = records.iter().map(to_value).collect();
    let header: Vec<String> = match values.first() {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    };
    let rows: Vec<Vec<String>> = values
        .iter()
        .map(|v| header.iter().map(|k| cell_text(&v[k.as_str()])).collect())
        .collect();
    csv_table(&header, &rows)
}

fn space_of(s: SpaceArg) -> (Space, &'static str) {
    match s {
        SpaceArg::T => (Space::T, "T"),
        SpaceArg::T2 => (Space::T2, "T2"),
        SpaceArg::Mod => (Space::Modified, "mod"),
        SpaceArg::Mod2 => (Space::Modified2, "mod2"),
    }
}

fn norm(a: NormArgs) -> Result<Rendered> {
    let x = input::finvec(&input::read_json(&a.vec)?)?;
    let (space, name) = space_of(a.space);
    let squared = matches!(space, Space::T2 | Space::Modified2);
    let dp = match (space, a.brute) {
        (Space::T, false) => Some(tsirelson_norm(&x)),
        (Space::T2, false) => Some(t2_norm_sq(&x)),
        _ => None,
    };
    let exact = match &dp {
        Some(r) => r.value.clone(),
        None => exact_value(space, &x, a.brute)?,
    };
    let (value, norm) = if squared {
        (RootRat::sqrt_of(exact.clone())?.to_string(), rat_to_f64(&exact).sqrt())
    } else {
        (exact.to_string(), rat_to_f64(&exact))
    };
    let method = if dp.is_some() { "dynamic-program" } else { "exhaustive" };
    let mut body = json!({
        "space": name,
        "vector": x,
        "support": x.support_len(),
        "value": value,
        "norm": norm,
        "method": method,
    });
    if squared {
        body["value_sq"] = json!(exact.to_string());
    }
    if let Some(r) = &dp {
        // For T2 the tree certifies ‖(x_j²)‖_T, the squared norm.
        body["certificate"] = to_value(&r.certificate);
        body["stats"] = to_value(&r.stats);
    }
    if let Some(path) = &a.cert_out {
        let r = dp.ok_or_else(|| {
            Error::DomainError("certificates come from the dynamic program for T and T2 only".into())
        })?;
        write_file(path, &render(&r.certificate.root.to_json()))?;
    }
    Ok(plain(body))
}

fn kind_of(k: KindArg) -> RatioKind {
    match k {
        KindArg::Type => RatioKind::Type,
        KindArg::Cotype => RatioKind::Cotype,
    }
}

fn ratio(a: RatioArgs, ctx: &Ctx) -> Result<Rendered> {
    let vectors = input::family(&input::read_json(&a.vecs)?, a.dim)?;
    let dim = vectors.first().map_or(0, Vec::len);
    let space = SpaceOracle::parse_tag(&a.space, dim)?;
    let tag = space.tag();
    let count = vectors.len();
    let kind = kind_of(a.kind);
    let (est, seed) = match a.mode {
        ModeArg::Exact => (rademacher_ratio(&VectorFamily::exact(vectors, space)?, kind)?, None),
        ModeArg::Mc => {
            let seed = ctx.seed(a.seed);
            let floats = vectors.iter().map(|v| v.iter().map(RootRat::to_f64).collect()).collect();
            (gaussian_ratio(&VectorFamily::float(floats, space)?, kind, a.samples, seed)?, Some(seed))
        }
    };
    let body = json!({
        "space": tag,
        "dim": dim,
        "vectors": count,
        "kind": est.kind,
        "mode": est.mode,
        "point": est.point,
        "ci": [est.ci_low, est.ci_high],
        "exact": est.exact.as_ref().map(Rat::to_string),
        "samples": est.samples,
        "witness": c2_lower_from_witness(&est),
    });
    Ok(Rendered::Json { body, seed })
}

fn caratheodory(a: CaratheodoryArgs) -> Result<Rendered> {
    let vecs = input::float_family(&input::read_json(&a.vecs)?, Some(a.dim))?;
    let r = caratheodory_reduce(&vecs)?;
    let mass = |vs: &[Vec<f64>]| vs.iter().flatten().map(|x| x * x).sum::<f64>();
    let body = json!({
        "dim": a.dim,
        "inputs": vecs.len(),
        "bound": a.dim * (a.dim + 1) / 2,
        "nonzero": r.nonzero_weights(),
        "c1": r.weights.first(),
        "residual": r.relative_residual(&vecs),
        "mass_in": mass(&vecs),
        "mass_out": mass(&r.v) + mass(&r.w),
        "weights": r.weights,
        "permutation": r.permutation,
        "v": r.v,
        "w": r.w,
    });
    Ok(plain(body))
}

fn jl_embed(a: JlEmbedArgs, ctx: &Ctx) -> Result<Rendered> {
    let seed = ctx.seed(a.seed);
    let points = match (&a.points, a.random) {
        (Some(path), _) => PointSet::new(input::points(&input::read_json(path)?)?)?,
        (None, Some(n)) => gaussian_points(n, a.dim.unwrap_or(0), derive_seed(seed, "jl-points", 0))?,
        (None, None) => return Err(Error::DomainError("give --points or --random".into())),
    };
    if points.dim == 0 {
        return Err(Error::DomainError("points must have positive dimension".into()));
    }
    let Some(trials) = a.trials else {
        let e = jl::jl_embed(&points, a.eps, a.constant, seed)?;
        if let Some(path) = &a.map_out {
            write_file(path, &render(&json!({ "scale": e.map.scale, "rows": e.map.rows() })))?;
        }
        let body = json!({
            "points": points.len(),
            "source_dim": points.dim,
            "target_dim": e.target_dim,
            "eps": a.eps,
            "constant": a.constant,
            "attempts": e.attempts,
            "distortion": e.report.distortion,
            "scale": e.map.scale,
            "report": e.report,
        });
        return Ok(seeded(body, seed));
    };
    let seeds: Vec<u64> = (0..trials as u64).map(|t| derive_seed(seed, "jl-trial", t)).collect();
    let results = jl_trials(&points, a.eps, a.constant, &seeds)?;
    if a.csv {
        return records_csv(&results).map(Rendered::Csv);
    }
    let successes = results.iter().filter(|r| r.success).count();
    let body = json!({
        "points": points.len(),
        "source_dim": points.dim,
        "target_dim": jl::target_dimension(points.len(), a.eps, a.constant, points.dim),
        "eps": a.eps,
        "constant": a.constant,
        "trials": trials,
        "successes": successes,
        "success_rate": if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
        "note": "a failed draw is abandoned early; its distortion is a lower bound",
        "results": results,
    });
    Ok(seeded(body, seed))
}

fn jl_mechanism(a: MechanismArgs, ctx: &Ctx) -> Result<Rendered> {
    let family = input::float_family(&input::read_json(&a.family)?, None)?;
    let dim = family.first().map_or(0, Vec::len);
    let space = SpaceOracle::parse_tag(&a.space, dim)?;
    let seed = ctx.seed(a.seed);
    let report = jl_mechanism_experiment(&VectorFamily::float(family, space)?, a.eps, a.constant, seed, a.trials)?;
    if a.csv {
        return records_csv(&report.trials).map(Rendered::Csv);
    }
    Ok(seeded(to_value(&report), seed))
}

fn walsh(a: WalshArgs, ctx: &Ctx) -> Result<Rendered> {
    let family = input::float_family(&input::read_json(&a.family)?, None)?;
    let dim = family.first().map_or(0, Vec::len);
    let seed = ctx.seed(a.seed);
    let ens = WalshEnsemble::padded(a.m, &family, dim, derive_seed(seed, "walsh-g", 0))?;
    let points = walsh_pointset(&ens);
    let z: Vec<Vec<f64>> = ens.base.iter().zip(&ens.g).map(|(x, g)| x.iter().map(|v| g * v).collect()).collect();
    let check = walsh_orthogonality_check(a.m, &z, a.tol)?;
    let mut body = json!({
        "m": a.m,
        "family_size": family.len(),
        "dim": dim,
        "g": ens.g,
        "points": points.len(),
        "max_points": (1usize << (a.m + 1)) + 1,
        "orthogonality": check,
    });
    if a.emit_points {
        body["pointset"] = json!(points.points);
    }
    Ok(seeded(body, seed))
}

fn growth(q: GrowthQuery) -> Result<Rendered> {
    let text = match q {
        GrowthQuery::LogStar { x } => log_star(x)?.to_string(),
        GrowthQuery::G { k, n, cap } => ackermann_g(k, &n, &cap).to_string(),
        GrowthQuery::Alpha { n } => alpha(&n).to_string(),
        GrowthQuery::AlphaDiag { n } => alpha_diag(&n)?.to_string(),
        GrowthQuery::DeltaBound(a) => delta_bound(&DeltaBoundQuery::new(a.n, a.k, a.d)?).value.to_string(),
    };
    Ok(Rendered::Text(text))
}

fn delta(a: DeltaArgs) -> Result<Rendered> {
    let r = delta_bound(&DeltaBoundQuery::new(a.n, a.k, a.d)?);
    let body = json!({
        "n": a.n,
        "K": a.k,
        "D": a.d,
        "value": r.value,
        "stop": r.stop,
        "levels": r.chain.len(),
        "chain": r.chain,
    });
    Ok(plain(body))
}

fn flat_search(a: FlatArgs) -> Result<Rendered> {
    let r = search_flat(a.n, a.rounds)?;
    let cotype = cotype_certificate_from_witness(&r.witness)?;
    let body = json!({
        "N": a.n,
        "witness": r.witness.x,
        "theta": r.witness.theta.to_string(),
        "theta_f64": rat_to_f64(&r.witness.theta),
        "converged": r.converged,
        "lp_rounds": r.lp_rounds(),
        "pool_size": r.pool.len(),
        "certificate": r.witness.certificate,
        "cotype": cotype,
        "rounds": r.rounds,
    });
    Ok(plain(body))
}

/// Accepts a flat-search report, a serialized witness, or a bare vector.
fn read_witness(v: &Value, n: Option<usize>) -> Result<FlatWitness> {
    let (x, from_file) = if let Some(w) = v.get("witness") {
        (input::finvec(w)?, v.get("N"))
    } else if let Some(x) = v.get("x") {
        (input::finvec(x)?, v.get("n_bound"))
    } else {
        (input::finvec(v)?, None)
    };
    let from_file = from_file.and_then(Value::as_u64).map(|k| k as usize);
    let floor = x.max_index().map_or(3, |j| (j as usize).max(3));
    FlatWitness::new(x, n.or(from_file).unwrap_or(floor))
}

fn cotype_cert(a: CertArgs) -> Result<Rendered> {
    let w = read_witness(&input::read_json(&a.witness)?, a.n)?;
    let cert = cotype_certificate_from_witness(&w)?;
    let mut body = to_value(&cert);
    body["theta"] = json!(w.theta.to_string());
    if a.cross_check {
        let n = w.n_bound;
        let family = w
            .x
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| {
                let mut row = vec![RootRat::zero(); n];
                row[j as usize - 1] = RootRat::sqrt_of(v.clone())?;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let space = SpaceOracle::parse_tag("T2", n)?;
        let est = rademacher_ratio(&VectorFamily::exact(family, space)?, RatioKind::Cotype)?;
        body["cross_check"] = json!({
            "ratio": est.exact.as_ref().map(Rat::to_string),
            "agrees": est.exact.as_ref() == Some(&cert.ratio),
        });
    }
    Ok(plain(body))
}

#[derive(Debug, Serialize)]
struct CompareRow {
    index: usize,
    vector: String,
    t2_sq: String,
    mod2_sq: String,
    /// `‖x‖_{𝒯⁽²⁾} / ‖x‖_{T⁽²⁾}`
    ratio: f64,
}

fn random_entries(support: usize, seed: u64) -> FinVec {
    const VALUES: [(i64, i64); 7] = [(0, 1), (1, 2), (-1, 2), (1, 1), (-1, 1), (2, 1), (-2, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let x = FinVec::from_dense(
            &(0..support)
                .map(|_| {
                    let (p, q) = VALUES[rng.random_range(0..VALUES.len())];
                    rat(p, q)
                })
                .collect::<Vec<_>>(),
        );
        if !x.is_zero() {
            return x;
        }
    }
}

fn compare_norms(a: CompareArgs, ctx: &Ctx) -> Result<Rendered> {
    if a.support == 0 {
        return Err(Error::DomainError("support must be positive".into()));
    }
    if a.support > DEFAULT_BRUTE_CAP {
        return Err(Error::SupportTooLarge { size: a.support, cap: DEFAULT_BRUTE_CAP });
    }
    let seed = ctx.seed(a.seed);
    let rows: Vec<CompareRow> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let x = random_entries(a.support, derive_seed(seed, "compare-norms", i as u64));
            let t2 = t2_norm_sq(&x).value;
            let m2 = modified_t2_norm_sq(&x)?;
            Ok(CompareRow {
                index: i,
                vector: x.to_string(),
                ratio: (rat_to_f64(&m2) / rat_to_f64(&t2)).sqrt(),
                t2_sq: t2.to_string(),
                mod2_sq: m2.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    if a.csv {
        return records_csv(&rows).map(Rendered::Csv);
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let body = json!({
        "count": a.count,
        "support": a.support,
        "min_ratio": if rows.is_empty() { None } else { Some(min) },
        "max_ratio": if rows.is_empty() { None } else { Some(max) },
        "mean_ratio": if rows.is_empty() { None } else { Some(ratios.iter().sum::<f64>() / ratios.len() as f64) },
        "equal": rows.iter().filter(|r| r.t2_sq == r.mod2_sq).count(),
    });
    Ok(seeded(body, seed))
}
