//! Grid sweeps: one CSV row per cell of a parameter cross product.
//!
//! A config names a subcommand, fixed `args`, optional `positional` words
//! (which may contain `{key}` placeholders) and a `grid` of value lists.
//! Grid keys are taken in sorted order with the first key varying slowest.
//! Seeded subcommands get a per-cell seed derived from the root seed, unless
//! the config pins `seed` itself.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use super::commands::{cell_text, csv_table};
use super::output::{render, to_value, RunManifest};
use super::{dispatch_with_seed, input, Ctx, Rendered, SweepArgs};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, sha256_hex};

const SEEDED: [&str; 5] = ["ratio", "jl-embed", "jl-mechanism", "walsh", "compare-norms"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    command: String,
    #[serde(default)]
    args: BTreeMap<String, Value>,
    #[serde(default)]
    positional: Vec<Value>,
    #[serde(default)]
    grid: BTreeMap<String, Vec<Value>>,
}

/// Cross product in odometer order; empty when the grid or any list is empty.
fn cells(grid: &BTreeMap<String, Vec<Value>>) -> Vec<Vec<&Value>> {
    if grid.is_empty() || grid.values().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out: Vec<Vec<&Value>> = vec![Vec::new()];
    for values in grid.values() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

struct Cell {
    seed: Option<u64>,
    fields: BTreeMap<String, String>,
    error: Option<String>,
}

fn cell_argv(cfg: &Config, point: &BTreeMap<&str, &Value>, seed: Option<u64>) -> Vec<String> {
    let mut argv = vec!["banach-gauge".to_string(), cfg.command.clone()];
    let mut placed = BTreeSet::new();
    for p in &cfg.positional {
        let mut word = cell_text(p);
        for (k, v) in point {
            let hole = format!("{{{k}}}");
            if word.contains(&hole) {
                word = word.replace(&hole, &cell_text(v));
                placed.insert(*k);
            }
        }
        argv.push(word);
    }
    let mut flags: BTreeMap<&str, &Value> = cfg.args.iter().map(|(k, v)| (k.as_str(), v)).collect();
    flags.extend(point.iter().filter(|(k, _)| !placed.contains(*k)).map(|(k, v)| (*k, *v)));
    for (k, v) in flags {
        match v {
            Value::Bool(false) => {}
            Value::Bool(true) => argv.push(format!("--{k}")),
            other => {
                argv.push(format!("--{k}"));
                argv.push(cell_text(other));
            }
        }
    }
    if let Some(s) = seed {
        argv.push("--seed".into());
        argv.push(s.to_string());
    }
    argv
}

/// Top-level scalars, and scalars one object level down as `outer.inner`.
fn flatten(v: &Value) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let Value::Object(map) = v else {
        out.insert("value".into(), cell_text(v));
        return out;
    };
    for (k, x) in map {
        match x {
            Value::Array(_) => {}
            Value::Object(inner) if k != "manifest" => {
                for (k2, y) in inner {
                    if !y.is_array() && !y.is_object() {
                        out.insert(format!("{k}.{k2}"), cell_text(y));
                    }
                }
            }
            Value::Object(_) => {}
            scalar => {
                out.insert(k.clone(), cell_text(scalar));
            }
        }
    }
    out
}

fn run_cell(cfg: &Config, keys: &[&str], values: &[&Value], seed: Option<u64>) -> Cell {
    let point: BTreeMap<&str, &Value> = keys.iter().copied().zip(values.iter().copied()).collect();
    let o = dispatch_with_seed(cell_argv(cfg, &point, seed), None);
    if o.code == 0 {
        let fields = match serde_json::from_str::<Value>(&o.stdout) {
            Ok(v) => flatten(&v),
            Err(_) => BTreeMap::from([("value".to_string(), o.stdout.trim().to_string())]),
        };
        return Cell { seed, fields, error: None };
    }
    let msg = serde_json::from_str::<Value>(&o.stdout)
        .ok()
        .and_then(|v| {
            let e = v.get("error")?;
            Some(format!("{}: {}", e.get("kind")?.as_str()?, e.get("message")?.as_str()?))
        })
        .unwrap_or_else(|| o.stderr.lines().find(|l| !l.trim().is_empty()).unwrap_or("failed").trim().to_string());
    Cell { seed, fields: BTreeMap::new(), error: Some(msg) }
}

pub(super) fn run(a: SweepArgs, ctx: &Ctx) -> Result<Rendered> {
    let start = Instant::now();
    let cfg: Config = serde_json::from_value(input::read_json(&a.config)?)
        .map_err(|e| Error::Parse(format!("sweep config: {e}")))?;
    if cfg.command == "sweep" {
        return Err(Error::DomainError("sweeps cannot nest".into()));
    }
    let root = ctx.seed(a.seed);
    let keys: Vec<&str> = cfg.grid.keys().map(String::as_str).collect();
    let pins_seed = cfg.args.contains_key("seed") || cfg.grid.contains_key("seed");
    let wants_seed = SEEDED.contains(&cfg.command.as_str()) && !pins_seed;

    let grid_cells = cells(&cfg.grid);
    let results: Vec<Cell> = grid_cells
        .par_iter()
        .enumerate()
        .map(|(i, vals)| {
            let seed = wants_seed.then(|| derive_seed(root, "sweep-cell", i as u64));
            run_cell(&cfg, &keys, vals, seed)
        })
        .collect();

    // A field echoing a grid key would duplicate that column.
    let columns: BTreeSet<&String> = results
        .iter()
        .flat_map(|c| c.fields.keys())
        .filter(|k| !keys.contains(&k.as_str()))
        .collect();
    let mut header: Vec<String> = vec!["cell".into()];
    header.extend(keys.iter().map(|k| k.to_string()));
    header.push("cell_seed".into());
    header.extend(columns.iter().map(|c| c.to_string()));
    header.push("error".into());
    let rows: Vec<Vec<String>> = results
        .iter()
        .zip(&grid_cells)
        .enumerate()
        .map(|(i, (c, vals))| {
            let mut row = vec![i.to_string()];
            row.extend(vals.iter().map(|v| cell_text(v)));
            row.push(c.seed.map(|s| s.to_string()).unwrap_or_default());
            row.extend(columns.iter().map(|k| c.fields.get(*k).cloned().unwrap_or_default()));
            row.push(c.error.clone().unwrap_or_default());
            row
        })
        .collect();
    let table = csv_table(&header, &rows)?;

    if let Some(path) = &a.manifest_out {
        let manifest = RunManifest {
            command: "sweep".into(),
            args: vec!["--config".into(), a.config.clone()],
            seed: Some(root),
            version: env!("CARGO_PKG_VERSION"),
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            output_digest: sha256_hex(table.as_bytes()),
        };
        std::fs::write(path, render(&to_value(&manifest)) + "\n").map_err(|e| Error::Io(format!("{path}: {e}")))?;
    }
    Ok(Rendered::Csv(table))
}
