//! Latency scaling benchmark.
//!
//! For each `(d, N)` cell: `N` uniform sources in `[0,1]^d` with charges in
//! `[0,1]`, then `ops` timed queries, `ops` timed inserts and `ops` timed
//! deletes of the inserted points. The capacity covers the inserted mass so
//! no rebuild lands inside the timed region.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CliError;
use crate::{DynamicFgt64, FgtConfig64};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dims: Vec<usize>,
    pub sizes: Vec<usize>,
    pub delta: f64,
    pub eps: f64,
    pub seed: u64,
    pub ops: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub d: usize,
    pub median_insert_ns: f64,
    pub median_query_ns: f64,
    pub median_delete_ns: f64,
}

/// Inputs of one benchmark cell, fully determined by the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub points: Vec<Vec<f64>>,
    pub charges: Vec<f64>,
    pub queries: Vec<Vec<f64>>,
    pub inserts: Vec<(Vec<f64>, f64)>,
}

pub fn workload(seed: u64, d: usize, n: usize, ops: usize) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((d as u64) << 48) ^ n as u64);
    let point = |rng: &mut ChaCha8Rng| (0..d).map(|_| rng.gen::<f64>()).collect::<Vec<f64>>();
    let points = (0..n).map(|_| point(&mut rng)).collect();
    let charges = (0..n).map(|_| rng.gen::<f64>()).collect();
    let queries = (0..ops).map(|_| point(&mut rng)).collect();
    let inserts = (0..ops).map(|_| (point(&mut rng), rng.gen::<f64>())).collect();
    Workload {
        points,
        charges,
        queries,
        inserts,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn timed<F: FnMut() -> Result<(), CliError>>(mut f: F) -> Result<f64, CliError> {
    let start = Instant::now();
    f()?;
    Ok(start.elapsed().as_nanos() as f64)
}

pub fn bench_cell(cfg: &BenchConfig, d: usize, n: usize) -> Result<BenchRow, CliError> {
    let w = workload(cfg.seed, d, n, cfg.ops);
    let inserted: f64 = w.inserts.iter().map(|(_, q)| q.abs()).sum();
    let total: f64 = w.charges.iter().map(|q| q.abs()).sum::<f64>() + inserted;
    // slack so summation-order rounding cannot trip a rebuild
    let config = FgtConfig64::new(d, cfg.delta, cfg.eps).with_capacity(total * 1.001);
    let mut fgt = DynamicFgt64::init(&w.points, &w.charges, &config)?;

    let mut sink = 0.0;
    let query_ns = w
        .queries
        .iter()
        .map(|t| {
            timed(|| {
                sink += fgt.kde_query(t)?;
                Ok(())
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let insert_ns = w
        .inserts
        .iter()
        .map(|(s, q)| {
            timed(|| {
                fgt.insert(s, *q)?;
                Ok(())
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let delete_ns = w
        .inserts
        .iter()
        .map(|(s, _)| {
            timed(|| {
                fgt.delete(s)?;
                Ok(())
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    std::hint::black_box(sink);
    Ok(BenchRow {
        n,
        d,
        median_insert_ns: median(insert_ns),
        median_query_ns: median(query_ns),
        median_delete_ns: median(delete_ns),
    })
}

/// Runs every cell and writes the CSV to `out`.
pub fn run_bench(cfg: &BenchConfig, out: &mut impl Write) -> Result<Vec<BenchRow>, CliError> {
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    writeln!(out, "N,d,median_insert_ns,median_query_ns,median_delete_ns").map_err(io)?;
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        for &n in &cfg.sizes {
            let row = bench_cell(cfg, d, n)?;
            writeln!(
                out,
                "{},{},{:.0},{:.0},{:.0}",
                row.n, row.d, row.median_insert_ns, row.median_query_ns, row.median_delete_ns
            )
            .map_err(io)?;
            rows.push(row);
        }
    }
    Ok(rows)
}
