//! Checks shared by the integration suites. Each returns a one-line summary or
//! a description of the first failure.

#![allow(dead_code)]

use dynfgt::cli::{run_bench, BenchConfig};
use dynfgt::{
    combined_trunc_bound, compute_a, compute_c, cramer_bound, enumerate_truncated, eval_taylor,
    exact_gauss_transform, exact_matvec, hermite_fn_row, hermite_poly_row, hermite_trunc_bound, multi_hermite,
    oracle::far_field_bound, BoundInputs, BoxId, DynamicFgt64, FgtConfig64, GridParams64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cube(rng: &mut ChaCha8Rng, n: usize, d: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(lo..hi)).collect()).collect()
}

pub fn charges(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// `|a − b| ≤ tol + tol·max(|a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn compare_arrays(what: &str, got: &[(BoxId, Vec<f64>)], want: &[(BoxId, Vec<f64>)], tol: f64) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{what}: {} boxes vs {}", got.len(), want.len()));
    }
    for ((ia, a), (ib, b)) in got.iter().zip(want) {
        if ia != ib {
            return Err(format!("{what}: box {ia} vs {ib}"));
        }
        for (n, (x, y)) in a.iter().zip(b).enumerate() {
            if !close(*x, *y, tol) {
                return Err(format!("{what}: box {ia} entry {n}: {x:e} vs {y:e}"));
            }
        }
    }
    Ok(())
}

fn in_box(rng: &mut ChaCha8Rng, center: &[f64], side: f64) -> Vec<f64> {
    center.iter().map(|c| c + side * rng.gen_range(-0.4999..0.4999)).collect()
}

/// Static accuracy over random instances.
pub fn static_accuracy(instances: usize, max_n: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let eps = 1e-4;
    let mut worst = 0.0f64;
    for i in 0..instances {
        let d = 1 + i % 3;
        let n = rng.gen_range(1..=max_n);
        let delta = rng.gen_range(0.05..=1.0);
        let pts = cube(&mut rng, n, d, 0.0, 1.0);
        let q = charges(&mut rng, n);
        let fgt = DynamicFgt64::init(&pts, &q, &FgtConfig64::new(d, delta, eps)).map_err(|e| e.to_string())?;
        for t in cube(&mut rng, 50, d, -0.1, 1.1) {
            let err = (fgt.kde_query(&t).map_err(|e| e.to_string())? - exact_gauss_transform(&pts, &q, &t, delta)).abs();
            worst = worst.max(err);
            if err > eps {
                return Err(format!("instance {i} (d={d}, N={n}, delta={delta:.4}): error {err:e} at {t:?}"));
            }
        }
    }
    Ok(format!("{instances} instances x 50 targets, worst error {worst:.3e}"))
}

/// Random insert/delete sequences checked against a from-scratch rebuild.
pub fn dynamic_consistency(sequences: usize, ops: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let eps = 1e-4;
    let mut worst = 0.0f64;
    let mut rebuilds = 0;
    for seq in 0..sequences {
        let delta = rng.gen_range(0.05..0.5);
        let n0 = rng.gen_range(0..100);
        let pts = cube(&mut rng, n0, 2, 0.0, 1.0);
        let q = charges(&mut rng, n0);
        let mut fgt = DynamicFgt64::init(&pts, &q, &FgtConfig64::new(2, delta, eps)).map_err(|e| e.to_string())?;
        for t in cube(&mut rng, 10, 2, 0.0, 1.0) {
            fgt.kde_query(&t).map_err(|e| e.to_string())?;
        }
        for op in 1..=ops {
            let reg = fgt.registry();
            if reg.is_empty() || rng.gen_bool(0.6) {
                let s = if !reg.is_empty() && rng.gen_bool(0.1) {
                    reg[rng.gen_range(0..reg.len())].0.clone()
                } else {
                    cube(&mut rng, 1, 2, -0.2, 1.2).remove(0)
                };
                fgt.insert(&s, rng.gen_range(-1.0..1.0)).map_err(|e| e.to_string())?;
            } else {
                let s = reg[rng.gen_range(0..reg.len())].0.clone();
                fgt.delete(&s).map_err(|e| e.to_string())?;
            }
            if op % 7 == 0 {
                let t = cube(&mut rng, 1, 2, -0.2, 1.2).remove(0);
                fgt.kde_query(&t).map_err(|e| e.to_string())?;
            }
            if op % 50 == 0 {
                let (p, c): (Vec<Vec<f64>>, Vec<f64>) = fgt.registry().into_iter().unzip();
                let fresh = DynamicFgt64::with_params(&p, &c, fgt.params().clone()).map_err(|e| e.to_string())?;
                let ctx = |e: String| format!("sequence {seq} op {op}: {e}");
                compare_arrays("A", &fgt.source_coefficients(), &fresh.source_coefficients(), 1e-8).map_err(ctx)?;
                let targets = fgt.target_coefficients();
                let rebuilt: Vec<(BoxId, Vec<f64>)> = targets
                    .iter()
                    .map(|(id, _)| (id.clone(), fresh.fresh_target_coefficients(id)))
                    .collect();
                compare_arrays("C", &targets, &rebuilt, 1e-8).map_err(ctx)?;
                for t in cube(&mut rng, 20, 2, -0.2, 1.2) {
                    let err = (fgt.kde_query(&t).map_err(|e| e.to_string())? - exact_gauss_transform(&p, &c, &t, delta)).abs();
                    worst = worst.max(err);
                    if err > eps {
                        return Err(ctx(format!("query error {err:e} at {t:?}")));
                    }
                }
            }
        }
        rebuilds += fgt.rebuilds();
    }
    Ok(format!(
        "{sequences} sequences x {ops} ops, arrays within 1e-8, worst query error {worst:.3e}, {rebuilds} rebuilds"
    ))
}

/// Mat-vec accuracy, then sparse updates against a fresh full product.
pub fn matvec_accuracy(instances: usize, max_n: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let eps = 1e-4;
    let (mut worst, mut worst_delta) = (0.0f64, 0.0f64);
    for i in 0..instances {
        let d = 1 + i % 3;
        let n = rng.gen_range(2..=max_n);
        let delta = rng.gen_range(0.05..=1.0);
        let pts = cube(&mut rng, n, d, 0.0, 1.0);
        let q0 = charges(&mut rng, n);
        let mut fgt = DynamicFgt64::init(&pts, &q0, &FgtConfig64::new(d, delta, eps)).map_err(|e| e.to_string())?;
        let w = charges(&mut rng, n);
        let approx = fgt.matvec(&w).map_err(|e| e.to_string())?;
        for (j, (a, e)) in approx.iter().zip(exact_matvec(&pts, &w, delta)).enumerate() {
            worst = worst.max((a - e).abs());
            if (a - e).abs() > eps {
                return Err(format!("instance {i} (d={d}, N={n}): coordinate {j} error {:e}", (a - e).abs()));
            }
        }
        let changes: Vec<(usize, f64)> = (0..rng.gen_range(1..=20))
            .map(|_| (rng.gen_range(0..n), rng.gen_range(-1.0..1.0)))
            .collect();
        fgt.matvec_delta(&changes).map_err(|e| e.to_string())?;
        let mut w2 = w.clone();
        for &(j, v) in &changes {
            w2[j] = v;
        }
        let params = fgt.matvec_params().unwrap().clone();
        let fresh = DynamicFgt64::with_params(&pts, &w2, params).map_err(|e| e.to_string())?;
        let merged = fgt.matvec_values().unwrap().to_vec();
        for (j, s) in pts.iter().enumerate() {
            let f = fresh.kde_query(s).map_err(|e| e.to_string())?;
            worst_delta = worst_delta.max((merged[j] - f).abs());
            if !close(merged[j], f, 1e-9) {
                return Err(format!("instance {i}: sparse update coordinate {j}: {:e} vs {f:e}", merged[j]));
            }
        }
        let exact2 = exact_matvec(&pts, &w2, delta);
        if merged.iter().zip(&exact2).any(|(a, e)| (a - e).abs() > eps) {
            return Err(format!("instance {i}: updated product leaves the eps band"));
        }
    }
    Ok(format!(
        "{instances} instances, worst l_inf error {worst:.3e}, worst sparse-vs-fresh gap {worst_delta:.3e}"
    ))
}

/// Recurrence closed forms and the Cramer growth bound.
pub fn hermite_machinery(samples: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for _ in 0..samples {
        // dyadic samples keep every product exact, so equality is bitwise
        let t = f64::from(rng.gen_range(-5120i32..=5120)) / 1024.0;
        let row = hermite_poly_row(t, 3).values;
        let forms = [2.0 * t, 4.0 * t * t - 2.0, 8.0 * t * t * t - 12.0 * t];
        if row[1..] != forms {
            return Err(format!("closed forms differ at t={t}: {:?} vs {forms:?}", &row[1..]));
        }
        let t: f64 = rng.gen_range(-5.0..5.0);
        let row = hermite_poly_row(t, 3).values;
        let forms = [2.0 * t, 4.0 * t * t - 2.0, 8.0 * t * t * t - 12.0 * t];
        if row[1] != forms[0] || row[2] != forms[1] || !close(row[3], forms[2], 1e-12) {
            return Err(format!("closed forms differ at t={t}"));
        }
    }
    let mut checked = 0;
    for _ in 0..samples {
        let t: f64 = rng.gen_range(-10.0..10.0);
        for (n, v) in hermite_fn_row(t, 80).values.iter().enumerate() {
            checked += 1;
            if v.abs() > cramer_bound(n, t) {
                return Err(format!("Cramer bound fails at n={n}, t={t}: {v:e}"));
            }
        }
    }
    Ok(format!("closed forms at {} points, {checked} Cramer checks", 2 * samples))
}

#[derive(Debug, Default)]
pub struct SweepCounts {
    pub hermite: usize,
    pub pipeline: usize,
    pub far_field: usize,
}

/// Empirical truncation and cutoff bounds over `d ∈ {1,2}`, `r ∈ {1/4, 1/2}`, `p = 2..=10`.
pub fn bound_sweeps(trials: usize, seed: u64) -> Result<SweepCounts, String> {
    let mut rng = rng(seed);
    let mut counts = SweepCounts::default();
    for d in 1..=2usize {
        for r in [0.25, 0.5] {
            for p in 2..=10usize {
                for trial in 0..trials {
                    let delta = rng.gen_range(0.05..=1.0);
                    let g = GridParams64::with_orders(d, delta, 1e-4, r, 1.0, p, 3).map_err(|e| e.to_string())?;
                    let bid = BoxId::new(&(0..d).map(|_| rng.gen_range(-3..=3)).collect::<Vec<i64>>());
                    let sb = g.center(&bid);
                    let n = rng.gen_range(1..=20);
                    let src: Vec<Vec<f64>> = (0..n).map(|_| in_box(&mut rng, &sb, g.side())).collect();
                    let q = charges(&mut rng, n);
                    let mass: f64 = q.iter().map(|x| x.abs()).sum();
                    let b = BoundInputs { p, r, d, q: mass };
                    let a = compute_a(src.iter().map(|s| s.as_slice()).zip(q.iter().copied()), &sb, &g)
                        .map_err(|e| e.to_string())?;
                    let set = enumerate_truncated(d, p).map_err(|e| e.to_string())?;
                    let tag = format!("d={d} r={r} p={p} trial={trial}");

                    let hb = hermite_trunc_bound(&b);
                    for t in cube(&mut rng, 10, d, -4.0 * g.side(), 4.0 * g.side()) {
                        let t: Vec<f64> = t.iter().zip(&sb).map(|(x, c)| x + c).collect();
                        let arg: Vec<f64> = sb.iter().zip(&t).map(|(c, x)| (c - x) / g.sqrt_delta()).collect();
                        let series: f64 = set
                            .iter()
                            .zip(&a)
                            .map(|(alpha, av)| av * multi_hermite(alpha, &arg).unwrap())
                            .sum();
                        let err = (series - exact_gauss_transform(&src, &q, &t, delta)).abs();
                        counts.hermite += 1;
                        if err > hb {
                            return Err(format!("Hermite truncation {tag}: {err:e} > {hb:e}"));
                        }
                    }

                    let cb = combined_trunc_bound(&b);
                    for _ in 0..5 {
                        let off: Vec<i64> = bid.coords().iter().map(|c| c + rng.gen_range(-3..=3)).collect();
                        let tc = g.center(&BoxId::new(&off));
                        let c = compute_c(&tc, &[(&sb, &a)], &g);
                        let t = in_box(&mut rng, &tc, g.side());
                        let approx = eval_taylor(&c, &t, &tc, &g).map_err(|e| e.to_string())?;
                        let err = (approx - exact_gauss_transform(&src, &q, &t, delta)).abs();
                        counts.pipeline += 1;
                        if err > cb {
                            return Err(format!("Hermite-then-Taylor {tag}: {err:e} > {cb:e}"));
                        }
                    }

                    let spread = cube(&mut rng, 60, d, -10.0 * g.side(), 10.0 * g.side());
                    let sq = charges(&mut rng, 60);
                    let total: f64 = sq.iter().map(|x| x.abs()).sum();
                    let t = cube(&mut rng, 1, d, -2.0 * g.side(), 2.0 * g.side()).remove(0);
                    let full = exact_gauss_transform(&spread, &sq, &t, delta);
                    for k in 0..=8usize {
                        let cutoff = k as f64 * g.side();
                        let (near, nq): (Vec<Vec<f64>>, Vec<f64>) = spread
                            .iter()
                            .zip(&sq)
                            .filter(|(s, _)| s.iter().zip(&t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < cutoff)
                            .map(|(s, q)| (s.clone(), *q))
                            .unzip();
                        let err = (full - exact_gauss_transform(&near, &nq, &t, delta)).abs();
                        let fb = far_field_bound(k, r, total);
                        counts.far_field += 1;
                        if err > fb {
                            return Err(format!("far-field cutoff {tag} k={k}: {err:e} > {fb:e}"));
                        }
                    }
                }
            }
        }
    }
    Ok(counts)
}

pub fn bound_check(trials: usize, seed: u64) -> Check {
    let c = bound_sweeps(trials, seed)?;
    Ok(format!(
        "0 violations in {} Hermite, {} pipeline, {} far-field checks",
        c.hermite, c.pipeline, c.far_field
    ))
}

/// Median latency growth from `N = 10³` to `N = 10⁵` at `d = 2`.
pub fn scaling(ops: usize, seed: u64) -> Check {
    let cfg = BenchConfig {
        dims: vec![2],
        sizes: vec![1_000, 100_000],
        delta: 0.05,
        eps: 1e-4,
        seed,
        ops,
    };
    let rows = run_bench(&cfg, &mut std::io::sink()).map_err(|e| e.to_string())?;
    let (small, large) = (rows[0], rows[1]);
    let insert = large.median_insert_ns / small.median_insert_ns;
    let query = large.median_query_ns / small.median_query_ns;
    let summary = format!(
        "insert {:.0}ns -> {:.0}ns (x{insert:.2}), query {:.0}ns -> {:.0}ns (x{query:.2})",
        small.median_insert_ns, large.median_insert_ns, small.median_query_ns, large.median_query_ns
    );
    if insert <= 2.0 && query <= 2.0 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

/// Insert followed by delete restores every array.
pub fn reversibility(states: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..states {
        let d = 1 + i % 3;
        let n = rng.gen_range(0..300);
        let delta = rng.gen_range(0.05..=1.0);
        let pts = cube(&mut rng, n, d, 0.0, 1.0);
        let q = charges(&mut rng, n);
        let mass: f64 = q.iter().map(|x| x.abs()).sum();
        let config = FgtConfig64::new(d, delta, 1e-4).with_capacity(mass + 2.0);
        let mut fgt = DynamicFgt64::init(&pts, &q, &config).map_err(|e| e.to_string())?;
        for t in cube(&mut rng, 10, d, 0.0, 1.0) {
            fgt.kde_query(&t).map_err(|e| e.to_string())?;
        }
        let (a0, c0) = (fgt.source_coefficients(), fgt.target_coefficients());
        let s = cube(&mut rng, 1, d, -0.1, 1.1).remove(0);
        let charge = rng.gen_range(-1.0..1.0);
        fgt.insert(&s, charge).map_err(|e| e.to_string())?;
        fgt.delete(&s).map_err(|e| e.to_string())?;
        let ctx = |e: String| format!("state {i}: {e}");
        compare_arrays("A", &fgt.source_coefficients(), &a0, 1e-9).map_err(ctx)?;
        compare_arrays("C", &fgt.target_coefficients(), &c0, 1e-9).map_err(ctx)?;
        for ((_, x), (_, y)) in fgt.target_coefficients().iter().zip(&c0) {
            for (u, v) in x.iter().zip(y) {
                worst = worst.max((u - v).abs());
            }
        }
    }
    Ok(format!("{states} states restored, worst drift {worst:.3e}"))
}
