//! On-disk structure state: parameters plus registry. Coefficients are
//! recomputed on load.

use std::fmt::Write as _;

use super::CliError;
use crate::{DynamicFgt64, GridParams64};

const HEADER: &str = "dynfgt-state v1";

pub fn encode_state(fgt: &DynamicFgt64) -> String {
    let p = fgt.params();
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    let _ = writeln!(s, "dim={}", p.dim());
    let _ = writeln!(s, "delta={:.16e}", p.delta());
    let _ = writeln!(s, "eps={:.16e}", p.eps());
    let _ = writeln!(s, "r={:.16e}", p.r());
    let _ = writeln!(s, "q_budget={:.16e}", p.q_budget());
    let _ = writeln!(s, "p={}", p.p());
    let _ = writeln!(s, "k={}", p.k());
    match fgt.capacity() {
        Some(c) => {
            let _ = writeln!(s, "capacity={c:.16e}");
        }
        None => {
            let _ = writeln!(s, "capacity=none");
        }
    }
    let registry = fgt.registry();
    let _ = writeln!(s, "count={}", registry.len());
    for (point, q) in registry {
        for x in point {
            let _ = write!(s, "{x:.16e},");
        }
        let _ = writeln!(s, "{q:.16e}");
    }
    s
}

fn field<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str), CliError> {
    let (n, line) = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("state: missing {key}")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .map(|v| (n, v.trim()))
        .ok_or_else(|| CliError::data(n, format!("state: expected {key}=")))
}

fn parsed<T: std::str::FromStr>(item: (usize, &str)) -> Result<T, CliError> {
    item.1
        .parse()
        .map_err(|_| CliError::data(item.0, format!("state: cannot parse {:?}", item.1)))
}

pub fn decode_state(text: &str) -> Result<DynamicFgt64, CliError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(CliError::Data(format!("state: missing {HEADER:?} header"))),
    }
    let dim: usize = parsed(field(&mut lines, "dim")?)?;
    let delta: f64 = parsed(field(&mut lines, "delta")?)?;
    let eps: f64 = parsed(field(&mut lines, "eps")?)?;
    let r: f64 = parsed(field(&mut lines, "r")?)?;
    let q_budget: f64 = parsed(field(&mut lines, "q_budget")?)?;
    let p: usize = parsed(field(&mut lines, "p")?)?;
    let k: usize = parsed(field(&mut lines, "k")?)?;
    let cap = field(&mut lines, "capacity")?;
    let capacity: Option<f64> = if cap.1 == "none" { None } else { Some(parsed(cap)?) };
    let count: usize = parsed(field(&mut lines, "count")?)?;

    let rows: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.is_empty()).collect();
    if rows.len() != count {
        return Err(CliError::Data(format!("state: expected {count} rows, found {}", rows.len())));
    }
    let mut body = String::new();
    for (_, l) in &rows {
        body.push_str(l);
        body.push('\n');
    }
    let parsed_rows = super::files::parse_point_file(&body, true, Some(dim)).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("state body: {m}")),
        other => other,
    })?;
    let params = GridParams64::with_orders(dim, delta, eps, r, q_budget, p, k)?;
    let mut fgt = DynamicFgt64::with_params(&parsed_rows.points, &parsed_rows.charges, params)?;
    fgt.set_capacity(capacity);
    Ok(fgt)
}
