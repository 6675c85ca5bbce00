//! File-driven commands behind the `dynfgt` binary.

pub mod bench;
pub mod files;
pub mod state;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{exact_gauss_transform, DynamicFgt64, FgtConfig64, FgtError};
use files::{parse_charges, parse_ops, parse_point_file, UpdateOp};

pub use bench::{run_bench, BenchConfig, BenchRow};
pub use state::{decode_state, encode_state};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Verify(String),
    #[error(transparent)]
    Fgt(#[from] FgtError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub(crate) fn data(line: usize, msg: impl std::fmt::Display) -> Self {
        CliError::Data(format!("line {line}: {msg}"))
    }

    /// Process exit status: 1 usage, 2 data, 3 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Fgt(FgtError::InvalidParameter(_) | FgtError::AccuracyUnreachable { .. }) => 1,
            CliError::Verify(_) => 3,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn out_err(source: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

pub fn load_state(path: &Path) -> Result<DynamicFgt64, CliError> {
    decode_state(&read(path)?).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_targets(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read(path)?;
    let parsed = parse_point_file(&text, false, Some(dim)).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok(parsed.points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub delta: f64,
    pub eps: f64,
    pub r: f64,
    pub capacity: Option<f64>,
}

/// Builds a structure from a point file and writes its state. A file with
/// neither rows nor a `dim=` header yields an empty one-dimensional structure.
pub fn cmd_build(sources: &Path, opts: &BuildOptions, out: &Path) -> Result<(), CliError> {
    let text = read(sources)?;
    let parsed = parse_point_file(&text, true, None).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", sources.display())),
        other => other,
    })?;
    let mut config = FgtConfig64::new(parsed.dim.unwrap_or(1), opts.delta, opts.eps).with_r(opts.r);
    config.capacity = opts.capacity;
    let fgt = DynamicFgt64::init(&parsed.points, &parsed.charges, &config)?;
    write_file(out, &encode_state(&fgt))
}

pub fn cmd_query(state: &Path, targets: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let fgt = load_state(state)?;
    let targets = load_targets(targets, fgt.params().dim())?;
    for t in &targets {
        writeln!(out, "{:.16e}", fgt.kde_query(t)?).map_err(out_err)?;
    }
    Ok(())
}

/// Applies an update script in order and rewrites the state. Nothing is
/// written if any line fails.
pub fn cmd_update(state: &Path, ops: &Path) -> Result<(), CliError> {
    let mut fgt = load_state(state)?;
    let ops = parse_ops(&read(ops)?, fgt.params().dim())?;
    for (line, op) in ops {
        let res = match op {
            UpdateOp::Insert(s, q) => fgt.insert(&s, q).map(|_| ()),
            UpdateOp::Delete(s) => fgt.delete(&s).map(|_| ()),
        };
        res.map_err(|e| CliError::data(line, e))?;
    }
    write_file(state, &encode_state(&fgt))
}

pub fn cmd_matvec(state: &Path, charges: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let mut fgt = load_state(state)?;
    let q = parse_charges(&read(charges)?)?;
    if q.len() != fgt.len() {
        return Err(CliError::Data(format!(
            "{}: expected {} charges, found {}",
            charges.display(),
            fgt.len(),
            q.len()
        )));
    }
    for v in fgt.matvec(&q)? {
        writeln!(out, "{v:.16e}").map_err(out_err)?;
    }
    Ok(())
}

/// Prints `approx,exact` per target and a `max_abs_diff=` summary. Fails with
/// a verification error when the largest difference exceeds `ε` (or the
/// override).
pub fn cmd_verify(state: &Path, targets: &Path, eps: Option<f64>, out: &mut impl Write) -> Result<(), CliError> {
    let fgt = load_state(state)?;
    let targets = load_targets(targets, fgt.params().dim())?;
    let (points, charges): (Vec<Vec<f64>>, Vec<f64>) = fgt.registry().into_iter().unzip();
    let delta = fgt.params().delta();
    let mut max_diff = 0.0f64;
    for t in &targets {
        let approx = fgt.kde_query(t)?;
        let exact = exact_gauss_transform(&points, &charges, t, delta);
        max_diff = max_diff.max((approx - exact).abs());
        writeln!(out, "{approx:.16e},{exact:.16e}").map_err(out_err)?;
    }
    writeln!(out, "max_abs_diff={max_diff}").map_err(out_err)?;
    let limit = eps.unwrap_or(fgt.params().eps());
    if max_diff > limit {
        return Err(CliError::Verify(format!("max_abs_diff {max_diff} exceeds {limit}")));
    }
    Ok(())
}
