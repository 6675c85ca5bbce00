//! Text formats: point files, charge files and update scripts.

use super::CliError;

/// Parsed rows of a point file. `charges` is empty when the file has no charge column.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub dim: Option<usize>,
    pub points: Vec<Vec<f64>>,
    pub charges: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpdateOp {
    Insert(Vec<f64>, f64),
    Delete(Vec<f64>),
}

fn number(token: &str, line: usize) -> Result<f64, CliError> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| CliError::data(line, format!("cannot parse {:?} as a number", token.trim())))?;
    if !v.is_finite() {
        return Err(CliError::data(line, format!("non-finite value {:?}", token.trim())));
    }
    Ok(v)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses `x₁,…,x_d[,q]` rows with an optional leading `dim=<d>` header.
/// `expect_dim` pins the dimension when the caller already knows it.
pub fn parse_point_file(text: &str, with_charge: bool, expect_dim: Option<usize>) -> Result<PointFile, CliError> {
    let extra = usize::from(with_charge);
    let mut dim = expect_dim;
    let mut out = PointFile {
        dim,
        points: Vec::new(),
        charges: Vec::new(),
    };
    for (n, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("dim=") {
            if !out.points.is_empty() {
                return Err(CliError::data(n, "dim header must precede the rows"));
            }
            let d: usize = rest
                .trim()
                .parse()
                .map_err(|_| CliError::data(n, format!("bad dimension {:?}", rest.trim())))?;
            if d == 0 {
                return Err(CliError::data(n, "dimension must be positive"));
            }
            if let Some(e) = expect_dim {
                if e != d {
                    return Err(CliError::data(n, format!("dimension {d} does not match {e}")));
                }
            }
            dim = Some(d);
            continue;
        }
        let values = line.split(',').map(|t| number(t, n)).collect::<Result<Vec<f64>, _>>()?;
        let d = match dim {
            Some(d) => d,
            None if values.len() > extra => {
                dim = Some(values.len() - extra);
                values.len() - extra
            }
            None => return Err(CliError::data(n, format!("expected at least {} columns", extra + 1))),
        };
        if values.len() != d + extra {
            return Err(CliError::data(
                n,
                format!("expected {} columns, found {}", d + extra, values.len()),
            ));
        }
        let mut values = values;
        if with_charge {
            out.charges.push(values.pop().unwrap());
        }
        out.points.push(values);
    }
    out.dim = dim;
    Ok(out)
}

/// One decimal per line.
pub fn parse_charges(text: &str) -> Result<Vec<f64>, CliError> {
    content_lines(text).map(|(n, l)| number(l, n)).collect()
}

/// Lines `I x₁ … x_d q` and `D x₁ … x_d`, whitespace separated.
pub fn parse_ops(text: &str, dim: usize) -> Result<Vec<(usize, UpdateOp)>, CliError> {
    let mut ops = Vec::new();
    for (n, line) in content_lines(text) {
        let mut tokens = line.split_whitespace();
        let kind = tokens.next().unwrap_or_default();
        let values = tokens.map(|t| number(t, n)).collect::<Result<Vec<f64>, _>>()?;
        let op = match kind {
            "I" | "i" if values.len() == dim + 1 => {
                let mut v = values;
                let q = v.pop().unwrap();
                UpdateOp::Insert(v, q)
            }
            "D" | "d" if values.len() == dim => UpdateOp::Delete(values),
            "I" | "i" | "D" | "d" => {
                return Err(CliError::data(n, format!("wrong number of values for dimension {dim}")));
            }
            other => return Err(CliError::data(n, format!("unknown operation {other:?}"))),
        };
        ops.push((n, op));
    }
    Ok(ops)
}
