//! Box geometry over an unbounded integer lattice and accuracy-driven
//! parameter selection.
//!
//! Box `i` covers `[iL, (i+1)L)` on each axis with `L = r·√(2δ)`. Box states
//! live in maps keyed by [`BoxId`], so nothing restricts points to a fixed
//! bounding region.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{FgtError, Result};
use crate::oracle::{combined_trunc_bound, far_field_bound, BoundInputs};
use crate::scalar::Real;

/// Upper limit for both the truncation order and the neighbor radius.
pub const ORDER_CAP: usize = 80;

/// Lattice coordinates of a box.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxId(SmallVec<[i64; 4]>);

impl BoxId {
    pub fn new(coords: &[i64]) -> Self {
        BoxId(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn chebyshev_distance(&self, other: &BoxId) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for BoxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Per-axis `floor(xᵢ / L)`; a coordinate on a boundary belongs to the higher box.
pub fn box_of<T: Real>(point: &[T], side: T) -> Result<BoxId> {
    let mut coords = SmallVec::with_capacity(point.len());
    for &x in point {
        if !x.is_finite() {
            return Err(FgtError::NonFinite("point coordinate"));
        }
        let cell = (x / side).floor();
        coords.push(cell.to_i64().ok_or(FgtError::NonFinite("box coordinate"))?);
    }
    Ok(BoxId(coords))
}

pub fn box_center<T: Real>(id: &BoxId, side: T) -> Vec<T> {
    let half = T::lit(0.5);
    id.0.iter()
        .map(|&i| (T::from_i64(i).expect("lattice coordinate fits") + half) * side)
        .collect()
}

/// Every box within Chebyshev distance `k` of `id`, lexicographic order.
pub fn neighbors(id: &BoxId, k: usize) -> Vec<BoxId> {
    let d = id.dim();
    let k = k as i64;
    let width = (2 * k + 1) as usize;
    let mut out = Vec::with_capacity(width.pow(d as u32));
    let mut offset: SmallVec<[i64; 4]> = SmallVec::from_elem(-k, d);
    loop {
        out.push(BoxId(
            id.0.iter().zip(&offset).map(|(c, o)| c + o).collect(),
        ));
        let mut axis = d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            offset[axis] += 1;
            if offset[axis] <= k {
                break;
            }
            offset[axis] = -k;
        }
    }
}

/// Smallest `(p, k)` meeting the error budget: the far-field cutoff gets `ε/3`
/// and the combined Hermite/Taylor truncation gets `2ε/3`.
pub fn choose_params<T: Real>(q_budget: T, eps: T, r: T, d: usize) -> Result<(usize, usize)> {
    validate_accuracy(q_budget, eps, r, d)?;
    let three = T::lit(3.0);
    let far_target = eps / three;
    let trunc_target = eps * T::lit(2.0) / three;

    let k = (0..=ORDER_CAP)
        .find(|&k| far_field_bound(k, r, q_budget) <= far_target)
        .ok_or(FgtError::AccuracyUnreachable {
            which: "neighbor radius",
            cap: ORDER_CAP,
        })?;
    let p = (1..=ORDER_CAP)
        .find(|&p| {
            combined_trunc_bound(&BoundInputs {
                p,
                r,
                d,
                q: q_budget,
            }) <= trunc_target
        })
        .ok_or(FgtError::AccuracyUnreachable {
            which: "truncation order",
            cap: ORDER_CAP,
        })?;
    Ok((p, k))
}

fn validate_accuracy<T: Real>(q_budget: T, eps: T, r: T, d: usize) -> Result<()> {
    if d == 0 {
        return Err(FgtError::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(eps > T::zero() && eps < T::one()) {
        return Err(FgtError::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(r > T::zero() && r <= T::lit(0.5)) {
        return Err(FgtError::InvalidParameter(format!("r must lie in (0, 1/2], got {r}")));
    }
    if !(q_budget >= T::one() && q_budget.is_finite()) {
        return Err(FgtError::InvalidParameter(format!(
            "charge budget must be finite and at least 1, got {q_budget}"
        )));
    }
    Ok(())
}

/// Geometry and truncation parameters of one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct GridParams<T> {
    dim: usize,
    delta: T,
    sqrt_delta: T,
    eps: T,
    r: T,
    side: T,
    p: usize,
    k: usize,
    q_budget: T,
}

impl<T: Real> GridParams<T> {
    /// Derives `(p, k)` from the accuracy target; the budget is floored at 1.
    pub fn new(dim: usize, delta: T, eps: T, r: T, q_budget: T) -> Result<Self> {
        let q_budget = q_budget.max(T::one());
        validate_delta(delta)?;
        let (p, k) = choose_params(q_budget, eps, r, dim)?;
        Ok(Self::assemble(dim, delta, eps, r, q_budget, p, k))
    }

    /// Explicit orders, skipping the minimality search. Used for sweeps and
    /// for reloading persisted state.
    pub fn with_orders(dim: usize, delta: T, eps: T, r: T, q_budget: T, p: usize, k: usize) -> Result<Self> {
        let q_budget = q_budget.max(T::one());
        validate_delta(delta)?;
        validate_accuracy(q_budget, eps, r, dim)?;
        if p == 0 || p > ORDER_CAP || k > ORDER_CAP {
            return Err(FgtError::InvalidParameter(format!(
                "orders out of range: p={p}, k={k} (need 1 ≤ p ≤ {ORDER_CAP}, k ≤ {ORDER_CAP})"
            )));
        }
        Ok(Self::assemble(dim, delta, eps, r, q_budget, p, k))
    }

    fn assemble(dim: usize, delta: T, eps: T, r: T, q_budget: T, p: usize, k: usize) -> Self {
        let sqrt_delta = delta.sqrt();
        GridParams {
            dim,
            delta,
            sqrt_delta,
            eps,
            r,
            side: r * (T::lit(2.0) * delta).sqrt(),
            p,
            k,
            q_budget,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn delta(&self) -> T {
        self.delta
    }
    pub fn sqrt_delta(&self) -> T {
        self.sqrt_delta
    }
    pub fn eps(&self) -> T {
        self.eps
    }
    pub fn r(&self) -> T {
        self.r
    }
    /// Box side length `L`.
    pub fn side(&self) -> T {
        self.side
    }
    /// Per-dimension truncation order.
    pub fn p(&self) -> usize {
        self.p
    }
    /// Neighbor radius in boxes.
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn q_budget(&self) -> T {
        self.q_budget
    }
    /// Number of expansion terms, `p^d`.
    pub fn terms(&self) -> usize {
        self.p.pow(self.dim as u32)
    }
    /// Boxes touched by one update, `(2k+1)^d`.
    pub fn neighborhood_size(&self) -> usize {
        (2 * self.k + 1).pow(self.dim as u32)
    }

    pub fn box_of(&self, point: &[T]) -> Result<BoxId> {
        if point.len() != self.dim {
            return Err(FgtError::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        box_of(point, self.side)
    }

    pub fn center(&self, id: &BoxId) -> Vec<T> {
        box_center(id, self.side)
    }
}

fn validate_delta<T: Real>(delta: T) -> Result<()> {
    if delta > T::zero() && delta.is_finite() {
        Ok(())
    } else {
        Err(FgtError::InvalidParameter(format!("delta must be positive and finite, got {delta}")))
    }
}
