//! Multi-indices over `d` dimensions and the scalar combinatorics attached to them.
//!
//! The truncated index set of order `p` is `{α : 0 ≤ αᵢ < p}`, stored in
//! lexicographic order with the last coordinate varying fastest. Coefficient
//! arrays throughout the crate are dense vectors laid out in this order, so the
//! flat position of `α` is `Σᵢ αᵢ · p^(d-1-i)`.

use std::ops::Add;

use smallvec::SmallVec;

use crate::error::{FgtError, Result};
use crate::scalar::Real;

/// Largest coordinate whose factorial is representable in `f64`.
pub const FACTORIAL_GUARD: usize = 170;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn new(coords: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(coords))
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// `‖α‖₁`.
    pub fn l1(&self) -> u64 {
        self.0.iter().map(|&a| u64::from(a)).sum()
    }

    pub fn max_coord(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `(−1)^{‖α‖₁}` as `+1` or `−1`.
    pub fn sign(&self) -> i32 {
        if self.l1().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `1/α! = ∏ᵢ 1/(αᵢ!)`.
    pub fn factorial_reciprocal<T: Real>(&self) -> Result<T> {
        let mut acc = T::one();
        for &a in &self.0 {
            let a = a as usize;
            if a > FACTORIAL_GUARD {
                return Err(FgtError::FactorialOverflow {
                    value: a,
                    limit: FACTORIAL_GUARD,
                });
            }
            for i in 2..=a {
                acc /= T::from_count(i);
            }
        }
        Ok(acc)
    }

    /// `v^α = ∏ᵢ vᵢ^{αᵢ}` with `0⁰ = 1`.
    pub fn power<T: Real>(&self, v: &[T]) -> Result<T> {
        if v.len() != self.dim() {
            return Err(FgtError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(v)
            .fold(T::one(), |acc, (&a, &x)| acc * x.powi(a as i32)))
    }

    /// Position of this index in the truncated enumeration of order `p`.
    pub fn flat(&self, p: usize) -> usize {
        self.0.iter().fold(0, |acc, &a| acc * p + a as usize)
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// All `p^d` indices with every coordinate in `0..p`, lexicographic order.
pub fn enumerate_truncated(d: usize, p: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 || p == 0 {
        return Err(FgtError::InvalidParameter(format!(
            "truncated multi-index set needs d ≥ 1 and p ≥ 1 (got d={d}, p={p})"
        )));
    }
    let len = p
        .checked_pow(d as u32)
        .ok_or_else(|| FgtError::InvalidParameter(format!("p^d overflows for p={p}, d={d}")))?;
    let mut out = Vec::with_capacity(len);
    let mut cur = vec![0u32; d];
    for _ in 0..len {
        out.push(MultiIndex::new(&cur));
        // odometer increment, last coordinate fastest
        for i in (0..d).rev() {
            cur[i] += 1;
            if (cur[i] as usize) < p {
                break;
            }
            cur[i] = 0;
        }
    }
    Ok(out)
}

/// `1/n!` for `n` in `0..len`.
pub fn reciprocal_factorials<T: Real>(len: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(len);
    let mut acc = T::one();
    for n in 0..len {
        if n > 1 {
            acc /= T::from_count(n);
        }
        out.push(acc);
    }
    out
}

/// Dense tensor product `out[α] = ∏ᵢ rows[i][αᵢ]` in enumeration order.
///
/// Each output entry costs one multiplication, so per-dimension power rows
/// turn into the full `v^α` table without repeated exponentiation.
pub fn outer_product<T: Real>(rows: &[Vec<T>], p: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(p.pow(rows.len() as u32));
    out.push(T::one());
    for row in rows {
        debug_assert_eq!(row.len(), p);
        let prev = std::mem::take(&mut out);
        out.reserve(prev.len() * p);
        for e in prev {
            out.extend(row.iter().map(|&r| e * r));
        }
    }
    out
}

/// `[1, x, x², …, x^{p−1}]`.
pub fn power_row<T: Real>(x: T, p: usize) -> Vec<T> {
    let mut row = Vec::with_capacity(p);
    let mut acc = T::one();
    for _ in 0..p {
        row.push(acc);
        acc *= x;
    }
    row
}
