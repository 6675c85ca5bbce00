//! Hermite polynomials `h̃ₙ` and Hermite functions `hₙ(t) = e^{−t²} h̃ₙ(t)`.
//!
//! Both satisfy `y_{n+1} = 2t·yₙ − 2n·y_{n−1}`; the function row is run on
//! damped values directly so large orders never pass through the undamped
//! polynomial magnitude.

use crate::error::{FgtError, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Real;

/// Constant in Cramer's inequality.
pub const CRAMER_K: f64 = 1.09;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HermiteVariant {
    Polynomial,
    Function,
}

/// Evaluations `values[n]` for `n = 0..=n_max` at one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRow<T> {
    pub values: Vec<T>,
    pub argument: T,
    pub variant: HermiteVariant,
}

fn recurrence<T: Real>(t: T, first: T, n_max: usize) -> Vec<T> {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(first);
    if n_max == 0 {
        return values;
    }
    let two_t = t + t;
    values.push(two_t * first);
    for n in 1..n_max {
        let next = two_t * values[n] - T::from_count(2 * n) * values[n - 1];
        values.push(next);
    }
    values
}

pub fn hermite_poly_row<T: Real>(t: T, n_max: usize) -> HermiteRow<T> {
    HermiteRow {
        values: recurrence(t, T::one(), n_max),
        argument: t,
        variant: HermiteVariant::Polynomial,
    }
}

pub fn hermite_fn_row<T: Real>(t: T, n_max: usize) -> HermiteRow<T> {
    HermiteRow {
        values: hermite_fn_values(t, n_max),
        argument: t,
        variant: HermiteVariant::Function,
    }
}

/// Bare `hₙ(t)` values, `n = 0..=n_max`.
pub(crate) fn hermite_fn_values<T: Real>(t: T, n_max: usize) -> Vec<T> {
    recurrence(t, (-t * t).exp(), n_max)
}

/// `H_α(t) = ∏ᵢ h_{αᵢ}(tᵢ)`.
pub fn multi_hermite<T: Real>(alpha: &MultiIndex, t: &[T]) -> Result<T> {
    if alpha.dim() != t.len() {
        return Err(FgtError::DimensionMismatch {
            expected: alpha.dim(),
            found: t.len(),
        });
    }
    Ok(alpha
        .coords()
        .iter()
        .zip(t)
        .fold(T::one(), |acc, (&a, &x)| {
            acc * hermite_fn_values(x, a as usize)[a as usize]
        }))
}

/// `ln(n!)` by direct summation.
pub(crate) fn ln_factorial<T: Real>(n: usize) -> T {
    (2..=n).fold(T::zero(), |acc, i| acc + T::from_count(i).ln())
}

/// `K · 2^{n/2} · √(n!) · e^{−t²/2}`, assembled in log-space.
pub fn cramer_bound<T: Real>(n: usize, t: T) -> T {
    let half = T::lit(0.5);
    let log = T::lit(CRAMER_K).ln()
        + half * T::from_count(n) * T::lit(2.0).ln()
        + half * ln_factorial::<T>(n)
        - half * t * t;
    log.exp()
}
