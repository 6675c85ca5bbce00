//! Ground-truth evaluations and closed-form truncation bounds.
//!
//! The exact transforms here are dense `O(N)`/`O(N²)` reference paths. They
//! never touch the box structure and serve as the oracle in tests and in
//! `verify`. The bounds drive parameter selection.

use crate::grid::GridParams;
use crate::hermite::{hermite_fn_values, ln_factorial};
use crate::multiindex::{outer_product, reciprocal_factorials};
use crate::scalar::Real;

/// Inputs to the truncation bounds. `q` is the total absolute charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs<T> {
    pub p: usize,
    pub r: T,
    pub d: usize,
    pub q: T,
}

/// `G(t) = Σⱼ qⱼ e^{−‖t−sⱼ‖²/δ}` by direct summation.
pub fn exact_gauss_transform<T: Real>(points: &[Vec<T>], charges: &[T], t: &[T], delta: T) -> T {
    points
        .iter()
        .zip(charges)
        .fold(T::zero(), |acc, (s, &q)| {
            let dist2 = s
                .iter()
                .zip(t)
                .fold(T::zero(), |d2, (&a, &b)| d2 + (a - b) * (a - b));
            acc + q * (-dist2 / delta).exp()
        })
}

/// Dense `𝒦q` with `𝒦ᵢⱼ = e^{−‖sᵢ−sⱼ‖²/δ}`.
pub fn exact_matvec<T: Real>(points: &[Vec<T>], charges: &[T], delta: T) -> Vec<T> {
    points
        .iter()
        .map(|s| exact_gauss_transform(points, charges, s, delta))
        .collect()
}

/// Tail bound for truncating the Hermite series of one source box after `p^d` terms:
/// `(Q/(1−r)^d) Σ_{k<d} C(d,k) (1−r^p)^k (r^p/√p!)^{d−k}`.
pub fn hermite_trunc_bound<T: Real>(b: &BoundInputs<T>) -> T {
    if b.q <= T::zero() {
        return T::zero();
    }
    let half = T::lit(0.5);
    let p = T::from_count(b.p);
    let log_tail = p * b.r.ln() - half * ln_factorial::<T>(b.p);
    let log_head = (T::one() - b.r.powi(b.p as i32)).ln();
    let mut sum = T::zero();
    for k in 0..b.d {
        let log_binom = ln_factorial::<T>(b.d) - ln_factorial::<T>(k) - ln_factorial::<T>(b.d - k);
        let log_term =
            log_binom + T::from_count(k) * log_head + T::from_count(b.d - k) * log_tail;
        sum += log_term.exp();
    }
    let log_prefix = b.q.ln() - T::from_count(b.d) * (T::one() - b.r).ln();
    log_prefix.exp() * sum
}

/// Tail bound for truncating the Taylor series of a box's field; the closed form
/// is the same as for the Hermite series.
pub fn taylor_trunc_bound<T: Real>(b: &BoundInputs<T>) -> T {
    hermite_trunc_bound(b)
}

/// Bound for the full Hermite-then-Taylor pipeline of one box pair.
pub fn combined_trunc_bound<T: Real>(b: &BoundInputs<T>) -> T {
    T::lit(2.0) * hermite_trunc_bound(b)
}

/// `Q · e^{−2r²k²}`: the mass dropped by ignoring sources at ∞-distance `≥ k·L`.
pub fn far_field_bound<T: Real>(k: usize, r: T, q: T) -> T {
    let k = T::from_count(k);
    q * (-T::lit(2.0) * r * r * k * k).exp()
}

/// Taylor coefficients of one Gaussian `q·e^{−‖t−s‖²/δ}` about `t_C`, in the
/// variable `(t − t_C)/√δ`: `q · H_β((s − t_C)/√δ) / β!`.
pub fn direct_taylor_coeffs<T: Real>(
    point: &[T],
    charge: T,
    t_center: &[T],
    params: &GridParams<T>,
) -> Vec<T> {
    let p = params.p();
    let inv_fact = reciprocal_factorials::<T>(p);
    let rows: Vec<Vec<T>> = point
        .iter()
        .zip(t_center)
        .map(|(&s, &c)| {
            let h = hermite_fn_values((s - c) / params.sqrt_delta(), p - 1);
            h.iter().zip(&inv_fact).map(|(&v, &f)| v * f).collect()
        })
        .collect();
    let mut out = outer_product(&rows, p);
    for v in &mut out {
        *v *= charge;
    }
    out
}
