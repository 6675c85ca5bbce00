//! Expansion coefficients.
//!
//! A source box `B` with center `s_B` carries the signed Hermite coefficients
//!
//! ```text
//! A_α(B) = ((−1)^{‖α‖₁}/α!) Σ_{j∈B} qⱼ ((sⱼ − s_B)/√δ)^α
//! ```
//!
//! and a target box `C` with center `t_C` carries Taylor coefficients obtained
//! by translating every neighbor source box:
//!
//! ```text
//! C_β(C) = (1/β!) Σ_B Σ_α A_α(B) H_{α+β}((s_B − t_C)/√δ)
//! ```
//!
//! so that the field at `t ∈ C` is `Σ_β C_β ((t − t_C)/√δ)^β`. Because
//! `H_{α+β}` factors over dimensions, the double sum is a sequence of `d`
//! one-axis contractions against a Hankel matrix of Hermite values, costing
//! `d·p^{d+1}` per box pair instead of `p^{2d}`.

use std::collections::BTreeMap;

use crate::error::{FgtError, Result};
use crate::grid::{BoxId, GridParams};
use crate::hermite::hermite_fn_values;
use crate::multiindex::{outer_product, power_row, reciprocal_factorials};
use crate::scalar::Real;

/// A source point held by a box.
#[derive(Debug, Clone, PartialEq)]
pub struct Resident<T> {
    pub point: Vec<T>,
    pub charge: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceBoxState<T> {
    pub id: BoxId,
    pub center: Vec<T>,
    /// Keyed by registry sequence number, which fixes the summation order.
    pub residents: BTreeMap<u64, Resident<T>>,
    pub coeffs: Vec<T>,
    pub charge_abs_sum: T,
}

impl<T: Real> SourceBoxState<T> {
    pub fn empty(id: BoxId, params: &GridParams<T>) -> Self {
        let center = params.center(&id);
        SourceBoxState {
            id,
            center,
            residents: BTreeMap::new(),
            coeffs: vec![T::zero(); params.terms()],
            charge_abs_sum: T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetBoxState<T> {
    pub id: BoxId,
    pub center: Vec<T>,
    pub coeffs: Vec<T>,
}

fn check_inside<T: Real>(point: &[T], center: &[T], params: &GridParams<T>) -> Result<()> {
    if params.box_of(point)? == params.box_of(center)? {
        Ok(())
    } else {
        Err(FgtError::OutsideBox)
    }
}

/// Per-axis factors of one point's Hermite coefficients:
/// `rows[i][n] = ((s_B,i − s_i)/√δ)^n / n!`, so that its `A` is `q · ⊗ᵢ rows[i]`.
pub(crate) fn point_rows<T: Real>(point: &[T], center: &[T], params: &GridParams<T>, inv_fact: &[T]) -> Vec<Vec<T>> {
    let p = params.p();
    point
        .iter()
        .zip(center)
        .map(|(&s, &c)| {
            let w = (c - s) / params.sqrt_delta(); // folds the sign: (−w)^n
            power_row(w, p)
                .into_iter()
                .zip(inv_fact)
                .map(|(x, &f)| x * f)
                .collect()
        })
        .collect()
}

/// Adds `q · ((−1)^{‖α‖₁}/α!) ((s − s_B)/√δ)^α` into `acc`.
fn accumulate_point<T: Real>(acc: &mut [T], point: &[T], charge: T, center: &[T], params: &GridParams<T>) {
    let inv_fact = reciprocal_factorials::<T>(params.p());
    let rows = point_rows(point, center, params, &inv_fact);
    for (a, v) in acc.iter_mut().zip(outer_product(&rows, params.p())) {
        *a += charge * v;
    }
}

/// Hermite coefficients of a set of residents about `center`.
pub fn compute_a<'a, T, I>(residents: I, center: &[T], params: &GridParams<T>) -> Result<Vec<T>>
where
    T: Real,
    I: IntoIterator<Item = (&'a [T], T)>,
{
    let mut acc = vec![T::zero(); params.terms()];
    for (point, charge) in residents {
        check_inside(point, center, params)?;
        accumulate_point(&mut acc, point, charge, center, params);
    }
    Ok(acc)
}

/// The contribution of a single point; added on insert, subtracted on delete.
pub fn delta_a<T: Real>(point: &[T], charge: T, center: &[T], params: &GridParams<T>) -> Result<Vec<T>> {
    check_inside(point, center, params)?;
    let mut acc = vec![T::zero(); params.terms()];
    accumulate_point(&mut acc, point, charge, center, params);
    Ok(acc)
}

/// Scratch buffers reused across translations.
#[derive(Debug, Default)]
pub(crate) struct TranslateScratch<T> {
    work: Vec<T>,
    next: Vec<T>,
    fiber: Vec<T>,
}

/// `acc += translate(a)` from the source center to the target center.
pub(crate) fn translate_add<T: Real>(
    acc: &mut [T],
    a: &[T],
    source_center: &[T],
    target_center: &[T],
    params: &GridParams<T>,
    inv_fact: &[T],
    scratch: &mut TranslateScratch<T>,
) {
    let p = params.p();
    let d = params.dim();
    let len = params.terms();
    debug_assert_eq!(a.len(), len);

    scratch.work.clear();
    scratch.work.extend_from_slice(a);
    scratch.next.resize(len, T::zero());
    scratch.fiber.resize(p, T::zero());

    for axis in 0..d {
        let c = (source_center[axis] - target_center[axis]) / params.sqrt_delta();
        let hankel = hermite_fn_values(c, 2 * p - 2);
        let stride = p.pow((d - 1 - axis) as u32);
        let block = stride * p;
        for base in (0..len).step_by(block) {
            for j in 0..stride {
                for (n, f) in scratch.fiber.iter_mut().enumerate() {
                    *f = scratch.work[base + n * stride + j];
                }
                for beta in 0..p {
                    let window = &hankel[beta..beta + p];
                    let dot = scratch
                        .fiber
                        .iter()
                        .zip(window)
                        .fold(T::zero(), |s, (&x, &h)| s + x * h);
                    scratch.next[base + beta * stride + j] = dot * inv_fact[beta];
                }
            }
        }
        std::mem::swap(&mut scratch.work, &mut scratch.next);
    }
    for (o, &v) in acc.iter_mut().zip(&scratch.work) {
        *o += v;
    }
}

/// Per-axis Hermite values `h_n((s_B,i − t_C,i)/√δ)`, `n = 0..=2p−2`.
pub(crate) fn axis_hankels<T: Real>(source_center: &[T], target_center: &[T], params: &GridParams<T>) -> Vec<Vec<T>> {
    source_center
        .iter()
        .zip(target_center)
        .map(|(&s, &t)| hermite_fn_values((s - t) / params.sqrt_delta(), 2 * params.p() - 2))
        .collect()
}

/// `acc += translate(q · ⊗ᵢ rows[i])`. The coefficients of a single point
/// form a rank-one tensor, so each axis is translated on its own in `O(p²)`
/// and only the final outer product touches all `p^d` entries.
pub(crate) fn translate_point_with<T: Real>(acc: &mut [T], rows: &[Vec<T>], q: T, hankels: &[Vec<T>], inv_fact: &[T]) {
    let p = inv_fact.len();
    let translated: Vec<Vec<T>> = rows
        .iter()
        .zip(hankels)
        .map(|(row, hankel)| {
            (0..p)
                .map(|beta| {
                    let dot = row
                        .iter()
                        .zip(&hankel[beta..beta + p])
                        .fold(T::zero(), |s, (&x, &h)| s + x * h);
                    dot * inv_fact[beta]
                })
                .collect()
        })
        .collect();
    for (o, v) in acc.iter_mut().zip(outer_product(&translated, p)) {
        *o += q * v;
    }
}

pub(crate) fn translate_point_add<T: Real>(
    acc: &mut [T],
    rows: &[Vec<T>],
    q: T,
    source_center: &[T],
    target_center: &[T],
    params: &GridParams<T>,
    inv_fact: &[T],
) {
    let hankels = axis_hankels(source_center, target_center, params);
    translate_point_with(acc, rows, q, &hankels, inv_fact);
}

/// Taylor coefficients about `target_center` from a list of `(s_B, A(B))`.
pub fn compute_c<T: Real>(target_center: &[T], sources: &[(&[T], &[T])], params: &GridParams<T>) -> Vec<T> {
    let inv_fact = reciprocal_factorials::<T>(params.p());
    let mut scratch = TranslateScratch::default();
    let mut acc = vec![T::zero(); params.terms()];
    for (center, a) in sources {
        translate_add(&mut acc, a, center, target_center, params, &inv_fact, &mut scratch);
    }
    acc
}

/// Adjustment to a target box's coefficients caused by a change `da` in one
/// neighbor source box.
pub fn delta_c<T: Real>(da: &[T], source_center: &[T], target_center: &[T], params: &GridParams<T>) -> Vec<T> {
    compute_c(target_center, &[(source_center, da)], params)
}

/// `Σ_β C_β ((t − t_C)/√δ)^β`, Horner along each axis from the last.
pub fn eval_taylor<T: Real>(coeffs: &[T], t: &[T], target_center: &[T], params: &GridParams<T>) -> Result<T> {
    check_inside(t, target_center, params)?;
    Ok(horner(coeffs, t, target_center, params))
}

pub(crate) fn horner<T: Real>(coeffs: &[T], t: &[T], target_center: &[T], params: &GridParams<T>) -> T {
    let p = params.p();
    let mut cur: Vec<T> = coeffs.to_vec();
    for axis in (0..params.dim()).rev() {
        let u = (t[axis] - target_center[axis]) / params.sqrt_delta();
        let reduced: Vec<T> = cur
            .chunks_exact(p)
            .map(|chunk| chunk.iter().rev().fold(T::zero(), |s, &c| s * u + c))
            .collect();
        cur = reduced;
    }
    cur[0]
}
