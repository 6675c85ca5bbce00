//! The fully dynamic Gaussian transform structure.
//!
//! Sources are bucketed into lattice boxes that each hold a Hermite
//! expansion. Target boxes are materialized on the first query that lands in
//! them. After that, every insert or delete within `k` boxes updates their
//! Taylor coefficients incrementally. One update costs `O((2k+1)^d · d·p^{d+1})`,
//! independent of the number of stored points.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::RwLock;

use smallvec::SmallVec;

use crate::coefficients::{
    axis_hankels, compute_a, delta_a, horner, point_rows, translate_point_with, translate_add, translate_point_add, Resident, SourceBoxState,
    TargetBoxState, TranslateScratch,
};
use crate::error::{FgtError, Result};
use crate::grid::{neighbors, BoxId, GridParams};
use crate::multiindex::reciprocal_factorials;
use crate::scalar::{bit_key, Real};

type PointKey = SmallVec<[(u64, i16, i8); 4]>;

fn point_key<T: Real>(point: &[T]) -> PointKey {
    point.iter().map(|&x| bit_key(x)).collect()
}

/// Construction settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgtConfig<T> {
    pub dim: usize,
    /// Bandwidth `δ` of the kernel `e^{−‖t−s‖²/δ}`.
    pub delta: T,
    /// Additive error target.
    pub eps: T,
    /// Box scale; the side length is `r·√(2δ)`.
    pub r: T,
    /// Charge mass to size `p` and `k` for up front, avoiding early rebuilds.
    pub capacity: Option<T>,
}

impl<T: Real> FgtConfig<T> {
    pub fn new(dim: usize, delta: T, eps: T) -> Self {
        FgtConfig {
            dim,
            delta,
            eps,
            r: T::lit(0.5),
            capacity: None,
        }
    }

    pub fn with_r(mut self, r: T) -> Self {
        self.r = r;
        self
    }

    pub fn with_capacity(mut self, capacity: T) -> Self {
        self.capacity = Some(capacity);
        self
    }
}

/// Boxes touched by the most recent insert or delete.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub source_boxes: usize,
    pub target_boxes: usize,
}

#[derive(Debug, Clone)]
struct MatvecSession<T: Real> {
    inner: Box<DynamicFgt<T>>,
    handles: Vec<u64>,
    points: Vec<Vec<T>>,
    boxes: Vec<BoxId>,
    index_by_box: HashMap<BoxId, Vec<usize>>,
    values: Vec<T>,
}

#[derive(Debug)]
pub struct DynamicFgt<T: Real> {
    params: GridParams<T>,
    capacity: Option<T>,
    source_boxes: HashMap<BoxId, SourceBoxState<T>>,
    target_boxes: RwLock<HashMap<BoxId, TargetBoxState<T>>>,
    /// Insertion-ordered registry: sequence number → owning source box.
    order: BTreeMap<u64, BoxId>,
    by_point: HashMap<PointKey, Vec<u64>>,
    next_seq: u64,
    q_current: T,
    rebuilds: usize,
    last_update: UpdateStats,
    matvec: Option<MatvecSession<T>>,
}

impl<T: Real> Clone for DynamicFgt<T> {
    fn clone(&self) -> Self {
        DynamicFgt {
            params: self.params.clone(),
            capacity: self.capacity,
            source_boxes: self.source_boxes.clone(),
            target_boxes: RwLock::new(self.read_targets().clone()),
            order: self.order.clone(),
            by_point: self.by_point.clone(),
            next_seq: self.next_seq,
            q_current: self.q_current,
            rebuilds: self.rebuilds,
            last_update: self.last_update,
            matvec: self.matvec.clone(),
        }
    }
}

fn validate_point<T: Real>(point: &[T], dim: usize) -> Result<()> {
    if point.len() != dim {
        return Err(FgtError::DimensionMismatch {
            expected: dim,
            found: point.len(),
        });
    }
    if point.iter().any(|x| !x.is_finite()) {
        return Err(FgtError::NonFinite("point coordinate"));
    }
    Ok(())
}

impl<T: Real> DynamicFgt<T> {
    /// Builds the structure over `points` with `charges`. Parameters are sized
    /// for `Q = max(1, Σ|qⱼ|, capacity)`.
    pub fn init(points: &[Vec<T>], charges: &[T], config: &FgtConfig<T>) -> Result<Self> {
        Self::validate_input(points, charges, config.dim)?;
        let mass = charges.iter().fold(T::zero(), |acc, q| acc + q.abs());
        let budget = config.capacity.map_or(mass, |c| c.max(mass)).max(T::one());
        let params = GridParams::new(config.dim, config.delta, config.eps, config.r, budget)?;
        let mut fgt = Self::empty(params, config.capacity);
        fgt.load(points, charges)?;
        Ok(fgt)
    }

    /// Builds with fixed parameters; the structure keeps them until the charge
    /// mass exceeds their budget.
    pub fn with_params(points: &[Vec<T>], charges: &[T], params: GridParams<T>) -> Result<Self> {
        Self::validate_input(points, charges, params.dim())?;
        let mut fgt = Self::empty(params, None);
        fgt.load(points, charges)?;
        if fgt.q_current > fgt.params.q_budget() {
            fgt.rebuild()?;
        }
        Ok(fgt)
    }

    /// Charge mass hint used to size mat-vec structures.
    pub fn capacity(&self) -> Option<T> {
        self.capacity
    }

    pub fn set_capacity(&mut self, capacity: Option<T>) {
        self.capacity = capacity;
    }

    fn validate_input(points: &[Vec<T>], charges: &[T], dim: usize) -> Result<()> {
        if points.len() != charges.len() {
            return Err(FgtError::LengthMismatch {
                expected: points.len(),
                found: charges.len(),
            });
        }
        for p in points {
            validate_point(p, dim)?;
        }
        if charges.iter().any(|q| !q.is_finite()) {
            return Err(FgtError::NonFinite("charge"));
        }
        Ok(())
    }

    fn empty(params: GridParams<T>, capacity: Option<T>) -> Self {
        DynamicFgt {
            params,
            capacity,
            source_boxes: HashMap::new(),
            target_boxes: RwLock::new(HashMap::new()),
            order: BTreeMap::new(),
            by_point: HashMap::new(),
            next_seq: 0,
            q_current: T::zero(),
            rebuilds: 0,
            last_update: UpdateStats::default(),
            matvec: None,
        }
    }

    fn load(&mut self, points: &[Vec<T>], charges: &[T]) -> Result<()> {
        for (point, &charge) in points.iter().zip(charges) {
            let id = self.params.box_of(point)?;
            let seq = self.register(point, &id);
            let params = &self.params;
            let state = self
                .source_boxes
                .entry(id.clone())
                .or_insert_with(|| SourceBoxState::empty(id, params));
            state.residents.insert(
                seq,
                Resident {
                    point: point.clone(),
                    charge,
                },
            );
            state.charge_abs_sum += charge.abs();
            self.q_current += charge.abs();
        }
        self.recompute_sources()
    }

    fn recompute_sources(&mut self) -> Result<()> {
        for state in self.source_boxes.values_mut() {
            state.coeffs = compute_a(
                state.residents.values().map(|r| (r.point.as_slice(), r.charge)),
                &state.center,
                &self.params,
            )?;
            state.charge_abs_sum = state.residents.values().fold(T::zero(), |acc, r| acc + r.charge.abs());
        }
        Ok(())
    }

    fn register(&mut self, point: &[T], id: &BoxId) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.order.insert(seq, id.clone());
        self.by_point.entry(point_key(point)).or_default().push(seq);
        seq
    }

    pub fn params(&self) -> &GridParams<T> {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Running `Σ|qⱼ|` over the registry.
    pub fn q_current(&self) -> T {
        self.q_current
    }

    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    pub fn last_update(&self) -> UpdateStats {
        self.last_update
    }

    pub fn source_box_count(&self) -> usize {
        self.source_boxes.len()
    }

    pub fn target_box_count(&self) -> usize {
        self.read_targets().len()
    }

    /// `(point, charge)` pairs in insertion order.
    pub fn registry(&self) -> Vec<(Vec<T>, T)> {
        self.order
            .iter()
            .map(|(seq, id)| {
                let r = &self.source_boxes[id].residents[seq];
                (r.point.clone(), r.charge)
            })
            .collect()
    }

    /// Hermite coefficients of every source box, sorted by box id.
    pub fn source_coefficients(&self) -> Vec<(BoxId, Vec<T>)> {
        let mut out: Vec<_> = self
            .source_boxes
            .values()
            .map(|s| (s.id.clone(), s.coeffs.clone()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Taylor coefficients of every materialized target box, sorted by box id.
    pub fn target_coefficients(&self) -> Vec<(BoxId, Vec<T>)> {
        let mut out: Vec<_> = self
            .read_targets()
            .values()
            .map(|t| (t.id.clone(), t.coeffs.clone()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn read_targets(&self) -> std::sync::RwLockReadGuard<'_, HashMap<BoxId, TargetBoxState<T>>> {
        self.target_boxes.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write_targets(&self) -> std::sync::RwLockWriteGuard<'_, HashMap<BoxId, TargetBoxState<T>>> {
        self.target_boxes.write().unwrap_or_else(|e| e.into_inner())
    }

    fn targets_mut(&mut self) -> &mut HashMap<BoxId, TargetBoxState<T>> {
        self.target_boxes.get_mut().unwrap_or_else(|e| e.into_inner())
    }

    /// Non-empty source boxes within radius `k` of `id`, sorted by box id.
    fn neighbor_sources(&self, id: &BoxId) -> Vec<&SourceBoxState<T>> {
        let k = self.params.k();
        let mut found: Vec<&SourceBoxState<T>> = if self.source_boxes.len() <= self.params.neighborhood_size() {
            let mut v: Vec<_> = self
                .source_boxes
                .values()
                .filter(|s| s.id.chebyshev_distance(id) <= k as u64)
                .collect();
            v.sort_by(|a, b| a.id.cmp(&b.id));
            v
        } else {
            neighbors(id, k)
                .iter()
                .filter_map(|n| self.source_boxes.get(n))
                .collect()
        };
        found.retain(|s| !s.residents.is_empty());
        found
    }

    fn build_target(&self, id: &BoxId) -> TargetBoxState<T> {
        let center = self.params.center(id);
        let inv_fact = reciprocal_factorials::<T>(self.params.p());
        let mut scratch = TranslateScratch::default();
        let mut coeffs = vec![T::zero(); self.params.terms()];
        let (p, d) = (self.params.p(), self.params.dim());
        let dense_cost = d * p.pow(d as u32 + 1);
        let point_cost = d * p * p + p.pow(d as u32);
        for source in self.neighbor_sources(id) {
            if source.residents.len() * point_cost < dense_cost {
                // sparse box: translate its residents one rank-one term at a time
                let hankels = axis_hankels(&source.center, &center, &self.params);
                for r in source.residents.values() {
                    let rows = point_rows(&r.point, &source.center, &self.params, &inv_fact);
                    translate_point_with(&mut coeffs, &rows, r.charge, &hankels, &inv_fact);
                }
            } else {
                translate_add(
                    &mut coeffs,
                    &source.coeffs,
                    &source.center,
                    &center,
                    &self.params,
                    &inv_fact,
                    &mut scratch,
                );
            }
        }
        TargetBoxState {
            id: id.clone(),
            center,
            coeffs,
        }
    }

    /// Ensures the target box `id` is materialized.
    pub fn materialize(&self, id: &BoxId) {
        if self.read_targets().contains_key(id) {
            return;
        }
        let built = self.build_target(id);
        self.write_targets().entry(id.clone()).or_insert(built);
    }

    /// Coefficients the target box `id` would get if built from scratch now.
    pub fn fresh_target_coefficients(&self, id: &BoxId) -> Vec<T> {
        self.build_target(id).coeffs
    }

    /// Approximates `G(t) = Σⱼ qⱼ e^{−‖t−sⱼ‖²/δ}` to within `±ε`.
    pub fn kde_query(&self, t: &[T]) -> Result<T> {
        validate_point(t, self.params.dim())?;
        let id = self.params.box_of(t)?;
        if let Some(target) = self.read_targets().get(&id) {
            return Ok(horner(&target.coeffs, t, &target.center, &self.params));
        }
        let built = self.build_target(&id);
        let value = horner(&built.coeffs, t, &built.center, &self.params);
        self.write_targets().entry(id).or_insert(built);
        Ok(value)
    }

    /// Adds a source and returns its registry sequence number.
    pub fn insert(&mut self, s: &[T], q: T) -> Result<u64> {
        validate_point(s, self.params.dim())?;
        if !q.is_finite() {
            return Err(FgtError::NonFinite("charge"));
        }
        self.matvec = None;
        let seq = self.insert_entry(s, q)?;
        if self.q_current > self.params.q_budget() {
            self.rebuild()?;
        }
        Ok(seq)
    }

    fn insert_entry(&mut self, s: &[T], q: T) -> Result<u64> {
        let id = self.params.box_of(s)?;
        let seq = self.register(s, &id);
        let params = self.params.clone();
        let state = self
            .source_boxes
            .entry(id.clone())
            .or_insert_with(|| SourceBoxState::empty(id.clone(), &params));
        state.residents.insert(
            seq,
            Resident {
                point: s.to_vec(),
                charge: q,
            },
        );
        state.charge_abs_sum += q.abs();
        self.q_current += q.abs();
        let touched = if q == T::zero() {
            0
        } else {
            let da = delta_a(s, q, &state.center, &params)?;
            for (a, d) in state.coeffs.iter_mut().zip(&da) {
                *a += *d;
            }
            let center = state.center.clone();
            self.propagate(&id, s, q, &center)
        };
        self.last_update = UpdateStats {
            source_boxes: 1,
            target_boxes: touched,
        };
        Ok(seq)
    }

    /// Adds the translated field of charge `q` at `point` (in source box `id`)
    /// to every materialized target box near `id`.
    fn propagate(&mut self, id: &BoxId, point: &[T], q: T, source_center: &[T]) -> usize {
        let params = self.params.clone();
        let inv_fact = reciprocal_factorials::<T>(params.p());
        let rows = point_rows(point, source_center, &params, &inv_fact);
        let k = params.k();
        let scan = self.targets_mut().len() <= params.neighborhood_size();
        let targets = self.targets_mut();
        let mut touched = 0;
        let mut apply = |t: &mut TargetBoxState<T>| {
            translate_point_add(&mut t.coeffs, &rows, q, source_center, &t.center, &params, &inv_fact);
            touched += 1;
        };
        if scan {
            targets
                .values_mut()
                .filter(|t| t.id.chebyshev_distance(id) <= k as u64)
                .for_each(&mut apply);
        } else {
            for n in neighbors(id, k) {
                if let Some(t) = targets.get_mut(&n) {
                    apply(t);
                }
            }
        }
        touched
    }

    /// Removes one source at exactly `s` (most recent first among duplicates)
    /// and returns its charge.
    pub fn delete(&mut self, s: &[T]) -> Result<T> {
        validate_point(s, self.params.dim())?;
        let seq = *self
            .by_point
            .get(&point_key(s))
            .and_then(|v| v.last())
            .ok_or(FgtError::NotFound)?;
        self.matvec = None;
        self.remove_entry(seq)
    }

    fn remove_entry(&mut self, seq: u64) -> Result<T> {
        let id = self.order.remove(&seq).ok_or(FgtError::NotFound)?;
        let state = self.source_boxes.get_mut(&id).expect("registry entry has a box");
        let resident = state.residents.remove(&seq).expect("box holds its registry entries");
        let key = point_key(&resident.point);
        if let Some(list) = self.by_point.get_mut(&key) {
            list.retain(|&x| x != seq);
            if list.is_empty() {
                self.by_point.remove(&key);
            }
        }
        let q = resident.charge;
        state.charge_abs_sum -= q.abs();
        let center = state.center.clone();
        let touched = if q == T::zero() {
            0
        } else {
            let da = delta_a(&resident.point, q, &center, &self.params)?;
            for (a, d) in state.coeffs.iter_mut().zip(&da) {
                *a -= *d;
            }
            self.propagate(&id, &resident.point, -q, &center)
        };
        if self.source_boxes[&id].residents.is_empty() {
            self.source_boxes.remove(&id);
        }
        self.q_current -= q.abs();
        if self.order.is_empty() || self.q_current < T::zero() {
            self.q_current = self.order.keys().fold(T::zero(), |acc, s| {
                acc + self.source_boxes[&self.order[s]].residents[s].charge.abs()
            });
        }
        self.last_update = UpdateStats {
            source_boxes: 1,
            target_boxes: touched,
        };
        Ok(q)
    }

    /// Recomputes every coefficient array from the registry. If the charge mass
    /// has outgrown the budget, the budget becomes `Q²` and `p`, `k` are re-derived.
    pub fn rebuild(&mut self) -> Result<()> {
        if self.q_current > self.params.q_budget() {
            let p = &self.params;
            let budget = (self.q_current * self.q_current).max(T::one());
            self.params = GridParams::new(p.dim(), p.delta(), p.eps(), p.r(), budget)?;
        }
        self.targets_mut().clear();
        self.q_current = self
            .source_boxes
            .values()
            .flat_map(|s| s.residents.values())
            .fold(T::zero(), |acc, r| acc + r.charge.abs());
        self.recompute_sources()?;
        self.rebuilds += 1;
        Ok(())
    }

    /// Approximate `𝒦q` over the current sources in registry order, within `ε`
    /// in `ℓ∞`. The stored charges are left as they were; the product is kept
    /// so that [`matvec_delta`](Self::matvec_delta) can refresh it cheaply.
    pub fn matvec(&mut self, q: &[T]) -> Result<Vec<T>> {
        if q.len() != self.len() {
            return Err(FgtError::LengthMismatch {
                expected: self.len(),
                found: q.len(),
            });
        }
        let points: Vec<Vec<T>> = self.registry().into_iter().map(|(p, _)| p).collect();
        let p = &self.params;
        let mut config = FgtConfig::new(p.dim(), p.delta(), p.eps()).with_r(p.r());
        config.capacity = self.capacity;
        let inner = DynamicFgt::init(&points, q, &config)?;
        let values = points
            .iter()
            .map(|s| inner.kde_query(s))
            .collect::<Result<Vec<T>>>()?;
        let handles: Vec<u64> = inner.order.keys().copied().collect();
        let boxes: Vec<BoxId> = inner.order.values().cloned().collect();
        let mut index_by_box: HashMap<BoxId, Vec<usize>> = HashMap::new();
        for (i, b) in boxes.iter().enumerate() {
            index_by_box.entry(b.clone()).or_default().push(i);
        }
        self.matvec = Some(MatvecSession {
            inner: Box::new(inner),
            handles,
            points,
            boxes,
            index_by_box,
            values: values.clone(),
        });
        Ok(values)
    }

    /// Applies sparse charge changes to the last [`matvec`](Self::matvec) and
    /// returns the recomputed coordinates. Only sources whose box lies within
    /// `k` boxes of a changed source are re-evaluated; every other coordinate
    /// is bitwise unchanged.
    pub fn matvec_delta(&mut self, changes: &[(usize, T)]) -> Result<Vec<(usize, T)>> {
        let session = self.matvec.as_mut().ok_or(FgtError::State("no prior matvec"))?;
        let n = session.handles.len();
        for &(i, q) in changes {
            if i >= n {
                return Err(FgtError::IndexOutOfRange { index: i, len: n });
            }
            if !q.is_finite() {
                return Err(FgtError::NonFinite("charge"));
            }
        }
        if changes.is_empty() {
            return Ok(Vec::new());
        }
        let rebuilds_before = session.inner.rebuilds();
        let mut touched = BTreeSet::new();
        for &(i, q) in changes {
            session.inner.remove_entry(session.handles[i])?;
            session.handles[i] = session.inner.insert_entry(&session.points[i], q)?;
            touched.insert(session.boxes[i].clone());
        }
        if session.inner.q_current() > session.inner.params().q_budget() {
            session.inner.rebuild()?;
        }
        let affected: BTreeSet<usize> = if session.inner.rebuilds() != rebuilds_before {
            (0..n).collect()
        } else {
            let k = session.inner.params().k() as u64;
            let mut set = BTreeSet::new();
            for (id, idx) in &session.index_by_box {
                if touched.iter().any(|t| t.chebyshev_distance(id) <= k) {
                    set.extend(idx.iter().copied());
                }
            }
            set
        };
        let mut out = Vec::with_capacity(affected.len());
        for i in affected {
            let v = session.inner.kde_query(&session.points[i])?;
            session.values[i] = v;
            out.push((i, v));
        }
        Ok(out)
    }

    /// The current product vector of the mat-vec session, if any.
    pub fn matvec_values(&self) -> Option<&[T]> {
        self.matvec.as_ref().map(|s| s.values.as_slice())
    }

    /// Parameters of the mat-vec session, if any.
    pub fn matvec_params(&self) -> Option<&GridParams<T>> {
        self.matvec.as_ref().map(|s| s.inner.params())
    }

    /// Current charges of the mat-vec session in source order.
    pub fn matvec_charges(&self) -> Option<Vec<T>> {
        self.matvec.as_ref().map(|s| {
            s.handles
                .iter()
                .zip(&s.boxes)
                .map(|(h, b)| s.inner.source_boxes[b].residents[h].charge)
                .collect()
        })
    }
}
