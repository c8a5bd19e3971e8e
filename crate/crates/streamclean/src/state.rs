//! Everything knowable about a stream at the moment a vector arrives: running
//! statistics, seen-key stores, full-vector fingerprints and optional window
//! buffers.
//!
//! The state reflects exactly the vectors committed so far (post-repair
//! values); deleted vectors never enter it, and nothing here can see a vector
//! that has not been processed yet. There is a single writer: the pipeline
//! thread commits vectors in arrival order.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{AttributeValue, DataVector, Instant, Schema, UnknownTuplePolicy};

/// Single-pass (Welford) mean/variance accumulator with min/max tracking.
///
/// Variance and standard deviation use the population convention throughout
/// the crate so that ground-truth and cleaned-stream statistics stay
/// comparable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl Default for RunningStats {
    fn default() -> Self {
        RunningStats {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fold one observation in. Non-finite values are rejected so that a
    /// single bad cell cannot corrupt the whole state.
    pub fn update(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `None` until at least one observation arrived.
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }

    /// Population variance.
    pub fn variance(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.m2 / self.count as f64).max(0.0))
    }

    /// Population standard deviation.
    pub fn std_dev(&self) -> Option<f64> {
        self.variance().map(f64::sqrt)
    }

    pub fn min(&self) -> Option<f64> {
        (self.count > 0).then_some(self.min)
    }

    pub fn max(&self) -> Option<f64> {
        (self.count > 0).then_some(self.max)
    }
}

/// Retention limit for keyed stores: everything older than a duration
/// (relative to the latest commit) or beyond a commit count is evicted.
/// `None` horizon means the full prefix is retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    TimeMs(i64),
    Count(usize),
}

/// Multiset of value tuples with optional horizon-based eviction.
#[derive(Debug, Clone, PartialEq, Default)]
struct TupleStore {
    counts: HashMap<Vec<AttributeValue>, usize>,
    order: VecDeque<(Instant, Vec<AttributeValue>)>,
}

impl TupleStore {
    fn insert(&mut self, arrival: Instant, tuple: Vec<AttributeValue>) -> bool {
        let count = self.counts.entry(tuple.clone()).or_insert(0);
        *count += 1;
        self.order.push_back((arrival, tuple));
        *count == 1
    }

    fn contains(&self, tuple: &[AttributeValue]) -> bool {
        self.counts.contains_key(tuple)
    }

    /// Drop entries outside the horizon; returns tuples that left the store
    /// entirely.
    fn evict(&mut self, horizon: Option<Horizon>, latest: Instant) -> Vec<Vec<AttributeValue>> {
        let mut gone = Vec::new();
        let expired = |store: &TupleStore| -> bool {
            match (horizon, store.order.front()) {
                (Some(Horizon::TimeMs(h)), Some((arrival, _))) => {
                    arrival.millis() < latest.millis() - h
                }
                (Some(Horizon::Count(n)), _) => store.order.len() > n,
                _ => false,
            }
        };
        while expired(self) {
            let (_, tuple) = self.order.pop_front().expect("non-empty while expired");
            if let Some(count) = self.counts.get_mut(&tuple) {
                *count -= 1;
                if *count == 0 {
                    self.counts.remove(&tuple);
                    gone.push(tuple);
                }
            }
        }
        gone
    }

    fn distinct(&self) -> usize {
        self.counts.len()
    }
}

/// Seen keys, seen uniqueness tuples, and the first payload observed for each
/// key (the values of the contradiction-scope attributes of the first vector
/// bearing that key).
#[derive(Debug, Clone, PartialEq)]
pub struct KeyStore {
    keys: TupleStore,
    unique: TupleStore,
    first_payloads: HashMap<Vec<AttributeValue>, Vec<AttributeValue>>,
    horizon: Option<Horizon>,
}

impl KeyStore {
    fn new(horizon: Option<Horizon>) -> Self {
        KeyStore {
            keys: TupleStore::default(),
            unique: TupleStore::default(),
            first_payloads: HashMap::new(),
            horizon,
        }
    }

    pub fn key_seen(&self, key: &[AttributeValue]) -> bool {
        self.keys.contains(key)
    }

    pub fn unique_seen(&self, tuple: &[AttributeValue]) -> bool {
        self.unique.contains(tuple)
    }

    pub fn first_payload(&self, key: &[AttributeValue]) -> Option<&Vec<AttributeValue>> {
        self.first_payloads.get(key)
    }

    pub fn distinct_keys(&self) -> usize {
        self.keys.distinct()
    }
}

/// Fingerprints of whole committed vectors (all attribute values as a tuple;
/// no lossy hashing, so collisions are impossible).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorStore {
    tuples: TupleStore,
    horizon: Option<Horizon>,
}

impl VectorStore {
    fn new(horizon: Option<Horizon>) -> Self {
        VectorStore {
            tuples: TupleStore::default(),
            horizon,
        }
    }

    pub fn contains(&self, values: &[AttributeValue]) -> bool {
        self.tuples.contains(values)
    }
}

/// Bounded view over recent vectors, by time or by count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSpec {
    /// Aligned, non-overlapping time panes of `size_ms`.
    TumblingTime { size_ms: i64 },
    /// Non-overlapping panes of `size` vectors; a full pane rolls over when
    /// the next vector arrives.
    TumblingCount { size: usize },
    /// The trailing `size_ms` of stream time, advancing every `slide_ms`.
    SlidingTime { size_ms: i64, slide_ms: i64 },
    /// The trailing `size` vectors, advancing every `slide` vectors.
    SlidingCount { size: usize, slide: usize },
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        let (size, slide) = match *self {
            WindowSpec::TumblingTime { size_ms } => (size_ms, size_ms),
            WindowSpec::TumblingCount { size } => (size as i64, size as i64),
            WindowSpec::SlidingTime { size_ms, slide_ms } => (size_ms, slide_ms),
            WindowSpec::SlidingCount { size, slide } => (size as i64, slide as i64),
        };
        if size <= 0 {
            return Err(Error::Config("window size must be positive".into()));
        }
        if slide <= 0 || slide > size {
            return Err(Error::Config(
                "window slide must be positive and no larger than the size".into(),
            ));
        }
        Ok(())
    }
}

fn pane_index(t: Instant, size_ms: i64) -> i64 {
    t.millis().div_euclid(size_ms)
}

/// Buffered numeric rows backing one window spec.
#[derive(Debug, Clone, PartialEq)]
struct WindowBuffer {
    spec: WindowSpec,
    entries: VecDeque<(Instant, Vec<Option<f64>>)>,
}

impl WindowBuffer {
    fn push(&mut self, arrival: Instant, row: Vec<Option<f64>>) {
        match self.spec {
            WindowSpec::TumblingCount { size } => {
                if self.entries.len() >= size {
                    self.entries.clear();
                }
            }
            WindowSpec::TumblingTime { size_ms } => {
                let pane = pane_index(arrival, size_ms);
                if self
                    .entries
                    .back()
                    .is_some_and(|(t, _)| pane_index(*t, size_ms) != pane)
                {
                    self.entries.clear();
                }
            }
            WindowSpec::SlidingCount { size, .. } => {
                while self.entries.len() >= size {
                    self.entries.pop_front();
                }
            }
            WindowSpec::SlidingTime { size_ms, .. } => {
                while self
                    .entries
                    .front()
                    .is_some_and(|(t, _)| t.millis() <= arrival.millis() - size_ms)
                {
                    self.entries.pop_front();
                }
            }
        }
        self.entries.push_back((arrival, row));
    }

    fn snapshot(&self, arity: usize, now: Instant) -> Vec<Option<RunningStats>> {
        let in_window = |t: Instant| -> bool {
            match self.spec {
                WindowSpec::TumblingCount { .. } | WindowSpec::SlidingCount { .. } => true,
                WindowSpec::TumblingTime { size_ms } => {
                    pane_index(t, size_ms) == pane_index(now, size_ms)
                }
                WindowSpec::SlidingTime { size_ms, .. } => {
                    t.millis() > now.millis() - size_ms && t.millis() <= now.millis()
                }
            }
        };
        let mut stats: Vec<Option<RunningStats>> = vec![None; arity];
        for (t, row) in &self.entries {
            if !in_window(*t) {
                continue;
            }
            for (i, cell) in row.iter().enumerate() {
                if let Some(x) = cell {
                    let slot = stats[i].get_or_insert_with(RunningStats::new);
                    // values were finite when committed
                    let _ = slot.update(*x);
                }
            }
        }
        for (i, slot) in stats.iter_mut().enumerate() {
            let _ = i;
            if slot.is_none() {
                *slot = Some(RunningStats::new());
            }
        }
        stats
    }
}

/// The time-dependent characteristics of the committed prefix of a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamState {
    /// Per-attribute running statistics; `None` slots are non-numeric attributes.
    stats: Vec<Option<RunningStats>>,
    key_store: KeyStore,
    vector_store: VectorStore,
    /// Last two committed non-null (arrival, value) points per attribute, for
    /// last-value repair and previous-only interpolation.
    history: Vec<VecDeque<(Instant, AttributeValue)>>,
    /// All committed numeric observations per attribute (median backing).
    value_lists: Vec<Vec<f64>>,
    /// Committed value frequencies per attribute (mode backing).
    mode_counts: Vec<HashMap<AttributeValue, u64>>,
    /// Learned functional-dependency rules, parallel to the schema FD list.
    fd_learned: Vec<BTreeMap<Vec<AttributeValue>, AttributeValue>>,
    windows: Vec<WindowBuffer>,
    committed: u64,
    last_arrival: Option<Instant>,
}

impl StreamState {
    pub fn new(schema: &Schema, horizon: Option<Horizon>, windows: &[WindowSpec]) -> Self {
        let arity = schema.arity();
        let stats = schema
            .attributes
            .iter()
            .map(|a| a.declared_type.is_numeric().then(RunningStats::new))
            .collect();
        StreamState {
            stats,
            key_store: KeyStore::new(horizon),
            vector_store: VectorStore::new(horizon),
            history: vec![VecDeque::with_capacity(2); arity],
            value_lists: vec![Vec::new(); arity],
            mode_counts: vec![HashMap::new(); arity],
            fd_learned: vec![BTreeMap::new(); schema.functional_dependencies.len()],
            windows: windows
                .iter()
                .map(|spec| WindowBuffer {
                    spec: *spec,
                    entries: VecDeque::new(),
                })
                .collect(),
            committed: 0,
            last_arrival: None,
        }
    }

    pub fn committed_count(&self) -> u64 {
        self.committed
    }

    /// Arrival time of the most recently committed vector.
    pub fn last_arrival(&self) -> Option<Instant> {
        self.last_arrival
    }

    pub fn stats(&self, attr: usize) -> Option<&RunningStats> {
        self.stats.get(attr).and_then(Option::as_ref)
    }

    pub fn key_store(&self) -> &KeyStore {
        &self.key_store
    }

    pub fn vector_store(&self) -> &VectorStore {
        &self.vector_store
    }

    pub fn fd_learned(&self, fd: usize) -> &BTreeMap<Vec<AttributeValue>, AttributeValue> {
        &self.fd_learned[fd]
    }

    /// Last committed non-null value of an attribute.
    pub fn last_value(&self, attr: usize) -> Option<&AttributeValue> {
        self.history[attr].back().map(|(_, v)| v)
    }

    /// Last two committed non-null (arrival, value) points of an attribute,
    /// oldest first.
    pub fn last_points(&self, attr: usize) -> &VecDeque<(Instant, AttributeValue)> {
        &self.history[attr]
    }

    /// Median of the committed numeric observations of an attribute.
    pub fn median(&self, attr: usize) -> Option<f64> {
        let list = &self.value_lists[attr];
        if list.is_empty() {
            return None;
        }
        let mut sorted = list.clone();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        Some(if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        })
    }

    /// Most frequent committed value of an attribute; ties resolve to the
    /// smallest value so the result is deterministic.
    pub fn mode(&self, attr: usize) -> Option<&AttributeValue> {
        self.mode_counts[attr]
            .iter()
            .max_by(|(va, ca), (vb, cb)| ca.cmp(cb).then_with(|| vb.cmp(va)))
            .map(|(v, _)| v)
    }

    /// Key tuple of a vector; `None` when the schema has no key or any key
    /// attribute is null.
    pub fn key_of(schema: &Schema, vector: &DataVector) -> Option<Vec<AttributeValue>> {
        let idx = schema.key_indices();
        if idx.is_empty() {
            return None;
        }
        let tuple: Vec<_> = idx.iter().map(|&i| vector.values[i].clone()).collect();
        (!tuple.iter().any(AttributeValue::is_null)).then_some(tuple)
    }

    /// Uniqueness tuple of a vector (the unique-flagged attributes).
    pub fn unique_tuple_of(schema: &Schema, vector: &DataVector) -> Option<Vec<AttributeValue>> {
        let idx = schema.unique_indices();
        if idx.is_empty() {
            return None;
        }
        let tuple: Vec<_> = idx.iter().map(|&i| vector.values[i].clone()).collect();
        (!tuple.iter().any(AttributeValue::is_null)).then_some(tuple)
    }

    /// Fold a fully cleaned vector into the state. Deleted vectors must not
    /// be committed; the pipeline guarantees this.
    pub fn commit(&mut self, vector: &DataVector, schema: &Schema) -> Result<()> {
        let arrival = vector.arrival;
        let mut numeric_row: Vec<Option<f64>> = vec![None; schema.arity()];

        for (i, value) in vector.values.iter().enumerate() {
            if value.is_null() {
                continue;
            }
            if value.kind() == Some(schema.attributes[i].declared_type) {
                if let Some(x) = value.as_numeric() {
                    if let Some(stats) = self.stats[i].as_mut() {
                        stats.update(x)?;
                        self.value_lists[i].push(x);
                        numeric_row[i] = Some(x);
                    }
                }
            }
            let hist = &mut self.history[i];
            if hist.len() == 2 {
                hist.pop_front();
            }
            hist.push_back((arrival, value.clone()));
            *self.mode_counts[i].entry(value.clone()).or_insert(0) += 1;
        }

        if let Some(key) = Self::key_of(schema, vector) {
            let first_time = self.key_store.keys.insert(arrival, key.clone());
            if first_time {
                let payload = schema
                    .scope_indices()
                    .iter()
                    .map(|&i| vector.values[i].clone())
                    .collect();
                self.key_store.first_payloads.insert(key, payload);
            }
        }
        if let Some(tuple) = Self::unique_tuple_of(schema, vector) {
            self.key_store.unique.insert(arrival, tuple);
        }
        self.vector_store
            .tuples
            .insert(arrival, vector.values.clone());

        for (k, fd) in schema.functional_dependencies.iter().enumerate() {
            if fd.unknown_policy != UnknownTuplePolicy::LearnFirstSeen {
                continue;
            }
            let tuple: Option<Vec<_>> = fd
                .determinant
                .iter()
                .map(|name| {
                    let i = schema.attr_index(name)?;
                    let v = &vector.values[i];
                    (!v.is_null()).then(|| v.clone())
                })
                .collect();
            let dep_idx = match schema.attr_index(&fd.dependent) {
                Some(i) => i,
                None => continue,
            };
            let dep = &vector.values[dep_idx];
            if let Some(tuple) = tuple {
                if !dep.is_null()
                    && !fd.mapping.contains_key(&tuple)
                    && !self.fd_learned[k].contains_key(&tuple)
                {
                    self.fd_learned[k].insert(tuple, dep.clone());
                }
            }
        }

        for buffer in &mut self.windows {
            buffer.push(arrival, numeric_row.clone());
        }

        self.committed += 1;
        self.last_arrival = Some(arrival);

        let horizon = self.key_store.horizon;
        let gone = self.key_store.keys.evict(horizon, arrival);
        for key in gone {
            self.key_store.first_payloads.remove(&key);
        }
        self.key_store.unique.evict(horizon, arrival);
        let vh = self.vector_store.horizon;
        self.vector_store.tuples.evict(vh, arrival);
        Ok(())
    }

    /// Per-attribute statistics over the vectors inside the given window at
    /// `now`. The spec must be one of the configured window buffers.
    pub fn window_snapshot(
        &self,
        spec: &WindowSpec,
        now: Instant,
    ) -> Result<Vec<Option<RunningStats>>> {
        let buffer = self
            .windows
            .iter()
            .find(|b| b.spec == *spec)
            .ok_or_else(|| Error::Usage("window spec is not configured on this state".into()))?;
        let mut snapshot = buffer.snapshot(self.stats.len(), now);
        // keep non-numeric attributes unflagged rather than zero-count
        for (slot, stats) in snapshot.iter_mut().zip(&self.stats) {
            if stats.is_none() {
                *slot = None;
            }
        }
        Ok(snapshot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AttributeKind, SchemaAttribute};

    fn approx(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} != {b}");
    }

    /// Two-pass reference for mean and population standard deviation.
    fn two_pass(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    fn keyed_schema() -> Schema {
        let mut schema = Schema::new(vec![
            SchemaAttribute::new("id", AttributeKind::Integer).unique_key(),
            SchemaAttribute::new("x", AttributeKind::Float),
        ]);
        schema.contradiction_scope = ["x".to_string()].into_iter().collect();
        schema
    }

    fn vector(idx: u64, t_ms: i64, id: i64, x: f64) -> DataVector {
        DataVector::new(
            idx,
            Instant::from_millis(t_ms),
            vec![AttributeValue::Integer(id), AttributeValue::Float(x)],
        )
    }

    #[test]
    fn welford_matches_two_pass_oracle() {
        let values = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let mut stats = RunningStats::new();
        for v in values {
            stats.update(v).unwrap();
        }
        let (mean, std) = two_pass(&values);
        approx(mean, 5.0);
        approx(std, 2.0);
        approx(stats.mean().unwrap(), mean);
        approx(stats.std_dev().unwrap(), std);
    }

    #[test]
    fn single_observation_has_zero_dispersion() {
        let mut stats = RunningStats::new();
        stats.update(3.25).unwrap();
        assert_eq!(stats.mean(), Some(3.25));
        assert_eq!(stats.variance(), Some(0.0));
    }

    #[test]
    fn repeated_value_has_zero_std() {
        let mut stats = RunningStats::new();
        for _ in 0..100 {
            stats.update(7.5).unwrap();
        }
        approx(stats.std_dev().unwrap(), 0.0);
    }

    #[test]
    fn non_finite_observation_is_rejected() {
        let mut stats = RunningStats::new();
        assert!(matches!(stats.update(f64::NAN), Err(Error::NonFinite)));
        assert_eq!(stats.count(), 0);
    }

    #[test]
    fn empty_stats_are_undefined_flagged() {
        let stats = RunningStats::new();
        assert_eq!(stats.mean(), None);
        assert_eq!(stats.std_dev(), None);
        assert_eq!(stats.min(), None);
    }

    #[test]
    fn commit_records_first_key_and_payload() {
        let schema = keyed_schema();
        let mut state = StreamState::new(&schema, None, &[]);
        state.commit(&vector(1, 0, 7, 10.0), &schema).unwrap();
        assert!(state
            .key_store()
            .key_seen(&[AttributeValue::Integer(7)]));
        assert_eq!(state.key_store().distinct_keys(), 1);

        state.commit(&vector(2, 1000, 8, 11.0), &schema).unwrap();
        state.commit(&vector(3, 2000, 7, 12.0), &schema).unwrap();
        assert_eq!(state.key_store().distinct_keys(), 2);
        // the first a-vector's scope values stay authoritative
        assert_eq!(
            state.key_store().first_payload(&[AttributeValue::Integer(7)]),
            Some(&vec![AttributeValue::Float(10.0)])
        );
    }

    #[test]
    fn time_horizon_evicts_old_keys() {
        let schema = keyed_schema();
        let mut state = StreamState::new(&schema, Some(Horizon::TimeMs(60_000)), &[]);
        state.commit(&vector(1, 0, 1, 1.0), &schema).unwrap();
        state.commit(&vector(2, 61_000, 2, 2.0), &schema).unwrap();
        assert!(!state.key_store().key_seen(&[AttributeValue::Integer(1)]));
        assert!(state.key_store().key_seen(&[AttributeValue::Integer(2)]));
        assert!(state
            .key_store()
            .first_payload(&[AttributeValue::Integer(1)])
            .is_none());
    }

    #[test]
    fn tumbling_count_window_rolls_over() {
        let schema = keyed_schema();
        let spec = WindowSpec::TumblingCount { size: 3 };
        let mut state = StreamState::new(&schema, None, &[spec]);
        for (i, x) in [1.0, 2.0, 3.0, 4.0].into_iter().enumerate() {
            state
                .commit(&vector(i as u64 + 1, i as i64 * 1000, i as i64, x), &schema)
                .unwrap();
        }
        let snap = state
            .window_snapshot(&spec, Instant::from_millis(3000))
            .unwrap();
        let stats = snap[1].as_ref().unwrap();
        assert_eq!(stats.count(), 1);
        assert_eq!(stats.mean(), Some(4.0));
    }

    #[test]
    fn sliding_time_window_keeps_recent_entries() {
        let schema = keyed_schema();
        let spec = WindowSpec::SlidingTime {
            size_ms: 10_000,
            slide_ms: 1_000,
        };
        let mut state = StreamState::new(&schema, None, &[spec]);
        for (i, t) in [0i64, 5_000, 12_000].into_iter().enumerate() {
            state
                .commit(&vector(i as u64 + 1, t, i as i64, t as f64 / 1000.0), &schema)
                .unwrap();
        }
        let snap = state
            .window_snapshot(&spec, Instant::from_millis(12_000))
            .unwrap();
        let stats = snap[1].as_ref().unwrap();
        assert_eq!(stats.count(), 2);
        approx(stats.mean().unwrap(), (5.0 + 12.0) / 2.0);
    }

    #[test]
    fn empty_window_is_undefined_flagged() {
        let schema = keyed_schema();
        let spec = WindowSpec::TumblingTime { size_ms: 1_000 };
        let mut state = StreamState::new(&schema, None, &[spec]);
        state.commit(&vector(1, 0, 1, 5.0), &schema).unwrap();
        // ask far in the future: a fresh pane with nothing in it
        let snap = state
            .window_snapshot(&spec, Instant::from_millis(50_000))
            .unwrap();
        assert_eq!(snap[1].as_ref().unwrap().count(), 0);
        assert_eq!(snap[1].as_ref().unwrap().mean(), None);
    }

    #[test]
    fn unconfigured_window_is_a_usage_error() {
        let schema = keyed_schema();
        let state = StreamState::new(&schema, None, &[]);
        let err = state
            .window_snapshot(&WindowSpec::TumblingCount { size: 3 }, Instant::from_millis(0))
            .unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn state_is_a_pure_function_of_the_committed_prefix() {
        let schema = keyed_schema();
        let vectors: Vec<_> = (0..50)
            .map(|i| vector(i + 1, i as i64 * 1000, (i % 7) as i64, i as f64))
            .collect();

        let mut full = StreamState::new(&schema, None, &[]);
        for v in &vectors[..30] {
            full.commit(v, &schema).unwrap();
        }
        let mut fresh = StreamState::new(&schema, None, &[]);
        for v in &vectors[..30] {
            fresh.commit(v, &schema).unwrap();
        }
        assert_eq!(full, fresh);
    }

    #[test]
    fn mode_breaks_ties_deterministically() {
        let schema = keyed_schema();
        let mut state = StreamState::new(&schema, None, &[]);
        state.commit(&vector(1, 0, 1, 2.0), &schema).unwrap();
        state.commit(&vector(2, 1, 2, 1.0), &schema).unwrap();
        assert_eq!(state.mode(1), Some(&AttributeValue::Float(1.0)));
    }
}
