//! Per-vertex state and the global arrays shared by all phases.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::palette::PartitionedPalette;
use crate::rng::{stream, Phase};

pub type VertexId = u32;
pub type ColorId = u32;
pub type Level = u8;

/// Lowest level of the hierarchy.
pub const BOTTOM_LEVEL: Level = 5;

/// Counters and palettes use flat arrays up to this Δ and hash maps above.
pub const DENSE_LIMIT: u32 = 1024;

pub fn pow3(k: u32) -> u64 {
    3u64.pow(k)
}

/// Smallest k with 3^k >= x.
pub fn ceil_log3(x: u64) -> u32 {
    let (mut k, mut p) = (0, 1u64);
    while p < x {
        p *= 3;
        k += 1;
    }
    k
}

/// Largest k with 3^k <= x; x must be positive.
pub fn floor_log3(x: u64) -> u32 {
    debug_assert!(x > 0);
    let (mut k, mut p) = (0, 3u64);
    while p <= x {
        p = p.saturating_mul(3);
        k += 1;
    }
    k
}

/// Top level λ = max(6, ⌈log₃Δ⌉).
pub fn lambda_for(delta: u32) -> Level {
    ceil_log3(delta as u64).max(6) as Level
}

/// When a vertex last received its color.
///
/// `Det` compares above every numbered stamp. Numbered stamps compare by
/// batch only, so two stamps from the same batch are equally recent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Timestamp {
    Det,
    At { batch: u64, level: Level },
}

impl Timestamp {
    pub fn cmp_recency(&self, other: &Timestamp) -> Ordering {
        use Timestamp::*;
        match (self, other) {
            (Det, Det) => Ordering::Equal,
            (Det, At { .. }) => Ordering::Greater,
            (At { .. }, Det) => Ordering::Less,
            (At { batch: a, .. }, At { batch: b, .. }) => a.cmp(b),
        }
    }
}

/// The endpoint of a monochromatic edge that loses its color: the more
/// recently colored one, ties going to the larger id.
pub fn later_endpoint(u: VertexId, tu: Timestamp, v: VertexId, tv: Timestamp) -> VertexId {
    match tu.cmp_recency(&tv) {
        Ordering::Greater => u,
        Ordering::Less => v,
        Ordering::Equal => u.max(v),
    }
}

/// Vertex set with O(1) insert, remove and membership, iterable as a slice.
#[derive(Clone, Debug, Default)]
pub struct NbrSet {
    items: Vec<VertexId>,
    pos: HashMap<VertexId, u32>,
}

impl NbrSet {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.pos.contains_key(&v)
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.items
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        if self.pos.contains_key(&v) {
            return false;
        }
        self.pos.insert(v, self.items.len() as u32);
        self.items.push(v);
        true
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        let Some(p) = self.pos.remove(&v) else {
            return false;
        };
        let last = self.items.pop().expect("set is non-empty");
        if (p as usize) < self.items.len() {
            self.items[p as usize] = last;
            self.pos.insert(last, p);
        }
        true
    }
}

/// μ⁺ counters: how many neighbors at the owner's level or above use a color.
#[derive(Clone, Debug)]
enum CounterStore {
    Dense(Vec<u32>),
    Sparse(HashMap<ColorId, u32>),
}

impl CounterStore {
    fn new(delta: u32) -> Self {
        if delta <= DENSE_LIMIT {
            CounterStore::Dense(Vec::new())
        } else {
            CounterStore::Sparse(HashMap::new())
        }
    }

    fn get(&self, c: ColorId) -> u32 {
        match self {
            CounterStore::Dense(v) => v.get(c as usize).copied().unwrap_or(0),
            CounterStore::Sparse(m) => m.get(&c).copied().unwrap_or(0),
        }
    }

    fn set(&mut self, c: ColorId, value: u32, delta: u32) {
        match self {
            CounterStore::Dense(v) => {
                if v.is_empty() {
                    v.resize(delta as usize + 1, 0);
                }
                v[c as usize] = value;
            }
            CounterStore::Sparse(m) => {
                if value == 0 {
                    m.remove(&c);
                } else {
                    m.insert(c, value);
                }
            }
        }
    }

    fn nonzero(&self) -> Vec<(ColorId, u32)> {
        let mut out: Vec<(ColorId, u32)> = match self {
            CounterStore::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(c, &x)| (c as ColorId, x))
                .collect(),
            CounterStore::Sparse(m) => m.iter().map(|(&c, &x)| (c, x)).collect(),
        };
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Debug)]
pub struct VertexState {
    level: Level,
    timestamp: Timestamp,
    below: NbrSet,
    /// `at[j - 5]` holds neighbors at level j; only levels >= own are used.
    at: Vec<NbrSet>,
    mu_plus: CounterStore,
    palette: PartitionedPalette,
}

impl VertexState {
    fn new(delta: u32) -> Self {
        VertexState {
            level: BOTTOM_LEVEL,
            timestamp: Timestamp::At { batch: 0, level: BOTTOM_LEVEL },
            below: NbrSet::default(),
            at: Vec::new(),
            mu_plus: CounterStore::new(delta),
            palette: PartitionedPalette::new(delta),
        }
    }

    fn at(&self, level: Level) -> &[VertexId] {
        self.at
            .get((level - BOTTOM_LEVEL) as usize)
            .map_or(&[], |s| s.as_slice())
    }

    fn bucket_mut(&mut self, bucket: Bucket) -> &mut NbrSet {
        match bucket {
            Bucket::Below => &mut self.below,
            Bucket::At(level) => {
                let idx = (level - BOTTOM_LEVEL) as usize;
                if self.at.len() <= idx {
                    self.at.resize_with(idx + 1, NbrSet::default);
                }
                &mut self.at[idx]
            }
        }
    }
}

/// One of the neighbor sets of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bucket {
    Below,
    At(Level),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MarkKind {
    Upper,
    Lower,
    Unmarked,
}

/// Per-level sets of blank vertices waiting to be recolored, keyed by kind.
#[derive(Clone, Debug)]
pub struct MarkSets {
    upper: Vec<BTreeSet<VertexId>>,
    lower: Vec<BTreeSet<VertexId>>,
    unmarked: Vec<BTreeSet<VertexId>>,
}

impl MarkSets {
    fn new(lambda: Level) -> Self {
        let levels = (lambda - BOTTOM_LEVEL + 1) as usize;
        MarkSets {
            upper: vec![BTreeSet::new(); levels],
            lower: vec![BTreeSet::new(); levels],
            unmarked: vec![BTreeSet::new(); levels],
        }
    }

    fn sets(&self, kind: MarkKind) -> &Vec<BTreeSet<VertexId>> {
        match kind {
            MarkKind::Upper => &self.upper,
            MarkKind::Lower => &self.lower,
            MarkKind::Unmarked => &self.unmarked,
        }
    }

    pub fn get(&self, kind: MarkKind, level: Level) -> &BTreeSet<VertexId> {
        &self.sets(kind)[(level - BOTTOM_LEVEL) as usize]
    }

    pub(crate) fn get_mut(&mut self, kind: MarkKind, level: Level) -> &mut BTreeSet<VertexId> {
        let sets = match kind {
            MarkKind::Upper => &mut self.upper,
            MarkKind::Lower => &mut self.lower,
            MarkKind::Unmarked => &mut self.unmarked,
        };
        &mut sets[(level - BOTTOM_LEVEL) as usize]
    }

    pub fn is_empty(&self) -> bool {
        [&self.upper, &self.lower, &self.unmarked]
            .iter()
            .all(|sets| sets.iter().all(|s| s.is_empty()))
    }
}

/// The whole dynamic state: graph, levels, colors, counters, palettes.
#[derive(Clone, Debug)]
pub struct GraphState {
    delta: u32,
    lambda: Level,
    seed: u64,
    vertices: Vec<VertexState>,
    chi: Vec<Option<ColorId>>,
    marks: MarkSets,
    pub(crate) batches: u64,
}

impl GraphState {
    /// Empty graph on `n` vertices, all at level 5 with a uniformly random
    /// color from `0..=Δ`.
    pub fn new(n: usize, delta: u32, seed: u64) -> Result<Self> {
        if delta == 0 {
            return Err(Error::Infeasible("Δ must be at least 1".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::Infeasible(format!("n = {n} does not fit a 32-bit id")));
        }
        let lambda = lambda_for(delta);
        let chi = (0..n)
            .map(|v| Some(stream(seed, v as u64, 0, Phase::InitialColor, 0).gen_range(0..=delta)))
            .collect();
        Ok(GraphState {
            delta,
            lambda,
            seed,
            vertices: (0..n).map(|_| VertexState::new(delta)).collect(),
            chi,
            marks: MarkSets::new(lambda),
            batches: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn lambda(&self) -> Level {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of batches applied so far.
    pub fn batches(&self) -> u64 {
        self.batches
    }

    pub fn levels_range(&self) -> std::ops::RangeInclusive<Level> {
        BOTTOM_LEVEL..=self.lambda
    }

    pub fn check_vertex(&self, v: u64) -> Result<VertexId> {
        if (v as usize) < self.n() {
            Ok(v as VertexId)
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    pub fn level(&self, u: VertexId) -> Level {
        self.vertices[u as usize].level
    }

    pub fn color(&self, u: VertexId) -> Option<ColorId> {
        self.chi[u as usize]
    }

    pub fn colors(&self) -> &[Option<ColorId>] {
        &self.chi
    }

    pub fn levels(&self) -> Vec<Level> {
        self.vertices.iter().map(|s| s.level).collect()
    }

    pub fn timestamp(&self, u: VertexId) -> Timestamp {
        self.vertices[u as usize].timestamp
    }

    /// Neighbors at lower levels.
    pub fn below(&self, u: VertexId) -> &[VertexId] {
        self.vertices[u as usize].below.as_slice()
    }

    /// Neighbors at exactly `level`; only meaningful for `level >= level(u)`.
    pub fn nbrs_at(&self, u: VertexId, level: Level) -> &[VertexId] {
        self.vertices[u as usize].at(level)
    }

    pub fn degree(&self, u: VertexId) -> usize {
        let s = &self.vertices[u as usize];
        s.below.len() + s.at.iter().map(NbrSet::len).sum::<usize>()
    }

    pub fn neighbors(&self, u: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let s = &self.vertices[u as usize];
        s.below
            .as_slice()
            .iter()
            .chain(s.at.iter().flat_map(|b| b.as_slice().iter()))
            .copied()
    }

    /// N_u(5, ℓ(u)): neighbors at the vertex's own level or lower.
    pub fn same_or_lower(&self, u: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let s = &self.vertices[u as usize];
        s.below.as_slice().iter().chain(s.at(s.level).iter()).copied()
    }

    /// |N_u(5, k)|, the number of neighbors at level k or lower.
    pub fn count_le(&self, u: VertexId, k: Level) -> usize {
        let s = &self.vertices[u as usize];
        if k + 1 >= s.level {
            s.below.len() + (s.level..=k).map(|j| s.at(j).len()).sum::<usize>()
        } else {
            s.below.as_slice().iter().filter(|&&v| self.level(v) <= k).count()
        }
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let s = &self.vertices[u as usize];
        s.below.contains(v) || s.at.iter().any(|b| b.contains(v))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n() as VertexId).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Edges as (u, v) with u < v, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out: Vec<_> = (0..self.n() as VertexId)
            .flat_map(|u| self.neighbors(u).filter(move |&v| u < v).map(move |v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn mu(&self, u: VertexId, c: ColorId) -> u32 {
        self.vertices[u as usize].mu_plus.get(c)
    }

    pub fn palette(&self, u: VertexId) -> &PartitionedPalette {
        &self.vertices[u as usize].palette
    }

    pub fn marks(&self) -> &MarkSets {
        &self.marks
    }

    pub(crate) fn marks_mut(&mut self) -> &mut MarkSets {
        &mut self.marks
    }

    pub(crate) fn palette_mut(&mut self, u: VertexId) -> &mut PartitionedPalette {
        &mut self.vertices[u as usize].palette
    }

    pub(crate) fn bucket_insert(&mut self, u: VertexId, bucket: Bucket, v: VertexId) -> bool {
        self.vertices[u as usize].bucket_mut(bucket).insert(v)
    }

    pub(crate) fn bucket_remove(&mut self, u: VertexId, bucket: Bucket, v: VertexId) -> bool {
        self.vertices[u as usize].bucket_mut(bucket).remove(v)
    }

    /// Applies `dec` decrements, then `inc` increments, to μ⁺_u(c).
    pub(crate) fn counter_update(&mut self, u: VertexId, c: ColorId, dec: u32, inc: u32) -> Result<u32> {
        if c > self.delta {
            return Err(Error::ColorOutOfRange { color: c, max: self.delta });
        }
        let delta = self.delta;
        let store = &mut self.vertices[u as usize].mu_plus;
        let cur = store.get(c);
        if dec > cur {
            return Err(Error::invariant(format!(
                "counter μ⁺[{u}][{c}] = {cur} cannot take {dec} decrements"
            )));
        }
        let next = cur - dec + inc;
        store.set(c, next, delta);
        Ok(next)
    }

    pub(crate) fn set_color(&mut self, u: VertexId, c: Option<ColorId>) -> Result<()> {
        if let Some(c) = c {
            if c > self.delta {
                return Err(Error::ColorOutOfRange { color: c, max: self.delta });
            }
        }
        self.chi[u as usize] = c;
        Ok(())
    }

    pub(crate) fn set_level(&mut self, u: VertexId, level: Level) -> Result<()> {
        if !self.levels_range().contains(&level) {
            return Err(Error::invariant(format!("level {level} outside 5..={}", self.lambda)));
        }
        self.vertices[u as usize].level = level;
        Ok(())
    }

    pub(crate) fn set_timestamp(&mut self, u: VertexId, ts: Timestamp) {
        self.vertices[u as usize].timestamp = ts;
    }

    /// Full consistency check of the redundant structures. Linear in the
    /// size of the graph plus the upper palettes; meant for tests and audits.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(msg));
        for u in 0..self.n() as VertexId {
            let s = &self.vertices[u as usize];
            let lu = s.level;
            if !self.levels_range().contains(&lu) {
                return fail(format!("vertex {u} at level {lu}"));
            }
            if let Some(c) = self.chi[u as usize] {
                if c > self.delta {
                    return fail(format!("vertex {u} has color {c} > Δ"));
                }
            }
            if self.degree(u) > self.delta as usize {
                return fail(format!("vertex {u} has degree {} > Δ", self.degree(u)));
            }
            let mut seen = BTreeSet::new();
            for &v in s.below.as_slice() {
                if self.level(v) >= lu {
                    return fail(format!("{v} in below({u}) but not lower"));
                }
                seen.insert(v);
            }
            for (idx, b) in s.at.iter().enumerate() {
                let j = idx as Level + BOTTOM_LEVEL;
                if j < lu && !b.is_empty() {
                    return fail(format!("vertex {u} keeps neighbors at level {j} < {lu}"));
                }
                for &v in b.as_slice() {
                    if self.level(v) != j {
                        return fail(format!("{v} filed at level {j} of {u} but sits at {}", self.level(v)));
                    }
                    if !seen.insert(v) {
                        return fail(format!("{v} filed twice in {u}"));
                    }
                }
            }
            for &v in &seen {
                if v == u || v as usize >= self.n() {
                    return fail(format!("bad neighbor {v} of {u}"));
                }
                if !self.has_edge(v, u) {
                    return fail(format!("edge {u}-{v} is one-sided"));
                }
            }
            let mut expect: HashMap<ColorId, u32> = HashMap::new();
            for &v in &seen {
                if self.level(v) >= lu {
                    if let Some(c) = self.chi[v as usize] {
                        *expect.entry(c).or_default() += 1;
                    }
                }
            }
            let mut expect: Vec<(ColorId, u32)> = expect.into_iter().collect();
            expect.sort_unstable();
            if expect != s.mu_plus.nonzero() {
                return fail(format!("μ⁺ of {u} is {:?}, expected {expect:?}", s.mu_plus.nonzero()));
            }
            s.palette.check_permutation().map_err(|e| Error::Invariant(format!("palette of {u}: {e}")))?;
            let upper: BTreeSet<ColorId> = s.palette.upper_colors().collect();
            let nonzero: BTreeSet<ColorId> = expect.iter().map(|&(c, _)| c).collect();
            if upper != nonzero {
                return fail(format!("upper palette of {u} is {upper:?}, counters say {nonzero:?}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_values() {
        assert_eq!(lambda_for(9), 6);
        assert_eq!(lambda_for(729), 6);
        assert_eq!(lambda_for(730), 7);
        assert_eq!(lambda_for(2188), 8);
        assert_eq!(lambda_for(6561), 8);
        assert_eq!(lambda_for(6562), 9);
    }

    #[test]
    fn logs() {
        assert_eq!(floor_log3(1), 0);
        assert_eq!(floor_log3(8), 1);
        assert_eq!(floor_log3(9), 2);
        assert_eq!(floor_log3(2187), 7);
        assert_eq!(ceil_log3(1), 0);
        assert_eq!(ceil_log3(10), 3);
    }

    #[test]
    fn timestamp_order() {
        let a = Timestamp::At { batch: 4, level: 6 };
        let b = Timestamp::At { batch: 4, level: 9 };
        let c = Timestamp::At { batch: 7, level: 5 };
        assert_eq!(a.cmp_recency(&b), Ordering::Equal);
        assert_eq!(Timestamp::Det.cmp_recency(&c), Ordering::Greater);
        assert_eq!(a.cmp_recency(&c), Ordering::Less);
        assert_eq!(later_endpoint(3, a, 8, b), 8);
        assert_eq!(later_endpoint(3, Timestamp::Det, 8, c), 3);
    }

    #[test]
    fn nbr_set_ops() {
        let mut s = NbrSet::default();
        assert!(s.insert(4));
        assert!(!s.insert(4));
        s.insert(9);
        s.insert(2);
        assert!(s.remove(4));
        assert!(!s.remove(4));
        let mut items = s.as_slice().to_vec();
        items.sort();
        assert_eq!(items, vec![2, 9]);
        assert!(s.contains(2) && !s.contains(4));
    }

    #[test]
    fn fresh_state_is_consistent() {
        let g = GraphState::new(50, 9, 3).unwrap();
        assert!(g.colors().iter().all(|c| c.is_some_and(|c| c <= 9)));
        assert!(g.levels().iter().all(|&l| l == 5));
        g.check_invariants().unwrap();
        assert!(GraphState::new(5, 0, 1).is_err());
    }
}
