//! Hypergraph, capacities and matchings.
//!
//! Vertices are `0..n`, edges are `0..m`. Each edge stores its pins as a
//! strictly increasing list so that subset and disjointness tests are plain
//! merges. Parallel edges (same pin set) are allowed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Weight = u64;

/// The generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    pins: Vec<Vec<VertexId>>,
    weights: Vec<Weight>,
    incidence: Vec<Vec<EdgeId>>,
}

impl Hypergraph {
    /// Builds a hypergraph from `(pins, weight)` pairs. Pins are sorted and
    /// deduplicated; out-of-range ids, zero weights and empty edges are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Vec<VertexId>, Weight)>,
    {
        let mut pins = Vec::new();
        let mut weights = Vec::new();
        for (e, (mut p, w)) in edges.into_iter().enumerate() {
            if p.is_empty() {
                return Err(ModelError::EmptyEdge { edge: e });
            }
            if w < 1 {
                return Err(ModelError::ZeroWeight { edge: e });
            }
            p.sort_unstable();
            p.dedup();
            if let Some(&v) = p.last() {
                if v >= n {
                    return Err(ModelError::VertexOutOfRange { edge: e, vertex: v, n });
                }
            }
            pins.push(p);
            weights.push(w);
        }
        Ok(Self::from_parts(n, pins, weights))
    }

    /// Caller guarantees sorted, deduplicated, in-range, non-empty pins and
    /// positive weights.
    pub(crate) fn from_parts(n: usize, pins: Vec<Vec<VertexId>>, weights: Vec<Weight>) -> Self {
        debug_assert_eq!(pins.len(), weights.len());
        let mut incidence = vec![Vec::new(); n];
        for (e, p) in pins.iter().enumerate() {
            debug_assert!(!p.is_empty() && p.windows(2).all(|w| w[0] < w[1]));
            for &v in p {
                incidence[v].push(e);
            }
        }
        Hypergraph {
            n,
            pins,
            weights,
            incidence,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.pins.len()
    }

    pub fn pins(&self, e: EdgeId) -> &[VertexId] {
        &self.pins[e]
    }

    pub fn weight(&self, e: EdgeId) -> Weight {
        self.weights[e]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Incident edges of `v`, ascending.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&[VertexId], Weight)> + '_ {
        self.pins.iter().map(|p| p.as_slice()).zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> Weight {
        self.weights.iter().sum()
    }

    pub fn max_edge_size(&self) -> usize {
        self.pins.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Same structure, new weights.
    pub fn with_weights(&self, weights: Vec<Weight>) -> Result<Self, ModelError> {
        if weights.len() != self.num_edges() {
            return Err(ModelError::LengthMismatch {
                what: "weights",
                expected: self.num_edges(),
                found: weights.len(),
            });
        }
        if let Some(e) = weights.iter().position(|&w| w < 1) {
            return Err(ModelError::ZeroWeight { edge: e });
        }
        Ok(Hypergraph {
            weights,
            ..self.clone()
        })
    }

    pub fn stats(&self, b: &CapacityMap) -> InstanceStats {
        InstanceStats {
            n: self.n,
            m: self.num_edges(),
            max_edge_size: self.max_edge_size(),
            max_degree: self.max_degree(),
            max_capacity: b.max(),
            total_weight: self.total_weight(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub n: usize,
    pub m: usize,
    pub max_edge_size: usize,
    pub max_degree: usize,
    pub max_capacity: usize,
    pub total_weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityMap(Vec<usize>);

impl CapacityMap {
    pub fn new(b: Vec<usize>) -> Result<Self, ModelError> {
        if let Some(v) = b.iter().position(|&c| c < 1) {
            return Err(ModelError::ZeroCapacity { vertex: v });
        }
        Ok(CapacityMap(b))
    }

    pub fn uniform(n: usize, k: usize) -> Result<Self, ModelError> {
        Self::new(vec![k; n])
    }

    pub fn get(&self, v: VertexId) -> usize {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Largest capacity, 0 for an empty map.
    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn check_len(&self, h: &Hypergraph) -> Result<(), ModelError> {
        if self.len() != h.num_vertices() {
            return Err(ModelError::LengthMismatch {
                what: "capacities",
                expected: h.num_vertices(),
                found: self.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacitySpec {
    Const(usize),
    /// `b(v)` uniform in `[1, max(1, deg(v))]`.
    Random,
}

/// Capacities are drawn in vertex-id order.
pub fn make_capacity(spec: CapacitySpec, h: &Hypergraph, seed: u64) -> Result<CapacityMap, ModelError> {
    match spec {
        CapacitySpec::Const(k) => CapacityMap::uniform(h.num_vertices(), k),
        CapacitySpec::Random => {
            let mut rng = seeded_rng(seed);
            let b = (0..h.num_vertices())
                .map(|v| rng.random_range(1..=h.degree(v).max(1)))
                .collect();
            CapacityMap::new(b)
        }
    }
}

/// Redraws every edge weight uniformly from `[lo, hi]`, in edge-id order.
pub fn assign_random_weights(h: &Hypergraph, seed: u64, lo: Weight, hi: Weight) -> Result<Hypergraph, ModelError> {
    if lo < 1 || hi < lo {
        return Err(ModelError::BadWeightRange { lo, hi });
    }
    let mut rng = seeded_rng(seed);
    let weights = (0..h.num_edges()).map(|_| rng.random_range(lo..=hi)).collect();
    h.with_weights(weights)
}

/// Random hypergraph with `m` edges of size `1..=max_pins` over `n`
/// vertices and weights uniform in `[lo, hi]`.
pub fn random_hypergraph(
    n: usize,
    m: usize,
    max_pins: usize,
    lo: Weight,
    hi: Weight,
    seed: u64,
) -> Result<Hypergraph, ModelError> {
    if lo < 1 || hi < lo {
        return Err(ModelError::BadWeightRange { lo, hi });
    }
    let mut rng = seeded_rng(seed);
    let max_pins = max_pins.clamp(1, n.max(1));
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let size = rng.random_range(1..=max_pins);
        let pins = rand::seq::index::sample(&mut rng, n, size).into_vec();
        edges.push((pins, rng.random_range(lo..=hi)));
    }
    Hypergraph::new(n, edges)
}

/// k-th largest value counting multiplicity; 0 when there are fewer than
/// `k` values.
pub fn nmax(values: &[Weight], k: usize) -> Weight {
    if k == 0 || values.len() < k {
        return 0;
    }
    let mut v = values.to_vec();
    let (_, kth, _) = v.select_nth_unstable_by(k - 1, |a, b| b.cmp(a));
    *kth
}

/// A feasible b-matching. Every mutation keeps `usage[v] <= b(v)` and the
/// cached weight in sync.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pos: Vec<usize>,
    list: Vec<EdgeId>,
    usage: Vec<usize>,
    weight: Weight,
}

const ABSENT: usize = usize::MAX;

impl Matching {
    pub fn new(h: &Hypergraph) -> Self {
        Matching {
            pos: vec![ABSENT; h.num_edges()],
            list: Vec::new(),
            usage: vec![0; h.num_vertices()],
            weight: 0,
        }
    }

    pub fn from_edges<I>(h: &Hypergraph, b: &CapacityMap, edges: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = EdgeId>,
    {
        let mut m = Matching::new(h);
        for e in edges {
            m.insert(h, b, e)?;
        }
        Ok(m)
    }

    /// True when this matching was built for a hypergraph of `h`'s shape.
    pub fn fits(&self, h: &Hypergraph) -> bool {
        self.pos.len() == h.num_edges() && self.usage.len() == h.num_vertices()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.pos.get(e).is_some_and(|&p| p != ABSENT)
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn usage(&self, v: VertexId) -> usize {
        self.usage[v]
    }

    /// Members in unspecified (but deterministic) order.
    pub fn edges(&self) -> &[EdgeId] {
        &self.list
    }

    pub fn sorted_edges(&self) -> Vec<EdgeId> {
        let mut v = self.list.clone();
        v.sort_unstable();
        v
    }

    pub fn is_free(&self, h: &Hypergraph, b: &CapacityMap, e: EdgeId) -> bool {
        h.pins(e).iter().all(|&v| self.usage[v] < b.get(v))
    }

    pub fn insert(&mut self, h: &Hypergraph, b: &CapacityMap, e: EdgeId) -> Result<(), ModelError> {
        if e >= h.num_edges() {
            return Err(ModelError::UnknownEdge { edge: e });
        }
        if self.contains(e) {
            return Err(ModelError::DuplicateEdge { edge: e });
        }
        if let Some(&v) = h.pins(e).iter().find(|&&v| self.usage[v] >= b.get(v)) {
            return Err(ModelError::CapacityExceeded { edge: e, vertex: v });
        }
        self.insert_unchecked(h, e);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, h: &Hypergraph, e: EdgeId) {
        self.pos[e] = self.list.len();
        self.list.push(e);
        for &v in h.pins(e) {
            self.usage[v] += 1;
        }
        self.weight += h.weight(e);
    }

    pub fn remove(&mut self, h: &Hypergraph, e: EdgeId) -> bool {
        if !self.contains(e) {
            return false;
        }
        let p = self.pos[e];
        self.list.swap_remove(p);
        if let Some(&moved) = self.list.get(p) {
            self.pos[moved] = p;
        }
        self.pos[e] = ABSENT;
        for &v in h.pins(e) {
            self.usage[v] -= 1;
        }
        self.weight -= h.weight(e);
        true
    }
}

/// Pins of `e` whose capacity is exhausted by `m`.
pub fn blocked(h: &Hypergraph, b: &CapacityMap, e: EdgeId, m: &Matching) -> Vec<VertexId> {
    h.pins(e)
        .iter()
        .copied()
        .filter(|&v| m.usage(v) >= b.get(v))
        .collect()
}

/// Edges sharing a capacity-1 pin with `e`, ascending, without `e`.
pub fn blocked_edges(h: &Hypergraph, b: &CapacityMap, e: EdgeId) -> Vec<EdgeId> {
    let mut out: Vec<EdgeId> = h
        .pins(e)
        .iter()
        .filter(|&&v| b.get(v) == 1)
        .flat_map(|&v| h.incident(v).iter().copied())
        .filter(|&f| f != e)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub feasible: bool,
    pub weight: Weight,
    pub diagnostic: Option<String>,
}

/// Recomputes feasibility and weight of an edge list from scratch.
pub fn validate_matching(h: &Hypergraph, b: &CapacityMap, edges: &[EdgeId]) -> Validation {
    let mut usage = vec![0usize; h.num_vertices()];
    let mut seen = vec![false; h.num_edges()];
    let mut weight: Weight = 0;
    let mut diagnostic = None;
    for &e in edges {
        if e >= h.num_edges() {
            diagnostic.get_or_insert_with(|| format!("unknown edge id {e}"));
            continue;
        }
        if std::mem::replace(&mut seen[e], true) {
            diagnostic.get_or_insert_with(|| format!("edge {e} listed twice"));
            continue;
        }
        weight += h.weight(e);
        for &v in h.pins(e) {
            usage[v] += 1;
        }
    }
    if diagnostic.is_none() && b.len() != h.num_vertices() {
        diagnostic = Some(format!("{} capacities for {} vertices", b.len(), h.num_vertices()));
    }
    if diagnostic.is_none() {
        if let Some(v) = (0..h.num_vertices()).find(|&v| usage[v] > b.get(v)) {
            diagnostic = Some(format!("vertex {v} used {} times, capacity {}", usage[v], b.get(v)));
        }
    }
    Validation {
        feasible: diagnostic.is_none(),
        weight,
        diagnostic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Hypergraph {
        Hypergraph::new(3, vec![(vec![0, 1], 3), (vec![1, 2], 2), (vec![0, 2], 2)]).unwrap()
    }

    #[test]
    fn build_transposes_incidence() {
        let h = Hypergraph::new(3, vec![(vec![0, 1], 3), (vec![1, 2], 2)]).unwrap();
        assert_eq!(h.incident(1), &[0, 1]);
        assert_eq!(h.incident(0), &[0]);
        assert_eq!(h.incident(2), &[1]);
    }

    #[test]
    fn build_dedups_pins() {
        let h = Hypergraph::new(2, vec![(vec![0, 1, 1], 5)]).unwrap();
        assert_eq!(h.pins(0), &[0, 1]);
        assert_eq!(h.degree(1), 1);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            Hypergraph::new(2, vec![(vec![0, 2], 1)]),
            Err(ModelError::VertexOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            Hypergraph::new(2, vec![(vec![0, 1], 0)]),
            Err(ModelError::ZeroWeight { .. })
        ));
        assert!(matches!(
            Hypergraph::new(2, vec![(vec![], 1)]),
            Err(ModelError::EmptyEdge { .. })
        ));
    }

    #[test]
    fn stats_summarize() {
        let h = triangle();
        let b = CapacityMap::new(vec![1, 2, 1]).unwrap();
        let s = h.stats(&b);
        assert_eq!((s.n, s.m, s.max_edge_size, s.max_degree, s.max_capacity, s.total_weight), (3, 3, 2, 2, 2, 7));
    }

    #[test]
    fn nmax_examples() {
        assert_eq!(nmax(&[5, 3, 1], 2), 3);
        assert_eq!(nmax(&[], 1), 0);
        assert_eq!(nmax(&[4, 4, 2], 2), 4);
        assert_eq!(nmax(&[4], 2), 0);
    }

    #[test]
    fn degenerate_weight_interval() {
        let h = triangle();
        let h = assign_random_weights(&h, 3, 7, 7).unwrap();
        assert!(h.weights().iter().all(|&w| w == 7));
        assert!(assign_random_weights(&h, 3, 0, 7).is_err());
    }

    #[test]
    fn weights_are_seed_deterministic() {
        let h = random_hypergraph(50, 200, 4, 1, 100, 9).unwrap();
        let a = assign_random_weights(&h, 11, 1, 100).unwrap();
        let b = assign_random_weights(&h, 11, 1, 100).unwrap();
        assert_eq!(a.weights(), b.weights());
        let c = assign_random_weights(&h, 12, 1, 100).unwrap();
        assert_ne!(a.weights(), c.weights());
    }

    #[test]
    fn uniform_weight_mean() {
        // mean 50.5, sd of the sample mean ~0.29 for m = 10^4
        let h = random_hypergraph(100, 10_000, 3, 1, 1, 1).unwrap();
        let h = assign_random_weights(&h, 42, 1, 100).unwrap();
        let mean = h.total_weight() as f64 / h.num_edges() as f64;
        assert!((48.0..=53.0).contains(&mean), "mean {mean}");
        assert!(h.weights().iter().all(|&w| (1..=100).contains(&w)));
    }

    #[test]
    fn capacities() {
        let h = random_hypergraph(30, 60, 4, 1, 100, 5).unwrap();
        let ones = make_capacity(CapacitySpec::Const(1), &h, 0).unwrap();
        assert!(ones.as_slice().iter().all(|&c| c == 1));
        assert!(make_capacity(CapacitySpec::Const(0), &h, 0).is_err());

        let r1 = make_capacity(CapacitySpec::Random, &h, 77).unwrap();
        let r2 = make_capacity(CapacitySpec::Random, &h, 77).unwrap();
        assert_eq!(r1, r2);
        for v in 0..h.num_vertices() {
            assert!(r1.get(v) >= 1 && r1.get(v) <= h.degree(v).max(1));
        }

        let matching = Hypergraph::new(4, vec![(vec![0, 1], 1), (vec![2, 3], 1)]).unwrap();
        let r = make_capacity(CapacitySpec::Random, &matching, 3).unwrap();
        assert!(r.as_slice().iter().all(|&c| c == 1));
    }

    #[test]
    fn blocked_examples() {
        let path = Hypergraph::new(3, vec![(vec![0, 1], 1), (vec![1, 2], 1)]).unwrap();
        let b = CapacityMap::uniform(3, 1).unwrap();
        let empty = Matching::new(&path);
        assert!(blocked(&path, &b, 0, &empty).is_empty());
        assert!(blocked(&path, &b, 1, &empty).is_empty());
        let m = Matching::from_edges(&path, &b, [0]).unwrap();
        assert_eq!(blocked(&path, &b, 1, &m), vec![1]);

        let b2 = CapacityMap::uniform(3, 2).unwrap();
        let m2 = Matching::from_edges(&path, &b2, [0]).unwrap();
        assert!(blocked(&path, &b2, 1, &m2).is_empty());
    }

    #[test]
    fn blocked_edges_examples() {
        // star through vertex 0
        let star = Hypergraph::new(4, vec![(vec![0, 1], 1), (vec![0, 2], 1), (vec![0, 3], 1)]).unwrap();
        let mut caps = vec![1, 5, 5, 5];
        let b = CapacityMap::new(caps.clone()).unwrap();
        assert_eq!(blocked_edges(&star, &b, 0), vec![1, 2]);
        caps[0] = 2;
        let b = CapacityMap::new(caps).unwrap();
        assert!(blocked_edges(&star, &b, 0).is_empty());

        let private = Hypergraph::new(3, vec![(vec![0, 1], 1), (vec![1, 2], 1)]).unwrap();
        let b = CapacityMap::new(vec![1, 2, 1]).unwrap();
        assert!(blocked_edges(&private, &b, 0).is_empty());
    }

    #[test]
    fn validate_examples() {
        let h = triangle();
        let b = CapacityMap::uniform(3, 1).unwrap();
        assert_eq!(
            validate_matching(&h, &b, &[]),
            Validation { feasible: true, weight: 0, diagnostic: None }
        );
        assert!(!validate_matching(&h, &b, &[0, 1]).feasible);
        let v = validate_matching(&h, &b, &[0]);
        assert!(v.feasible);
        assert_eq!(v.weight, 3);
        let bad = validate_matching(&h, &b, &[7]);
        assert!(!bad.feasible);
        assert!(bad.diagnostic.unwrap().contains("unknown"));
    }

    #[test]
    fn matching_rejects_overfull_vertex() {
        let h = triangle();
        let b = CapacityMap::uniform(3, 1).unwrap();
        let mut m = Matching::new(&h);
        m.insert(&h, &b, 0).unwrap();
        assert!(matches!(m.insert(&h, &b, 1), Err(ModelError::CapacityExceeded { .. })));
        assert!(matches!(m.insert(&h, &b, 0), Err(ModelError::DuplicateEdge { .. })));
        assert!(m.remove(&h, 0));
        assert!(!m.remove(&h, 0));
        assert_eq!(m.weight(), 0);
    }
}
