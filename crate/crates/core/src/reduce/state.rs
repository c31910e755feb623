use crate::hypergraph::{CapacityMap, EdgeId, Hypergraph, VertexId, Weight};

use super::{
    EdgeFate, FoldRecord, FoldedEdge, KernelResult, ReductionConfig, ReductionReport, RoundStats, Rule, RuleEffect,
};

/// Mutable working copy of an instance while reductions run.
///
/// Incidence lists are pruned lazily: they may still hold dead edges, while
/// `degree` is always exact. Pins of live edges always have residual
/// capacity at least 1.
#[derive(Debug, Clone)]
pub struct Reducer {
    pub(super) pins: Vec<Vec<VertexId>>,
    pub(super) weights: Vec<Weight>,
    pub(super) alive: Vec<bool>,
    pub(super) fates: Vec<EdgeFate>,
    pub(super) incidence: Vec<Vec<EdgeId>>,
    pub(super) degree: Vec<usize>,
    pub(super) vertex_alive: Vec<bool>,
    pub(super) residual: Vec<usize>,
    pub(super) exact: Vec<EdgeId>,
    pub(super) fold_log: Vec<FoldRecord>,
    pub(super) offset: Weight,
    pub(super) effects: [RuleEffect; 6],
    pub(super) current: Rule,
    original_edges: usize,
    original_vertices: usize,
}

impl Reducer {
    pub fn new(h: &Hypergraph, b: &CapacityMap) -> Self {
        let n = h.num_vertices();
        let m = h.num_edges();
        Reducer {
            pins: (0..m).map(|e| h.pins(e).to_vec()).collect(),
            weights: h.weights().to_vec(),
            alive: vec![true; m],
            fates: vec![EdgeFate::Kernel; m],
            incidence: (0..n).map(|v| h.incident(v).to_vec()).collect(),
            degree: (0..n).map(|v| h.degree(v)).collect(),
            vertex_alive: vec![true; n],
            residual: b.as_slice().to_vec(),
            exact: Vec::new(),
            fold_log: Vec::new(),
            offset: 0,
            effects: Default::default(),
            current: Rule::AbundantVertices,
            original_edges: m,
            original_vertices: n,
        }
    }

    pub fn apply(&mut self, rule: Rule, cfg: &ReductionConfig) -> usize {
        self.current = rule;
        let applied = match rule {
            Rule::AbundantVertices => self.reduce_abundant_vertices(),
            Rule::NeighborhoodRemoval => self.reduce_neighborhood_removal(cfg),
            Rule::IsolatedEdge => self.reduce_weighted_isolated_edge(cfg),
            Rule::Domination => self.reduce_weighted_domination(cfg),
            Rule::EdgeFolding => self.reduce_weighted_edge_folding(cfg),
            Rule::Twin => self.reduce_weighted_twin(cfg),
        };
        self.effects[rule as usize].applications += applied;
        applied
    }

    pub fn is_alive(&self, e: EdgeId) -> bool {
        self.alive.get(e).copied().unwrap_or(false)
    }

    pub fn num_alive_edges(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Vertices that still constrain something.
    pub fn num_alive_vertices(&self) -> usize {
        (0..self.vertex_alive.len())
            .filter(|&v| self.vertex_alive[v] && self.degree[v] > 0)
            .count()
    }

    pub fn residual(&self, v: VertexId) -> usize {
        self.residual[v]
    }

    pub fn exact(&self) -> &[EdgeId] {
        &self.exact
    }

    pub fn weight_offset(&self) -> Weight {
        self.offset
    }

    pub fn fold_log(&self) -> &[FoldRecord] {
        &self.fold_log
    }

    pub fn fate(&self, e: EdgeId) -> EdgeFate {
        self.fates[e]
    }

    /// Live incident edges of `v`, ascending by id.
    pub(super) fn live(&mut self, v: VertexId) -> Vec<EdgeId> {
        let alive = &self.alive;
        let list = &mut self.incidence[v];
        if list.len() != self.degree[v] {
            list.retain(|&e| alive[e]);
        }
        debug_assert_eq!(list.len(), self.degree[v]);
        let mut out = list.clone();
        out.sort_unstable();
        out
    }

    /// Live incident edges of `v` by descending weight, ties by id.
    pub(super) fn live_by_weight(&mut self, v: VertexId) -> Vec<EdgeId> {
        let mut out = self.live(v);
        let w = &self.weights;
        out.sort_by(|&a, &b| w[b].cmp(&w[a]).then(a.cmp(&b)));
        out
    }

    pub(super) fn remove_edge(&mut self, e: EdgeId, fate: EdgeFate) {
        debug_assert!(self.alive[e]);
        self.alive[e] = false;
        self.fates[e] = fate;
        for &v in &self.pins[e] {
            self.degree[v] -= 1;
        }
        let eff = &mut self.effects[self.current as usize];
        match fate {
            EdgeFate::Included => eff.included += 1,
            EdgeFate::Excluded => eff.excluded += 1,
            EdgeFate::Folded => eff.folded += 1,
            EdgeFate::Kernel => unreachable!("removal needs a final fate"),
        }
    }

    fn add_edge(&mut self, pins: Vec<VertexId>, weight: Weight) -> EdgeId {
        let id = self.pins.len();
        for &v in &pins {
            self.incidence[v].push(id);
            self.degree[v] += 1;
        }
        self.pins.push(pins);
        self.weights.push(weight);
        self.alive.push(true);
        self.fates.push(EdgeFate::Kernel);
        id
    }

    /// Decides `e` into the solution: consumes one unit of capacity at each
    /// pin and excludes every edge at a pin whose capacity runs out.
    ///
    /// Panics if `e` is not live or not free.
    pub fn commit_edge(&mut self, e: EdgeId) {
        assert!(self.alive[e], "commit of dead edge {e}");
        assert!(
            self.pins[e].iter().all(|&v| self.residual[v] >= 1),
            "commit of non-free edge {e}"
        );
        self.exact.push(e);
        self.offset += self.weights[e];
        self.remove_edge(e, EdgeFate::Included);
        let pins = self.pins[e].clone();
        for &v in &pins {
            self.residual[v] -= 1;
        }
        for &v in &pins {
            if self.residual[v] == 0 {
                for f in self.live(v) {
                    self.remove_edge(f, EdgeFate::Excluded);
                }
            }
        }
    }

    /// The other edges at the pins of `e`, if every pin of `e` has degree 2
    /// and residual capacity 1.
    pub(super) fn linked_neighbors(&mut self, e: EdgeId) -> Option<Vec<EdgeId>> {
        let mut out = Vec::with_capacity(self.pins[e].len());
        for i in 0..self.pins[e].len() {
            let w = self.pins[e][i];
            if self.degree[w] != 2 || self.residual[w] != 1 {
                return None;
            }
            out.extend(self.live(w).into_iter().filter(|&f| f != e));
        }
        out.sort_unstable();
        out.dedup();
        Some(out)
    }

    pub(super) fn independent(&self, edges: &[EdgeId]) -> bool {
        let mut seen: Vec<VertexId> = edges.iter().flat_map(|&f| self.pins[f].iter().copied()).collect();
        let total = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == total
    }

    fn snapshot(&self, e: EdgeId) -> FoldedEdge {
        FoldedEdge {
            id: e,
            pins: self.pins[e].clone(),
            weight: self.weights[e],
        }
    }

    /// Replaces `e` and its independent neighbors by one edge on the union of
    /// the neighbors' pins.
    pub(super) fn fold(&mut self, e: EdgeId, neighbors: &[EdgeId]) -> EdgeId {
        let total: Weight = neighbors.iter().map(|&f| self.weights[f]).sum();
        debug_assert!(total > self.weights[e]);
        let mut pins: Vec<VertexId> = neighbors.iter().flat_map(|&f| self.pins[f].iter().copied()).collect();
        pins.sort_unstable();
        let edge = self.snapshot(e);
        let nbrs: Vec<FoldedEdge> = neighbors.iter().map(|&f| self.snapshot(f)).collect();
        self.offset += edge.weight;
        self.remove_edge(e, EdgeFate::Folded);
        for &f in neighbors {
            self.remove_edge(f, EdgeFate::Folded);
        }
        let product = self.add_edge(pins, total - edge.weight);
        self.fold_log.push(FoldRecord::EdgeFold {
            edge,
            neighbors: nbrs,
            product,
        });
        product
    }

    /// Replaces twins by one edge on the pins of `first`.
    pub(super) fn merge_twins(&mut self, first: EdgeId, second: EdgeId) -> EdgeId {
        let pins = self.pins[first].clone();
        let weight = self.weights[first] + self.weights[second];
        self.remove_edge(first, EdgeFate::Folded);
        self.remove_edge(second, EdgeFate::Folded);
        let merged = self.add_edge(pins, weight);
        self.fold_log.push(FoldRecord::Twin { first, second, merged });
        merged
    }

    /// Compacts the live part into a kernel. Vertex and edge ids keep their
    /// relative order.
    pub(super) fn finish(self, rounds: Vec<RoundStats>, seconds: [f64; 6], fixed_point: bool) -> KernelResult {
        let mut vertex_map = vec![usize::MAX; self.original_vertices];
        let mut kernel_vertices = Vec::new();
        for (v, slot) in vertex_map.iter_mut().enumerate() {
            if self.vertex_alive[v] && self.degree[v] > 0 {
                *slot = kernel_vertices.len();
                kernel_vertices.push(v);
            }
        }
        let mut kernel_to_working = Vec::new();
        let mut working_to_kernel = vec![None; self.pins.len()];
        let mut pins = Vec::new();
        let mut weights = Vec::new();
        for (e, slot) in working_to_kernel.iter_mut().enumerate() {
            if !self.alive[e] {
                continue;
            }
            *slot = Some(kernel_to_working.len());
            kernel_to_working.push(e);
            pins.push(self.pins[e].iter().map(|&v| vertex_map[v]).collect());
            weights.push(self.weights[e]);
        }
        let kernel = Hypergraph::from_parts(kernel_vertices.len(), pins, weights);
        let capacities = CapacityMap::new(kernel_vertices.iter().map(|&v| self.residual[v]).collect())
            .expect("kernel vertices keep positive residual capacity");

        let rules = Rule::ALL
            .into_iter()
            .map(|r| {
                let mut eff = self.effects[r as usize];
                eff.seconds = Some(seconds[r as usize]);
                (r, eff)
            })
            .collect();
        let report = ReductionReport {
            edges_before: self.original_edges,
            vertices_before: self.original_vertices,
            edges_after: kernel.num_edges(),
            vertices_after: kernel.num_vertices(),
            exact_edges: self.exact.len(),
            folds: self.fold_log.len(),
            weight_offset: self.offset,
            fixed_point,
            rules,
            rounds,
        };
        KernelResult {
            kernel,
            capacities,
            exact: self.exact,
            fold_log: self.fold_log,
            weight_offset: self.offset,
            kernel_to_working,
            working_to_kernel,
            kernel_vertices,
            original_edges: self.original_edges,
            fates: self.fates,
            report,
        }
    }
}
