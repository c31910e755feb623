//! Ground truth: an LP-file exporter for the 0/1 program and a small
//! branch-and-bound solver for desk-sized instances.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::hypergraph::{CapacityMap, EdgeId, Hypergraph, Matching, Weight};

/// Objective and constraint rows are wrapped after this many terms.
const TERMS_PER_LINE: usize = 10;

/// CPLEX LP text for `max Σ ω(e) x_e  s.t.  Σ_{e ∋ v} x_e <= b(v),  x binary`.
/// One row per vertex of nonzero degree; variables are `x<edge id>`.
pub fn export_lp(h: &Hypergraph, b: &CapacityMap) -> String {
    let mut out = String::from("Maximize\n obj:");
    if h.num_edges() == 0 {
        out.push_str(" 0");
    }
    for (e, (_, w)) in h.edges().enumerate() {
        if e > 0 {
            out.push_str(" +");
            if e % TERMS_PER_LINE == 0 {
                out.push_str("\n  ");
            }
        }
        let _ = write!(out, " {w} x{e}");
    }
    out.push_str("\nSubject To\n");
    for v in 0..h.num_vertices() {
        if h.degree(v) == 0 {
            continue;
        }
        let _ = write!(out, " v{v}:");
        for (i, &e) in h.incident(v).iter().enumerate() {
            if i > 0 {
                out.push_str(" +");
                if i % TERMS_PER_LINE == 0 {
                    out.push_str("\n  ");
                }
            }
            let _ = write!(out, " x{e}");
        }
        let _ = writeln!(out, " <= {}", b.get(v));
    }
    if h.num_edges() > 0 {
        out.push_str("Binary\n");
        for e in 0..h.num_edges() {
            let _ = writeln!(out, " x{e}");
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_edges: usize,
    pub max_nodes: u64,
    pub time_budget: Option<Duration>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_edges: 24,
            max_nodes: 10_000_000,
            time_budget: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large: {edges} edges, limit {limit}")]
    TooManyEdges { edges: usize, limit: usize },
    #[error("instance too large: node limit {0} reached")]
    NodeLimit(u64),
    #[error("instance too large: time budget exhausted")]
    TimeLimit,
    #[error("capacity map does not match hypergraph")]
    Shape,
}

struct Search<'a> {
    h: &'a Hypergraph,
    order: Vec<EdgeId>,
    /// `suffix[i]`: total weight of `order[i..]`.
    suffix: Vec<Weight>,
    residual: Vec<usize>,
    current: Vec<EdgeId>,
    current_weight: Weight,
    best: Vec<EdgeId>,
    best_weight: Weight,
    nodes: u64,
    limits: OracleLimits,
    start: Instant,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(OracleError::NodeLimit(self.limits.max_nodes));
        }
        if self.nodes.is_multiple_of(4096) {
            if let Some(budget) = self.limits.time_budget {
                if self.start.elapsed() > budget {
                    return Err(OracleError::TimeLimit);
                }
            }
        }
        if self.current_weight > self.best_weight {
            self.best_weight = self.current_weight;
            self.best.clone_from(&self.current);
        }
        if i == self.order.len() || self.current_weight + self.suffix[i] <= self.best_weight {
            return Ok(());
        }
        let e = self.order[i];
        let pins = self.h.pins(e);
        if pins.iter().all(|&v| self.residual[v] > 0) {
            for &v in pins {
                self.residual[v] -= 1;
            }
            self.current.push(e);
            self.current_weight += self.h.weight(e);
            let r = self.dfs(i + 1);
            self.current_weight -= self.h.weight(e);
            self.current.pop();
            for &v in pins {
                self.residual[v] += 1;
            }
            r?;
        }
        self.dfs(i + 1)
    }
}

/// Maximum-weight b-matching by depth-first include/exclude over edges in
/// descending weight, pruned by the remaining total weight. Only the
/// optimal weight is canonical; the witness may be any optimum.
pub fn brute_force_opt(h: &Hypergraph, b: &CapacityMap, limits: OracleLimits) -> Result<Matching, OracleError> {
    if b.len() != h.num_vertices() {
        return Err(OracleError::Shape);
    }
    if h.num_edges() > limits.max_edges {
        return Err(OracleError::TooManyEdges {
            edges: h.num_edges(),
            limit: limits.max_edges,
        });
    }
    let mut order: Vec<EdgeId> = (0..h.num_edges()).collect();
    order.sort_by(|&a, &c| h.weight(c).cmp(&h.weight(a)).then(a.cmp(&c)));
    let mut suffix = vec![0; order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix[i] = suffix[i + 1] + h.weight(order[i]);
    }
    let mut search = Search {
        h,
        order,
        suffix,
        residual: b.as_slice().to_vec(),
        current: Vec::new(),
        current_weight: 0,
        best: Vec::new(),
        best_weight: 0,
        nodes: 0,
        limits,
        start: Instant::now(),
    };
    search.dfs(0)?;
    let m = Matching::from_edges(h, b, search.best.iter().copied()).expect("search keeps capacities");
    debug_assert_eq!(m.weight(), search.best_weight);
    Ok(m)
}

/// Optimal weight with default limits.
pub fn oracle_weight(h: &Hypergraph, b: &CapacityMap) -> Result<Weight, OracleError> {
    brute_force_opt(h, b, OracleLimits::default()).map(|m| m.weight())
}
