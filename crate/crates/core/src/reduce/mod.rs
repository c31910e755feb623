//! Exact data reductions for weighted hypergraph b-matching.
//!
//! [`run_reductions`] applies the enabled rules in rounds until nothing
//! fires, then compacts what is left into a kernel. A solution of the kernel
//! is turned back into a solution of the input with [`unfold`]; its weight
//! is the kernel weight plus [`KernelResult::weight_offset`].

mod rules;
mod state;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{CapacityMap, EdgeId, Hypergraph, Matching, VertexId, Weight};

pub use state::Reducer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "av")]
    AbundantVertices,
    #[serde(rename = "nr")]
    NeighborhoodRemoval,
    #[serde(rename = "wier")]
    IsolatedEdge,
    #[serde(rename = "wd")]
    Domination,
    #[serde(rename = "wef")]
    EdgeFolding,
    #[serde(rename = "wt")]
    Twin,
}

impl Rule {
    /// Round order.
    pub const ALL: [Rule; 6] = [
        Rule::AbundantVertices,
        Rule::NeighborhoodRemoval,
        Rule::IsolatedEdge,
        Rule::Domination,
        Rule::EdgeFolding,
        Rule::Twin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::AbundantVertices => "av",
            Rule::NeighborhoodRemoval => "nr",
            Rule::IsolatedEdge => "wier",
            Rule::Domination => "wd",
            Rule::EdgeFolding => "wef",
            Rule::Twin => "wt",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConfigError::UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleSet(u8);

impl RuleSet {
    pub fn all() -> Self {
        RuleSet(Rule::ALL.iter().fold(0, |acc, r| acc | r.bit()))
    }

    pub fn none() -> Self {
        RuleSet(0)
    }

    pub fn only(rule: Rule) -> Self {
        RuleSet(rule.bit())
    }

    pub fn with(self, rule: Rule) -> Self {
        RuleSet(self.0 | rule.bit())
    }

    pub fn without(self, rule: Rule) -> Self {
        RuleSet(self.0 & !rule.bit())
    }

    pub fn contains(self, rule: Rule) -> bool {
        self.0 & rule.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::all()
    }
}

/// Accepts `all`, `none`, or a comma separated list such as `av,nr,wd`.
impl FromStr for RuleSet {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "all" => Ok(RuleSet::all()),
            "none" | "" => Ok(RuleSet::none()),
            list => list
                .split(',')
                .try_fold(RuleSet::none(), |set, tok| Ok(set.with(tok.parse()?))),
        }
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == RuleSet::all() {
            return f.write_str("all");
        }
        if self.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<&str> = self.iter().map(Rule::name).collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown reduction rule '{0}' (expected av, nr, wier, wd, wef or wt)")]
    UnknownRule(String),
    #[error("{0} must be at least 1")]
    ZeroLimit(&'static str),
    #[error("wier_max_edge_size is {0}, at most 64 pins fit the neighbor masks")]
    MaskTooWide(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionConfig {
    pub nr_max_edge_size: usize,
    pub wier_max_edge_size: usize,
    pub wier_max_clique_size: usize,
    pub wd_max_subedge_size: usize,
    pub wd_max_candidates: usize,
    pub wt_max_edge_size: usize,
    pub max_rounds: usize,
    pub enabled: RuleSet,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            nr_max_edge_size: 10,
            wier_max_edge_size: 8,
            wier_max_clique_size: 80,
            wd_max_subedge_size: 6,
            wd_max_candidates: 6,
            wt_max_edge_size: 4,
            max_rounds: 10,
            enabled: RuleSet::all(),
        }
    }
}

impl ReductionConfig {
    pub fn with_rules(enabled: RuleSet) -> Self {
        ReductionConfig {
            enabled,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let limits = [
            ("nr_max_edge_size", self.nr_max_edge_size),
            ("wier_max_edge_size", self.wier_max_edge_size),
            ("wier_max_clique_size", self.wier_max_clique_size),
            ("wd_max_subedge_size", self.wd_max_subedge_size),
            ("wd_max_candidates", self.wd_max_candidates),
            ("wt_max_edge_size", self.wt_max_edge_size),
            ("max_rounds", self.max_rounds),
        ];
        if let Some((name, _)) = limits.iter().find(|(_, v)| *v < 1) {
            return Err(ConfigError::ZeroLimit(name));
        }
        if self.wier_max_edge_size > 64 {
            return Err(ConfigError::MaskTooWide(self.wier_max_edge_size));
        }
        Ok(())
    }
}

/// Snapshot of a working edge taken when it was folded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldedEdge {
    pub id: EdgeId,
    pub pins: Vec<VertexId>,
    pub weight: Weight,
}

/// Ids are working ids: `0..m` are the input edges, larger ids are edges
/// created by folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FoldRecord {
    /// `edge` and its independent neighbors were replaced by `product`,
    /// weighing `ω(neighbors) − ω(edge)`.
    EdgeFold {
        edge: FoldedEdge,
        neighbors: Vec<FoldedEdge>,
        product: EdgeId,
    },
    /// Twins `first` and `second` were replaced by `merged` on the pins of
    /// `first`, weighing the sum of both.
    Twin {
        first: EdgeId,
        second: EdgeId,
        merged: EdgeId,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeFate {
    Kernel,
    Included,
    Excluded,
    Folded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleEffect {
    pub applications: usize,
    pub included: usize,
    pub excluded: usize,
    pub folded: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    pub applied: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub edges_before: usize,
    pub vertices_before: usize,
    pub edges_after: usize,
    pub vertices_after: usize,
    pub exact_edges: usize,
    pub folds: usize,
    pub weight_offset: Weight,
    pub fixed_point: bool,
    pub rules: Vec<(Rule, RuleEffect)>,
    pub rounds: Vec<RoundStats>,
}

impl ReductionReport {
    pub fn strip_timings(&mut self) {
        for (_, eff) in &mut self.rules {
            eff.seconds = None;
        }
        for r in &mut self.rounds {
            r.seconds = None;
        }
    }

    pub fn effect(&self, rule: Rule) -> RuleEffect {
        self.rules
            .iter()
            .find(|(r, _)| *r == rule)
            .map(|(_, e)| *e)
            .unwrap_or_default()
    }

    pub fn total_applications(&self) -> usize {
        self.rules.iter().map(|(_, e)| e.applications).sum()
    }
}

#[derive(Debug, Clone)]
pub struct KernelResult {
    pub kernel: Hypergraph,
    /// Residual capacities of the kernel vertices.
    pub capacities: CapacityMap,
    /// Working ids decided into the solution.
    pub exact: Vec<EdgeId>,
    pub fold_log: Vec<FoldRecord>,
    /// Weight of `exact` plus the folded-edge weight of every edge fold.
    pub weight_offset: Weight,
    pub kernel_to_working: Vec<EdgeId>,
    pub working_to_kernel: Vec<Option<EdgeId>>,
    /// Original vertex id of each kernel vertex.
    pub kernel_vertices: Vec<VertexId>,
    pub original_edges: usize,
    /// Fate of every working edge.
    pub fates: Vec<EdgeFate>,
    pub report: ReductionReport,
}

impl KernelResult {
    pub fn is_identity(&self) -> bool {
        self.exact.is_empty()
            && self.fold_log.is_empty()
            && self.kernel.num_edges() == self.original_edges
            && self.kernel_to_working.iter().enumerate().all(|(k, &w)| k == w)
    }
}

/// Runs the enabled rules in the order AV, NR, WIER, WD, WEF, WT until a
/// round applies nothing or `max_rounds` rounds have run.
pub fn run_reductions(h: &Hypergraph, b: &CapacityMap, cfg: &ReductionConfig) -> Result<KernelResult, ConfigError> {
    cfg.validate()?;
    assert_eq!(b.len(), h.num_vertices(), "capacity map does not match hypergraph");
    let mut r = Reducer::new(h, b);
    let mut rounds = Vec::new();
    let mut seconds = [0.0f64; 6];
    let mut fixed_point = false;
    for _ in 0..cfg.max_rounds {
        let start = Instant::now();
        let mut applied = 0;
        for rule in cfg.enabled.iter() {
            let t = Instant::now();
            applied += r.apply(rule, cfg);
            seconds[rule as usize] += t.elapsed().as_secs_f64();
        }
        rounds.push(RoundStats {
            applied,
            seconds: Some(start.elapsed().as_secs_f64()),
        });
        if applied == 0 {
            fixed_point = true;
            break;
        }
    }
    Ok(r.finish(rounds, seconds, fixed_point))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnfoldError {
    #[error("kernel matching does not belong to the kernel")]
    ForeignMatching,
    #[error("working edge {0} survived unfolding")]
    Unresolved(EdgeId),
    #[error("unfolded matching is infeasible: {0}")]
    Infeasible(String),
    #[error("unfolded weight {found}, expected {expected}")]
    WeightMismatch { expected: Weight, found: Weight },
}

/// Maps a kernel matching back to the input hypergraph by replaying the
/// fold log in reverse and adding the exact edges.
pub fn unfold(
    h: &Hypergraph,
    b: &CapacityMap,
    kr: &KernelResult,
    kernel_matching: &Matching,
) -> Result<Matching, UnfoldError> {
    if !kernel_matching.fits(&kr.kernel) {
        return Err(UnfoldError::ForeignMatching);
    }
    let mut chosen = vec![false; kr.fates.len()];
    for &k in kernel_matching.edges() {
        chosen[kr.kernel_to_working[k]] = true;
    }
    for &e in &kr.exact {
        chosen[e] = true;
    }
    for rec in kr.fold_log.iter().rev() {
        match rec {
            FoldRecord::EdgeFold {
                edge,
                neighbors,
                product,
            } => {
                if std::mem::take(&mut chosen[*product]) {
                    for n in neighbors {
                        chosen[n.id] = true;
                    }
                } else {
                    chosen[edge.id] = true;
                }
            }
            FoldRecord::Twin {
                first,
                second,
                merged,
            } => {
                if std::mem::take(&mut chosen[*merged]) {
                    chosen[*first] = true;
                    chosen[*second] = true;
                }
            }
        }
    }
    if let Some(e) = (kr.original_edges..chosen.len()).find(|&e| chosen[e]) {
        return Err(UnfoldError::Unresolved(e));
    }
    let edges = (0..kr.original_edges).filter(|&e| chosen[e]);
    let m = Matching::from_edges(h, b, edges).map_err(|e| UnfoldError::Infeasible(e.to_string()))?;
    let expected = kernel_matching.weight() + kr.weight_offset;
    if m.weight() != expected {
        return Err(UnfoldError::WeightMismatch {
            expected,
            found: m.weight(),
        });
    }
    Ok(m)
}
