//! Greedy construction: score every edge once, sort, admit free edges.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ModelError;
use crate::hypergraph::{CapacityMap, EdgeId, Hypergraph, Matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityFunction {
    /// `ω(e)`
    Weight,
    /// `ω(e) ∏ b(v)`
    Cap,
    /// `ω(e) / |pins(e)|`
    Pin,
    /// `ω(e) / |pins(e)| ∏ b(v)`
    PinCap,
    /// `ω(e) ∏ b(v) / deg(v)`
    Scaled,
}

impl PriorityFunction {
    pub const ALL: [PriorityFunction; 5] = [
        PriorityFunction::Weight,
        PriorityFunction::Cap,
        PriorityFunction::Pin,
        PriorityFunction::PinCap,
        PriorityFunction::Scaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PriorityFunction::Weight => "weight",
            PriorityFunction::Cap => "cap",
            PriorityFunction::Pin => "pin",
            PriorityFunction::PinCap => "pincap",
            PriorityFunction::Scaled => "scaled",
        }
    }
}

impl fmt::Display for PriorityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown priority function '{0}' (expected weight, cap, pin, pincap or scaled)")]
pub struct UnknownPriority(pub String);

impl FromStr for PriorityFunction {
    type Err = UnknownPriority;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let s = if s == "pin_cap" || s == "pin,cap" { "pincap".to_string() } else { s };
        PriorityFunction::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or(UnknownPriority(s))
    }
}

/// Natural log of an edge's priority plus the edge id for tie-breaking.
/// Orders higher score first, then lower id.
#[derive(Debug, Clone, Copy)]
pub struct PriorityScore {
    pub log: f64,
    pub edge: EdgeId,
}

impl PriorityScore {
    pub fn value(&self) -> f64 {
        self.log.exp()
    }
}

impl PartialEq for PriorityScore {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PriorityScore {}

impl PartialOrd for PriorityScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PriorityScore {
    fn cmp(&self, other: &Self) -> Ordering {
        other.log.total_cmp(&self.log).then(self.edge.cmp(&other.edge))
    }
}

/// Products are summed in log space; `∏ b(v)` overflows any integer type on
/// high-degree instances.
pub fn priority(func: PriorityFunction, h: &Hypergraph, b: &CapacityMap, e: EdgeId) -> PriorityScore {
    let pins = h.pins(e);
    let weight = (h.weight(e) as f64).ln();
    let cap = || pins.iter().map(|&v| (b.get(v) as f64).ln()).sum::<f64>();
    let size = (pins.len() as f64).ln();
    let log = match func {
        PriorityFunction::Weight => weight,
        PriorityFunction::Cap => weight + cap(),
        PriorityFunction::Pin => weight - size,
        PriorityFunction::PinCap => weight - size + cap(),
        PriorityFunction::Scaled => {
            weight
                + pins
                    .iter()
                    .map(|&v| (b.get(v) as f64).ln() - (h.degree(v) as f64).ln())
                    .sum::<f64>()
        }
    };
    PriorityScore { log, edge: e }
}

/// Static edge order for one priority function, computed once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityOrder {
    func: PriorityFunction,
    order: Vec<EdgeId>,
}

impl PriorityOrder {
    pub fn new(func: PriorityFunction, h: &Hypergraph, b: &CapacityMap) -> Self {
        let mut scores: Vec<PriorityScore> = (0..h.num_edges()).map(|e| priority(func, h, b, e)).collect();
        scores.sort_unstable();
        PriorityOrder {
            func,
            order: scores.into_iter().map(|s| s.edge).collect(),
        }
    }

    pub fn function(&self) -> PriorityFunction {
        self.func
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.order
    }

    /// Admits every free non-member edge in priority order.
    pub fn maximize(&self, h: &Hypergraph, b: &CapacityMap, m: &mut Matching) -> Result<(), ModelError> {
        if !m.fits(h) || self.order.len() != h.num_edges() {
            return Err(ModelError::ShapeMismatch);
        }
        for &e in &self.order {
            if !m.contains(e) && m.is_free(h, b, e) {
                m.insert_unchecked(h, e);
            }
        }
        Ok(())
    }

    pub fn greedy(&self, h: &Hypergraph, b: &CapacityMap) -> Matching {
        let mut m = Matching::new(h);
        self.maximize(h, b, &mut m).expect("fresh matching fits");
        m
    }
}

pub fn greedy(h: &Hypergraph, b: &CapacityMap, func: PriorityFunction) -> Matching {
    PriorityOrder::new(func, h, b).greedy(h, b)
}

/// Fills `m` up to maximality in the static order of `func`.
pub fn maximize(h: &Hypergraph, b: &CapacityMap, m: &Matching, func: PriorityFunction) -> Result<Matching, ModelError> {
    let mut out = m.clone();
    PriorityOrder::new(func, h, b).maximize(h, b, &mut out)?;
    Ok(out)
}

/// No free edge remains outside `m`.
pub fn is_maximal(h: &Hypergraph, b: &CapacityMap, m: &Matching) -> bool {
    (0..h.num_edges()).all(|e| m.contains(e) || !m.is_free(h, b, e))
}
