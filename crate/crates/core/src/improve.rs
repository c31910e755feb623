//! Local search: (1,2)-swaps, perturbation and iterated local search.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::PriorityOrder;
use crate::hypergraph::{seeded_rng, CapacityMap, EdgeId, Hypergraph, Matching, SeededRng, VertexId, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct IlsConfig {
    /// Consecutive iterations without a new best before stopping.
    pub k: usize,
    pub seed: u64,
    /// Success probability of the geometric draw for the number of forced edges.
    pub perturb_p: f64,
    /// Candidates kept per matched edge in a swap scan.
    pub max_candidates: usize,
}

impl Default for IlsConfig {
    fn default() -> Self {
        IlsConfig {
            k: 15,
            seed: 0,
            perturb_p: 0.5,
            max_candidates: 64,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IlsConfigError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("perturbation probability {0} outside (0, 1)")]
    Probability(f64),
    #[error("max_candidates must be at least 2")]
    Candidates,
}

impl IlsConfig {
    pub fn validate(&self) -> Result<(), IlsConfigError> {
        if self.k < 1 {
            return Err(IlsConfigError::ZeroK);
        }
        if !(self.perturb_p > 0.0 && self.perturb_p < 1.0) {
            return Err(IlsConfigError::Probability(self.perturb_p));
        }
        if self.max_candidates < 2 {
            return Err(IlsConfigError::Candidates);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub iterations: usize,
    pub swaps: usize,
    pub accepted_worse: usize,
    pub best_weight: Vec<Weight>,
}

/// Pins of `x` that would be saturated after adding `x` to a matching with
/// usage `usage_without_c`.
fn saturated_after_adding(h: &Hypergraph, b: &CapacityMap, x: EdgeId, usage_without_c: impl Fn(VertexId) -> usize) -> Vec<VertexId> {
    h.pins(x)
        .iter()
        .copied()
        .filter(|&v| usage_without_c(v) + 1 >= b.get(v))
        .collect()
}

fn disjoint(a: &[VertexId], b: &[VertexId]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Non-members around `c` whose blocked pins all lie in `blocked(c)`,
/// heaviest first.
fn swap_candidates(h: &Hypergraph, b: &CapacityMap, m: &Matching, c: EdgeId, cap: usize) -> Vec<EdgeId> {
    let saturated = |v: VertexId| m.usage(v) >= b.get(v);
    let c_pins = h.pins(c);
    let mut l: Vec<EdgeId> = c_pins
        .iter()
        .flat_map(|&p| h.incident(p).iter().copied())
        .filter(|&e| !m.contains(e))
        .collect();
    l.sort_unstable();
    l.dedup();
    l.retain(|&e| {
        h.pins(e)
            .iter()
            .filter(|&&v| saturated(v))
            .all(|v| c_pins.binary_search(v).is_ok())
    });
    l.sort_by(|&x, &y| h.weight(y).cmp(&h.weight(x)).then(x.cmp(&y)));
    l.truncate(cap);
    l
}

/// One pass of (1,2)-swaps over the current members. Each swap replaces a
/// matched edge by two edges of larger total weight and re-maximizes.
/// Returns the number of swaps made.
pub fn one_two_swap(
    h: &Hypergraph,
    b: &CapacityMap,
    m: &mut Matching,
    order: &PriorityOrder,
    max_candidates: usize,
) -> usize {
    let mut swaps = 0;
    for c in m.sorted_edges() {
        if !m.contains(c) {
            continue;
        }
        let l = swap_candidates(h, b, m, c, max_candidates);
        if l.len() < 2 {
            continue;
        }
        let c_pins = h.pins(c);
        let usage_without_c = |v: VertexId| m.usage(v) - usize::from(c_pins.binary_search(&v).is_ok());
        let phi: Vec<Vec<VertexId>> = l
            .iter()
            .map(|&x| saturated_after_adding(h, b, x, usage_without_c))
            .collect();
        let wc = h.weight(c);
        let pair = (0..l.len()).find_map(|i| {
            (i + 1..l.len())
                .find(|&j| h.weight(l[i]) + h.weight(l[j]) > wc && disjoint(&phi[i], &phi[j]))
                .map(|j| (l[i], l[j]))
        });
        let Some((x, y)) = pair else {
            continue;
        };
        let before = m.weight();
        m.remove(h, c);
        m.insert(h, b, x).expect("swap candidate is free once c is removed");
        m.insert(h, b, y).expect("disjoint saturation sets admit both candidates");
        order.maximize(h, b, m).expect("matching fits");
        debug_assert!(m.weight() > before);
        swaps += 1;
    }
    swaps
}

/// Repeats [`one_two_swap`] until a pass makes no swap.
pub fn exhaustive_one_two_swap(
    h: &Hypergraph,
    b: &CapacityMap,
    m: &mut Matching,
    order: &PriorityOrder,
    max_candidates: usize,
) -> usize {
    let mut total = 0;
    loop {
        let swaps = one_two_swap(h, b, m, order, max_candidates);
        if swaps == 0 {
            return total;
        }
        total += swaps;
    }
}

/// Forces `1 + Geometric(p)` random unmatched edges into `m`, evicting the
/// lightest matched edge at each saturated pin, then re-maximizes.
pub fn perturb(
    h: &Hypergraph,
    b: &CapacityMap,
    m: &mut Matching,
    order: &PriorityOrder,
    rng: &mut SeededRng,
    p: f64,
) {
    let unmatched: Vec<EdgeId> = (0..h.num_edges()).filter(|&e| !m.contains(e)).collect();
    if unmatched.is_empty() {
        return;
    }
    let extra = Geometric::new(p).expect("probability validated").sample(rng);
    let count = usize::try_from(extra).unwrap_or(usize::MAX).saturating_add(1).min(unmatched.len());
    let forced: Vec<EdgeId> = unmatched.choose_multiple(rng, count).copied().collect();
    for g in forced {
        for &v in h.pins(g) {
            while m.usage(v) >= b.get(v) {
                let lightest = h
                    .incident(v)
                    .iter()
                    .copied()
                    .filter(|&f| m.contains(f))
                    .min_by(|&x, &y| h.weight(x).cmp(&h.weight(y)).then(x.cmp(&y)))
                    .expect("saturated vertex has a matched edge");
                m.remove(h, lightest);
            }
        }
        m.insert(h, b, g).expect("forced edge was made free");
    }
    order.maximize(h, b, m).expect("matching fits");
}

/// Chance of accepting a non-improving solution:
/// `1 / ((ω(best) − ω(candidate)) (ω(current) − ω(candidate)))`, each
/// factor clamped to at least 1.
pub fn acceptance_probability(best: Weight, current: Weight, candidate: Weight) -> f64 {
    let f1 = (best as i128 - candidate as i128).max(1);
    let f2 = (current as i128 - candidate as i128).max(1);
    1.0 / (f1 as f64 * f2 as f64)
}

/// Iterated local search from `initial`. Stops after `cfg.k` consecutive
/// iterations without a new best and returns the best matching seen.
pub fn ils(
    h: &Hypergraph,
    b: &CapacityMap,
    initial: &Matching,
    order: &PriorityOrder,
    cfg: &IlsConfig,
) -> (Matching, SearchTrace) {
    let mut rng = seeded_rng(cfg.seed);
    let mut current = initial.clone();
    let mut best = initial.clone();
    let mut trace = SearchTrace::default();
    let mut stale = 0;
    while stale < cfg.k {
        let mut candidate = current.clone();
        perturb(h, b, &mut candidate, order, &mut rng, cfg.perturb_p);
        trace.swaps += exhaustive_one_two_swap(h, b, &mut candidate, order, cfg.max_candidates);
        trace.iterations += 1;

        let (wc, wm, wb) = (candidate.weight(), current.weight(), best.weight());
        if wc >= wm {
            current = candidate;
        } else if rng.random::<f64>() < acceptance_probability(wb, wm, wc) {
            current = candidate;
            trace.accepted_worse += 1;
        }
        if current.weight() > best.weight() {
            best = current.clone();
            stale = 0;
        } else {
            stale += 1;
        }
        trace.best_weight.push(best.weight());
    }
    (best, trace)
}
