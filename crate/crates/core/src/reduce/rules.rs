use std::collections::{BTreeMap, HashMap};

use crate::hypergraph::{nmax, EdgeId, VertexId, Weight};

use super::{EdgeFate, ReductionConfig, Reducer};

/// Bits of each pin id that enter the subset hash.
const HASH_BITS: u32 = 8;

/// Product of `(v mod 2^k) + 1` over the pins, `None` on overflow. If `a`
/// is a subset of `b` then `pin_hash(a)` divides `pin_hash(b)`.
pub(crate) fn pin_hash(pins: &[VertexId]) -> Option<u128> {
    let mask = (1usize << HASH_BITS) - 1;
    pins.iter()
        .try_fold(1u128, |acc, &v| acc.checked_mul(((v & mask) + 1) as u128))
}

/// Exact subset test on sorted lists.
pub(crate) fn is_subset(small: &[VertexId], large: &[VertexId]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

fn intersects(a: &[VertexId], b: &[VertexId]) -> Option<VertexId> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

impl Reducer {
    /// Removes every vertex whose residual capacity covers its degree. Edges
    /// left without pins can never be blocked and are committed.
    pub fn reduce_abundant_vertices(&mut self) -> usize {
        let mut applied = 0;
        for v in 0..self.vertex_alive.len() {
            if !self.vertex_alive[v] || self.residual[v] < self.degree[v] {
                continue;
            }
            let edges = self.live(v);
            self.vertex_alive[v] = false;
            self.incidence[v].clear();
            self.degree[v] = 0;
            if edges.is_empty() {
                continue;
            }
            applied += 1;
            for &e in &edges {
                self.pins[e].retain(|&u| u != v);
            }
            for e in edges {
                if self.pins[e].is_empty() {
                    self.commit_edge(e);
                }
            }
        }
        applied
    }

    /// Commits an edge that outweighs, summed over its pins, the `b(v)`-th
    /// heaviest other edge at each pin.
    pub fn reduce_neighborhood_removal(&mut self, cfg: &ReductionConfig) -> usize {
        let mut applied = 0;
        let mut scanned = vec![false; self.pins.len()];
        let mut buf: Vec<Weight> = Vec::new();
        for v in 0..self.vertex_alive.len() {
            if !self.vertex_alive[v] || self.degree[v] == 0 {
                continue;
            }
            let budget = self.residual[v];
            let mut checked = 0;
            for e in self.live_by_weight(v) {
                if !self.alive[e] {
                    continue;
                }
                checked += 1;
                if checked > budget {
                    break;
                }
                if std::mem::replace(&mut scanned[e], true) || self.pins[e].len() > cfg.nr_max_edge_size {
                    continue;
                }
                let we = self.weights[e];
                let mut dominated: Weight = 0;
                for i in 0..self.pins[e].len() {
                    let w = self.pins[e][i];
                    buf.clear();
                    let others = self.live(w);
                    buf.extend(others.iter().filter(|&&f| f != e).map(|&f| self.weights[f]));
                    dominated += nmax(&buf, self.residual[w]);
                    if dominated > we {
                        break;
                    }
                }
                if dominated <= we {
                    self.commit_edge(e);
                    applied += 1;
                }
            }
        }
        applied
    }

    /// Commits the heaviest edge of a neighborhood in which every two edges
    /// share a capacity-1 vertex; at most one of them can be matched.
    pub fn reduce_weighted_isolated_edge(&mut self, cfg: &ReductionConfig) -> usize {
        let mut applied = 0;
        let mut scanned = vec![false; self.pins.len()];
        for v in 0..self.vertex_alive.len() {
            if !self.vertex_alive[v] || self.residual[v] != 1 || self.degree[v] == 0 {
                continue;
            }
            let e = self.live_by_weight(v)[0];
            if scanned[e] {
                continue;
            }
            if self.pins[e].len() > cfg.wier_max_edge_size {
                scanned[e] = true;
                continue;
            }
            if self.isolated_edge_check(e, cfg, &mut scanned) {
                let neighbors: Vec<EdgeId> = self.pins[e].clone().into_iter().flat_map(|w| self.live(w)).collect();
                self.commit_edge(e);
                for f in neighbors {
                    if self.alive[f] {
                        self.remove_edge(f, EdgeFate::Excluded);
                    }
                }
                applied += 1;
            } else {
                scanned[e] = true;
            }
        }
        applied
    }

    fn isolated_edge_check(&mut self, e: EdgeId, cfg: &ReductionConfig, scanned: &mut [bool]) -> bool {
        let we = self.weights[e];
        // bit i set: edge is incident to the i-th capacity-1 pin of e
        let mut masks: BTreeMap<EdgeId, u64> = BTreeMap::new();
        let mut wide: Vec<EdgeId> = Vec::new();
        let mut bit = 0;
        for i in 0..self.pins[e].len() {
            let w = self.pins[e][i];
            let at_w = self.live(w);
            if at_w.iter().any(|&f| self.weights[f] > we) {
                return false;
            }
            for &f in &at_w {
                if self.weights[f] < we {
                    scanned[f] = true;
                }
            }
            if self.residual[w] == 1 {
                for &f in &at_w {
                    *masks.entry(f).or_default() |= 1 << bit;
                }
                bit += 1;
            } else {
                wide.extend(at_w);
            }
        }
        if !wide.iter().all(|f| masks.contains_key(f)) {
            return false;
        }
        if masks.len() > cfg.wier_max_clique_size {
            return false;
        }
        let entries: Vec<(EdgeId, u64)> = masks.into_iter().collect();
        for (i, &(f, mf)) in entries.iter().enumerate() {
            for &(g, mg) in &entries[i + 1..] {
                if mf & mg != 0 {
                    continue;
                }
                let common = self.common_unit_vertex(f, g);
                if !common {
                    return false;
                }
            }
        }
        true
    }

    fn common_unit_vertex(&self, f: EdgeId, g: EdgeId) -> bool {
        let (a, b) = (&self.pins[f], &self.pins[g]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if self.residual[a[i]] == 1 {
                        return true;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        false
    }

    /// Removes edges that contain a heavier-or-equal edge sharing a
    /// capacity-1 vertex with them.
    pub fn reduce_weighted_domination(&mut self, cfg: &ReductionConfig) -> usize {
        let mut applied = 0;
        let mut used = vec![false; self.pins.len()];
        for v in 0..self.vertex_alive.len() {
            if !self.vertex_alive[v] || self.residual[v] != 1 || self.degree[v] < 2 {
                continue;
            }
            let order = self.live_by_weight(v);
            for &s in &order {
                if !self.alive[s] || std::mem::replace(&mut used[s], true) {
                    continue;
                }
                let size = self.pins[s].len();
                if size > cfg.wd_max_subedge_size {
                    continue;
                }
                let hs = pin_hash(&self.pins[s]);
                let mut candidates = Vec::new();
                for &f in &order {
                    if f == s || !self.alive[f] || self.weights[f] > self.weights[s] || self.pins[f].len() < size {
                        continue;
                    }
                    if let (Some(hs), Some(hf)) = (hs, pin_hash(&self.pins[f])) {
                        if hf % hs != 0 {
                            continue;
                        }
                    }
                    candidates.push(f);
                    if candidates.len() >= cfg.wd_max_candidates {
                        break;
                    }
                }
                for f in candidates {
                    if is_subset(&self.pins[s], &self.pins[f]) {
                        self.remove_edge(f, EdgeFate::Excluded);
                        applied += 1;
                    }
                }
            }
        }
        applied
    }

    /// Folds a 2-pin edge with its two independent neighbors when it beats
    /// each of them but not both together.
    pub fn reduce_weighted_edge_folding(&mut self, _cfg: &ReductionConfig) -> usize {
        let mut applied = 0;
        let mut scanned = vec![false; self.pins.len()];
        for v in 0..self.vertex_alive.len() {
            if !self.vertex_alive[v] || self.residual[v] != 1 || self.degree[v] != 2 {
                continue;
            }
            for e in self.live(v) {
                // products of this pass wait for the next round
                if e >= scanned.len() || !self.alive[e] || self.pins[e].len() != 2 {
                    continue;
                }
                if std::mem::replace(&mut scanned[e], true) {
                    continue;
                }
                let Some(nbrs) = self.linked_neighbors(e) else {
                    continue;
                };
                if nbrs.len() != 2 || !self.independent(&nbrs) {
                    continue;
                }
                let we = self.weights[e];
                let total: Weight = nbrs.iter().map(|&f| self.weights[f]).sum();
                let heaviest = nbrs.iter().map(|&f| self.weights[f]).max().unwrap_or(0);
                if total > we && heaviest <= we {
                    self.fold(e, &nbrs);
                    applied += 1;
                }
            }
        }
        applied
    }

    /// Merges two non-adjacent edges with the same independent linked
    /// neighborhood, then commits or folds the merged edge.
    pub fn reduce_weighted_twin(&mut self, cfg: &ReductionConfig) -> usize {
        let mut groups: Vec<(Vec<EdgeId>, Vec<EdgeId>)> = Vec::new();
        let mut index: HashMap<Vec<EdgeId>, usize> = HashMap::new();
        for e in 0..self.pins.len() {
            if !self.alive[e] || self.pins[e].len() > cfg.wt_max_edge_size {
                continue;
            }
            if let Some(nbrs) = self.linked_neighbors(e) {
                let slot = *index.entry(nbrs.clone()).or_insert_with(|| {
                    groups.push((nbrs, Vec::new()));
                    groups.len() - 1
                });
                groups[slot].1.push(e);
            }
        }
        let mut applied = 0;
        for (nbrs, members) in groups {
            if members.len() < 2 {
                continue;
            }
            'pairs: for (i, &first) in members.iter().enumerate() {
                for &second in &members[i + 1..] {
                    if self.try_twin(first, second, &nbrs) {
                        applied += 1;
                        break 'pairs;
                    }
                }
            }
        }
        applied
    }

    fn try_twin(&mut self, first: EdgeId, second: EdgeId, nbrs: &[EdgeId]) -> bool {
        if !self.alive[first] || !self.alive[second] || nbrs.is_empty() {
            return false;
        }
        if intersects(&self.pins[first], &self.pins[second]).is_some() {
            return false;
        }
        if self.linked_neighbors(first).as_deref() != Some(nbrs) || self.linked_neighbors(second).as_deref() != Some(nbrs)
        {
            return false;
        }
        if !self.independent(nbrs) {
            return false;
        }
        let merged_weight = self.weights[first] + self.weights[second];
        let total: Weight = nbrs.iter().map(|&f| self.weights[f]).sum();
        let lightest = nbrs.iter().map(|&f| self.weights[f]).min().unwrap_or(0);
        if merged_weight >= total {
            let merged = self.merge_twins(first, second);
            self.commit_edge(merged);
            true
        } else if merged_weight > total - lightest {
            let merged = self.merge_twins(first, second);
            self.fold(merged, nbrs);
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subset_basics() {
        assert!(is_subset(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[0, 1, 2, 3]));
        assert!(is_subset(&[], &[0]));
    }

    #[test]
    fn hash_overflow_falls_back() {
        let pins: Vec<VertexId> = (0..40).map(|i| i * 256 + 255).collect();
        assert_eq!(pin_hash(&pins), None);
        assert_eq!(pin_hash(&[0, 1, 2]), Some(6));
    }

    proptest! {
        #[test]
        fn hash_screen_never_rejects_a_subset(
            mut large in proptest::collection::btree_set(0usize..2000, 1..14),
            pick in proptest::collection::vec(any::<bool>(), 14),
        ) {
            let large: Vec<VertexId> = std::mem::take(&mut large).into_iter().collect();
            let small: Vec<VertexId> = large.iter().zip(&pick).filter(|(_, &p)| p).map(|(&v, _)| v).collect();
            prop_assert!(is_subset(&small, &large));
            if let (Some(hs), Some(hl)) = (pin_hash(&small), pin_hash(&large)) {
                prop_assert_eq!(hl % hs, 0);
            }
        }
    }
}
