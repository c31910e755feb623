#![allow(dead_code)]

use hypermatch::hypergraph::{make_capacity, random_hypergraph, CapacitySpec};
use hypermatch::{CapacityMap, Hypergraph, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    One,
    Three,
    Random,
}

pub const REGIMES: [Regime; 3] = [Regime::One, Regime::Three, Regime::Random];

pub fn capacities(h: &Hypergraph, regime: Regime, seed: u64) -> CapacityMap {
    let spec = match regime {
        Regime::One => CapacitySpec::Const(1),
        Regime::Three => CapacitySpec::Const(3),
        Regime::Random => CapacitySpec::Random,
    };
    make_capacity(spec, h, seed).unwrap()
}

pub fn instance(n: usize, m: usize, max_pins: usize, seed: u64, regime: Regime) -> (Hypergraph, CapacityMap) {
    let h = random_hypergraph(n, m, max_pins, 1, 100, seed).unwrap();
    let b = capacities(&h, regime, seed ^ 0x5eed);
    (h, b)
}

/// Best weight over all 2^m edge subsets.
pub fn enumerate_opt(h: &Hypergraph, b: &CapacityMap) -> Weight {
    let m = h.num_edges();
    assert!(m <= 20, "enumeration is exponential");
    let mut best = 0;
    let mut usage = vec![0usize; h.num_vertices()];
    for mask in 0u32..(1 << m) {
        usage.iter_mut().for_each(|u| *u = 0);
        let mut weight = 0;
        let mut ok = true;
        for e in (0..m).filter(|e| mask >> e & 1 == 1) {
            weight += h.weight(e);
            for &v in h.pins(e) {
                usage[v] += 1;
                ok &= usage[v] <= b.get(v);
            }
        }
        if ok {
            best = best.max(weight);
        }
    }
    best
}
