mod common;

use common::{enumerate_opt, instance, Regime, REGIMES};
use hypermatch::construct::priority;
use hypermatch::exact::brute_force_opt;
use hypermatch::improve::{exhaustive_one_two_swap, one_two_swap, perturb};
use hypermatch::io::{parse_hmetis, write_hmetis};
use hypermatch::reduce::{EdgeFate, Reducer};
use hypermatch::{
    blocked, greedy, ils, is_maximal, nmax, oracle_weight, run_reductions, unfold, validate_matching, CapacityMap,
    Hypergraph, IlsConfig, Matching, OracleLimits, PriorityFunction, PriorityOrder, ReductionConfig, Rule, RuleSet,
};
use proptest::prelude::*;

fn regime() -> impl Strategy<Value = Regime> {
    prop_oneof![Just(Regime::One), Just(Regime::Three), Just(Regime::Random)]
}

/// (n, m, max_pins, seed, regime)
fn small() -> impl Strategy<Value = (usize, usize, usize, u64, Regime)> {
    (1usize..=10, 0usize..=14, 1usize..=4, any::<u64>(), regime())
}

fn medium() -> impl Strategy<Value = (usize, usize, usize, u64, Regime)> {
    (5usize..=60, 0usize..=120, 1usize..=6, any::<u64>(), regime())
}

fn rule_set() -> impl Strategy<Value = RuleSet> {
    any::<u8>().prop_map(|bits| {
        Rule::ALL
            .into_iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(RuleSet::none(), |s, (_, r)| s.with(r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn incidence_matches_edges((n, m, p, seed, _) in medium()) {
        let (h, _) = instance(n, m, p, seed, Regime::One);
        let mut rebuilt = vec![Vec::new(); n];
        for e in 0..h.num_edges() {
            for &v in h.pins(e) {
                rebuilt[v].push(e);
            }
        }
        for (v, list) in rebuilt.iter().enumerate() {
            prop_assert_eq!(h.incident(v), list.as_slice());
        }
    }

    #[test]
    fn hmetis_roundtrip((n, m, p, seed, _) in medium()) {
        let (h, _) = instance(n, m, p, seed, Regime::One);
        let back = parse_hmetis(&write_hmetis(&h)).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn nmax_matches_sorting(values in proptest::collection::vec(0u64..50, 0..20), k in 1usize..25) {
        let mut sorted = values.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let expected = sorted.get(k - 1).copied().unwrap_or(0);
        prop_assert_eq!(nmax(&values, k), expected);
    }

    #[test]
    fn blocked_within_pins((n, m, p, seed, reg) in medium()) {
        let (h, b) = instance(n, m, p, seed, reg);
        let empty = Matching::new(&h);
        let g = greedy(&h, &b, PriorityFunction::Weight);
        for e in 0..h.num_edges() {
            prop_assert!(blocked(&h, &b, e, &empty).is_empty());
            let bl = blocked(&h, &b, e, &g);
            prop_assert!(bl.iter().all(|v| h.pins(e).contains(v)));
        }
    }

    #[test]
    fn validation_tracks_incremental_updates(
        (n, m, p, seed, reg) in medium(),
        ops in proptest::collection::vec((any::<bool>(), any::<prop::sample::Index>()), 0..60),
    ) {
        let (h, b) = instance(n, m, p, seed, reg);
        prop_assume!(h.num_edges() > 0);
        let mut mm = Matching::new(&h);
        for (add, idx) in ops {
            let e = idx.index(h.num_edges());
            if add {
                let _ = mm.insert(&h, &b, e);
            } else {
                mm.remove(&h, e);
            }
            let check = validate_matching(&h, &b, mm.edges());
            prop_assert!(check.feasible);
            prop_assert_eq!(check.weight, mm.weight());
            for v in 0..n {
                let count = mm.edges().iter().filter(|&&f| h.pins(f).contains(&v)).count();
                prop_assert_eq!(count, mm.usage(v));
            }
        }
    }

    #[test]
    fn greedy_feasible_and_maximal((n, m, p, seed, reg) in medium()) {
        let (h, b) = instance(n, m, p, seed, reg);
        for f in PriorityFunction::ALL {
            let g = greedy(&h, &b, f);
            prop_assert!(validate_matching(&h, &b, g.edges()).feasible);
            prop_assert!(is_maximal(&h, &b, &g));
            prop_assert_eq!(&g, &greedy(&h, &b, f));
        }
    }

    #[test]
    fn weight_order_survives_scaling((n, m, p, seed, reg) in medium(), c in 2u64..1000) {
        let (h, b) = instance(n, m, p, seed, reg);
        let scaled = h.with_weights(h.weights().iter().map(|w| w * c).collect()).unwrap();
        prop_assert_eq!(
            greedy(&h, &b, PriorityFunction::Weight).sorted_edges(),
            greedy(&scaled, &b, PriorityFunction::Weight).sorted_edges()
        );
    }

    #[test]
    fn pin_and_pincap_agree_on_unit_capacities((n, m, p, seed, _) in medium()) {
        let (h, b) = instance(n, m, p, seed, Regime::One);
        let pin = PriorityOrder::new(PriorityFunction::Pin, &h, &b);
        let pincap = PriorityOrder::new(PriorityFunction::PinCap, &h, &b);
        prop_assert_eq!(pin.edges(), pincap.edges());
        for e in 0..h.num_edges() {
            prop_assert_eq!(
                priority(PriorityFunction::Pin, &h, &b, e).log,
                priority(PriorityFunction::PinCap, &h, &b, e).log
            );
        }
    }

    #[test]
    fn local_search_keeps_feasibility((n, m, p, seed, reg) in medium()) {
        let (h, b) = instance(n, m, p, seed, reg);
        let order = PriorityOrder::new(PriorityFunction::Pin, &h, &b);
        let mut cur = order.greedy(&h, &b);
        let before = cur.weight();
        let swaps = one_two_swap(&h, &b, &mut cur, &order, 64);
        prop_assert!(validate_matching(&h, &b, cur.edges()).feasible);
        prop_assert!(cur.weight() >= before + swaps as u64);
        let mid = cur.weight();
        exhaustive_one_two_swap(&h, &b, &mut cur, &order, 64);
        prop_assert!(cur.weight() >= mid);
        prop_assert_eq!(one_two_swap(&h, &b, &mut cur, &order, 64), 0);
        let mut rng = hypermatch::hypergraph::seeded_rng(seed);
        perturb(&h, &b, &mut cur, &order, &mut rng, 0.5);
        prop_assert!(validate_matching(&h, &b, cur.edges()).feasible);
        prop_assert!(is_maximal(&h, &b, &cur));
    }

    #[test]
    fn ils_never_loses_weight((n, m, p, seed, reg) in medium(), k in 1usize..20) {
        let (h, b) = instance(n, m, p, seed, reg);
        let order = PriorityOrder::new(PriorityFunction::Pin, &h, &b);
        let start = order.greedy(&h, &b);
        let cfg = IlsConfig { k, seed, ..Default::default() };
        let (best, trace) = ils(&h, &b, &start, &order, &cfg);
        prop_assert!(best.weight() >= start.weight());
        prop_assert!(validate_matching(&h, &b, best.edges()).feasible);
        prop_assert!(trace.best_weight.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(trace.best_weight.last().copied(), Some(best.weight()));
    }

    #[test]
    fn oracle_matches_enumeration((n, m, p, seed, reg) in small()) {
        let (h, b) = instance(n, m, p, seed, reg);
        let opt = brute_force_opt(&h, &b, OracleLimits::default()).unwrap();
        prop_assert!(validate_matching(&h, &b, opt.edges()).feasible);
        prop_assert_eq!(opt.weight(), enumerate_opt(&h, &b));
        for f in PriorityFunction::ALL {
            prop_assert!(greedy(&h, &b, f).weight() <= opt.weight());
        }
    }

    #[test]
    fn reductions_preserve_optimum((n, m, p, seed, reg) in small(), rules in rule_set()) {
        let (h, b) = instance(n, m, p, seed, reg);
        let opt = enumerate_opt(&h, &b);
        let kr = run_reductions(&h, &b, &ReductionConfig::with_rules(rules)).unwrap();
        let km = brute_force_opt(&kr.kernel, &kr.capacities, OracleLimits::default()).unwrap();
        prop_assert_eq!(opt, kr.weight_offset + km.weight());
        let full = unfold(&h, &b, &kr, &km).unwrap();
        prop_assert_eq!(full.weight(), opt);
        prop_assert!(validate_matching(&h, &b, full.edges()).feasible);

        // any kernel matching unfolds to a feasible one with the offset added
        let g = greedy(&kr.kernel, &kr.capacities, PriorityFunction::Pin);
        let gu = unfold(&h, &b, &kr, &g).unwrap();
        prop_assert_eq!(gu.weight(), g.weight() + kr.weight_offset);

        // every input edge has exactly one fate
        for e in 0..h.num_edges() {
            let in_kernel = kr.working_to_kernel[e].is_some();
            prop_assert_eq!(in_kernel, kr.fates[e] == EdgeFate::Kernel);
        }
    }

    #[test]
    fn exact_edges_are_safe((n, m, p, seed, reg) in small()) {
        let (h, b) = instance(n, m, p, seed, reg);
        let kr = run_reductions(&h, &b, &ReductionConfig::default()).unwrap();
        let exact: Vec<usize> = kr.exact.iter().copied().filter(|&e| e < h.num_edges()).collect();
        prop_assume!(exact.len() == kr.exact.len());
        let forced = Matching::from_edges(&h, &b, exact.iter().copied()).unwrap();
        let rest: Vec<(Vec<usize>, u64)> = (0..h.num_edges())
            .filter(|e| !exact.contains(e))
            .map(|e| (h.pins(e).to_vec(), h.weight(e)))
            .collect();
        let residual: Vec<usize> = (0..n).map(|v| b.get(v) - forced.usage(v)).collect();
        // vertices exhausted by the forced edges get capacity 1 and lose their edges
        let rest: Vec<_> = rest.into_iter().filter(|(pins, _)| pins.iter().all(|&v| residual[v] > 0)).collect();
        let h2 = Hypergraph::new(n, rest).unwrap();
        let b2 = CapacityMap::new(residual.iter().map(|&r| r.max(1)).collect()).unwrap();
        prop_assert_eq!(enumerate_opt(&h2, &b2) + forced.weight(), enumerate_opt(&h, &b));
    }

    #[test]
    fn kernel_is_a_fixed_point((n, m, p, seed, reg) in medium()) {
        let (h, b) = instance(n, m, p, seed, reg);
        let cfg = ReductionConfig { max_rounds: 1000, ..Default::default() };
        let kr = run_reductions(&h, &b, &cfg).unwrap();
        prop_assert!(kr.report.fixed_point);
        let again = run_reductions(&kr.kernel, &kr.capacities, &cfg).unwrap();
        prop_assert_eq!(again.report.total_applications(), 0);
        prop_assert!(again.is_identity());
    }

    #[test]
    fn every_application_shrinks_the_instance((n, m, p, seed, reg) in medium()) {
        let (h, b) = instance(n, m, p, seed, reg);
        let cfg = ReductionConfig::default();
        let mut r = Reducer::new(&h, &b);
        for _ in 0..cfg.max_rounds {
            let mut round = 0;
            for rule in Rule::ALL {
                let before = r.num_alive_edges() + r.num_alive_vertices();
                let applied = r.apply(rule, &cfg);
                let after = r.num_alive_edges() + r.num_alive_vertices();
                if applied > 0 {
                    prop_assert!(after < before, "{rule} applied {applied} without shrinking");
                } else {
                    prop_assert_eq!(after, before);
                }
                round += applied;
            }
            if round == 0 {
                break;
            }
        }
    }
}

#[test]
fn oracle_weight_matches_enumeration_on_every_regime() {
    for regime in REGIMES {
        for seed in 0..30 {
            let (h, b) = instance(8, 12, 3, seed, regime);
            assert_eq!(oracle_weight(&h, &b).unwrap(), enumerate_opt(&h, &b));
        }
    }
}

#[test]
fn ils_usually_finds_the_optimum_on_small_instances() {
    let mut hits = 0;
    for i in 0..200u64 {
        let (h, b) = instance(10, 14, 4, 1000 + i, REGIMES[i as usize % 3]);
        let opt = oracle_weight(&h, &b).unwrap();
        let order = PriorityOrder::new(PriorityFunction::Pin, &h, &b);
        let start = order.greedy(&h, &b);
        let best = (0..10)
            .map(|seed| ils(&h, &b, &start, &order, &IlsConfig { k: 200, seed, ..Default::default() }).0.weight())
            .max()
            .unwrap();
        assert!(best <= opt);
        hits += usize::from(best == opt);
    }
    assert!(hits >= 190, "optimum reached on {hits} of 200");
}
