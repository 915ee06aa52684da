use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pbox_core::cone::{adjacency_sign_test, mesc_validate, Generator, GeneratorSet};
use pbox_core::extremes::{
    adjacent_mesc, all_adjacent, argmin_walk, build_fan, enumerate_extremes, extreme_from_mesc,
    feasible_mescs, full_chain, lower_expectation, upper_expectation, EdgeKind, Method,
};
use pbox_core::oracle::{
    local_candidate_violation, oracle_extremes, oracle_extremes_with, oracle_lower_expectation,
    random_gamble, random_pbox, range_violation, SearchMode, DEFAULT_LIMIT,
};
use pbox_core::{cone_contains, Gamble, Membership, PBox, Rational};

fn pbox_from(seed: u64, n: usize, denominator: i64) -> PBox {
    random_pbox(&mut ChaCha8Rng::seed_from_u64(seed), n, denominator)
}

fn arb_pbox(max_n: usize) -> impl Strategy<Value = PBox> {
    (any::<u64>(), 1..=max_n, 1i64..=8).prop_map(|(s, n, d)| pbox_from(s, n, d))
}

fn universe(n: usize) -> Vec<Generator> {
    let mut all = BTreeSet::new();
    for i in 1..=n {
        for g in [Generator::Prefix(i), Generator::CoPrefix(i - 1), Generator::Singleton(i)] {
            if let Ok(c) = g.canonical(n) {
                all.insert(c);
            }
        }
    }
    all.into_iter().collect()
}

// Every replacement of `out` by any constraint set that yields a valid,
// feasible family on the other side of the shared facet.
fn global_neighbours(g: &GeneratorSet, out: Generator, pbox: &PBox) -> BTreeSet<GeneratorSet> {
    universe(g.n())
        .into_iter()
        .filter(|c| !g.contains(*c))
        .filter_map(|c| g.replace(out, c).ok())
        .filter(|cand| mesc_validate(cand).is_ok())
        .filter(|cand| adjacency_sign_test(g, cand).unwrap())
        .filter(|cand| {
            extreme_from_mesc(cand, pbox)
                .unwrap()
                .extreme()
                .is_some()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn methods_and_oracle_agree(p in arb_pbox(6)) {
        let s = enumerate_extremes(&p, Method::Structural).unwrap();
        let b = enumerate_extremes(&p, Method::Bfs).unwrap();
        prop_assert_eq!(&s, &b);
        let got: Vec<_> = s.into_iter().map(|e| e.cdf).collect();
        prop_assert_eq!(got, oracle_extremes(&p).unwrap());
    }

    #[test]
    fn reference_search_agrees(p in arb_pbox(4)) {
        let pruned = oracle_extremes_with(&p, SearchMode::Pruned, DEFAULT_LIMIT).unwrap();
        let full = oracle_extremes_with(&p, SearchMode::Reference, DEFAULT_LIMIT).unwrap();
        prop_assert_eq!(pruned, full);
    }

    #[test]
    fn range_and_local_candidates(p in arb_pbox(7)) {
        for e in enumerate_extremes(&p, Method::Structural).unwrap() {
            prop_assert_eq!(range_violation(&p, e.cdf.values()), None, "{}", e.cdf);
            prop_assert_eq!(local_candidate_violation(&p, e.cdf.values()), None, "{}", e.cdf);
            prop_assert!(p.contains(e.cdf.values()));
        }
    }

    #[test]
    fn local_adjacency_matches_global(p in arb_pbox(5)) {
        for (g, _) in feasible_mescs(&p).unwrap() {
            for &out in g.members() {
                if out == Generator::Omega {
                    continue;
                }
                let local: BTreeSet<GeneratorSet> = adjacent_mesc(&g, out, &p)
                    .unwrap()
                    .into_iter()
                    .map(|a| a.set)
                    .collect();
                prop_assert_eq!(&local, &global_neighbours(&g, out, &p), "{} without {}", g, out);
            }
        }
    }

    #[test]
    fn single_transitions_are_ordered(p in arb_pbox(6)) {
        for (g, f) in feasible_mescs(&p).unwrap() {
            for adj in all_adjacent(&g, &p).unwrap() {
                let below = f.values().iter().zip(adj.cdf.values()).all(|(a, b)| a <= b);
                let above = f.values().iter().zip(adj.cdf.values()).all(|(a, b)| a >= b);
                prop_assert!(below || above, "{} -> {} via {}", f, adj.cdf, adj.case);
            }
        }
    }

    #[test]
    fn witnesses_are_tight(p in arb_pbox(6)) {
        for e in enumerate_extremes(&p, Method::Structural).unwrap() {
            let mass = e.cdf.to_mass();
            for w in &e.witnesses {
                for &m in w.members() {
                    let h = pbox_core::cone::generator_gamble(p.domain(), m);
                    let v = mass.expectation(&h).unwrap();
                    let bound = match m {
                        Generator::Prefix(i) => p.low_at(i),
                        Generator::CoPrefix(i) => Rational::from_integer(1.into()) - p.up_at(i),
                        Generator::Singleton(_) => Rational::from_integer(0.into()),
                        Generator::Omega => Rational::from_integer(1.into()),
                    };
                    prop_assert_eq!(v, bound, "{} in {}", m, w);
                }
            }
        }
    }

    #[test]
    fn bounds_match_oracle(p in arb_pbox(7), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_gamble(&mut rng, p.domain(), 9);
        let lower = lower_expectation(&h, &p).unwrap().0;
        prop_assert_eq!(&lower, &oracle_lower_expectation(&h, &p).unwrap());
        let upper = upper_expectation(&h, &p).unwrap().0;
        prop_assert_eq!(upper, -oracle_lower_expectation(&h.neg(), &p).unwrap());
        let walk = argmin_walk(&h, &p, &full_chain(p.n())).unwrap();
        prop_assert_eq!(walk.value, lower);
    }

    #[test]
    fn fan_edges_pass_sign_test(p in arb_pbox(5)) {
        let fan = build_fan(&p).unwrap();
        for e in &fan.edges {
            prop_assert!(adjacency_sign_test(&fan.nodes[e.a], &fan.nodes[e.b]).unwrap());
            let same = fan.cdf(e.a) == fan.cdf(e.b);
            prop_assert_eq!(same, e.kind == EdgeKind::SamePoint);
        }
    }

    #[test]
    fn cone_additivity(p in arb_pbox(6), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extremes = enumerate_extremes(&p, Method::Structural).unwrap();
        let e = &extremes[rng.gen_range(0..extremes.len())];
        let w = e.witnesses.iter().next().unwrap();
        let combo = |rng: &mut ChaCha8Rng| {
            let mut v = vec![Rational::from_integer(0.into()); p.n()];
            for &m in w.members() {
                let c = rng.gen_range(-3i64..=4);
                let c = if m == Generator::Omega { c } else { c.abs() };
                for (k, x) in m.indicator(p.n()).into_iter().enumerate() {
                    v[k] += x * Rational::from_integer(c.into());
                }
            }
            Gamble::new(p.domain().clone(), v).unwrap()
        };
        let (g, h) = (combo(&mut rng), combo(&mut rng));
        prop_assert_ne!(cone_contains(&g, w).unwrap().membership, Membership::Outside);
        let gh = g.add(&h).unwrap();
        let lg = lower_expectation(&g, &p).unwrap().0;
        let lh = lower_expectation(&h, &p).unwrap().0;
        let lgh = lower_expectation(&gh, &p).unwrap().0;
        prop_assert_eq!(&lgh, &(&lg + &lh));
        prop_assert_eq!(e.cdf.expectation(&g).unwrap(), lg);
        prop_assert_eq!(e.cdf.expectation(&gh).unwrap(), lgh);
    }
}
