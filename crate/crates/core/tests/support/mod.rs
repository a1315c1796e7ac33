//! Property suites shared by the `properties` and `acceptance` targets.
//! Every runner uses a fixed seed and no failure persistence.

#![allow(dead_code)]

use itertools::Itertools;
use proptest::prelude::*;
use proptest::sample::Index;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use ramsey_forge::canonize::{
    agree_on, agree_on_product, er_canonize, planted_er, product_canonize, product_domain, EquivalenceTable,
};
use ramsey_forge::combi::{all_subsets_lex, k_subsets};
use ramsey_forge::genseq::{build_sequence, enumerate_ar_n, le_fin, Approximation, Coordinates};
use ramsey_forge::ramsey::ArrowCoordinate;
use ramsey_forge::structures::enumerate_copies;
use ramsey_forge::OrderedStructure;

const B: u128 = 1 << 24;

pub fn runner(seed: u64, cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    })
}

fn graph_from_bits(n: usize, bits: &[bool]) -> OrderedStructure {
    let edges: Vec<(usize, usize)> = (0..n).tuple_combinations().zip(bits).filter(|(_, &b)| b).map(|(e, _)| e).collect();
    OrderedStructure::graph(n, &edges).unwrap()
}

fn graph(max: usize) -> impl Strategy<Value = OrderedStructure> {
    (0..=max).prop_flat_map(|n| prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| graph_from_bits(n, &bits)))
}

/// Index sets of `b` inducing exactly `a`, by scanning every subset.
fn copies_by_scan(a: &OrderedStructure, b: &OrderedStructure) -> Vec<Vec<usize>> {
    (0..b.size())
        .combinations(a.size())
        .filter(|idx| b.restrict(idx).unwrap() == *a)
        .collect()
}

/// Copy enumeration agrees with a full scan for hosts of at most 8 points.
pub fn copy_completeness(cases: u32) -> Result<(), String> {
    let strat = (graph(8), graph(4), prop::collection::vec(any::<Index>(), 0..=4));
    runner(0x5eed_0001, cases)
        .run(&strat, |(b, a, picks)| {
            let fast = enumerate_copies(&a, &b).map_err(|e| TestCaseError::fail(e.to_string()))?.copies;
            prop_assert_eq!(&fast, &copies_by_scan(&a, &b));
            // a planted substructure always has at least one copy
            if b.size() > 0 {
                let idx: Vec<usize> = picks.iter().map(|i| i.index(b.size())).sorted().dedup().collect();
                let sub = b.restrict(&idx).unwrap();
                let copies = enumerate_copies(&sub, &b).unwrap().copies;
                prop_assert!(copies.contains(&idx));
                prop_assert_eq!(copies, copies_by_scan(&sub, &b));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `I ⊆ J` implies `E_J ⊆ E_I`, pointwise and on planted tables.
pub fn e_i_monotonicity(cases: u32) -> Result<(), String> {
    let strat = (2usize..=7, 1usize..=3).prop_flat_map(|(m, n)| {
        let n = n.min(m);
        (Just(m), Just(n), any::<Index>(), any::<Index>(), any::<Index>(), any::<Index>())
    });
    runner(0x5eed_0002, cases)
        .run(&strat, |(m, n, ib, ic, ii, ij)| {
            let sets = all_subsets_lex(n);
            let dom = k_subsets(m, n);
            let (b, c) = (&dom[ib.index(dom.len())], &dom[ic.index(dom.len())]);
            let j = &sets[ij.index(sets.len())];
            // a subset of j chosen by the other index
            let i: Vec<usize> = j.iter().copied().enumerate().filter(|(k, _)| ii.index(1 << j.len()) >> k & 1 == 1).map(|(_, x)| x).collect();
            if agree_on(b, c, j) {
                prop_assert!(agree_on(b, c, &i));
            }
            let fine = planted_er(m, n, j);
            let coarse = planted_er(m, n, &i);
            for x in 0..dom.len() {
                for y in 0..dom.len() {
                    if fine.class_of[x] == fine.class_of[y] {
                        prop_assert_eq!(coarse.class_of[x], coarse.class_of[y]);
                    }
                }
            }
            let xs = [b.clone(), c.clone()];
            if agree_on_product(&xs, &xs, &[j.clone(), j.clone()]) {
                prop_assert!(agree_on_product(&xs, &xs, &[i.clone(), i.clone()]));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `<=_fin` is reflexive and transitive on a truncated two-coordinate space.
pub fn le_fin_transitivity(cases: u32) -> Result<(), String> {
    let seq = build_sequence(Coordinates::hypercube(2), 3, B).unwrap();
    let prefix = seq.maximal_prefix(4).unwrap();
    let universe: Vec<Approximation> = (0..=3).flat_map(|n| enumerate_ar_n(&seq, &prefix, n, B).unwrap()).collect();
    let below: Vec<Vec<usize>> = universe
        .iter()
        .map(|c| (0..universe.len()).filter(|&i| le_fin(&universe[i], c)).collect())
        .collect();
    runner(0x5eed_0003, cases)
        .run(&(any::<Index>(), any::<Index>(), any::<Index>(), any::<Index>()), |(ic, ib, ia, ir)| {
            let c = ic.index(universe.len());
            prop_assert!(le_fin(&universe[c], &universe[c]));
            let b = below[c][ib.index(below[c].len())];
            let a = below[b][ia.index(below[b].len())];
            prop_assert!(le_fin(&universe[a], &universe[c]), "{} <= {} <= {}", universe[a], universe[b], universe[c]);
            // random triples as well, where the premise may fail
            let r = ir.index(universe.len());
            if le_fin(&universe[r], &universe[a]) {
                prop_assert!(le_fin(&universe[r], &universe[c]));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn pairwise(e: &EquivalenceTable<Vec<usize>>, n: usize, s: &[usize], i: &[usize]) -> bool {
    let sub: Vec<Vec<usize>> = s.iter().copied().combinations(n).collect();
    let class = |b: &Vec<usize>| e.class_of[e.domain.iter().position(|d| d == b).unwrap()];
    sub.iter()
        .cartesian_product(&sub)
        .all(|(b, c)| (class(b) == class(c)) == i.iter().all(|&k| b[k] == c[k]))
}

/// Returned canonizations re-verify by an independent pairwise check, and
/// relations on `[4]^2` always canonize on 3 points.
pub fn canonization_soundness(cases: u32) -> Result<(), String> {
    let dom = k_subsets(4, 2);
    let strat = prop::collection::vec(0usize..4, dom.len());
    runner(0x5eed_0004, cases)
        .run(&strat, |ids| {
            let e = EquivalenceTable::new(dom.clone(), ids).unwrap();
            let w = er_canonize(&e, 4, 2, 3).unwrap();
            prop_assert!(w.is_some(), "every relation on [4]^2 canonizes");
            let w = w.unwrap();
            prop_assert!(w.verified);
            prop_assert!(pairwise(&e, 2, &w.s, &w.index_set));
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let coords = [ArrowCoordinate {
        a: OrderedStructure::linear_order(1),
        b: OrderedStructure::linear_order(2),
        c: OrderedStructure::linear_order(4),
    }];
    let pdom = product_domain(&coords).unwrap();
    runner(0x5eed_0005, cases)
        .run(&prop::collection::vec(0usize..3, pdom.len()), |ids| {
            let e = EquivalenceTable::new(pdom.clone(), ids).unwrap();
            if let Some(w) = product_canonize(&coords, &e, B).unwrap() {
                prop_assert!(w.verified);
                let inside: Vec<usize> = w.b_primes[0].clone();
                let class = |p: usize| e.class_of[pdom.iter().position(|d| d[0] == vec![p]).unwrap()];
                for &x in &inside {
                    for &y in &inside {
                        prop_assert_eq!(class(x) == class(y), w.index_sets[0].is_empty() || x == y);
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}
