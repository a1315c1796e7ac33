//! Ramsey degrees for `m`-subsets of one-block approximations: closed-form
//! sums over compositions, a type-counting oracle over a sequence prefix,
//! and a naive enumeration used to cross-check the oracle.
//!
//! A one-block approximation at depth `d` is a point vector of
//! `prod_j A_{d,j}`. The type of a set of them records the block sizes in
//! depth order and, per block, each coordinate's induced substructure on the
//! used points with the assignment of elements to those points. Elements of
//! a block are ordered by their point vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::combi::binomial;
use crate::error::{Error, Result};
use crate::fraisse::{iso_count, FraisseClassSpec};
use crate::genseq::{build_sequence, Coordinates, GeneratingSequence};
use crate::structures::OrderedStructure;

/// All compositions of `m`, lexicographic.
pub fn compositions(m: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for first in 1..=rest {
            cur.push(first);
            go(rest - first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        go(m, &mut Vec::new(), &mut out);
    }
    out
}

/// Sum over compositions `s` of `m` of `prod_i Iso(K, s_i)`.
pub fn degree_formula_j1(class: &FraisseClassSpec, m: usize, budget: u128) -> Result<u128> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let iso: Vec<u128> = (0..=m)
        .map(|s| iso_count(class, s, budget).map(|r| r.count))
        .collect::<Result<_>>()?;
    Ok(compositions(m)
        .iter()
        .map(|s| s.iter().map(|&p| iso[p]).product::<u128>())
        .sum())
}

/// Pairs in a two-coordinate space: `1 + I0 + I1 + 2 I0 I1` with
/// `Ij = Iso(K_j, 2)`.
pub fn degree_formula_j2(k0: &FraisseClassSpec, k1: &FraisseClassSpec, budget: u128) -> Result<u128> {
    let i0 = iso_count(k0, 2, budget)?.count;
    let i1 = iso_count(k1, 2, budget)?.count;
    Ok(1 + i0 + i1 + 2 * i0 * i1)
}

/// Per coordinate: the induced substructure on the used points and each
/// element's rank among them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct BlockType {
    induced: Vec<OrderedStructure>,
    ranks: Vec<Vec<usize>>,
}

fn block_type(seq: &GeneratingSequence, depth: usize, elems: &mut [Vec<usize>]) -> Result<BlockType> {
    elems.sort();
    let width = elems[0].len();
    let mut induced = Vec::with_capacity(width);
    let mut ranks = Vec::with_capacity(width);
    for j in 0..width {
        let pts: Vec<usize> = elems.iter().map(|e| e[j]).sorted().dedup().collect();
        ranks.push(elems.iter().map(|e| pts.binary_search(&e[j]).unwrap()).collect());
        induced.push(seq.structure(depth, j).restrict(&pts)?);
    }
    Ok(BlockType { induced, ranks })
}

fn check_prefix(seq: &GeneratingSequence, depth_cap: usize) -> Result<()> {
    if depth_cap < 2 {
        return Err(Error::Domain("depth cap must be at least 2".into()));
    }
    if depth_cap > seq.levels() {
        return Err(Error::Domain(format!(
            "depth cap {depth_cap} exceeds the {} built levels",
            seq.levels()
        )));
    }
    for d in 0..depth_cap {
        if seq.width_at(d) != seq.width_at(0) {
            return Err(Error::Domain("degrees need a fixed finite width".into()));
        }
    }
    for j in 0..seq.width_at(0) {
        if seq.structure(0, j).size() != 1 {
            return Err(Error::Domain(format!("A_(0,{j}) is not a single point")));
        }
    }
    Ok(())
}

fn block_elements(seq: &GeneratingSequence, d: usize) -> Vec<Vec<usize>> {
    (0..seq.width_at(d))
        .map(|j| 0..seq.structure(d, j).size())
        .multi_cartesian_product()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub m: usize,
    pub depth_cap: usize,
    /// Type count using depths `< depth_cap`.
    pub value: u128,
    /// Type count using depths `< depth_cap - 1`.
    pub previous: u128,
    /// Distinct single-block types of sizes `1..=m`.
    pub block_types: Vec<usize>,
    pub per_composition: Vec<(Vec<usize>, u128)>,
    pub subsets_examined: u128,
}

/// Counts `m`-subset types of one-block approximations over depths
/// `< depth_cap`. Single-block types are tabulated by the first depth that
/// realizes them; a depth only adds types of subsets touching an element
/// outside the image of the previous level. Tuples of block types are then
/// counted by placing each block at the earliest admissible depth.
///
/// Fails with [`Error::Unresolved`] unless the count at `depth_cap - 1`
/// equals the count at `depth_cap`.
pub fn degree_oracle(seq: &GeneratingSequence, m: usize, depth_cap: usize, budget: u128) -> Result<OracleResult> {
    let r = degree_oracle_unchecked(seq, m, depth_cap, budget)?;
    if r.value != r.previous {
        return Err(Error::Unresolved(format!(
            "type count moved from {} to {} at depth {depth_cap}; use a deeper prefix",
            r.previous, r.value
        )));
    }
    Ok(r)
}

/// [`degree_oracle`] without the stabilization guard.
pub fn degree_oracle_unchecked(
    seq: &GeneratingSequence,
    m: usize,
    depth_cap: usize,
    budget: u128,
) -> Result<OracleResult> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    check_prefix(seq, depth_cap)?;
    let width = seq.width_at(0);
    // first[t - 1][type] = least depth realizing a t-element block type
    let mut first: Vec<HashMap<BlockType, usize>> = vec![HashMap::new(); m];
    let mut examined: u128 = 0;
    for d in 0..depth_cap {
        let elems = block_elements(seq, d);
        let is_old = |e: &Vec<usize>| {
            d > 0 && (0..width).all(|j| seq.step(d - 1, j).embedding.map().binary_search(&e[j]).is_ok())
        };
        let (fresh, old): (Vec<Vec<usize>>, Vec<Vec<usize>>) = elems.into_iter().partition(|e| !is_old(e));
        let ordered: Vec<Vec<usize>> = fresh.iter().chain(&old).cloned().collect();
        for t in 1..=m {
            let cost: u128 = (0..fresh.len()).map(|i| binomial(ordered.len() - i - 1, t - 1)).sum();
            examined = examined.saturating_add(cost);
            if examined > budget {
                return Err(Error::budget("block subsets", examined, budget));
            }
            for i in 0..fresh.len() {
                for rest in (i + 1..ordered.len()).combinations(t - 1) {
                    let mut sub: Vec<Vec<usize>> = std::iter::once(i).chain(rest).map(|k| ordered[k].clone()).collect();
                    let ty = block_type(seq, d, &mut sub)?;
                    first[t - 1].entry(ty).or_insert(d);
                }
            }
        }
    }
    // by_first[t - 1][d] = number of t-element types first realized at d
    let by_first: Vec<Vec<u128>> = first
        .iter()
        .map(|tab| {
            let mut v = vec![0u128; depth_cap];
            for &d in tab.values() {
                v[d] += 1;
            }
            v
        })
        .collect();
    let count_upto = |cap: usize| -> Vec<(Vec<usize>, u128)> {
        compositions(m)
            .into_iter()
            .map(|s| {
                // dp[d] = tuples so far whose last block sits at depth d
                let mut dp: Vec<u128> = Vec::new();
                for (pos, &t) in s.iter().enumerate() {
                    let mut next = vec![0u128; cap];
                    for (f, &n) in by_first[t - 1].iter().enumerate().take(cap) {
                        if n == 0 {
                            continue;
                        }
                        if pos == 0 {
                            next[f] += n;
                            continue;
                        }
                        for (d, &ways) in dp.iter().enumerate() {
                            let at = f.max(d + 1);
                            if ways > 0 && at < cap {
                                next[at] += ways * n;
                            }
                        }
                    }
                    dp = next;
                }
                let total = dp.iter().sum();
                (s, total)
            })
            .collect()
    };
    let per_composition = count_upto(depth_cap);
    let value = per_composition.iter().map(|(_, c)| c).sum();
    let previous = count_upto(depth_cap - 1).iter().map(|(_, c)| c).sum();
    Ok(OracleResult {
        m,
        depth_cap,
        value,
        previous,
        block_types: first.iter().map(HashMap::len).collect(),
        per_composition,
        subsets_examined: examined,
    })
}

/// Enumerates every `m`-subset of one-block approximations over depths
/// `< depth` and counts distinct types computed from scratch.
pub fn degree_naive(seq: &GeneratingSequence, m: usize, depth: usize, budget: u128) -> Result<u128> {
    check_prefix(seq, depth.max(2))?;
    let elems: Vec<(usize, Vec<usize>)> = (0..depth)
        .flat_map(|d| block_elements(seq, d).into_iter().map(move |e| (d, e)))
        .collect();
    let cost = binomial(elems.len(), m);
    if cost > budget {
        return Err(Error::budget("m-subsets", cost, budget));
    }
    let mut types: HashSet<Vec<(usize, Vec<Vec<usize>>, Vec<Vec<Vec<usize>>>)>> = HashSet::new();
    for sub in elems.iter().combinations(m) {
        let by_depth: BTreeMap<usize, Vec<&Vec<usize>>> = sub.iter().map(|(d, e)| (*d, e)).into_group_map().into_iter().collect();
        let ty = by_depth
            .iter()
            .map(|(&d, es)| {
                let mut es = es.clone();
                es.sort();
                let mut ranks = Vec::new();
                let mut tuples = Vec::new();
                for j in 0..seq.width_at(d) {
                    let mut pts: Vec<usize> = es.iter().map(|e| e[j]).collect();
                    pts.sort();
                    pts.dedup();
                    ranks.push(es.iter().map(|e| pts.iter().position(|&p| p == e[j]).unwrap()).collect());
                    let a = seq.structure(d, j);
                    for (r, sym) in a.signature().relations().iter().enumerate() {
                        let held: Vec<Vec<usize>> = std::iter::repeat_n(0..pts.len(), sym.arity)
                            .multi_cartesian_product_or_unit_owned()
                            .filter(|tu| a.has_tuple(r, &tu.iter().map(|&i| pts[i]).collect::<Vec<_>>()))
                            .collect();
                        tuples.push(held);
                    }
                }
                (es.len(), ranks, tuples)
            })
            .collect();
        types.insert(ty);
    }
    Ok(types.len() as u128)
}

trait OwnedProduct {
    fn multi_cartesian_product_or_unit_owned(self) -> Box<dyn Iterator<Item = Vec<usize>>>;
}

impl<I: Iterator<Item = std::ops::Range<usize>>> OwnedProduct for I {
    fn multi_cartesian_product_or_unit_owned(self) -> Box<dyn Iterator<Item = Vec<usize>>> {
        let factors: Vec<_> = self.collect();
        if factors.is_empty() {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(factors.into_iter().multi_cartesian_product())
        }
    }
}

/// Reference degrees for the standard spaces, keyed by class names and `m`.
pub fn reference_value(classes: &[FraisseClassSpec], m: usize) -> Option<u128> {
    let names: Vec<&str> = classes.iter().map(FraisseClassSpec::name).collect();
    match (names.as_slice(), m) {
        (["linear-orders"], m) if m >= 1 => Some(1u128 << (m - 1)),
        (["clique-free-3"], 2) => Some(3),
        (["clique-free-3"], 3) => Some(12),
        (["clique-free-3"], 4) => Some(35),
        (["linear-orders", "linear-orders"], 2) => Some(5),
        (["linear-orders", "linear-orders"], 3) => Some(24),
        (["linear-orders", "linear-orders", "linear-orders"], 2) => Some(14),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub space: Vec<String>,
    pub m: usize,
    pub formula: Option<u128>,
    pub oracle: Option<u128>,
    /// `formula == oracle` when both are present.
    pub agreement: Option<bool>,
    pub reference_value: Option<u128>,
    pub discrepancy: Option<String>,
}

/// Formula (when one exists for this width and `m`), oracle at
/// `depth_cap` when given, and the reference value.
pub fn degree_report(
    classes: &[FraisseClassSpec],
    m: usize,
    depth_cap: Option<usize>,
    budget: u128,
) -> Result<DegreeReport> {
    let formula = match classes {
        [k] => Some(degree_formula_j1(k, m, budget)?),
        [k0, k1] if m == 2 => Some(degree_formula_j2(k0, k1, budget)?),
        _ => None,
    };
    let oracle = match depth_cap {
        Some(cap) => {
            let seq = build_sequence(Coordinates::Finite(classes.to_vec()), cap, budget)?;
            Some(degree_oracle(&seq, m, cap, budget)?.value)
        }
        None => None,
    };
    let agreement = formula.zip(oracle).map(|(f, o)| f == o);
    let reference = reference_value(classes, m);
    let computed = oracle.or(formula);
    let discrepancy = match (reference, computed) {
        (Some(r), Some(c)) if r != c => Some(format!("computed {c}, reference {r}")),
        _ => None,
    };
    Ok(DegreeReport {
        space: classes.iter().map(|c| c.name().to_string()).collect(),
        m,
        formula,
        oracle,
        agreement,
        reference_value: reference,
        discrepancy,
    })
}

impl DegreeReport {
    pub fn csv_header() -> &'static str {
        "space,m,formula,oracle,agreement,reference,discrepancy"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<u128>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.space.join("*"),
            self.m,
            opt(self.formula),
            opt(self.oracle),
            self.agreement.map(|a| a.to_string()).unwrap_or_default(),
            opt(self.reference_value),
            self.discrepancy.clone().unwrap_or_default()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub n: usize,
    pub predicted: u128,
    pub oracle: u128,
    /// Distinct same-block pair types.
    pub within_block: usize,
    pub agrees: bool,
}

/// Pair degrees of the `n`-fold product of linear orders against
/// `(3^n - 1) / 2 + 1`.
pub fn test_conjecture(n_max: usize, depth_cap: usize, budget: u128) -> Result<Vec<ConjectureRow>> {
    (1..=n_max)
        .map(|n| {
            let seq = build_sequence(Coordinates::hypercube(n), depth_cap, budget)?;
            let r = degree_oracle(&seq, 2, depth_cap, budget)?;
            let predicted = (3u128.pow(n as u32) - 1) / 2 + 1;
            Ok(ConjectureRow {
                n,
                predicted,
                oracle: r.value,
                within_block: r.block_types[1],
                agrees: predicted == r.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u128 = 1 << 24;

    fn lo() -> FraisseClassSpec {
        FraisseClassSpec::linear_orders()
    }

    fn a2() -> FraisseClassSpec {
        FraisseClassSpec::clique_free(3).unwrap()
    }

    #[test]
    fn composition_lists() {
        assert_eq!(compositions(1), vec![vec![1]]);
        assert_eq!(compositions(2), vec![vec![1, 1], vec![2]]);
        let c4 = compositions(4);
        assert_eq!(c4.len(), 8);
        assert!(c4.windows(2).all(|w| w[0] < w[1]));
        assert!(c4.iter().all(|c| c.iter().sum::<usize>() == 4 && c.iter().all(|&p| p >= 1)));
    }

    #[test]
    fn formulas() {
        for m in 1..=6 {
            assert_eq!(degree_formula_j1(&lo(), m, B).unwrap(), 1 << (m - 1));
        }
        assert_eq!(degree_formula_j1(&a2(), 2, B).unwrap(), 3);
        assert_eq!(degree_formula_j1(&a2(), 3, B).unwrap(), 12);
        assert_eq!(degree_formula_j1(&a2(), 4, B).unwrap(), 66);
        assert_eq!(degree_formula_j2(&lo(), &lo(), B).unwrap(), 5);
        let og = FraisseClassSpec::ordered_graphs();
        assert_eq!(degree_formula_j2(&og, &lo(), B).unwrap(), 8);
        let kn = FraisseClassSpec::complete_graphs();
        assert_eq!(degree_formula_j2(&kn, &lo(), B).unwrap(), 5);
    }

    #[test]
    fn oracle_matches_formula_for_orders() {
        let seq = build_sequence(Coordinates::hypercube(1), 6, B).unwrap();
        for m in 1..=4 {
            let r = degree_oracle(&seq, m, 6, B).unwrap();
            assert_eq!(r.value, 1 << (m - 1), "m = {m}");
            assert_eq!(r.value, degree_naive(&seq, m, 6, B).unwrap());
        }
    }

    #[test]
    fn oracle_matches_naive_on_products() {
        let seq = build_sequence(Coordinates::hypercube(2), 4, B).unwrap();
        for m in 1..=3 {
            let r = degree_oracle_unchecked(&seq, m, 4, B).unwrap();
            assert_eq!(r.value, degree_naive(&seq, m, 4, B).unwrap(), "m = {m}");
            let r3 = degree_oracle_unchecked(&seq, m, 3, B).unwrap();
            assert_eq!(r3.value, degree_naive(&seq, m, 3, B).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn oracle_matches_naive_on_clique_free() {
        let seq = build_sequence(Coordinates::Finite(vec![a2()]), 7, B).unwrap();
        for m in 2..=3 {
            let r = degree_oracle_unchecked(&seq, m, 7, B).unwrap();
            assert_eq!(r.value, degree_naive(&seq, m, 7, B).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn clique_free_oracle_stabilizes_at_formula() {
        let seq = build_sequence(Coordinates::Finite(vec![a2()]), 14, B).unwrap();
        assert_eq!(degree_oracle(&seq, 2, 14, B).unwrap().value, 3);
        assert_eq!(degree_oracle(&seq, 3, 14, B).unwrap().value, 12);
    }

    #[test]
    fn unstable_prefix_is_unresolved() {
        let seq = build_sequence(Coordinates::hypercube(1), 3, B).unwrap();
        assert!(matches!(degree_oracle(&seq, 3, 3, B), Err(Error::Unresolved(_))));
    }

    #[test]
    fn hypercube_pairs() {
        let rows = test_conjecture(3, 3, B).unwrap();
        let oracle: Vec<u128> = rows.iter().map(|r| r.oracle).collect();
        assert_eq!(oracle, vec![2, 5, 14]);
        for r in &rows {
            assert!(r.agrees);
            assert_eq!(r.within_block as u128, (3u128.pow(r.n as u32) - 1) / 2);
        }
    }

    #[test]
    fn reports_flag_reference_mismatch() {
        let r = degree_report(&[lo(), lo()], 3, Some(5), B).unwrap();
        assert_eq!(r.formula, None);
        assert_eq!(r.reference_value, Some(24));
        assert!(r.discrepancy.is_some());
        let r = degree_report(&[lo()], 3, Some(5), B).unwrap();
        assert_eq!((r.formula, r.oracle, r.agreement), (Some(4), Some(4), Some(true)));
        assert!(r.discrepancy.is_none());
        assert!(r.csv_row().starts_with("linear-orders,3,4,4,true,4,"));
    }
}
