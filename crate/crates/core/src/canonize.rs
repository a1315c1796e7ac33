//! Canonical equivalence relations: Erdős–Rado on `[m]^n`, products of
//! copy sets, blocks of a space prefix, fronts and inner maps.
//!
//! Searches test a candidate by checking that class ids and canonical keys
//! determine each other. Every returned witness is then re-verified by a
//! separate pairwise loop over the restricted domain.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::combi::{all_subsets_lex, bell, binomial, k_subsets, ProductOrUnit, RestrictedGrowth};
use crate::error::{Error, Result};
use crate::genseq::{enumerate_ar_n, Approximation, Block, GeneratingSequence};
use crate::ramsey::ArrowCoordinate;
use crate::structures::enumerate_copies;

/// A partition of an explicit finite domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceTable<T> {
    pub domain: Vec<T>,
    pub class_of: Vec<usize>,
}

impl<T: Clone + Eq + Hash> EquivalenceTable<T> {
    pub fn new(domain: Vec<T>, class_of: Vec<usize>) -> Result<Self> {
        if domain.len() != class_of.len() {
            return Err(Error::Domain(format!(
                "{} elements but {} class ids",
                domain.len(),
                class_of.len()
            )));
        }
        let mut seen = HashMap::new();
        for (i, d) in domain.iter().enumerate() {
            if seen.insert(d, i).is_some() {
                return Err(Error::Domain(format!("element {i} is listed twice")));
            }
        }
        Ok(EquivalenceTable { domain, class_of })
    }

    /// Classes are the fibres of `key`; ids follow first occurrence.
    pub fn from_key<K: Eq + Hash>(domain: Vec<T>, key: impl Fn(&T) -> K) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let class_of = domain
            .iter()
            .map(|d| {
                let next = ids.len();
                *ids.entry(key(d)).or_insert(next)
            })
            .collect();
        EquivalenceTable { domain, class_of }
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn index(&self) -> HashMap<T, usize> {
        self.domain.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut by_id: Vec<(usize, usize)> = self.class_of.iter().copied().zip(0..).collect();
        by_id.sort();
        by_id
            .into_iter()
            .chunk_by(|(c, _)| *c)
            .into_iter()
            .map(|(_, g)| g.map(|(_, i)| i).collect())
            .collect()
    }

    /// Same partition after listing the elements in the order of `domain`.
    pub fn reorder(&self, domain: &[T]) -> Result<Self> {
        let idx = self.index();
        if domain.len() != self.len() {
            return Err(Error::Domain(format!(
                "the relation covers {} elements, the domain has {}",
                self.len(),
                domain.len()
            )));
        }
        let class_of = domain
            .iter()
            .enumerate()
            .map(|(i, d)| {
                idx.get(d)
                    .map(|&k| self.class_of[k])
                    .ok_or_else(|| Error::Domain(format!("domain element {i} is not covered")))
            })
            .collect::<Result<_>>()?;
        Ok(EquivalenceTable {
            domain: domain.to_vec(),
            class_of,
        })
    }
}

/// One class per line, elements separated by `;`.
pub fn parse_partition<T: Clone + Eq + Hash>(
    text: &str,
    parse: impl Fn(&str) -> Result<T>,
) -> Result<EquivalenceTable<T>> {
    let mut domain = Vec::new();
    let mut class_of = Vec::new();
    let mut class = 0;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for el in line.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            domain.push(parse(el).map_err(|e| Error::Parse {
                line: ln + 1,
                detail: e.to_string(),
            })?);
            class_of.push(class);
        }
        class += 1;
    }
    EquivalenceTable::new(domain, class_of)
}

/// Inverse of [`parse_partition`].
pub fn format_partition<T>(e: &EquivalenceTable<T>, show: impl Fn(&T) -> String) -> String {
    let mut by_class: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &c) in e.class_of.iter().enumerate() {
        match by_class.iter_mut().find(|(id, _)| *id == c) {
            Some((_, v)) => v.push(i),
            None => by_class.push((c, vec![i])),
        }
    }
    by_class
        .iter()
        .map(|(_, els)| els.iter().map(|&i| show(&e.domain[i])).join("; ") + "\n")
        .collect()
}

pub fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Parse { line: 1, detail: format!("bad index {x:?}") })
        })
        .collect()
}

/// `0,1|2` for a tuple of per-coordinate index lists; `-` for an empty list.
pub fn format_copy_tuple(t: &[Vec<usize>]) -> String {
    t.iter()
        .map(|c| if c.is_empty() { "-".to_string() } else { c.iter().join(",") })
        .join("|")
}

pub fn parse_copy_tuple(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split('|').map(parse_index_list).collect()
}

/// `b E_I c` iff `b` and `c` agree at every position in `I`.
pub fn agree_on(b: &[usize], c: &[usize], index_set: &[usize]) -> bool {
    index_set.iter().all(|&i| b[i] == c[i])
}

fn project(b: &[usize], index_set: &[usize]) -> Vec<usize> {
    index_set.iter().map(|&i| b[i]).collect()
}

/// True when `class` and `key` induce the same partition of `items`.
fn same_partition<K: Eq + Hash + Clone>(items: impl Iterator<Item = (usize, K)>) -> bool {
    let mut key_of: HashMap<usize, K> = HashMap::new();
    let mut class_of: HashMap<K, usize> = HashMap::new();
    for (class, key) in items {
        if *key_of.entry(class).or_insert_with(|| key.clone()) != key {
            return false;
        }
        if *class_of.entry(key).or_insert(class) != class {
            return false;
        }
    }
    true
}

/// `E_I` on `[m]^n`, elements listed lexicographically.
pub fn planted_er(m: usize, n: usize, index_set: &[usize]) -> EquivalenceTable<Vec<usize>> {
    EquivalenceTable::from_key(k_subsets(m, n), |b| project(b, index_set))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErWitness {
    pub s: Vec<usize>,
    pub index_set: Vec<usize>,
    pub verified: bool,
}

/// Pairwise check of `E|[s]^n = E_I|[s]^n`.
pub fn verify_er(e: &EquivalenceTable<Vec<usize>>, n: usize, s: &[usize], index_set: &[usize]) -> bool {
    let idx = e.index();
    let sub: Vec<Vec<usize>> = s.iter().copied().combinations(n).collect();
    let Some(ids) = sub.iter().map(|b| idx.get(b).map(|&i| e.class_of[i])).collect::<Option<Vec<_>>>() else {
        return false;
    };
    for x in 0..sub.len() {
        for y in 0..sub.len() {
            if (ids[x] == ids[y]) != agree_on(&sub[x], &sub[y], index_set) {
                return false;
            }
        }
    }
    true
}

fn check_er_domain(e: &EquivalenceTable<Vec<usize>>, m: usize, n: usize) -> Result<()> {
    let want = binomial(m, n);
    if e.len() as u128 != want {
        return Err(Error::Domain(format!("{} elements, but [{m}]^{n} has {want}", e.len())));
    }
    for (i, b) in e.domain.iter().enumerate() {
        if b.len() != n || b.windows(2).any(|w| w[0] >= w[1]) || b.iter().any(|&x| x >= m) {
            return Err(Error::Domain(format!("element {i} is not an increasing {n}-subset of {m}")));
        }
    }
    Ok(())
}

/// Lexicographically least `(s, I)` with `|s| = l` on which `E` is `E_I`.
pub fn er_canonize(e: &EquivalenceTable<Vec<usize>>, m: usize, n: usize, l: usize) -> Result<Option<ErWitness>> {
    if n > l || l > m {
        return Err(Error::Domain(format!("need n <= l <= m, got n={n}, l={l}, m={m}")));
    }
    check_er_domain(e, m, n)?;
    Ok(er_search(e, &e.index(), m, n, l).map(|(s, index_set)| {
        let verified = verify_er(e, n, &s, &index_set);
        ErWitness { s, index_set, verified }
    }))
}

fn er_search(
    e: &EquivalenceTable<Vec<usize>>,
    idx: &HashMap<Vec<usize>, usize>,
    m: usize,
    n: usize,
    l: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let index_sets = all_subsets_lex(n);
    for s in (0..m).combinations(l) {
        let sub: Vec<(usize, Vec<usize>)> = s
            .iter()
            .copied()
            .combinations(n)
            .map(|b| (e.class_of[idx[&b]], b))
            .collect();
        for index_set in &index_sets {
            if same_partition(sub.iter().map(|(c, b)| (*c, project(b, index_set)))) {
                return Some((s, index_set.clone()));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErThreshold {
    pub n: usize,
    pub l: usize,
    /// Least `m > l` at which every partition canonizes, if within the cap.
    pub m: Option<usize>,
    pub partitions_checked: u128,
    /// A partition of `[m-1]^n` with no canonical `l`-subset.
    pub counterexample: Option<EquivalenceTable<Vec<usize>>>,
}

/// Least `m` in `l+1 ..= m_cap` such that every equivalence relation on
/// `[m]^n` has a canonical `l`-subset, by scanning restricted growth strings.
pub fn er_threshold(n: usize, l: usize, m_cap: usize, budget: u128) -> Result<ErThreshold> {
    if n > l {
        return Err(Error::Domain(format!("need n <= l, got n={n}, l={l}")));
    }
    let mut spent: u128 = 0;
    let mut counterexample = None;
    for m in l + 1..=m_cap {
        let domain = k_subsets(m, n);
        let cost = bell(domain.len());
        spent = spent.saturating_add(cost);
        if spent > budget {
            return Err(Error::budget(format!("partitions of [{m}]^{n}"), spent, budget));
        }
        let idx: HashMap<Vec<usize>, usize> = domain.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let mut all_ok = true;
        for rgs in RestrictedGrowth::new(domain.len()) {
            let e = EquivalenceTable {
                domain: domain.clone(),
                class_of: rgs,
            };
            if er_search(&e, &idx, m, n, l).is_none() {
                all_ok = false;
                counterexample = Some(e);
                break;
            }
        }
        if all_ok {
            return Ok(ErThreshold {
                n,
                l,
                m: Some(m),
                partitions_checked: spent,
                counterexample,
            });
        }
    }
    Ok(ErThreshold {
        n,
        l,
        m: None,
        partitions_checked: spent,
        counterexample,
    })
}

/// Product copies `(X_j)` of `(A_j)` in `(C_j)`, lexicographic with the
/// first coordinate slowest.
pub fn product_domain(coords: &[ArrowCoordinate]) -> Result<Vec<Vec<Vec<usize>>>> {
    let per: Vec<Vec<Vec<usize>>> = coords
        .iter()
        .map(|c| enumerate_copies(&c.a, &c.c).map(|s| s.copies))
        .collect::<Result<_>>()?;
    Ok(per
        .iter()
        .map(|p| p.iter())
        .multi_cartesian_product_or_unit()
        .map(|t| t.into_iter().cloned().collect())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductWitness {
    /// `B'_j` as index sets of `C_j`.
    pub b_primes: Vec<Vec<usize>>,
    pub index_sets: Vec<Vec<usize>>,
    pub verified: bool,
}

/// `(X_j) E_{(I_j)} (Y_j)` iff `X_j` and `Y_j` agree at the positions `I_j`.
pub fn agree_on_product(x: &[Vec<usize>], y: &[Vec<usize>], index_sets: &[Vec<usize>]) -> bool {
    x.iter().zip(y).zip(index_sets).all(|((a, b), i)| agree_on(a, b, i))
}

fn copies_inside(coords: &[ArrowCoordinate], b_primes: &[&Vec<usize>]) -> Result<Vec<Vec<Vec<usize>>>> {
    let per: Vec<Vec<Vec<usize>>> = coords
        .iter()
        .zip(b_primes)
        .map(|(c, bp)| {
            enumerate_copies(&c.a, &c.b).map(|s| {
                s.copies
                    .into_iter()
                    .map(|x| x.iter().map(|&i| bp[i]).collect())
                    .collect()
            })
        })
        .collect::<Result<_>>()?;
    Ok(per
        .iter()
        .map(|p| p.iter())
        .multi_cartesian_product_or_unit()
        .map(|t| t.into_iter().cloned().collect())
        .collect())
}

/// Pairwise check that `E` restricted to the copies inside `(B'_j)` is
/// `E_{(I_j)}`.
pub fn verify_product(
    coords: &[ArrowCoordinate],
    e: &EquivalenceTable<Vec<Vec<usize>>>,
    b_primes: &[Vec<usize>],
    index_sets: &[Vec<usize>],
) -> Result<bool> {
    let idx = e.index();
    let refs: Vec<&Vec<usize>> = b_primes.iter().collect();
    let dom = copies_inside(coords, &refs)?;
    let Some(ids) = dom.iter().map(|x| idx.get(x).map(|&i| e.class_of[i])).collect::<Option<Vec<_>>>() else {
        return Ok(false);
    };
    for x in 0..dom.len() {
        for y in 0..dom.len() {
            if (ids[x] == ids[y]) != agree_on_product(&dom[x], &dom[y], index_sets) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Lexicographically least `((B'_j), (I_j))` on which `E` is canonical.
pub fn product_canonize(
    coords: &[ArrowCoordinate],
    e: &EquivalenceTable<Vec<Vec<usize>>>,
    budget: u128,
) -> Result<Option<ProductWitness>> {
    let domain = product_domain(coords)?;
    if domain.len() != e.len() {
        return Err(Error::Domain(format!(
            "the relation covers {} elements, the product copy set has {}",
            e.len(),
            domain.len()
        )));
    }
    let idx = e.index();
    if let Some(missing) = domain.iter().find(|d| !idx.contains_key(*d)) {
        return Err(Error::Domain(format!("product copy {} is not covered", format_copy_tuple(missing))));
    }
    let b_in_c: Vec<Vec<Vec<usize>>> = coords
        .iter()
        .map(|c| enumerate_copies(&c.b, &c.c).map(|s| s.copies))
        .collect::<Result<_>>()?;
    let index_choices: Vec<Vec<Vec<usize>>> = coords.iter().map(|c| all_subsets_lex(c.a.size())).collect();
    let cost = b_in_c
        .iter()
        .map(|v| v.len() as u128)
        .chain(index_choices.iter().map(|v| v.len() as u128))
        .fold(1u128, u128::saturating_mul)
        .saturating_mul(domain.len() as u128);
    if cost > budget {
        return Err(Error::budget("product canonization candidates", cost, budget));
    }
    for bp in b_in_c.iter().map(|v| v.iter()).multi_cartesian_product_or_unit() {
        let sub: Vec<(usize, Vec<Vec<usize>>)> = copies_inside(coords, &bp)?
            .into_iter()
            .map(|x| (e.class_of[idx[&x]], x))
            .collect();
        for is in index_choices.iter().map(|v| v.iter()).multi_cartesian_product_or_unit() {
            let ok = same_partition(sub.iter().map(|(c, x)| {
                let key: Vec<Vec<usize>> = x.iter().zip(&is).map(|(xj, ij)| project(xj, ij)).collect();
                (*c, key)
            }));
            if ok {
                let b_primes: Vec<Vec<usize>> = bp.into_iter().cloned().collect();
                let index_sets: Vec<Vec<usize>> = is.into_iter().cloned().collect();
                let verified = verify_product(coords, e, &b_primes, &index_sets)?;
                return Ok(Some(ProductWitness {
                    b_primes,
                    index_sets,
                    verified,
                }));
            }
        }
    }
    Ok(None)
}

/// A canonical projection on blocks of one position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Projection {
    /// Forgets the block.
    Empty,
    /// Keeps the depth and the points at the given positions of each
    /// coordinate's copy; all sets empty keeps the depth only.
    Select(Vec<Vec<usize>>),
}

/// Depth plus the kept points of `A_{n,j}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProjectedBlock {
    pub depth: usize,
    pub sets: Vec<Vec<usize>>,
}

impl Projection {
    pub fn apply(&self, b: &Block) -> Option<ProjectedBlock> {
        match self {
            Projection::Empty => None,
            Projection::Select(is) => Some(ProjectedBlock {
                depth: b.depth,
                sets: b.sets.iter().zip(is).map(|(s, i)| project(s, i)).collect(),
            }),
        }
    }

    pub fn is_depth_only(&self) -> bool {
        matches!(self, Projection::Select(is) if is.iter().all(Vec::is_empty))
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Empty => f.write_str("empty"),
            p if p.is_depth_only() => f.write_str("depth"),
            Projection::Select(is) => write!(f, "select({})", format_copy_tuple(is)),
        }
    }
}

/// The canonical projections for block position `k`: empty first, then
/// index-set tuples in lexicographic order (depth-only comes first).
pub fn canonical_projections(seq: &GeneratingSequence, k: usize) -> Vec<Projection> {
    let per: Vec<Vec<Vec<usize>>> = (0..seq.width_at(k)).map(|j| all_subsets_lex(seq.structure(k, j).size())).collect();
    std::iter::once(Projection::Empty)
        .chain(
            per.iter()
                .map(|v| v.iter())
                .multi_cartesian_product_or_unit()
                .map(|t| Projection::Select(t.into_iter().cloned().collect())),
        )
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCanonization {
    pub sub_prefix: Approximation,
    /// Every tuple `(E_i)` that represents the relation on the sub-prefix.
    pub relations: Vec<Vec<Projection>>,
    pub verified: bool,
}

fn image(a: &Approximation, ps: &[Projection]) -> Vec<Option<ProjectedBlock>> {
    a.blocks.iter().zip(ps).map(|(b, p)| p.apply(b)).collect()
}

/// Searches the `sub_len`-block approximations `C` below `prefix` in order
/// for one on which `R` restricted to `AR_n|C` is a product of canonical
/// block relations; returns the first such `C` with all working tuples.
pub fn block_canonize(
    seq: &GeneratingSequence,
    prefix: &Approximation,
    n: usize,
    r: &EquivalenceTable<Approximation>,
    sub_len: usize,
    budget: u128,
) -> Result<Option<BlockCanonization>> {
    if sub_len < n {
        return Err(Error::Domain(format!("sub-prefix length {sub_len} is shorter than n = {n}")));
    }
    let domain = enumerate_ar_n(seq, prefix, n, budget)?;
    let r = r.reorder(&domain)?;
    let idx = r.index();
    let per_pos: Vec<Vec<Projection>> = (0..n).map(|k| canonical_projections(seq, k)).collect();
    let tuples: Vec<Vec<Projection>> = per_pos
        .iter()
        .map(|v| v.iter())
        .multi_cartesian_product_or_unit()
        .map(|t| t.into_iter().cloned().collect())
        .collect();
    let subs = enumerate_ar_n(seq, prefix, sub_len, budget)?;
    let cost = (subs.len() as u128)
        .saturating_mul(tuples.len() as u128)
        .saturating_mul(domain.len() as u128);
    if cost > budget {
        return Err(Error::budget("block canonization candidates", cost, budget));
    }
    for c in subs {
        let dom: Vec<(usize, &Approximation)> = enumerate_ar_n(seq, &c, n, budget)?
            .into_iter()
            .map(|a| idx[&a])
            .map(|i| (r.class_of[i], &r.domain[i]))
            .collect();
        let working: Vec<Vec<Projection>> = tuples
            .iter()
            .filter(|ps| same_partition(dom.iter().map(|(cl, a)| (*cl, image(a, ps)))))
            .cloned()
            .collect();
        if !working.is_empty() {
            let verified = working.iter().all(|ps| verify_block(&r, &c, seq, n, ps, budget).unwrap_or(false));
            return Ok(Some(BlockCanonization {
                sub_prefix: c,
                relations: working,
                verified,
            }));
        }
    }
    Ok(None)
}

/// Pairwise check of `a R b <-> for all i, a(i) E_i b(i)` on `AR_n|C`.
pub fn verify_block(
    r: &EquivalenceTable<Approximation>,
    c: &Approximation,
    seq: &GeneratingSequence,
    n: usize,
    ps: &[Projection],
    budget: u128,
) -> Result<bool> {
    let idx = r.index();
    let dom = enumerate_ar_n(seq, c, n, budget)?;
    let Some(ids) = dom.iter().map(|a| idx.get(a).map(|&i| r.class_of[i])).collect::<Option<Vec<_>>>() else {
        return Ok(false);
    };
    for x in 0..dom.len() {
        for y in 0..dom.len() {
            let related = (0..n).all(|i| ps[i].apply(&dom[x].blocks[i]) == ps[i].apply(&dom[y].blocks[i]));
            if (ids[x] == ids[y]) != related {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontMode {
    /// No member is an initial segment of another.
    NashWilliams,
    /// No member is `<=_fin` another.
    Sperner,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontReport {
    pub mode: FrontMode,
    pub antichain: bool,
    pub antichain_witness: Option<(Approximation, Approximation)>,
    /// Every approximation of the longest member length below the prefix
    /// has an initial segment in the family.
    pub coverage: bool,
    pub uncovered: Option<Approximation>,
    pub paths_checked: usize,
}

impl FrontReport {
    pub fn pass(&self) -> bool {
        self.antichain && self.coverage
    }
}

/// Checks the antichain condition exhaustively and coverage over the
/// maximal-length paths through the truncated prefix.
pub fn validate_front(
    seq: &GeneratingSequence,
    family: &[Approximation],
    prefix: &Approximation,
    mode: FrontMode,
    budget: u128,
) -> Result<FrontReport> {
    let mut antichain_witness = None;
    'outer: for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            if i == j || a == b {
                continue;
            }
            let bad = match mode {
                FrontMode::NashWilliams => a.is_initial_segment_of(b),
                FrontMode::Sperner => crate::genseq::le_fin(a, b),
            };
            if bad {
                antichain_witness = Some((a.clone(), b.clone()));
                break 'outer;
            }
        }
    }
    let len = family.iter().map(Approximation::len).max().unwrap_or(0);
    let paths = enumerate_ar_n(seq, prefix, len, budget)?;
    let members: std::collections::HashSet<&Approximation> = family.iter().collect();
    let uncovered = paths
        .iter()
        .find(|p| !(0..=p.len()).any(|q| members.contains(&p.r(q))))
        .cloned();
    Ok(FrontReport {
        mode,
        antichain: antichain_witness.is_none(),
        antichain_witness,
        coverage: uncovered.is_none(),
        uncovered,
        paths_checked: paths.len(),
    })
}

/// An inner map: one projection per block of each family member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerMap {
    pub entries: Vec<(Approximation, Vec<Projection>)>,
}

impl InnerMap {
    /// The same projection list for every member, truncated to its length.
    pub fn uniform(family: &[Approximation], per_position: impl Fn(usize) -> Projection) -> Self {
        InnerMap {
            entries: family
                .iter()
                .map(|a| (a.clone(), (0..a.len()).map(&per_position).collect()))
                .collect(),
        }
    }
}

/// `phi(b)` restricted to the first `l` blocks.
pub fn inner_image(b: &Approximation, ps: &[Projection], l: usize) -> Vec<ProjectedBlock> {
    b.blocks
        .iter()
        .zip(ps)
        .take(l)
        .filter_map(|(blk, p)| p.apply(blk))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerReport {
    pub inner: bool,
    pub inner_violation: Option<String>,
    pub nash_williams: bool,
    /// `(b, c)` with `phi(c)` a proper initial segment of `phi(b)`.
    pub witness: Option<(Approximation, Approximation)>,
}

impl InnerReport {
    pub fn pass(&self) -> bool {
        self.inner && self.nash_williams
    }
}

pub fn validate_inner_nw(seq: &GeneratingSequence, phi: &InnerMap) -> InnerReport {
    let mut inner_violation = None;
    'check: for (b, ps) in &phi.entries {
        if ps.len() != b.len() {
            inner_violation = Some(format!("{b}: {} projections for {} blocks", ps.len(), b.len()));
            break;
        }
        for (i, p) in ps.iter().enumerate() {
            if let Projection::Select(is) = p {
                let shape_ok = is.len() == seq.width_at(i)
                    && is.iter().enumerate().all(|(j, set)| {
                        set.windows(2).all(|w| w[0] < w[1]) && set.iter().all(|&x| x < seq.structure(i, j).size())
                    });
                if !shape_ok {
                    inner_violation = Some(format!("{b}: projection {p} does not fit block {i}"));
                    break 'check;
                }
            }
        }
    }
    let mut witness = None;
    if inner_violation.is_none() {
        let images: Vec<Vec<ProjectedBlock>> = phi.entries.iter().map(|(b, ps)| inner_image(b, ps, b.len())).collect();
        'nw: for (x, (b, ps)) in phi.entries.iter().enumerate() {
            for (y, (c, _)) in phi.entries.iter().enumerate() {
                if images[x] == images[y] {
                    continue;
                }
                if (0..b.len()).any(|l| inner_image(b, ps, l) == images[y]) {
                    witness = Some((b.clone(), c.clone()));
                    break 'nw;
                }
            }
        }
    }
    InnerReport {
        inner: inner_violation.is_none(),
        inner_violation,
        nash_williams: witness.is_none(),
        witness,
    }
}
