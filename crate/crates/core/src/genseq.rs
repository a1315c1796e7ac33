//! Generating sequences and finite approximations of the spaces they span.
//!
//! Coordinate `j` carries a chain `A_{0,j} <= A_{1,j} <= ...` starting from
//! the one-point member. Each step jointly embeds the previous structure with
//! the first class member (by size, then table order) that does not embed
//! yet, so every member is absorbed at a computable level.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::combi::{binomial, pow_sat, ProductOrUnit};
use crate::error::{Error, Result};
use crate::fraisse::{enumerate_members, FraisseClassSpec};
use crate::ramsey::{pigeonhole_check, DEFAULT_COLORING_BUDGET};
use crate::structures::{embeds, enumerate_copies, for_each_copy, Embedding, OrderedStructure, Tuple};

/// Classes used for an infinite family of coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassFamily {
    /// The same class at every coordinate.
    Uniform(FraisseClassSpec),
    /// Coordinate `j` uses ordered `(j + 3)`-clique-free graphs.
    CliqueFreeLadder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinates {
    Finite(Vec<FraisseClassSpec>),
    /// Level `k` has `k + 1` coordinates.
    Omega(ClassFamily),
}

impl Coordinates {
    pub fn class(&self, j: usize) -> FraisseClassSpec {
        match self {
            Coordinates::Finite(cs) => cs[j].clone(),
            Coordinates::Omega(ClassFamily::Uniform(c)) => c.clone(),
            Coordinates::Omega(ClassFamily::CliqueFreeLadder) => {
                FraisseClassSpec::clique_free(j + 3).expect("j + 3 >= 3")
            }
        }
    }

    pub fn width_at(&self, k: usize) -> usize {
        match self {
            Coordinates::Finite(cs) => cs.len(),
            Coordinates::Omega(_) => k + 1,
        }
    }

    /// Hypercube coordinates: `n` copies of the linear orders.
    pub fn hypercube(n: usize) -> Self {
        Coordinates::Finite(vec![FraisseClassSpec::linear_orders(); n])
    }
}

/// What step `k -> k + 1` of a chain absorbed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub embedding: Embedding,
    pub absorbed: Option<OrderedStructure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratingSequence {
    coordinates: Coordinates,
    /// `chains[j][k] = A_{k,j}`.
    chains: Vec<Vec<OrderedStructure>>,
    /// `steps[j][k]` embeds `A_{k,j}` into `A_{k+1,j}`.
    steps: Vec<Vec<Step>>,
    #[serde(skip)]
    cursors: Vec<Cursor>,
    #[serde(skip)]
    members: HashMap<(usize, usize), Vec<OrderedStructure>>,
}

#[derive(Clone, Copy, Debug, Default)]
struct Cursor {
    size: usize,
    index: usize,
    exhausted: bool,
}

/// Builds levels `0..=k_max`.
pub fn build_sequence(coordinates: Coordinates, k_max: usize, budget: u128) -> Result<GeneratingSequence> {
    if let Coordinates::Finite(cs) = &coordinates {
        if cs.is_empty() {
            return Err(Error::Domain("a generating sequence needs at least one coordinate".into()));
        }
    }
    let mut seq = GeneratingSequence {
        coordinates,
        chains: Vec::new(),
        steps: Vec::new(),
        cursors: Vec::new(),
        members: HashMap::new(),
    };
    seq.extend(k_max, budget)?;
    Ok(seq)
}

impl GeneratingSequence {
    pub fn coordinates(&self) -> &Coordinates {
        &self.coordinates
    }

    /// Number of built levels.
    pub fn levels(&self) -> usize {
        self.chains.first().map_or(0, Vec::len)
    }

    pub fn width_at(&self, k: usize) -> usize {
        self.coordinates.width_at(k)
    }

    /// `A_{k,j}`.
    pub fn structure(&self, k: usize, j: usize) -> &OrderedStructure {
        &self.chains[j][k]
    }

    /// The embedding of `A_{k,j}` into `A_{k+1,j}`.
    pub fn step(&self, k: usize, j: usize) -> &Step {
        &self.steps[j][k]
    }

    /// Builds further levels until `k_max` is present.
    pub fn extend(&mut self, k_max: usize, budget: u128) -> Result<()> {
        let chains_needed = match &self.coordinates {
            Coordinates::Finite(cs) => cs.len(),
            Coordinates::Omega(_) => k_max + 1,
        };
        let target = (k_max + 1).max(self.levels());
        while self.chains.len() < chains_needed {
            let j = self.chains.len();
            let start = self.coordinates.class(j).singleton();
            self.chains.push(vec![start]);
            self.steps.push(Vec::new());
            self.cursors.push(Cursor::default());
        }
        for j in 0..self.chains.len() {
            while self.chains[j].len() < target {
                self.grow(j, budget)?;
            }
        }
        Ok(())
    }

    fn grow(&mut self, j: usize, budget: u128) -> Result<()> {
        let class = self.coordinates.class(j);
        let current = self.chains[j].last().expect("chains start nonempty").clone();
        let next = self.next_unabsorbed(j, &class, &current, budget)?;
        let (w, step) = match next {
            None => (current.clone(), Step { embedding: Embedding::identity(current.size()), absorbed: None }),
            Some(t) => {
                let (w, g, _) = joint_embedding(&class, &current, &t, budget)?;
                (w, Step { embedding: g, absorbed: Some(t) })
            }
        };
        self.chains[j].push(w);
        self.steps[j].push(step);
        Ok(())
    }

    fn next_unabsorbed(
        &mut self,
        j: usize,
        class: &FraisseClassSpec,
        current: &OrderedStructure,
        budget: u128,
    ) -> Result<Option<OrderedStructure>> {
        let mut cur = self.cursors[j];
        if cur.exhausted {
            return Ok(None);
        }
        loop {
            let list = match self.members.entry((j, cur.size)) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(v) => v.insert(enumerate_members(class, cur.size, budget)?),
            };
            if list.is_empty() {
                // heredity: no larger members either
                cur.exhausted = true;
                self.cursors[j] = cur;
                return Ok(None);
            }
            while cur.index < list.len() {
                if !embeds(&list[cur.index], current)? {
                    let t = list[cur.index].clone();
                    self.cursors[j] = cur;
                    return Ok(Some(t));
                }
                cur.index += 1;
            }
            cur.size += 1;
            cur.index = 0;
        }
    }

    /// For each coordinate and each member up to `size_cap`, the first level
    /// at which it embeds (only levels where the coordinate exists count).
    pub fn cofinality_ledger(&self, size_cap: usize, budget: u128) -> Result<Vec<LedgerEntry>> {
        let mut out = Vec::new();
        for j in 0..self.chains.len() {
            let class = self.coordinates.class(j);
            let first_level = match self.coordinates {
                Coordinates::Finite(_) => 0,
                Coordinates::Omega(_) => j,
            };
            for size in 0..=size_cap {
                for member in enumerate_members(&class, size, budget)? {
                    let mut level = None;
                    for k in first_level..self.levels() {
                        if embeds(&member, &self.chains[j][k])? {
                            level = Some(k);
                            break;
                        }
                    }
                    out.push(LedgerEntry { coordinate: j, member, level });
                }
            }
        }
        Ok(out)
    }

    /// `r_d` of the maximal member: block `k` is `A_k` itself at depth `k`.
    pub fn maximal_prefix(&self, d: usize) -> Result<Approximation> {
        if d > self.levels() {
            return Err(Error::Domain(format!("prefix depth {d} exceeds the {} built levels", self.levels())));
        }
        Ok(Approximation {
            blocks: (0..d)
                .map(|k| Block {
                    depth: k,
                    sets: (0..self.width_at(k)).map(|j| (0..self.chains[j][k].size()).collect()).collect(),
                })
                .collect(),
        })
    }

    /// Checks that block `k` of `a` holds copies of `A_{k,j}` inside
    /// `A_{depth,j}` and that depths increase.
    pub fn validate_approximation(&self, a: &Approximation) -> Result<()> {
        for (k, blk) in a.blocks.iter().enumerate() {
            if k > 0 && blk.depth <= a.blocks[k - 1].depth {
                return Err(Error::Domain(format!("block {k}: depths must increase")));
            }
            if blk.depth >= self.levels() {
                return Err(Error::Domain(format!("block {k}: depth {} is not built", blk.depth)));
            }
            if blk.sets.len() != self.width_at(k) {
                return Err(Error::Domain(format!(
                    "block {k}: {} coordinates, expected {}",
                    blk.sets.len(),
                    self.width_at(k)
                )));
            }
            for (j, set) in blk.sets.iter().enumerate() {
                let host = &self.chains[j][blk.depth];
                let sub = host
                    .restrict(set)
                    .map_err(|e| Error::Domain(format!("block {k}, coordinate {j}: {e}")))?;
                if &sub != self.structure(k, j) {
                    return Err(Error::Domain(format!(
                        "block {k}, coordinate {j}: {set:?} is not a copy of A_{{{k},{j}}}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GeneratingSequence {
    /// Sequence manifest: every structure of every level and the embedding
    /// into the next level.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = match &self.coordinates {
            Coordinates::Finite(cs) => cs.len().to_string(),
            Coordinates::Omega(_) => "omega".to_string(),
        };
        writeln!(f, "sequence width={width} levels={}", self.levels())?;
        for k in 0..self.levels() {
            for j in 0..self.width_at(k).min(self.chains.len()) {
                writeln!(f, "level {k} coord {j}")?;
                write!(f, "{}", self.chains[j][k])?;
                if let Some(step) = self.steps[j].get(k) {
                    writeln!(f, "embed {}", step.embedding.map().iter().join(","))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub coordinate: usize,
    pub member: OrderedStructure,
    pub level: Option<usize>,
}

/// Jointly embeds `a` and `t` into a class member, adding as few points to
/// `a` as possible. New points are placed directly above the image of their
/// predecessor in `t`; tuples outside the two images are added only when no
/// placement works without them.
pub fn joint_embedding(
    class: &FraisseClassSpec,
    a: &OrderedStructure,
    t: &OrderedStructure,
    budget: u128,
) -> Result<(OrderedStructure, Embedding, Embedding)> {
    for with_extra in [false, true] {
        let mut spent: u128 = 0;
        for r in 1..=t.size() {
            for fresh in (0..t.size()).combinations(r) {
                let rest: Vec<usize> = (0..t.size()).filter(|i| !fresh.contains(i)).collect();
                let t_rest = t.restrict(&rest)?;
                let mut found = None;
                let mut err = None;
                for_each_copy(&t_rest, a, |c| {
                    match place(class, a, t, &fresh, &rest, c, with_extra, &mut spent, budget) {
                        Ok(Some(hit)) => {
                            found = Some(hit);
                            std::ops::ControlFlow::Break(())
                        }
                        Ok(None) => std::ops::ControlFlow::Continue(()),
                        Err(e) => {
                            err = Some(e);
                            std::ops::ControlFlow::Break(())
                        }
                    }
                })?;
                if let Some(e) = err {
                    return Err(e);
                }
                if let Some(hit) = found {
                    return Ok(hit);
                }
            }
        }
    }
    Err(Error::NotFound(format!("no joint embedding of the two structures in {}", class.name())))
}

#[allow(clippy::too_many_arguments)]
fn place(
    class: &FraisseClassSpec,
    a: &OrderedStructure,
    t: &OrderedStructure,
    fresh: &[usize],
    rest: &[usize],
    copy: &[usize],
    with_extra: bool,
    spent: &mut u128,
    budget: u128,
) -> Result<Option<(OrderedStructure, Embedding, Embedding)>> {
    // anchor[q] = image of the largest kept point below q
    let anchor = |q: usize| {
        let below = rest.iter().take_while(|&&i| i < q).count();
        below.checked_sub(1).map(|i| copy[i])
    };
    let mut a_map = vec![0; a.size()];
    let mut t_map = vec![0; t.size()];
    let mut next = 0;
    for &q in fresh.iter().filter(|&&q| anchor(q).is_none()) {
        t_map[q] = next;
        next += 1;
    }
    for p in 0..a.size() {
        a_map[p] = next;
        next += 1;
        for &q in fresh.iter().filter(|&&q| anchor(q) == Some(p)) {
            t_map[q] = next;
            next += 1;
        }
    }
    for (i, &r) in rest.iter().enumerate() {
        t_map[r] = a_map[copy[i]];
    }
    let mut tables = vec![BTreeSet::new(); a.signature().len()];
    a.push_tables_into(&a_map, &mut tables);
    t.push_tables_into(&t_map, &mut tables);
    let base = OrderedStructure::new(a.signature().clone(), next, tables.clone())?;
    let wrap = |w: OrderedStructure| -> Result<_> { Ok(Some((w, Embedding::new(a_map.clone())?, Embedding::new(t_map.clone())?))) };
    if !with_extra {
        *spent += 1;
        return if class.contains_unchecked(&base) { wrap(base) } else { Ok(None) };
    }
    let in_a: BTreeSet<usize> = a_map.iter().copied().collect();
    let in_t: BTreeSet<usize> = t_map.iter().copied().collect();
    let slots: Vec<(usize, Tuple)> = a
        .signature()
        .relations()
        .iter()
        .enumerate()
        .flat_map(|(rel, sym)| (0..next).combinations(sym.arity).map(move |tp| (rel, tp)))
        .filter(|(_, tp)| !tp.iter().all(|v| in_a.contains(v)) && !tp.iter().all(|v| in_t.contains(v)))
        .collect();
    let cost = pow_sat(2, slots.len() as u128);
    *spent = spent.saturating_add(cost);
    if *spent > budget {
        return Err(Error::budget("joint embedding fill-ins", *spent, budget));
    }
    for mask in 1..cost {
        let mut tb = tables.clone();
        for (bit, (rel, tp)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                crate::fraisse::insert_symmetric(&mut tb[*rel], tp);
            }
        }
        let w = OrderedStructure::new(a.signature().clone(), next, tb)?;
        if class.contains_unchecked(&w) {
            return wrap(w);
        }
    }
    Ok(None)
}

/// A block `<n, (B_j)>`: a depth and, per coordinate, a point set of
/// `A_{n,j}` carrying a copy of `A_{k,j}` for block position `k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Block {
    pub depth: usize,
    pub sets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Approximation {
    pub blocks: Vec<Block>,
}

impl Approximation {
    pub fn empty() -> Self {
        Approximation::default()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `r_n`: the first `n` blocks.
    pub fn r(&self, n: usize) -> Approximation {
        Approximation {
            blocks: self.blocks[..n.min(self.blocks.len())].to_vec(),
        }
    }

    /// `self ⊑ other`.
    pub fn is_initial_segment_of(&self, other: &Approximation) -> bool {
        self.len() <= other.len() && other.blocks[..self.len()] == self.blocks[..]
    }

    pub fn depth_vector(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.depth).collect()
    }
}

impl fmt::Display for Approximation {
    /// `0[0] 2[1][0,2]`; the empty approximation is `<>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("<>");
        }
        let s = self
            .blocks
            .iter()
            .map(|b| {
                let sets: String = b.sets.iter().map(|s| format!("[{}]", s.iter().join(","))).collect();
                format!("{}{}", b.depth, sets)
            })
            .join(" ");
        f.write_str(&s)
    }
}

impl FromStr for Approximation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "<>" {
            return Ok(Approximation::empty());
        }
        let bad = |detail: String| Error::Parse { line: 1, detail };
        let mut blocks = Vec::new();
        for tok in s.split_whitespace() {
            let open = tok.find('[').ok_or_else(|| bad(format!("block {tok:?} has no point sets")))?;
            let depth = tok[..open]
                .parse()
                .map_err(|_| bad(format!("bad depth in {tok:?}")))?;
            let body = &tok[open..];
            if !body.ends_with(']') {
                return Err(bad(format!("unterminated point set in {tok:?}")));
            }
            let mut sets = Vec::new();
            for part in body[1..body.len() - 1].split("][") {
                let set = if part.is_empty() {
                    Vec::new()
                } else {
                    part.split(',')
                        .map(|x| x.trim().parse().map_err(|_| bad(format!("bad point {x:?} in {tok:?}"))))
                        .collect::<Result<Vec<usize>>>()?
                };
                sets.push(set);
            }
            blocks.push(Block { depth, sets });
        }
        Ok(Approximation { blocks })
    }
}

/// `a <=_fin b`: every block of `a` sits inside the block of `b` with the
/// same depth, coordinatewise.
pub fn le_fin(a: &Approximation, b: &Approximation) -> bool {
    let mut l = 0;
    for blk in &a.blocks {
        while l < b.blocks.len() && b.blocks[l].depth < blk.depth {
            l += 1;
        }
        let Some(host) = b.blocks.get(l).filter(|h| h.depth == blk.depth) else {
            return false;
        };
        let contained = blk.sets.iter().enumerate().all(|(j, s)| {
            host.sets
                .get(j)
                .is_some_and(|hs| s.iter().all(|p| hs.binary_search(p).is_ok()))
        });
        if !contained {
            return false;
        }
        l += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Depth {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Infinite => f.write_str("infinity"),
        }
    }
}

/// Least `d` with `a <=_fin r_d(b)`.
pub fn depth_in(a: &Approximation, b: &Approximation) -> Depth {
    let Some(last) = a.blocks.last() else {
        return Depth::Finite(0);
    };
    if !le_fin(a, b) {
        return Depth::Infinite;
    }
    let idx = b.blocks.iter().position(|h| h.depth == last.depth).expect("le_fin found it");
    Depth::Finite(idx + 1)
}

/// All `n`-block approximations `<=_fin prefix`, ordered by depth vector and
/// then lexicographically by point sets.
pub fn enumerate_ar_n(seq: &GeneratingSequence, prefix: &Approximation, n: usize, budget: u128) -> Result<Vec<Approximation>> {
    let options = block_options(seq, prefix, n)?;
    let mut total: u128 = 0;
    for pick in (0..prefix.len()).combinations(n) {
        let c = pick
            .iter()
            .enumerate()
            .fold(1u128, |acc, (k, &l)| acc.saturating_mul(options[k][l].len() as u128));
        total = total.saturating_add(c);
    }
    if total > budget {
        return Err(Error::budget(format!("{n}-block approximations"), total, budget));
    }
    let mut out = Vec::with_capacity(total as usize);
    for pick in (0..prefix.len()).combinations(n) {
        let choices = pick.iter().enumerate().map(|(k, &l)| options[k][l].iter());
        for blocks in choices.multi_cartesian_product_or_unit() {
            out.push(Approximation {
                blocks: blocks.into_iter().cloned().collect(),
            });
        }
    }
    Ok(out)
}

/// `options[k][l]`: blocks of shape `k` inside block `l` of the prefix.
fn block_options(seq: &GeneratingSequence, prefix: &Approximation, n: usize) -> Result<Vec<Vec<Vec<Block>>>> {
    let mut options = Vec::with_capacity(n);
    for k in 0..n {
        let mut per_l = Vec::with_capacity(prefix.len());
        for (l, host) in prefix.blocks.iter().enumerate() {
            if l < k {
                per_l.push(Vec::new());
                continue;
            }
            let mut per_coord = Vec::new();
            for j in 0..seq.width_at(k) {
                let set = host
                    .sets
                    .get(j)
                    .ok_or_else(|| Error::Domain(format!("prefix block {l} lacks coordinate {j}")))?;
                let sub = seq.structure(host.depth, j).restrict(set)?;
                let copies = enumerate_copies(seq.structure(k, j), &sub)?.copies;
                per_coord.push(
                    copies
                        .into_iter()
                        .map(|c| c.iter().map(|&i| set[i]).collect::<Vec<usize>>())
                        .collect::<Vec<_>>(),
                );
            }
            per_l.push(
                per_coord
                    .iter()
                    .map(|c| c.iter())
                    .multi_cartesian_product_or_unit()
                    .map(|sets| Block {
                        depth: host.depth,
                        sets: sets.into_iter().cloned().collect(),
                    })
                    .collect(),
            );
        }
        options.push(per_l);
    }
    Ok(options)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// The truncated prefix is too shallow to exhibit a witness.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseCheck {
    pub clause: String,
    pub status: Status,
    pub instances: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub prefix_depth: usize,
    pub universe: usize,
    pub clauses: Vec<ClauseCheck>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.status != Status::Fail)
    }

    pub fn status_of(&self, clause: &str) -> Option<Status> {
        self.clauses.iter().find(|c| c.clause == clause).map(|c| c.status)
    }
}

fn clause(name: &str, fail: Option<String>, instances: u64, ok: &str) -> ClauseCheck {
    ClauseCheck {
        clause: name.to_string(),
        status: if fail.is_some() { Status::Fail } else { Status::Pass },
        instances,
        detail: fail.unwrap_or_else(|| ok.to_string()),
    }
}

/// Axiom checks on the approximations below `r_depth` of the maximal
/// member. Finite approximations stand in for members throughout.
pub fn check_axioms(seq: &GeneratingSequence, depth: usize, budget: u128) -> Result<AxiomReport> {
    let prefix = seq.maximal_prefix(depth)?;
    let mut universe = Vec::new();
    for n in 0..=depth {
        universe.extend(enumerate_ar_n(seq, &prefix, n, budget)?);
    }
    let u = universe.len();
    let pair_cost = (u as u128).saturating_mul(u as u128).saturating_mul((depth as u128 + 1).pow(2));
    let mut clauses = Vec::new();

    // A.1
    let fail = universe.iter().find(|c| !c.r(0).is_empty()).map(|c| format!("r_0({c}) is not empty"));
    clauses.push(clause("A.1(a)", fail, u as u64, "r_0 is empty everywhere"));

    let mut seen = BTreeSet::new();
    let mut fail = None;
    for c in &universe {
        if c.r(c.len()) != *c || !seen.insert(c.clone()) {
            fail = Some(format!("{c} is not separated by its approximations"));
            break;
        }
    }
    clauses.push(clause("A.1(b)", fail, u as u64, "distinct approximations differ at full length"));

    let mut fail = None;
    let mut inst = 0u64;
    'c: for c in &universe {
        for n in 0..=c.len() {
            let rn = c.r(n);
            inst += 1;
            if rn.len() != n || (0..n).any(|k| rn.r(k) != c.r(k)) {
                fail = Some(format!("r_{n}({c}) has the wrong length or prefixes"));
                break 'c;
            }
        }
    }
    clauses.push(clause("A.1(c)", fail, inst, "r_n has length n and agrees below n"));

    // A.2
    if pair_cost > budget {
        for name in ["A.2(a)", "A.2(b)", "A.2(c)"] {
            clauses.push(ClauseCheck {
                clause: name.to_string(),
                status: Status::Skipped,
                instances: 0,
                detail: format!("pair scan costs {pair_cost}, budget {budget}"),
            });
        }
    } else {
        let mut fail = None;
        if let Some(c) = universe.iter().find(|c| !le_fin(c, c)) {
            fail = Some(format!("{c} is not <=_fin itself"));
        }
        let mut below_total = 0u64;
        if fail.is_none() {
            for b in &universe {
                let filtered = universe.iter().filter(|a| le_fin(a, b)).count();
                let listed: usize = (0..=b.len())
                    .map(|n| enumerate_ar_n(seq, b, n, budget).map(|v| v.len()))
                    .sum::<Result<usize>>()?;
                below_total += filtered as u64;
                if filtered != listed {
                    fail = Some(format!("{b}: {filtered} approximations below by scan, {listed} by enumeration"));
                    break;
                }
            }
        }
        clauses.push(clause(
            "A.2(a)",
            fail,
            u as u64,
            &format!("{below_total} (a, b) pairs with a <=_fin b, all sets finite"),
        ));

        let mut fail = None;
        let mut inst = 0u64;
        'b: for c in &universe {
            for b in &universe {
                inst += 1;
                let blockwise = le_fin(c, b);
                let via_prefixes = (0..=c.len()).all(|n| (0..=b.len()).any(|m| le_fin(&c.r(n), &b.r(m))));
                if blockwise != via_prefixes {
                    fail = Some(format!("{c} vs {b}: blockwise {blockwise}, via prefixes {via_prefixes}"));
                    break 'b;
                }
            }
        }
        clauses.push(clause("A.2(b)", fail, inst, "order agrees with prefixwise <=_fin"));

        let mut fail = None;
        let mut inst = 0u64;
        'cc: for b in &universe {
            for c in universe.iter().filter(|c| le_fin(b, c)) {
                for p in 0..b.len() {
                    inst += 1;
                    let a = b.r(p);
                    if !(0..c.len()).any(|q| le_fin(&a, &c.r(q))) {
                        fail = Some(format!("a = {a}, b = {b}, c = {c}"));
                        break 'cc;
                    }
                }
            }
        }
        clauses.push(clause("A.2(c)", fail, inst, "proper prefixes stay below proper prefixes"));
    }

    // A.3(a): a one-block extension of a exists inside [depth(a), prefix]
    let mut fail = None;
    let mut inst = 0u64;
    let options = block_options(seq, &prefix, depth)?;
    for a in &universe {
        let Depth::Finite(p) = depth_in(a, &prefix) else { continue };
        let k = a.len();
        if k >= depth || p >= depth {
            continue;
        }
        inst += 1;
        let extends = (p..depth).any(|l| l >= k && !options[k][l].is_empty());
        if !extends {
            fail = Some(format!("{a} has no one-block extension below the prefix"));
            break;
        }
    }
    clauses.push(clause("A.3(a)", fail, inst, "every a of finite depth extends below the prefix"));
    clauses.push(ClauseCheck {
        clause: "A.3(b)".to_string(),
        status: Status::Skipped,
        instances: 0,
        detail: "needs members beyond the truncated prefix".to_string(),
    });

    clauses.push(check_a4_empty(seq, &prefix, budget)?);

    clauses.push(pigeonhole_clause(seq, budget)?);

    Ok(AxiomReport {
        prefix_depth: depth,
        universe: u,
        clauses,
    })
}

/// Clause (4) of the generating sequence at `k = 0, m = 1`: the least
/// built `n > 1` whose arrow holds.
fn pigeonhole_clause(seq: &GeneratingSequence, budget: u128) -> Result<ClauseCheck> {
    let name = "pigeonhole(0,1,n)".to_string();
    let mut tried = 0u64;
    for n in 2..seq.levels() {
        match pigeonhole_check(seq, 0, 1, n, budget.min(DEFAULT_COLORING_BUDGET)) {
            Ok(o) if o.holds => {
                return Ok(ClauseCheck {
                    clause: name,
                    status: Status::Pass,
                    instances: tried + 1,
                    detail: format!("holds at n = {n} over {} product copies", o.copies),
                })
            }
            Ok(_) => tried += 1,
            Err(Error::Budget { cost, budget, .. }) => {
                return Ok(ClauseCheck {
                    clause: name,
                    status: Status::Skipped,
                    instances: tried,
                    detail: format!("n = {n} costs {cost}, budget {budget}"),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ClauseCheck {
        clause: name,
        status: Status::Inconclusive,
        instances: tried,
        detail: format!("no n below {} levels", seq.levels()),
    })
}

/// A.4 for `a = <>`: every 2-coloring of the one-block approximations is
/// homogeneous on `r_1[<>, A]` for some two-block `A` below the prefix.
fn check_a4_empty(seq: &GeneratingSequence, prefix: &Approximation, budget: u128) -> Result<ClauseCheck> {
    let name = "A.4(a=<>)".to_string();
    if prefix.len() < 2 {
        return Ok(ClauseCheck {
            clause: name,
            status: Status::Skipped,
            instances: 0,
            detail: "needs a prefix of depth 2".to_string(),
        });
    }
    let ones = enumerate_ar_n(seq, prefix, 1, budget)?;
    let twos = enumerate_ar_n(seq, prefix, 2, budget)?;
    let cost = pow_sat(2, ones.len() as u128);
    if ones.len() >= 64 || cost.saturating_mul(twos.len() as u128) > budget {
        return Ok(ClauseCheck {
            clause: name,
            status: Status::Skipped,
            instances: 0,
            detail: format!("{cost} colorings of {} approximations exceed the budget", ones.len()),
        });
    }
    let below: Vec<u64> = twos
        .iter()
        .map(|big| {
            ones.iter()
                .enumerate()
                .filter(|(_, b)| le_fin(b, big))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    for colored in 0..cost as u64 {
        let ok = below.iter().any(|&s| s != 0 && (s & colored == s || s & colored == 0));
        if !ok {
            let members: Vec<String> = (0..ones.len())
                .filter(|i| colored >> i & 1 == 1)
                .map(|i| ones[i].to_string())
                .collect();
            return Ok(ClauseCheck {
                clause: name,
                status: Status::Inconclusive,
                instances: colored,
                detail: format!("no two-block A in the prefix is homogeneous for O = {{{}}}", members.join("; ")),
            });
        }
    }
    Ok(ClauseCheck {
        clause: name,
        status: Status::Pass,
        instances: cost as u64,
        detail: format!(
            "{} subsets of {} one-block approximations against {} candidates",
            cost,
            ones.len(),
            twos.len()
        ),
    })
}

/// Closed-form count of `n`-block approximations below `r_depth` of the
/// maximal member when every level is a single linear order of size `k + 1`.
pub fn hypercube_ar_count(width: usize, depth: usize, n: usize) -> u128 {
    (0..depth)
        .combinations(n)
        .map(|ds| {
            ds.iter()
                .enumerate()
                .map(|(k, &d)| binomial(d + 1, k + 1).pow(width as u32))
                .product::<u128>()
        })
        .sum()
}
