//! Exact partition arrows `(C_j) -> ((B_j))^{(A_j)}_k` over finite products.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::combi::pow_sat;
use crate::error::{Error, Result};
use crate::fraisse::{enumerate_members, FraisseClassSpec, DEFAULT_CANDIDATE_BUDGET};
use crate::genseq::GeneratingSequence;
use crate::structures::{embeds, enumerate_copies, OrderedStructure};

pub const DEFAULT_COLORING_BUDGET: u128 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowCoordinate {
    pub a: OrderedStructure,
    pub b: OrderedStructure,
    pub c: OrderedStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowQuery {
    pub coordinates: Vec<ArrowCoordinate>,
    pub colors: usize,
}

impl ArrowQuery {
    /// Checks `A_j <= B_j <= C_j` for every coordinate.
    pub fn new(coordinates: Vec<ArrowCoordinate>, colors: usize) -> Result<Self> {
        if colors == 0 {
            return Err(Error::Domain("at least one color is required".into()));
        }
        if coordinates.is_empty() {
            return Err(Error::Domain("a query needs at least one coordinate".into()));
        }
        for (j, co) in coordinates.iter().enumerate() {
            if !embeds(&co.a, &co.b)? {
                return Err(Error::Domain(format!("coordinate {j}: A does not embed into B")));
            }
            if !embeds(&co.b, &co.c)? {
                return Err(Error::Domain(format!("coordinate {j}: B does not embed into C")));
            }
        }
        Ok(ArrowQuery { coordinates, colors })
    }

    pub fn single(a: OrderedStructure, b: OrderedStructure, c: OrderedStructure, colors: usize) -> Result<Self> {
        ArrowQuery::new(vec![ArrowCoordinate { a, b, c }], colors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowOutcome {
    pub holds: bool,
    /// Number of product A-copies being colored.
    pub copies: u128,
    /// Number of colorings `k^N` covered by the search.
    pub colorings: u128,
    /// Search nodes visited.
    pub nodes: u64,
    /// A coloring (indexed like the lexicographic product copy list) with
    /// no monochromatic B-copy, when the arrow fails.
    pub bad_coloring: Option<Vec<usize>>,
}

/// Product copies of `A` inside `C` and, for every product copy of `B`,
/// the product A-copies it contains.
struct ProductInstance {
    copies: usize,
    // constraints grouped by their largest member
    ending_at: Vec<Vec<Vec<u32>>>,
}

fn build_instance(q: &ArrowQuery) -> Result<ProductInstance> {
    let mut radix = Vec::new();
    let mut per_coord_sets: Vec<Vec<Vec<usize>>> = Vec::new();
    for co in &q.coordinates {
        let a_in_c = enumerate_copies(&co.a, &co.c)?.copies;
        let index: HashMap<&[usize], usize> = a_in_c.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
        let a_in_b = enumerate_copies(&co.a, &co.b)?.copies;
        let b_in_c = enumerate_copies(&co.b, &co.c)?.copies;
        let sets = b_in_c
            .iter()
            .map(|bp| {
                let mut s: Vec<usize> = a_in_b
                    .iter()
                    .map(|x| {
                        let img: Vec<usize> = x.iter().map(|&i| bp[i]).collect();
                        index[img.as_slice()]
                    })
                    .collect();
                s.sort_unstable();
                s
            })
            .collect();
        radix.push(a_in_c.len());
        per_coord_sets.push(sets);
    }
    let copies = radix.iter().product::<usize>();
    let mut ending_at = vec![Vec::new(); copies];
    for choice in per_coord_sets.iter().map(|s| s.iter()).multi_cartesian_product() {
        let mut members: Vec<u32> = choice
            .iter()
            .map(|s| s.iter())
            .multi_cartesian_product()
            .map(|idx| {
                idx.iter()
                    .zip(&radix)
                    .fold(0usize, |acc, (&&i, &r)| acc * r + i) as u32
            })
            .collect();
        members.sort_unstable();
        if let Some(&last) = members.last() {
            ending_at[last as usize].push(members);
        }
    }
    Ok(ProductInstance { copies, ending_at })
}

/// Decides the arrow exactly. Colorings are explored depth first over the
/// lexicographic product copy list; a branch is cut as soon as some B-copy
/// becomes monochromatic. Color symmetry is broken by letting each copy use
/// at most one color beyond those already used.
pub fn arrow_check(q: &ArrowQuery, budget: u128) -> Result<ArrowOutcome> {
    let inst = build_instance(q)?;
    let n = inst.copies as u128;
    let cost = pow_sat(q.colors as u128, n);
    if cost > budget {
        return Err(Error::budget(
            format!("{}-colorings of {n} product copies", q.colors),
            cost,
            budget,
        ));
    }
    let mut coloring = vec![0usize; inst.copies];
    let mut nodes = 0u64;
    let found = search(&inst, q.colors, 0, 0, &mut coloring, &mut nodes);
    Ok(ArrowOutcome {
        holds: !found,
        copies: n,
        colorings: cost,
        nodes,
        bad_coloring: found.then_some(coloring),
    })
}

/// True when a coloring avoiding monochromatic B-copies extends the prefix.
fn search(inst: &ProductInstance, k: usize, pos: usize, used: usize, coloring: &mut [usize], nodes: &mut u64) -> bool {
    if pos == inst.copies {
        return true;
    }
    for color in 0..k.min(used + 1) {
        *nodes += 1;
        coloring[pos] = color;
        let mono = inst.ending_at[pos]
            .iter()
            .any(|set| set.iter().all(|&i| coloring[i as usize] == color));
        if !mono && search(inst, k, pos + 1, used.max(color + 1), coloring, nodes) {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub c: Vec<OrderedStructure>,
    pub sizes: Vec<usize>,
    pub candidates_checked: u64,
}

/// Smallest `(C_j)` in the diagonal schedule (total size first, then size
/// vectors and members in lexicographic order) for which the arrow holds.
pub fn find_witness(
    classes: &[FraisseClassSpec],
    a: &[OrderedStructure],
    b: &[OrderedStructure],
    colors: usize,
    size_cap: usize,
    budget: u128,
) -> Result<Option<WitnessResult>> {
    let dims = classes.len();
    if dims == 0 || a.len() != dims || b.len() != dims {
        return Err(Error::Domain("classes, A and B must have the same nonzero length".into()));
    }
    for j in 0..dims {
        if !classes[j].contains(&a[j])? || !classes[j].contains(&b[j])? {
            return Err(Error::Domain(format!("coordinate {j}: A or B is not in the class")));
        }
    }
    let lows: Vec<usize> = b.iter().map(|s| s.size()).collect();
    if lows.iter().any(|&l| l > size_cap) {
        return Ok(None);
    }
    let mut members: HashMap<(usize, usize), Vec<OrderedStructure>> = HashMap::new();
    let mut checked = 0u64;
    let lo_sum: usize = lows.iter().sum();
    for total in lo_sum..=size_cap * dims {
        let vectors = lows
            .iter()
            .map(|&l| l..=size_cap)
            .multi_cartesian_product()
            .filter(|v| v.iter().sum::<usize>() == total);
        for sizes in vectors {
            for (j, &s) in sizes.iter().enumerate() {
                if !members.contains_key(&(j, s)) {
                    let mut ms = enumerate_members(&classes[j], s, DEFAULT_CANDIDATE_BUDGET)?;
                    let mut keep = Vec::with_capacity(ms.len());
                    for m in ms.drain(..) {
                        if embeds(&b[j], &m)? {
                            keep.push(m);
                        }
                    }
                    members.insert((j, s), keep);
                }
            }
            let pools: Vec<&Vec<OrderedStructure>> = sizes.iter().enumerate().map(|(j, &s)| &members[&(j, s)]).collect();
            for cs in pools.iter().map(|p| p.iter()).multi_cartesian_product() {
                let coords = (0..dims)
                    .map(|j| ArrowCoordinate {
                        a: a[j].clone(),
                        b: b[j].clone(),
                        c: cs[j].clone(),
                    })
                    .collect();
                let q = ArrowQuery::new(coords, colors)?;
                checked += 1;
                if arrow_check(&q, budget)?.holds {
                    return Ok(Some(WitnessResult {
                        c: cs.into_iter().cloned().collect(),
                        sizes,
                        candidates_checked: checked,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Checks clause (4) of a generating sequence at `(k, m, n)` with two colors:
/// `(A_{n,j}) -> ((A_{m,j}))^{(A_{k,j})}` over the coordinates of level `k`.
pub fn pigeonhole_check(seq: &GeneratingSequence, k: usize, m: usize, n: usize, budget: u128) -> Result<ArrowOutcome> {
    if !(k < m && m < n) {
        return Err(Error::Domain(format!("need k < m < n, got {k}, {m}, {n}")));
    }
    if n >= seq.levels() {
        return Err(Error::Domain(format!(
            "level {n} is not built; the sequence has {} levels",
            seq.levels()
        )));
    }
    let coords = (0..seq.width_at(k))
        .map(|j| ArrowCoordinate {
            a: seq.structure(k, j).clone(),
            b: seq.structure(m, j).clone(),
            c: seq.structure(n, j).clone(),
        })
        .collect();
    arrow_check(&ArrowQuery::new(coords, 2)?, budget)
}
