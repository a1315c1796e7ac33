//! Free, strong and order-prescribed free amalgamation.
//!
//! An order prescription `rho` is a `K x L` grid over `{<, =, >}` fixing how
//! each point of `X` sits against each point of `Y` in the amalgam. The free
//! amalgam carries the images of the relations of `X` and `Y` and nothing
//! else.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::combi::{pow_sat, ProductOrUnit};
use crate::error::{Error, Result};
use crate::fraisse::{insert_symmetric, members_up_to, FraisseClassSpec};
use crate::structures::{enumerate_copies, Embedding, OrderedStructure, Tuple};

pub const DEFAULT_AMALGAM_BUDGET: u128 = 1 << 22;

/// Two embeddings `e: Z -> X` and `f: Z -> Y` over a common signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamationProblem {
    pub z: OrderedStructure,
    pub x: OrderedStructure,
    pub y: OrderedStructure,
    pub e: Embedding,
    pub f: Embedding,
}

impl AmalgamationProblem {
    pub fn new(
        z: OrderedStructure,
        x: OrderedStructure,
        y: OrderedStructure,
        e: Vec<usize>,
        f: Vec<usize>,
    ) -> Result<Self> {
        let e = Embedding::new(e)?;
        let f = Embedding::new(f)?;
        if !e.is_embedding(&z, &x) {
            return Err(Error::Domain("e is not an embedding of Z into X".into()));
        }
        if !f.is_embedding(&z, &y) {
            return Err(Error::Domain("f is not an embedding of Z into Y".into()));
        }
        Ok(AmalgamationProblem { z, x, y, e, f })
    }

    /// Index of the Z-point whose image in X is `k`, if any.
    fn z_of_x(&self) -> Vec<Option<usize>> {
        let mut v = vec![None; self.x.size()];
        for (m, &k) in self.e.map().iter().enumerate() {
            v[k] = Some(m);
        }
        v
    }

    fn z_of_y(&self) -> Vec<Option<usize>> {
        let mut v = vec![None; self.y.size()];
        for (m, &l) in self.f.map().iter().enumerate() {
            v[l] = Some(m);
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    Lt,
    Eq,
    Gt,
}

impl Cmp {
    fn symbol(self) -> char {
        match self {
            Cmp::Lt => '<',
            Cmp::Eq => '=',
            Cmp::Gt => '>',
        }
    }

    fn of(a: usize, b: usize) -> Cmp {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Cmp::Lt,
            std::cmp::Ordering::Equal => Cmp::Eq,
            std::cmp::Ordering::Greater => Cmp::Gt,
        }
    }
}

/// A `K x L` grid over `{<, =, >}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderPrescription {
    rows: usize,
    cols: usize,
    cells: Vec<Cmp>,
}

impl OrderPrescription {
    pub fn new(rows: usize, cols: usize, cells: Vec<Cmp>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::Domain(format!(
                "{} cells for a {rows}x{cols} prescription",
                cells.len()
            )));
        }
        Ok(OrderPrescription { rows, cols, cells })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cmp) -> Self {
        let cells = (0..rows).flat_map(|k| (0..cols).map(move |l| (k, l))).map(|(k, l)| f(k, l)).collect();
        OrderPrescription { rows, cols, cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, k: usize, l: usize) -> Cmp {
        self.cells[k * self.cols + l]
    }
}

impl fmt::Display for OrderPrescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.rows {
            let row: String = (0..self.cols).map(|l| self.get(k, l).symbol()).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl FromStr for OrderPrescription {
    type Err = Error;

    /// Rows of `<`, `=`, `>` characters, one row per point of X. Rows may
    /// be separated by newlines or `/`.
    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s
            .split(['\n', '/'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .collect();
        let cols = rows.first().map_or(0, |r| r.chars().count());
        let mut cells = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            if r.chars().count() != cols {
                return Err(Error::Parse {
                    line: i + 1,
                    detail: format!("row has {} cells, expected {cols}", r.chars().count()),
                });
            }
            for c in r.chars() {
                cells.push(match c {
                    '<' => Cmp::Lt,
                    '=' => Cmp::Eq,
                    '>' => Cmp::Gt,
                    other => {
                        return Err(Error::Parse {
                            line: i + 1,
                            detail: format!("unexpected character {other:?}"),
                        })
                    }
                });
            }
        }
        OrderPrescription::new(rows.len(), cols, cells)
    }
}

/// Which prescription rule failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clause {
    /// Grid dimensions differ from `|X| x |Y|`.
    Shape,
    /// Matching Z-points are not marked `=`.
    A,
    /// Order around a Z-point is not respected.
    B,
    /// `=` outside the matching Z-point pairs.
    C,
    /// `<` / `>` regions are not monotone.
    D,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Shape => "shape",
            Clause::A => "a",
            Clause::B => "b",
            Clause::C => "c",
            Clause::D => "d",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: Clause,
    pub cell: Option<(usize, usize)>,
    pub detail: String,
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Error {
        Error::validation(format!("clause ({})", v.clause), v.detail)
    }
}

/// Checks clauses (a) to (d), reporting the first violated one.
///
/// (b) and (d) are checked in their closed forms: (b) also covers the row
/// and column of each Z-point, and (d) propagates to `k' <= k`, `l' >= l`.
/// Together with (c) this makes every accepted grid realisable by a merge.
pub fn validate_prescription(p: &AmalgamationProblem, rho: &OrderPrescription) -> std::result::Result<(), Violation> {
    let (kk, ll) = (p.x.size(), p.y.size());
    if rho.rows != kk || rho.cols != ll {
        return Err(Violation {
            clause: Clause::Shape,
            cell: None,
            detail: format!("grid is {}x{}, expected {kk}x{ll}", rho.rows, rho.cols),
        });
    }
    let pairs: Vec<(usize, usize)> = p.e.map().iter().copied().zip(p.f.map().iter().copied()).collect();
    let fail = |clause, k, l, detail: String| Violation {
        clause,
        cell: Some((k, l)),
        detail,
    };

    for &(k, l) in &pairs {
        if rho.get(k, l) != Cmp::Eq {
            return Err(fail(Clause::A, k, l, format!("Z-pair ({k},{l}) must be '='")));
        }
    }
    for &(km, lm) in &pairs {
        for k in 0..kk {
            for l in 0..ll {
                let want = if (k < km && l >= lm) || (k <= km && l > lm) {
                    Some(Cmp::Lt)
                } else if (k > km && l <= lm) || (k >= km && l < lm) {
                    Some(Cmp::Gt)
                } else {
                    None
                };
                if let Some(w) = want {
                    if rho.get(k, l) != w {
                        return Err(fail(
                            Clause::B,
                            k,
                            l,
                            format!("cell ({k},{l}) must be '{}' around Z-pair ({km},{lm})", w.symbol()),
                        ));
                    }
                }
            }
        }
    }
    for k in 0..kk {
        for l in 0..ll {
            if rho.get(k, l) == Cmp::Eq && !pairs.contains(&(k, l)) {
                return Err(fail(Clause::C, k, l, format!("'=' at ({k},{l}) is not a Z-pair")));
            }
        }
    }
    for k in 0..kk {
        for l in 0..ll {
            match rho.get(k, l) {
                Cmp::Lt => {
                    for k2 in 0..=k {
                        for l2 in l..ll {
                            if rho.get(k2, l2) != Cmp::Lt {
                                return Err(fail(
                                    Clause::D,
                                    k2,
                                    l2,
                                    format!("'<' at ({k},{l}) forces '<' at ({k2},{l2})"),
                                ));
                            }
                        }
                    }
                }
                Cmp::Gt => {
                    for k2 in k..kk {
                        for l2 in 0..=l {
                            if rho.get(k2, l2) != Cmp::Gt {
                                return Err(fail(
                                    Clause::D,
                                    k2,
                                    l2,
                                    format!("'>' at ({k},{l}) forces '>' at ({k2},{l2})"),
                                ));
                            }
                        }
                    }
                }
                Cmp::Eq => {}
            }
        }
    }
    Ok(())
}

/// An amalgam `W` with embeddings `g: X -> W`, `h: Y -> W` and the merge
/// map `sigma: K + L -> |W|` (`sigma[k] = g(k)`, `sigma[K + l] = h(l)`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamResult {
    pub w: OrderedStructure,
    pub g: Embedding,
    pub h: Embedding,
    pub sigma: Vec<usize>,
}

fn assemble(p: &AmalgamationProblem, g: Vec<usize>, h: Vec<usize>, size: usize) -> Result<AmalgamResult> {
    let mut tables = vec![BTreeSet::new(); p.x.signature().len()];
    p.x.push_tables_into(&g, &mut tables);
    p.y.push_tables_into(&h, &mut tables);
    let w = OrderedStructure::new(p.x.signature().clone(), size, tables)?;
    let sigma = g.iter().chain(&h).copied().collect();
    Ok(AmalgamResult {
        w,
        g: Embedding::new(g)?,
        h: Embedding::new(h)?,
        sigma,
    })
}

/// Builds the free amalgam whose points are ordered as `rho` prescribes.
pub fn free_amalgamate(p: &AmalgamationProblem, rho: &OrderPrescription) -> Result<AmalgamResult> {
    validate_prescription(p, rho)?;
    let (kk, ll) = (p.x.size(), p.y.size());
    let (mut g, mut h) = (Vec::with_capacity(kk), Vec::with_capacity(ll));
    let (mut i, mut j, mut next) = (0, 0, 0);
    while i < kk || j < ll {
        let step = if i == kk {
            Cmp::Gt
        } else if j == ll {
            Cmp::Lt
        } else {
            rho.get(i, j)
        };
        match step {
            Cmp::Lt => {
                g.push(next);
                i += 1;
            }
            Cmp::Gt => {
                h.push(next);
                j += 1;
            }
            Cmp::Eq => {
                g.push(next);
                h.push(next);
                i += 1;
                j += 1;
            }
        }
        next += 1;
    }
    assemble(p, g, h, next)
}

/// The prescription that identifies Z and, between consecutive Z-points,
/// places the remaining X-points before the remaining Y-points.
pub fn default_prescription(p: &AmalgamationProblem) -> OrderPrescription {
    let zx = p.z_of_x();
    let zy = p.z_of_y();
    let gap_x = gaps(&zx);
    let gap_y = gaps(&zy);
    OrderPrescription::from_fn(p.x.size(), p.y.size(), |k, l| match (zx[k], zy[l]) {
        (Some(a), Some(b)) => Cmp::of(a, b),
        (Some(a), None) => {
            if a < gap_y[l] {
                Cmp::Lt
            } else {
                Cmp::Gt
            }
        }
        (None, Some(b)) => {
            if gap_x[k] <= b {
                Cmp::Lt
            } else {
                Cmp::Gt
            }
        }
        (None, None) => {
            if gap_x[k] <= gap_y[l] {
                Cmp::Lt
            } else {
                Cmp::Gt
            }
        }
    })
}

/// For each point, the number of Z-points strictly below it.
fn gaps(z_of: &[Option<usize>]) -> Vec<usize> {
    let mut seen = 0;
    z_of.iter()
        .map(|z| {
            let g = seen;
            if z.is_some() {
                seen += 1;
            }
            g
        })
        .collect()
}

/// Strong free amalgam with the default prescription.
pub fn strong_amalgamate(p: &AmalgamationProblem) -> AmalgamResult {
    free_amalgamate(p, &default_prescription(p)).expect("default prescription is valid")
}

/// Every valid prescription, obtained by interleaving the non-Z points of X
/// and Y inside each gap between consecutive Z-points.
pub fn enumerate_prescriptions(p: &AmalgamationProblem) -> Vec<OrderPrescription> {
    let zx = p.z_of_x();
    let zy = p.z_of_y();
    let gx = gaps(&zx);
    let gy = gaps(&zy);
    let m = p.z.size();
    // per gap: the free X and Y points it contains
    let per_gap: Vec<(Vec<usize>, Vec<usize>)> = (0..=m)
        .map(|gap| {
            (
                (0..p.x.size()).filter(|&k| zx[k].is_none() && gx[k] == gap).collect(),
                (0..p.y.size()).filter(|&l| zy[l].is_none() && gy[l] == gap).collect(),
            )
        })
        .collect();
    // interleavings of each gap: positions (among a+b) taken by X-points
    let choices: Vec<Vec<Vec<usize>>> = per_gap
        .iter()
        .map(|(xs, ys)| (0..xs.len() + ys.len()).combinations(xs.len()).collect())
        .collect();

    let mut out = Vec::new();
    for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product_or_unit() {
        // build the merged order as a list of (x?, y?) slots
        let mut xpos = vec![0usize; p.x.size()];
        let mut ypos = vec![0usize; p.y.size()];
        let mut slot = 0;
        for gap in 0..=m {
            let (xs, ys) = &per_gap[gap];
            let chosen = pick[gap];
            let (mut xi, mut yi) = (0, 0);
            for pos in 0..xs.len() + ys.len() {
                if chosen.contains(&pos) {
                    xpos[xs[xi]] = slot;
                    xi += 1;
                } else {
                    ypos[ys[yi]] = slot;
                    yi += 1;
                }
                slot += 1;
            }
            if gap < m {
                xpos[p.e.apply(gap)] = slot;
                ypos[p.f.apply(gap)] = slot;
                slot += 1;
            }
        }
        out.push(OrderPrescription::from_fn(p.x.size(), p.y.size(), |k, l| {
            Cmp::of(xpos[k], ypos[l])
        }));
    }
    out
}

/// Independently re-checks the four conclusions of an order-prescribed
/// free amalgam, plus commutation, strength and freeness.
pub fn check_conclusions(
    p: &AmalgamationProblem,
    rho: &OrderPrescription,
    r: &AmalgamResult,
) -> std::result::Result<(), String> {
    let (kk, ll) = (p.x.size(), p.y.size());
    if r.sigma.len() != kk + ll {
        return Err(format!("sigma has {} entries, expected {}", r.sigma.len(), kk + ll));
    }
    let (sx, sy) = r.sigma.split_at(kk);
    if sx.windows(2).any(|w| w[0] >= w[1]) || sy.windows(2).any(|w| w[0] >= w[1]) {
        return Err("(1) sigma is not increasing on both parts".into());
    }
    if sx != r.g.map() || sy != r.h.map() {
        return Err("sigma disagrees with g and h".into());
    }
    let wx = r.w.restrict(sx).map_err(|e| e.to_string())?;
    let wy = r.w.restrict(sy).map_err(|e| e.to_string())?;
    if wx != p.x || wy != p.y {
        return Err("(2) W does not restrict to X and Y on the images".into());
    }
    let zx: Vec<usize> = p.e.map().iter().map(|&k| sx[k]).collect();
    let zy: Vec<usize> = p.f.map().iter().map(|&l| sy[l]).collect();
    if zx != zy {
        return Err("(3) Z-points are not identified".into());
    }
    if r.w.restrict(&zx).map_err(|e| e.to_string())? != p.z {
        return Err("(3) W does not restrict to Z on the shared image".into());
    }
    for k in 0..kk {
        for l in 0..ll {
            if Cmp::of(sx[k], sy[l]) != rho.get(k, l) {
                return Err(format!("(4) order of x{k} and y{l} differs from the prescription"));
            }
        }
    }
    let shared = sx.iter().filter(|v| sy.contains(v)).count();
    if shared != p.z.size() {
        return Err(format!("images share {shared} points, expected {}", p.z.size()));
    }
    let in_x: BTreeSet<usize> = sx.iter().copied().collect();
    let in_y: BTreeSet<usize> = sy.iter().copied().collect();
    for table in r.w.tables() {
        for t in table {
            if !(t.iter().all(|v| in_x.contains(v)) || t.iter().all(|v| in_y.contains(v))) {
                return Err(format!("tuple {t:?} mixes points outside both images"));
            }
        }
    }
    if r.w.size() != in_x.union(&in_y).count() {
        return Err("W has points outside both images".into());
    }
    Ok(())
}

/// Searches for any amalgam of `p` inside `class` (not necessarily strong or
/// free). Merges may identify extra points; tuples mixing the two images are
/// tried from the empty set upwards.
pub fn find_amalgam(
    class: &FraisseClassSpec,
    p: &AmalgamationProblem,
    budget: u128,
) -> Result<Option<AmalgamResult>> {
    let zx = p.z_of_x();
    let zy = p.z_of_y();
    let mut merges = Vec::new();
    collect_merges(p, &zx, &zy, 0, 0, 0, &mut Vec::new(), &mut Vec::new(), &mut merges);
    let mut spent: u128 = 0;
    // smallest amalgams first
    merges.sort_by_key(|(_, _, size)| *size);
    for (g, h, size) in merges {
        let overlap_x: Vec<usize> = (0..g.len()).filter(|&k| h.contains(&g[k])).collect();
        let overlap_y: Vec<usize> = (0..h.len()).filter(|&l| g.contains(&h[l])).collect();
        if p.x.restrict(&overlap_x)? != p.y.restrict(&overlap_y)? {
            continue;
        }
        let base = assemble(p, g.clone(), h.clone(), size)?;
        let slots = cross_slots(&base.w, &g, &h);
        let cost = pow_sat(2, slots.len() as u128);
        spent = spent.saturating_add(cost);
        if spent > budget {
            return Err(Error::budget("amalgam candidates", spent, budget));
        }
        for mask in 0..cost {
            let mut cand = base.clone();
            if mask > 0 {
                let mut tables = cand.w.tables().to_vec();
                for (bit, (rel, t)) in slots.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        insert_symmetric(&mut tables[*rel], t);
                    }
                }
                cand.w = OrderedStructure::new(cand.w.signature().clone(), size, tables)?;
            }
            if class.contains_unchecked(&cand.w) {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

/// Increasing tuples not contained in either image.
fn cross_slots(w: &OrderedStructure, g: &[usize], h: &[usize]) -> Vec<(usize, Tuple)> {
    let in_g: BTreeSet<usize> = g.iter().copied().collect();
    let in_h: BTreeSet<usize> = h.iter().copied().collect();
    let mut slots = Vec::new();
    for (rel, sym) in w.signature().relations().iter().enumerate() {
        for t in (0..w.size()).combinations(sym.arity) {
            if !t.iter().all(|v| in_g.contains(v)) && !t.iter().all(|v| in_h.contains(v)) {
                slots.push((rel, t));
            }
        }
    }
    slots
}

#[allow(clippy::too_many_arguments)]
fn collect_merges(
    p: &AmalgamationProblem,
    zx: &[Option<usize>],
    zy: &[Option<usize>],
    i: usize,
    j: usize,
    next: usize,
    g: &mut Vec<usize>,
    h: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, Vec<usize>, usize)>,
) {
    let (kk, ll) = (p.x.size(), p.y.size());
    if i == kk && j == ll {
        out.push((g.clone(), h.clone(), next));
        return;
    }
    // identify x_i with y_j: Z-partners must match exactly
    if i < kk && j < ll && zx[i] == zy[j] {
        g.push(next);
        h.push(next);
        collect_merges(p, zx, zy, i + 1, j + 1, next + 1, g, h, out);
        g.pop();
        h.pop();
    }
    // a Z-image may only be placed together with its partner
    if i < kk && zx[i].is_none() {
        g.push(next);
        collect_merges(p, zx, zy, i + 1, j, next + 1, g, h, out);
        g.pop();
    }
    if j < ll && zy[j].is_none() {
        h.push(next);
        collect_merges(p, zx, zy, i, j + 1, next + 1, g, h, out);
        h.pop();
    }
}

/// A failing instance of the order-prescribed free amalgamation check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpfapWitness {
    pub problem: AmalgamationProblem,
    pub prescription: OrderPrescription,
    pub amalgam: OrderedStructure,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpfapReport {
    pub class: String,
    pub size_cap: usize,
    pub pass: bool,
    pub triples: u64,
    pub amalgams: u64,
    pub witness: Option<OpfapWitness>,
}

/// For every `Z, X, Y` in the class up to `size_cap`, every pair of
/// embeddings and every valid prescription, builds the free amalgam, checks
/// its conclusions and its membership. Stops at the first failure in
/// lexicographic `(Z, X, Y)` order.
pub fn verify_opfap(class: &FraisseClassSpec, size_cap: usize, budget: u128) -> Result<OpfapReport> {
    let members = members_up_to(class, size_cap, budget)?;
    let mut report = OpfapReport {
        class: class.name().to_string(),
        size_cap,
        pass: true,
        triples: 0,
        amalgams: 0,
        witness: None,
    };
    for z in &members {
        for x in members.iter().filter(|x| x.size() >= z.size()) {
            let ex = enumerate_copies(z, x)?.copies;
            if ex.is_empty() {
                continue;
            }
            for y in members.iter().filter(|y| y.size() >= z.size()) {
                let fy = enumerate_copies(z, y)?.copies;
                if fy.is_empty() {
                    continue;
                }
                report.triples += 1;
                for e in &ex {
                    for f in &fy {
                        let p = AmalgamationProblem::new(z.clone(), x.clone(), y.clone(), e.clone(), f.clone())?;
                        for rho in enumerate_prescriptions(&p) {
                            report.amalgams += 1;
                            if report.amalgams as u128 > budget {
                                return Err(Error::budget("free amalgams", report.amalgams as u128, budget));
                            }
                            let r = free_amalgamate(&p, &rho)?;
                            let reason = match check_conclusions(&p, &rho, &r) {
                                Err(why) => Some(format!("conclusion check failed: {why}")),
                                Ok(()) if !class.contains_unchecked(&r.w) => {
                                    Some("free amalgam is not in the class".to_string())
                                }
                                Ok(()) => None,
                            };
                            if let Some(reason) = reason {
                                report.pass = false;
                                report.witness = Some(OpfapWitness {
                                    problem: p,
                                    prescription: rho,
                                    amalgam: r.w,
                                    reason,
                                });
                                return Ok(report);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::DEFAULT_CANDIDATE_BUDGET;

    fn graph(n: usize, e: &[(usize, usize)]) -> OrderedStructure {
        OrderedStructure::graph(n, e).unwrap()
    }

    fn lt_grid(rows: usize, cols: usize) -> OrderPrescription {
        OrderPrescription::from_fn(rows, cols, |_, _| Cmp::Lt)
    }

    #[test]
    fn two_points_over_nothing() {
        let p = AmalgamationProblem::new(graph(0, &[]), graph(1, &[]), graph(1, &[]), vec![], vec![]).unwrap();
        let r = free_amalgamate(&p, &lt_grid(1, 1)).unwrap();
        assert_eq!(r.w, graph(2, &[]));
        assert_eq!(r.sigma, vec![0, 1]);
    }

    #[test]
    fn two_edges_over_a_shared_point_stay_free() {
        let p = AmalgamationProblem::new(graph(1, &[]), graph(2, &[(0, 1)]), graph(2, &[(0, 1)]), vec![0], vec![0])
            .unwrap();
        let rho: OrderPrescription = "=<\n><".parse().unwrap();
        let r = free_amalgamate(&p, &rho).unwrap();
        assert_eq!(r.w, graph(3, &[(0, 1), (0, 2)]));
        assert!(!r.w.has_tuple(0, &[1, 2]));
        check_conclusions(&p, &rho, &r).unwrap();
    }

    #[test]
    fn prescription_clauses() {
        let p = AmalgamationProblem::new(graph(1, &[]), graph(2, &[(0, 1)]), graph(2, &[(0, 1)]), vec![0], vec![0])
            .unwrap();
        assert!(validate_prescription(&p, &default_prescription(&p)).is_ok());
        let bad_c: OrderPrescription = "=<\n>=".parse().unwrap();
        assert_eq!(validate_prescription(&p, &bad_c).unwrap_err().clause, Clause::C);
        let bad_a: OrderPrescription = "<<\n><".parse().unwrap();
        assert_eq!(validate_prescription(&p, &bad_a).unwrap_err().clause, Clause::A);
        let bad_b: OrderPrescription = "=>\n><".parse().unwrap();
        assert_eq!(validate_prescription(&p, &bad_b).unwrap_err().clause, Clause::B);
        assert!(matches!(
            free_amalgamate(&p, &bad_c),
            Err(Error::Validation { .. })
        ));

        // 2x2 crossing over an empty Z: x1 < y0 but x0 > y1
        let q = AmalgamationProblem::new(graph(0, &[]), graph(2, &[]), graph(2, &[]), vec![], vec![]).unwrap();
        let crossing: OrderPrescription = "<>\n<<".parse().unwrap();
        assert_eq!(validate_prescription(&q, &crossing).unwrap_err().clause, Clause::D);
        let shape: OrderPrescription = "<<".parse().unwrap();
        assert_eq!(validate_prescription(&q, &shape).unwrap_err().clause, Clause::Shape);
    }

    #[test]
    fn strong_amalgam_places_x_before_y_in_each_gap() {
        let p = AmalgamationProblem::new(graph(1, &[]), graph(3, &[(0, 1)]), graph(2, &[(0, 1)]), vec![1], vec![0])
            .unwrap();
        let r = strong_amalgamate(&p);
        // x0 < z < x2, y1 ; x2 before y1
        assert_eq!(r.g.map(), &[0, 1, 2]);
        assert_eq!(r.h.map(), &[1, 3]);
        assert_eq!(r.w, graph(4, &[(0, 1), (1, 3)]));
        check_conclusions(&p, &default_prescription(&p), &r).unwrap();
    }

    /// Brute force over all 3^(K*L) grids agrees with the gap-interleaving
    /// enumeration.
    #[test]
    fn prescription_enumeration_matches_brute_force() {
        let cases = [
            (graph(0, &[]), graph(2, &[]), graph(2, &[(0, 1)]), vec![], vec![]),
            (graph(1, &[]), graph(3, &[]), graph(2, &[]), vec![1], vec![0]),
            (graph(1, &[]), graph(2, &[]), graph(3, &[]), vec![0], vec![2]),
            (graph(2, &[]), graph(3, &[]), graph(3, &[]), vec![0, 2], vec![1, 2]),
            (graph(0, &[]), graph(3, &[]), graph(1, &[]), vec![], vec![]),
        ];
        for (z, x, y, e, f) in cases {
            let p = AmalgamationProblem::new(z, x, y, e, f).unwrap();
            let (kk, ll) = (p.x.size(), p.y.size());
            let mut brute = BTreeSet::new();
            for code in 0..3usize.pow((kk * ll) as u32) {
                let mut c = code;
                let cells = (0..kk * ll)
                    .map(|_| {
                        let v = [Cmp::Lt, Cmp::Eq, Cmp::Gt][c % 3];
                        c /= 3;
                        v
                    })
                    .collect();
                let rho = OrderPrescription::new(kk, ll, cells).unwrap();
                if validate_prescription(&p, &rho).is_ok() {
                    brute.insert(rho.to_string());
                }
            }
            let listed: BTreeSet<String> = enumerate_prescriptions(&p).iter().map(|r| r.to_string()).collect();
            assert_eq!(brute, listed);
            for rho in enumerate_prescriptions(&p) {
                let r = free_amalgamate(&p, &rho).unwrap();
                check_conclusions(&p, &rho, &r).unwrap();
            }
        }
    }

    #[test]
    fn opfap_for_graph_classes() {
        let r = verify_opfap(&FraisseClassSpec::ordered_graphs(), 2, DEFAULT_AMALGAM_BUDGET).unwrap();
        assert!(r.pass && r.amalgams > 0);
        let r = verify_opfap(&FraisseClassSpec::linear_orders(), 3, DEFAULT_AMALGAM_BUDGET).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn opfap_fails_when_the_non_edge_is_forbidden() {
        let class = FraisseClassSpec::forbidden("no-non-edge", vec![graph(2, &[])]).unwrap();
        let r = verify_opfap(&class, 3, DEFAULT_AMALGAM_BUDGET).unwrap();
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert_eq!(w.problem.z.size(), 0);
        assert_eq!((w.problem.x.size(), w.problem.y.size()), (1, 1));
        assert_eq!(w.amalgam, graph(2, &[]));
    }

    #[test]
    fn general_amalgam_search_uses_cross_edges_when_needed() {
        let class = FraisseClassSpec::complete_graphs();
        let p = AmalgamationProblem::new(graph(0, &[]), graph(1, &[]), graph(1, &[]), vec![], vec![]).unwrap();
        let r = find_amalgam(&class, &p, DEFAULT_CANDIDATE_BUDGET).unwrap().unwrap();
        // identification gives the one-point amalgam
        assert_eq!(r.w.size(), 1);
        let p = AmalgamationProblem::new(
            graph(1, &[]),
            graph(2, &[(0, 1)]),
            graph(2, &[(0, 1)]),
            vec![0],
            vec![0],
        )
        .unwrap();
        let r = find_amalgam(&class, &p, DEFAULT_CANDIDATE_BUDGET).unwrap().unwrap();
        assert!(class.contains(&r.w).unwrap());
        assert_eq!(r.g.map()[0], r.h.map()[0]);
    }
}
