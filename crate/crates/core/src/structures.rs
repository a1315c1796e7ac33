//! Finite ordered relational structures.
//!
//! Every structure lives on the universe `{0, .., size-1}` with its natural
//! order, so two structures over one signature are order-isomorphic exactly
//! when they are equal. Relation tables are sorted tuple sets.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A relation symbol with its arity. The linear order is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// The non-order relation symbols of an ordered relational language.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
}

impl Signature {
    pub fn new(relations: Vec<RelationSymbol>) -> Result<Self> {
        for (i, r) in relations.iter().enumerate() {
            if r.arity == 0 {
                return Err(Error::Domain(format!("relation {} has arity 0", r.name)));
            }
            if r.name.is_empty() || r.name.contains(|c: char| c.is_whitespace() || c == '/' || c == ':') {
                return Err(Error::Domain(format!("invalid relation name {:?}", r.name)));
            }
            if relations[..i].iter().any(|q| q.name == r.name) {
                return Err(Error::Domain(format!("duplicate relation symbol {}", r.name)));
            }
        }
        Ok(Signature { relations })
    }

    /// Only the order.
    pub fn empty() -> Self {
        Signature::default()
    }

    /// One binary edge relation `E`.
    pub fn graph() -> Self {
        Signature {
            relations: vec![RelationSymbol {
                name: "E".to_string(),
                arity: 2,
            }],
        }
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }
}

pub type Tuple = Vec<usize>;

/// A finite structure on `{0, .., size-1}` with the natural order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedStructure {
    signature: Signature,
    size: usize,
    tables: Vec<BTreeSet<Tuple>>,
}

impl OrderedStructure {
    pub fn new(signature: Signature, size: usize, tables: Vec<BTreeSet<Tuple>>) -> Result<Self> {
        if tables.len() != signature.len() {
            return Err(Error::Domain(format!(
                "{} relation tables given for a signature with {} symbols",
                tables.len(),
                signature.len()
            )));
        }
        for (sym, table) in signature.relations.iter().zip(&tables) {
            for t in table {
                if t.len() != sym.arity {
                    return Err(Error::Domain(format!(
                        "tuple {:?} does not match arity {} of {}",
                        t, sym.arity, sym.name
                    )));
                }
                if let Some(&bad) = t.iter().find(|&&i| i >= size) {
                    return Err(Error::Domain(format!(
                        "index {bad} in relation {} is outside a universe of size {size}",
                        sym.name
                    )));
                }
            }
        }
        Ok(OrderedStructure {
            signature,
            size,
            tables,
        })
    }

    /// The structure of the given size with every relation empty.
    pub fn discrete(signature: Signature, size: usize) -> Self {
        let tables = vec![BTreeSet::new(); signature.len()];
        OrderedStructure {
            signature,
            size,
            tables,
        }
    }

    pub fn linear_order(size: usize) -> Self {
        Self::discrete(Signature::empty(), size)
    }

    /// An ordered graph; each edge is stored in both orientations.
    pub fn graph(size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut table = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Domain(format!("loop at vertex {a}")));
            }
            table.insert(vec![a, b]);
            table.insert(vec![b, a]);
        }
        Self::new(Signature::graph(), size, vec![table])
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tables(&self) -> &[BTreeSet<Tuple>] {
        &self.tables
    }

    pub fn table(&self, rel: usize) -> &BTreeSet<Tuple> {
        &self.tables[rel]
    }

    pub fn has_tuple(&self, rel: usize, tuple: &[usize]) -> bool {
        self.tables[rel].contains(tuple)
    }

    /// Total number of tuples over all relations.
    pub fn tuple_count(&self) -> usize {
        self.tables.iter().map(BTreeSet::len).sum()
    }

    /// Induced substructure on a strictly increasing index set, relabelled
    /// to `{0, .., idx.len()-1}`.
    pub fn restrict(&self, idx: &[usize]) -> Result<OrderedStructure> {
        check_increasing(idx, self.size)?;
        let mut pos = vec![usize::MAX; self.size];
        for (p, &i) in idx.iter().enumerate() {
            pos[i] = p;
        }
        let tables = self
            .tables
            .iter()
            .map(|table| {
                table
                    .iter()
                    .filter(|t| t.iter().all(|&i| pos[i] != usize::MAX))
                    .map(|t| t.iter().map(|&i| pos[i]).collect())
                    .collect()
            })
            .collect();
        Ok(OrderedStructure {
            signature: self.signature.clone(),
            size: idx.len(),
            tables,
        })
    }

    /// Adds the image of this structure's tables under `map` to `out`.
    pub(crate) fn push_tables_into(&self, map: &[usize], out: &mut [BTreeSet<Tuple>]) {
        for (table, dst) in self.tables.iter().zip(out.iter_mut()) {
            for t in table {
                dst.insert(t.iter().map(|&i| map[i]).collect());
            }
        }
    }

    fn same_signature(&self, other: &OrderedStructure) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::Domain("signature mismatch".to_string()));
        }
        Ok(())
    }
}

pub(crate) fn check_increasing(idx: &[usize], size: usize) -> Result<()> {
    for w in idx.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Domain(format!("index set {idx:?} is not strictly increasing")));
        }
    }
    if let Some(&last) = idx.last() {
        if last >= size {
            return Err(Error::Domain(format!(
                "index {last} is outside a universe of size {size}"
            )));
        }
    }
    Ok(())
}

/// A strictly increasing map that preserves and reflects every relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Embedding(Vec<usize>);

impl Embedding {
    /// Builds the map after checking that it is strictly increasing.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!("map {map:?} is not strictly increasing")));
        }
        Ok(Embedding(map))
    }

    pub fn identity(n: usize) -> Self {
        Embedding((0..n).collect())
    }

    pub fn map(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &Embedding) -> Embedding {
        Embedding(self.0.iter().map(|&i| other.0[i]).collect())
    }

    /// True iff this map is an embedding of `src` into `dst`.
    pub fn is_embedding(&self, src: &OrderedStructure, dst: &OrderedStructure) -> bool {
        if src.signature != dst.signature || self.0.len() != src.size {
            return false;
        }
        if self.0.windows(2).any(|w| w[0] >= w[1]) || self.0.last().is_some_and(|&l| l >= dst.size) {
            return false;
        }
        induces(dst, &self.0, src)
    }
}

impl From<Embedding> for Vec<usize> {
    fn from(e: Embedding) -> Self {
        e.0
    }
}

/// True iff `b` restricted to the increasing index list `subset` equals `a`.
fn induces(b: &OrderedStructure, subset: &[usize], a: &OrderedStructure) -> bool {
    let mut pos = vec![usize::MAX; b.size];
    for (p, &i) in subset.iter().enumerate() {
        pos[i] = p;
    }
    let mut buf = Vec::new();
    for (ta, tb) in a.tables.iter().zip(&b.tables) {
        for t in ta {
            buf.clear();
            buf.extend(t.iter().map(|&i| subset[i]));
            if !tb.contains(buf.as_slice()) {
                return false;
            }
        }
        let inside = tb.iter().filter(|t| t.iter().all(|&i| pos[i] != usize::MAX)).count();
        if inside != ta.len() {
            return false;
        }
    }
    true
}

/// All copies of a pattern inside a base structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopySet {
    pub base: OrderedStructure,
    pub pattern: OrderedStructure,
    pub copies: Vec<Vec<usize>>,
}

impl CopySet {
    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }
}

/// Visits every copy of `a` in `b` in lexicographic order of index sets.
///
/// Points are chosen left to right; after each choice every tuple that
/// involves the newest point is compared, so partial maps that already fail
/// to be induced are abandoned early.
pub fn for_each_copy<F>(a: &OrderedStructure, b: &OrderedStructure, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    a.same_signature(b)?;
    if a.size > b.size {
        return Ok(());
    }
    let arities: Vec<usize> = a.signature.relations.iter().map(|r| r.arity).collect();
    let mut chosen = Vec::with_capacity(a.size);
    let _ = copy_search(a, b, &arities, &mut chosen, &mut visit);
    Ok(())
}

fn copy_search<F>(
    a: &OrderedStructure,
    b: &OrderedStructure,
    arities: &[usize],
    chosen: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let i = chosen.len();
    if i == a.size {
        return visit(chosen);
    }
    let start = chosen.last().map_or(0, |&l| l + 1);
    let end = b.size - (a.size - i);
    for v in start..=end {
        chosen.push(v);
        if consistent_at(a, b, arities, chosen) {
            copy_search(a, b, arities, chosen, visit)?;
        }
        chosen.pop();
    }
    ControlFlow::Continue(())
}

/// Checks every tuple over the chosen positions that contains the last one.
fn consistent_at(a: &OrderedStructure, b: &OrderedStructure, arities: &[usize], chosen: &[usize]) -> bool {
    let last = chosen.len() - 1;
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (rel, &arity) in arities.iter().enumerate() {
        let mut ok = true;
        for_each_tuple_touching(last, arity, &mut src, &mut |t| {
            dst.clear();
            dst.extend(t.iter().map(|&p| chosen[p]));
            if a.tables[rel].contains(t) != b.tables[rel].contains(dst.as_slice()) {
                ok = false;
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Every tuple in `{0..=top}^arity` that mentions `top` at least once.
pub(crate) fn for_each_tuple_touching<F>(top: usize, arity: usize, buf: &mut Vec<usize>, f: &mut F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    buf.clear();
    buf.resize(arity, 0);
    loop {
        if buf.contains(&top) && f(buf).is_break() {
            return;
        }
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if buf[k] < top {
                buf[k] += 1;
                for x in &mut buf[k + 1..] {
                    *x = 0;
                }
                break;
            }
        }
    }
}

/// All copies of `a` in `b`, lexicographically ordered.
pub fn enumerate_copies(a: &OrderedStructure, b: &OrderedStructure) -> Result<CopySet> {
    let mut copies = Vec::new();
    for_each_copy(a, b, |c| {
        copies.push(c.to_vec());
        ControlFlow::Continue(())
    })?;
    Ok(CopySet {
        base: b.clone(),
        pattern: a.clone(),
        copies,
    })
}

/// Number of copies of `a` in `b`.
pub fn count_copies(a: &OrderedStructure, b: &OrderedStructure) -> Result<usize> {
    let mut n = 0;
    for_each_copy(a, b, |_| {
        n += 1;
        ControlFlow::Continue(())
    })?;
    Ok(n)
}

/// The lexicographically least copy of `a` in `b`.
pub fn leftmost_copy(a: &OrderedStructure, b: &OrderedStructure) -> Result<Embedding> {
    let mut found = None;
    for_each_copy(a, b, |c| {
        found = Some(c.to_vec());
        ControlFlow::Break(())
    })?;
    found
        .map(Embedding)
        .ok_or_else(|| Error::NotFound(format!("no copy of a {}-point structure", a.size)))
}

/// True iff `a` embeds into `b`.
pub fn embeds(a: &OrderedStructure, b: &OrderedStructure) -> Result<bool> {
    match leftmost_copy(a, b) {
        Ok(_) => Ok(true),
        Err(Error::NotFound(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Which side contributes the next point of a merged universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

/// Disjoint union with no cross relations; `interleaving` lists, from the
/// bottom of the merged order upwards, which side each point comes from.
pub fn disjoint_sum(
    x: &OrderedStructure,
    y: &OrderedStructure,
    interleaving: &[Side],
) -> Result<(OrderedStructure, Embedding, Embedding)> {
    x.same_signature(y)?;
    let xs = interleaving.iter().filter(|&&s| s == Side::X).count();
    if interleaving.len() != x.size + y.size || xs != x.size {
        return Err(Error::Domain(format!(
            "interleaving of length {} with {} x-points does not merge {} and {} points",
            interleaving.len(),
            xs,
            x.size,
            y.size
        )));
    }
    let mut gx = Vec::with_capacity(x.size);
    let mut gy = Vec::with_capacity(y.size);
    for (p, side) in interleaving.iter().enumerate() {
        match side {
            Side::X => gx.push(p),
            Side::Y => gy.push(p),
        }
    }
    let mut tables = vec![BTreeSet::new(); x.signature.len()];
    x.push_tables_into(&gx, &mut tables);
    y.push_tables_into(&gy, &mut tables);
    let w = OrderedStructure {
        signature: x.signature.clone(),
        size: interleaving.len(),
        tables,
    };
    Ok((w, Embedding(gx), Embedding(gy)))
}

impl fmt::Display for OrderedStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "size={}", self.size)?;
        for (sym, table) in self.signature.relations.iter().zip(&self.tables) {
            write!(f, "rel {}/{}:", sym.name, sym.arity)?;
            for t in table {
                write!(f, " (")?;
                for (k, i) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{i}")?;
                }
                write!(f, ")")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for OrderedStructure {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            detail: "missing size header".to_string(),
        })?;
        let size = header
            .trim()
            .strip_prefix("size=")
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                detail: format!("expected `size=<n>`, got {header:?}"),
            })?;
        let mut symbols = Vec::new();
        let mut tables = Vec::new();
        for (no, line) in lines {
            let line_no = no + 1;
            let perr = |detail: String| Error::Parse { line: line_no, detail };
            let rest = line
                .trim()
                .strip_prefix("rel ")
                .ok_or_else(|| perr(format!("expected `rel`, got {line:?}")))?;
            let (head, body) = rest
                .split_once(':')
                .ok_or_else(|| perr("missing `:` after relation symbol".to_string()))?;
            let (name, arity) = head
                .split_once('/')
                .ok_or_else(|| perr("expected `<name>/<arity>`".to_string()))?;
            let arity: usize = arity
                .parse()
                .map_err(|_| perr(format!("bad arity {arity:?}")))?;
            let mut table = BTreeSet::new();
            for tok in body.split_whitespace() {
                let inner = tok
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| perr(format!("bad tuple {tok:?}")))?;
                let t = inner
                    .split(',')
                    .map(|s| s.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| perr(format!("bad tuple {tok:?}")))?;
                table.insert(t);
            }
            symbols.push(RelationSymbol {
                name: name.to_string(),
                arity,
            });
            tables.push(table);
        }
        OrderedStructure::new(Signature::new(symbols)?, size, tables)
    }
}
