//! Subcommand definitions and handlers.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Subcommand, ValueEnum};
use itertools::Itertools;
use serde_json::json;

use ramsey_forge::amalgamation::{
    default_prescription, free_amalgamate, verify_opfap, AmalgamationProblem, OrderPrescription,
    DEFAULT_AMALGAM_BUDGET,
};
use ramsey_forge::canonize::{
    block_canonize, er_canonize, er_threshold, format_copy_tuple, parse_copy_tuple, parse_partition, planted_er,
    product_canonize, product_domain, validate_front, validate_inner_nw, EquivalenceTable, FrontMode, InnerMap,
    Projection,
};
use ramsey_forge::combi::k_subsets;
use ramsey_forge::degrees::{degree_formula_j1, degree_formula_j2, degree_report, test_conjecture};
use ramsey_forge::fraisse::{
    check_class_axioms, enumerate_members, iso_count, IsoCountRecord, DEFAULT_CANDIDATE_BUDGET,
};
use ramsey_forge::genseq::{
    build_sequence, check_axioms, enumerate_ar_n, Approximation, Coordinates, GeneratingSequence,
};
use ramsey_forge::ramsey::{
    arrow_check, find_witness, pigeonhole_check, ArrowCoordinate, ArrowOutcome, ArrowQuery, DEFAULT_COLORING_BUDGET,
};
use ramsey_forge::OrderedStructure;

use crate::cache::{resolve_dir, Cache};
use crate::input::{parse_class, parse_index_list, parse_structure, CoordArgs};
use crate::output::{Report, Table};
use crate::GlobalArgs;

fn one_line(s: &OrderedStructure) -> String {
    s.to_string().trim_end().replace('\n', "; ")
}

fn cache(g: &GlobalArgs) -> Option<Cache> {
    if g.no_cache {
        return None;
    }
    resolve_dir(g.cache_dir.as_deref()).map(Cache::new)
}

fn cached(
    g: &GlobalArgs,
    request: serde_json::Value,
    compute: impl FnOnce() -> Result<serde_json::Value>,
) -> Result<serde_json::Value> {
    match cache(g) {
        Some(c) => c.get_or_compute(&request, compute),
        None => compute(),
    }
}

fn structures(args: &[String]) -> Result<Vec<OrderedStructure>> {
    args.iter().map(|s| parse_structure(s)).collect()
}

fn build(coords: &CoordArgs, levels: usize, budget: u128) -> Result<GeneratingSequence> {
    if levels == 0 {
        bail!("at least one level is needed");
    }
    Ok(build_sequence(coords.coordinates()?, levels - 1, budget)?)
}

// ---------------------------------------------------------------- classes

#[derive(Subcommand, Debug)]
pub enum ClassesCmd {
    /// List every member of one size.
    Enumerate {
        #[arg(long)]
        class: String,
        #[arg(long)]
        size: usize,
    },
    /// Number of members of one size, or of every size up to it.
    IsoCount {
        #[arg(long)]
        class: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        up_to: bool,
    },
    /// Exhaustive heredity, joint embedding and amalgamation checks.
    Check {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
}

impl ClassesCmd {
    pub fn name(&self) -> &'static str {
        match self {
            ClassesCmd::Enumerate { .. } => "enumerate",
            ClassesCmd::IsoCount { .. } => "iso-count",
            ClassesCmd::Check { .. } => "check",
        }
    }
}

pub fn run_classes(cmd: &ClassesCmd, g: &GlobalArgs) -> Result<Report> {
    let budget = g.budget(DEFAULT_CANDIDATE_BUDGET);
    match cmd {
        ClassesCmd::Enumerate { class, size } => {
            let class = parse_class(class)?;
            let request = json!({ "op": "classes-enumerate", "class": class, "size": size });
            let value = cached(g, request, || {
                let members: Vec<String> = enumerate_members(&class, *size, budget)?
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                Ok(json!({ "class": class.name(), "size": size, "count": members.len(), "members": members }))
            })?;
            let members: Vec<String> = serde_json::from_value(value["members"].clone())?;
            let mut text = format!("# {} members of {} with {} points\n", members.len(), class.name(), size);
            let mut table = Table::new(&["index", "structure"]);
            for (i, m) in members.iter().enumerate() {
                text.push('\n');
                text.push_str(m);
                table.row(vec![i.to_string(), m.trim_end().replace('\n', "; ")]);
            }
            Ok(Report::new("classes enumerate", value, text)?.with_table(table))
        }
        ClassesCmd::IsoCount { class, size, up_to } => {
            let class = parse_class(class)?;
            let sizes = if *up_to { 0..=*size } else { *size..=*size };
            let mut records = Vec::new();
            for s in sizes {
                let request = json!({ "op": "classes-iso-count", "class": class, "size": s });
                let v = cached(g, request, || Ok(serde_json::to_value(iso_count(&class, s, budget)?)?))?;
                records.push(serde_json::from_value::<IsoCountRecord>(v)?);
            }
            let text = if *up_to {
                records.iter().map(|r| format!("Iso({}, {}) = {}\n", r.class, r.size, r.count)).collect()
            } else {
                records[0].count.to_string()
            };
            let mut table = Table::new(&IsoCountRecord::csv_header().split(',').collect_vec());
            for r in &records {
                table.row(r.csv_row().split(',').map(str::to_string).collect());
            }
            Ok(Report::new("classes iso-count", &records, text)?.with_table(table))
        }
        ClassesCmd::Check { class, size_cap } => {
            let class = parse_class(class)?;
            let r = check_class_axioms(&class, *size_cap, budget)?;
            let mut text = format!("{} up to {} points: {}\n", r.class, r.size_cap, pass_word(r.pass()));
            for (name, o) in [("heredity", &r.heredity), ("joint embedding", &r.joint_embedding), ("amalgamation", &r.amalgamation)] {
                writeln!(text, "  {name}: {} ({} instances)", pass_word(o.pass), o.instances)?;
                if let Some(w) = &o.witness {
                    writeln!(text, "    {}", w.replace('\n', "\n    "))?;
                }
            }
            Ok(Report::new("classes check", &r, text)?)
        }
    }
}

fn pass_word(p: bool) -> &'static str {
    if p {
        "pass"
    } else {
        "FAIL"
    }
}

// ------------------------------------------------------------- amalgamate

#[derive(Subcommand, Debug)]
pub enum AmalgamateCmd {
    /// Free amalgam of `e: Z -> X` and `f: Z -> Y` in a prescribed order.
    Free {
        #[arg(long)]
        z: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Image of Z in X, e.g. `0,2`; `-` when Z is empty.
        #[arg(long)]
        e: String,
        #[arg(long)]
        f: String,
        /// Rows of `<`, `=`, `>` separated by `/`; the default puts X-points
        /// before Y-points between consecutive Z-points.
        #[arg(long)]
        prescription: Option<String>,
    },
    /// Checks order-prescribed free amalgamation for all small members.
    VerifyOpfap {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 3)]
        size_cap: usize,
    },
}

impl AmalgamateCmd {
    pub fn name(&self) -> &'static str {
        match self {
            AmalgamateCmd::Free { .. } => "free",
            AmalgamateCmd::VerifyOpfap { .. } => "verify-opfap",
        }
    }
}

pub fn run_amalgamate(cmd: &AmalgamateCmd, g: &GlobalArgs) -> Result<Report> {
    match cmd {
        AmalgamateCmd::Free { z, x, y, e, f, prescription } => {
            let p = AmalgamationProblem::new(
                parse_structure(z)?,
                parse_structure(x)?,
                parse_structure(y)?,
                parse_index_list(e)?,
                parse_index_list(f)?,
            )?;
            let rho: OrderPrescription = match prescription {
                Some(s) => s.parse()?,
                None => default_prescription(&p),
            };
            let r = free_amalgamate(&p, &rho)?;
            let text = format!(
                "prescription:\n{rho}amalgam:\n{}g: {}\nh: {}\nsigma: {}\n",
                r.w,
                r.g.map().iter().join(","),
                r.h.map().iter().join(","),
                r.sigma.iter().join(",")
            );
            let value = json!({ "prescription": rho.to_string().trim_end().replace('\n', "/"), "amalgam": r });
            Ok(Report::new("amalgamate free", value, text)?)
        }
        AmalgamateCmd::VerifyOpfap { class, size_cap } => {
            let class = parse_class(class)?;
            let r = verify_opfap(&class, *size_cap, g.budget(DEFAULT_AMALGAM_BUDGET))?;
            let mut text = format!(
                "{} up to {} points: {} ({} triples, {} amalgams)\n",
                r.class,
                r.size_cap,
                pass_word(r.pass),
                r.triples,
                r.amalgams
            );
            if let Some(w) = &r.witness {
                writeln!(text, "reason: {}", w.reason)?;
                write!(text, "Z:\n{}X:\n{}Y:\n{}prescription:\n{}", w.problem.z, w.problem.x, w.problem.y, w.prescription)?;
            }
            Ok(Report::new("amalgamate verify-opfap", &r, text)?)
        }
    }
}

// ----------------------------------------------------------------- ramsey

#[derive(Subcommand, Debug)]
pub enum RamseyCmd {
    /// Decides C -> (B)^A_k by exhaustive search; repeat --a/--b/--c for
    /// product coordinates.
    Check {
        #[arg(long, required = true)]
        a: Vec<String>,
        #[arg(long, required = true)]
        b: Vec<String>,
        #[arg(long, required = true)]
        c: Vec<String>,
        #[arg(long, default_value_t = 2)]
        colors: usize,
    },
    /// Smallest class members C with C -> (B)^A_k.
    Witness {
        #[arg(long, required = true)]
        class: Vec<String>,
        #[arg(long, required = true)]
        a: Vec<String>,
        #[arg(long, required = true)]
        b: Vec<String>,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 6)]
        size_cap: usize,
    },
    /// Product pigeonhole `A_n -> (A_m)^{A_k}_2` on a generating sequence.
    Pigeonhole {
        #[command(flatten)]
        coords: CoordArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

impl RamseyCmd {
    pub fn name(&self) -> &'static str {
        match self {
            RamseyCmd::Check { .. } => "check",
            RamseyCmd::Witness { .. } => "witness",
            RamseyCmd::Pigeonhole { .. } => "pigeonhole",
        }
    }
}

fn arrow_text(o: &ArrowOutcome) -> String {
    let mut t = format!(
        "arrow {}\ncopies: {}\ncolorings: {}\nnodes: {}\n",
        if o.holds { "holds" } else { "fails" },
        o.copies,
        o.colorings,
        o.nodes
    );
    if let Some(c) = &o.bad_coloring {
        let _ = writeln!(t, "bad coloring: {}", c.iter().join(""));
    }
    t
}

pub fn run_ramsey(cmd: &RamseyCmd, g: &GlobalArgs) -> Result<Report> {
    let budget = g.budget(DEFAULT_COLORING_BUDGET);
    match cmd {
        RamseyCmd::Check { a, b, c, colors } => {
            if a.len() != b.len() || b.len() != c.len() {
                bail!("--a, --b and --c must be given the same number of times");
            }
            let coords = structures(a)?
                .into_iter()
                .zip(structures(b)?)
                .zip(structures(c)?)
                .map(|((a, b), c)| ArrowCoordinate { a, b, c })
                .collect();
            let o = arrow_check(&ArrowQuery::new(coords, *colors)?, budget)?;
            Ok(Report::new("ramsey check", &o, arrow_text(&o))?)
        }
        RamseyCmd::Witness { class, a, b, colors, size_cap } => {
            let classes: Vec<_> = class.iter().map(|c| parse_class(c)).collect::<Result<_>>()?;
            match find_witness(&classes, &structures(a)?, &structures(b)?, *colors, *size_cap, budget)? {
                Some(w) => {
                    let mut text = format!("sizes: {}\ncandidates checked: {}\n", w.sizes.iter().join(","), w.candidates_checked);
                    for (j, c) in w.c.iter().enumerate() {
                        write!(text, "C_{j}:\n{c}")?;
                    }
                    Ok(Report::new("ramsey witness", &w, text)?)
                }
                None => Ok(Report::new(
                    "ramsey witness",
                    json!(null),
                    format!("no witness with at most {size_cap} points per coordinate"),
                )?
                .not_found()),
            }
        }
        RamseyCmd::Pigeonhole { coords, k, m, n } => {
            let seq = build(coords, n + 2, DEFAULT_CANDIDATE_BUDGET)?;
            let o = pigeonhole_check(&seq, *k, *m, *n, budget)?;
            Ok(Report::new("ramsey pigeonhole", &o, arrow_text(&o))?)
        }
    }
}

// ----------------------------------------------------------------- genseq

#[derive(Subcommand, Debug)]
pub enum GenseqCmd {
    /// Builds levels `0..levels` and prints the manifest.
    Build {
        #[command(flatten)]
        coords: CoordArgs,
        #[arg(long)]
        levels: usize,
        /// Also report the first level embedding each member up to this size.
        #[arg(long)]
        ledger_cap: Option<usize>,
    },
    /// Lists the n-block approximations below a prefix.
    ArEnum {
        #[command(flatten)]
        coords: CoordArgs,
        /// Depth of the maximal prefix.
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        n: usize,
        /// An explicit prefix such as `0[0] 2[1]`, instead of the maximal one.
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Checks the space axioms on a truncated prefix.
    CheckAxioms {
        #[command(flatten)]
        coords: CoordArgs,
        #[arg(long)]
        depth: usize,
    },
}

impl GenseqCmd {
    pub fn name(&self) -> &'static str {
        match self {
            GenseqCmd::Build { .. } => "build",
            GenseqCmd::ArEnum { .. } => "ar-enum",
            GenseqCmd::CheckAxioms { .. } => "check-axioms",
        }
    }
}

pub fn run_genseq(cmd: &GenseqCmd, g: &GlobalArgs) -> Result<Report> {
    let budget = g.budget(DEFAULT_CANDIDATE_BUDGET);
    match cmd {
        GenseqCmd::Build { coords, levels, ledger_cap } => {
            let seq = build(coords, *levels, budget)?;
            let mut text = seq.to_string();
            let ledger = match ledger_cap {
                Some(cap) => {
                    let l = seq.cofinality_ledger(*cap, budget)?;
                    text.push_str("ledger\n");
                    for e in &l {
                        let level = e.level.map_or("-".to_string(), |x| x.to_string());
                        writeln!(text, "coord {} level {level}: {}", e.coordinate, one_line(&e.member))?;
                    }
                    Some(l)
                }
                None => None,
            };
            Ok(Report::new("genseq build", json!({ "sequence": seq, "ledger": ledger }), text)?)
        }
        GenseqCmd::ArEnum { coords, depth, n, prefix } => {
            let seq = build(coords, (*depth).max(1), budget)?;
            let prefix = match prefix {
                Some(p) => {
                    let a: Approximation = p.parse()?;
                    seq.validate_approximation(&a)?;
                    a
                }
                None => seq.maximal_prefix(*depth)?,
            };
            let list = enumerate_ar_n(&seq, &prefix, *n, budget)?;
            let mut text = format!("# {} approximations of length {n} below {prefix}\n", list.len());
            let mut table = Table::new(&["index", "approximation"]);
            for (i, a) in list.iter().enumerate() {
                writeln!(text, "{a}")?;
                table.row(vec![i.to_string(), a.to_string()]);
            }
            let value = json!({
                "prefix": prefix.to_string(),
                "n": n,
                "count": list.len(),
                "approximations": list.iter().map(ToString::to_string).collect_vec(),
            });
            Ok(Report::new("genseq ar-enum", value, text)?.with_table(table))
        }
        GenseqCmd::CheckAxioms { coords, depth } => {
            let seq = build(coords, depth + 1, budget)?;
            let r = check_axioms(&seq, *depth, budget)?;
            let mut text = format!("depth {} universe {}: {}\n", r.prefix_depth, r.universe, pass_word(r.pass()));
            let mut table = Table::new(&["clause", "status", "instances", "detail"]);
            for c in &r.clauses {
                let status = format!("{:?}", c.status).to_lowercase();
                writeln!(text, "  {:<20} {:<12} {:>8}  {}", c.clause, status, c.instances, c.detail)?;
                table.row(vec![c.clause.clone(), status, c.instances.to_string(), c.detail.clone()]);
            }
            Ok(Report::new("genseq check-axioms", &r, text)?.with_table(table))
        }
    }
}

// --------------------------------------------------------------- canonize

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BlockPlant {
    Equality,
    Depth,
    Trivial,
    FirstBlock,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nw,
    Sperner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InnerArg {
    Empty,
    Depth,
    Identity,
}

#[derive(Subcommand, Debug)]
pub enum CanonizeCmd {
    /// Finds `s` of size `l` on which a relation on `[m]^n` is some `E_I`.
    #[command(group(ArgGroup::new("source").required(true).args(["input", "plant"])))]
    Er {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        /// Partition file: one class per line, subsets like `0,2` separated by `;`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Use `E_I` for this index set, e.g. `0` or `0,1`; `-` for the empty set.
        #[arg(long, allow_hyphen_values = true)]
        plant: Option<String>,
    },
    /// Least `m` such that every relation on `[m]^n` canonizes on `l` points.
    ErThreshold {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m_cap: usize,
    },
    /// Canonizes a relation on product copies of `(A_j)` in `(C_j)`.
    #[command(group(ArgGroup::new("source").required(true).args(["input", "plant"])))]
    Product {
        #[arg(long, required = true)]
        a: Vec<String>,
        #[arg(long, required = true)]
        b: Vec<String>,
        #[arg(long, required = true)]
        c: Vec<String>,
        /// Partition file of copy tuples like `0,1|2`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Per-coordinate index sets like `0|0,1`, `-` for an empty set.
        #[arg(long, allow_hyphen_values = true)]
        plant: Option<String>,
    },
    /// Canonizes a relation on n-block approximations below a prefix.
    #[command(group(ArgGroup::new("source").required(true).args(["input", "plant"])))]
    Block {
        #[command(flatten)]
        coords: CoordArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sub_len: usize,
        /// Partition file of approximations like `0[0] 2[1]`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        plant: Option<BlockPlant>,
    },
    /// Validates a family of approximations as a front and optionally an
    /// inner map on it.
    #[command(group(ArgGroup::new("source").required(true).args(["input", "ar"])))]
    Front {
        #[command(flatten)]
        coords: CoordArgs,
        #[arg(long)]
        depth: usize,
        /// One approximation per line.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Use all approximations of this length.
        #[arg(long)]
        ar: Option<usize>,
        #[arg(long, value_enum, default_value = "nw")]
        mode: ModeArg,
        #[arg(long, value_enum)]
        inner: Option<InnerArg>,
    },
}

impl CanonizeCmd {
    pub fn name(&self) -> &'static str {
        match self {
            CanonizeCmd::Er { .. } => "er",
            CanonizeCmd::ErThreshold { .. } => "er-threshold",
            CanonizeCmd::Product { .. } => "product",
            CanonizeCmd::Block { .. } => "block",
            CanonizeCmd::Front { .. } => "front",
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn project(x: &[usize], is: &[usize]) -> Vec<usize> {
    is.iter().map(|&i| x[i]).collect()
}

pub fn run_canonize(cmd: &CanonizeCmd, g: &GlobalArgs) -> Result<Report> {
    let budget = g.budget(DEFAULT_CANDIDATE_BUDGET);
    match cmd {
        CanonizeCmd::Er { m, n, l, input, plant } => {
            let e = match (input, plant) {
                (Some(p), _) => parse_partition(&read(p)?, |s| Ok(ramsey_forge::canonize::parse_index_list(s)?))?
                    .reorder(&k_subsets(*m, *n))?,
                (None, Some(i)) => {
                    let is = parse_index_list(i)?;
                    if is.iter().any(|&x| x >= *n) || is.windows(2).any(|w| w[0] >= w[1]) {
                        bail!("index set {i:?} is not an increasing subset of {n}");
                    }
                    planted_er(*m, *n, &is)
                }
                (None, None) => unreachable!("clap requires a source"),
            };
            match er_canonize(&e, *m, *n, *l)? {
                Some(w) => {
                    let text = format!(
                        "s: {}\nI: {}\nverified: {}\n",
                        w.s.iter().join(","),
                        fmt_set(&w.index_set),
                        w.verified
                    );
                    Ok(Report::new("canonize er", &w, text)?)
                }
                None => Ok(Report::new("canonize er", json!(null), format!("no canonical {l}-subset"))?.not_found()),
            }
        }
        CanonizeCmd::ErThreshold { n, l, m_cap } => {
            let t = er_threshold(*n, *l, *m_cap, budget)?;
            let text = match t.m {
                Some(m) => format!("least m: {m}\npartitions checked: {}\n", t.partitions_checked),
                None => format!("no m up to {m_cap}\npartitions checked: {}\n", t.partitions_checked),
            };
            let r = Report::new("canonize er-threshold", &t, text)?;
            Ok(if t.m.is_some() { r } else { r.not_found() })
        }
        CanonizeCmd::Product { a, b, c, input, plant } => {
            if a.len() != b.len() || b.len() != c.len() {
                bail!("--a, --b and --c must be given the same number of times");
            }
            let coords: Vec<ArrowCoordinate> = structures(a)?
                .into_iter()
                .zip(structures(b)?)
                .zip(structures(c)?)
                .map(|((a, b), c)| ArrowCoordinate { a, b, c })
                .collect();
            let domain = product_domain(&coords)?;
            let e = match (input, plant) {
                (Some(p), _) => parse_partition(&read(p)?, |s| Ok(parse_copy_tuple(s)?))?.reorder(&domain)?,
                (None, Some(s)) => {
                    let is = parse_copy_tuple(s)?;
                    if is.len() != coords.len() {
                        bail!("{} index sets for {} coordinates", is.len(), coords.len());
                    }
                    for (set, co) in is.iter().zip(&coords) {
                        if set.iter().any(|&x| x >= co.a.size()) {
                            bail!("index set {} is outside A", fmt_set(set));
                        }
                    }
                    EquivalenceTable::from_key(domain, |x| {
                        x.iter().zip(&is).map(|(xj, ij)| project(xj, ij)).collect_vec()
                    })
                }
                (None, None) => unreachable!("clap requires a source"),
            };
            match product_canonize(&coords, &e, budget)? {
                Some(w) => {
                    let text = format!(
                        "B': {}\nI: {}\nverified: {}\n",
                        format_copy_tuple(&w.b_primes),
                        format_copy_tuple(&w.index_sets),
                        w.verified
                    );
                    Ok(Report::new("canonize product", &w, text)?)
                }
                None => Ok(Report::new("canonize product", json!(null), "no canonical B'".into())?.not_found()),
            }
        }
        CanonizeCmd::Block { coords, depth, n, sub_len, input, plant } => {
            let seq = build(coords, *depth, budget)?;
            let prefix = seq.maximal_prefix(*depth)?;
            let domain = enumerate_ar_n(&seq, &prefix, *n, budget)?;
            let r = match (input, plant) {
                (Some(p), _) => parse_partition(&read(p)?, |s| s.parse::<Approximation>())?,
                (None, Some(kind)) => match kind {
                    BlockPlant::Equality => EquivalenceTable::from_key(domain, |a| a.clone()),
                    BlockPlant::Depth => EquivalenceTable::from_key(domain, |a| a.depth_vector()),
                    BlockPlant::Trivial => EquivalenceTable::from_key(domain, |_| ()),
                    BlockPlant::FirstBlock => EquivalenceTable::from_key(domain, |a| a.blocks.first().cloned()),
                },
                (None, None) => unreachable!("clap requires a source"),
            };
            match block_canonize(&seq, &prefix, *n, &r, *sub_len, budget)? {
                Some(c) => {
                    let mut text = format!("sub-prefix: {}\nverified: {}\nrelations:\n", c.sub_prefix, c.verified);
                    for ps in &c.relations {
                        writeln!(text, "  {}", ps.iter().join(" "))?;
                    }
                    let value = json!({
                        "sub_prefix": c.sub_prefix.to_string(),
                        "relations": c.relations.iter().map(|ps| ps.iter().map(ToString::to_string).collect_vec()).collect_vec(),
                        "verified": c.verified,
                    });
                    Ok(Report::new("canonize block", value, text)?)
                }
                None => Ok(Report::new("canonize block", json!(null), "no canonical sub-prefix".into())?.not_found()),
            }
        }
        CanonizeCmd::Front { coords, depth, input, ar, mode, inner } => {
            let seq = build(coords, *depth, budget)?;
            let prefix = seq.maximal_prefix(*depth)?;
            let family: Vec<Approximation> = match (input, ar) {
                (Some(p), _) => read(p)?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| l.parse().map_err(anyhow::Error::from))
                    .collect::<Result<_>>()?,
                (None, Some(n)) => enumerate_ar_n(&seq, &prefix, *n, budget)?,
                (None, None) => unreachable!("clap requires a source"),
            };
            let mode = match mode {
                ModeArg::Nw => FrontMode::NashWilliams,
                ModeArg::Sperner => FrontMode::Sperner,
            };
            let r = validate_front(&seq, &family, &prefix, mode, budget)?;
            let mut text = format!(
                "members: {}\nantichain: {}\ncoverage: {} ({} paths)\n",
                family.len(),
                pass_word(r.antichain),
                pass_word(r.coverage),
                r.paths_checked
            );
            if let Some((a, b)) = &r.antichain_witness {
                writeln!(text, "comparable pair: {a} | {b}")?;
            }
            if let Some(u) = &r.uncovered {
                writeln!(text, "uncovered: {u}")?;
            }
            let inner_report = inner.map(|kind| {
                let phi = InnerMap::uniform(&family, |k| match kind {
                    InnerArg::Empty => Projection::Empty,
                    InnerArg::Depth => Projection::Select(vec![Vec::new(); seq.width_at(k)]),
                    InnerArg::Identity => Projection::Select(
                        (0..seq.width_at(k)).map(|j| (0..seq.structure(k, j).size()).collect()).collect(),
                    ),
                });
                validate_inner_nw(&seq, &phi)
            });
            if let Some(ir) = &inner_report {
                writeln!(text, "inner: {}\nnash-williams: {}", pass_word(ir.inner), pass_word(ir.nash_williams))?;
                if let Some((b, c)) = &ir.witness {
                    writeln!(text, "image of {c} is a proper initial segment of the image of {b}")?;
                }
            }
            Ok(Report::new("canonize front", json!({ "front": r, "inner": inner_report }), text)?)
        }
    }
}

fn fmt_set(s: &[usize]) -> String {
    format!("{{{}}}", s.iter().join(","))
}

// ---------------------------------------------------------------- degrees

#[derive(Subcommand, Debug)]
pub enum DegreesCmd {
    /// Closed-form degree: any m for one class, m = 2 for two classes.
    Formula {
        #[arg(long, required = true)]
        class: Vec<String>,
        #[arg(long)]
        m: usize,
    },
    /// Type-counting oracle with formula and reference value alongside.
    Oracle {
        #[command(flatten)]
        coords: CoordArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        depth_cap: usize,
    },
    /// Pair degrees of products of linear orders against `(3^n - 1)/2 + 1`.
    Conjecture {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        depth_cap: usize,
    },
}

impl DegreesCmd {
    pub fn name(&self) -> &'static str {
        match self {
            DegreesCmd::Formula { .. } => "formula",
            DegreesCmd::Oracle { .. } => "oracle",
            DegreesCmd::Conjecture { .. } => "conjecture",
        }
    }
}

pub fn run_degrees(cmd: &DegreesCmd, g: &GlobalArgs) -> Result<Report> {
    let budget = g.budget(DEFAULT_CANDIDATE_BUDGET);
    match cmd {
        DegreesCmd::Formula { class, m } => {
            let classes: Vec<_> = class.iter().map(|c| parse_class(c)).collect::<Result<_>>()?;
            let v = match classes.as_slice() {
                [k] => degree_formula_j1(k, *m, budget)?,
                [k0, k1] if *m == 2 => degree_formula_j2(k0, k1, budget)?,
                [_, _] => bail!("the two-class formula covers m = 2 only"),
                _ => bail!("formulas exist for one or two classes"),
            };
            let value = json!({
                "space": classes.iter().map(|c| c.name()).collect_vec(),
                "m": m,
                "formula": v.to_string(),
            });
            let mut table = Table::new(&["space", "m", "formula"]);
            table.row(vec![classes.iter().map(|c| c.name()).join("*"), m.to_string(), v.to_string()]);
            Ok(Report::new("degrees formula", value, v.to_string())?.with_table(table))
        }
        DegreesCmd::Oracle { coords, m, depth_cap } => {
            let classes = match coords.coordinates()? {
                Coordinates::Finite(cs) => cs,
                Coordinates::Omega(_) => bail!("degrees need finitely many coordinates"),
            };
            let r = degree_report(&classes, *m, Some(*depth_cap), budget)?;
            let opt = |v: Option<u128>| v.map_or("-".to_string(), |x| x.to_string());
            let mut text = format!(
                "space: {}\nm: {}\nformula: {}\noracle: {}\n",
                r.space.join(" x "),
                r.m,
                opt(r.formula),
                opt(r.oracle)
            );
            if let Some(a) = r.agreement {
                writeln!(text, "agreement: {a}")?;
            }
            writeln!(text, "reference: {}", opt(r.reference_value))?;
            if let Some(d) = &r.discrepancy {
                writeln!(text, "discrepancy: {d}")?;
            }
            let mut table = Table::new(&ramsey_forge::degrees::DegreeReport::csv_header().split(',').collect_vec());
            table.row(vec![
                r.space.join("*"),
                r.m.to_string(),
                opt(r.formula),
                opt(r.oracle),
                r.agreement.map_or("-".to_string(), |a| a.to_string()),
                opt(r.reference_value),
                r.discrepancy.clone().unwrap_or_default(),
            ]);
            Ok(Report::new("degrees oracle", &r, text)?.with_table(table))
        }
        DegreesCmd::Conjecture { n_max, depth_cap } => {
            let rows = test_conjecture(*n_max, *depth_cap, budget)?;
            let mut text = format!("{:>3} {:>10} {:>10} {:>12}  agrees\n", "n", "predicted", "oracle", "within-block");
            let mut table = Table::new(&["n", "predicted", "oracle", "within_block", "agrees"]);
            for r in &rows {
                writeln!(text, "{:>3} {:>10} {:>10} {:>12}  {}", r.n, r.predicted, r.oracle, r.within_block, r.agrees)?;
                table.row(vec![
                    r.n.to_string(),
                    r.predicted.to_string(),
                    r.oracle.to_string(),
                    r.within_block.to_string(),
                    r.agrees.to_string(),
                ]);
            }
            Ok(Report::new("degrees conjecture", &rows, text)?.with_table(table))
        }
    }
}
