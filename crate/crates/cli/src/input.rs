//! Structure, class and coordinate arguments.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use ramsey_forge::fraisse::{ClassLine, FraisseClassSpec};
use ramsey_forge::genseq::{ClassFamily, Coordinates};
use ramsey_forge::OrderedStructure;

/// `lo:N`, `graph:N:0-1,1-2`, or a path to a structure file.
pub fn parse_structure(arg: &str) -> Result<OrderedStructure> {
    let parts: Vec<&str> = arg.splitn(3, ':').collect();
    let size = || -> Result<usize> {
        parts
            .get(1)
            .ok_or_else(|| anyhow!("{arg:?}: missing size"))?
            .parse()
            .with_context(|| format!("{arg:?}: bad size"))
    };
    match parts[0] {
        "lo" if parts.len() == 2 => Ok(OrderedStructure::linear_order(size()?)),
        "graph" if parts.len() >= 2 => {
            let edges = parts
                .get(2)
                .map_or(Ok(Vec::new()), |s| parse_edges(s))
                .with_context(|| format!("{arg:?}: bad edge list"))?;
            Ok(OrderedStructure::graph(size()?, &edges)?)
        }
        _ => {
            let text = fs::read_to_string(arg).with_context(|| format!("reading structure file {arg}"))?;
            Ok(text.parse()?)
        }
    }
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .filter(|e| !e.trim().is_empty())
        .map(|e| {
            let (a, b) = e.split_once('-').ok_or_else(|| anyhow!("edge {e:?} is not a-b"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

/// `linear-orders`, `ordered-graphs`, `complete-graphs`, `clique-free:N`,
/// or `@path` to a class file whose forbidden structures are resolved
/// relative to the class file.
pub fn parse_class(arg: &str) -> Result<FraisseClassSpec> {
    if let Some(path) = arg.strip_prefix('@') {
        let text = fs::read_to_string(path).with_context(|| format!("reading class file {path}"))?;
        let line: ClassLine = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| anyhow!("class file {path} is empty"))?
            .parse()?;
        let base = Path::new(path).parent().unwrap_or(Path::new("."));
        let forbidden = line
            .forbidden_files
            .iter()
            .map(|f| parse_structure(&base.join(f).to_string_lossy()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(line.build(forbidden)?);
    }
    let (kind, param) = match arg.split_once(':') {
        Some((k, p)) => (k, Some(p.parse::<usize>().with_context(|| format!("{arg:?}: bad parameter"))?)),
        None => (arg, None),
    };
    Ok(match (kind, param) {
        ("linear-orders", None) => FraisseClassSpec::linear_orders(),
        ("ordered-graphs", None) => FraisseClassSpec::ordered_graphs(),
        ("complete-graphs", None) => FraisseClassSpec::complete_graphs(),
        ("clique-free", Some(n)) => FraisseClassSpec::clique_free(n)?,
        _ => bail!("unknown class {arg:?}"),
    })
}

pub fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    Ok(ramsey_forge::canonize::parse_index_list(s)?)
}

/// Coordinates of a generating sequence.
#[derive(Args, Debug, Clone)]
pub struct CoordArgs {
    /// A coordinate class; repeat for several coordinates.
    #[arg(long = "class")]
    pub classes: Vec<String>,
    /// `n` coordinates of linear orders.
    #[arg(long, conflicts_with_all = ["classes", "omega"])]
    pub hypercube: Option<usize>,
    /// Width `k + 1` at level `k`: a class name or `clique-free-ladder`.
    #[arg(long, conflicts_with = "classes")]
    pub omega: Option<String>,
}

impl CoordArgs {
    pub fn coordinates(&self) -> Result<Coordinates> {
        if let Some(n) = self.hypercube {
            if n == 0 {
                bail!("--hypercube needs n >= 1");
            }
            return Ok(Coordinates::hypercube(n));
        }
        if let Some(o) = &self.omega {
            return Ok(Coordinates::Omega(if o == "clique-free-ladder" {
                ClassFamily::CliqueFreeLadder
            } else {
                ClassFamily::Uniform(parse_class(o)?)
            }));
        }
        if self.classes.is_empty() {
            bail!("give --class (repeatable), --hypercube or --omega");
        }
        Ok(Coordinates::Finite(self.classes.iter().map(|c| parse_class(c)).collect::<Result<_>>()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_structures() {
        assert_eq!(parse_structure("lo:3").unwrap(), OrderedStructure::linear_order(3));
        let g = parse_structure("graph:3:0-1,1-2").unwrap();
        assert_eq!(g, OrderedStructure::graph(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(parse_structure("graph:2").unwrap(), OrderedStructure::graph(2, &[]).unwrap());
        assert!(parse_structure("graph:2:0-5").is_err());
        assert!(parse_structure("lo:x").is_err());
    }

    #[test]
    fn class_names() {
        assert_eq!(parse_class("clique-free:3").unwrap(), FraisseClassSpec::clique_free(3).unwrap());
        assert_eq!(parse_class("linear-orders").unwrap(), FraisseClassSpec::linear_orders());
        assert!(parse_class("clique-free").is_err());
        assert!(parse_class("trees").is_err());
    }

    #[test]
    fn class_file_with_forbidden_structure() {
        let dir = tempfile::tempdir().unwrap();
        let tri = OrderedStructure::graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        fs::write(dir.path().join("tri.txt"), tri.to_string()).unwrap();
        fs::write(dir.path().join("c.class"), "class no-tri kind=forbidden forbidden=tri.txt\n").unwrap();
        let c = parse_class(&format!("@{}", dir.path().join("c.class").display())).unwrap();
        assert_eq!(c.name(), "no-tri");
        assert!(!c.contains(&tri).unwrap());
    }
}
