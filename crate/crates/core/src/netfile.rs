//! Line-oriented network file format.
//!
//! ```text
//! net <name>
//! node <id> gen <capacity>
//! node <id> sub
//! node <id> load <demand>
//! node <id> subload <demand>
//! edge <id> <nodeA> <nodeB> [x<multiplicity>]
//! ```
//!
//! `#` starts a comment. Tokens are whitespace separated.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raw::{NodeKind, RawEdge, RawNetwork, RawNode};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| err(line, format!("invalid {what} '{tok}'")))
}

pub fn parse_network(text: &str) -> Result<RawNetwork> {
    let mut name: Option<String> = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut node_ids = HashSet::new();
    let mut edge_ids = HashSet::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(keyword) = toks.next() else { continue };
        if name.is_none() && keyword != "net" {
            return Err(err(line, "expected 'net <name>' header"));
        }
        match keyword {
            "net" => {
                if name.is_some() {
                    return Err(err(line, "duplicate net header"));
                }
                let rest: Vec<&str> = toks.by_ref().collect();
                if rest.is_empty() {
                    return Err(err(line, "missing network name"));
                }
                name = Some(rest.join(" "));
            }
            "node" => {
                let id: u32 = number(line, toks.next(), "node id")?;
                if id == 0 {
                    return Err(err(line, "node ids must be positive"));
                }
                let kind = toks.next().ok_or_else(|| err(line, "missing node kind"))?;
                let node = match kind {
                    "gen" => RawNode::source(id, number(line, toks.next(), "capacity")?),
                    "sub" => RawNode::interconnection(id),
                    "load" => RawNode::sink(id, number(line, toks.next(), "demand")?),
                    "subload" => RawNode::interconnection_with_sink(id, number(line, toks.next(), "demand")?),
                    other => return Err(err(line, format!("unknown node kind '{other}'"))),
                };
                if !node_ids.insert(id) {
                    return Err(err(line, format!("duplicate node id {id}")));
                }
                nodes.push(node);
            }
            "edge" => {
                let id = toks.next().ok_or_else(|| err(line, "missing edge id"))?.to_string();
                let a: u32 = number(line, toks.next(), "endpoint")?;
                let b: u32 = number(line, toks.next(), "endpoint")?;
                let mut edge = RawEdge::new(id.clone(), a, b);
                if let Some(tok) = toks.next() {
                    let count = tok
                        .strip_prefix('x')
                        .and_then(|n| n.parse::<u32>().ok())
                        .filter(|&n| n > 0)
                        .ok_or_else(|| err(line, format!("invalid multiplicity '{tok}'")))?;
                    edge = edge.with_multiplicity(count);
                }
                if !edge_ids.insert(id.clone()) {
                    return Err(err(line, format!("duplicate edge id {id}")));
                }
                edges.push(edge);
            }
            other => return Err(err(line, format!("unknown keyword '{other}'"))),
        }
        if let Some(extra) = toks.next() {
            return Err(err(line, format!("unexpected token '{extra}'")));
        }
    }
    let name = name.ok_or_else(|| err(0, "no net header"))?;
    Ok(RawNetwork { name, nodes, edges })
}

pub fn read_network(path: impl AsRef<Path>) -> Result<RawNetwork> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_network(&text)
}

pub fn write_network(net: &RawNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "net {}", net.name);
    for node in &net.nodes {
        let _ = match node.kind {
            NodeKind::Source => writeln!(out, "node {} gen {}", node.id, node.capacity.unwrap_or(0.0)),
            NodeKind::Interconnection => writeln!(out, "node {} sub", node.id),
            NodeKind::Sink => writeln!(out, "node {} load {}", node.id, node.demand.unwrap_or(0.0)),
            NodeKind::InterconnectionWithSink => {
                writeln!(out, "node {} subload {}", node.id, node.demand.unwrap_or(0.0))
            }
        };
    }
    for edge in &net.edges {
        if edge.multiplicity == 1 {
            let _ = writeln!(out, "edge {} {} {}", edge.id, edge.a, edge.b);
        } else {
            let _ = writeln!(out, "edge {} {} {} x{}", edge.id, edge.a, edge.b, edge.multiplicity);
        }
    }
    out
}
