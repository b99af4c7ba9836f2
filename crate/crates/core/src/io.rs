//! Instance and solution formats.
//!
//! STP text (keywords are case-insensitive):
//!
//! ```text
//! SECTION Graph
//! Nodes 3
//! Edges 2
//! E 1 2
//! E 2 3
//! END
//! SECTION Terminals
//! Terminals 3
//! T 1 1.5
//! T 2 -2
//! T 3 3
//! END
//! SECTION Roots
//! R 1
//! END
//! EOF
//! ```
//!
//! JSON: `{"nodes":[{"id":..,"weight":..}],"edges":[[u,v]],"roots":[..]}`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{NodeId, Solution, Status, WeightedGraph};
use crate::transforms::PcstInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Stp,
    Json,
}

impl Format {
    /// Guesses the format from a file extension, defaulting to STP.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Stp,
        }
    }
}

/// A graph plus its (possibly empty) root set.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub graph: WeightedGraph,
    pub roots: Vec<NodeId>,
}

pub fn load_instance(text: &str, format: Format) -> Result<ProblemInstance> {
    match format {
        Format::Stp => parse_stp(text).map(|s| ProblemInstance {
            graph: s.graph,
            roots: s.roots,
        }),
        Format::Json => parse_json(text),
    }
}

pub fn read_instance(path: &Path, format: Option<Format>) -> Result<ProblemInstance> {
    let text = std::fs::read_to_string(path)?;
    load_instance(&text, format.unwrap_or_else(|| Format::from_path(path)))
}

struct StpData {
    graph: WeightedGraph,
    roots: Vec<NodeId>,
    costs: Vec<f64>,
    edge_list: Vec<(usize, usize)>,
}

#[derive(PartialEq)]
enum Section {
    None,
    Graph,
    Terminals,
    Roots,
    Other,
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{tok}'")))
}

fn parse_stp(text: &str) -> Result<StpData> {
    let mut section = Section::None;
    let mut n: Option<usize> = None;
    let mut weights: Vec<f64> = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut costs: Vec<f64> = Vec::new();
    let mut roots: Vec<(usize, usize)> = Vec::new();
    let node = |tok: Option<&str>, line: usize, n: Option<usize>| -> Result<usize> {
        let n = n.ok_or_else(|| Error::parse(line, "node reference before 'Nodes'"))?;
        let v: usize = parse_num(tok, line, "node index")?;
        if v == 0 || v > n {
            return Err(Error::parse(line, format!("node {v} outside 1..={n}")));
        }
        Ok(v - 1)
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(key) = toks.next() else {
            continue;
        };
        let key = key.to_ascii_lowercase();
        match key.as_str() {
            "section" => {
                let name = toks.next().unwrap_or("").to_ascii_lowercase();
                section = match name.as_str() {
                    "graph" => Section::Graph,
                    "terminals" => Section::Terminals,
                    "roots" => Section::Roots,
                    _ => Section::Other,
                };
                continue;
            }
            "end" => {
                section = Section::None;
                continue;
            }
            "eof" => break,
            _ => {}
        }
        match (&section, key.as_str()) {
            (Section::Graph, "nodes") => {
                let count: usize = parse_num(toks.next(), line, "node count")?;
                n = Some(count);
                weights = vec![0.0; count];
            }
            (Section::Graph, "edges" | "arcs") => {
                let _: usize = parse_num(toks.next(), line, "edge count")?;
            }
            (Section::Graph, "e" | "a") => {
                let u = node(toks.next(), line, n)?;
                let v = node(toks.next(), line, n)?;
                if u == v {
                    return Err(Error::parse(line, format!("self-loop at node {}", u + 1)));
                }
                let c = match toks.next() {
                    Some(t) => parse_num(Some(t), line, "edge cost")?,
                    None => 0.0,
                };
                edges.push((u, v, line));
                costs.push(c);
            }
            (Section::Terminals, "terminals") => {}
            (Section::Terminals, "t" | "tp") => {
                let v = node(toks.next(), line, n)?;
                weights[v] = parse_num(toks.next(), line, "weight")?;
            }
            (Section::Roots, "r" | "root") => {
                roots.push((node(toks.next(), line, n)?, line));
            }
            (Section::Roots, "roots") => {}
            (Section::Other, _) => {}
            (Section::None, _) => {
                // header lines such as the STP magic string
            }
            (_, other) => return Err(Error::parse(line, format!("unexpected keyword '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing 'Nodes' line"))?;
    let mut graph = WeightedGraph::new();
    for (v, &w) in weights.iter().enumerate().take(n) {
        graph.add_node((v + 1).to_string(), w);
    }
    for &(u, v, line) in &edges {
        graph
            .add_edge(NodeId(u), NodeId(v))
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    let mut root_ids: Vec<NodeId> = roots.iter().map(|&(v, _)| NodeId(v)).collect();
    root_ids.sort();
    root_ids.dedup();
    Ok(StpData {
        graph,
        roots: root_ids,
        costs,
        edge_list: edges.iter().map(|&(u, v, _)| (u, v)).collect(),
    })
}

/// PCST instance in STP form: profits in the terminal section, costs as the
/// third token of edge lines.
pub fn load_pcst(text: &str) -> Result<PcstInstance> {
    let data = parse_stp(text)?;
    let profits = data.graph.nodes().map(|v| data.graph.weight(v)).collect();
    let edges = data
        .edge_list
        .iter()
        .zip(&data.costs)
        .map(|(&(u, v), &c)| (u, v, c))
        .collect();
    PcstInstance::new(profits, edges)
}

#[derive(Deserialize, Serialize)]
struct JsonNode {
    id: Value,
    #[serde(default)]
    weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<Vec<String>>,
}

#[derive(Deserialize, Serialize)]
struct JsonInstance {
    nodes: Vec<JsonNode>,
    #[serde(default)]
    edges: Vec<(Value, Value)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    roots: Vec<Value>,
}

fn id_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::parse(1, format!("node id must be a string or number, got {other}"))),
    }
}

fn parse_json(text: &str) -> Result<ProblemInstance> {
    let raw: JsonInstance = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let mut graph = WeightedGraph::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    for node in &raw.nodes {
        let key = id_text(&node.id)?;
        if index.contains_key(&key) {
            return Err(Error::parse(1, format!("duplicate node id '{key}'")));
        }
        let id = graph.add_node(key.clone(), node.weight);
        index.insert(key, id);
    }
    let lookup = |v: &Value| -> Result<NodeId> {
        let key = id_text(v)?;
        index
            .get(&key)
            .copied()
            .ok_or_else(|| Error::parse(1, format!("unknown node id '{key}'")))
    };
    for (u, v) in &raw.edges {
        let (u, v) = (lookup(u)?, lookup(v)?);
        if u == v {
            return Err(Error::parse(1, format!("self-loop at node '{}'", graph.label(u))));
        }
        graph.add_edge(u, v)?;
    }
    let mut roots = raw.roots.iter().map(lookup).collect::<Result<Vec<_>>>()?;
    roots.sort();
    roots.dedup();
    Ok(ProblemInstance { graph, roots })
}

/// Writes the live part of `g` with nodes renumbered `1..=k` in id order.
pub fn write_stp(g: &WeightedGraph, roots: &[NodeId]) -> String {
    let order: Vec<NodeId> = g.nodes().collect();
    let pos: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    let mut out = String::new();
    let _ = writeln!(out, "SECTION Graph\nNodes {}\nEdges {}", order.len(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "E {} {}", pos[&u], pos[&v]);
    }
    let _ = writeln!(out, "END\n\nSECTION Terminals\nTerminals {}", order.len());
    for &v in &order {
        let _ = writeln!(out, "T {} {}", pos[&v], g.weight(v));
    }
    out.push_str("END\n");
    if !roots.is_empty() {
        out.push_str("\nSECTION Roots\n");
        for r in roots {
            let _ = writeln!(out, "R {}", pos[r]);
        }
        out.push_str("END\n");
    }
    out.push_str("\nEOF\n");
    out
}

/// JSON counterpart of [`write_stp`]. `origin` optionally lists, per live
/// node, the original labels it stands for.
pub fn write_json(g: &WeightedGraph, roots: &[NodeId], origin: Option<&dyn Fn(NodeId) -> Vec<String>>) -> Result<String> {
    let order: Vec<NodeId> = g.nodes().collect();
    let pos: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    let inst = JsonInstance {
        nodes: order
            .iter()
            .map(|&v| JsonNode {
                id: Value::from(pos[&v]),
                weight: g.weight(v),
                origin: origin.map(|f| f(v)),
            })
            .collect(),
        edges: g
            .edges()
            .map(|(u, v)| (Value::from(pos[&u]), Value::from(pos[&v])))
            .collect(),
        roots: roots.iter().map(|r| Value::from(pos[r])).collect(),
    };
    Ok(serde_json::to_string_pretty(&inst)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub objective: f64,
    pub nodes: Vec<String>,
    pub status: String,
    pub lower: f64,
    pub upper: f64,
}

impl SolutionReport {
    /// Names the selected nodes by their labels in `original`.
    pub fn new(sol: &Solution, original: &WeightedGraph) -> Self {
        let (lower, upper) = sol.bounds();
        SolutionReport {
            objective: sol.objective,
            nodes: sol.selected.iter().map(|&v| original.label(v).to_string()).collect(),
            status: match sol.status {
                Status::Optimal => "optimal".into(),
                Status::Gap { .. } => "gap".into(),
            },
            lower,
            upper,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "33D32945 STP File, STP Format Version 1.0\n\
        SECTION Graph\nNodes 3\nEdges 2\nE 1 2\nE 2 3\nEND\n\
        SECTION Terminals\nTerminals 3\nT 1 1.5\nT 2 -2\nT 3 3\nEND\nEOF\n";

    #[test]
    fn reads_weights() {
        let inst = load_instance(SAMPLE, Format::Stp).unwrap();
        let g = &inst.graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let w: Vec<f64> = g.nodes().map(|v| g.weight(v)).collect();
        assert_eq!(w, vec![1.5, -2.0, 3.0]);
        assert!(inst.roots.is_empty());
    }

    #[test]
    fn keywords_ignore_case() {
        let text = SAMPLE.to_lowercase().replace("section graph", "Section GRAPH");
        assert_eq!(load_instance(&text, Format::Stp).unwrap().graph.edge_count(), 2);
    }

    #[test]
    fn empty_edge_section() {
        let text = "SECTION Graph\nNodes 2\nEdges 0\nEND\nEOF\n";
        let g = load_instance(text, Format::Stp).unwrap().graph;
        assert_eq!((g.node_count(), g.edge_count()), (2, 0));
        assert!(g.nodes().all(|v| g.weight(v) == 0.0));
    }

    #[test]
    fn out_of_range_weight_line() {
        let text = "SECTION Graph\nNodes 2\nEND\nSECTION Terminals\nT 3 1.0\nEND\n";
        match load_instance(text, Format::Stp) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn self_loop_rejected_duplicates_merged() {
        let text = "SECTION Graph\nNodes 2\nE 1 2\nE 2 1\nEND\n";
        assert_eq!(load_instance(text, Format::Stp).unwrap().graph.edge_count(), 1);
        let text = "SECTION Graph\nNodes 2\nE 1 1\nEND\n";
        assert!(matches!(load_instance(text, Format::Stp), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn roots_section() {
        let text = format!("{}SECTION Roots\nR 3\nR 1\nEND\n", SAMPLE.replace("EOF\n", ""));
        let inst = load_instance(&text, Format::Stp).unwrap();
        assert_eq!(inst.roots, vec![NodeId(0), NodeId(2)]);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"nodes":[{"id":"a","weight":2},{"id":"b","weight":-1},{"id":"c"}],
                      "edges":[["a","b"],["b","c"]],"roots":["c"]}"#;
        let inst = load_instance(text, Format::Json).unwrap();
        assert_eq!(inst.graph.label(NodeId(2)), "c");
        assert_eq!(inst.graph.weight(NodeId(2)), 0.0);
        assert_eq!(inst.roots, vec![NodeId(2)]);
        let back = write_json(&inst.graph, &inst.roots, None).unwrap();
        let again = load_instance(&back, Format::Json).unwrap();
        assert_eq!(again.graph.edge_count(), 2);
        assert_eq!(again.roots, vec![NodeId(2)]);
    }

    #[test]
    fn stp_round_trip() {
        let inst = load_instance(SAMPLE, Format::Stp).unwrap();
        let text = write_stp(&inst.graph, &[NodeId(1)]);
        let again = load_instance(&text, Format::Stp).unwrap();
        assert_eq!(again.graph.edge_count(), 2);
        assert_eq!(again.roots, vec![NodeId(1)]);
    }

    #[test]
    fn pcst_costs() {
        let text = "SECTION Graph\nNodes 2\nE 1 2 1.5\nEND\nSECTION Terminals\nT 1 3\nT 2 2\nEND\n";
        let p = load_pcst(text).unwrap();
        assert_eq!(p.profits, vec![3.0, 2.0]);
        assert_eq!(p.edges, vec![(0, 1, 1.5)]);
    }
}
