//! DOT and JSON serialization of ADGs.
//!
//! JSON layout:
//!
//! ```json
//! {"nodes": [{"id": 0, "agent": 0, "t": 0, "s": [0, 0], "g": [1, 0]}],
//!  "edges": [{"from": 0, "to": 1, "type": 1}]}
//! ```
//!
//! Nodes are listed agent-major, then by `t`; edges are sorted by
//! `(from, to, type)`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::graph::{Adg, DependencyType, Edge, NodeId};
use super::AdgError;
use crate::model::{Action, AgentId, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format `{other}` (expected dot or json)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    id: NodeId,
    agent: AgentId,
    t: u32,
    s: [u32; 2],
    g: [u32; 2],
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    from: NodeId,
    to: NodeId,
    #[serde(rename = "type")]
    kind: u8,
}

fn sorted_edges(adg: &Adg) -> Vec<Edge> {
    adg.edges()
}

pub fn export(adg: &Adg, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => to_dot(adg),
        ExportFormat::Json => to_json(adg),
    }
}

pub fn import(text: &str, format: ExportFormat) -> Result<Adg, AdgError> {
    match format {
        ExportFormat::Dot => from_dot(text),
        ExportFormat::Json => from_json(text),
    }
}

pub fn to_json(adg: &Adg) -> String {
    let doc = JsonGraph {
        nodes: adg
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, a)| JsonNode {
                id: id as NodeId,
                agent: a.agent,
                t: a.t,
                s: [a.s.x, a.s.y],
                g: [a.g.x, a.g.y],
            })
            .collect(),
        edges: sorted_edges(adg)
            .into_iter()
            .map(|e| JsonEdge {
                from: e.from,
                to: e.to,
                kind: match e.kind {
                    DependencyType::Type1 => 1,
                    DependencyType::Type2 => 2,
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serialization is infallible")
}

pub fn from_json(text: &str) -> Result<Adg, AdgError> {
    let doc: JsonGraph =
        serde_json::from_str(text).map_err(|e| AdgError::Import(e.to_string()))?;
    let actions = doc
        .nodes
        .iter()
        .map(|n| {
            (
                n.id,
                Action {
                    s: Vertex::new(n.s[0], n.s[1]),
                    g: Vertex::new(n.g[0], n.g[1]),
                    t: n.t,
                    agent: n.agent,
                    seq: n.t,
                },
            )
        })
        .collect();
    let edges = doc
        .edges
        .iter()
        .map(|e| {
            let kind = match e.kind {
                1 => DependencyType::Type1,
                2 => DependencyType::Type2,
                k => return Err(AdgError::Import(format!("unknown edge type {k}"))),
            };
            Ok(Edge {
                from: e.from,
                to: e.to,
                kind,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    assemble(actions, edges)
}

pub fn to_dot(adg: &Adg) -> String {
    let mut out = String::from("digraph adg {\n");
    for (id, a) in adg.nodes().iter().enumerate() {
        let _ = writeln!(
            out,
            "  n{id} [agent={}, t={}, s=\"{},{}\", g=\"{},{}\", label=\"R{} t{} {}->{}\"];",
            a.agent, a.t, a.s.x, a.s.y, a.g.x, a.g.y, a.agent, a.t, a.s, a.g
        );
    }
    for e in sorted_edges(adg) {
        let _ = writeln!(out, "  n{} -> n{} [type=\"{}\"];", e.from, e.to, e.kind.tag());
    }
    out.push_str("}\n");
    out
}

/// Reads back the DOT dialect written by [`to_dot`].
pub fn from_dot(text: &str) -> Result<Adg, AdgError> {
    let err = |line: &str, what: &str| AdgError::Import(format!("{what}: `{line}`"));
    let mut actions = Vec::new();
    let mut edges = Vec::new();

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("digraph") || line == "}" {
            continue;
        }
        let (head, attrs) = match line.find('[') {
            Some(i) => (line[..i].trim(), parse_attrs(&line[i + 1..])),
            None => return Err(err(line, "statement without attributes")),
        };
        if let Some((from, to)) = head.split_once("->") {
            let kind = attrs
                .iter()
                .find(|(k, _)| k == "type")
                .and_then(|(_, v)| DependencyType::from_tag(v))
                .ok_or_else(|| err(line, "edge without a valid type"))?;
            edges.push(Edge {
                from: parse_node_name(from.trim()).ok_or_else(|| err(line, "bad node name"))?,
                to: parse_node_name(to.trim()).ok_or_else(|| err(line, "bad node name"))?,
                kind,
            });
        } else {
            let id = parse_node_name(head).ok_or_else(|| err(line, "bad node name"))?;
            let get = |key: &str| {
                attrs
                    .iter()
                    .find(|(k, _)| k == key)
                    .map(|(_, v)| v.as_str())
                    .ok_or_else(|| err(line, &format!("missing `{key}`")))
            };
            let vertex = |key: &str| -> Result<Vertex, AdgError> {
                let (x, y) = get(key)?
                    .split_once(',')
                    .ok_or_else(|| err(line, "bad vertex"))?;
                Ok(Vertex::new(
                    x.parse().map_err(|_| err(line, "bad vertex"))?,
                    y.parse().map_err(|_| err(line, "bad vertex"))?,
                ))
            };
            let t: u32 = get("t")?.parse().map_err(|_| err(line, "bad t"))?;
            actions.push((
                id,
                Action {
                    s: vertex("s")?,
                    g: vertex("g")?,
                    t,
                    agent: get("agent")?.parse().map_err(|_| err(line, "bad agent"))?,
                    seq: t,
                },
            ));
        }
    }
    assemble(actions, edges)
}

fn parse_node_name(s: &str) -> Option<NodeId> {
    s.strip_prefix('n')?.parse().ok()
}

/// Splits `k=v, k="v, w"];` into pairs, honouring quotes.
fn parse_attrs(s: &str) -> Vec<(String, String)> {
    let body = s.trim_end().trim_end_matches(';').trim_end().trim_end_matches(']');
    let mut out = Vec::new();
    let mut key = String::new();
    let mut val = String::new();
    let mut in_val = false;
    let mut quoted = false;
    for ch in body.chars() {
        match ch {
            '"' => quoted = !quoted,
            '=' if !quoted && !in_val => in_val = true,
            ',' if !quoted => {
                out.push((key.trim().to_string(), val.trim().to_string()));
                key.clear();
                val.clear();
                in_val = false;
            }
            c if in_val => val.push(c),
            c => key.push(c),
        }
    }
    if !key.trim().is_empty() {
        out.push((key.trim().to_string(), val.trim().to_string()));
    }
    out
}

/// Checks that node ids are dense and agent-major before rebuilding.
fn assemble(mut actions: Vec<(NodeId, Action)>, edges: Vec<Edge>) -> Result<Adg, AdgError> {
    actions.sort_by_key(|(id, _)| *id);
    let mut per_agent: Vec<Vec<Action>> = Vec::new();
    for (expected, (id, a)) in actions.iter().enumerate() {
        if *id != expected as NodeId {
            return Err(AdgError::Import(format!("node ids are not dense at {id}")));
        }
        let agent = a.agent as usize;
        if agent + 1 < per_agent.len() {
            return Err(AdgError::Import(format!("node {id} breaks agent-major order")));
        }
        per_agent.resize_with(agent + 1, Vec::new);
        if let Some(prev) = per_agent[agent].last() {
            if prev.t >= a.t {
                return Err(AdgError::Import(format!("node {id} is out of time order")));
            }
        }
        per_agent[agent].push(*a);
    }
    Adg::from_parts(per_agent, edges)
}
