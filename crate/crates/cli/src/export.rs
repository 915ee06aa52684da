//! Machine-readable renderings of extreme points and fan graphs.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use pbox_core::extremes::{EdgeKind, FanGraph};
use pbox_core::rational::format_rational;
use pbox_core::{ExtremePoint, GeneratorSet, Rational};

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn family(g: &GeneratorSet) -> Vec<String> {
    g.display_order().iter().map(ToString::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeRecord {
    #[serde(rename = "F")]
    pub cdf: Vec<String>,
    pub mass: Vec<String>,
    pub witnesses: Vec<Vec<String>>,
}

impl ExtremeRecord {
    pub fn new(e: &ExtremePoint) -> Self {
        ExtremeRecord {
            cdf: strings(e.cdf.values()),
            mass: strings(e.cdf.to_mass().masses()),
            witnesses: e.witnesses.iter().map(family).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremesReport {
    pub name: String,
    pub domain: Vec<String>,
    pub extremes: Vec<ExtremeRecord>,
}

#[derive(Debug, Serialize)]
struct FanNode {
    id: usize,
    family: Vec<String>,
    point: usize,
}

#[derive(Debug, Serialize)]
struct FanPoint {
    id: usize,
    #[serde(rename = "F")]
    cdf: Vec<String>,
    nodes: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct FanEdgeRecord {
    source: usize,
    target: usize,
    leaving: String,
    entering: String,
    kind: &'static str,
}

#[derive(Debug, Serialize)]
struct FanDocument {
    nodes: Vec<FanNode>,
    points: Vec<FanPoint>,
    edges: Vec<FanEdgeRecord>,
}

fn kind_name(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::SamePoint => "same-point",
        EdgeKind::CrossPoint => "cross-point",
    }
}

pub fn fan_json(fan: &FanGraph) -> String {
    let doc = FanDocument {
        nodes: fan
            .nodes
            .iter()
            .enumerate()
            .map(|(id, g)| FanNode {
                id,
                family: family(g),
                point: fan.node_point[id],
            })
            .collect(),
        points: fan
            .points
            .iter()
            .enumerate()
            .map(|(id, p)| FanPoint {
                id,
                cdf: strings(p.cdf.values()),
                nodes: (0..fan.nodes.len()).filter(|&k| fan.node_point[k] == id).collect(),
            })
            .collect(),
        edges: fan
            .edges
            .iter()
            .map(|e| FanEdgeRecord {
                source: e.a,
                target: e.b,
                leaving: e.leaving.to_string(),
                entering: e.entering.to_string(),
                kind: kind_name(e.kind),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("fan serializes") + "\n"
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: one cluster per extreme point, dashed same-point
/// edges, solid cross-point edges.
pub fn fan_dot(fan: &FanGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", escape(name));
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for (p, point) in fan.points.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{p} {{");
        let _ = writeln!(out, "    label=\"F = {}\";", escape(&point.cdf.to_string()));
        for (k, g) in fan.nodes.iter().enumerate() {
            if fan.node_point[k] == p {
                let _ = writeln!(
                    out,
                    "    n{k} [label=\"{}\\nF = {}\"];",
                    escape(&g.to_string()),
                    escape(&point.cdf.to_string())
                );
            }
        }
        out.push_str("  }\n");
    }
    for e in &fan.edges {
        let style = match e.kind {
            EdgeKind::SamePoint => "dashed",
            EdgeKind::CrossPoint => "solid",
        };
        let _ = writeln!(
            out,
            "  n{} -- n{} [style={style}, label=\"{} / {}\"];",
            e.a,
            e.b,
            escape(&e.leaving.to_string()),
            escape(&e.entering.to_string())
        );
    }
    out.push_str("}\n");
    out
}
