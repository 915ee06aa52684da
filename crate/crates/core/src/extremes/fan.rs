//! The graph of feasible cones and its quotient on extreme points.

use std::collections::{BTreeMap, BTreeSet};

use super::{feasible_mescs, group_extremes, ExtremeError, ExtremePoint};
use crate::cone::{adjacency_sign_test, Generator, GeneratorSet};
use crate::model::{PBox, StepCdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Both cones triangulate the same normal cone.
    SamePoint,
    /// The cones belong to adjacent extreme points.
    CrossPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FanEdge {
    /// Node indices with `a < b`.
    pub a: usize,
    pub b: usize,
    /// Member of node `a` that node `b` lacks.
    pub leaving: Generator,
    /// Member of node `b` that node `a` lacks.
    pub entering: Generator,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanGraph {
    /// Feasible families, sorted.
    pub nodes: Vec<GeneratorSet>,
    /// Extreme point of each node, as an index into `points`.
    pub node_point: Vec<usize>,
    pub points: Vec<ExtremePoint>,
    pub edges: Vec<FanEdge>,
}

impl FanGraph {
    pub fn cdf(&self, node: usize) -> &StepCdf {
        &self.points[self.node_point[node]].cdf
    }

    /// Distinct pairs of extreme points joined by a cross-point edge.
    pub fn quotient_edges(&self) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::CrossPoint)
            .map(|e| {
                let (x, y) = (self.node_point[e.a], self.node_point[e.b]);
                (x.min(y), x.max(y))
            })
            .collect()
    }

    pub fn neighbours(&self, node: usize) -> impl Iterator<Item = (usize, &FanEdge)> {
        self.edges.iter().filter_map(move |e| {
            if e.a == node {
                Some((e.b, e))
            } else if e.b == node {
                Some((e.a, e))
            } else {
                None
            }
        })
    }
}

pub fn build_fan(pbox: &PBox) -> Result<FanGraph, ExtremeError> {
    let mut realized = feasible_mescs(pbox)?;
    realized.sort();
    let points = group_extremes(realized.iter().cloned());
    let point_of: BTreeMap<&StepCdf, usize> =
        points.iter().enumerate().map(|(k, p)| (&p.cdf, k)).collect();
    let node_point: Vec<usize> = realized.iter().map(|(_, f)| point_of[f]).collect();
    let nodes: Vec<GeneratorSet> = realized.into_iter().map(|(g, _)| g).collect();

    // families sharing all members but one meet in a facet candidate
    let mut facets: BTreeMap<Vec<Generator>, Vec<(usize, Generator)>> = BTreeMap::new();
    for (k, g) in nodes.iter().enumerate() {
        for &m in g.members() {
            if m == Generator::Omega {
                continue;
            }
            let rest: Vec<Generator> = g.members().iter().copied().filter(|&x| x != m).collect();
            facets.entry(rest).or_default().push((k, m));
        }
    }
    let mut edges = Vec::new();
    for group in facets.values() {
        for (i, &(a, leaving)) in group.iter().enumerate() {
            for &(b, entering) in &group[i + 1..] {
                if !adjacency_sign_test(&nodes[a], &nodes[b])? {
                    continue;
                }
                let kind = if node_point[a] == node_point[b] {
                    EdgeKind::SamePoint
                } else {
                    EdgeKind::CrossPoint
                };
                edges.push(FanEdge {
                    a,
                    b,
                    leaving,
                    entering,
                    kind,
                });
            }
        }
    }
    edges.sort();
    Ok(FanGraph {
        nodes,
        node_point,
        points,
        edges,
    })
}
