//! Generator-colored Cayley graphs and Eulerian cycles on them.
//!
//! Colors are 0-based generator indices: color `λ` is the generator
//! `group.generators()[λ]`. The edge of color `λ` leaving `g` ends at `γ_λ g`.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::Group;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CayleyGraph {
    vertex_count: usize,
    colors: usize,
    /// Ordered by (vertex, color); edge `v·|Γ| + λ` leaves `v` with color `λ`.
    edges: Vec<Edge>,
}

impl CayleyGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn color_count(&self) -> usize {
        self.colors
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, from: usize, color: usize) -> usize {
        from * self.colors + color
    }

    pub fn successor(&self, from: usize, color: usize) -> usize {
        self.edges[self.edge_index(from, color)].to
    }
}

pub fn build_cayley(group: &Group) -> Result<CayleyGraph> {
    let colors = group.generators().len();
    if colors == 0 {
        return Err(Error::InvalidGroup("empty generating set".into()));
    }
    let edges = (0..group.order())
        .flat_map(|v| {
            group
                .generators()
                .iter()
                .enumerate()
                .map(move |(color, &g)| Edge {
                    from: v,
                    to: group.mul(g, v),
                    color,
                })
        })
        .collect();
    Ok(CayleyGraph {
        vertex_count: group.order(),
        colors,
        edges,
    })
}

/// Color sequence of a closed walk using every edge exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerPath {
    colors: Vec<usize>,
}

impl EulerPath {
    /// Accept `colors` only if it is an Eulerian cycle from the identity.
    pub fn from_colors(graph: &CayleyGraph, colors: Vec<usize>) -> Result<Self> {
        match validate_path(graph, &colors) {
            PathCheck::Valid => Ok(EulerPath { colors }),
            bad => Err(Error::NoEulerianCycle(bad.to_string())),
        }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Vertex sequence `g_0 = start, g_1, …, g_L` induced by the colors.
    pub fn vertices(&self, graph: &CayleyGraph, start: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.colors.len() + 1);
        out.push(start);
        let mut v = start;
        for &col in &self.colors {
            v = graph.successor(v, col);
            out.push(v);
        }
        out
    }

    /// Comma-separated color indices.
    pub fn to_line(&self) -> String {
        format_colors(&self.colors)
    }
}

pub fn format_colors(colors: &[usize]) -> String {
    colors
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_colors(line: &str) -> Result<Vec<usize>> {
    line.trim()
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::Config(format!("bad color index {s:?}: {e}")))
        })
        .collect()
}

/// Hierholzer's algorithm, always extending along the unused edge with the
/// smallest color.
pub fn eulerian_cycle(graph: &CayleyGraph, start: usize) -> Result<EulerPath> {
    if start >= graph.vertex_count {
        return Err(Error::NoEulerianCycle(format!("start vertex {start} out of range")));
    }
    let mut next = vec![0usize; graph.vertex_count];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut reversed = Vec::with_capacity(graph.edges.len());
    while let Some(&(v, incoming)) = stack.last() {
        if next[v] < graph.colors {
            let e = graph.edges[graph.edge_index(v, next[v])];
            next[v] += 1;
            stack.push((e.to, Some(e.color)));
        } else {
            stack.pop();
            if let Some(col) = incoming {
                reversed.push(col);
            }
        }
    }
    if reversed.len() != graph.edges.len() {
        return Err(Error::NoEulerianCycle(format!(
            "graph is disconnected: cycle covers {} of {} edges",
            reversed.len(),
            graph.edges.len()
        )));
    }
    reversed.reverse();
    // Right multiplication is a color-preserving automorphism, so the color
    // sequence is also an Eulerian cycle from the identity.
    Ok(EulerPath { colors: reversed })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathCheck {
    Valid,
    ColorOutOfRange { step: usize, color: usize },
    EdgeReused { step: usize, from: usize, color: usize },
    NotClosed { end: usize },
    EdgesUnused { unused: usize },
}

impl PathCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, PathCheck::Valid)
    }
}

impl fmt::Display for PathCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathCheck::Valid => write!(f, "valid Eulerian cycle"),
            PathCheck::ColorOutOfRange { step, color } => {
                write!(f, "color {color} out of range at step {step}")
            }
            PathCheck::EdgeReused { step, from, color } => {
                write!(f, "edge reused at step {step} (vertex {from}, color {color})")
            }
            PathCheck::NotClosed { end } => {
                write!(f, "walk does not close: ends at vertex {end}")
            }
            PathCheck::EdgesUnused { unused } => write!(f, "edges unused ({unused})"),
        }
    }
}

/// Walk `colors` from the identity and report the first violated condition.
pub fn validate_path(graph: &CayleyGraph, colors: &[usize]) -> PathCheck {
    let mut used = vec![false; graph.edges.len()];
    let mut v = 0;
    for (step, &col) in colors.iter().enumerate() {
        if col >= graph.colors {
            return PathCheck::ColorOutOfRange { step: step + 1, color: col };
        }
        let e = graph.edge_index(v, col);
        if used[e] {
            return PathCheck::EdgeReused { step: step + 1, from: v, color: col };
        }
        used[e] = true;
        v = graph.edges[e].to;
    }
    if v != 0 {
        return PathCheck::NotClosed { end: v };
    }
    let unused = used.iter().filter(|u| !**u).count();
    if unused > 0 {
        return PathCheck::EdgesUnused { unused };
    }
    PathCheck::Valid
}
