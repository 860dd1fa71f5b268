//! Harmonic and closeness centrality, globally or inside per-vertex ego graphs.
//!
//! The harmonic centrality of `v` is `H(v) = Σ 1 / d(v, u)` over the other
//! vertices `u` in scope, where `d` is the length-weighted shortest-path
//! distance. Its inverse `h = 1 / H` grows for keypoints that sit far from
//! the rest of the pose and shrinks inside tight clusters, which is what the
//! weighting schemes consume.
//!
//! With [`Scope::Ego`], each vertex is scored on its own hop-limited ego
//! graph, and shortest paths are recomputed inside that induced subgraph
//! rather than read off the global distance matrix.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{ego_graph, shortest_paths_from, DistanceRow};
use crate::skeleton::WeightedPoseGraph;

/// Which part of the graph a vertex is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Global,
    /// Ego graph of `radius` hops around the scored vertex.
    Ego {
        radius: usize,
    },
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Global => f.write_str("global"),
            Scope::Ego { radius } => write!(f, "ego({radius})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Harmonic,
    Closeness,
}

/// Harmonic centrality `H` and its inverse `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub centrality: f64,
    pub inverse: f64,
}

/// Distances from `vertex` over its scope, indexed by graph vertex, plus
/// the scope's members. Vertices outside the scope are infinite.
fn scoped_distances(
    graph: &WeightedPoseGraph,
    vertex: usize,
    scope: Scope,
) -> Result<(DistanceRow, Vec<usize>)> {
    let n = graph.vertex_count();
    if vertex >= n {
        return Err(Error::InvalidVertex { index: vertex, n });
    }
    match scope {
        Scope::Global => Ok((shortest_paths_from(graph, vertex)?, (0..n).collect())),
        Scope::Ego { radius } => {
            let ego = ego_graph(graph, vertex, radius)?;
            let local = shortest_paths_from(&ego, ego.local_center())?;
            let mut distances = vec![f64::INFINITY; n];
            for (i, &d) in local.distances.iter().enumerate() {
                distances[ego.global(i)] = d;
            }
            Ok((
                DistanceRow {
                    source: vertex,
                    distances,
                },
                ego.vertices().to_vec(),
            ))
        }
    }
}

fn harmonic_from_row(
    graph: &WeightedPoseGraph,
    row: &DistanceRow,
    scope: Scope,
) -> Result<Harmonic> {
    let centrality: f64 = row
        .distances
        .iter()
        .enumerate()
        .filter(|&(u, d)| u != row.source && d.is_finite())
        .map(|(_, d)| d.recip())
        .sum();
    if centrality <= 0.0 {
        return Err(Error::DegenerateCentrality {
            name: graph.skeleton().keypoint_name(row.source).to_owned(),
            scope: scope.to_string(),
        });
    }
    Ok(Harmonic {
        centrality,
        inverse: centrality.recip(),
    })
}

fn closeness_from_row(
    graph: &WeightedPoseGraph,
    row: &DistanceRow,
    members: &[usize],
    scope: Scope,
) -> Result<f64> {
    let name = || graph.skeleton().keypoint_name(row.source).to_owned();
    let mut total = 0.0;
    for &u in members {
        let d = row.distances[u];
        if !d.is_finite() {
            return Err(Error::DisconnectedScope {
                name: name(),
                scope: scope.to_string(),
            });
        }
        total += d;
    }
    if members.len() < 2 || total <= 0.0 {
        return Err(Error::DegenerateCentrality {
            name: name(),
            scope: scope.to_string(),
        });
    }
    Ok((members.len() - 1) as f64 / total)
}

/// `H` and `h = 1/H` for one vertex. Unreachable vertices contribute 0 to
/// `H`; a vertex with nothing reachable in scope is an error.
pub fn harmonic_h(graph: &WeightedPoseGraph, vertex: usize, scope: Scope) -> Result<Harmonic> {
    let (row, _) = scoped_distances(graph, vertex, scope)?;
    harmonic_from_row(graph, &row, scope)
}

/// Classical closeness `(n - 1) / Σ d` over the scope's `n` vertices.
pub fn closeness(graph: &WeightedPoseGraph, vertex: usize, scope: Scope) -> Result<f64> {
    let (row, members) = scoped_distances(graph, vertex, scope)?;
    closeness_from_row(graph, &row, &members, scope)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexCentrality {
    /// `H` for harmonic, the closeness value for closeness.
    pub value: f64,
    /// `1 / value`.
    pub inverse: f64,
    /// Graph indices of the vertices this value was computed over.
    pub scope_vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    pub measure: Measure,
    pub scope: Scope,
    pub vertices: Vec<VertexCentrality>,
}

impl CentralityReport {
    pub fn values(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.value).collect()
    }

    pub fn inverses(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.inverse).collect()
    }
}

/// Scores every vertex. Vertices are evaluated in parallel; the result is
/// identical to a sequential evaluation.
pub fn centrality_report(
    graph: &WeightedPoseGraph,
    measure: Measure,
    scope: Scope,
) -> Result<CentralityReport> {
    let vertices = (0..graph.vertex_count())
        .into_par_iter()
        .map(|v| {
            let (row, members) = scoped_distances(graph, v, scope)?;
            let value = match measure {
                Measure::Harmonic => harmonic_from_row(graph, &row, scope)?.centrality,
                Measure::Closeness => closeness_from_row(graph, &row, &members, scope)?,
            };
            Ok(VertexCentrality {
                value,
                inverse: value.recip(),
                scope_vertices: members,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CentralityReport {
        measure,
        scope,
        vertices,
    })
}
