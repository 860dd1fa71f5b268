//! Weighted shortest paths and hop-limited ego graphs.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::skeleton::{Neighbor, WeightedPoseGraph};

/// Vertex count above which [`all_pairs_oracle`] refuses to run.
pub const ORACLE_VERTEX_LIMIT: usize = 64;

/// Undirected graph with positive edge lengths, addressed by dense
/// vertex indices `0..vertex_count()`.
pub trait LengthGraph {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, vertex: usize) -> &[Neighbor];
}

impl LengthGraph for WeightedPoseGraph {
    fn vertex_count(&self) -> usize {
        WeightedPoseGraph::vertex_count(self)
    }

    fn neighbors(&self, vertex: usize) -> &[Neighbor] {
        WeightedPoseGraph::neighbors(self, vertex)
    }
}

/// Single-source distances. Unreachable vertices hold `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub source: usize,
    pub distances: Vec<f64>,
}

impl DistanceRow {
    pub fn is_reachable(&self, vertex: usize) -> bool {
        self.distances[vertex].is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    distance: f64,
    vertex: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .distance
            .total_cmp(&self.distance)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source` over edge lengths.
pub fn shortest_paths_from<G: LengthGraph + ?Sized>(
    graph: &G,
    source: usize,
) -> Result<DistanceRow> {
    let n = graph.vertex_count();
    if source >= n {
        return Err(Error::InvalidVertex { index: source, n });
    }
    let mut distances = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    distances[source] = 0.0;
    heap.push(Candidate {
        distance: 0.0,
        vertex: source,
    });

    while let Some(Candidate { distance, vertex }) = heap.pop() {
        if settled[vertex] {
            continue;
        }
        settled[vertex] = true;
        for nb in graph.neighbors(vertex) {
            let next = distance + nb.length;
            if next < distances[nb.vertex] {
                distances[nb.vertex] = next;
                heap.push(Candidate {
                    distance: next,
                    vertex: nb.vertex,
                });
            }
        }
    }
    Ok(DistanceRow { source, distances })
}

/// Exhaustive all-pairs relaxation (Floyd-Warshall). Test oracle only;
/// refuses graphs larger than [`ORACLE_VERTEX_LIMIT`].
pub fn all_pairs_oracle<G: LengthGraph + ?Sized>(graph: &G) -> Result<Vec<Vec<f64>>> {
    let n = graph.vertex_count();
    if n > ORACLE_VERTEX_LIMIT {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_VERTEX_LIMIT,
        });
    }
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0.0;
        for nb in graph.neighbors(u) {
            if nb.length < row[nb.vertex] {
                row[nb.vertex] = nb.length;
            }
        }
    }
    for k in 0..n {
        let via = d[k].clone();
        for row in d.iter_mut() {
            let dik = row[k];
            if !dik.is_finite() {
                continue;
            }
            for (dij, dkj) in row.iter_mut().zip(&via) {
                let through = dik + dkj;
                if through < *dij {
                    *dij = through;
                }
            }
        }
    }
    Ok(d)
}

/// Hop distances (edge counts) from `source`; `None` when unreachable.
pub fn hop_distances<G: LengthGraph + ?Sized>(
    graph: &G,
    source: usize,
) -> Result<Vec<Option<usize>>> {
    let n = graph.vertex_count();
    if source >= n {
        return Err(Error::InvalidVertex { index: source, n });
    }
    let mut hops = vec![None; n];
    hops[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let next = hops[u].map(|h| h + 1);
        for nb in graph.neighbors(u) {
            if hops[nb.vertex].is_none() {
                hops[nb.vertex] = next;
                queue.push_back(nb.vertex);
            }
        }
    }
    Ok(hops)
}

/// Largest hop distance between any two vertices; `None` when disconnected.
pub fn hop_diameter<G: LengthGraph + ?Sized>(graph: &G) -> Option<usize> {
    let mut diameter = 0;
    for v in 0..graph.vertex_count() {
        let hops = hop_distances(graph, v).ok()?;
        for h in hops {
            diameter = diameter.max(h?);
        }
    }
    Some(diameter)
}

/// Induced subgraph on the hop-ball of `radius` around `center`.
///
/// Vertices are re-indexed locally in ascending order of their graph
/// index; [`EgoGraph::global`] maps back.
#[derive(Debug, Clone)]
pub struct EgoGraph {
    center: usize,
    radius: usize,
    vertices: Vec<usize>,
    edges: Vec<usize>,
    adjacency: Vec<Vec<Neighbor>>,
}

impl EgoGraph {
    /// Center in graph indexing.
    pub fn center(&self) -> usize {
        self.center
    }

    /// Center in local indexing.
    pub fn local_center(&self) -> usize {
        self.local(self.center).expect("center is in its own ball")
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Ball members in graph indexing, ascending.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Induced skeleton edge indices, ascending.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn global(&self, local: usize) -> usize {
        self.vertices[local]
    }

    pub fn local(&self, global: usize) -> Option<usize> {
        self.vertices.binary_search(&global).ok()
    }
}

impl LengthGraph for EgoGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn neighbors(&self, vertex: usize) -> &[Neighbor] {
        &self.adjacency[vertex]
    }
}

/// Extracts the ego graph of `radius` hops around `center`. Edge lengths
/// play no part in membership.
pub fn ego_graph(graph: &WeightedPoseGraph, center: usize, radius: usize) -> Result<EgoGraph> {
    let hops = hop_distances(graph, center)?;
    let vertices: Vec<usize> = hops
        .iter()
        .enumerate()
        .filter(|(_, h)| matches!(h, Some(h) if *h <= radius))
        .map(|(v, _)| v)
        .collect();

    let mut local = vec![usize::MAX; graph.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let mut adjacency = vec![Vec::new(); vertices.len()];
    let mut edges = Vec::new();
    for (i, e) in graph.skeleton().edges().iter().enumerate() {
        let (la, lb) = (local[e.a], local[e.b]);
        if la == usize::MAX || lb == usize::MAX {
            continue;
        }
        let length = graph.lengths()[i];
        adjacency[la].push(Neighbor {
            vertex: lb,
            edge: i,
            length,
        });
        adjacency[lb].push(Neighbor {
            vertex: la,
            edge: i,
            length,
        });
        edges.push(i);
    }
    Ok(EgoGraph {
        center,
        radius,
        vertices,
        edges,
        adjacency,
    })
}
