#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use pose_weights::{parse_skeleton, Skeleton, WeightedPoseGraph};
use proptest::prelude::*;
use rand::Rng;

pub fn data(relative: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(relative)
}

pub fn read_data(relative: &str) -> String {
    std::fs::read_to_string(data(relative)).unwrap()
}

pub fn fixture_skeleton(name: &str) -> Skeleton {
    parse_skeleton(&read_data(&format!("skeletons/{name}.json"))).unwrap()
}

pub fn unit_graph(n: usize, edges: &[(usize, usize)]) -> WeightedPoseGraph {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    WeightedPoseGraph::uniform(Skeleton::new("g", names, edges).unwrap(), 1.0).unwrap()
}

pub fn path_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn cycle_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

pub fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

/// K5 on 0..5, bridge 4-5, tail 5-6-7-8-9.
pub fn lollipop() -> WeightedPoseGraph {
    let mut edges = complete_edges(5);
    edges.extend([(4, 5), (5, 6), (6, 7), (7, 8), (8, 9)]);
    unit_graph(10, &edges)
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in row-major upper-triangle order
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Spanning tree from `parents` plus the flagged extra pairs, with
/// per-pair lengths and crafted multipliers.
pub fn assemble(
    n: usize,
    parents: &[usize],
    extra: &[bool],
    lengths: &[f64],
    multipliers: &[f64],
) -> WeightedPoseGraph {
    let mut edges = BTreeSet::new();
    for (i, &p) in parents.iter().enumerate() {
        edges.insert((p, i + 1));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if extra[pair_index(n, i, j)] {
                edges.insert((i, j));
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let skeleton = Skeleton::new("random", names, &edges)
        .unwrap()
        .with_multipliers(&multipliers[..n])
        .unwrap();
    let lens = edges
        .iter()
        .map(|&(i, j)| lengths[pair_index(n, i, j)])
        .collect();
    WeightedPoseGraph::from_lengths(skeleton, lens).unwrap()
}

/// Random connected graph with `min..=max` vertices and lengths in [0.1, 10).
pub fn connected_graph(
    min: usize,
    max: usize,
    extra_probability: f64,
) -> impl Strategy<Value = WeightedPoseGraph> {
    (min..=max)
        .prop_flat_map(move |n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                (1..n).map(|i| 0..i).collect::<Vec<_>>(),
                proptest::collection::vec(proptest::bool::weighted(extra_probability), pairs),
                proptest::collection::vec(0.1f64..10.0, pairs),
                proptest::collection::vec(0.5f64..4.0, n),
            )
        })
        .prop_map(|(n, parents, extra, lengths, multipliers)| {
            assemble(n, &parents, &extra, &lengths, &multipliers)
        })
}

/// Seeded counterpart of [`connected_graph`].
pub fn random_connected_graph(
    rng: &mut impl Rng,
    min: usize,
    max: usize,
    extra_probability: f64,
) -> WeightedPoseGraph {
    let n = rng.gen_range(min..=max);
    let pairs = n * (n - 1) / 2;
    let parents: Vec<usize> = (1..n).map(|i| rng.gen_range(0..i)).collect();
    let extra: Vec<bool> = (0..pairs)
        .map(|_| rng.gen_bool(extra_probability))
        .collect();
    let lengths: Vec<f64> = (0..pairs).map(|_| rng.gen_range(0.1..10.0)).collect();
    let multipliers: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
    assemble(n, &parents, &extra, &lengths, &multipliers)
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| relative_error(x, y))
        .fold(0.0, f64::max)
}
