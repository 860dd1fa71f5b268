//! Keypoint and connection weights for the WholeBody skeleton.
//!
//! Lengths come from a synthetic corpus built on the template pose, so the
//! numbers approximate, but do not reproduce, dataset-derived weights.
//!
//! cargo run --example weights [-- radius]

use std::path::PathBuf;

use pose_weights::render::Layout;
use pose_weights::synthetic::{jittered_corpus, SyntheticOptions};
use pose_weights::{
    attach_lengths, build_weight_table, compute_edge_lengths, parse_skeleton, stats_to_lengths,
    AveragingMode, Scheme,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let radius: usize = std::env::args()
        .nth(1)
        .map(|r| r.parse())
        .transpose()?
        .unwrap_or(3);
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let skeleton = parse_skeleton(&std::fs::read_to_string(
        data.join("skeletons/wholebody.json"),
    )?)?;
    let layout = Layout::parse(
        &std::fs::read_to_string(data.join("layouts/wholebody.json"))?,
        &skeleton,
    )?;

    let corpus = jittered_corpus(
        &skeleton,
        &layout,
        &SyntheticOptions {
            instances: 500,
            ..Default::default()
        },
    );
    let stats = compute_edge_lengths(&corpus, &skeleton, AveragingMode::ScaleNormalized)?;
    let lengths = stats_to_lengths(&stats, &skeleton, None)?;
    let graph = attach_lengths(skeleton, &lengths)?;

    let scheme = Scheme::local_or_global(radius);
    let table = build_weight_table(&graph, scheme)?;
    let s = table.vertex_summary();
    println!(
        "{scheme}: keypoint weights {:.3} .. {:.3}, ratio {:.1}",
        s.min, s.max, s.ratio
    );

    let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
    order.sort_by(|&a, &b| table.vertex_weights[b].total_cmp(&table.vertex_weights[a]));
    let name = |i: usize| graph.skeleton().keypoint_name(i);
    println!("highest:");
    for &i in &order[..5] {
        println!("  {:<16} {:.3}", name(i), table.vertex_weights[i]);
    }
    println!("lowest:");
    for &i in order.iter().rev().take(5) {
        println!("  {:<16} {:.3}", name(i), table.vertex_weights[i]);
    }

    let e = table.edge_summary();
    println!("connection weights {:.3} .. {:.3}", e.min, e.max);
    Ok(())
}
