//! Local, global, equal and crafted weights side by side.
//!
//! cargo run --example compare_schemes

use std::path::{Path, PathBuf};

use pose_weights::render::Layout;
use pose_weights::synthetic::{jittered_corpus, SyntheticOptions};
use pose_weights::{
    attach_lengths, compare_schemes, compute_edge_lengths, parse_lengths, parse_skeleton,
    stats_to_lengths, AveragingMode, WeightedPoseGraph,
};

fn read(path: PathBuf) -> std::io::Result<String> {
    std::fs::read_to_string(path)
}

fn template_graph(
    data: &Path,
    name: &str,
) -> Result<WeightedPoseGraph, Box<dyn std::error::Error>> {
    let skeleton = parse_skeleton(&read(data.join(format!("skeletons/{name}.json")))?)?;
    let layout = Layout::parse(&read(data.join(format!("layouts/{name}.json")))?, &skeleton)?;
    let corpus = jittered_corpus(
        &skeleton,
        &layout,
        &SyntheticOptions {
            instances: 300,
            ..Default::default()
        },
    );
    let stats = compute_edge_lengths(&corpus, &skeleton, AveragingMode::ScaleNormalized)?;
    let lengths = stats_to_lengths(&stats, &skeleton, None)?;
    Ok(attach_lengths(skeleton, &lengths)?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");

    let lollipop = parse_skeleton(&read(data.join("skeletons/lollipop.json"))?)?;
    let lengths = parse_lengths(
        &read(data.join("lengths/lollipop_unit.json"))?,
        &lollipop,
        None,
    )?;
    let graphs = [
        (
            "lollipop, unit lengths",
            attach_lengths(lollipop, &lengths)?,
        ),
        (
            "wholebody, template lengths",
            template_graph(&data, "wholebody")?,
        ),
        (
            "apollocar66, template lengths",
            template_graph(&data, "apollocar66")?,
        ),
    ];

    for (label, graph) in &graphs {
        println!("{label}");
        print!("{}", compare_schemes(graph, 3)?.format_table());
        println!();
    }
    Ok(())
}
