//! Load the bundled skeletons and print their shape.
//!
//! cargo run --example skeleton [-- path/to/skeleton.json ...]

use std::path::PathBuf;

use pose_weights::graph::hop_diameter;
use pose_weights::{parse_skeleton, WeightedPoseGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/skeletons");
    let mut paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        paths = ["p3", "c5", "lollipop", "wholebody", "apollocar66"]
            .iter()
            .map(|n| data.join(format!("{n}.json")))
            .collect();
    }

    println!(
        "{:<16} {:>9} {:>11} {:>8} {:>8}",
        "skeleton", "keypoints", "connections", "diameter", "crafted"
    );
    for path in paths {
        let skeleton = parse_skeleton(&std::fs::read_to_string(&path)?)?;
        let crafted = skeleton
            .crafted_multipliers()
            .iter()
            .filter(|&&m| m != 1.0)
            .count();
        let name = skeleton.name().to_owned();
        let (n, e) = (skeleton.len(), skeleton.edge_count());
        let graph = WeightedPoseGraph::uniform(skeleton, 1.0)?;
        let diameter = hop_diameter(&graph).unwrap_or(0);
        println!("{name:<16} {n:>9} {e:>11} {diameter:>8} {crafted:>8}");
    }
    Ok(())
}
