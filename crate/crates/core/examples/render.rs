//! Write Graphviz and SVG renderings of local weights.
//!
//! cargo run --example render [-- output-dir]

use std::path::PathBuf;

use pose_weights::render::Layout;
use pose_weights::synthetic::{jittered_corpus, SyntheticOptions};
use pose_weights::{
    attach_lengths, build_weight_table, compute_edge_lengths, emit_dot, emit_svg, parse_lengths,
    parse_skeleton, stats_to_lengths, AveragingMode, Scheme, WeightedPoseGraph,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pose-weights-render"));
    std::fs::create_dir_all(&out)?;
    let read = |p: &str| std::fs::read_to_string(data.join(p));

    let lollipop = parse_skeleton(&read("skeletons/lollipop.json")?)?;
    let lengths = parse_lengths(&read("lengths/lollipop_unit.json")?, &lollipop, None)?;
    let lollipop_layout = Layout::parse(&read("layouts/lollipop.json")?, &lollipop)?;
    let mut jobs: Vec<(&str, WeightedPoseGraph, Layout)> = vec![(
        "lollipop",
        attach_lengths(lollipop, &lengths)?,
        lollipop_layout,
    )];

    for name in ["wholebody", "apollocar66"] {
        let skeleton = parse_skeleton(&read(&format!("skeletons/{name}.json"))?)?;
        let layout = Layout::parse(&read(&format!("layouts/{name}.json"))?, &skeleton)?;
        let corpus = jittered_corpus(&skeleton, &layout, &SyntheticOptions::default());
        let stats = compute_edge_lengths(&corpus, &skeleton, AveragingMode::ScaleNormalized)?;
        let graph = attach_lengths(
            skeleton.clone(),
            &stats_to_lengths(&stats, &skeleton, None)?,
        )?;
        jobs.push((name, graph, layout));
    }

    // a skeleton without a template pose gets the seeded spring layout
    let p3 = parse_skeleton(&read("skeletons/p3.json")?)?;
    let p3 = WeightedPoseGraph::uniform(p3, 1.0)?;
    let p3_layout = Layout::force_directed(&p3, 0);
    jobs.push(("p3", p3, p3_layout));

    for (name, graph, layout) in &jobs {
        let table = build_weight_table(graph, Scheme::local_or_global(3))?;
        let dot = out.join(format!("{name}.dot"));
        let svg = out.join(format!("{name}.svg"));
        std::fs::write(&dot, emit_dot(graph, &table, None)?)?;
        std::fs::write(&svg, emit_svg(graph, &table, layout, None)?)?;
        println!("{} and {}", dot.display(), svg.display());
    }
    Ok(())
}
