//! Average connection lengths over an annotation corpus.
//!
//! Without arguments a synthetic WholeBody corpus is generated from the
//! template pose. With arguments, reads a COCO keypoint file:
//!
//! cargo run --example ingest -- skeleton.json person_keypoints.json

use std::path::PathBuf;

use pose_weights::render::Layout;
use pose_weights::synthetic::{jittered_corpus, SyntheticOptions};
use pose_weights::{
    compute_edge_lengths, parse_annotations, parse_skeleton, AveragingMode, Metadata,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let args: Vec<String> = std::env::args().skip(1).collect();

    let (skeleton, corpus) = match args.as_slice() {
        [skeleton, annotations] => {
            let s = parse_skeleton(&std::fs::read_to_string(skeleton)?)?;
            let c = parse_annotations(&std::fs::read_to_string(annotations)?, &s)?;
            (s, c)
        }
        _ => {
            let s = parse_skeleton(&std::fs::read_to_string(
                data.join("skeletons/wholebody.json"),
            )?)?;
            let layout = Layout::parse(
                &std::fs::read_to_string(data.join("layouts/wholebody.json"))?,
                &s,
            )?;
            let options = SyntheticOptions {
                instances: 1000,
                unlabeled: 0.3,
                ..Default::default()
            };
            let c = jittered_corpus(&s, &layout, &options);
            (s, c)
        }
    };

    for mode in [AveragingMode::Raw, AveragingMode::ScaleNormalized] {
        let stats = compute_edge_lengths(&corpus, &skeleton, mode)?;
        println!(
            "{mode}: {}/{} connections covered by {} instances",
            stats.covered_count(),
            stats.edges.len(),
            stats.instances
        );
        let mut order: Vec<usize> = (0..stats.edges.len())
            .filter(|&i| stats.edges[i].count > 0)
            .collect();
        order.sort_by(|&a, &b| {
            stats.edges[a]
                .mean_length
                .total_cmp(&stats.edges[b].mean_length)
        });
        for (label, i) in [("shortest", order[0]), ("longest", order[order.len() - 1])] {
            let (a, b) = skeleton.edge_names(i);
            let e = stats.edges[i];
            println!(
                "  {label:<8} {a} - {b}: {:.4} over {} instances",
                e.mean_length, e.count
            );
        }
    }

    let stats = compute_edge_lengths(&corpus, &skeleton, AveragingMode::ScaleNormalized)?;
    let doc = stats.to_document(
        &skeleton,
        &Metadata::new(serde_json::json!({"example": "ingest"})),
    )?;
    println!("statistics document: {} bytes, first lines:", doc.len());
    for line in doc.lines().take(8) {
        println!("  {line}");
    }
    Ok(())
}
