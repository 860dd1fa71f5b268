//! How weight tables enter the intensity and association field losses.
//!
//! cargo run --example loss_weighting

use std::path::PathBuf;

use pose_weights::loss::{evaluate, parse_samples, DEFAULT_GAMMA, DEFAULT_SCALE_SPREAD};
use pose_weights::{attach_lengths, build_weight_table, parse_lengths, parse_skeleton, Scheme};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let skeleton = parse_skeleton(&std::fs::read_to_string(data.join("skeletons/p3.json"))?)?;
    let lengths = parse_lengths(
        &std::fs::read_to_string(data.join("lengths/p3_unit.json"))?,
        &skeleton,
        None,
    )?;
    let samples = parse_samples(
        &std::fs::read_to_string(data.join("samples/p3.json"))?,
        &skeleton,
    )?;
    let graph = attach_lengths(skeleton, &lengths)?;

    for scheme in [Scheme::Equal, Scheme::Global, Scheme::Local { radius: 1 }] {
        let table = build_weight_table(&graph, scheme)?;
        let report = evaluate(&samples, &table, DEFAULT_GAMMA, DEFAULT_SCALE_SPREAD)?;
        println!("{scheme}");
        for (i, t) in report.keypoints.iter().enumerate() {
            println!(
                "  {:<3} w={:.4} inner={:.4} weighted={:.4}",
                graph.skeleton().keypoint_name(i),
                t.weight,
                t.inner,
                t.weighted
            );
        }
        println!(
            "  intensity {:.4} (unweighted {:.4}), association {:.4} (unweighted {:.4})",
            report.intensity_total,
            report.intensity_unweighted,
            report.association_total,
            report.association_unweighted
        );
    }
    Ok(())
}
