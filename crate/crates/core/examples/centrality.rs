//! Harmonic and closeness centrality on the lollipop graph, globally and
//! inside radius-limited ego graphs.
//!
//! cargo run --example centrality

use pose_weights::graph::ego_graph;
use pose_weights::{centrality_report, Measure, Scope, Skeleton, WeightedPoseGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names = ["k0", "k1", "k2", "k3", "k4", "t0", "t1", "t2", "t3", "t4"];
    let mut edges: Vec<(usize, usize)> = (0..5)
        .flat_map(|i| ((i + 1)..5).map(move |j| (i, j)))
        .collect();
    edges.extend([(4, 5), (5, 6), (6, 7), (7, 8), (8, 9)]);
    let graph = WeightedPoseGraph::uniform(Skeleton::new("lollipop", names, &edges)?, 1.0)?;

    let scopes = [
        Scope::Global,
        Scope::Ego { radius: 3 },
        Scope::Ego { radius: 1 },
    ];
    let reports: Vec<_> = scopes
        .iter()
        .map(|&s| centrality_report(&graph, Measure::Harmonic, s))
        .collect::<Result<_, _>>()?;
    let closeness = centrality_report(&graph, Measure::Closeness, Scope::Global)?;

    print!("{:<4} {:>8}", "", "ego(3)");
    for s in &scopes {
        print!(" {:>12}", format!("H {s}"));
    }
    println!(" {:>12}", "closeness");
    for (v, name) in names.iter().enumerate() {
        let ball = ego_graph(&graph, v, 3)?.vertices().len();
        print!("{name:<4} {ball:>8}");
        for r in &reports {
            print!(" {:>12.4}", r.vertices[v].value);
        }
        println!(" {:>12.4}", closeness.vertices[v].value);
    }
    Ok(())
}
