//! Training weights for pose keypoints and connections.
//!
//! A pose skeleton is treated as a graph whose edges carry the average
//! Euclidean length of each connection over a set of annotations. Each
//! keypoint is scored by its harmonic centrality inside a hop-limited ego
//! graph; the inverse of that score, normalized to the keypoint count,
//! becomes the keypoint's training weight. Connections take the larger of
//! their endpoints' values, normalized to the connection count.
//!
//! ```
//! use pose_weights::{build_weight_table, Scheme, Skeleton, WeightedPoseGraph};
//!
//! let skeleton = Skeleton::new("p3", ["a", "b", "c"], &[(0, 1), (1, 2)]).unwrap();
//! let graph = WeightedPoseGraph::uniform(skeleton, 1.0).unwrap();
//! let table = build_weight_table(&graph, Scheme::Global).unwrap();
//! assert!((table.vertex_weights[0] - 12.0 / 11.0).abs() < 1e-12);
//! assert!((table.vertex_weights[1] - 9.0 / 11.0).abs() < 1e-12);
//! ```

pub mod annotations;
pub mod centrality;
pub mod cli;
pub mod document;
pub mod error;
pub mod graph;
pub mod loss;
pub mod render;
pub mod skeleton;
pub mod synthetic;
pub mod weights;

pub use annotations::{
    compute_edge_lengths, parse_annotations, parse_lengths, stats_to_lengths, AnnotationCorpus,
    AveragingMode, EdgeLengthAccumulator, EdgeLengthStats, EdgeStat,
};
pub use centrality::{centrality_report, closeness, harmonic_h, CentralityReport, Measure, Scope};
pub use document::Metadata;
pub use error::{Error, Result};
pub use graph::{all_pairs_oracle, ego_graph, shortest_paths_from, EgoGraph};
pub use loss::{
    bce_focal, laplace_loss, scale_loss, weighted_caf_loss, weighted_cif_loss, FieldSample,
};
pub use render::{emit_dot, emit_svg, Layout};
pub use skeleton::{attach_lengths, parse_skeleton, EdgeKey, Skeleton, WeightedPoseGraph};
pub use weights::{build_weight_table, compare_schemes, Scheme, SchemeComparison, WeightTable};
