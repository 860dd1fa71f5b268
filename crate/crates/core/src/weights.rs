//! Keypoint and connection training weights.
//!
//! Every scheme produces one raw value per keypoint:
//!
//! | scheme  | raw value for keypoint `k`                          |
//! |---------|-----------------------------------------------------|
//! | local   | `h(k)` on the ego graph of radius `r` (default 3)   |
//! | global  | `h(k)` on the whole pose graph                      |
//! | equal   | `1`                                                 |
//! | crafted | the keypoint's `crafted_multiplier`                 |
//!
//! Keypoint weights are the raw values rescaled to sum to the keypoint
//! count. A connection's raw value is the larger raw value of its two
//! endpoints; connection weights are rescaled to sum to the edge count.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centrality::{centrality_report, Measure, Scope};
use crate::document::{to_pretty_json, Metadata};
use crate::error::{Error, Result};
use crate::skeleton::{Skeleton, WeightedPoseGraph};

/// Ego radius used by [`Scheme::local`].
pub const DEFAULT_RADIUS: usize = 3;

/// Absolute tolerance on the normalized weight sums.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Inverse harmonic centrality inside each vertex's ego graph.
    Local {
        radius: usize,
    },
    /// Inverse harmonic centrality over the whole graph.
    Global,
    Equal,
    /// Per-keypoint multipliers from the skeleton file.
    Crafted,
}

impl Scheme {
    pub fn local() -> Self {
        Scheme::Local {
            radius: DEFAULT_RADIUS,
        }
    }

    /// Local scheme, with radius 0 standing for the global graph.
    pub fn local_or_global(radius: usize) -> Self {
        if radius == 0 {
            Scheme::Global
        } else {
            Scheme::Local { radius }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Local { .. } => "local",
            Scheme::Global => "global",
            Scheme::Equal => "equal",
            Scheme::Crafted => "crafted",
        }
    }

    pub fn radius(&self) -> Option<usize> {
        match self {
            Scheme::Local { radius } => Some(*radius),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Local { radius } => write!(f, "local(r={radius})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(Scheme::local()),
            "global" => Ok(Scheme::Global),
            "equal" => Ok(Scheme::Equal),
            "crafted" => Ok(Scheme::Crafted),
            other => Err(Error::Config(format!(
                "unknown scheme `{other}` (expected local, global, equal or crafted)"
            ))),
        }
    }
}

/// Un-normalized per-keypoint values of a scheme.
pub fn raw_vertex_values(graph: &WeightedPoseGraph, scheme: Scheme) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    match scheme {
        Scheme::Local { radius } => {
            Ok(centrality_report(graph, Measure::Harmonic, Scope::Ego { radius })?.inverses())
        }
        Scheme::Global => {
            Ok(centrality_report(graph, Measure::Harmonic, Scope::Global)?.inverses())
        }
        Scheme::Equal => Ok(vec![1.0; n]),
        Scheme::Crafted => Ok(graph.skeleton().crafted_multipliers()),
    }
}

fn normalize_to_count(raw: &[f64]) -> Vec<f64> {
    if raw.is_empty() {
        return Vec::new();
    }
    let total: f64 = raw.iter().sum();
    let scale = raw.len() as f64 / total;
    raw.iter().map(|r| r * scale).collect()
}

/// Keypoint weights, summing to the keypoint count.
pub fn vertex_weights(graph: &WeightedPoseGraph, scheme: Scheme) -> Result<Vec<f64>> {
    Ok(normalize_to_count(&raw_vertex_values(graph, scheme)?))
}

/// Connection weights from per-keypoint raw values: `max` of the two
/// endpoints, rescaled to sum to the edge count.
pub fn edge_weights(graph: &WeightedPoseGraph, vertex_values: &[f64]) -> Result<Vec<f64>> {
    if vertex_values.len() != graph.vertex_count() {
        return Err(Error::TableMismatch(format!(
            "{} vertex values for {} keypoints",
            vertex_values.len(),
            graph.vertex_count()
        )));
    }
    let raw: Vec<f64> = graph
        .skeleton()
        .edges()
        .iter()
        .map(|e| vertex_values[e.a].max(vertex_values[e.b]))
        .collect();
    Ok(normalize_to_count(&raw))
}

/// min / max / max-over-min of a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub ratio: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Summary {
            min,
            max,
            ratio: max / min,
        }
    }
}

/// Normalized weights of one scheme for one skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub scheme: Scheme,
    pub vertex_weights: Vec<f64>,
    pub edge_weights: Vec<f64>,
}

impl WeightTable {
    /// Checks positivity and both normalization sums.
    pub fn validate(&self) -> Result<()> {
        check_normalized("keypoint", &self.vertex_weights)?;
        check_normalized("connection", &self.edge_weights)
    }

    pub fn vertex_summary(&self) -> Summary {
        Summary::of(&self.vertex_weights)
    }

    pub fn edge_summary(&self) -> Summary {
        Summary::of(&self.edge_weights)
    }

    /// Errors unless the table has one weight per keypoint and connection.
    pub fn check_matches(&self, skeleton: &Skeleton) -> Result<()> {
        if self.vertex_weights.len() != skeleton.len() {
            return Err(Error::TableMismatch(format!(
                "{} keypoint weights for {} keypoints",
                self.vertex_weights.len(),
                skeleton.len()
            )));
        }
        if self.edge_weights.len() != skeleton.edge_count() {
            return Err(Error::TableMismatch(format!(
                "{} connection weights for {} connections",
                self.edge_weights.len(),
                skeleton.edge_count()
            )));
        }
        Ok(())
    }

    pub fn to_document(&self, skeleton: &Skeleton, metadata: &Metadata) -> Result<String> {
        self.check_matches(skeleton)?;
        Ok(to_pretty_json(
            &self.document_body(skeleton, Some(metadata.clone())),
        ))
    }

    fn document_body(
        &self,
        skeleton: &Skeleton,
        metadata: Option<Metadata>,
    ) -> WeightTableDocument {
        WeightTableDocument {
            metadata,
            skeleton: skeleton.name().to_owned(),
            scheme: self.scheme.name().to_owned(),
            radius: self.scheme.radius(),
            keypoints: skeleton
                .keypoints()
                .iter()
                .zip(&self.vertex_weights)
                .map(|(k, &weight)| KeypointWeight {
                    name: k.name.clone(),
                    weight,
                })
                .collect(),
            connections: (0..skeleton.edge_count())
                .zip(&self.edge_weights)
                .map(|(i, &weight)| {
                    let (a, b) = skeleton.edge_names(i);
                    ConnectionWeight {
                        a: a.to_owned(),
                        b: b.to_owned(),
                        weight,
                    }
                })
                .collect(),
            summary: TableSummary {
                keypoints: self.vertex_summary(),
                connections: self.edge_summary(),
            },
        }
    }

    /// Reads a table written by [`WeightTable::to_document`]. Keypoints and
    /// connections are matched to the skeleton by name, in any order.
    pub fn from_document(document: &str, skeleton: &Skeleton) -> Result<WeightTable> {
        let doc: WeightTableDocument =
            serde_json::from_str(document).map_err(Error::document("weight table"))?;
        let scheme = match doc.scheme.parse::<Scheme>()? {
            Scheme::Local { .. } => Scheme::Local {
                radius: doc.radius.unwrap_or(DEFAULT_RADIUS),
            },
            other => other,
        };

        let unknown = |name: &str| Error::UnknownKeypoint {
            name: name.to_owned(),
            context: "weight table".to_owned(),
        };
        let mut vertex_weights = vec![f64::NAN; skeleton.len()];
        for kw in &doc.keypoints {
            let i = skeleton
                .index_of(&kw.name)
                .ok_or_else(|| unknown(&kw.name))?;
            vertex_weights[i] = kw.weight;
        }
        let mut edge_weights = vec![f64::NAN; skeleton.edge_count()];
        for cw in &doc.connections {
            let a = skeleton.index_of(&cw.a).ok_or_else(|| unknown(&cw.a))?;
            let b = skeleton.index_of(&cw.b).ok_or_else(|| unknown(&cw.b))?;
            let e = skeleton
                .edge_position(crate::skeleton::EdgeKey::new(a, b))
                .ok_or_else(|| Error::ExtraEdge {
                    a: cw.a.clone(),
                    b: cw.b.clone(),
                })?;
            edge_weights[e] = cw.weight;
        }
        if let Some(i) = vertex_weights.iter().position(|w| w.is_nan()) {
            return Err(Error::TableMismatch(format!(
                "no weight for keypoint `{}`",
                skeleton.keypoint_name(i)
            )));
        }
        if let Some(i) = edge_weights.iter().position(|w| w.is_nan()) {
            let (a, b) = skeleton.edge_names(i);
            return Err(Error::TableMismatch(format!(
                "no weight for connection {a} - {b}"
            )));
        }
        let table = WeightTable {
            scheme,
            vertex_weights,
            edge_weights,
        };
        table.validate()?;
        Ok(table)
    }
}

fn check_normalized(what: &str, weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::Normalization(format!(
            "{what} weight {w} is not positive"
        )));
    }
    let total: f64 = weights.iter().sum();
    let expected = weights.len() as f64;
    if (total - expected).abs() > SUM_TOLERANCE {
        return Err(Error::Normalization(format!(
            "{what} weights sum to {total}, expected {expected}"
        )));
    }
    Ok(())
}

/// Computes and validates the full table for one scheme.
pub fn build_weight_table(graph: &WeightedPoseGraph, scheme: Scheme) -> Result<WeightTable> {
    let raw = raw_vertex_values(graph, scheme)?;
    let table = WeightTable {
        scheme,
        vertex_weights: normalize_to_count(&raw),
        edge_weights: edge_weights(graph, &raw)?,
    };
    table.validate()?;
    Ok(table)
}

/// All four schemes side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeComparison {
    pub tables: Vec<WeightTable>,
}

impl SchemeComparison {
    pub fn get(&self, name: &str) -> Option<&WeightTable> {
        self.tables.iter().find(|t| t.scheme.name() == name)
    }

    /// Fixed-width text table of per-scheme keypoint and connection ranges.
    pub fn format_table(&self) -> String {
        let mut out = format!(
            "{:<14} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
            "scheme", "kp min", "kp max", "kp ratio", "conn min", "conn max", "conn ratio"
        );
        for t in &self.tables {
            let v = t.vertex_summary();
            let e = t.edge_summary();
            out.push_str(&format!(
                "{:<14} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}\n",
                t.scheme.to_string(),
                v.min,
                v.max,
                v.ratio,
                e.min,
                e.max,
                e.ratio
            ));
        }
        out
    }

    pub fn to_document(&self, skeleton: &Skeleton, metadata: &Metadata) -> Result<String> {
        for t in &self.tables {
            t.check_matches(skeleton)?;
        }
        let doc = ComparisonDocument {
            metadata: metadata.clone(),
            skeleton: skeleton.name().to_owned(),
            schemes: self
                .tables
                .iter()
                .map(|t| t.document_body(skeleton, None))
                .collect(),
        };
        Ok(to_pretty_json(&doc))
    }
}

/// Local (with `radius`), global, equal and crafted tables, in that order.
/// A radius of 0 puts a second global table in the local slot.
pub fn compare_schemes(graph: &WeightedPoseGraph, radius: usize) -> Result<SchemeComparison> {
    let schemes = [
        Scheme::local_or_global(radius),
        Scheme::Global,
        Scheme::Equal,
        Scheme::Crafted,
    ];
    let tables = schemes
        .iter()
        .map(|&s| build_weight_table(graph, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(SchemeComparison { tables })
}

#[derive(Debug, Serialize, Deserialize)]
struct KeypointWeight {
    name: String,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConnectionWeight {
    a: String,
    b: String,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableSummary {
    keypoints: Summary,
    connections: Summary,
}

#[derive(Debug, Serialize, Deserialize)]
struct WeightTableDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
    skeleton: String,
    scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<usize>,
    keypoints: Vec<KeypointWeight>,
    connections: Vec<ConnectionWeight>,
    summary: TableSummary,
}

#[derive(Debug, Serialize)]
struct ComparisonDocument {
    metadata: Metadata,
    skeleton: String,
    schemes: Vec<WeightTableDocument>,
}
