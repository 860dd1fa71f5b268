//! COCO-style keypoint annotations and per-connection average lengths.
//!
//! The input layout is the COCO keypoint format: an `annotations` array
//! whose entries carry a flat `keypoints` array `[x0, y0, v0, x1, y1, v1, ...]`
//! and an optional `bbox = [x, y, w, h]`. Entries in the COCO-WholeBody
//! layout, where face, hand and foot points live in separate
//! `foot_kpts` / `face_kpts` / `lefthand_kpts` / `righthand_kpts` arrays,
//! are concatenated in that order after the body `keypoints`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::document::{to_pretty_json, Metadata};
use crate::error::{Error, Result};
use crate::skeleton::{EdgeKey, Skeleton};

/// Zero mean lengths are replaced by this fraction of the largest mean.
pub const ZERO_LENGTH_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Visibility {
    Unlabeled = 0,
    Occluded = 1,
    Visible = 2,
}

impl Visibility {
    pub fn is_labeled(self) -> bool {
        self != Visibility::Unlabeled
    }

    fn from_flag(v: f64) -> Option<Visibility> {
        if v == 0.0 {
            Some(Visibility::Unlabeled)
        } else if v == 1.0 {
            Some(Visibility::Occluded)
        } else if v == 2.0 {
            Some(Visibility::Visible)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnotatedKeypoint {
    pub x: f64,
    pub y: f64,
    pub visibility: Visibility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceAnnotation {
    /// The entry's `id`, or its position in the array when absent.
    pub id: String,
    pub keypoints: Vec<AnnotatedKeypoint>,
    /// `[x, y, w, h]` in pixels.
    pub bbox: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationCorpus {
    pub instances: Vec<InstanceAnnotation>,
}

impl AnnotationCorpus {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Writes the corpus in the COCO keypoint layout read by
    /// [`parse_annotations`]. Numeric ids are written as numbers.
    pub fn to_coco_document(&self) -> String {
        let annotations: Vec<serde_json::Value> = self
            .instances
            .iter()
            .map(|inst| {
                let id = match inst.id.parse::<u64>() {
                    Ok(n) => serde_json::Value::from(n),
                    Err(_) => serde_json::Value::from(inst.id.clone()),
                };
                let keypoints: Vec<f64> = inst
                    .keypoints
                    .iter()
                    .flat_map(|k| [k.x, k.y, k.visibility as u8 as f64])
                    .collect();
                let mut entry = serde_json::json!({
                    "id": id,
                    "num_keypoints": inst.keypoints.iter().filter(|k| k.visibility.is_labeled()).count(),
                    "keypoints": keypoints,
                });
                if let Some(b) = inst.bbox {
                    entry["bbox"] = serde_json::json!(b);
                }
                entry
            })
            .collect();
        to_pretty_json(&serde_json::json!({ "annotations": annotations }))
    }
}

#[derive(Deserialize)]
struct CocoDocument {
    annotations: Vec<CocoAnnotation>,
}

#[derive(Deserialize)]
struct CocoAnnotation {
    #[serde(default)]
    id: Option<serde_json::Value>,
    #[serde(default)]
    keypoints: Vec<f64>,
    #[serde(default)]
    bbox: Option<Vec<f64>>,
    #[serde(default)]
    foot_kpts: Option<Vec<f64>>,
    #[serde(default)]
    face_kpts: Option<Vec<f64>>,
    #[serde(default)]
    lefthand_kpts: Option<Vec<f64>>,
    #[serde(default)]
    righthand_kpts: Option<Vec<f64>>,
}

/// Parses a COCO keypoint annotation document against `skeleton`.
pub fn parse_annotations(document: &str, skeleton: &Skeleton) -> Result<AnnotationCorpus> {
    let doc: CocoDocument =
        serde_json::from_str(document).map_err(Error::document("annotation"))?;
    let n = skeleton.len();

    let instances = doc
        .annotations
        .into_iter()
        .enumerate()
        .map(|(position, entry)| {
            let id = match &entry.id {
                Some(serde_json::Value::String(s)) => s.clone(),
                Some(other) => other.to_string(),
                None => format!("#{position}"),
            };
            let mut flat = entry.keypoints;
            for part in [
                entry.foot_kpts,
                entry.face_kpts,
                entry.lefthand_kpts,
                entry.righthand_kpts,
            ]
            .into_iter()
            .flatten()
            {
                flat.extend(part);
            }
            if flat.len() != 3 * n {
                return Err(Error::KeypointCountMismatch {
                    id,
                    expected: 3 * n,
                    found: flat.len(),
                });
            }

            let keypoints = flat
                .chunks_exact(3)
                .enumerate()
                .map(|(k, c)| {
                    let visibility =
                        Visibility::from_flag(c[2]).ok_or_else(|| Error::InvalidVisibility {
                            id: id.clone(),
                            keypoint: skeleton.keypoint_name(k).to_owned(),
                            value: c[2],
                        })?;
                    if visibility.is_labeled() && !(c[0].is_finite() && c[1].is_finite()) {
                        return Err(Error::NonFiniteCoordinate {
                            id: id.clone(),
                            keypoint: skeleton.keypoint_name(k).to_owned(),
                        });
                    }
                    Ok(AnnotatedKeypoint {
                        x: c[0],
                        y: c[1],
                        visibility,
                    })
                })
                .collect::<Result<Vec<_>>>()?;

            let bbox = entry
                .bbox
                .filter(|b| b.len() == 4)
                .map(|b| [b[0], b[1], b[2], b[3]]);
            Ok(InstanceAnnotation {
                id,
                keypoints,
                bbox,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnnotationCorpus { instances })
}

/// How per-instance distances are scaled before averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AveragingMode {
    /// Pixel distances as annotated.
    #[default]
    Raw,
    /// Each distance divided by the square root of its instance's bbox area.
    ScaleNormalized,
}

impl AveragingMode {
    pub fn name(&self) -> &'static str {
        match self {
            AveragingMode::Raw => "raw",
            AveragingMode::ScaleNormalized => "scale-normalized",
        }
    }
}

impl fmt::Display for AveragingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AveragingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(AveragingMode::Raw),
            "scale-normalized" | "scale_normalized" => Ok(AveragingMode::ScaleNormalized),
            other => Err(Error::Config(format!(
                "unknown averaging mode `{other}` (expected raw or scale-normalized)"
            ))),
        }
    }
}

/// Correctly rounded floating-point sum (Shewchuk's algorithm, as in
/// Python's `math.fsum`). The result does not depend on insertion order.
#[derive(Debug, Clone, Default)]
pub(crate) struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub(crate) fn add(&mut self, value: f64) {
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub(crate) fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    pub(crate) fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round-half-even correction when the remaining partials push the
        // exact sum past the halfway point
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

/// Count and mean length of one connection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStat {
    pub count: u64,
    pub mean_length: f64,
}

/// Per-connection statistics, in skeleton edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengthStats {
    pub mode: AveragingMode,
    pub instances: usize,
    pub edges: Vec<EdgeStat>,
}

impl EdgeLengthStats {
    /// Edge indices with no contributing instance.
    pub fn uncovered(&self) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, s)| s.count == 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn covered_count(&self) -> usize {
        self.edges.len() - self.uncovered().len()
    }

    pub fn to_document(&self, skeleton: &Skeleton, metadata: &Metadata) -> Result<String> {
        if self.edges.len() != skeleton.edge_count() {
            return Err(Error::TableMismatch(format!(
                "{} edge statistics for {} connections",
                self.edges.len(),
                skeleton.edge_count()
            )));
        }
        let doc = LengthsDocument {
            metadata: Some(metadata.clone()),
            skeleton: Some(skeleton.name().to_owned()),
            mode: Some(self.mode.name().to_owned()),
            instances: Some(self.instances),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let (a, b) = skeleton.edge_names(i);
                    LengthEntry {
                        a: a.to_owned(),
                        b: b.to_owned(),
                        count: Some(s.count),
                        mean_length: Some(s.mean_length),
                        length: None,
                    }
                })
                .collect(),
        };
        Ok(to_pretty_json(&doc))
    }
}

/// Running per-edge sums. Accumulators over disjoint parts of a corpus can
/// be merged in any grouping and give bit-identical statistics.
#[derive(Debug, Clone)]
pub struct EdgeLengthAccumulator {
    mode: AveragingMode,
    instances: usize,
    sums: Vec<ExactSum>,
    counts: Vec<u64>,
}

impl EdgeLengthAccumulator {
    pub fn new(skeleton: &Skeleton, mode: AveragingMode) -> Self {
        EdgeLengthAccumulator {
            mode,
            instances: 0,
            sums: vec![ExactSum::default(); skeleton.edge_count()],
            counts: vec![0; skeleton.edge_count()],
        }
    }

    pub fn add(&mut self, skeleton: &Skeleton, instance: &InstanceAnnotation) -> Result<()> {
        let scale = match self.mode {
            AveragingMode::Raw => 1.0,
            AveragingMode::ScaleNormalized => match instance.bbox {
                Some([_, _, w, h]) if w * h > 0.0 && (w * h).is_finite() => (w * h).sqrt(),
                _ => {
                    return Err(Error::MissingBbox {
                        id: instance.id.clone(),
                    })
                }
            },
        };
        self.instances += 1;
        for (i, e) in skeleton.edges().iter().enumerate() {
            let (pa, pb) = (&instance.keypoints[e.a], &instance.keypoints[e.b]);
            if !(pa.visibility.is_labeled() && pb.visibility.is_labeled()) {
                continue;
            }
            let d = (pa.x - pb.x).hypot(pa.y - pb.y);
            self.sums[i].add(d / scale);
            self.counts[i] += 1;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &EdgeLengthAccumulator) {
        self.instances += other.instances;
        for (s, o) in self.sums.iter_mut().zip(&other.sums) {
            s.merge(o);
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
    }

    pub fn finish(&self) -> EdgeLengthStats {
        let edges = self
            .sums
            .iter()
            .zip(&self.counts)
            .map(|(s, &count)| EdgeStat {
                count,
                mean_length: if count == 0 {
                    0.0
                } else {
                    s.value() / count as f64
                },
            })
            .collect();
        EdgeLengthStats {
            mode: self.mode,
            instances: self.instances,
            edges,
        }
    }
}

/// Averages every connection's length over the instances in which both
/// endpoints are labeled (visibility 1 or 2).
pub fn compute_edge_lengths(
    corpus: &AnnotationCorpus,
    skeleton: &Skeleton,
    mode: AveragingMode,
) -> Result<EdgeLengthStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut acc = EdgeLengthAccumulator::new(skeleton, mode);
    for instance in &corpus.instances {
        if instance.keypoints.len() != skeleton.len() {
            return Err(Error::KeypointCountMismatch {
                id: instance.id.clone(),
                expected: 3 * skeleton.len(),
                found: 3 * instance.keypoints.len(),
            });
        }
        acc.add(skeleton, instance)?;
    }
    let stats = acc.finish();
    if stats.covered_count() == 0 && !stats.edges.is_empty() {
        return Err(Error::NoCoveredEdges);
    }
    Ok(stats)
}

fn resolve_lengths(
    skeleton: &Skeleton,
    values: &[Option<f64>],
    fallback: Option<f64>,
) -> Result<BTreeMap<EdgeKey, f64>> {
    if let Some(f) = fallback {
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::NonPositive {
                what: "fallback length",
                value: f,
            });
        }
    }
    let largest = values.iter().flatten().copied().fold(0.0, f64::max);
    let mut out = BTreeMap::new();
    for (i, v) in values.iter().enumerate() {
        let length = match (*v, fallback) {
            (Some(0.0), _) => {
                if largest <= 0.0 {
                    return Err(Error::DegenerateLengths);
                }
                ZERO_LENGTH_EPSILON * largest
            }
            (Some(l), _) => l,
            (None, Some(f)) => f,
            (None, None) => {
                let (a, b) = skeleton.edge_names(i);
                return Err(Error::UncoveredEdge {
                    a: a.to_owned(),
                    b: b.to_owned(),
                });
            }
        };
        out.insert(skeleton.edges()[i].key(), length);
    }
    Ok(out)
}

/// Turns statistics into an edge-length map for
/// [`attach_lengths`](crate::skeleton::attach_lengths). Uncovered edges
/// take `fallback` or fail; zero means are clamped to
/// [`ZERO_LENGTH_EPSILON`] times the largest mean.
pub fn stats_to_lengths(
    stats: &EdgeLengthStats,
    skeleton: &Skeleton,
    fallback: Option<f64>,
) -> Result<BTreeMap<EdgeKey, f64>> {
    if stats.edges.len() != skeleton.edge_count() {
        return Err(Error::TableMismatch(format!(
            "{} edge statistics for {} connections",
            stats.edges.len(),
            skeleton.edge_count()
        )));
    }
    let values: Vec<Option<f64>> = stats
        .edges
        .iter()
        .map(|s| (s.count > 0).then_some(s.mean_length))
        .collect();
    resolve_lengths(skeleton, &values, fallback)
}

/// Reads an edge-length document: either statistics written by the ingest
/// step (`count` + `mean_length` per edge) or hand-supplied `length`
/// values. Edges absent from the document count as uncovered.
pub fn parse_lengths(
    document: &str,
    skeleton: &Skeleton,
    fallback: Option<f64>,
) -> Result<BTreeMap<EdgeKey, f64>> {
    let doc: LengthsDocument =
        serde_json::from_str(document).map_err(Error::document("edge length"))?;
    let mut values = vec![None; skeleton.edge_count()];
    for entry in &doc.edges {
        let index = |name: &str| {
            skeleton
                .index_of(name)
                .ok_or_else(|| Error::UnknownKeypoint {
                    name: name.to_owned(),
                    context: "edge length document".to_owned(),
                })
        };
        let key = EdgeKey::new(index(&entry.a)?, index(&entry.b)?);
        let edge = skeleton
            .edge_position(key)
            .ok_or_else(|| Error::ExtraEdge {
                a: entry.a.clone(),
                b: entry.b.clone(),
            })?;
        values[edge] = match (entry.length, entry.count, entry.mean_length) {
            (Some(l), _, _) => Some(l),
            (None, Some(0), _) => None,
            (None, _, Some(m)) => Some(m),
            (None, _, None) => {
                return Err(Error::Config(format!(
                    "edge {} - {} has neither `length` nor `mean_length`",
                    entry.a, entry.b
                )))
            }
        };
    }
    resolve_lengths(skeleton, &values, fallback)
}

#[derive(Debug, Serialize, Deserialize)]
struct LengthEntry {
    a: String,
    b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LengthsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    skeleton: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    instances: Option<usize>,
    edges: Vec<LengthEntry>,
}
