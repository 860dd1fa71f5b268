//! Pose skeletons and distance-weighted pose graphs.
//!
//! A [`Skeleton`] is the pose topology: named keypoints and undirected
//! connections between them. Binding one positive length to every
//! connection yields a [`WeightedPoseGraph`], the input to every
//! centrality and weighting routine in this crate.
//!
//! Skeletons are read from a JSON document:
//!
//! ```json
//! {
//!   "name": "p3",
//!   "keypoints": [{"name": "a"}, {"name": "b", "crafted_multiplier": 3.0}, {"name": "c"}],
//!   "edges": [["a", "b"], ["b", "c"]]
//! }
//! ```
//!
//! Indices follow list order. Edges reference keypoints by name.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unordered keypoint pair, stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    lo: usize,
    hi: usize,
}

impl EdgeKey {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            EdgeKey { lo: a, hi: b }
        } else {
            EdgeKey { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeypointDef {
    pub index: usize,
    pub name: String,
    /// Per-keypoint factor used by the crafted weighting scheme.
    pub crafted_multiplier: f64,
}

/// Undirected connection. `a` and `b` keep the order they were declared in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeDef {
    pub a: usize,
    pub b: usize,
}

impl EdgeDef {
    pub fn key(&self) -> EdgeKey {
        EdgeKey::new(self.a, self.b)
    }
}

/// Validated, connected pose topology.
#[derive(Debug, Clone)]
pub struct Skeleton {
    name: String,
    keypoints: Vec<KeypointDef>,
    edges: Vec<EdgeDef>,
    by_name: HashMap<String, usize>,
    by_key: HashMap<EdgeKey, usize>,
}

impl PartialEq for Skeleton {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.keypoints == other.keypoints && self.edges == other.edges
    }
}

impl Skeleton {
    /// Builds a skeleton from keypoint names and index pairs. All crafted
    /// multipliers default to 1.
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        keypoint_names: impl IntoIterator<Item = S>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let keypoints = keypoint_names
            .into_iter()
            .enumerate()
            .map(|(index, n)| KeypointDef {
                index,
                name: n.into(),
                crafted_multiplier: 1.0,
            })
            .collect();
        let edges = edges.iter().map(|&(a, b)| EdgeDef { a, b }).collect();
        Self::validate(name.into(), keypoints, edges)
    }

    /// Replaces the crafted multipliers, one per keypoint in index order.
    pub fn with_multipliers(mut self, multipliers: &[f64]) -> Result<Self> {
        if multipliers.len() != self.keypoints.len() {
            return Err(Error::Config(format!(
                "expected {} crafted multipliers, got {}",
                self.keypoints.len(),
                multipliers.len()
            )));
        }
        for (kp, &m) in self.keypoints.iter_mut().zip(multipliers) {
            check_multiplier(&kp.name, m)?;
            kp.crafted_multiplier = m;
        }
        Ok(self)
    }

    fn validate(name: String, keypoints: Vec<KeypointDef>, edges: Vec<EdgeDef>) -> Result<Self> {
        if keypoints.is_empty() {
            return Err(Error::EmptySkeleton);
        }
        let n = keypoints.len();
        let mut by_name = HashMap::with_capacity(n);
        for kp in &keypoints {
            if kp.name.is_empty() {
                return Err(Error::EmptyName { index: kp.index });
            }
            check_multiplier(&kp.name, kp.crafted_multiplier)?;
            if by_name.insert(kp.name.clone(), kp.index).is_some() {
                return Err(Error::DuplicateName {
                    name: kp.name.clone(),
                });
            }
        }

        let mut by_key = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.a >= n || e.b >= n {
                return Err(Error::DanglingIndex { a: e.a, b: e.b, n });
            }
            if e.a == e.b {
                return Err(Error::SelfLoop {
                    name: keypoints[e.a].name.clone(),
                });
            }
            if by_key.insert(e.key(), i).is_some() {
                return Err(Error::DuplicateEdge {
                    a: keypoints[e.a].name.clone(),
                    b: keypoints[e.b].name.clone(),
                });
            }
        }

        let skeleton = Skeleton {
            name,
            keypoints,
            edges,
            by_name,
            by_key,
        };
        skeleton.check_connected()?;
        Ok(skeleton)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.len();
        let mut adjacency = vec![Vec::new(); n];
        for e in &self.edges {
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(missing) => Err(Error::Disconnected {
                root: self.keypoints[0].name.clone(),
                name: self.keypoints[missing].name.clone(),
            }),
            None => Ok(()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn keypoints(&self) -> &[KeypointDef] {
        &self.keypoints
    }

    pub fn edges(&self) -> &[EdgeDef] {
        &self.edges
    }

    /// Number of keypoints.
    pub fn len(&self) -> usize {
        self.keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keypoints.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Position of the edge `key` in [`Skeleton::edges`].
    pub fn edge_position(&self, key: EdgeKey) -> Option<usize> {
        self.by_key.get(&key).copied()
    }

    pub fn keypoint_name(&self, index: usize) -> &str {
        &self.keypoints[index].name
    }

    pub fn edge_names(&self, edge: usize) -> (&str, &str) {
        let e = self.edges[edge];
        (self.keypoint_name(e.a), self.keypoint_name(e.b))
    }

    pub fn crafted_multipliers(&self) -> Vec<f64> {
        self.keypoints
            .iter()
            .map(|k| k.crafted_multiplier)
            .collect()
    }

    /// Canonical JSON form. `parse_skeleton(&s.to_document())` returns `s`.
    pub fn to_document(&self) -> String {
        let doc = SkeletonDocument {
            name: self.name.clone(),
            keypoints: self
                .keypoints
                .iter()
                .map(|k| KeypointEntry {
                    name: k.name.clone(),
                    crafted_multiplier: k.crafted_multiplier,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    [
                        self.keypoint_name(e.a).to_owned(),
                        self.keypoint_name(e.b).to_owned(),
                    ]
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("skeleton serializes");
        out.push('\n');
        out
    }
}

fn check_multiplier(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMultiplier {
            name: name.to_owned(),
            value,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SkeletonDocument {
    name: String,
    keypoints: Vec<KeypointEntry>,
    edges: Vec<[String; 2]>,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Debug, Serialize, Deserialize)]
struct KeypointEntry {
    name: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    crafted_multiplier: f64,
}

/// Parses and validates a skeleton document.
pub fn parse_skeleton(document: &str) -> Result<Skeleton> {
    let doc: SkeletonDocument =
        serde_json::from_str(document).map_err(Error::document("skeleton"))?;

    let keypoints: Vec<KeypointDef> = doc
        .keypoints
        .into_iter()
        .enumerate()
        .map(|(index, k)| KeypointDef {
            index,
            name: k.name,
            crafted_multiplier: k.crafted_multiplier,
        })
        .collect();

    // Duplicate names must be rejected before name lookup makes them ambiguous.
    let mut lookup = HashMap::with_capacity(keypoints.len());
    for kp in &keypoints {
        if lookup.insert(kp.name.as_str(), kp.index).is_some() {
            return Err(Error::DuplicateName {
                name: kp.name.clone(),
            });
        }
    }
    let resolve = |name: &str| {
        lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownKeypoint {
                name: name.to_owned(),
                context: "skeleton edges".to_owned(),
            })
    };
    let edges = doc
        .edges
        .iter()
        .map(|[a, b]| {
            Ok(EdgeDef {
                a: resolve(a)?,
                b: resolve(b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Skeleton::validate(doc.name, keypoints, edges)
}

/// A keypoint neighbor reached over skeleton edge `edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub vertex: usize,
    pub edge: usize,
    pub length: f64,
}

/// Skeleton with one strictly positive length per edge.
#[derive(Debug, Clone)]
pub struct WeightedPoseGraph {
    skeleton: Skeleton,
    lengths: Vec<f64>,
    adjacency: Vec<Vec<Neighbor>>,
}

impl WeightedPoseGraph {
    /// Binds lengths given in skeleton edge order.
    pub fn from_lengths(skeleton: Skeleton, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != skeleton.edge_count() {
            return Err(Error::Config(format!(
                "expected {} edge lengths, got {}",
                skeleton.edge_count(),
                lengths.len()
            )));
        }
        for (i, &l) in lengths.iter().enumerate() {
            check_length(&skeleton, i, l)?;
        }
        let mut adjacency = vec![Vec::new(); skeleton.len()];
        for (i, e) in skeleton.edges().iter().enumerate() {
            adjacency[e.a].push(Neighbor {
                vertex: e.b,
                edge: i,
                length: lengths[i],
            });
            adjacency[e.b].push(Neighbor {
                vertex: e.a,
                edge: i,
                length: lengths[i],
            });
        }
        Ok(WeightedPoseGraph {
            skeleton,
            lengths,
            adjacency,
        })
    }

    /// Every edge gets the same length.
    pub fn uniform(skeleton: Skeleton, length: f64) -> Result<Self> {
        let lengths = vec![length; skeleton.edge_count()];
        Self::from_lengths(skeleton, lengths)
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn vertex_count(&self) -> usize {
        self.skeleton.len()
    }

    pub fn edge_count(&self) -> usize {
        self.skeleton.edge_count()
    }

    pub fn neighbors(&self, vertex: usize) -> &[Neighbor] {
        &self.adjacency[vertex]
    }

    /// Same topology with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let lengths = self.lengths.iter().map(|l| l * factor).collect();
        Self::from_lengths(self.skeleton.clone(), lengths)
    }
}

fn check_length(skeleton: &Skeleton, edge: usize, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        return Ok(());
    }
    let (a, b) = skeleton.edge_names(edge);
    Err(Error::InvalidLength {
        a: a.to_owned(),
        b: b.to_owned(),
        value,
    })
}

/// Binds a length map to the skeleton. The map must cover exactly the
/// skeleton's edge set.
pub fn attach_lengths(
    skeleton: Skeleton,
    lengths: &BTreeMap<EdgeKey, f64>,
) -> Result<WeightedPoseGraph> {
    for key in lengths.keys() {
        if skeleton.edge_position(*key).is_none() {
            let name = |i: usize| {
                if i < skeleton.len() {
                    skeleton.keypoint_name(i).to_owned()
                } else {
                    format!("#{i}")
                }
            };
            return Err(Error::ExtraEdge {
                a: name(key.lo()),
                b: name(key.hi()),
            });
        }
    }
    let mut ordered = Vec::with_capacity(skeleton.edge_count());
    for (i, e) in skeleton.edges().iter().enumerate() {
        match lengths.get(&e.key()) {
            Some(&l) => ordered.push(l),
            None => {
                let (a, b) = skeleton.edge_names(i);
                return Err(Error::MissingEdge {
                    a: a.to_owned(),
                    b: b.to_owned(),
                });
            }
        }
    }
    WeightedPoseGraph::from_lengths(skeleton, ordered)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P3: &str = r#"{
        "name": "p3",
        "keypoints": [{"name": "a"}, {"name": "b"}, {"name": "c"}],
        "edges": [["a", "b"], ["b", "c"]]
    }"#;

    fn p3() -> Skeleton {
        parse_skeleton(P3).unwrap()
    }

    #[test]
    fn parses_minimal_path() {
        let s = p3();
        assert_eq!(s.len(), 3);
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.index_of("c"), Some(2));
        assert_eq!(s.edges()[1], EdgeDef { a: 1, b: 2 });
        assert_eq!(s.crafted_multipliers(), vec![1.0; 3]);
    }

    #[test]
    fn rejects_self_loop() {
        let err = Skeleton::new("x", ["a", "b"], &[(0, 1), (0, 0)]).unwrap_err();
        assert!(
            matches!(err, Error::SelfLoop { ref name } if name == "a"),
            "{err}"
        );

        let doc = r#"{"name":"x","keypoints":[{"name":"a"}],"edges":[["a","a"]]}"#;
        assert!(matches!(parse_skeleton(doc), Err(Error::SelfLoop { .. })));
    }

    #[test]
    fn rejects_duplicate_name() {
        let doc = r#"{"name":"x","keypoints":[{"name":"a"},{"name":"a"}],"edges":[["a","a"]]}"#;
        assert!(
            matches!(parse_skeleton(doc), Err(Error::DuplicateName { ref name }) if name == "a")
        );
    }

    #[test]
    fn rejects_duplicate_edge_in_either_direction() {
        let err = Skeleton::new("x", ["a", "b"], &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateEdge { .. }), "{err}");
    }

    #[test]
    fn rejects_dangling_index_and_unknown_name() {
        let err = Skeleton::new("x", ["a", "b"], &[(0, 5)]).unwrap_err();
        assert!(
            matches!(err, Error::DanglingIndex { b: 5, n: 2, .. }),
            "{err}"
        );

        let doc = r#"{"name":"x","keypoints":[{"name":"a"},{"name":"b"}],"edges":[["a","z"]]}"#;
        assert!(
            matches!(parse_skeleton(doc), Err(Error::UnknownKeypoint { ref name, .. }) if name == "z")
        );
    }

    #[test]
    fn rejects_disconnected() {
        let err = Skeleton::new("x", ["a", "b", "c", "d"], &[(0, 1), (2, 3)]).unwrap_err();
        match err {
            Error::Disconnected { root, name } => {
                assert_eq!(root, "a");
                assert_eq!(name, "c");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_bad_multiplier() {
        let doc = r#"{"name":"x","keypoints":[{"name":"a","crafted_multiplier":-1}],"edges":[]}"#;
        assert!(matches!(
            parse_skeleton(doc),
            Err(Error::InvalidMultiplier { .. })
        ));
    }

    #[test]
    fn single_keypoint_is_connected() {
        let s = Skeleton::new("dot", ["a"], &[]).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn canonical_round_trip() {
        let s = p3().with_multipliers(&[3.0, 1.0, 0.5]).unwrap();
        let doc = s.to_document();
        let back = parse_skeleton(&doc).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_document(), doc);
    }

    #[test]
    fn attach_lengths_binds_in_edge_order() {
        let s = p3();
        let map = BTreeMap::from([(EdgeKey::new(1, 0), 1.0), (EdgeKey::new(1, 2), 2.5)]);
        let g = attach_lengths(s.clone(), &map).unwrap();
        assert_eq!(g.lengths(), &[1.0, 2.5]);
        assert_eq!(g.skeleton(), &s);
        assert_eq!(g.neighbors(1).len(), 2);
    }

    #[test]
    fn attach_lengths_missing_edge() {
        let map = BTreeMap::from([(EdgeKey::new(0, 1), 1.0)]);
        let err = attach_lengths(p3(), &map).unwrap_err();
        assert!(
            matches!(err, Error::MissingEdge { ref a, ref b } if a == "b" && b == "c"),
            "{err}"
        );
    }

    #[test]
    fn attach_lengths_non_positive() {
        let map = BTreeMap::from([(EdgeKey::new(0, 1), 1.0), (EdgeKey::new(1, 2), -2.0)]);
        let err = attach_lengths(p3(), &map).unwrap_err();
        assert!(
            matches!(err, Error::InvalidLength { value, .. } if value == -2.0),
            "{err}"
        );

        let map = BTreeMap::from([(EdgeKey::new(0, 1), 1.0), (EdgeKey::new(1, 2), f64::NAN)]);
        assert!(matches!(
            attach_lengths(p3(), &map),
            Err(Error::InvalidLength { .. })
        ));
    }

    #[test]
    fn attach_lengths_extra_edge() {
        let map = BTreeMap::from([
            (EdgeKey::new(0, 1), 1.0),
            (EdgeKey::new(1, 2), 1.0),
            (EdgeKey::new(0, 2), 1.0),
        ]);
        let err = attach_lengths(p3(), &map).unwrap_err();
        assert!(
            matches!(err, Error::ExtraEdge { ref a, ref b } if a == "a" && b == "c"),
            "{err}"
        );
    }
}
