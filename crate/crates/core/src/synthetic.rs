//! Seeded synthetic annotation corpora: a template pose placed at random
//! scales and offsets, with per-keypoint jitter and random unlabeled points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotations::{AnnotatedKeypoint, AnnotationCorpus, InstanceAnnotation, Visibility};
use crate::render::Layout;
use crate::skeleton::Skeleton;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOptions {
    pub instances: usize,
    /// Jitter amplitude as a fraction of the template's extent.
    pub jitter: f64,
    /// Probability that a keypoint is left unlabeled.
    pub unlabeled: f64,
    /// Probability that a labeled keypoint is marked occluded.
    pub occluded: f64,
    /// Instance heights are drawn from this pixel range.
    pub height: (f64, f64),
    pub seed: u64,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        SyntheticOptions {
            instances: 100,
            jitter: 0.01,
            unlabeled: 0.1,
            occluded: 0.1,
            height: (80.0, 400.0),
            seed: 0,
        }
    }
}

/// Instances of `layout` in image coordinates (y down). The bbox of each
/// instance encloses its transformed template.
pub fn jittered_corpus(
    skeleton: &Skeleton,
    layout: &Layout,
    options: &SyntheticOptions,
) -> AnnotationCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let positions = layout.positions();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in positions {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let extent = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);

    let instances = (0..options.instances)
        .map(|i| {
            let height = rng.gen_range(options.height.0..=options.height.1);
            let scale = height / extent;
            let (ox, oy) = (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
            let amplitude = options.jitter * extent;
            let keypoints = positions
                .iter()
                .take(skeleton.len())
                .map(|p| {
                    let jx = rng.gen_range(-1.0..=1.0) * amplitude;
                    let jy = rng.gen_range(-1.0..=1.0) * amplitude;
                    let visibility = if rng.gen_bool(options.unlabeled) {
                        Visibility::Unlabeled
                    } else if rng.gen_bool(options.occluded) {
                        Visibility::Occluded
                    } else {
                        Visibility::Visible
                    };
                    AnnotatedKeypoint {
                        x: ox + (p[0] + jx - x0) * scale,
                        y: oy + (y1 - p[1] - jy) * scale,
                        visibility,
                    }
                })
                .collect();
            let w = ((x1 - x0) * scale).max(1.0);
            let h = ((y1 - y0) * scale).max(1.0);
            InstanceAnnotation {
                id: (i + 1).to_string(),
                keypoints,
                bbox: Some([ox, oy, w, h]),
            }
        })
        .collect();
    AnnotationCorpus { instances }
}
