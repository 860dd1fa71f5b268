//! Per-keypoint-type weighted composite field losses.
//!
//! Reference forms used here (additive constants dropped):
//!
//! * confidence: focal binary cross entropy `(1 - p_t)^γ · (-ln p_t)`
//! * vector regression: Laplace NLL `‖v - v̂‖ / b̂ + ln b̂`
//! * scale: the same Laplace form on the ratio, `|1 - ŝ/s| / b_s + ln b_s`
//!
//! The three components enter each type's sum with equal coefficients,
//! and the type sum is multiplied by that type's training weight.
//! Summation is sequential in input order, so results are reproducible
//! bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{EdgeKey, Skeleton};
use crate::weights::WeightTable;

pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_SCALE_SPREAD: f64 = 1.0;

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGamma { value: gamma })
    }
}

fn check_positive(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { what, value })
    }
}

/// Focal binary cross entropy for target `c ∈ {0, 1}` and prediction
/// `c_hat ∈ (0, 1)`.
pub fn bce_focal(c: f64, c_hat: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(c_hat > 0.0 && c_hat < 1.0) {
        return Err(Error::ProbabilityOutOfRange { value: c_hat });
    }
    let (miss, nll) = if c == 1.0 {
        (1.0 - c_hat, -c_hat.ln())
    } else if c == 0.0 {
        (c_hat, -(-c_hat).ln_1p())
    } else {
        return Err(Error::InvalidTarget { value: c });
    };
    Ok(miss.powf(gamma) * nll)
}

/// Laplace loss on a 2-vector residual with predicted spread `b_hat`.
pub fn laplace_loss(v: [f64; 2], v_hat: [f64; 2], b_hat: f64) -> Result<f64> {
    check_positive("spread b̂", b_hat)?;
    let r = (v[0] - v_hat[0]).hypot(v[1] - v_hat[1]);
    Ok(r / b_hat + b_hat.ln())
}

/// Laplace loss on the scale ratio `ŝ / s` against 1 with fixed spread `b_s`.
pub fn scale_loss(s: f64, s_hat: f64, b_s: f64) -> Result<f64> {
    check_positive("scale target", s)?;
    check_positive("scale prediction", s_hat)?;
    check_positive("scale spread", b_s)?;
    Ok((1.0 - s_hat / s).abs() / b_s + b_s.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub v: [f64; 2],
    pub v_hat: [f64; 2],
    pub b_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleTarget {
    pub s: f64,
    pub s_hat: f64,
}

/// One field cell. Absent regression or scale components are masked out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub c: f64,
    pub c_hat: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regression: Option<Regression>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<ScaleTarget>,
}

/// One association-field cell: a confidence plus a vector and a scale for
/// each of the connection's two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationSample {
    pub c: f64,
    pub c_hat: f64,
    #[serde(default)]
    pub regression: [Option<Regression>; 2],
    #[serde(default)]
    pub scale: [Option<ScaleTarget>; 2],
}

fn regression_and_scale(
    regression: Option<&Regression>,
    scale: Option<&ScaleTarget>,
    b_s: f64,
) -> Result<f64> {
    let mut total = 0.0;
    if let Some(r) = regression {
        total += laplace_loss(r.v, r.v_hat, r.b_hat)?;
    }
    if let Some(s) = scale {
        total += scale_loss(s.s, s.s_hat, b_s)?;
    }
    Ok(total)
}

/// Unweighted loss of one keypoint type: every component of every sample,
/// summed in order.
pub fn intensity_inner_loss(samples: &[FieldSample], gamma: f64, b_s: f64) -> Result<f64> {
    let mut total = 0.0;
    for s in samples {
        total += bce_focal(s.c, s.c_hat, gamma)?;
        total += regression_and_scale(s.regression.as_ref(), s.scale.as_ref(), b_s)?;
    }
    Ok(total)
}

/// Unweighted loss of one connection type.
pub fn association_inner_loss(samples: &[AssociationSample], gamma: f64, b_s: f64) -> Result<f64> {
    let mut total = 0.0;
    for s in samples {
        total += bce_focal(s.c, s.c_hat, gamma)?;
        for end in 0..2 {
            total += regression_and_scale(s.regression[end].as_ref(), s.scale[end].as_ref(), b_s)?;
        }
    }
    Ok(total)
}

/// Inner sum, weight and weighted contribution of one type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeLoss {
    pub inner: f64,
    pub weight: f64,
    pub weighted: f64,
}

fn weighted_sum<T>(
    samples: &[Vec<T>],
    weights: &[f64],
    inner: impl Fn(&[T]) -> Result<f64>,
) -> Result<(f64, Vec<TypeLoss>)> {
    if samples.len() > weights.len() {
        return Err(Error::MissingWeight {
            index: weights.len(),
        });
    }
    let mut total = 0.0;
    let mut parts = Vec::with_capacity(samples.len());
    for (k, type_samples) in samples.iter().enumerate() {
        let inner = inner(type_samples)?;
        let weighted = weights[k] * inner;
        total += weighted;
        parts.push(TypeLoss {
            inner,
            weight: weights[k],
            weighted,
        });
    }
    Ok((total, parts))
}

/// `Σ_k w_k · inner_k` over keypoint types; `samples[k]` holds type `k`.
pub fn weighted_cif_loss(
    samples: &[Vec<FieldSample>],
    weights: &[f64],
    gamma: f64,
    b_s: f64,
) -> Result<f64> {
    Ok(weighted_sum(samples, weights, |s| intensity_inner_loss(s, gamma, b_s))?.0)
}

/// Per-type breakdown of [`weighted_cif_loss`].
pub fn cif_breakdown(
    samples: &[Vec<FieldSample>],
    weights: &[f64],
    gamma: f64,
    b_s: f64,
) -> Result<Vec<TypeLoss>> {
    Ok(weighted_sum(samples, weights, |s| intensity_inner_loss(s, gamma, b_s))?.1)
}

/// Association-field analogue of [`weighted_cif_loss`], weighted per
/// connection type.
pub fn weighted_caf_loss(
    samples: &[Vec<AssociationSample>],
    weights: &[f64],
    gamma: f64,
    b_s: f64,
) -> Result<f64> {
    Ok(weighted_sum(samples, weights, |s| association_inner_loss(s, gamma, b_s))?.0)
}

pub fn caf_breakdown(
    samples: &[Vec<AssociationSample>],
    weights: &[f64],
    gamma: f64,
    b_s: f64,
) -> Result<Vec<TypeLoss>> {
    Ok(weighted_sum(samples, weights, |s| association_inner_loss(s, gamma, b_s))?.1)
}

#[derive(Debug, Deserialize)]
struct KeypointSamples {
    keypoint: String,
    samples: Vec<FieldSample>,
}

#[derive(Debug, Deserialize)]
struct ConnectionSamples {
    a: String,
    b: String,
    samples: Vec<AssociationSample>,
}

#[derive(Debug, Deserialize)]
struct SampleDocument {
    #[serde(default)]
    keypoints: Vec<KeypointSamples>,
    #[serde(default)]
    connections: Vec<ConnectionSamples>,
}

/// Samples grouped by skeleton keypoint and connection index.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub keypoints: Vec<Vec<FieldSample>>,
    pub connections: Vec<Vec<AssociationSample>>,
}

/// Reads a sample document:
///
/// ```json
/// {
///   "keypoints": [{"keypoint": "nose", "samples": [{"c": 1, "c_hat": 0.8,
///       "regression": {"v": [0.1, 0.0], "v_hat": [0.0, 0.0], "b_hat": 0.5},
///       "scale": {"s": 2.0, "s_hat": 1.8}}]}],
///   "connections": [{"a": "nose", "b": "left_eye", "samples": [{"c": 0, "c_hat": 0.1}]}]
/// }
/// ```
///
/// Entries naming the same keypoint or connection are concatenated.
pub fn parse_samples(document: &str, skeleton: &Skeleton) -> Result<SampleSet> {
    let doc: SampleDocument = serde_json::from_str(document).map_err(Error::document("sample"))?;
    let index = |name: &str| {
        skeleton
            .index_of(name)
            .ok_or_else(|| Error::UnknownKeypoint {
                name: name.to_owned(),
                context: "sample document".to_owned(),
            })
    };
    let mut keypoints = vec![Vec::new(); skeleton.len()];
    for entry in doc.keypoints {
        keypoints[index(&entry.keypoint)?].extend(entry.samples);
    }
    let mut connections = vec![Vec::new(); skeleton.edge_count()];
    for entry in doc.connections {
        let key = EdgeKey::new(index(&entry.a)?, index(&entry.b)?);
        let edge = skeleton
            .edge_position(key)
            .ok_or_else(|| Error::ExtraEdge {
                a: entry.a.clone(),
                b: entry.b.clone(),
            })?;
        connections[edge].extend(entry.samples);
    }
    Ok(SampleSet {
        keypoints,
        connections,
    })
}

/// Weighted and unweighted totals for a sample set under one weight table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossReport {
    pub gamma: f64,
    pub scale_spread: f64,
    pub intensity_total: f64,
    pub intensity_unweighted: f64,
    pub association_total: f64,
    pub association_unweighted: f64,
    pub keypoints: Vec<TypeLoss>,
    pub connections: Vec<TypeLoss>,
}

pub fn evaluate(set: &SampleSet, table: &WeightTable, gamma: f64, b_s: f64) -> Result<LossReport> {
    let keypoints = cif_breakdown(&set.keypoints, &table.vertex_weights, gamma, b_s)?;
    let connections = caf_breakdown(&set.connections, &table.edge_weights, gamma, b_s)?;
    let total = |parts: &[TypeLoss], f: fn(&TypeLoss) -> f64| parts.iter().map(f).sum::<f64>();
    Ok(LossReport {
        gamma,
        scale_spread: b_s,
        intensity_total: total(&keypoints, |t| t.weighted),
        intensity_unweighted: total(&keypoints, |t| t.inner),
        association_total: total(&connections, |t| t.weighted),
        association_unweighted: total(&connections, |t| t.inner),
        keypoints,
        connections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn bce_reduces_to_plain_cross_entropy() {
        assert!((bce_focal(1.0, 0.5, 0.0).unwrap() - LN_2).abs() < 1e-15);
        assert!((bce_focal(0.0, 0.5, 0.0).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn bce_focal_value() {
        let expected = 0.01 * -(0.9f64.ln());
        assert!(rel(bce_focal(1.0, 0.9, 2.0).unwrap(), expected) < 1e-12);
        assert!((bce_focal(1.0, 0.9, 2.0).unwrap() - 1.0536e-3).abs() < 1e-7);
    }

    #[test]
    fn bce_vanishes_near_perfect() {
        assert!(bce_focal(1.0, 1.0 - 1e-12, 2.0).unwrap() < 1e-30);
        assert!(bce_focal(0.0, 1e-12, 2.0).unwrap() < 1e-30);
    }

    #[test]
    fn bce_rejects_bad_input() {
        assert!(matches!(
            bce_focal(1.0, 1.0, 2.0),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
        assert!(matches!(
            bce_focal(1.0, 0.0, 2.0),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
        assert!(matches!(
            bce_focal(0.5, 0.3, 2.0),
            Err(Error::InvalidTarget { .. })
        ));
        assert!(matches!(
            bce_focal(1.0, 0.3, -1.0),
            Err(Error::InvalidGamma { .. })
        ));
    }

    #[test]
    fn laplace_values() {
        assert_eq!(laplace_loss([1.0, 2.0], [1.0, 2.0], 1.0).unwrap(), 0.0);
        assert_eq!(laplace_loss([2.0, 0.0], [0.0, 0.0], 1.0).unwrap(), 2.0);
        assert!(matches!(
            laplace_loss([0.0; 2], [0.0; 2], 0.0),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn laplace_minimizer_is_residual() {
        // golden-section search on b ↦ r/b + ln b for r = 1
        let f = |b: f64| laplace_loss([1.0, 0.0], [0.0, 0.0], b).unwrap();
        let (mut lo, mut hi) = (0.1, 10.0);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if f(m1) < f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        assert!((0.5 * (lo + hi) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn scale_values() {
        assert_eq!(scale_loss(3.0, 3.0, 1.0).unwrap(), 0.0);
        assert_eq!(scale_loss(3.0, 6.0, 1.0).unwrap(), 1.0);
        assert!((scale_loss(3.0, 3.0, E).unwrap() - 1.0).abs() < 1e-15);
        assert!(scale_loss(0.0, 1.0, 1.0).is_err());
    }

    fn sample(c_hat: f64, residual: f64) -> FieldSample {
        FieldSample {
            c: 1.0,
            c_hat,
            regression: Some(Regression {
                v: [residual, 0.0],
                v_hat: [0.0, 0.0],
                b_hat: 1.0,
            }),
            scale: Some(ScaleTarget { s: 1.0, s_hat: 1.5 }),
        }
    }

    #[test]
    fn components_are_equally_weighted() {
        let s = sample(0.7, 2.0);
        let expected = bce_focal(1.0, 0.7, 2.0).unwrap() + 2.0 + 0.5;
        assert_eq!(intensity_inner_loss(&[s], 2.0, 1.0).unwrap(), expected);
    }

    #[test]
    fn masks_drop_components() {
        let s = FieldSample {
            c: 0.0,
            c_hat: 0.2,
            regression: None,
            scale: None,
        };
        assert_eq!(
            intensity_inner_loss(&[s], 2.0, 1.0).unwrap(),
            bce_focal(0.0, 0.2, 2.0).unwrap()
        );
    }

    #[test]
    fn weighted_forced_arithmetic() {
        // inner sums 1.0 and 3.0 through the residual term alone
        let one = FieldSample {
            c: 1.0,
            c_hat: 0.5,
            regression: Some(Regression {
                v: [1.0, 0.0],
                v_hat: [0.0, 0.0],
                b_hat: 1.0,
            }),
            scale: None,
        };
        let mut three = one;
        three.regression.as_mut().unwrap().v = [3.0, 0.0];
        let bce = bce_focal(1.0, 0.5, 2.0).unwrap();
        let types = vec![vec![one], vec![three]];
        let total = weighted_cif_loss(&types, &[1.5, 0.5], 2.0, 1.0).unwrap();
        // 1.5·(1 + bce) + 0.5·(3 + bce)
        assert!((total - (3.0 + 2.0 * bce)).abs() < 1e-15);
    }

    #[test]
    fn unit_weights_match_unweighted_sum() {
        let types = vec![
            vec![sample(0.6, 0.3)],
            vec![sample(0.9, 1.2), sample(0.2, 0.1)],
        ];
        let total = weighted_cif_loss(&types, &[1.0, 1.0], 2.0, 1.0).unwrap();
        let plain: f64 = types
            .iter()
            .map(|t| intensity_inner_loss(t, 2.0, 1.0).unwrap())
            .sum();
        assert_eq!(total, plain);
    }

    #[test]
    fn doubling_one_weight_adds_its_inner_sum() {
        let types = vec![vec![sample(0.6, 0.3)], vec![sample(0.9, 1.2)]];
        let base = weighted_cif_loss(&types, &[0.8, 1.3], 2.0, 1.0).unwrap();
        let doubled = weighted_cif_loss(&types, &[0.8, 2.6], 2.0, 1.0).unwrap();
        let inner = intensity_inner_loss(&types[1], 2.0, 1.0).unwrap();
        assert!(rel(doubled - base, 1.3 * inner) < 1e-12);
    }

    #[test]
    fn missing_weight() {
        let types = vec![vec![sample(0.6, 0.3)], vec![sample(0.9, 1.2)]];
        assert!(matches!(
            weighted_cif_loss(&types, &[1.0], 2.0, 1.0),
            Err(Error::MissingWeight { index: 1 })
        ));
    }

    #[test]
    fn association_counts_both_ends() {
        let r = Regression {
            v: [1.0, 0.0],
            v_hat: [0.0, 0.0],
            b_hat: 1.0,
        };
        let s = AssociationSample {
            c: 1.0,
            c_hat: 0.5,
            regression: [Some(r), Some(r)],
            scale: [Some(ScaleTarget { s: 1.0, s_hat: 2.0 }), None],
        };
        let expected = bce_focal(1.0, 0.5, 2.0).unwrap() + 1.0 + 1.0 + 1.0;
        assert_eq!(association_inner_loss(&[s], 2.0, 1.0).unwrap(), expected);
    }

    #[test]
    fn parses_sample_document() {
        let skel = Skeleton::new("p3", ["a", "b", "c"], &[(0, 1), (1, 2)]).unwrap();
        let doc = r#"{"keypoints":[{"keypoint":"c","samples":[{"c":1,"c_hat":0.5}]}],
            "connections":[{"a":"c","b":"b","samples":[{"c":0,"c_hat":0.5,
            "regression":[null,{"v":[1,0],"v_hat":[0,0],"b_hat":1}]}]}]}"#;
        let set = parse_samples(doc, &skel).unwrap();
        assert_eq!(set.keypoints[2].len(), 1);
        assert!(set.keypoints[0].is_empty());
        assert_eq!(set.connections[1].len(), 1);
        assert!(set.connections[1][0].regression[1].is_some());
        let bad = r#"{"connections":[{"a":"a","b":"c","samples":[]}]}"#;
        assert!(matches!(
            parse_samples(bad, &skel),
            Err(Error::ExtraEdge { .. })
        ));
    }
}
