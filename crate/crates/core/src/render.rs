//! Graphviz and SVG renderings of a weighted skeleton.
//!
//! Keypoint markers have a radius proportional to their weight and are
//! colored on a viridis ramp spanning the table's minimum to maximum
//! weight. Connections are colored the same way by connection weight.
//! Both emitters are pure functions of their inputs.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::document::Metadata;
use crate::error::{Error, Result};
use crate::skeleton::{Skeleton, WeightedPoseGraph};
use crate::weights::{Summary, WeightTable};

/// Name recorded in output headers for the color ramp below.
pub const COLOR_MAP: &str = "viridis, 9 stops, linear interpolation in sRGB";

const VIRIDIS: [[u8; 3]; 9] = [
    [0x44, 0x01, 0x54],
    [0x48, 0x28, 0x78],
    [0x3e, 0x49, 0x89],
    [0x31, 0x68, 0x8e],
    [0x26, 0x82, 0x8e],
    [0x1f, 0x9e, 0x89],
    [0x35, 0xb7, 0x79],
    [0x6e, 0xce, 0x58],
    [0xfd, 0xe7, 0x25],
];

/// Marker radius, in pixels, of a keypoint with weight 1.
pub const MARKER_UNIT: f64 = 6.0;

const CANVAS_WIDTH: f64 = 640.0;
const MARGIN: f64 = 16.0;
const LEGEND_HEIGHT: f64 = 64.0;

/// Color for `t ∈ [0, 1]` as `#rrggbb`.
pub fn ramp_color(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let x = t * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let channel = |c: usize| {
        let (a, b) = (VIRIDIS[i][c] as f64, VIRIDIS[i + 1][c] as f64);
        (a + (b - a) * f).round() as u8
    };
    format!("#{:02x}{:02x}{:02x}", channel(0), channel(1), channel(2))
}

/// Position of `w` within `[min, max]`; 0.5 when the range is empty.
fn ramp_position(w: f64, s: &Summary) -> f64 {
    if s.max > s.min {
        (w - s.min) / (s.max - s.min)
    } else {
        0.5
    }
}

pub fn marker_radius(weight: f64) -> f64 {
    MARKER_UNIT * weight
}

/// 2D keypoint positions, y pointing up, indexed like the skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    positions: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct LayoutEntry {
    name: String,
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct LayoutDocument {
    positions: Vec<LayoutEntry>,
}

impl Layout {
    pub fn from_positions(skeleton: &Skeleton, positions: Vec<[f64; 2]>) -> Result<Layout> {
        if positions.len() != skeleton.len() {
            let name = skeleton.keypoint_name(positions.len().min(skeleton.len() - 1));
            return Err(Error::MissingCoordinate {
                name: name.to_owned(),
            });
        }
        Ok(Layout { positions })
    }

    /// Reads `{"positions": [{"name", "x", "y"}, ...]}`. Every keypoint
    /// needs a finite position; names outside the skeleton are rejected.
    pub fn parse(document: &str, skeleton: &Skeleton) -> Result<Layout> {
        let doc: LayoutDocument =
            serde_json::from_str(document).map_err(Error::document("layout"))?;
        let mut positions = vec![None; skeleton.len()];
        for entry in doc.positions {
            let i = skeleton
                .index_of(&entry.name)
                .ok_or_else(|| Error::UnknownKeypoint {
                    name: entry.name.clone(),
                    context: "layout".to_owned(),
                })?;
            if entry.x.is_finite() && entry.y.is_finite() {
                positions[i] = Some([entry.x, entry.y]);
            }
        }
        let positions = positions
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| Error::MissingCoordinate {
                    name: skeleton.keypoint_name(i).to_owned(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Layout { positions })
    }

    /// Fruchterman-Reingold spring layout from a seeded random start.
    pub fn force_directed(graph: &WeightedPoseGraph, seed: u64) -> Layout {
        let n = graph.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pos: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        if n < 2 {
            return Layout { positions: pos };
        }
        let k = 2.0 / (n as f64).sqrt();
        let iterations = 300;
        for step in 0..iterations {
            let temperature = 0.2 * (1.0 - step as f64 / iterations as f64);
            let mut disp = vec![[0.0f64; 2]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let dx = pos[i][0] - pos[j][0];
                    let dy = pos[i][1] - pos[j][1];
                    let d = dx.hypot(dy).max(1e-9);
                    let f = k * k / d;
                    disp[i][0] += dx / d * f;
                    disp[i][1] += dy / d * f;
                    disp[j][0] -= dx / d * f;
                    disp[j][1] -= dy / d * f;
                }
            }
            for e in graph.skeleton().edges() {
                let dx = pos[e.a][0] - pos[e.b][0];
                let dy = pos[e.a][1] - pos[e.b][1];
                let d = dx.hypot(dy).max(1e-9);
                let f = d * d / k;
                disp[e.a][0] -= dx / d * f;
                disp[e.a][1] -= dy / d * f;
                disp[e.b][0] += dx / d * f;
                disp[e.b][1] += dy / d * f;
            }
            for (p, d) in pos.iter_mut().zip(&disp) {
                let len = d[0].hypot(d[1]);
                if len > 0.0 {
                    let step = len.min(temperature);
                    p[0] += d[0] / len * step;
                    p[1] += d[1] / len * step;
                }
            }
        }
        Layout { positions: pos }
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header_lines(
    graph: &WeightedPoseGraph,
    table: &WeightTable,
    metadata: Option<&Metadata>,
) -> Vec<String> {
    let mut lines = vec![
        format!("skeleton: {}", graph.skeleton().name()),
        format!("scheme: {}", table.scheme),
        format!("colormap: {COLOR_MAP}"),
        format!("marker radius: {MARKER_UNIT} px per unit weight"),
    ];
    if let Some(m) = metadata {
        lines.insert(0, format!("generator: {}", m.generator));
        lines.push(format!("config: {}", m.config));
        lines.extend(m.notes.iter().map(|n| format!("note: {n}")));
    }
    lines
}

/// Graphviz document with one node per keypoint and one edge per
/// connection, in skeleton order, each labeled with its weight.
pub fn emit_dot(
    graph: &WeightedPoseGraph,
    table: &WeightTable,
    metadata: Option<&Metadata>,
) -> Result<String> {
    let skeleton = graph.skeleton();
    table.check_matches(skeleton)?;
    let vs = table.vertex_summary();
    let es = table.edge_summary();

    let mut out = String::new();
    for line in header_lines(graph, table, metadata) {
        writeln!(out, "// {}", line.replace('\n', " ")).unwrap();
    }
    writeln!(out, "graph {} {{", quote(skeleton.name())).unwrap();
    writeln!(out, "  node [shape=circle, style=filled, fontsize=10];").unwrap();
    for (k, &w) in skeleton.keypoints().iter().zip(&table.vertex_weights) {
        writeln!(
            out,
            "  {} [label=\"{:.3}\", xlabel={}, width={:.3}, fillcolor=\"{}\"];",
            quote(&k.name),
            w,
            quote(&k.name),
            2.0 * marker_radius(w) / 72.0,
            ramp_color(ramp_position(w, &vs)),
        )
        .unwrap();
    }
    for (i, &w) in table.edge_weights.iter().enumerate() {
        let (a, b) = skeleton.edge_names(i);
        writeln!(
            out,
            "  {} -- {} [label=\"{:.3}\", penwidth={:.3}, color=\"{}\"];",
            quote(a),
            quote(b),
            w,
            2.0 * w,
            ramp_color(ramp_position(w, &es)),
        )
        .unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

/// SVG drawing of the skeleton at `layout` positions, with a legend of
/// the keypoint and connection weight ranges.
pub fn emit_svg(
    graph: &WeightedPoseGraph,
    table: &WeightTable,
    layout: &Layout,
    metadata: Option<&Metadata>,
) -> Result<String> {
    let skeleton = graph.skeleton();
    table.check_matches(skeleton)?;
    if layout.positions.len() != skeleton.len() {
        return Err(Error::MissingCoordinate {
            name: skeleton
                .keypoint_name(layout.positions.len().min(skeleton.len() - 1))
                .to_owned(),
        });
    }
    let vs = table.vertex_summary();
    let es = table.edge_summary();

    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in &layout.positions {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let pad = MARGIN + marker_radius(vs.max);
    let extent = (x1 - x0).max(y1 - y0);
    let scale = if extent > 0.0 {
        (CANVAS_WIDTH - 2.0 * pad).max(1.0) / extent
    } else {
        1.0
    };
    let width = CANVAS_WIDTH;
    let drawing_height = (y1 - y0) * scale + 2.0 * pad;
    let height = drawing_height + LEGEND_HEIGHT;
    let to_canvas = |p: [f64; 2]| {
        let x = pad + (p[0] - x0) * scale + (width - 2.0 * pad - (x1 - x0) * scale) / 2.0;
        let y = pad + (y1 - p[1]) * scale;
        (x, y)
    };

    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.2} {height:.2}\">"
    )
    .unwrap();
    out.push_str("<!--\n");
    for line in header_lines(graph, table, metadata) {
        writeln!(out, "{}", line.replace("--", "- -")).unwrap();
    }
    out.push_str("-->\n");
    writeln!(out, "<title>{}</title>", xml_escape(skeleton.name())).unwrap();
    out.push_str("<defs><linearGradient id=\"ramp\" x1=\"0\" x2=\"1\" y1=\"0\" y2=\"0\">");
    for i in 0..VIRIDIS.len() {
        let t = i as f64 / (VIRIDIS.len() - 1) as f64;
        write!(
            out,
            "<stop offset=\"{t:.3}\" stop-color=\"{}\"/>",
            ramp_color(t)
        )
        .unwrap();
    }
    out.push_str("</linearGradient></defs>\n");
    writeln!(
        out,
        "<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>"
    )
    .unwrap();

    out.push_str("<g id=\"connections\" stroke-linecap=\"round\">\n");
    for (i, e) in skeleton.edges().iter().enumerate() {
        let w = table.edge_weights[i];
        let (ax, ay) = to_canvas(layout.positions[e.a]);
        let (bx, by) = to_canvas(layout.positions[e.b]);
        let (na, nb) = skeleton.edge_names(i);
        writeln!(
            out,
            "<line x1=\"{ax:.2}\" y1=\"{ay:.2}\" x2=\"{bx:.2}\" y2=\"{by:.2}\" stroke=\"{}\" stroke-width=\"{:.2}\"><title>{} - {}: {w:.3}</title></line>",
            ramp_color(ramp_position(w, &es)),
            2.0 * w,
            xml_escape(na),
            xml_escape(nb),
        )
        .unwrap();
    }
    out.push_str("</g>\n<g id=\"keypoints\" stroke=\"black\" stroke-width=\"0.5\">\n");
    for (i, k) in skeleton.keypoints().iter().enumerate() {
        let w = table.vertex_weights[i];
        let (x, y) = to_canvas(layout.positions[i]);
        writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.3}\" fill=\"{}\"><title>{}: {w:.3}</title></circle>",
            marker_radius(w),
            ramp_color(ramp_position(w, &vs)),
            xml_escape(&k.name),
        )
        .unwrap();
    }
    out.push_str("</g>\n");

    let ly = drawing_height + 8.0;
    let bar = width - 2.0 * MARGIN;
    writeln!(
        out,
        "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n<rect x=\"{MARGIN:.2}\" y=\"{ly:.2}\" width=\"{bar:.2}\" height=\"12\" fill=\"url(#ramp)\"/>"
    )
    .unwrap();
    for (row, (label, s)) in [("keypoint", &vs), ("connection", &es)]
        .into_iter()
        .enumerate()
    {
        let ty = ly + 28.0 + 16.0 * row as f64;
        writeln!(
            out,
            "<text x=\"{MARGIN:.2}\" y=\"{ty:.2}\">{label} weight min {:.3}</text><text x=\"{:.2}\" y=\"{ty:.2}\" text-anchor=\"end\">max {:.3}</text>",
            s.min,
            width - MARGIN,
            s.max
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
