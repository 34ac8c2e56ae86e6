//! SVG output for layouts, meshes, LoS graphs, areas, PRNs and UE samples.

use std::collections::BTreeSet;
use std::fmt::Write;

use losplan_core::geometry::{BBox, Point, Region};
use losplan_core::partition::Triangle;
use losplan_core::planner::Prn;
use losplan_core::{Layout, Tier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Layer {
    Layout,
    Triangles,
    Graph,
    Areas,
    Prns,
    Samples,
}

impl std::str::FromStr for Layer {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "layout" => Layer::Layout,
            "triangles" => Layer::Triangles,
            "graph" => Layer::Graph,
            "areas" => Layer::Areas,
            "prns" => Layer::Prns,
            "samples" => Layer::Samples,
            _ => return Err(format!("unknown layer {s:?}")),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub width_px: f64,
    pub wall_stroke: f64,
    pub mesh_stroke: f64,
    pub edge_stroke: f64,
    pub layers: BTreeSet<Layer>,
    /// Area fills, assigned by area index.
    pub colors: Vec<&'static str>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            width_px: 800.0,
            wall_stroke: 2.0,
            mesh_stroke: 0.5,
            edge_stroke: 0.4,
            layers: [Layer::Layout, Layer::Areas, Layer::Prns]
                .into_iter()
                .collect(),
            colors: vec![
                "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1",
                "#ff9da7", "#9c755f", "#bab0ac",
            ],
        }
    }
}

impl RenderSpec {
    pub fn color(&self, index: usize) -> &'static str {
        self.colors[index % self.colors.len()]
    }
}

fn tier_color(tier: Tier) -> &'static str {
    match tier {
        Tier::Primary => "#d62728",
        Tier::Secondary => "#1f77b4",
        Tier::Trinary => "#2ca02c",
    }
}

/// Everything a figure may show; empty parts are skipped.
#[derive(Debug, Default)]
pub struct Scene<'a> {
    pub layout: Option<&'a Layout>,
    pub triangles: &'a [Triangle],
    /// Edges between triangle ids.
    pub graph: &'a [(usize, usize)],
    pub areas: &'a [Region],
    pub prns: &'a [Prn],
    /// UE positions with their coverage verdict.
    pub samples: &'a [(Point, bool)],
}

struct Frame {
    bbox: BBox,
    scale: f64,
    pad: f64,
}

impl Frame {
    fn x(&self, p: Point) -> f64 {
        self.pad + (p.x - self.bbox.min.x) * self.scale
    }

    // SVG y grows downwards
    fn y(&self, p: Point) -> f64 {
        self.pad + (self.bbox.max.y - p.y) * self.scale
    }

    fn path(&self, rings: &[Vec<Point>]) -> String {
        let mut d = String::new();
        for ring in rings {
            for (i, &p) in ring.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{:.3} {:.3} ", self.x(p), self.y(p));
            }
            d.push('Z');
        }
        d
    }
}

pub fn render(scene: &Scene<'_>, spec: &RenderSpec) -> String {
    let mut pts: Vec<Point> = Vec::new();
    if let Some(l) = scene.layout {
        pts.extend(l.rings().flatten());
    }
    pts.extend(scene.triangles.iter().flat_map(|t| t.vertices));
    pts.extend(scene.prns.iter().map(Prn::point));
    let bbox =
        BBox::of(&pts).unwrap_or(BBox::of(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)]).unwrap());
    let pad = 10.0;
    let span = bbox.width().max(bbox.height()).max(1e-9);
    let scale = (spec.width_px - 2.0 * pad) / span;
    let f = Frame { bbox, scale, pad };
    let w = 2.0 * pad + bbox.width() * scale;
    let h = 2.0 * pad + bbox.height() * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" baseProfile="basic" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let on = |l: Layer| spec.layers.contains(&l);

    if let Some(layout) = scene.layout.filter(|_| on(Layer::Layout)) {
        let mut rings = vec![layout.outer.clone()];
        rings.extend(layout.holes.iter().cloned());
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="#f7f7f7" fill-rule="evenodd" stroke="none"/>"##,
            f.path(&rings)
        );
    }
    if on(Layer::Areas) && !scene.areas.is_empty() {
        out.push_str("<g fill-opacity=\"0.35\" stroke-width=\"0.5\">\n");
        for (k, a) in scene.areas.iter().enumerate() {
            let rings = a.rings();
            if rings.is_empty() {
                continue;
            }
            let c = spec.color(k);
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="{c}" stroke="{c}" fill-rule="evenodd"/>"#,
                f.path(&rings)
            );
        }
        out.push_str("</g>\n");
    }
    if on(Layer::Triangles) && !scene.triangles.is_empty() {
        let _ = writeln!(
            out,
            r##"<g fill="none" stroke="#888888" stroke-width="{}">"##,
            spec.mesh_stroke
        );
        for t in scene.triangles {
            let _ = writeln!(out, r#"<path d="{}"/>"#, f.path(&[t.vertices.to_vec()]));
        }
        out.push_str("</g>\n");
    }
    if on(Layer::Graph) && !scene.graph.is_empty() {
        let _ = writeln!(
            out,
            r##"<g stroke="#9467bd" stroke-width="{}" stroke-opacity="0.5">"##,
            spec.edge_stroke
        );
        for &(a, b) in scene.graph {
            let (Some(ta), Some(tb)) = (scene.triangles.get(a), scene.triangles.get(b)) else {
                continue;
            };
            let (p, q) = (ta.centroid(), tb.centroid());
            let _ = writeln!(
                out,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                f.x(p),
                f.y(p),
                f.x(q),
                f.y(q)
            );
        }
        out.push_str("</g>\n");
    }
    if let Some(layout) = scene.layout.filter(|_| on(Layer::Layout)) {
        let mut rings = vec![layout.outer.clone()];
        rings.extend(layout.holes.iter().cloned());
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="none" stroke="#222222" stroke-width="{}"/>"##,
            f.path(&rings),
            spec.wall_stroke
        );
    }
    if on(Layer::Samples) && !scene.samples.is_empty() {
        out.push_str("<g stroke=\"none\">\n");
        for &(p, covered) in scene.samples {
            let c = if covered { "#59a14f" } else { "#e15759" };
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="1.5" fill="{c}"/>"#,
                f.x(p),
                f.y(p)
            );
        }
        out.push_str("</g>\n");
    }
    if on(Layer::Prns) && !scene.prns.is_empty() {
        out.push_str("<g stroke=\"#000000\" stroke-width=\"0.8\">\n");
        for prn in scene.prns {
            let p = prn.point();
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="5" fill="{}"/>"#,
                f.x(p),
                f.y(p),
                tier_color(prn.tier)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use losplan_core::corpus;

    #[test]
    fn renders_every_layer_deterministically() {
        let layout = corpus::layout("l_shape").unwrap();
        let tris = losplan_core::partition::triangulate(&layout).unwrap();
        let prns = [Prn {
            x: 3.0,
            y: 3.0,
            tier: Tier::Primary,
            area: 0,
        }];
        let scene = Scene {
            layout: Some(&layout),
            triangles: &tris,
            graph: &[(0, 1)],
            areas: &[],
            prns: &prns,
            samples: &[(Point::new(1.0, 1.0), true)],
        };
        let spec = RenderSpec {
            layers: [
                Layer::Layout,
                Layer::Triangles,
                Layer::Graph,
                Layer::Areas,
                Layer::Prns,
                Layer::Samples,
            ]
            .into_iter()
            .collect(),
            ..RenderSpec::default()
        };
        let a = render(&scene, &spec);
        assert_eq!(a, render(&scene, &spec));
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), 2);
        assert!(a.contains("<line"));
    }

    #[test]
    fn colors_cycle_by_index() {
        let spec = RenderSpec::default();
        assert_eq!(spec.color(0), spec.color(spec.colors.len()));
        assert_ne!(spec.color(0), spec.color(1));
    }
}
