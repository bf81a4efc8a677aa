//! SVG pictures of faces, spheres and developed regions. Floats appear only
//! in the emitted text.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::atlas::{Face2, NodalIASSphere};
use crate::lattice::{AffineMap2, Pt2};
use crate::surgery::MarkedPoint;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    pub boundary_width: f64,
    pub cut_dash: String,
    pub glyph: String,
    /// Pixels per lattice unit.
    pub scale: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            boundary_width: 3.0,
            cut_dash: "4 3".into(),
            glyph: "×".into(),
            scale: 60.0,
        }
    }
}

/// Shapes in lattice coordinates, collected before the viewport is known.
#[derive(Default)]
struct Scene {
    boundary: Vec<(Pt2, Pt2)>,
    cuts: Vec<Vec<Pt2>>,
    eigenlines: Vec<(Pt2, Pt2)>,
    nodes: Vec<(Pt2, i64)>,
    marks: Vec<Pt2>,
    fills: Vec<Vec<Pt2>>,
    labels: Vec<(Pt2, String)>,
}

fn f(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

impl Scene {
    fn points(&self) -> impl Iterator<Item = &Pt2> {
        self.boundary
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain(self.fills.iter().flatten())
            .chain(self.nodes.iter().map(|n| &n.0))
    }

    fn add_face(&mut self, face: &Face2, map: &AffineMap2) {
        let pts: Vec<Pt2> = face.polygon.iter().map(|p| map.apply(p)).collect();
        let n = pts.len();
        for i in 0..n {
            self.boundary.push((pts[i].clone(), pts[(i + 1) % n].clone()));
        }
        self.fills.push(pts);
        for node in &face.nodes {
            if let Ok([p, a, b]) = face.wedge(node) {
                self.cuts.push(vec![map.apply(&a), map.apply(&p), map.apply(&b)]);
            }
            self.nodes.push((map.apply(&node.position), node.multiplicity));
        }
    }

    fn svg(&self, style: &RenderStyle) -> String {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in self.points() {
            let (x, y) = (p[0].to_f64(), p[1].to_f64());
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let s = style.scale;
        let pad = 20.0;
        let w = (x1 - x0) * s + 2.0 * pad;
        let h = (y1 - y0) * s + 2.0 * pad;
        let tx = |p: &Pt2| f((p[0].to_f64() - x0) * s + pad);
        let ty = |p: &Pt2| f((y1 - p[1].to_f64()) * s + pad);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            f(w),
            f(h),
            f(w),
            f(h)
        );
        for poly in &self.fills {
            let pts: Vec<String> = poly.iter().map(|p| format!("{},{}", tx(p), ty(p))).collect();
            let _ = writeln!(
                out,
                r##"<polygon class="face" points="{}" fill="#f4f1e8" stroke="none"/>"##,
                pts.join(" ")
            );
        }
        for poly in &self.cuts {
            let pts: Vec<String> = poly.iter().map(|p| format!("{},{}", tx(p), ty(p))).collect();
            let _ = writeln!(
                out,
                r#"<polyline class="cut" points="{}" fill="white" stroke="black" stroke-width="1" stroke-dasharray="{}"/>"#,
                pts.join(" "),
                style.cut_dash
            );
        }
        for (a, b) in &self.boundary {
            let _ = writeln!(
                out,
                r#"<line class="boundary" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{}"/>"#,
                tx(a),
                ty(a),
                tx(b),
                ty(b),
                f(style.boundary_width)
            );
        }
        for (a, b) in &self.eigenlines {
            let _ = writeln!(
                out,
                r#"<line class="eigenline" x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-width="1" stroke-dasharray="{}"/>"#,
                tx(a),
                ty(a),
                tx(b),
                ty(b),
                style.cut_dash
            );
        }
        for p in &self.marks {
            let _ = writeln!(
                out,
                r#"<circle class="mark" cx="{}" cy="{}" r="3" fill="black"/>"#,
                tx(p),
                ty(p)
            );
        }
        for (p, k) in &self.nodes {
            let _ = writeln!(
                out,
                r#"<text class="node" x="{}" y="{}" text-anchor="middle" dominant-baseline="central" font-size="16">{}</text>"#,
                tx(p),
                ty(p),
                style.glyph
            );
            if *k > 1 {
                let _ = writeln!(
                    out,
                    r#"<text class="multiplicity" x="{}" y="{}" font-size="10">{k}</text>"#,
                    f((p[0].to_f64() - x0) * s + pad + 7.0),
                    f((y1 - p[1].to_f64()) * s + pad - 7.0)
                );
            }
        }
        for (p, text) in &self.labels {
            let _ = writeln!(
                out,
                r#"<text class="label" x="{}" y="{}" text-anchor="middle" font-size="12" fill="gray">{text}</text>"#,
                tx(p),
                ty(p)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn centroid(pts: &[Pt2]) -> Pt2 {
    let n = crate::lattice::Rat::int(pts.len() as i64);
    let mut c = [crate::lattice::Rat::zero(), crate::lattice::Rat::zero()];
    for p in pts {
        c = [&c[0] + &p[0], &c[1] + &p[1]];
    }
    [&c[0] / &n, &c[1] / &n]
}

/// One face in its own chart, with marked points on its sides.
pub fn render_face(face: &Face2, marks: &[MarkedPoint], style: &RenderStyle) -> String {
    let mut sc = Scene::default();
    sc.add_face(face, &AffineMap2::identity());
    for m in marks {
        if let Ok(p) = face.point_on_side(m.side, &m.param) {
            sc.marks.push(p);
        }
    }
    sc.svg(style)
}

/// Edge nodes of `s` lying on the sides of face `f`: midpoint and the side.
/// With `once`, an edge is reported only by its first face.
fn edge_nodes_of(s: &NodalIASSphere, f: usize, once: bool) -> Vec<(Pt2, Pt2, Pt2, i64)> {
    let face = &s.faces[f];
    let mut out = Vec::new();
    for (i, &e) in face.sides.iter().enumerate() {
        let Some(node) = &s.edges[e].node else { continue };
        if once && s.edges[e].faces[0] != f {
            continue;
        }
        let a = face.vertex(i).clone();
        let b = face.vertex(i + 1).clone();
        let half = crate::lattice::Rat::new(1, 2);
        let mid = [&(&a[0] + &b[0]) * &half, &(&a[1] + &b[1]) * &half];
        out.push((mid, a, b, node.multiplicity));
    }
    out
}

/// One face of a sphere; nodes sitting on edges are drawn at the side
/// midpoints with their eigenline (the side) dotted.
pub fn render_sphere_face(s: &NodalIASSphere, f: usize, style: &RenderStyle) -> String {
    let mut sc = Scene::default();
    sc.add_face(&s.faces[f], &AffineMap2::identity());
    for (mid, a, b, k) in edge_nodes_of(s, f, false) {
        sc.eigenlines.push((a, b));
        sc.nodes.push((mid, k));
    }
    sc.svg(style)
}

/// All faces side by side in a row, each in its own chart, labelled by index.
/// Each edge node is drawn once, on the first face of its edge.
pub fn render_sphere_net(s: &NodalIASSphere, style: &RenderStyle) -> String {
    let mut sc = Scene::default();
    let mut offset = crate::lattice::Rat::zero();
    let gap = crate::lattice::Rat::int(1);
    for (fi, face) in s.faces.iter().enumerate() {
        let xmin = face.polygon.iter().map(|p| p[0].clone()).min().expect("non-empty face");
        let xmax = face.polygon.iter().map(|p| p[0].clone()).max().expect("non-empty face");
        let shift = AffineMap2::new(
            crate::lattice::UniMat2::IDENTITY,
            [&offset - &xmin, crate::lattice::Rat::zero()],
        );
        sc.add_face(face, &shift);
        for (mid, a, b, k) in edge_nodes_of(s, fi, true) {
            sc.eigenlines.push((shift.apply(&a), shift.apply(&b)));
            sc.nodes.push((shift.apply(&mid), k));
        }
        let c = centroid(&face.polygon);
        sc.labels.push((shift.apply(&c), format!("F{fi}")));
        offset = &(&offset + &(&xmax - &xmin)) + &gap;
    }
    sc.svg(style)
}

/// Faces of a developed region, each placed by its chart.
pub fn render_developed(s: &NodalIASSphere, charts: &BTreeMap<usize, AffineMap2>, style: &RenderStyle) -> String {
    let mut sc = Scene::default();
    for (&f, m) in charts {
        if let Some(face) = s.faces.get(f) {
            sc.add_face(face, m);
            sc.labels.push((m.apply(&centroid(&face.polygon)), format!("F{f}")));
        }
    }
    sc.svg(style)
}
