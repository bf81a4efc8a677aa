//! Integral affine 2-spheres with nodes.
//!
//! Each face is a convex rational polygon in its own chart. A node of a face
//! sits at the apex of a wedge that rests on one polygon side; the wedge is
//! removed from the chart and its two sides are glued by the node's shear.
//! Nodes of the Gross–Siebert type sit on edges instead and are recorded on
//! the edge.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    classify_shear, det2, sub2, AffineMap2, Pt2, Rat, ShearClass, UniMat2, UniMat3, Vec2i, Vec3i,
};
use crate::polygon;
use crate::toric::{FacetFrame, Polytope};

/// A node in the interior of a face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub position: Pt2,
    /// Primitive eigen direction; parallel to the side the wedge rests on.
    pub eigen: Vec2i,
    pub multiplicity: i64,
    /// First ray of the wedge, from the node towards its side.
    pub cut: Vec2i,
    /// Polygon side carrying the wedge.
    pub side: usize,
}

impl Node {
    pub fn monodromy(&self) -> UniMat2 {
        UniMat2::node_shear(self.eigen, self.multiplicity)
    }

    /// Second ray of the wedge.
    pub fn cut_end(&self) -> Vec2i {
        self.monodromy().apply(self.cut)
    }

    /// Gluing of the wedge sides: sends the `cut` side onto the `cut_end` side.
    pub fn wedge_map(&self) -> AffineMap2 {
        AffineMap2::about(&self.position, self.monodromy())
    }
}

/// A face: convex polygon, counterclockwise, with sphere labels on sides and
/// corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face2 {
    pub polygon: Vec<Pt2>,
    /// Sphere edge of side `i` (from vertex `i` to vertex `i + 1`).
    pub sides: Vec<usize>,
    /// Sphere vertex at polygon vertex `i`.
    pub corners: Vec<usize>,
    pub nodes: Vec<Node>,
}

/// The removed wedge of a node: apex, then the points where `cut` and
/// `cut_end` meet the side.
pub type Wedge = [Pt2; 3];

impl Face2 {
    /// A flat face with locally numbered sides and corners.
    pub fn flat(polygon: Vec<Pt2>) -> Self {
        let n = polygon.len();
        Face2 {
            polygon,
            sides: (0..n).collect(),
            corners: (0..n).collect(),
            nodes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.polygon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygon.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &Pt2 {
        &self.polygon[i % self.len()]
    }

    pub fn side_direction(&self, i: usize) -> Result<(Vec2i, Rat)> {
        polygon::side(&self.polygon, i)
    }

    /// Lattice height of `x` over the line of side `i`, positive inside.
    pub fn height(&self, i: usize, x: &Pt2) -> Result<Rat> {
        let (d, _) = self.side_direction(i)?;
        let r = sub2(x, self.vertex(i));
        Ok(r[1].mul_int(d[0]) - r[0].mul_int(d[1]))
    }

    /// Parameter of a point on the line of side `i`, in lattice units from
    /// vertex `i`.
    pub fn side_param(&self, i: usize, x: &Pt2) -> Result<Rat> {
        let (d, _) = self.side_direction(i)?;
        let r = sub2(x, self.vertex(i));
        Ok(if d[0] != 0 {
            &r[0] / &Rat::int(d[0])
        } else {
            &r[1] / &Rat::int(d[1])
        })
    }

    pub fn point_on_side(&self, i: usize, s: &Rat) -> Result<Pt2> {
        let (d, _) = self.side_direction(i)?;
        let p = self.vertex(i);
        Ok([&p[0] + &s.mul_int(d[0]), &p[1] + &s.mul_int(d[1])])
    }

    fn ray_hit(&self, i: usize, p: &Pt2, r: Vec2i) -> Result<Pt2> {
        let (d, _) = self.side_direction(i)?;
        let h = self.height(i, p)?;
        let dr = det2(d, r);
        if dr >= 0 || !h.is_positive() {
            return Err(Error::Wedge(format!(
                "ray {r:?} from {p:?} does not reach side {i}"
            )));
        }
        let s = &h / &Rat::int(-dr);
        Ok([&p[0] + &s.mul_int(r[0]), &p[1] + &s.mul_int(r[1])])
    }

    pub fn wedge(&self, node: &Node) -> Result<Wedge> {
        let a = self.ray_hit(node.side, &node.position, node.cut)?;
        let b = self.ray_hit(node.side, &node.position, node.cut_end())?;
        Ok([node.position.clone(), a, b])
    }

    /// Interval `[s0, s1]` of side parameters covered by the wedge base.
    pub fn wedge_base(&self, node: &Node) -> Result<(Rat, Rat)> {
        let [_, a, b] = self.wedge(node)?;
        Ok((
            self.side_param(node.side, &a)?,
            self.side_param(node.side, &b)?,
        ))
    }

    /// Nodes resting on side `i`, ordered along the side.
    pub fn nodes_on_side(&self, i: usize) -> Result<Vec<usize>> {
        let mut v: Vec<(Rat, usize)> = Vec::new();
        for (k, n) in self.nodes.iter().enumerate() {
            if n.side == i {
                v.push((self.wedge_base(n)?.0, k));
            }
        }
        v.sort();
        Ok(v.into_iter().map(|x| x.1).collect())
    }

    /// Length of side `i` in the glued face: the polygon side minus wedge bases.
    pub fn side_length(&self, i: usize) -> Result<Rat> {
        let (_, mut len) = self.side_direction(i)?;
        for k in self.nodes_on_side(i)? {
            let (a, b) = self.wedge_base(&self.nodes[k])?;
            len = len - (b - a);
        }
        Ok(len)
    }

    /// Chart change along side `i`: takes chart coordinates near its end to
    /// the coordinates continued from its start along the side.
    pub fn transport(&self, i: usize) -> Result<AffineMap2> {
        let mut t = AffineMap2::identity();
        for k in self.nodes_on_side(i)? {
            t = t.compose(&self.nodes[k].wedge_map().inverse());
        }
        Ok(t)
    }

    /// Area of the glued face: polygon area minus wedge areas.
    pub fn affine_area(&self) -> Result<Rat> {
        let mut a = polygon::area(&self.polygon);
        for n in &self.nodes {
            a = a - polygon::area(&self.wedge(n)?);
        }
        Ok(a)
    }

    pub fn total_multiplicity(&self) -> i64 {
        self.nodes.iter().map(|n| n.multiplicity).sum()
    }

    /// Whether `x` lies in the chart domain (polygon minus open wedges).
    pub fn in_domain(&self, x: &Pt2) -> Result<bool> {
        if !polygon::contains(&self.polygon, x, false) {
            return Ok(false);
        }
        for n in &self.nodes {
            if polygon::contains(&self.wedge(n)?, x, true) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks convexity, orientation, node placement and wedge disjointness.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n < 3 || self.sides.len() != n || self.corners.len() != n {
            return Err(Error::InvalidInput(format!(
                "face with {n} vertices, {} sides, {} corners",
                self.sides.len(),
                self.corners.len()
            )));
        }
        if !polygon::is_ccw(&self.polygon) {
            return Err(Error::InvalidInput("face polygon is not counterclockwise".into()));
        }
        for i in 0..n {
            let o = polygon::orient(self.vertex(i), self.vertex(i + 1), self.vertex(i + 2));
            if !o.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "face polygon is not strictly convex at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        let mut wedges = Vec::new();
        for (k, node) in self.nodes.iter().enumerate() {
            if node.multiplicity < 1 {
                return Err(Error::Wedge(format!("node {k} has multiplicity {}", node.multiplicity)));
            }
            if node.side >= n {
                return Err(Error::Wedge(format!("node {k} rests on missing side {}", node.side)));
            }
            let (d, len) = self.side_direction(node.side)?;
            if node.eigen != d && node.eigen != [-d[0], -d[1]] {
                return Err(Error::Wedge(format!("node {k} eigenline is not parallel to its side")));
            }
            if !polygon::contains(&self.polygon, &node.position, true) {
                return Err(Error::Wedge(format!("node {k} is not in the face interior")));
            }
            let (a, b) = self.wedge_base(node)?;
            if !a.is_positive() || b >= len {
                return Err(Error::Wedge(format!(
                    "wedge of node {k} leaves side {} (base {a}..{b}, side length {len})",
                    node.side
                )));
            }
            wedges.push(self.wedge(node)?);
        }
        for i in 0..wedges.len() {
            for j in i + 1..wedges.len() {
                if polygon::overlap_area(&wedges[i], &wedges[j]).is_positive() {
                    return Err(Error::Wedge(format!("wedges of nodes {i} and {j} overlap")));
                }
                for (a, b) in [(i, j), (j, i)] {
                    if polygon::contains(&wedges[a], &self.nodes[b].position, false) {
                        return Err(Error::Wedge(format!("node {b} lies on the wedge of node {a}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A node recorded on an edge (Gross–Siebert node, or an unresolved marked
/// point of the given multiplicity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeNode {
    pub multiplicity: i64,
    #[serde(default)]
    pub marked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRec {
    /// `faces[0]` runs along the edge from `vertices[0]` to `vertices[1]`.
    pub faces: [usize; 2],
    pub vertices: [usize; 2],
    pub length: Rat,
    pub node: Option<EdgeNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRec {
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodalIASSphere {
    pub faces: Vec<Face2>,
    pub edges: Vec<EdgeRec>,
    pub vertices: Vec<VertexRec>,
}

impl NodalIASSphere {
    /// Assembles the cell complex from labelled faces. `edge_nodes` lists
    /// nodes sitting on edges.
    pub fn from_faces(faces: Vec<Face2>, edge_nodes: &BTreeMap<usize, EdgeNode>) -> Result<Self> {
        let mut sides: BTreeMap<usize, Vec<(usize, usize, usize, usize)>> = BTreeMap::new();
        let mut nv = 0;
        for (f, face) in faces.iter().enumerate() {
            face.validate()
                .map_err(|e| Error::InvalidInput(format!("face {f}: {e}")))?;
            let n = face.len();
            for i in 0..n {
                let (a, b) = (face.corners[i], face.corners[(i + 1) % n]);
                sides.entry(face.sides[i]).or_default().push((f, i, a, b));
                nv = nv.max(a + 1).max(b + 1);
            }
        }
        let ne = sides.keys().next_back().map_or(0, |k| k + 1);
        if sides.len() != ne {
            return Err(Error::InvalidInput("edge ids are not contiguous".into()));
        }
        let mut edges = Vec::with_capacity(ne);
        for (e, uses) in &sides {
            let [(f0, i0, a, b), (f1, i1, a1, b1)] = uses[..] else {
                return Err(Error::Gluing(format!("edge {e} has {} sides, expected 2", uses.len())));
            };
            if (a1, b1) != (b, a) || a == b {
                return Err(Error::Gluing(format!(
                    "edge {e} is traversed inconsistently by faces {f0} and {f1}"
                )));
            }
            let l0 = faces[f0].side_length(i0)?;
            let l1 = faces[f1].side_length(i1)?;
            if l0 != l1 {
                return Err(Error::EdgeLengthMismatch {
                    edge: *e,
                    left: l0.to_string(),
                    right: l1.to_string(),
                });
            }
            if !l0.is_positive() {
                return Err(Error::NonPositiveLength(*e));
            }
            edges.push(EdgeRec {
                faces: [f0, f1],
                vertices: [a, b],
                length: l0,
                node: edge_nodes.get(e).cloned(),
            });
        }
        if let Some(e) = edge_nodes.keys().find(|&&e| e >= ne) {
            return Err(Error::InvalidInput(format!("edge node on missing edge {e}")));
        }
        let mut vertices = vec![
            VertexRec {
                edges: Vec::new(),
                faces: Vec::new(),
            };
            nv
        ];
        for (e, rec) in edges.iter().enumerate() {
            for v in rec.vertices {
                vertices[v].edges.push(e);
            }
        }
        for (f, face) in faces.iter().enumerate() {
            for &v in &face.corners {
                vertices[v].faces.push(f);
            }
        }
        for v in &mut vertices {
            v.edges.sort_unstable();
            v.faces.sort_unstable();
        }
        let s = NodalIASSphere {
            faces,
            edges,
            vertices,
        };
        s.check_topology()?;
        Ok(s)
    }

    fn check_topology(&self) -> Result<()> {
        for (v, rec) in self.vertices.iter().enumerate() {
            if rec.edges.len() != 3 || rec.faces.len() != 3 {
                return Err(Error::Gluing(format!(
                    "vertex {v} has {} edges and {} faces, expected 3",
                    rec.edges.len(),
                    rec.faces.len()
                )));
            }
            if rec.faces.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Gluing(format!("vertex {v} appears twice in one face")));
            }
        }
        if self.euler_characteristic() != 2 {
            return Err(Error::Gluing(format!(
                "Euler characteristic {} is not that of a sphere",
                self.euler_characteristic()
            )));
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Polygon side of face `f` lying on edge `e`.
    pub fn side_of(&self, f: usize, e: usize) -> Result<usize> {
        self.faces
            .get(f)
            .and_then(|face| face.sides.iter().position(|&s| s == e))
            .ok_or_else(|| Error::InvalidInput(format!("face {f} does not contain edge {e}")))
    }

    /// Polygon vertex of face `f` at sphere vertex `v`.
    pub fn corner_of(&self, f: usize, v: usize) -> Result<usize> {
        self.faces
            .get(f)
            .and_then(|face| face.corners.iter().position(|&c| c == v))
            .ok_or_else(|| Error::InvalidInput(format!("face {f} does not contain vertex {v}")))
    }

    pub fn other_face(&self, e: usize, f: usize) -> Result<usize> {
        let [a, b] = self.edges[e].faces;
        if f == a {
            Ok(b)
        } else if f == b {
            Ok(a)
        } else {
            Err(Error::InvalidInput(format!("face {f} is not adjacent to edge {e}")))
        }
    }

    /// Direction of edge `e` leaving corner `v` of face `f`, in the face chart.
    fn corner_direction(&self, f: usize, v: usize, e: usize) -> Result<Vec2i> {
        let face = &self.faces[f];
        let c = self.corner_of(f, v)?;
        let n = face.len();
        if face.sides[c] == e {
            Ok(face.side_direction(c)?.0)
        } else if face.sides[(c + n - 1) % n] == e {
            let d = face.side_direction((c + n - 1) % n)?.0;
            Ok([-d[0], -d[1]])
        } else {
            Err(Error::InvalidInput(format!("edge {e} does not meet corner {v} of face {f}")))
        }
    }

    /// Canonical chart at vertex `v`: for each incident face (in the order of
    /// `vertices[v].faces`), the map from its chart into a common plane in
    /// which the three edges leave the origin along `(1,0)`, `(0,1)`,
    /// `(-1,-1)`.
    pub fn canonical_vertex_chart(&self, v: usize) -> Result<Vec<(usize, AffineMap2)>> {
        let rec = self
            .vertices
            .get(v)
            .ok_or_else(|| Error::InvalidInput(format!("no vertex {v}")))?;
        // edges ordered by the incident face not containing them
        let mut by_opp: Vec<(usize, usize)> = Vec::new();
        for &e in &rec.edges {
            let opp = rec
                .faces
                .iter()
                .copied()
                .find(|f| !self.edges[e].faces.contains(f))
                .ok_or_else(|| Error::Gluing(format!("link of vertex {v} is not a triangle")))?;
            by_opp.push((opp, e));
        }
        by_opp.sort_unstable();
        let order: Vec<usize> = by_opp.iter().map(|x| x.1).collect();
        let bars = |swap: bool| -> BTreeMap<usize, Vec2i> {
            let mut b = [[1, 0], [0, 1], [-1, -1]];
            if swap {
                b.swap(0, 1);
            }
            order.iter().copied().zip(b).collect()
        };
        let build = |swap: bool| -> Result<Vec<(usize, AffineMap2)>> {
            let eb = bars(swap);
            let mut out = Vec::new();
            for &f in &rec.faces {
                let face = &self.faces[f];
                let c = self.corner_of(f, v)?;
                let n = face.len();
                let (ea, eb_) = (face.sides[(c + n - 1) % n], face.sides[c]);
                let da = self.corner_direction(f, v, ea)?;
                let db = self.corner_direction(f, v, eb_)?;
                let dm = UniMat2::from_cols(da, db).map_err(|_| Error::NotDelzant {
                    vertex: v,
                    reason: format!("corner of face {f} is not smooth"),
                })?;
                let em = UniMat2::from_cols(eb[&ea], eb[&eb_])?;
                let l = em.mul(&dm.inverse());
                out.push((f, AffineMap2::mapping_point(l, face.vertex(c), &[Rat::zero(), Rat::zero()])));
            }
            Ok(out)
        };
        let mut charts = build(false)?;
        if charts[0].1.linear.det() < 0 {
            charts = build(true)?;
        }
        if charts.iter().any(|(_, m)| m.linear.det() != 1) {
            return Err(Error::Gluing(format!(
                "faces around vertex {v} are not consistently oriented"
            )));
        }
        Ok(charts)
    }

    /// Image of each edge leaving vertex `v` in the canonical vertex chart.
    pub fn vertex_edge_images(&self, v: usize) -> Result<BTreeMap<usize, Vec2i>> {
        let charts = self.canonical_vertex_chart(v)?;
        let mut out = BTreeMap::new();
        for &e in &self.vertices[v].edges {
            let f = self.edges[e].faces[0];
            let chart = &charts.iter().find(|(g, _)| *g == f).expect("face at vertex").1;
            out.insert(e, chart.linear.apply(self.corner_direction(f, v, e)?));
        }
        Ok(out)
    }

    fn vertex_map(&self, v: usize, f: usize) -> Result<AffineMap2> {
        self.canonical_vertex_chart(v)?
            .into_iter()
            .find(|(g, _)| *g == f)
            .map(|x| x.1)
            .ok_or_else(|| Error::InvalidInput(format!("face {f} does not contain vertex {v}")))
    }

    /// Chart change across edge `e` near its endpoint `v`: expresses the chart
    /// of `to_face` in the chart of `from_face`.
    pub fn edge_unfolding(&self, e: usize, v: usize, from_face: usize, to_face: usize) -> Result<AffineMap2> {
        let rec = self
            .edges
            .get(e)
            .ok_or_else(|| Error::InvalidInput(format!("no edge {e}")))?;
        if !rec.vertices.contains(&v) {
            return Err(Error::InvalidInput(format!("vertex {v} is not an endpoint of edge {e}")));
        }
        for f in [from_face, to_face] {
            if !rec.faces.contains(&f) {
                return Err(Error::InvalidInput(format!("face {f} is not adjacent to edge {e}")));
            }
        }
        let from = self.vertex_map(v, from_face)?;
        let to = self.vertex_map(v, to_face)?;
        Ok(from.inverse().compose(&to))
    }

    /// Chart change along edge `e` inside face `f`: from the chart near
    /// endpoint `to_v` to the chart continued from endpoint `from_v`.
    pub fn edge_transport(&self, e: usize, f: usize, from_v: usize) -> Result<AffineMap2> {
        let i = self.side_of(f, e)?;
        let face = &self.faces[f];
        let t = face.transport(i)?;
        if face.corners[i] == from_v {
            Ok(t)
        } else {
            Ok(t.inverse())
        }
    }

    /// Monodromy of the counterclockwise loop hugging edge `e`, based in the
    /// chart of `faces[0]` near `vertices[0]`.
    pub fn edge_loop(&self, e: usize) -> Result<AffineMap2> {
        let rec = &self.edges[e];
        let [f0, f1] = rec.faces;
        let [va, vb] = rec.vertices;
        let aa = self.edge_unfolding(e, va, f0, f1)?;
        let ab = self.edge_unfolding(e, vb, f0, f1)?;
        let t0 = self.edge_transport(e, f0, va)?;
        let t1 = self.edge_transport(e, f1, vb)?;
        Ok(t0.compose(&ab).compose(&t1).compose(&aa.inverse()))
    }

    /// Direction of edge `e` from `vertices[0]` in the chart of `faces[0]`.
    pub fn edge_direction(&self, e: usize) -> Result<Vec2i> {
        let rec = &self.edges[e];
        self.corner_direction(rec.faces[0], rec.vertices[0], e)
    }

    /// Expected hugging-loop monodromy from the nodes recorded on the edge.
    pub fn expected_edge_loop(&self, e: usize) -> Result<AffineMap2> {
        let rec = &self.edges[e];
        let k = rec.node.as_ref().map_or(0, |n| n.multiplicity);
        if k == 0 {
            return Ok(AffineMap2::identity());
        }
        let d = self.edge_direction(e)?;
        let f0 = rec.faces[0];
        let p = self.faces[f0].vertex(self.corner_of(f0, rec.vertices[0])?).clone();
        Ok(AffineMap2::about(&p, UniMat2::node_shear(d, k)))
    }

    pub fn node_count(&self) -> (usize, i64) {
        let mut count = 0;
        let mut total = 0;
        for f in &self.faces {
            count += f.nodes.len();
            total += f.total_multiplicity();
        }
        for e in &self.edges {
            if let Some(n) = &e.node {
                count += 1;
                total += n.multiplicity;
            }
        }
        (count, total)
    }
}

/// One step of a combinatorial loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Crossing {
    /// Cross edge `edge` near its endpoint `vertex` into the other face.
    Edge { edge: usize, vertex: usize },
    /// Cross the wedge of node `node` of the current face, counterclockwise
    /// around the node when `ccw`.
    Wedge { node: usize, ccw: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopMonodromy {
    pub map: AffineMap2,
    pub class: ShearClass,
}

impl NodalIASSphere {
    /// Monodromy of a loop starting and ending in face `start`. The path
    /// between consecutive crossings stays inside the current chart domain.
    /// The result expresses the final chart in the starting chart.
    pub fn loop_monodromy(&self, start: usize, word: &[Crossing]) -> Result<LoopMonodromy> {
        if start >= self.faces.len() {
            return Err(Error::InvalidInput(format!("no face {start}")));
        }
        let mut face = start;
        let mut chart = AffineMap2::identity();
        for (i, c) in word.iter().enumerate() {
            match *c {
                Crossing::Edge { edge, vertex } => {
                    if edge >= self.edges.len() {
                        return Err(Error::InvalidInput(format!("step {i}: no edge {edge}")));
                    }
                    let next = self.other_face(edge, face)?;
                    chart = chart.compose(&self.edge_unfolding(edge, vertex, face, next)?);
                    face = next;
                }
                Crossing::Wedge { node, ccw } => {
                    let n = self.faces[face].nodes.get(node).ok_or_else(|| {
                        Error::InvalidInput(format!("step {i}: face {face} has no node {node}"))
                    })?;
                    let w = n.wedge_map();
                    chart = chart.compose(&if ccw { w.inverse() } else { w });
                }
            }
        }
        if face != start {
            return Err(Error::InvalidInput(format!(
                "open loop: starts in face {start}, ends in face {face}"
            )));
        }
        let class = classify_shear(&chart.linear);
        Ok(LoopMonodromy { map: chart, class })
    }
}

/// A piecewise linear function near an edge, given by its linear parts in
/// the two adjacent face charts near one endpoint, vanishing at the edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLFunctionOverEdge {
    pub edge: usize,
    pub vertex: usize,
    pub from_face: usize,
    pub to_face: usize,
    pub from_part: Vec2i,
    pub to_part: Vec2i,
}

fn apply_covector(c: Vec2i, x: Vec2i) -> i64 {
    c[0] * x[0] + c[1] * x[1]
}

impl NodalIASSphere {
    /// The integer `k` with `to_part − from_part ∘ A = k·δ`, where `A` is the
    /// edge unfolding and `δ` the primitive covector vanishing on the edge,
    /// positive into the target face.
    pub fn weight(&self, f: &PLFunctionOverEdge) -> Result<i64> {
        let a = self.edge_unfolding(f.edge, f.vertex, f.from_face, f.to_face)?;
        let d_to = self.corner_direction(f.to_face, f.vertex, f.edge)?;
        let pulled = a.linear.pull_covector(f.from_part);
        if apply_covector(f.to_part, d_to) != apply_covector(pulled, d_to) {
            return Err(Error::InvalidInput(format!(
                "function is discontinuous across edge {}",
                f.edge
            )));
        }
        let diff = [f.to_part[0] - pulled[0], f.to_part[1] - pulled[1]];
        // δ(x) = ±det(d_to, x), signed to be positive into the target face
        let sign = if self.faces[f.to_face].corners[self.side_of(f.to_face, f.edge)?] == f.vertex {
            1
        } else {
            -1
        };
        let delta = [-d_to[1] * sign, d_to[0] * sign];
        let k = if delta[0] != 0 {
            diff[0] / delta[0]
        } else {
            diff[1] / delta[1]
        };
        debug_assert_eq!([k * delta[0], k * delta[1]], diff);
        Ok(k)
    }

    /// The same function described near the other endpoint of the edge,
    /// continued along the edge inside each face.
    pub fn transfer_to_other_end(&self, f: &PLFunctionOverEdge) -> Result<PLFunctionOverEdge> {
        let rec = &self.edges[f.edge];
        let other = if rec.vertices[0] == f.vertex {
            rec.vertices[1]
        } else {
            rec.vertices[0]
        };
        // charts near `other` are continued from `f.vertex` by the transports
        let tf = self.edge_transport(f.edge, f.from_face, f.vertex)?;
        let tt = self.edge_transport(f.edge, f.to_face, f.vertex)?;
        Ok(PLFunctionOverEdge {
            edge: f.edge,
            vertex: other,
            from_face: f.from_face,
            to_face: f.to_face,
            from_part: tf.linear.pull_covector(f.from_part),
            to_part: tt.linear.pull_covector(f.to_part),
        })
    }
}

impl NodalIASSphere {
    /// Charts for a node-free region developed into the plane of `base`.
    /// Faces are joined through `gates` (edge, endpoint); every gate must be
    /// compatible with the charts reached through the others.
    pub fn developing_map(
        &self,
        region: &[usize],
        gates: &[(usize, usize)],
        base: usize,
    ) -> Result<BTreeMap<usize, AffineMap2>> {
        let cells: BTreeSet<usize> = region.iter().copied().collect();
        if !cells.contains(&base) {
            return Err(Error::InvalidInput(format!("base face {base} is not in the region")));
        }
        for &f in &cells {
            if f >= self.faces.len() {
                return Err(Error::InvalidInput(format!("no face {f}")));
            }
            if !self.faces[f].nodes.is_empty() {
                return Err(Error::Monodromy(format!("face {f} carries nodes")));
            }
        }
        let mut maps: BTreeMap<usize, AffineMap2> = BTreeMap::new();
        maps.insert(base, AffineMap2::identity());
        let mut used = vec![false; gates.len()];
        let mut queue = VecDeque::from([base]);
        while let Some(f) = queue.pop_front() {
            for (gi, &(e, v)) in gates.iter().enumerate() {
                if used[gi] || !self.edges.get(e).is_some_and(|r| r.faces.contains(&f)) {
                    continue;
                }
                let g = self.other_face(e, f)?;
                if !cells.contains(&g) {
                    continue;
                }
                used[gi] = true;
                let m = maps[&f].compose(&self.edge_unfolding(e, v, f, g)?);
                match maps.get(&g) {
                    None => {
                        maps.insert(g, m);
                        queue.push_back(g);
                    }
                    Some(old) if *old == m => {}
                    Some(old) => {
                        return Err(Error::Monodromy(format!(
                            "faces {f} -> {g} through edge {e} at vertex {v}: monodromy {}",
                            old.inverse().compose(&m).linear
                        )));
                    }
                }
            }
        }
        if let Some(f) = cells.iter().find(|f| !maps.contains_key(f)) {
            return Err(Error::InvalidInput(format!("face {f} is not reachable through the gates")));
        }
        Ok(maps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDefect {
    pub edge: usize,
    /// Hugging-loop monodromy based in `faces[0]` near `vertices[0]`.
    pub loop_map: AffineMap2,
    pub expected: AffineMap2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotalDefect {
    pub total_multiplicity: i64,
    pub node_count: usize,
    pub ok: bool,
    pub edge_defects: Vec<EdgeDefect>,
    pub vertex_failures: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasReport {
    pub issues: Vec<String>,
}

impl AtlasReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl NodalIASSphere {
    fn edge_defects(&self) -> (Vec<EdgeDefect>, Vec<String>) {
        let mut defects = Vec::new();
        let mut failures = Vec::new();
        for e in 0..self.edges.len() {
            match (self.edge_loop(e), self.expected_edge_loop(e)) {
                (Ok(l), Ok(x)) if l == x => {}
                (Ok(l), Ok(x)) => defects.push(EdgeDefect {
                    edge: e,
                    loop_map: l,
                    expected: x,
                }),
                (Err(err), _) | (_, Err(err)) => failures.push(format!("edge {e}: {err}")),
            }
        }
        (defects, failures)
    }

    /// Node census plus the global consistency verdict: vertex charts exist,
    /// every edge-hugging loop equals the shear of the nodes it encloses, and
    /// the multiplicities add up to `12·χ`.
    pub fn total_defect(&self) -> TotalDefect {
        let (node_count, total) = self.node_count();
        let mut vertex_failures: Vec<String> = (0..self.vertices.len())
            .filter_map(|v| self.canonical_vertex_chart(v).err().map(|e| format!("vertex {v}: {e}")))
            .collect();
        let (edge_defects, more) = self.edge_defects();
        vertex_failures.extend(more);
        let ok = vertex_failures.is_empty()
            && edge_defects.is_empty()
            && total == 12 * self.euler_characteristic();
        TotalDefect {
            total_multiplicity: total,
            node_count,
            ok,
            edge_defects,
            vertex_failures,
        }
    }

    /// Checks every face and the gluing: lengths, vertex charts, and the
    /// agreement of endpoint unfoldings up to the recorded nodes.
    pub fn validate_atlas(&self) -> AtlasReport {
        let mut issues = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            if let Err(e) = face.validate() {
                issues.push(format!("face {f}: {e}"));
            }
        }
        if self.euler_characteristic() != 2 {
            issues.push(format!("Euler characteristic {}", self.euler_characteristic()));
        }
        for (e, rec) in self.edges.iter().enumerate() {
            for f in rec.faces {
                match self.side_of(f, e).and_then(|i| self.faces[f].side_length(i)) {
                    Ok(l) if l == rec.length => {}
                    Ok(l) => issues.push(format!("edge {e}: length {l} in face {f}, recorded {}", rec.length)),
                    Err(err) => issues.push(format!("edge {e}: {err}")),
                }
            }
        }
        for v in 0..self.vertices.len() {
            if let Err(err) = self.canonical_vertex_chart(v) {
                issues.push(format!("vertex {v}: {err}"));
            }
        }
        let (defects, failures) = self.edge_defects();
        issues.extend(failures);
        for d in defects {
            issues.push(format!(
                "edge {}: endpoint unfoldings disagree, defect {} + {:?}",
                d.edge, d.loop_map.linear, d.loop_map.translation
            ));
        }
        AtlasReport { issues }
    }

    /// Point of edge `e` at lattice distance `s` from `vertices[0]`, in the
    /// chart of `faces[0]` continued from `vertices[0]`.
    pub fn edge_point(&self, e: usize, s: &Rat) -> Result<Pt2> {
        let rec = &self.edges[e];
        let f0 = rec.faces[0];
        let p = self.faces[f0].vertex(self.corner_of(f0, rec.vertices[0])?);
        let d = self.edge_direction(e)?;
        Ok([&p[0] + &s.mul_int(d[0]), &p[1] + &s.mul_int(d[1])])
    }
}

/// The boundary of a polytope as a sphere of flat faces, each facet in the
/// given frame (which must be outward oriented), with no nodes.
pub fn polytope_boundary(p: &Polytope, frames: &[FacetFrame]) -> Result<NodalIASSphere> {
    if frames.len() != p.num_facets() {
        return Err(Error::InvalidInput(format!(
            "{} frames for {} facets",
            frames.len(),
            p.num_facets()
        )));
    }
    let mut faces = Vec::new();
    for (f, fr) in frames.iter().enumerate() {
        let (ids, pts) = p.facet_polygon_labeled(f, fr)?;
        if ids != p.facet_vertices[f] {
            return Err(Error::InvalidInput(format!("frame of facet {f} is not outward oriented")));
        }
        faces.push(Face2 {
            polygon: pts,
            sides: p.facet_edges[f].clone(),
            corners: ids,
            nodes: Vec::new(),
        });
    }
    NodalIASSphere::from_faces(faces, &BTreeMap::new())
}

pub fn default_frames(p: &Polytope) -> Result<Vec<FacetFrame>> {
    (0..p.num_facets()).map(|f| p.default_frame(f)).collect()
}

/// Quotient projection `Z³ → Z³/⟨v₁+v₂+v₃⟩ ≅ Z²` at a simple vertex, with
/// edge directions sent to `(1,0)`, `(0,1)`, `(-1,-1)`; edges are ordered by
/// the facet through the vertex that does not contain them. Returned as the
/// images of `e₁, e₂, e₃`.
pub fn vertex_quotient(p: &Polytope, v: usize) -> Result<[Vec2i; 3]> {
    let fs = &p.vertex_facets[v];
    let mut es: Vec<(usize, Vec3i)> = Vec::new();
    for (e, d) in p.edges_at(v) {
        let opp = fs
            .iter()
            .copied()
            .find(|f| !p.edges[e].facets.contains(f))
            .ok_or_else(|| Error::NotDelzant {
                vertex: v,
                reason: "non-simple vertex".into(),
            })?;
        es.push((opp, d));
    }
    es.sort_unstable();
    if es.len() != 3 {
        return Err(Error::NotDelzant {
            vertex: v,
            reason: "non-simple vertex".into(),
        });
    }
    let m = UniMat3([
        [es[0].1[0], es[1].1[0], es[2].1[0]],
        [es[0].1[1], es[1].1[1], es[2].1[1]],
        [es[0].1[2], es[1].1[2], es[2].1[2]],
    ]);
    if m.det().abs() != 1 {
        return Err(Error::NotDelzant {
            vertex: v,
            reason: format!("edge directions have determinant {}", m.det()),
        });
    }
    // π = B · M⁻¹ with B the images of the edge directions
    let inv = m.inverse();
    let b = [[1i64, 0, -1], [0, 1, -1]];
    let mut out = [[0i64; 2]; 3];
    for (j, col) in out.iter_mut().enumerate() {
        for r in 0..2 {
            col[r] = (0..3).map(|l| b[r][l] * inv.0[l][j]).sum();
        }
    }
    Ok(out)
}
