//! Rational 3-polytopes cut out by half-spaces `⟨ν, x⟩ ≤ b` with outward
//! primitive normals, with their face lattice and toric invariants.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    complete_basis3, cross3, det3, dot3, dot3r, hermite_rows, is_primitive, rational_direction,
    sub2, sub3, Pt2, Pt3, Rat, UniMat3, Vec2i, Vec3i,
};
use crate::polygon;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec3i,
    pub support: Rat,
}

impl HalfSpace {
    pub fn new(normal: Vec3i, support: impl Into<Rat>) -> Result<Self> {
        if !is_primitive(normal) {
            return Err(Error::InvalidInput(format!("normal {normal:?} is not primitive")));
        }
        Ok(HalfSpace {
            normal,
            support: support.into(),
        })
    }

    fn slack(&self, x: &Pt3) -> Rat {
        &self.support - &dot3r(self.normal, x)
    }
}

/// JSON form: `{"normals": [[a,b,c], …], "supports": ["p/q", …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub normals: Vec<Vec3i>,
    pub supports: Vec<Rat>,
}

impl PolytopeSpec {
    pub fn halfspaces(&self) -> Result<Vec<HalfSpace>> {
        if self.normals.len() != self.supports.len() {
            return Err(Error::InvalidInput(format!(
                "{} normals but {} supports",
                self.normals.len(),
                self.supports.len()
            )));
        }
        self.normals
            .iter()
            .zip(&self.supports)
            .map(|(n, b)| HalfSpace::new(*n, b.clone()))
            .collect()
    }

    pub fn from_halfspaces(hs: &[HalfSpace]) -> Self {
        PolytopeSpec {
            normals: hs.iter().map(|h| h.normal).collect(),
            supports: hs.iter().map(|h| h.support.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// The two facets containing the edge, in increasing order.
    pub facets: [usize; 2],
    /// Endpoints, in increasing order.
    pub vertices: [usize; 2],
    /// Primitive direction from `vertices[0]` to `vertices[1]`.
    pub direction: Vec3i,
}

/// A bounded full-dimensional polytope with its face lattice.
///
/// Vertices are indexed by the sorted list of facets through them, and edges
/// by their facet pair, so polytopes of the same combinatorial type built from
/// the same normals share all indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polytope {
    pub halfspaces: Vec<HalfSpace>,
    pub vertices: Vec<Pt3>,
    /// Facets through each vertex, sorted.
    pub vertex_facets: Vec<Vec<usize>>,
    pub edges: Vec<Edge>,
    /// Vertex cycle of each facet, counterclockwise seen from outside.
    pub facet_vertices: Vec<Vec<usize>>,
    /// `facet_edges[f][i]` joins `facet_vertices[f][i]` and the next vertex.
    pub facet_edges: Vec<Vec<usize>>,
}

/// Exact solution of `⟨ν_i, x⟩ = b_i` for three independent normals.
fn solve3(hs: [&HalfSpace; 3]) -> Option<Pt3> {
    let [a, b, c] = hs.map(|h| h.normal);
    let d = det3(a, b, c);
    if d == 0 {
        return None;
    }
    // Cramer: x = (b_a (b×c) + b_b (c×a) + b_c (a×b)) / det
    let cols = [cross3(b, c), cross3(c, a), cross3(a, b)];
    let rhs = hs.map(|h| h.support.clone());
    let dr = Rat::int(d);
    let coord = |k: usize| {
        (0..3).fold(Rat::zero(), |acc, i| acc + rhs[i].mul_int(cols[i][k])) / &dr
    };
    Some([coord(0), coord(1), coord(2)])
}

fn rank_of(vs: &[Vec3i]) -> usize {
    if vs.iter().all(|v| *v == [0, 0, 0]) {
        return 0;
    }
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let c = cross3(vs[i], vs[j]);
            if c != [0, 0, 0] {
                if vs.iter().any(|w| dot3(c, *w) != 0) {
                    return 3;
                }
                return 2;
            }
        }
    }
    1
}

pub fn build_polytope(halfspaces: Vec<HalfSpace>) -> Result<Polytope> {
    let n = halfspaces.len();
    let normals: Vec<Vec3i> = halfspaces.iter().map(|h| h.normal).collect();
    if rank_of(&normals) < 3 {
        return Err(Error::Unbounded);
    }
    // A pointed recession cone {d : ⟨ν_i, d⟩ ≤ 0} is nonzero iff it has an
    // extreme ray, which lies on the intersection of two of its facets.
    for i in 0..n {
        for j in i + 1..n {
            let c = cross3(normals[i], normals[j]);
            if c == [0, 0, 0] {
                continue;
            }
            for d in [c, c.map(|x| -x)] {
                if normals.iter().all(|&v| dot3(v, d) <= 0) {
                    return Err(Error::Unbounded);
                }
            }
        }
    }
    let mut found: BTreeSet<Pt3> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(x) = solve3([&halfspaces[i], &halfspaces[j], &halfspaces[k]]) else {
                    continue;
                };
                if halfspaces.iter().all(|h| !h.slack(&x).is_negative()) {
                    found.insert(x);
                }
            }
        }
    }
    if found.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let pts: Vec<Pt3> = found.into_iter().collect();
    if !affinely_spanning(&pts) {
        return Err(Error::NotFullDimensional);
    }
    let mut verts: Vec<(Vec<usize>, Pt3)> = pts
        .into_iter()
        .map(|x| {
            let tight = (0..n).filter(|&f| halfspaces[f].slack(&x).is_zero()).collect();
            (tight, x)
        })
        .collect();
    verts.sort();
    let vertex_facets: Vec<Vec<usize>> = verts.iter().map(|v| v.0.clone()).collect();
    let vertices: Vec<Pt3> = verts.into_iter().map(|v| v.1).collect();

    let mut on_facet: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, fs) in vertex_facets.iter().enumerate() {
        for &f in fs {
            on_facet[f].push(v);
        }
    }
    // every half-space must support a 2-face; duplicates count as redundant
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for f in 0..n {
        let vs: Vec<Pt3> = on_facet[f].iter().map(|&v| vertices[v].clone()).collect();
        if !spans_plane(&vs) || seen.insert(on_facet[f].clone(), f).is_some() {
            return Err(Error::RedundantHalfspace(f));
        }
    }

    let mut edges = Vec::new();
    let mut by_pair: BTreeSet<[usize; 2]> = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let common: Vec<usize> = on_facet[i]
                .iter()
                .filter(|v| on_facet[j].contains(v))
                .copied()
                .collect();
            if common.len() == 2 && by_pair.insert([common[0], common[1]]) {
                let (direction, _) =
                    rational_direction(&sub3(&vertices[common[1]], &vertices[common[0]]))?;
                edges.push(Edge {
                    facets: [i, j],
                    vertices: [common[0], common[1]],
                    direction,
                });
            }
        }
    }

    let mut facet_vertices = Vec::with_capacity(n);
    let mut facet_edges = Vec::with_capacity(n);
    for f in 0..n {
        let (cyc, es) = facet_cycle(f, &halfspaces[f], &on_facet[f], &edges, &vertices)?;
        facet_vertices.push(cyc);
        facet_edges.push(es);
    }

    Ok(Polytope {
        halfspaces,
        vertices,
        vertex_facets,
        edges,
        facet_vertices,
        facet_edges,
    })
}

fn affinely_spanning(pts: &[Pt3]) -> bool {
    let diffs: Vec<Pt3> = pts[1..].iter().map(|p| sub3(p, &pts[0])).collect();
    for a in 0..diffs.len() {
        for b in a + 1..diffs.len() {
            for c in b + 1..diffs.len() {
                if !det3r(&diffs[a], &diffs[b], &diffs[c]).is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

fn spans_plane(pts: &[Pt3]) -> bool {
    if pts.len() < 3 {
        return false;
    }
    let diffs: Vec<Pt3> = pts[1..].iter().map(|p| sub3(p, &pts[0])).collect();
    for a in 0..diffs.len() {
        for b in a + 1..diffs.len() {
            if cross3r(&diffs[a], &diffs[b]).iter().any(|x| !x.is_zero()) {
                return true;
            }
        }
    }
    false
}

fn cross3r(a: &Pt3, b: &Pt3) -> Pt3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn det3r(a: &Pt3, b: &Pt3, c: &Pt3) -> Rat {
    let x = cross3r(b, c);
    &a[0] * &x[0] + &a[1] * &x[1] + &a[2] * &x[2]
}

/// Orders a facet's vertices into a cycle, counterclockwise from outside,
/// starting at its smallest vertex index.
fn facet_cycle(
    f: usize,
    h: &HalfSpace,
    verts: &[usize],
    edges: &[Edge],
    coords: &[Pt3],
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mine: Vec<usize> = (0..edges.len())
        .filter(|&e| edges[e].facets.contains(&f))
        .collect();
    let start = *verts.iter().min().expect("facet has vertices");
    let mut cyc = vec![start];
    let mut es: Vec<usize> = Vec::new();
    let mut cur = start;
    loop {
        let next = mine.iter().find_map(|&e| {
            let [a, b] = edges[e].vertices;
            let other = if a == cur {
                b
            } else if b == cur {
                a
            } else {
                return None;
            };
            (!es.contains(&e)).then_some((e, other))
        });
        let Some((e, other)) = next else {
            return Err(Error::InvalidInput(format!("facet {f} boundary is not a cycle")));
        };
        es.push(e);
        if other == start {
            break;
        }
        cyc.push(other);
        cur = other;
        if cyc.len() > verts.len() {
            return Err(Error::InvalidInput(format!("facet {f} boundary is not a cycle")));
        }
    }
    if cyc.len() != verts.len() {
        return Err(Error::InvalidInput(format!("facet {f} boundary is not a cycle")));
    }
    // orientation: Σ p_i × p_{i+1} points along the outward normal when ccw
    let k = cyc.len();
    let mut s = [Rat::zero(), Rat::zero(), Rat::zero()];
    for i in 0..k {
        let c = cross3r(&coords[cyc[i]], &coords[cyc[(i + 1) % k]]);
        for t in 0..3 {
            s[t] = &s[t] + &c[t];
        }
    }
    if dot3r(h.normal, &s).is_negative() {
        cyc[1..].reverse();
        es.reverse();
    }
    Ok((cyc, es))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelzantViolation {
    pub vertex: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelzantReport {
    pub violations: Vec<DelzantViolation>,
}

impl DelzantReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::NotDelzant {
                vertex: v.vertex,
                reason: v.reason,
            }),
        }
    }
}

impl Polytope {
    pub fn num_facets(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn normal(&self, f: usize) -> Vec3i {
        self.halfspaces[f].normal
    }

    pub fn edge_between(&self, f: usize, g: usize) -> Option<usize> {
        let key = if f < g { [f, g] } else { [g, f] };
        self.edges.iter().position(|e| e.facets == key)
    }

    /// Edges at vertex `v` with primitive directions pointing away from it.
    pub fn edges_at(&self, v: usize) -> Vec<(usize, Vec3i)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                if e.vertices[0] == v {
                    Some((i, e.direction))
                } else if e.vertices[1] == v {
                    Some((i, e.direction.map(|x| -x)))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.num_facets() as i64
    }

    pub fn check_delzant(&self) -> DelzantReport {
        let mut violations = Vec::new();
        for v in 0..self.vertices.len() {
            let fs = &self.vertex_facets[v];
            let es = self.edges_at(v);
            if fs.len() != 3 || es.len() != 3 {
                violations.push(DelzantViolation {
                    vertex: v,
                    reason: format!("non-simple vertex: {} facets, {} edges", fs.len(), es.len()),
                });
                continue;
            }
            let d = det3(es[0].1, es[1].1, es[2].1);
            if d.abs() != 1 {
                violations.push(DelzantViolation {
                    vertex: v,
                    reason: format!("edge directions have determinant {d}"),
                });
            }
        }
        DelzantReport { violations }
    }

    pub fn edge_lattice_length(&self, e: usize) -> Rat {
        let [a, b] = self.edges[e].vertices;
        rational_direction(&sub3(&self.vertices[b], &self.vertices[a]))
            .expect("edge endpoints are distinct")
            .1
    }

    /// The facet through vertex `v` other than the two containing edge `e`.
    fn third_facet(&self, e: usize, v: usize) -> Result<usize> {
        let ef = self.edges[e].facets;
        let rest: Vec<usize> = self.vertex_facets[v]
            .iter()
            .filter(|f| !ef.contains(f))
            .copied()
            .collect();
        match rest[..] {
            [f] => Ok(f),
            _ => Err(Error::NotDelzant {
                vertex: v,
                reason: "non-simple vertex".into(),
            }),
        }
    }

    /// Degree of the anticanonical class on the torus-invariant curve over `e`.
    pub fn anticanonical_edge_degree(&self, e: usize) -> Result<i64> {
        let [f1, f2] = self.edges[e].facets;
        let (u1, u2) = (self.normal(f1), self.normal(f2));
        let [va, vb] = self.edges[e].vertices;
        let u3 = self.normal(self.third_facet(e, va)?);
        let u4 = self.normal(self.third_facet(e, vb)?);
        for (v, u) in [(va, u3), (vb, u4)] {
            let d = det3(u1, u2, u);
            if d.abs() != 1 {
                return Err(Error::NotDelzant {
                    vertex: v,
                    reason: format!("cone over edge {e} is not smooth (det {d})"),
                });
            }
        }
        let w = [u3[0] + u4[0], u3[1] + u4[1], u3[2] + u4[2]];
        let c = cross3(u1, u2);
        if dot3(c, w) != 0 {
            return Err(Error::NotDelzant {
                vertex: va,
                reason: format!("rays adjacent to edge {e} are not balanced"),
            });
        }
        // w = a u1 + b u2  ⇒  w × u2 = a (u1 × u2),  u1 × w = b (u1 × u2)
        let cc = dot3(c, c);
        let a = dot3(cross3(w, u2), c);
        let b = dot3(cross3(u1, w), c);
        if a % cc != 0 || b % cc != 0 {
            return Err(Error::NotDelzant {
                vertex: va,
                reason: format!("non-integral relation on edge {e}"),
            });
        }
        let degree = 2 - a / cc - b / cc;
        if degree <= 0 {
            return Err(Error::NonPositiveDegree { edge: e, degree });
        }
        Ok(degree)
    }

    pub fn anticanonical_degrees(&self) -> Result<Vec<i64>> {
        (0..self.edges.len())
            .map(|e| self.anticanonical_edge_degree(e))
            .collect()
    }

    pub fn supports(&self) -> Vec<Rat> {
        self.halfspaces.iter().map(|h| h.support.clone()).collect()
    }

    pub fn spec(&self) -> PolytopeSpec {
        PolytopeSpec::from_halfspaces(&self.halfspaces)
    }

    /// Moves every support `b_i` to `b_i + t_i`, keeping the combinatorial type.
    pub fn inflate(&self, t: &[Rat]) -> Result<Polytope> {
        if t.len() != self.num_facets() {
            return Err(Error::InvalidInput(format!(
                "expected {} shifts, got {}",
                self.num_facets(),
                t.len()
            )));
        }
        let hs: Vec<HalfSpace> = self
            .halfspaces
            .iter()
            .zip(t)
            .map(|(h, ti)| HalfSpace {
                normal: h.normal,
                support: &h.support + ti,
            })
            .collect();
        let q = build_polytope(hs).map_err(|e| Error::CombinatoricsChange(e.to_string()))?;
        if q.vertex_facets != self.vertex_facets || q.edges.len() != self.edges.len() {
            return Err(Error::CombinatoricsChange(
                "vertex–facet incidences differ after inflation".into(),
            ));
        }
        Ok(q)
    }

    pub fn default_frame(&self, f: usize) -> Result<FacetFrame> {
        let nu = self.normal(f);
        let m = complete_basis3(&[nu])?;
        // rows of m^{-T}: columns 2,3 of (m^T)^{-1} are dual to nu
        let mt = UniMat3([m.col(0), m.col(1), m.col(2)]);
        let inv = mt.inverse();
        let [u1, mut u2] = hermite_rows([inv.col(1), inv.col(2)]);
        if det3(u1, u2, nu) < 0 {
            u2 = u2.map(|x| -x);
        }
        let origin = self.facet_vertices[f]
            .iter()
            .map(|&v| self.vertices[v].clone())
            .min()
            .expect("facet has vertices");
        FacetFrame::new(self, f, origin, u1, u2)
    }

    /// Vertices of facet `f` in `frame` coordinates, counterclockwise in the
    /// frame, together with their vertex indices.
    pub fn facet_polygon_labeled(
        &self,
        f: usize,
        frame: &FacetFrame,
    ) -> Result<(Vec<usize>, Vec<Pt2>)> {
        if frame.facet != f {
            return Err(Error::InvalidInput(format!(
                "frame is for facet {}, not {f}",
                frame.facet
            )));
        }
        frame.validate(self)?;
        let mut ids = self.facet_vertices[f].clone();
        let mut pts: Vec<Pt2> = ids.iter().map(|&v| frame.coords(&self.vertices[v])).collect();
        if !polygon::is_ccw(&pts) {
            ids[1..].reverse();
            pts[1..].reverse();
        }
        Ok((ids, pts))
    }

    pub fn facet_polygon(&self, f: usize, frame: &FacetFrame) -> Result<Vec<Pt2>> {
        Ok(self.facet_polygon_labeled(f, frame)?.1)
    }
}

/// An affine lattice coordinate system on a facet plane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetFrame {
    pub facet: usize,
    pub origin: Pt3,
    pub basis: [Vec3i; 2],
    /// Inverse of `[u1 u2 w]` for a transverse `w` with `⟨ν, w⟩ = 1`.
    coord_map: UniMat3,
}

impl FacetFrame {
    pub fn new(p: &Polytope, facet: usize, origin: Pt3, u1: Vec3i, u2: Vec3i) -> Result<Self> {
        if facet >= p.num_facets() {
            return Err(Error::InvalidInput(format!("no facet {facet}")));
        }
        let nu = p.normal(facet);
        let c = cross3(u1, u2);
        if c != nu && c != nu.map(|x| -x) {
            return Err(Error::InvalidInput(format!(
                "frame {u1:?}, {u2:?} is not a basis of the tangent lattice of facet {facet}"
            )));
        }
        let m = complete_basis3(&[nu])?;
        let inv = UniMat3([m.col(0), m.col(1), m.col(2)]).inverse();
        let w = inv.col(0);
        let q = UniMat3([
            [u1[0], u2[0], w[0]],
            [u1[1], u2[1], w[1]],
            [u1[2], u2[2], w[2]],
        ]);
        let frame = FacetFrame {
            facet,
            origin,
            basis: [u1, u2],
            coord_map: q.inverse(),
        };
        frame.validate(p)?;
        Ok(frame)
    }

    fn validate(&self, p: &Polytope) -> Result<()> {
        let h = &p.halfspaces[self.facet];
        if !h.slack(&self.origin).is_zero() {
            return Err(Error::InvalidInput(format!(
                "frame origin is not on facet {}",
                self.facet
            )));
        }
        Ok(())
    }

    /// Frame coordinates of a point on the facet plane.
    pub fn coords(&self, x: &Pt3) -> Pt2 {
        let c = self.coord_map.apply_r(&sub3(x, &self.origin));
        [c[0].clone(), c[1].clone()]
    }

    /// The point of the facet plane with the given frame coordinates.
    pub fn embed(&self, y: &Pt2) -> Pt3 {
        let [u1, u2] = self.basis;
        let mut out = self.origin.clone();
        for k in 0..3 {
            out[k] = &out[k] + &(y[0].mul_int(u1[k]) + y[1].mul_int(u2[k]));
        }
        out
    }

    /// Image of a tangent lattice vector in frame coordinates.
    pub fn tangent_coords(&self, d: Vec3i) -> Vec2i {
        let c = self.coord_map.0;
        [dot3(c[0], d), dot3(c[1], d)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSolution {
    /// Change of the support constant of each side, with vertex 0 fixed.
    pub shifts: Vec<Rat>,
    pub polygon: Vec<Pt2>,
}

/// Finds the polygon with the same side directions as `polygon`
/// (counterclockwise) and side `i` of lattice length `lengths[i]`.
pub fn solve_support_constants(polygon: &[Pt2], lengths: &[Rat]) -> Result<SupportSolution> {
    let n = polygon.len();
    if n < 3 || lengths.len() != n {
        return Err(Error::InvalidInput(format!(
            "polygon with {n} vertices needs {n} side lengths, got {}",
            lengths.len()
        )));
    }
    if !polygon::is_ccw(polygon) {
        return Err(Error::InvalidInput("polygon is not counterclockwise".into()));
    }
    let dirs: Vec<Vec2i> = (0..n)
        .map(|i| polygon::side(polygon, i).map(|s| s.0))
        .collect::<Result<_>>()?;
    if let Some(i) = lengths.iter().position(|l| !l.is_positive()) {
        return Err(Error::NonPositiveLength(i));
    }
    let mut rx = Rat::zero();
    let mut ry = Rat::zero();
    for (d, l) in dirs.iter().zip(lengths) {
        rx = rx + l.mul_int(d[0]);
        ry = ry + l.mul_int(d[1]);
    }
    if !rx.is_zero() || !ry.is_zero() {
        return Err(Error::NotClosing(format!("({rx}, {ry})")));
    }
    let mut out = vec![polygon[0].clone()];
    for i in 0..n - 1 {
        let p = &out[i];
        out.push([
            &p[0] + &lengths[i].mul_int(dirs[i][0]),
            &p[1] + &lengths[i].mul_int(dirs[i][1]),
        ]);
    }
    let shifts = (0..n)
        .map(|i| {
            // outward normal of a ccw side with direction (a, b) is (b, −a)
            let nrm = [dirs[i][1], -dirs[i][0]];
            let d = sub2(&out[i], &polygon[i]);
            d[0].mul_int(nrm[0]) + d[1].mul_int(nrm[1])
        })
        .collect();
    Ok(SupportSolution {
        shifts,
        polygon: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lattice::pt2;

    fn hs(rows: &[([i64; 3], i64)]) -> Vec<HalfSpace> {
        rows.iter().map(|&(n, b)| HalfSpace::new(n, b).unwrap()).collect()
    }

    fn cube(a: i64) -> Polytope {
        build_polytope(hs(&[
            ([-1, 0, 0], 0),
            ([1, 0, 0], a),
            ([0, -1, 0], 0),
            ([0, 1, 0], a),
            ([0, 0, -1], 0),
            ([0, 0, 1], a),
        ]))
        .unwrap()
    }

    fn counts(p: &Polytope) -> (usize, usize, usize) {
        (p.num_facets(), p.edges.len(), p.vertices.len())
    }

    #[test]
    fn face_counts() {
        assert_eq!(counts(&catalog::p3()), (4, 6, 4));
        assert_eq!(counts(&cube(5)), (6, 12, 8));
        assert_eq!(counts(&catalog::p2xp1()), (5, 9, 6));
        for p in [catalog::p3(), cube(5), catalog::p2xp1()] {
            assert_eq!(p.euler_characteristic(), 2);
        }
    }

    #[test]
    fn build_errors_are_distinct() {
        let unbounded = hs(&[([-1, 0, 0], 0), ([0, -1, 0], 0), ([0, 0, -1], 0)]);
        assert_eq!(build_polytope(unbounded), Err(Error::Unbounded));
        let empty = hs(&[
            ([-1, 0, 0], -2),
            ([0, -1, 0], 0),
            ([0, 0, -1], 0),
            ([1, 1, 1], 1),
        ]);
        assert_eq!(build_polytope(empty), Err(Error::EmptyPolytope));
        let mut redundant = hs(&[
            ([-1, 0, 0], 0),
            ([0, -1, 0], 0),
            ([0, 0, -1], 0),
            ([1, 1, 1], 4),
        ]);
        redundant.push(HalfSpace::new([1, 0, 0], 10).unwrap());
        assert_eq!(build_polytope(redundant), Err(Error::RedundantHalfspace(4)));
        let flat = hs(&[
            ([-1, 0, 0], 0),
            ([0, -1, 0], 0),
            ([0, 0, -1], 0),
            ([0, 0, 1], 0),
            ([1, 1, 0], 4),
        ]);
        assert_eq!(build_polytope(flat), Err(Error::NotFullDimensional));
    }

    #[test]
    fn delzant_checks() {
        assert!(catalog::p3().check_delzant().is_ok());
        assert!(cube(5).check_delzant().is_ok());
        let mut rows = Vec::new();
        for sx in [-1, 1] {
            for sy in [-1, 1] {
                for sz in [-1, 1] {
                    rows.push(([sx, sy, sz], 1));
                }
            }
        }
        let oct = build_polytope(hs(&rows)).unwrap();
        assert_eq!(counts(&oct), (8, 12, 6));
        let report = oct.check_delzant();
        assert_eq!(report.violations.len(), 6);
        assert!(report.violations[0].reason.contains("non-simple"));
    }

    #[test]
    fn lattice_lengths() {
        let p = catalog::p3();
        let e = p
            .edges
            .iter()
            .position(|e| {
                let vs = e.vertices.map(|v| p.vertices[v].clone());
                vs.contains(&[Rat::zero(), Rat::zero(), Rat::zero()])
                    && vs.contains(&[Rat::int(4), Rat::zero(), Rat::zero()])
            })
            .unwrap();
        assert_eq!(p.edge_lattice_length(e), Rat::int(4));
        let c = cube(5);
        assert!((0..12).all(|e| c.edge_lattice_length(e) == Rat::int(5)));
    }

    #[test]
    fn anticanonical_degrees() {
        let d = catalog::p3().anticanonical_degrees().unwrap();
        assert_eq!(d, vec![4; 6]);
        let d = catalog::p1xp1xp1().anticanonical_degrees().unwrap();
        assert_eq!(d, vec![2; 12]);
        let p = catalog::p2xp1();
        let d = p.anticanonical_degrees().unwrap();
        for (e, deg) in p.edges.iter().zip(&d) {
            let vertical = e.direction[0] == 0 && e.direction[1] == 0;
            assert_eq!(*deg, if vertical { 2 } else { 3 });
        }
        assert_eq!(d.iter().sum::<i64>(), 24);
    }

    #[test]
    fn non_fano_degree_rejected() {
        // Hirzebruch-type prism over F_3 has an edge of degree ≤ 0
        let p = build_polytope(hs(&[
            ([-1, 0, 0], 0),
            ([0, -1, 0], 0),
            ([0, 1, 0], 1),
            ([1, 3, 0], 6),
            ([0, 0, -1], 0),
            ([0, 0, 1], 1),
        ]))
        .unwrap();
        assert!(p.check_delzant().is_ok());
        assert!(matches!(
            p.anticanonical_degrees(),
            Err(Error::NonPositiveDegree { .. })
        ));
    }

    #[test]
    fn inflation() {
        let p = catalog::p3();
        let t: Vec<Rat> = [4, 3, 2, 1].iter().map(|&k| Rat::new(k, 10)).collect();
        let q = p.inflate(&t).unwrap();
        // oracle: the simplex x,y,z ≥ -t_i, x+y+z ≤ 4 + t_3 has edge length
        // 4 + t_0 + t_1 + t_2 + t_3 = 5
        for e in 0..6 {
            assert_eq!(q.edge_lattice_length(e), Rat::int(5));
        }
        assert_eq!(p.inflate(&vec![Rat::zero(); 4]).unwrap(), p);
        let c = cube(5);
        let mut big = vec![Rat::zero(); 6];
        big[1] = Rat::int(-5);
        assert!(matches!(c.inflate(&big), Err(Error::CombinatoricsChange(_))));
    }

    #[test]
    fn facet_polygons() {
        let p = catalog::p3();
        let f = 2; // z = 0
        let frame = FacetFrame::new(
            &p,
            f,
            [Rat::zero(), Rat::zero(), Rat::zero()],
            [1, 0, 0],
            [0, 1, 0],
        )
        .unwrap();
        let poly = p.facet_polygon(f, &frame).unwrap();
        assert_eq!(poly, vec![pt2(0, 0), pt2(4, 0), pt2(0, 4)]);
        let c = cube(5);
        for f in 0..6 {
            let fr = c.default_frame(f).unwrap();
            let poly = c.facet_polygon(f, &fr).unwrap();
            assert_eq!(poly.len(), 4);
            assert_eq!(polygon::area(&poly), Rat::int(25));
        }
        assert!(FacetFrame::new(&p, f, [Rat::zero(), Rat::zero(), Rat::zero()], [1, 0, 0], [1, 1, 0]).is_ok());
        assert!(FacetFrame::new(&p, f, [Rat::zero(), Rat::zero(), Rat::zero()], [1, 0, 0], [0, 2, 0]).is_err());
        assert!(FacetFrame::new(&p, f, [Rat::zero(), Rat::zero(), Rat::one()], [1, 0, 0], [0, 1, 0]).is_err());
    }

    #[test]
    fn default_frames_are_outward_oriented() {
        for p in [catalog::p3(), catalog::p1xp1xp1(), catalog::p2xp1()] {
            for f in 0..p.num_facets() {
                let fr = p.default_frame(f).unwrap();
                assert!(det3(fr.basis[0], fr.basis[1], p.normal(f)) > 0);
                let (ids, _) = p.facet_polygon_labeled(f, &fr).unwrap();
                assert_eq!(ids, p.facet_vertices[f]);
            }
        }
    }

    #[test]
    fn support_solver() {
        let sq = vec![pt2(0, 0), pt2(5, 0), pt2(5, 5), pt2(0, 5)];
        let five = vec![Rat::int(5); 4];
        let s = solve_support_constants(&sq, &five).unwrap();
        assert!(s.shifts.iter().all(Rat::is_zero));
        let r = solve_support_constants(&sq, &[6, 5, 6, 5].map(Rat::int)).unwrap();
        assert_eq!(r.polygon, vec![pt2(0, 0), pt2(6, 0), pt2(6, 5), pt2(0, 5)]);
        assert!(matches!(
            solve_support_constants(&sq, &[6, 5, 5, 5].map(Rat::int)),
            Err(Error::NotClosing(_))
        ));
        assert!(matches!(
            solve_support_constants(&sq, &[0, 5, 0, 5].map(Rat::int)),
            Err(Error::NonPositiveLength(0))
        ));
        // P² fan: shifts agree with the uniform shift (1/3,1/3,1/3) modulo
        // translation, i.e. differ by (⟨n_i, τ⟩)_i for some τ
        let tri = vec![pt2(0, 0), pt2(4, 0), pt2(0, 4)];
        let s = solve_support_constants(&tri, &vec![Rat::int(5); 3]).unwrap();
        let normals = [[0i64, -1], [1, 1], [-1, 0]];
        let tau = [Rat::new(-1, 3), Rat::new(-1, 3)];
        for (h, n) in s.shifts.iter().zip(normals) {
            let t = tau[0].mul_int(n[0]) + tau[1].mul_int(n[1]);
            assert_eq!(h + &t, Rat::new(1, 3));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_box() -> impl Strategy<Value = Polytope> {
            (1i64..6, 1i64..6, 1i64..6, -3i64..3).prop_map(|(a, b, c, s)| {
                build_polytope(hs(&[
                    ([-1, 0, 0], -s),
                    ([1, 0, 0], a + s),
                    ([0, -1, 0], 0),
                    ([0, 1, 0], b),
                    ([1, 1, 1], s + a + b + c),
                    ([0, 0, -1], 0),
                ]))
                .unwrap()
            })
        }

        proptest! {
            #[test]
            fn round_trip(p in small_box()) {
                let q = build_polytope(p.halfspaces.clone()).unwrap();
                prop_assert_eq!(q.vertices, p.vertices);
            }

            #[test]
            fn inflation_is_monotone(ts in prop::collection::vec(0i64..5, 4)) {
                let p = catalog::p3();
                let t: Vec<Rat> = ts.iter().map(|&k| Rat::new(k, 7)).collect();
                let q = p.inflate(&t).unwrap();
                for x in &p.vertices {
                    prop_assert!(q.halfspaces.iter().all(|h| !h.slack(x).is_negative()));
                }
            }

            #[test]
            fn frame_equivariance(a in -3i64..4, b in -3i64..4) {
                // change the basis of facet z=0 of P3 by U = [[1,a],[0,1]]·[[1,0],[b,1]]
                let p = catalog::p3();
                let o = [Rat::zero(), Rat::zero(), Rat::zero()];
                let f0 = FacetFrame::new(&p, 2, o.clone(), [1, 0, 0], [0, 1, 0]).unwrap();
                let u = crate::lattice::UniMat2::new([[1 + a * b, a], [b, 1]]).unwrap();
                let ui = u.inverse();
                // new basis vectors are old ones times U^{-1}
                let c0 = ui.col(0);
                let c1 = ui.col(1);
                let f1 = FacetFrame::new(&p, 2, o, [c0[0], c0[1], 0], [c1[0], c1[1], 0]).unwrap();
                let mut a0: Vec<Pt2> = p.facet_polygon(2, &f0).unwrap().iter().map(|x| u.apply_r(x)).collect();
                let mut a1 = p.facet_polygon(2, &f1).unwrap();
                a0.sort();
                a1.sort();
                prop_assert_eq!(a0, a1);
            }

            #[test]
            fn support_solver_reproduces_lengths(a in 1i64..9, b in 1i64..9, c in 1i64..9) {
                // hexagon with sides along ±e1, ±e2, ±(1,-1)
                let hex = vec![pt2(0, 0), pt2(2, 0), pt2(3, 1), pt2(3, 3), pt2(1, 3), pt2(0, 2)];
                // closing: lengths (a, b, c, a', b', c') with opposite sums balanced
                let l: Vec<Rat> = [a, b, c, a + b - c, c, b]
                    .iter().map(|&x| Rat::int(x)).collect();
                prop_assume!(a + b - c > 0);
                let hex_dirs: Vec<Vec2i> = (0..6).map(|i| polygon::side(&hex, i).unwrap().0).collect();
                let s = solve_support_constants(&hex, &l).unwrap();
                for i in 0..6 {
                    let (d, len) = polygon::side(&s.polygon, i).unwrap();
                    prop_assert_eq!(d, hex_dirs[i]);
                    prop_assert_eq!(&len, &l[i]);
                }
            }
        }
    }
}
