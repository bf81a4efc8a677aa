//! The greedy resolution of the double points of `∂P`, the resulting nodal
//! sphere `A_t`, the hybrid spheres in between, the Gross–Siebert sphere of
//! the inflated polytope, and the certificate that the last two agree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::atlas::{default_frames, polytope_boundary, EdgeNode, Face2, NodalIASSphere};
use crate::error::{Error, Result};
use crate::lattice::{classify_shear, signed_shear, Rat, ShearClass};
use crate::surgery::{nodal_blowup, FaceDiagram, MarkedPoint};
use crate::toric::{solve_support_constants, Polytope};

/// Facet ordering plus one time per facet (`t[i]` belongs to facet `i`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TVector {
    pub ordering: Vec<usize>,
    pub t: Vec<Rat>,
}

impl TVector {
    pub fn new(ordering: Vec<usize>, t: Vec<Rat>) -> Self {
        TVector { ordering, t }
    }

    /// Times `m, m-1, …, 1` scaled by `scale`, assigned along the ordering.
    pub fn linear(ordering: Vec<usize>, scale: &Rat) -> Self {
        let m = ordering.len();
        let mut t = vec![Rat::zero(); m];
        for (pos, &f) in ordering.iter().enumerate() {
            if f < m {
                t[f] = scale.mul_int((m - pos) as i64);
            }
        }
        TVector { ordering, t }
    }

    /// Position of facet `f` in the ordering.
    pub fn rank(&self, f: usize) -> Option<usize> {
        self.ordering.iter().position(|&g| g == f)
    }

    /// Times after the first `k` steps: `t` on processed facets, zero elsewhere.
    pub fn truncated(&self, k: usize) -> Vec<Rat> {
        let mut tau = vec![Rat::zero(); self.t.len()];
        for &f in self.ordering.iter().take(k) {
            tau[f] = self.t[f].clone();
        }
        tau
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledEdge {
    pub edge: usize,
    pub owner: usize,
    pub other: usize,
    /// Number of double points on the edge.
    pub count: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedySchedule {
    pub ordering: Vec<usize>,
    /// Indexed by edge.
    pub edges: Vec<ScheduledEdge>,
}

impl GreedySchedule {
    pub fn total(&self) -> i64 {
        self.edges.iter().map(|e| e.count).sum()
    }

    pub fn owned_by(&self, f: usize) -> impl Iterator<Item = &ScheduledEdge> {
        self.edges.iter().filter(move |e| e.owner == f)
    }
}

fn check_permutation(ordering: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    for &f in ordering {
        if f >= m || std::mem::replace(&mut seen[f], true) {
            return Err(Error::TimeVector(format!(
                "ordering {ordering:?} is not a permutation of the {m} facets"
            )));
        }
    }
    if ordering.len() != m {
        return Err(Error::TimeVector(format!(
            "ordering {ordering:?} is not a permutation of the {m} facets"
        )));
    }
    Ok(())
}

/// Every edge is owned by the facet that comes first in `ordering`.
pub fn greedy_schedule(p: &Polytope, ordering: &[usize]) -> Result<GreedySchedule> {
    check_permutation(ordering, p.num_facets())?;
    let degrees = p.anticanonical_degrees()?;
    let rank = |f: usize| ordering.iter().position(|&g| g == f).expect("permutation");
    let edges = p
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let [a, b] = edge.facets;
            let (owner, other) = if rank(a) < rank(b) { (a, b) } else { (b, a) };
            ScheduledEdge {
                edge: e,
                owner,
                other,
                count: degrees[e],
            }
        })
        .collect();
    Ok(GreedySchedule {
        ordering: ordering.to_vec(),
        edges,
    })
}

/// Size `t_owner − t_other` of the triangles removed for `edge`.
pub fn exceptional_area(schedule: &GreedySchedule, tv: &TVector, edge: usize) -> Result<Rat> {
    let s = schedule
        .edges
        .get(edge)
        .ok_or_else(|| Error::InvalidInput(format!("edge {edge} is not scheduled")))?;
    let (a, b) = (tv.t.get(s.owner), tv.t.get(s.other));
    match (a, b) {
        (Some(a), Some(b)) => Ok(a - b),
        _ => Err(Error::TimeVector(format!("no time for the facets of edge {edge}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TViolation {
    Shape { reason: String },
    NonPositive { facet: usize, t: Rat },
    NotDecreasing { position: usize, before: Rat, after: Rat },
    Packing { facet: usize, edge: Option<usize>, reason: String },
    Combinatorics { reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TReport {
    pub violations: Vec<TViolation>,
}

impl TReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::TimeVector(
                serde_json::to_string(v).unwrap_or_else(|_| format!("{v:?}")),
            )),
        }
    }
}

/// Monotonicity, positivity and room for every scheduled triangle.
pub fn validate_t(p: &Polytope, tv: &TVector) -> TReport {
    let mut violations = Vec::new();
    let m = p.num_facets();
    if let Err(e) = check_permutation(&tv.ordering, m) {
        violations.push(TViolation::Shape { reason: e.to_string() });
    }
    if tv.t.len() != m {
        violations.push(TViolation::Shape {
            reason: format!("{} times for {m} facets", tv.t.len()),
        });
    }
    if !violations.is_empty() {
        return TReport { violations };
    }
    for (f, t) in tv.t.iter().enumerate() {
        if !t.is_positive() {
            violations.push(TViolation::NonPositive { facet: f, t: t.clone() });
        }
    }
    for (pos, w) in tv.ordering.windows(2).enumerate() {
        if tv.t[w[0]] <= tv.t[w[1]] {
            violations.push(TViolation::NotDecreasing {
                position: pos + 1,
                before: tv.t[w[0]].clone(),
                after: tv.t[w[1]].clone(),
            });
        }
    }
    if !violations.is_empty() {
        return TReport { violations };
    }
    let schedule = match greedy_schedule(p, &tv.ordering) {
        Ok(s) => s,
        Err(e) => {
            violations.push(TViolation::Combinatorics { reason: e.to_string() });
            return TReport { violations };
        }
    };
    if let Err(e) = p.inflate(&tv.t) {
        violations.push(TViolation::Combinatorics { reason: e.to_string() });
    }
    // every intermediate stage blows up triangles of size t_owner − τ_other
    for k in 1..=m {
        let tau = tv.truncated(k);
        for f in 0..m {
            if let Err(v) = face_packing(p, &schedule, &tau, f) {
                if !violations.contains(&v) {
                    violations.push(v);
                }
            }
        }
    }
    TReport { violations }
}

fn face_packing(p: &Polytope, schedule: &GreedySchedule, tau: &[Rat], f: usize) -> std::result::Result<(), TViolation> {
    let plan = face_plan(p, schedule, tau, f).map_err(|e| TViolation::Packing {
        facet: f,
        edge: None,
        reason: e.to_string(),
    })?;
    for side in &plan.sides {
        if let Some(s) = &side.size {
            let need = s.mul_int(side.count);
            if need >= side.length {
                return Err(TViolation::Packing {
                    facet: f,
                    edge: Some(side.edge),
                    reason: format!(
                        "{} triangles of size {s} need {need} on a side of length {}",
                        side.count, side.length
                    ),
                });
            }
        }
    }
    build_face(p, schedule, tau, f).map(|_| ()).map_err(|e| TViolation::Packing {
        facet: f,
        edge: None,
        reason: e.to_string(),
    })
}

struct SidePlan {
    edge: usize,
    length: Rat,
    count: i64,
    /// Triangle size when this face resolves the edge.
    size: Option<Rat>,
    /// The edge keeps its double points as marked points in this face.
    marked: bool,
}

struct FacePlan {
    face: Face2,
    sides: Vec<SidePlan>,
}

/// Facet `f` of `P` with every support raised by `tau[f]`, in the default
/// frame of `P`, with the blow-ups and marks it is responsible for.
fn face_plan(p: &Polytope, schedule: &GreedySchedule, tau: &[Rat], f: usize) -> Result<FacePlan> {
    let frame = p.default_frame(f)?;
    let (ids, pts) = p.facet_polygon_labeled(f, &frame)?;
    let edges = p.facet_edges[f].clone();
    let lengths: Vec<Rat> = edges
        .iter()
        .map(|&e| &p.edge_lattice_length(e) + &tau[f].mul_int(schedule.edges[e].count))
        .collect();
    let solved = solve_support_constants(&pts, &lengths)?;
    let mut sides = Vec::new();
    for (&e, length) in edges.iter().zip(lengths) {
        let sch = &schedule.edges[e];
        let (mut size, mut marked) = (None, false);
        if sch.owner == f {
            let s = &tau[f] - &tau[sch.other];
            if s.is_negative() {
                return Err(Error::TimeVector(format!(
                    "edge {e}: owner {f} has a smaller time than facet {}",
                    sch.other
                )));
            }
            if s.is_zero() {
                marked = true;
            } else {
                size = Some(s);
            }
        }
        sides.push(SidePlan {
            edge: e,
            length,
            count: sch.count,
            size,
            marked,
        });
    }
    Ok(FacePlan {
        face: Face2 {
            polygon: solved.polygon,
            sides: edges,
            corners: ids,
            nodes: Vec::new(),
        },
        sides,
    })
}

fn build_face(p: &Polytope, schedule: &GreedySchedule, tau: &[Rat], f: usize) -> Result<FaceDiagram> {
    let plan = face_plan(p, schedule, tau, f)?;
    let mut marks = Vec::new();
    for (i, side) in plan.sides.iter().enumerate() {
        if side.marked {
            let step = &side.length / &Rat::int(side.count + 1);
            for q in 1..=side.count {
                marks.push(MarkedPoint {
                    side: i,
                    param: step.mul_int(q),
                    multiplicity: 1,
                });
            }
        }
    }
    let mut d = FaceDiagram::with_marks(plan.face, &marks)?;
    for (i, side) in plan.sides.iter().enumerate() {
        let Some(s) = &side.size else { continue };
        let room = &side.length - &s.mul_int(side.count);
        if !room.is_positive() {
            return Err(Error::Surgery(format!(
                "edge {}: {} triangles of size {s} do not fit in length {}",
                side.edge, side.count, side.length
            )));
        }
        let gap = &room / &Rat::int(side.count + 1);
        for q in 0..side.count {
            let c = &gap.mul_int(q + 1) + &s.mul_int(q);
            d = nodal_blowup(&d, i, &c, s)
                .map_err(|e| Error::Surgery(format!("edge {}: {e}", side.edge)))?;
        }
    }
    Ok(d)
}

/// Face diagram of facet `f` for the time vector `tv` (all facets processed).
pub fn build_face_diagram(p: &Polytope, schedule: &GreedySchedule, tv: &TVector, f: usize) -> Result<FaceDiagram> {
    if f >= p.num_facets() {
        return Err(Error::InvalidInput(format!("no facet {f}")));
    }
    validate_t(p, tv).into_result()?;
    build_face(p, schedule, &tv.t, f)
}

/// Glues face diagrams along the edges of `P`. Each edge is oriented from
/// the endpoint that comes first in `vertex_order` (default: by index).
pub fn glue_sphere(diagrams: &[FaceDiagram], p: &Polytope, vertex_order: Option<&[usize]>) -> Result<NodalIASSphere> {
    if diagrams.len() != p.num_facets() {
        return Err(Error::InvalidInput(format!(
            "{} face diagrams for {} facets",
            diagrams.len(),
            p.num_facets()
        )));
    }
    let nv = p.vertices.len();
    let pos: Vec<usize> = match vertex_order {
        None => (0..nv).collect(),
        Some(order) => {
            let mut pos = vec![usize::MAX; nv];
            for (i, &v) in order.iter().enumerate() {
                if v >= nv || pos[v] != usize::MAX {
                    return Err(Error::InvalidInput(format!("{order:?} is not an order on the vertices")));
                }
                pos[v] = i;
            }
            if order.len() != nv {
                return Err(Error::InvalidInput(format!("{order:?} is not an order on the vertices")));
            }
            pos
        }
    };
    let mut edge_nodes = BTreeMap::new();
    for d in diagrams {
        for m in &d.marked {
            let e = d.face.sides[m.side];
            edge_nodes
                .entry(e)
                .or_insert(EdgeNode {
                    multiplicity: 0,
                    marked: true,
                })
                .multiplicity += m.multiplicity;
        }
    }
    let faces = diagrams.iter().map(|d| d.face.clone()).collect();
    let mut s = NodalIASSphere::from_faces(faces, &edge_nodes)?;
    if s.faces.len() != p.num_facets() || s.edges.len() != p.edges.len() || s.vertices.len() != nv {
        return Err(Error::Gluing("glued complex differs from the boundary of P".into()));
    }
    for rec in &mut s.edges {
        let [a, b] = rec.vertices;
        if pos[a] > pos[b] {
            rec.vertices = [b, a];
            rec.faces = [rec.faces[1], rec.faces[0]];
        }
    }
    Ok(s)
}

/// Shear class of the mismatch between the hugging loop of each edge and the
/// nodes recorded on it. Empty for a consistent sphere.
pub fn edge_defects(s: &NodalIASSphere) -> Result<Vec<(usize, ShearClass)>> {
    let mut out = Vec::new();
    for e in 0..s.edges.len() {
        let l = s.edge_loop(e)?;
        let x = s.expected_edge_loop(e)?;
        if l != x {
            out.push((e, classify_shear(&x.inverse().compose(&l).linear)));
        }
    }
    Ok(out)
}

/// Checks that the piecewise structure extends across the 1-skeleton: every
/// vertex has a canonical chart and every edge's endpoint unfoldings differ
/// exactly by the nodes it encloses.
pub fn extend_and_check(s: NodalIASSphere) -> Result<NodalIASSphere> {
    for v in 0..s.vertices.len() {
        s.canonical_vertex_chart(v)?;
    }
    for e in 0..s.edges.len() {
        let l = s.edge_loop(e)?;
        let x = s.expected_edge_loop(e)?;
        if l != x {
            let d = x.inverse().compose(&l);
            return Err(Error::CocycleDefect {
                edge: e,
                defect: format!("{} + {:?} ({:?})", d.linear, d.translation, classify_shear(&d.linear)),
            });
        }
    }
    let report = s.validate_atlas();
    if let Some(issue) = report.issues.first() {
        return Err(Error::Gluing(issue.clone()));
    }
    let td = s.total_defect();
    if !td.ok {
        return Err(Error::Gluing(format!(
            "total multiplicity {} on a sphere of Euler characteristic {}",
            td.total_multiplicity,
            s.euler_characteristic()
        )));
    }
    Ok(s)
}

/// `Δ^(k)`: the first `k` facets of the ordering resolved, the rest flat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridComplex {
    pub k: usize,
    pub sphere: NodalIASSphere,
    pub diagrams: Vec<FaceDiagram>,
    /// Indexed by facet.
    pub resolved: Vec<bool>,
}

pub fn build_hybrid(p: &Polytope, schedule: &GreedySchedule, tv: &TVector, k: usize) -> Result<HybridComplex> {
    let m = p.num_facets();
    if k > m {
        return Err(Error::InvalidInput(format!("step {k} beyond {m} facets")));
    }
    if schedule.ordering != tv.ordering {
        return Err(Error::InvalidInput("schedule and time vector use different orderings".into()));
    }
    validate_t(p, tv).into_result()?;
    build_hybrid_unchecked(p, schedule, &tv.truncated(k), k)
}

/// `build_hybrid` for already validated times `tau` (zero on unprocessed facets).
pub(crate) fn build_hybrid_unchecked(p: &Polytope, schedule: &GreedySchedule, tau: &[Rat], k: usize) -> Result<HybridComplex> {
    let m = p.num_facets();
    let diagrams = (0..m)
        .map(|f| build_face(p, schedule, tau, f))
        .collect::<Result<Vec<_>>>()?;
    let sphere = extend_and_check(glue_sphere(&diagrams, p, None)?)?;
    let mut resolved = vec![false; m];
    for &f in schedule.ordering.iter().take(k) {
        resolved[f] = true;
    }
    Ok(HybridComplex {
        k,
        sphere,
        diagrams,
        resolved,
    })
}

/// `A_t` together with the data it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtBuild {
    pub schedule: GreedySchedule,
    pub diagrams: Vec<FaceDiagram>,
    pub sphere: NodalIASSphere,
}

pub fn build_a_t(p: &Polytope, tv: &TVector) -> Result<AtBuild> {
    let schedule = greedy_schedule(p, &tv.ordering)?;
    let h = build_hybrid(p, &schedule, tv, p.num_facets())?;
    Ok(AtBuild {
        schedule,
        diagrams: h.diagrams,
        sphere: h.sphere,
    })
}

/// Gross–Siebert sphere of a Delzant polytope: flat facets in their default
/// frames and one node per edge, whose multiplicity is read off the
/// hugging loop of the edge.
pub fn build_gs(q: &Polytope) -> Result<NodalIASSphere> {
    q.check_delzant().into_result()?;
    let mut s = polytope_boundary(q, &default_frames(q)?)?;
    for e in 0..s.edges.len() {
        let l = s.edge_loop(e)?;
        let d = s.edge_direction(e)?;
        let k = match signed_shear(&l.linear) {
            Some((k, axis)) if axis == d || axis == [-d[0], -d[1]] => k,
            _ => {
                return Err(Error::NotGsAdmissible(format!(
                    "edge {e}: defect {} is not a shear along the edge",
                    l.linear
                )))
            }
        };
        if k <= 0 {
            return Err(Error::NotGsAdmissible(format!("edge {e}: shear of degree {k}")));
        }
        s.edges[e].node = Some(EdgeNode {
            multiplicity: k,
            marked: false,
        });
    }
    extend_and_check(s)
}

/// Isomorphism between two gluings of the same faces that differ only in
/// edge orientation: on a flipped edge the point at distance `s` from one
/// end corresponds to the point at distance `Λ − s` from the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeFlipIsomorphism {
    pub flipped: Vec<usize>,
    pub lengths: Vec<Rat>,
}

impl EdgeFlipIsomorphism {
    /// Parameter in the second gluing of the point at `s` on edge `e` of the first.
    pub fn map_param(&self, e: usize, s: &Rat) -> Rat {
        if self.flipped.contains(&e) {
            &self.lengths[e] - s
        } else {
            s.clone()
        }
    }
}

/// Finds and checks the edge-flip isomorphism from `a` to `b`.
pub fn edge_flip_isomorphism(a: &NodalIASSphere, b: &NodalIASSphere) -> Result<EdgeFlipIsomorphism> {
    if a.faces != b.faces || a.edges.len() != b.edges.len() || a.vertices != b.vertices {
        return Err(Error::Gluing("the two spheres have different cells".into()));
    }
    let mut flipped = Vec::new();
    let mut lengths = Vec::new();
    for (e, (ra, rb)) in a.edges.iter().zip(&b.edges).enumerate() {
        if ra.length != rb.length || ra.node != rb.node {
            return Err(Error::Gluing(format!("edge {e} differs beyond orientation")));
        }
        lengths.push(ra.length.clone());
        if ra.vertices == rb.vertices && ra.faces == rb.faces {
            continue;
        }
        if ra.vertices != [rb.vertices[1], rb.vertices[0]] || ra.faces != [rb.faces[1], rb.faces[0]] {
            return Err(Error::Gluing(format!("edge {e} is glued differently")));
        }
        flipped.push(e);
    }
    let iso = EdgeFlipIsomorphism { flipped, lengths };
    for &e in &iso.flipped {
        let [f0, f1] = a.edges[e].faces;
        let [v0, v1] = a.edges[e].vertices;
        let to_a = a.edge_transport(e, f0, v0)?.compose(&a.edge_unfolding(e, v1, f0, f1)?);
        let len = &iso.lengths[e];
        for s in [Rat::zero(), len / &Rat::int(3), len.clone()] {
            let pa = a.edge_point(e, &s)?;
            let pb = to_a.apply(&b.edge_point(e, &iso.map_param(e, &s))?);
            if pa != pb {
                return Err(Error::Gluing(format!("edge {e}: point {s} is not matched by the flip")));
            }
        }
        let (la, lb) = (a.edge_loop(e)?, b.edge_loop(e)?);
        let degree = |c: ShearClass| match c {
            ShearClass::Identity => Some(0),
            ShearClass::Shear { k, .. } => Some(k),
            ShearClass::Other => None,
        };
        if degree(classify_shear(&la.linear)) != degree(classify_shear(&lb.linear)) {
            return Err(Error::Gluing(format!("edge {e}: hugging loops are not conjugate")));
        }
    }
    Ok(iso)
}
