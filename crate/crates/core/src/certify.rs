//! Step-by-step isomorphism between the Gross–Siebert sphere of the inflated
//! polytope and the resolved sphere `A_t`.
//!
//! At step `k` the sphere `Δ^(k)` (first `k` facets resolved) is compared
//! with the Gross–Siebert sphere of `Q^(k)`, the polytope with supports
//! `b_i + τ_i`. Near a vertex both spheres have a canonical chart, and the
//! two charts differ by the projection of the vertex displacement `Q − P`;
//! this fixes one affine map per face.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::atlas::NodalIASSphere;
use crate::error::{Error, Result};
use crate::lattice::{
    det2, dot3r, lattice_direction, sub2, AffineMap2, Pt2, Rat, UniMat2, UniMat3, Vec2i,
};
use crate::pipeline::{build_gs, build_hybrid_unchecked, GreedySchedule, TVector};
use crate::polygon;
use crate::surgery::{merge_nodes, move_branch_cut, nodal_slide, FaceDiagram, MarkedPoint, SurgeryOp};
use crate::toric::{Polytope, PolytopeSpec};

/// Node-free faces developed into the chart of `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevelopedRegion {
    pub base: usize,
    pub charts: BTreeMap<usize, AffineMap2>,
}

/// Nodes of `face` on `edge` merged and slid onto the image of the
/// Gross–Siebert node of the edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAlignment {
    pub edge: usize,
    pub face: usize,
    pub sources: Vec<Pt2>,
    pub target: Pt2,
    pub multiplicity: i64,
    pub ops: Vec<SurgeryOp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateStep {
    pub k: usize,
    pub facet: usize,
    /// `b_k + t_k`.
    pub level: Rat,
    /// Per face: Gross–Siebert chart of `Q^(k)` to the chart of `Δ^(k)`.
    pub maps: Vec<AffineMap2>,
    /// Image of the facet of `Q^(k)` in the chart of the resolved face.
    pub polygon: Vec<Pt2>,
    pub developed: DevelopedRegion,
    pub alignments: Vec<NodeAlignment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceCertificate {
    pub polytope: PolytopeSpec,
    pub ordering: Vec<usize>,
    pub t: Vec<Rat>,
    /// The map at step 0; the identity on every face.
    pub initial: Vec<AffineMap2>,
    pub steps: Vec<CertificateStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateVerdict {
    pub pass: bool,
    pub step: Option<usize>,
    pub reason: String,
}

fn fail(step: usize, reason: impl Into<String>) -> Error {
    Error::Certification {
        step,
        reason: reason.into(),
    }
}

fn corner(s: &NodalIASSphere, f: usize, v: usize) -> Result<Pt2> {
    Ok(s.faces[f].vertex(s.corner_of(f, v)?).clone())
}

fn chart_at(s: &NodalIASSphere, v: usize, f: usize) -> Result<AffineMap2> {
    s.canonical_vertex_chart(v)?
        .into_iter()
        .find(|(g, _)| *g == f)
        .map(|x| x.1)
        .ok_or_else(|| Error::InvalidInput(format!("face {f} does not contain vertex {v}")))
}

/// Displacement of vertex `v` from `P` to `Q`, projected to the canonical
/// chart of `delta` at `v`.
fn vertex_shift(delta: &NodalIASSphere, p: &Polytope, q: &Polytope, v: usize) -> Result<Pt2> {
    let images = delta.vertex_edge_images(v)?;
    let dirs = p.edges_at(v);
    if dirs.len() != 3 {
        return Err(Error::NotDelzant {
            vertex: v,
            reason: "non-simple vertex".into(),
        });
    }
    let m = UniMat3([
        [dirs[0].1[0], dirs[1].1[0], dirs[2].1[0]],
        [dirs[0].1[1], dirs[1].1[1], dirs[2].1[1]],
        [dirs[0].1[2], dirs[1].1[2], dirs[2].1[2]],
    ]);
    if m.det().abs() != 1 {
        return Err(Error::NotDelzant {
            vertex: v,
            reason: "edge directions are not a lattice basis".into(),
        });
    }
    let w = crate::lattice::sub3(&q.vertices[v], &p.vertices[v]);
    let alpha = m.inverse().apply_r(&w);
    let mut out = [Rat::zero(), Rat::zero()];
    for ((e, _), a) in dirs.iter().zip(alpha.iter()) {
        let img = images
            .get(e)
            .ok_or_else(|| Error::InvalidInput(format!("edge {e} missing at vertex {v}")))?;
        out = [&out[0] + &a.mul_int(img[0]), &out[1] + &a.mul_int(img[1])];
    }
    Ok(out)
}

/// The per-face maps, one candidate per vertex, required to agree.
fn face_maps(step: usize, delta: &NodalIASSphere, gs: &NodalIASSphere, p: &Polytope, q: &Polytope) -> Result<Vec<AffineMap2>> {
    let mut maps: Vec<Option<AffineMap2>> = vec![None; delta.faces.len()];
    for v in 0..delta.vertices.len() {
        if delta.vertex_edge_images(v)? != gs.vertex_edge_images(v)? {
            return Err(fail(step, format!("vertex {v}: canonical charts label the edges differently")));
        }
        let sigma = vertex_shift(delta, p, q, v)?;
        let shift = AffineMap2::new(UniMat2::IDENTITY, sigma);
        for &f in &delta.vertices[v].faces {
            let g = chart_at(delta, v, f)?
                .inverse()
                .compose(&shift)
                .compose(&chart_at(gs, v, f)?);
            match &maps[f] {
                None => maps[f] = Some(g),
                Some(old) if *old == g => {}
                Some(old) => {
                    return Err(fail(
                        step,
                        format!(
                            "face {f}: vertex {v} gives {} + {:?}, other vertices {} + {:?}",
                            g.linear, g.translation, old.linear, old.translation
                        ),
                    ))
                }
            }
        }
    }
    maps.into_iter()
        .enumerate()
        .map(|(f, m)| {
            let m = m.ok_or_else(|| fail(step, format!("face {f} has no vertices")))?;
            if m.linear.det() != 1 {
                return Err(fail(step, format!("face {f}: map reverses orientation")));
            }
            Ok(m)
        })
        .collect()
}

/// A singular point of the resolved side: a node, or a marked point.
struct Singular {
    face: usize,
    position: Pt2,
    eigen: Vec2i,
    multiplicity: i64,
}

fn singular_points(delta: &NodalIASSphere, marks: &[(usize, MarkedPoint)], e: usize) -> Result<Vec<Singular>> {
    let mut out = Vec::new();
    for f in delta.edges[e].faces {
        let face = &delta.faces[f];
        let i = delta.side_of(f, e)?;
        for n in face.nodes.iter().filter(|n| n.side == i) {
            out.push(Singular {
                face: f,
                position: n.position.clone(),
                eigen: n.eigen,
                multiplicity: n.multiplicity,
            });
        }
        for (g, m) in marks {
            if *g == f && m.side == i {
                out.push(Singular {
                    face: f,
                    position: face.point_on_side(i, &m.param)?,
                    eigen: face.side_direction(i)?.0,
                    multiplicity: m.multiplicity,
                });
            }
        }
    }
    Ok(out)
}

/// Endpoints of edge `e` of the Gross–Siebert sphere in face `f`, mapped
/// by `g`, from `vertices[0]` to `vertices[1]`.
fn edge_image(gs: &NodalIASSphere, g: &AffineMap2, f: usize, e: usize) -> Result<(Pt2, Pt2)> {
    let [a, b] = gs.edges[e].vertices;
    Ok((g.apply(&corner(gs, f, a)?), g.apply(&corner(gs, f, b)?)))
}

fn on_line(a: &Pt2, b: &Pt2, x: &Pt2) -> bool {
    crate::lattice::det2r(&sub2(b, a), &sub2(x, a)).is_zero()
}

fn midpoint(a: &Pt2, b: &Pt2) -> Pt2 {
    let half = Rat::new(1, 2);
    [&(&a[0] + &b[0]) * &half, &(&a[1] + &b[1]) * &half]
}

struct StepInput<'a> {
    k: usize,
    p: &'a Polytope,
    q: &'a Polytope,
    delta: &'a NodalIASSphere,
    marks: &'a [(usize, MarkedPoint)],
    gs: &'a NodalIASSphere,
}

/// Checks shared by every step: node alignment on every edge, monodromy
/// conjugation, edge lengths and total area.
fn check_cells(inp: &StepInput, maps: &[AffineMap2]) -> Result<()> {
    let StepInput { k, delta, gs, marks, .. } = *inp;
    if delta.edges.len() != gs.edges.len() || delta.faces.len() != gs.faces.len() {
        return Err(fail(k, "cell structures differ"));
    }
    for e in 0..gs.edges.len() {
        let k_e = gs.edges[e]
            .node
            .as_ref()
            .map(|n| n.multiplicity)
            .ok_or_else(|| fail(k, format!("edge {e} of the Gross–Siebert sphere has no node")))?;
        let q_len = &gs.edges[e].length;
        for f in gs.edges[e].faces {
            let (a, b) = edge_image(gs, &maps[f], f, e)?;
            let (_, len) = lattice_direction(&sub2(&b, &a))?;
            if &len != q_len {
                return Err(fail(k, format!("edge {e}: image in face {f} has length {len}, expected {q_len}")));
            }
        }
        let pts = singular_points(delta, marks, e)?;
        let Some(first) = pts.first() else {
            return Err(fail(k, format!("edge {e}: no nodes to match a node of multiplicity {k_e}")));
        };
        let o = first.face;
        if pts.iter().any(|s| s.face != o) {
            return Err(fail(k, format!("edge {e}: nodes in both adjacent faces")));
        }
        let (a, b) = edge_image(gs, &maps[o], o, e)?;
        let (dir, _) = lattice_direction(&sub2(&b, &a))?;
        let mut total = 0;
        for s in &pts {
            if !on_line(&a, &b, &s.position) {
                return Err(fail(
                    k,
                    format!("edge {e}: node at {:?} of face {o} is off the invariant line", s.position),
                ));
            }
            if det2(s.eigen, dir) != 0 {
                return Err(fail(k, format!("edge {e}: node eigenline is not parallel to the segment")));
            }
            total += s.multiplicity;
        }
        if total != k_e {
            return Err(fail(k, format!("edge {e}: multiplicity {total} against {k_e}")));
        }
        let [va, vb] = gs.edges[e].vertices;
        let (gd, _) = lattice_direction(&sub2(&corner(gs, o, vb)?, &corner(gs, o, va)?))?;
        let lin = maps[o].linear;
        let conj = lin.mul(&UniMat2::node_shear(gd, k_e)).mul(&lin.inverse());
        let mut prod = UniMat2::IDENTITY;
        for s in &pts {
            prod = prod.mul(&UniMat2::node_shear(s.eigen, s.multiplicity));
        }
        if conj != prod {
            return Err(fail(k, format!("edge {e}: monodromy {conj} is carried to {prod}")));
        }
    }
    let mut a_gs = Rat::zero();
    for f in &gs.faces {
        a_gs = a_gs + polygon::area(&f.polygon);
    }
    let mut a_delta = Rat::zero();
    for f in &delta.faces {
        a_delta = a_delta + f.affine_area()?;
    }
    if a_gs != a_delta {
        return Err(fail(k, format!("total area {a_delta} against {a_gs}")));
    }
    Ok(())
}

/// Merges the nodes of `facet` on each owned edge and slides the result onto
/// the image of the Gross–Siebert node.
fn align_nodes(inp: &StepInput, facet: usize, maps: &[AffineMap2]) -> Result<Vec<NodeAlignment>> {
    let StepInput { k, delta, gs, .. } = *inp;
    let mut d = FaceDiagram::new(delta.faces[facet].clone())?;
    let mut out = Vec::new();
    for (i, &e) in delta.faces[facet].sides.iter().enumerate() {
        let on_side = d.face.nodes_on_side(i)?;
        if on_side.is_empty() {
            continue;
        }
        let before = d.log.ops.len();
        let sources = on_side.iter().map(|&n| d.face.nodes[n].position.clone()).collect();
        let (a, b) = edge_image(gs, &maps[facet], facet, e)?;
        let target = midpoint(&a, &b);
        if on_side.len() > 1 {
            d = merge_nodes(&d, &on_side).map_err(|err| fail(k, format!("edge {e}: {err}")))?;
        }
        d = slide_home(&d, i, &target).map_err(|err| fail(k, format!("edge {e}: {err}")))?;
        let node = &d.face.nodes[d.face.nodes_on_side(i)?[0]];
        let k_e = gs.edges[e].node.as_ref().map_or(0, |x| x.multiplicity);
        if node.position != target || node.multiplicity != k_e {
            return Err(fail(k, format!("edge {e}: merged node does not reach the Gross–Siebert node")));
        }
        out.push(NodeAlignment {
            edge: e,
            face: facet,
            sources,
            target,
            multiplicity: k_e,
            ops: d.log.ops[before..].to_vec(),
        });
    }
    Ok(out)
}

/// Slides the only node on side `i` to `target`; when its wedge would run
/// off the side there, the cut is first turned to centre the wedge.
fn slide_home(d: &FaceDiagram, i: usize, target: &Pt2) -> Result<FaceDiagram> {
    let n = d.face.nodes_on_side(i)?[0];
    if d.face.nodes[n].position == *target {
        return Ok(d.clone());
    }
    let direct = nodal_slide(d, n, target);
    let node = &d.face.nodes[n];
    if direct.is_ok() || node.multiplicity < 2 {
        return direct;
    }
    let (dir, _) = d.face.side_direction(i)?;
    let j = node.multiplicity / 2;
    let cut = [node.cut[0] - j * dir[0], node.cut[1] - j * dir[1]];
    let turned_first = move_branch_cut(d, n, cut).and_then(|x| nodal_slide(&x, n, target));
    if turned_first.is_ok() {
        return turned_first;
    }
    let half = midpoint(&node.position, target);
    let via_half = nodal_slide(d, n, &half)
        .and_then(|x| move_branch_cut(&x, n, cut))
        .and_then(|x| nodal_slide(&x, n, target));
    via_half.or(direct)
}

/// The affine function `⟨ν, x⟩` on face `j` of `∂P` must take the value
/// `level` on the image of the edge of `Q` shared with `facet`.
fn check_level(inp: &StepInput, maps: &[AffineMap2], facet: usize, j: usize, level: &Rat) -> Result<()> {
    let StepInput { k, p, gs, .. } = *inp;
    let e = p
        .edge_between(facet, j)
        .ok_or_else(|| fail(k, format!("facets {facet} and {j} are not adjacent")))?;
    let frame = p.default_frame(j)?;
    let nu = p.normal(facet);
    let (a, b) = edge_image(gs, &maps[j], j, e)?;
    for x in [a, b] {
        let h = dot3r(nu, &frame.embed(&x));
        if &h != level {
            return Err(fail(
                k,
                format!("face {j}: image of the new edge sits at level {h}, expected {level}"),
            ));
        }
    }
    Ok(())
}

struct Stage {
    delta: NodalIASSphere,
    marks: Vec<(usize, MarkedPoint)>,
    gs: NodalIASSphere,
    q: Polytope,
}

fn marks_of(diagrams: &[FaceDiagram]) -> Vec<(usize, MarkedPoint)> {
    diagrams
        .iter()
        .enumerate()
        .flat_map(|(f, d)| d.marked.iter().map(move |m| (f, m.clone())))
        .collect()
}

fn stage(p: &Polytope, schedule: &GreedySchedule, tv: &TVector, k: usize) -> Result<Stage> {
    let tau = tv.truncated(k);
    let h = build_hybrid_unchecked(p, schedule, &tau, k).map_err(|e| fail(k, e.to_string()))?;
    let q = p.inflate(&tau).map_err(|e| fail(k, e.to_string()))?;
    let gs = build_gs(&q).map_err(|e| fail(k, e.to_string()))?;
    Ok(Stage {
        marks: marks_of(&h.diagrams),
        delta: h.sphere,
        gs,
        q,
    })
}

/// Builds the certificate that `a_t` and `a_gs` agree up to nodal slides,
/// one facet of the ordering at a time.
pub fn certify_equivalence(
    p: &Polytope,
    schedule: &GreedySchedule,
    tv: &TVector,
    a_t: &NodalIASSphere,
    a_gs: &NodalIASSphere,
) -> Result<EquivalenceCertificate> {
    let m = p.num_facets();
    crate::pipeline::validate_t(p, tv).into_result()?;
    if schedule.ordering != tv.ordering {
        return Err(fail(0, "schedule and time vector use different orderings"));
    }
    let mut prev = stage(p, schedule, tv, 0)?;
    let inp = StepInput {
        k: 0,
        p,
        q: &prev.q,
        delta: &prev.delta,
        marks: &prev.marks,
        gs: &prev.gs,
    };
    let initial = face_maps(0, &prev.delta, &prev.gs, p, &prev.q)?;
    if let Some(f) = initial.iter().position(|g| !g.is_identity()) {
        return Err(fail(0, format!("face {f}: the initial map is not the identity")));
    }
    check_cells(&inp, &initial)?;
    let mut prev_maps = initial.clone();
    let mut steps = Vec::new();
    for k in 1..=m {
        let facet = tv.ordering[k - 1];
        let mut cur = stage(p, schedule, tv, k)?;
        if k == m {
            cur.delta = a_t.clone();
            cur.marks.clear();
            cur.gs = a_gs.clone();
        }
        let inp = StepInput {
            k,
            p,
            q: &cur.q,
            delta: &cur.delta,
            marks: &cur.marks,
            gs: &cur.gs,
        };
        let maps = face_maps(k, &cur.delta, &cur.gs, p, inp.q)?;
        check_cells(&inp, &maps)?;
        if let Some(issue) = cur.delta.validate_atlas().issues.first() {
            return Err(fail(k, format!("resolved sphere is inconsistent: {issue}")));
        }
        let neighbours: Vec<usize> = p.facet_edges[facet]
            .iter()
            .map(|&e| {
                let [a, b] = p.edges[e].facets;
                if a == facet { b } else { a }
            })
            .collect();
        for f in 0..m {
            if f != facet && !neighbours.contains(&f) && maps[f] != prev_maps[f] {
                return Err(fail(k, format!("face {f}: map changed away from facet {facet}")));
            }
        }
        let later: Vec<usize> = neighbours
            .iter()
            .copied()
            .filter(|&j| tv.rank(j) > tv.rank(facet))
            .collect();
        let level = &p.halfspaces[facet].support + &tv.t[facet];
        for &j in &later {
            check_level(&inp, &maps, facet, j, &level)?;
        }
        let mut region = vec![facet];
        region.extend(later.iter().copied());
        let gates: Vec<(usize, usize)> = later
            .iter()
            .map(|&j| {
                let e = p.edge_between(facet, j).expect("adjacent facets");
                (e, prev.delta.edges[e].vertices[0])
            })
            .collect();
        let charts = prev
            .delta
            .developing_map(&region, &gates, facet)
            .map_err(|e| fail(k, format!("developing the unresolved region: {e}")))?;
        let polygon = cur.gs.faces[facet]
            .polygon
            .iter()
            .map(|x| maps[facet].apply(x))
            .collect();
        let alignments = align_nodes(&inp, facet, &maps)?;
        steps.push(CertificateStep {
            k,
            facet,
            level,
            maps: maps.clone(),
            polygon,
            developed: DevelopedRegion { base: facet, charts },
            alignments,
        });
        prev_maps = maps;
        prev = cur;
    }
    Ok(EquivalenceCertificate {
        polytope: p.spec(),
        ordering: tv.ordering.clone(),
        t: tv.t.clone(),
        initial,
        steps,
    })
}

/// Recomputes the certificate from its own inputs and the two spheres and
/// compares it step by step.
pub fn verify_certificate(
    cert: &EquivalenceCertificate,
    a_t: &NodalIASSphere,
    a_gs: &NodalIASSphere,
) -> CertificateVerdict {
    let failed = |step: Option<usize>, reason: String| CertificateVerdict {
        pass: false,
        step,
        reason,
    };
    let p = match cert
        .polytope
        .halfspaces()
        .and_then(crate::toric::build_polytope)
    {
        Ok(p) => p,
        Err(e) => return failed(None, format!("polytope: {e}")),
    };
    let tv = TVector::new(cert.ordering.clone(), cert.t.clone());
    let schedule = match crate::pipeline::greedy_schedule(&p, &tv.ordering) {
        Ok(s) => s,
        Err(e) => return failed(None, format!("schedule: {e}")),
    };
    let fresh = match certify_equivalence(&p, &schedule, &tv, a_t, a_gs) {
        Ok(c) => c,
        Err(Error::Certification { step, reason }) => return failed(Some(step), reason),
        Err(e) => return failed(None, e.to_string()),
    };
    if fresh.initial != cert.initial {
        return failed(Some(0), "recorded initial map differs".into());
    }
    if fresh.steps.len() != cert.steps.len() {
        return failed(None, format!("{} steps recorded, {} expected", cert.steps.len(), fresh.steps.len()));
    }
    for (a, b) in fresh.steps.iter().zip(&cert.steps) {
        if a != b {
            let what = if a.maps != b.maps {
                "cell maps"
            } else if a.polygon != b.polygon {
                "invariant polygon"
            } else if a.alignments != b.alignments {
                "node alignments"
            } else if a.developed != b.developed {
                "developed charts"
            } else {
                "step data"
            };
            return failed(Some(a.k), format!("recorded {what} differ"));
        }
    }
    CertificateVerdict {
        pass: true,
        step: None,
        reason: format!("{} steps verified", cert.steps.len()),
    }
}
