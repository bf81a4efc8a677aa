//! Local surgeries on a single face: nodal blow-up, slides, merging and
//! splitting of nodes, and moving a wedge cut.

use serde::{Deserialize, Serialize};

use crate::atlas::{Face2, Node};
use crate::error::{Error, Result};
use crate::lattice::{det2, det2r, sub2, AffineMap2, Pt2, Rat, Vec2i};
use crate::polygon;

/// A pending blow-up site on a side, at lattice parameter `param` from the
/// side's start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub side: usize,
    pub param: Rat,
    pub multiplicity: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op")]
pub enum SurgeryOp {
    Mark { side: usize, param: Rat, multiplicity: i64 },
    Blowup { side: usize, c: Rat, a: Rat },
    Slide { node: usize, to: Pt2 },
    Merge { nodes: Vec<usize> },
    Split { node: usize, positions: Vec<Pt2> },
    MoveCut { node: usize, cut: Vec2i },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryLog {
    pub initial: Face2,
    #[serde(default)]
    pub initial_marked: Vec<MarkedPoint>,
    pub ops: Vec<SurgeryOp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceDiagram {
    pub face: Face2,
    pub marked: Vec<MarkedPoint>,
    pub log: SurgeryLog,
}

impl FaceDiagram {
    pub fn new(face: Face2) -> Result<Self> {
        face.validate()?;
        Ok(FaceDiagram {
            log: SurgeryLog {
                initial: face.clone(),
                initial_marked: Vec::new(),
                ops: Vec::new(),
            },
            face,
            marked: Vec::new(),
        })
    }

    /// A diagram with marked points and an empty surgery history.
    pub fn with_marks(face: Face2, marks: &[MarkedPoint]) -> Result<Self> {
        let mut d = FaceDiagram::new(face)?;
        for m in marks {
            d = d.mark_point(m.side, m.param.clone(), m.multiplicity)?;
        }
        d.log.ops.clear();
        d.log.initial_marked = marks.to_vec();
        Ok(d)
    }

    /// Rebuilds a diagram by applying the logged operations in order.
    pub fn replay(log: &SurgeryLog) -> Result<Self> {
        let mut d = FaceDiagram::with_marks(log.initial.clone(), &log.initial_marked)?;
        for op in &log.ops {
            d = d.apply(op)?;
        }
        Ok(d)
    }

    pub fn apply(&self, op: &SurgeryOp) -> Result<Self> {
        match op {
            SurgeryOp::Mark {
                side,
                param,
                multiplicity,
            } => self.mark_point(*side, param.clone(), *multiplicity),
            SurgeryOp::Blowup { side, c, a } => nodal_blowup(self, *side, c, a),
            SurgeryOp::Slide { node, to } => nodal_slide(self, *node, to),
            SurgeryOp::Merge { nodes } => merge_nodes(self, nodes),
            SurgeryOp::Split { node, positions } => split_node(self, *node, positions),
            SurgeryOp::MoveCut { node, cut } => move_branch_cut(self, *node, *cut),
        }
    }

    fn with(&self, face: Face2, marked: Vec<MarkedPoint>, op: SurgeryOp) -> Result<Self> {
        face.validate().map_err(|e| Error::Surgery(e.to_string()))?;
        let mut log = self.log.clone();
        log.ops.push(op);
        Ok(FaceDiagram { face, marked, log })
    }

    pub fn mark_point(&self, side: usize, param: Rat, multiplicity: i64) -> Result<Self> {
        let n = self.face.len();
        if side >= n {
            return Err(Error::Surgery(format!("no side {side}")));
        }
        let (_, len) = self.face.side_direction(side)?;
        if !param.is_positive() || param >= len || multiplicity < 1 {
            return Err(Error::Surgery(format!(
                "marked point {param} is not in the interior of side {side}"
            )));
        }
        if self.marked.iter().any(|m| m.side == side && m.param == param) {
            return Err(Error::Surgery(format!("point {param} of side {side} is already marked")));
        }
        let mut marked = self.marked.clone();
        marked.push(MarkedPoint {
            side,
            param: param.clone(),
            multiplicity,
        });
        self.with(
            self.face.clone(),
            marked,
            SurgeryOp::Mark {
                side,
                param,
                multiplicity,
            },
        )
    }

    /// Total multiplicity of nodes and marked points.
    pub fn total_multiplicity(&self) -> i64 {
        self.face.total_multiplicity() + self.marked.iter().map(|m| m.multiplicity).sum::<i64>()
    }
}

fn check_marks_clear(d: &FaceDiagram, side: usize, lo: &Rat, hi: &Rat) -> Result<()> {
    if let Some(m) = d
        .marked
        .iter()
        .find(|m| m.side == side && &m.param >= lo && &m.param <= hi)
    {
        return Err(Error::Surgery(format!(
            "marked point {} of side {side} lies under the wedge",
            m.param
        )));
    }
    Ok(())
}

/// Removes the lattice triangle with base `[c, c + a]` on `side` and apex at
/// height `a` over `c` (measured along the neighbouring side at the start
/// corner), leaving a simple node at the apex.
pub fn nodal_blowup(d: &FaceDiagram, side: usize, c: &Rat, a: &Rat) -> Result<FaceDiagram> {
    let face = &d.face;
    let n = face.len();
    if side >= n {
        return Err(Error::Surgery(format!("no side {side}")));
    }
    if !a.is_positive() {
        return Err(Error::Surgery(format!("blow-up size {a} must be positive")));
    }
    let (dir, len) = face.side_direction(side)?;
    let (prev, _) = face.side_direction((side + n - 1) % n)?;
    let inward = [-prev[0], -prev[1]];
    if det2(dir, inward) != 1 {
        return Err(Error::Surgery(format!("corner at the start of side {side} is not smooth")));
    }
    if !c.is_positive() || (c + a) >= len {
        return Err(Error::Surgery(format!(
            "triangle base [{c}, {}] does not fit in side {side} of length {len}",
            c + a
        )));
    }
    check_marks_clear(d, side, c, &(c + a))?;
    let p = face.vertex(side);
    let position = [
        &p[0] + &(c.mul_int(dir[0]) + a.mul_int(inward[0])),
        &p[1] + &(c.mul_int(dir[1]) + a.mul_int(inward[1])),
    ];
    let mut f = face.clone();
    f.nodes.push(Node {
        position,
        eigen: dir,
        multiplicity: 1,
        cut: [-inward[0], -inward[1]],
        side,
    });
    d.with(
        f,
        d.marked.clone(),
        SurgeryOp::Blowup {
            side,
            c: c.clone(),
            a: a.clone(),
        },
    )
}

fn node_ref(d: &FaceDiagram, k: usize) -> Result<&Node> {
    d.face
        .nodes
        .get(k)
        .ok_or_else(|| Error::Surgery(format!("no node {k}")))
}

fn on_segment(a: &Pt2, b: &Pt2, x: &Pt2) -> bool {
    if !det2r(&sub2(b, a), &sub2(x, a)).is_zero() {
        return false;
    }
    let inside = |i: usize| {
        let (lo, hi) = if a[i] <= b[i] { (&a[i], &b[i]) } else { (&b[i], &a[i]) };
        &x[i] >= lo && &x[i] <= hi
    };
    inside(0) && inside(1)
}

/// Moves a node along its eigenline.
pub fn nodal_slide(d: &FaceDiagram, k: usize, to: &Pt2) -> Result<FaceDiagram> {
    let node = node_ref(d, k)?;
    let delta = sub2(to, &node.position);
    let v = node.eigen;
    if !(delta[0].mul_int(v[1]) - delta[1].mul_int(v[0])).is_zero() {
        return Err(Error::Surgery(format!("target {to:?} is off the eigenline of node {k}")));
    }
    for (j, other) in d.face.nodes.iter().enumerate() {
        if j != k && on_segment(&node.position, to, &other.position) {
            return Err(Error::Surgery(format!("slide of node {k} collides with node {j}")));
        }
    }
    let mut f = d.face.clone();
    f.nodes[k].position = to.clone();
    let (lo, hi) = f.wedge_base(&f.nodes[k])?;
    check_marks_clear(d, node.side, &lo, &hi)?;
    d.with(
        f,
        d.marked.clone(),
        SurgeryOp::Slide {
            node: k,
            to: to.clone(),
        },
    )
}

/// Replaces collinear nodes with a common eigenline and cut by one node at
/// the position of the first, carrying the total multiplicity.
pub fn merge_nodes(d: &FaceDiagram, ks: &[usize]) -> Result<FaceDiagram> {
    if ks.len() < 2 {
        return Err(Error::Surgery("merge needs at least two nodes".into()));
    }
    let mut sorted = ks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != ks.len() {
        return Err(Error::Surgery("repeated node in merge".into()));
    }
    let first = node_ref(d, ks[0])?.clone();
    let mut total = 0;
    for &k in ks {
        let n = node_ref(d, k)?;
        let same_line = n.eigen == first.eigen || n.eigen == first.eigen.map(|x| -x);
        let delta = sub2(&n.position, &first.position);
        let collinear = (delta[0].mul_int(first.eigen[1]) - delta[1].mul_int(first.eigen[0])).is_zero();
        if !same_line || !collinear {
            return Err(Error::Surgery(format!(
                "node {k} is not on the eigenline of node {}",
                ks[0]
            )));
        }
        if n.side != first.side || n.cut != first.cut {
            return Err(Error::Surgery(format!("node {k} has a different cut than node {}", ks[0])));
        }
        total += n.multiplicity;
    }
    let mut f = d.face.clone();
    f.nodes[ks[0]].multiplicity = total;
    f.nodes[ks[0]].eigen = first.eigen;
    for &k in sorted.iter().rev() {
        if k != ks[0] {
            f.nodes.remove(k);
        }
    }
    d.with(f, d.marked.clone(), SurgeryOp::Merge { nodes: ks.to_vec() })
}

/// Splits a node of multiplicity `k` into `k` simple nodes at the given
/// positions on its eigenline.
pub fn split_node(d: &FaceDiagram, k: usize, positions: &[Pt2]) -> Result<FaceDiagram> {
    let node = node_ref(d, k)?.clone();
    if node.multiplicity < 2 || positions.len() as i64 != node.multiplicity {
        return Err(Error::Surgery(format!(
            "node {k} of multiplicity {} cannot be split into {} nodes",
            node.multiplicity,
            positions.len()
        )));
    }
    let v = node.eigen;
    let mut f = d.face.clone();
    f.nodes.remove(k);
    for p in positions {
        let delta = sub2(p, &node.position);
        if !(delta[0].mul_int(v[1]) - delta[1].mul_int(v[0])).is_zero() {
            return Err(Error::Surgery(format!("position {p:?} is off the eigenline of node {k}")));
        }
        f.nodes.push(Node {
            position: p.clone(),
            multiplicity: 1,
            ..node.clone()
        });
    }
    d.with(
        f,
        d.marked.clone(),
        SurgeryOp::Split {
            node: k,
            positions: positions.to_vec(),
        },
    )
}

/// Region swept when the cut of node `k` turns to `cut`: the part of the old
/// chart domain that the new chart describes differently, its new
/// position, and the affine map taking old coordinates to new ones there.
pub fn swept_region(d: &FaceDiagram, k: usize, cut: Vec2i) -> Result<(Vec<Pt2>, Vec<Pt2>, AffineMap2)> {
    let node = node_ref(d, k)?;
    let mut moved = node.clone();
    moved.cut = cut;
    let [p, a0, b0] = d.face.wedge(node)?;
    let [_, a1, b1] = d.face.wedge(&moved)?;
    let w = node.wedge_map();
    let s0 = d.face.side_param(node.side, &a0)?;
    let s1 = d.face.side_param(node.side, &a1)?;
    if s1 >= s0 {
        // turning forward: the strip after the old wedge moves before the new one
        Ok((vec![p.clone(), b0, b1], vec![p, a0, a1], w.inverse()))
    } else {
        Ok((vec![p.clone(), a1, a0], vec![p, b1, b0], w))
    }
}

/// Turns the wedge of node `k` so that it starts along `cut`.
pub fn move_branch_cut(d: &FaceDiagram, k: usize, cut: Vec2i) -> Result<FaceDiagram> {
    let node = node_ref(d, k)?.clone();
    if cut == node.cut {
        return d.with(d.face.clone(), d.marked.clone(), SurgeryOp::MoveCut { node: k, cut });
    }
    let (dir, _) = d.face.side_direction(node.side)?;
    if det2(dir, cut) >= 0 || crate::lattice::gcd_all(&cut) != 1 {
        return Err(Error::Surgery(format!("cut {cut:?} does not point to side {}", node.side)));
    }
    let (old, _, _) = swept_region(d, k, cut)?;
    for (j, other) in d.face.nodes.iter().enumerate() {
        if j == k {
            continue;
        }
        if polygon::contains(&old, &other.position, false)
            || polygon::overlap_area(&old, &d.face.wedge(other)?).is_positive()
        {
            return Err(Error::Surgery(format!("moving the cut of node {k} sweeps across node {j}")));
        }
    }
    let mut f = d.face.clone();
    f.nodes[k].cut = cut;
    let (lo, hi) = f.wedge_base(&f.nodes[k])?;
    check_marks_clear(d, node.side, &lo, &hi)?;
    d.with(f, d.marked.clone(), SurgeryOp::MoveCut { node: k, cut })
}
