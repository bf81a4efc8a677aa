//! Exact planar polygon helpers.

use crate::error::Result;
use crate::lattice::{det2r, lattice_direction, sub2, Pt2, Rat, Vec2i};

/// Twice the signed area; positive for counterclockwise vertex order.
pub fn signed_area2(pts: &[Pt2]) -> Rat {
    let n = pts.len();
    (0..n).fold(Rat::zero(), |acc, i| acc + det2r(&pts[i], &pts[(i + 1) % n]))
}

pub fn area(pts: &[Pt2]) -> Rat {
    signed_area2(pts).abs() * Rat::new(1, 2)
}

pub fn is_ccw(pts: &[Pt2]) -> bool {
    signed_area2(pts).is_positive()
}

/// Primitive direction and lattice length of side `i` (from vertex `i` to `i+1`).
pub fn side(pts: &[Pt2], i: usize) -> Result<(Vec2i, Rat)> {
    let n = pts.len();
    lattice_direction(&sub2(&pts[(i + 1) % n], &pts[i]))
}

/// `det(b − a, x − a)`: positive when `x` is left of the directed line `a → b`.
pub fn orient(a: &Pt2, b: &Pt2, x: &Pt2) -> Rat {
    det2r(&sub2(b, a), &sub2(x, a))
}

/// Membership in a counterclockwise convex polygon.
pub fn contains(pts: &[Pt2], x: &Pt2, strict: bool) -> bool {
    let n = pts.len();
    (0..n).all(|i| {
        let o = orient(&pts[i], &pts[(i + 1) % n], x);
        if strict {
            o.is_positive()
        } else {
            !o.is_negative()
        }
    })
}

/// Intersection of two counterclockwise convex polygons (Sutherland–Hodgman).
pub fn clip_convex(subject: &[Pt2], clip: &[Pt2]) -> Vec<Pt2> {
    let mut out: Vec<Pt2> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let (a, b) = (&clip[i], &clip[(i + 1) % m]);
        let input = std::mem::take(&mut out);
        let k = input.len();
        for j in 0..k {
            let p = &input[j];
            let q = &input[(j + 1) % k];
            let op = orient(a, b, p);
            let oq = orient(a, b, q);
            if !op.is_negative() {
                out.push(p.clone());
            }
            if (op.is_positive() && oq.is_negative()) || (op.is_negative() && oq.is_positive()) {
                let t = &op / &(&op - &oq);
                out.push([
                    &p[0] + &(&t * &(&q[0] - &p[0])),
                    &p[1] + &(&t * &(&q[1] - &p[1])),
                ]);
            }
        }
    }
    out
}

/// Area of the intersection of two counterclockwise convex polygons.
pub fn overlap_area(a: &[Pt2], b: &[Pt2]) -> Rat {
    let c = clip_convex(a, b);
    if c.len() < 3 {
        Rat::zero()
    } else {
        area(&c)
    }
}
