//! Built-in smooth Fano polytopes.

use crate::error::{Error, Result};
use crate::toric::{build_polytope, HalfSpace, Polytope};

pub const NAMES: [&str; 3] = ["P3", "P1xP1xP1", "P2xP1"];

fn hs(rows: &[([i64; 3], i64)]) -> Vec<HalfSpace> {
    rows.iter()
        .map(|&(n, b)| HalfSpace::new(n, b).expect("catalog normals are primitive"))
        .collect()
}

/// The simplex `x, y, z ≥ 0, x + y + z ≤ 4`.
pub fn p3() -> Polytope {
    build_polytope(hs(&[
        ([-1, 0, 0], 0),
        ([0, -1, 0], 0),
        ([0, 0, -1], 0),
        ([1, 1, 1], 4),
    ]))
    .expect("P3 polytope")
}

/// The cube `[-1, 1]³`.
pub fn p1xp1xp1() -> Polytope {
    build_polytope(hs(&[
        ([-1, 0, 0], 1),
        ([1, 0, 0], 1),
        ([0, -1, 0], 1),
        ([0, 1, 0], 1),
        ([0, 0, -1], 1),
        ([0, 0, 1], 1),
    ]))
    .expect("cube polytope")
}

/// The prism `x, y ≥ -1, x + y ≤ 1, -1 ≤ z ≤ 1`.
pub fn p2xp1() -> Polytope {
    build_polytope(hs(&[
        ([-1, 0, 0], 1),
        ([0, -1, 0], 1),
        ([1, 1, 0], 1),
        ([0, 0, -1], 1),
        ([0, 0, 1], 1),
    ]))
    .expect("prism polytope")
}

/// A built-in polytope with a one-line description.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub doc: &'static str,
    pub polytope: Polytope,
}

pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "P3",
            doc: "projective 3-space; simplex x, y, z >= 0, x + y + z <= 4",
            polytope: p3(),
        },
        CatalogEntry {
            name: "P1xP1xP1",
            doc: "product of three lines; cube [-1, 1]^3",
            polytope: p1xp1xp1(),
        },
        CatalogEntry {
            name: "P2xP1",
            doc: "plane times line; prism x, y >= -1, x + y <= 1, -1 <= z <= 1",
            polytope: p2xp1(),
        },
    ]
}

pub fn by_name(name: &str) -> Result<Polytope> {
    match name.to_ascii_lowercase().as_str() {
        "p3" => Ok(p3()),
        "p1xp1xp1" | "cube" => Ok(p1xp1xp1()),
        "p2xp1" => Ok(p2xp1()),
        _ => Err(Error::InvalidInput(format!(
            "unknown polytope {name:?}; known: {}",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_are_valid() {
        let es = entries();
        assert_eq!(es.iter().map(|e| e.name).collect::<Vec<_>>(), NAMES);
        for e in &es {
            assert!(e.polytope.check_delzant().is_ok(), "{}", e.name);
            let d = e.polytope.anticanonical_degrees().unwrap();
            assert!(d.iter().all(|&k| k > 0));
            assert_eq!(d.iter().sum::<i64>(), 24);
            assert_eq!(by_name(e.name).unwrap().spec(), e.polytope.spec());
        }
        assert_eq!(es[0].polytope.num_facets(), 4);
        assert_eq!(es[1].polytope.num_facets(), 6);
    }
}
