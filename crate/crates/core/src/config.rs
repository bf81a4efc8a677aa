//! Pipeline configuration files.

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::lattice::Rat;
use crate::pipeline::TVector;
use crate::toric::{build_polytope, Polytope, PolytopeSpec};

/// A catalog name or explicit half-spaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolytopeRef {
    Name(String),
    Spec(PolytopeSpec),
}

impl PolytopeRef {
    pub fn resolve(&self) -> Result<Polytope> {
        match self {
            PolytopeRef::Name(n) => catalog::by_name(n),
            PolytopeRef::Spec(s) => build_polytope(s.halfspaces()?),
        }
    }
}

/// `{"polytope": …, "ordering": [...], "t": ["p/q", ...]}`. Missing
/// `ordering` means facet order; missing `t` means `m/10, …, 1/10` along
/// the ordering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub polytope: PolytopeRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Rat>>,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<(Polytope, TVector)> {
        let p = self.polytope.resolve()?;
        let ordering = self
            .ordering
            .clone()
            .unwrap_or_else(|| (0..p.num_facets()).collect());
        let tv = match &self.t {
            Some(t) => TVector::new(ordering, t.clone()),
            None => TVector::linear(ordering, &Rat::new(1, 10)),
        };
        Ok((p, tv))
    }
}

/// Parses a comma separated list such as `"2/5, 3/10, 1/5"`.
pub fn parse_rat_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(|x| x.trim().parse::<Rat>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_name_and_defaults() {
        let c = PipelineConfig::from_json(r#"{"polytope": "P3"}"#).unwrap();
        let (p, tv) = c.resolve().unwrap();
        assert_eq!(p.num_facets(), 4);
        assert_eq!(tv.ordering, vec![0, 1, 2, 3]);
        let want: Vec<Rat> = ["2/5", "3/10", "1/5", "1/10"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(tv.t, want);
    }

    #[test]
    fn explicit_spec_round_trip() {
        let text = r#"{"polytope": {"normals": [[-1,0,0],[0,-1,0],[0,0,-1],[1,1,1]],
                       "supports": ["0","0","0","4"]},
                       "ordering": [3,2,1,0], "t": ["1/10","1/5","3/10","2/5"]}"#;
        let c = PipelineConfig::from_json(text).unwrap();
        assert_eq!(PipelineConfig::from_json(&c.to_json()).unwrap(), c);
        let (p, tv) = c.resolve().unwrap();
        assert_eq!(p.edges.len(), 6);
        assert_eq!(tv.rank(3), Some(0));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(PipelineConfig::from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_rat_list("1/2, x"), Err(Error::Parse(_))));
        assert_eq!(parse_usize_list("2, 0,1").unwrap(), vec![2, 0, 1]);
        let c = PipelineConfig::from_json(r#"{"polytope": "dodecahedron"}"#).unwrap();
        assert!(matches!(c.resolve(), Err(Error::InvalidInput(_))));
    }
}
