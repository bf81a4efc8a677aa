use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero vector has no primitive direction")]
    ZeroVector,
    #[error("not unimodular: {0}")]
    NotUnimodular(String),
    #[error("not saturated: {0}")]
    NotSaturated(String),
    #[error("integer overflow in {0}")]
    Overflow(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty polytope")]
    EmptyPolytope,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("redundant half-space {0}")]
    RedundantHalfspace(usize),
    #[error("not Delzant at vertex {vertex}: {reason}")]
    NotDelzant { vertex: usize, reason: String },
    #[error("non-positive anticanonical degree {degree} on edge {edge}")]
    NonPositiveDegree { edge: usize, degree: i64 },
    #[error("combinatorics change under inflation: {0}")]
    CombinatoricsChange(String),
    #[error("polygon does not close: residual {0}")]
    NotClosing(String),
    #[error("non-positive edge length at side {0}")]
    NonPositiveLength(usize),
    #[error("wedge problem: {0}")]
    Wedge(String),
    #[error("surgery rejected: {0}")]
    Surgery(String),
    #[error("inconsistent gluing: {0}")]
    Gluing(String),
    #[error("developing map obstruction around loop {0}")]
    Monodromy(String),
    #[error("invalid time vector: {0}")]
    TimeVector(String),
    #[error("edge length mismatch on edge {edge}: {left} vs {right}")]
    EdgeLengthMismatch {
        edge: usize,
        left: String,
        right: String,
    },
    #[error("cocycle defect on edge {edge}: {defect}")]
    CocycleDefect { edge: usize, defect: String },
    #[error("not a GS-admissible polytope: {0}")]
    NotGsAdmissible(String),
    #[error("certification failed at step {step}: {reason}")]
    Certification { step: usize, reason: String },
}
