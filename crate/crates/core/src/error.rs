use serde::Serialize;
use thiserror::Error;

use crate::metric::PointId;
use crate::scalar::{Mode, Scalar};

/// Domain errors raised by every operation in the crate.
///
/// Serializes as `{"error": "<Variant>", ...payload}` so the CLI can forward
/// the structured witness of the failure.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error", rename_all_fields = "camelCase")]
pub enum Error {
    #[error("distance matrix is not square ({rows} rows, row {row} has {len} entries)")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("a metric space needs at least one point")]
    EmptySpace,
    #[error("point {point} out of range for a space of {size} points")]
    InvalidPoint { point: usize, size: usize },
    #[error("point {point} appears twice in the subset")]
    DuplicatePoint { point: PointId },
    #[error("{value} is not a finite {mode} scalar")]
    BadScalar { value: String, mode: Mode },
    #[error("d({a},{b}) != d({b},{a})")]
    Asymmetric { a: PointId, b: PointId },
    #[error("d({a},{a}) is not zero")]
    NonzeroDiagonal { a: PointId },
    #[error("d({a},{b}) is not positive")]
    NonpositiveOffDiagonal { a: PointId, b: PointId },
    #[error("triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})")]
    TriangleViolation { a: PointId, b: PointId, c: PointId },
    #[error("scale factor {scale} is not positive")]
    NonpositiveScale { scale: Scalar },
    #[error("base point {base} is not in the subset")]
    BaseNotInSubset { base: PointId },
    #[error("cannot combine a {left} space with a {right} space")]
    ModeMismatch { left: Mode, right: Mode },
    #[error("operation needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("function is not {lipschitz}-Lipschitz on the subset (pair {x},{y})")]
    NotLipschitzOnSubset { lipschitz: Scalar, x: PointId, y: PointId },
    #[error("function value at the base point {base} is {value}, expected 0")]
    NonzeroAtBase { base: PointId, value: Scalar },
    #[error("no value given for point {point}")]
    MissingValue { point: PointId },
    #[error("witness point {point} lies in the subset")]
    WitnessInSubset { point: PointId },
    #[error("witness points coincide ({point})")]
    EqualWitnesses { point: PointId },
    #[error("Lipschitz constant {value} is negative")]
    NegativeLipschitz { value: Scalar },
    #[error("LTP failure hypothesis fails: u={u}, v={v} satisfy every trapezoid inequality")]
    HypothesisFails { u: PointId, v: PointId },
    #[error("level {eps} must lie in (0,1)")]
    BadLevel { eps: Scalar },
    #[error("measure family is empty")]
    EmptyFamily,
    #[error("measure {index} of the family is zero")]
    ZeroMeasure { index: usize },
    #[error("invalid convex molecule combination: {reason}")]
    InvalidCombination { reason: String },
    #[error("point {z} satisfies betweenness for some target, no Gateaux witness there")]
    BetweennessHolds { z: PointId },
    #[error("generator count must be at least {min}, got {got}")]
    ZeroCount { min: usize, got: usize },
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },
    #[error("exponent {p} must satisfy 1 < p < infinity")]
    BadExponent { p: f64 },
    #[error("bijection between spaces of {source_size} and {target_size} points")]
    SizeMismatch { source_size: usize, target_size: usize },
    #[error("mapping is not a bijection: {reason}")]
    NotABijection { reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
