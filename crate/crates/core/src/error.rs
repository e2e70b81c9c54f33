//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by combinatorial triangulation operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    /// The label does not index an edge of the triangulation.
    #[error("label {0} is not an edge of the triangulation")]
    NotAnEdge(usize),
    /// The square around the requested diagonal has repeated sides, so the
    /// diagonal exchange is not embedded.
    #[error("diagonal exchange at edge {0} is not embedded")]
    NotEmbedded(usize),
    /// Structural validation failed (edge counts, face gluing, Euler count).
    #[error("invalid triangulation: {0}")]
    Invalid(String),
}

/// Errors raised by the spherical geometry layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// Four of the marked points are coplanar (or the hull is flat), so the
    /// Delaunay triangulation is not defined.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    /// The triangulation has a loop edge, so cross-ratio weights are not defined.
    #[error("triangulation is not simple (edge {0} is a loop)")]
    NotSimple(usize),
    /// Two of the four corner points of an edge are too close together.
    #[error("numerical degeneracy evaluating edge {edge}: corner points {a} and {b} nearly coincide")]
    NumericalDegeneracy { edge: usize, a: usize, b: usize },
    /// The diagonal weight is 0 or -1, where the flip rule is singular.
    #[error("singular weight {value} on edge {edge}")]
    SingularWeight { edge: usize, value: String },
    /// No connecting arc with the required clearance from the other punctures.
    #[error("no safe path: {0}")]
    NoSafePath(String),
    /// Two distinct codimension-one events inside one bisection window.
    #[error("simultaneous events near t = {0}")]
    SimultaneousEvents(f64),
    /// The triangulation maintained by flips stopped matching the recomputed
    /// Delaunay triangulation.
    #[error("tracking mismatch at t = {0}: applied flips disagree with the recomputed hull")]
    TrackingMismatch(f64),
    /// Malformed point data (non-finite coordinates, coincident points).
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
}

/// Errors raised by the quantum algebra layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    /// Parameters outside the supported range (even N, or a normal-form block
    /// size sharing a factor with N).
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    /// The root-of-unity adjustment system has no solution. This indicates an
    /// inconsistency between the classifying data and the triangulation.
    #[error("character mismatch: {0}")]
    CharacterMismatch(String),
    /// A matrix expected to be scalar deviates from scalar beyond tolerance.
    #[error("matrix is not scalar (deviation {deviation:.3e})")]
    NotScalar { deviation: f64 },
    /// The diagonal generator hits the singular value -1, where the quantum
    /// flip rule has no inverse factor.
    #[error("singular diagonal: weight is -1 on edge {0}")]
    SingularDiagonal(usize),
    /// The two representations have no nonzero intertwiner.
    #[error("representations are not isomorphic (smallest singular value {0:.3e})")]
    NotIsomorphic(f64),
    /// The intertwiner space has dimension two or more.
    #[error("representation is not irreducible (second singular value {0:.3e})")]
    NotIrreducible(f64),
    /// Mismatched dimensions or triangulations between representations.
    #[error("incompatible representations: {0}")]
    Incompatible(String),
    /// A runtime postcondition check failed.
    #[error("runtime verification failed: {what} (residual {residual:.3e})")]
    VerificationFailed { what: String, residual: f64 },
}

/// Errors raised while parsing or validating braid words.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    /// Unparseable token; the position is a 0-based token index.
    #[error("syntax error in token {position}: {message}")]
    SyntaxError { position: usize, message: String },
    /// A strand index outside 1..=r.
    #[error("index out of range in token {position}: strand {index} with {strands} strands")]
    IndexOutOfRange {
        position: usize,
        index: usize,
        strands: usize,
    },
    /// The word does not induce the identity permutation of the punctures.
    #[error("word is not pure: it permutes the punctures")]
    NotPure,
}

/// Any failure of the end-to-end braid representation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    /// Projective comparison against a zero matrix.
    #[error("zero matrix in projective comparison")]
    ZeroMatrix,
}
