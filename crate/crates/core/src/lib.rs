//! Projective representations of the pure braid group of the sphere from
//! quantum torus algebras on ideal triangulations.
//!
//! The construction runs from marked points on the sphere and a braid word
//! to an explicit matrix defined up to scalar, with every intermediate
//! structure exposed: labeled triangulations and their skew forms
//! ([`triangulation`]), Delaunay hulls, cross-ratio weights and kinetic flip
//! tracking ([`geometry`]), irreducible quantum torus representations at odd
//! roots of unity with flip pushforwards and intertwiners ([`algebra`]), and
//! the braid pipeline itself ([`braid`]).

// Indexed loops over matrix entries and parallel arrays are the rule here.
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod braid;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod triangulation;
pub mod verify;

pub use algebra::{
    build_irrep, intertwiner, skew_normal_form, ClassifyingData, QuantumTorusRep,
    RootOfUnityParams, Sign,
};
pub use braid::{parse_braid, representation, BraidWord, ProjectiveMatrix, RepSetup};
pub use error::{AlgebraError, BraidError, GeometryError, PipelineError, TriangulationError};
pub use geometry::{
    cross_ratio_weights, delaunay, track_flips, CrossRatioWeights, FlipEvent, MotionPath,
    SpherePointConfig,
};
pub use triangulation::{FlipRoleMap, IdealTriangulation, SigmaMatrix};
