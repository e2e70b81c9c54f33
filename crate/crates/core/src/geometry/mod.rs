//! Conformal side of the construction: marked points on the sphere, hull
//! triangulations, cross-ratio weights, motions and event tracking.

pub mod config;
pub mod hull;
pub mod motion;
pub mod tracking;
pub mod weights;

pub use config::{config_from_specs, specs_from_config, PlanePoint, PointSpec, SpherePointConfig};
pub use hull::{delaunay, delaunay_with, genericity_margin, hull_triangulation};
pub use motion::{
    half_twist_motion, pure_generator_motion, MotionOptions, MotionPath, MotionSegment,
    RotationMove,
};
pub use tracking::{track_flips, FlipEvent, TrackOptions};
pub use weights::{
    classical_flip_weights, cross_ratio_weights, cross_ratio_weights_with, edge_quad, edge_weight,
    CrossRatioWeights,
};
