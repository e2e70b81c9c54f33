//! Quantum torus representations at roots of unity and their behavior
//! under diagonal exchanges.

pub mod classify;
pub mod flip;
pub mod intertwiner;
pub mod intmat;
pub mod params;
pub mod rep;

pub use classify::{ClassifyingData, ClassifyingDataJson, Sign};
pub use flip::{
    compose_flip_sequence, quantum_flip_pushforward, restandardize, ComposeOptions, FlipOptions,
    PushedRep, VerifyLevel,
};
pub use intertwiner::{intertwiner, IntertwinerMatrix, IntertwinerOptions};
pub use intmat::{skew_normal_form, solve_mod, SkewNormalForm};
pub use params::RootOfUnityParams;
pub use rep::{build_irrep, build_irrep_with, CentralValues, QuantumTorusRep, DEFAULT_BUILD_TOL};
