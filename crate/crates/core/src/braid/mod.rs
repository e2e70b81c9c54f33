//! Braid words and their projective representation.

pub mod pipeline;
pub mod word;

pub use pipeline::{
    isotopy_invariance_check, projective_distance, representation, trace_scan,
    verify_homomorphism, BraidRepOutput, FlipCentralLog, GeneratorLog, HomomorphismCase,
    HomomorphismReport, IsotopyCase, IsotopyReport, MotionVariant, PipelineOptions,
    ProjectiveMatrix, RepSetup, TraceScanRow,
};
pub use word::{parse_braid, BraidWord, Generator};
