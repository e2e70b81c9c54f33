//! The end-to-end construction: from a pure braid word and a configuration
//! of marked points to a projective matrix.
//!
//! Pipeline: Delaunay triangulation of the base configuration, cross-ratio
//! weights, standard irreducible representation; then, for each generator
//! (rightmost first), a loop motion, its tracked flip events, and the
//! quantum pushforward of the representation through those flips. A pure
//! word returns to the base triangulation carrying the same classifying
//! data, so a unique-up-to-scale intertwiner against the original generators
//! exists; that intertwiner is the value of the representation.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{
    build_irrep, intertwiner, ClassifyingData, ComposeOptions, PushedRep, RootOfUnityParams, Sign,
};
use crate::error::{AlgebraError, GeometryError, PipelineError};
use crate::geometry::{
    cross_ratio_weights, delaunay_with, half_twist_motion, pure_generator_motion, track_flips,
    FlipEvent, MotionOptions, SpherePointConfig, TrackOptions,
};
use crate::linalg::{identity, try_inverse, CMat};

use super::word::{BraidWord, Generator};

/// A nonzero matrix considered modulo scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMatrix(CMat);

impl ProjectiveMatrix {
    pub fn new(m: CMat) -> Result<Self, PipelineError> {
        if m.norm() == 0.0 {
            return Err(PipelineError::ZeroMatrix);
        }
        Ok(ProjectiveMatrix(m))
    }

    pub fn identity(d: usize) -> Self {
        ProjectiveMatrix(identity(d))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.nrows()
    }

    pub fn compose(&self, other: &ProjectiveMatrix) -> Result<ProjectiveMatrix, PipelineError> {
        ProjectiveMatrix::new(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> Result<ProjectiveMatrix, PipelineError> {
        let inv = try_inverse(&self.0).ok_or(PipelineError::ZeroMatrix)?;
        ProjectiveMatrix::new(inv)
    }

    /// Scale-free distance to another matrix: the sine of the angle between
    /// the two, seen as vectors, together with the best matching scalar
    /// `mu` with `self ~ mu * other`.
    pub fn distance(&self, other: &ProjectiveMatrix) -> Result<(f64, Complex64), PipelineError> {
        projective_distance(&self.0, &other.0)
    }
}

/// See [`ProjectiveMatrix::distance`].
pub fn projective_distance(
    m1: &CMat,
    m2: &CMat,
) -> Result<(f64, Complex64), PipelineError> {
    if m1.nrows() != m2.nrows() || m1.ncols() != m2.ncols() {
        return Err(PipelineError::Algebra(AlgebraError::Incompatible(
            "projective comparison of different dimensions".into(),
        )));
    }
    let n1 = m1.norm();
    let n2 = m2.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(PipelineError::ZeroMatrix);
    }
    // <M2, M1> / <M2, M2> in the trace inner product minimizes
    // ||M1 - mu M2||.
    let mut inner = Complex64::new(0.0, 0.0);
    for i in 0..m1.nrows() {
        for j in 0..m1.ncols() {
            inner += m2[(i, j)].conj() * m1[(i, j)];
        }
    }
    let mu = inner / Complex64::new(n2 * n2, 0.0);
    let dist = (m1 - m2 * mu).norm() / n1;
    Ok((dist, mu))
}

/// Everything the pipeline needs besides the word itself.
#[derive(Debug, Clone)]
pub struct RepSetup {
    pub config: SpherePointConfig,
    pub params: RootOfUnityParams,
    pub puncture_exponents: Vec<i64>,
    /// `None` picks the sign the edge weights can realize.
    pub h_sign: Option<Sign>,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub motion: MotionOptions,
    pub track: TrackOptions,
    pub compose: ComposeOptions,
    /// Genericity threshold for the base Delaunay triangulation.
    pub genericity_eps: f64,
    /// Required agreement between the transported and the original edge
    /// weights at the end of a pure word.
    pub weight_match_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            motion: MotionOptions::default(),
            track: TrackOptions::default(),
            compose: ComposeOptions::default(),
            genericity_eps: crate::geometry::hull::DEFAULT_GENERICITY_EPS,
            weight_match_tol: 1e-7,
        }
    }
}

/// Classifying values right after one flip; edge labels are 1-based here,
/// matching the wire convention of the flip events.
#[derive(Debug, Clone, Serialize)]
pub struct FlipCentralLog {
    pub edge: usize,
    pub x: std::collections::BTreeMap<String, [f64; 2]>,
}

/// Events recorded while processing one generator token, with the tracked
/// central values after every flip.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorLog {
    pub token: String,
    pub events: Vec<FlipEvent>,
    pub central: Vec<FlipCentralLog>,
}

/// The computed value together with its quality report.
#[derive(Debug, Clone)]
pub struct BraidRepOutput {
    pub matrix: ProjectiveMatrix,
    pub dimension: usize,
    pub flip_log: Vec<GeneratorLog>,
    pub total_flips: usize,
    /// Transport permutation: end-label i sits on the geometric edge that
    /// started with label `transport[i]`.
    pub transport: Vec<usize>,
    pub intertwiner_sigma_min: f64,
    pub intertwiner_sigma_second: f64,
    pub intertwiner_residual: f64,
    /// Worst per-label difference between the transported and the original
    /// edge weights.
    pub weight_residual: f64,
}

/// Computes the projective matrix of a pure braid word.
pub fn representation(
    word: &BraidWord,
    setup: &RepSetup,
    opts: &PipelineOptions,
) -> Result<BraidRepOutput, PipelineError> {
    if word.strands() != setup.config.len() {
        return Err(PipelineError::Geometry(GeometryError::InvalidConfiguration(
            format!(
                "word over {} strands on {} marked points",
                word.strands(),
                setup.config.len()
            ),
        )));
    }
    let tri0 = delaunay_with(&setup.config, opts.genericity_eps)?;
    let sigma0 = tri0.sigma_matrix();
    let weights0 = cross_ratio_weights(&tri0, &setup.config)?;
    let h_sign = match setup.h_sign {
        Some(s) => s,
        None => ClassifyingData::realizable_h_sign(weights0.values(), 1e-6).ok_or_else(|| {
            PipelineError::Algebra(AlgebraError::CharacterMismatch(
                "edge weight product is not +-1; no realizable charge sign".into(),
            ))
        })?,
    };
    let data0 = ClassifyingData::new(
        weights0.values().to_vec(),
        setup.puncture_exponents.clone(),
        h_sign,
    );
    let rep0 = build_irrep(&tri0, &sigma0, &data0, &setup.params)?;
    let dimension = rep0.dimension();

    let mut state = PushedRep::start(rep0.clone());
    let mut flip_log = Vec::new();
    let mut total_flips = 0usize;
    let mut current = setup.config.clone();
    // Braid positions to puncture ids; twists change the occupancy.
    let mut slot_to_puncture: Vec<usize> = (0..current.len()).collect();

    // Tokens act in reading order: the leftmost moves first. Together with
    // the orientation of the final intertwiner solve this makes the word
    // map multiplicative rather than anti-multiplicative.
    for token in word.tokens().iter() {
        let motion = match *token {
            Generator::Loop { j, k, inverse } => pure_generator_motion(
                &current,
                slot_to_puncture[j],
                slot_to_puncture[k],
                !inverse,
                &opts.motion,
            )?,
            Generator::HalfTwist { i, inverse } => half_twist_motion(
                &current,
                slot_to_puncture[i],
                slot_to_puncture[i + 1],
                !inverse,
                &opts.motion,
            )?,
        };
        let (events, end_tri) =
            track_flips(&current, &motion, state.rep.triangulation(), &opts.track)?;
        let flips: Vec<usize> = events.iter().flat_map(|e| e.flips.clone()).collect();
        total_flips += flips.len();
        let mut central = Vec::with_capacity(flips.len());
        for &edge in &flips {
            state = crate::algebra::compose_flip_sequence(state, &[edge], &opts.compose)?;
            central.push(FlipCentralLog {
                edge: edge + 1,
                x: state
                    .rep
                    .data()
                    .x
                    .iter()
                    .enumerate()
                    .map(|(i, z)| ((i + 1).to_string(), [z.re, z.im]))
                    .collect(),
            });
        }
        if !state.rep.triangulation().labelled_equal(&end_tri) {
            return Err(PipelineError::Geometry(GeometryError::TrackingMismatch(
                1.0,
            )));
        }
        flip_log.push(GeneratorLog {
            token: token.to_string(),
            events,
            central,
        });
        current = SpherePointConfig::from_unit_vectors(motion.positions(1.0))?;
        if let Generator::HalfTwist { i, .. } = *token {
            slot_to_puncture.swap(i, i + 1);
        }
    }

    // Purity: the configuration and the slot occupancy are back to base.
    let config_gap = current
        .unit_vectors()
        .iter()
        .zip(setup.config.unit_vectors())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if config_gap > 1e-9 || slot_to_puncture.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(PipelineError::Braid(crate::error::BraidError::NotPure));
    }

    // The end triangulation is the base Delaunay triangulation again, up to
    // a transport permutation of the labels: the edge carrying label i at
    // the end covers the geometric edge that started as label transport[i].
    // The carried arc is an image of that covered edge, so generators pair
    // through the permutation.
    let transport = state
        .rep
        .triangulation()
        .geometric_relabeling(&tri0)
        .ok_or(PipelineError::Geometry(GeometryError::TrackingMismatch(
            1.0,
        )))?;

    // A transported edge returns carrying the weight of the edge it covers,
    // because both arcs see the same four punctures.
    let weight_residual = (0..tri0.num_edges())
        .map(|i| (state.rep.data().x[i] - weights0.weight(transport[i])).norm())
        .fold(0.0, f64::max);
    if weight_residual > opts.weight_match_tol {
        return Err(PipelineError::Geometry(GeometryError::TrackingMismatch(
            1.0,
        )));
    }

    // Solve pushed * L = L * (original o transport) and paste in the
    // accumulated conjugator.
    let paired: Vec<CMat> = transport.iter().map(|&j| rep0.matrix(j).clone()).collect();
    let solved = intertwiner(
        state.rep.matrices(),
        &paired,
        &opts.compose.intertwiner,
    )?;
    let matrix = ProjectiveMatrix::new(&state.left * &solved.matrix)?;
    Ok(BraidRepOutput {
        matrix,
        dimension,
        flip_log,
        total_flips,
        transport,
        intertwiner_sigma_min: solved.sigma_min,
        intertwiner_sigma_second: solved.sigma_second,
        intertwiner_residual: solved.residual,
        weight_residual,
    })
}

/// One row of a homomorphism check report.
#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismCase {
    pub w1: String,
    pub w2: String,
    pub distance: f64,
    pub scalar: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismReport {
    pub pairs: Vec<HomomorphismCase>,
    pub tol: f64,
    pub pass: bool,
}

/// For each pair, compares the value of the concatenation against the
/// product of the values.
pub fn verify_homomorphism(
    pairs: &[(BraidWord, BraidWord)],
    setup: &RepSetup,
    opts: &PipelineOptions,
    tol: f64,
) -> Result<HomomorphismReport, PipelineError> {
    let mut out = Vec::with_capacity(pairs.len());
    let mut pass = true;
    for (w1, w2) in pairs {
        let combined = w1.concat(w2)?;
        let lhs = representation(&combined, setup, opts)?;
        let r1 = representation(w1, setup, opts)?;
        let r2 = representation(w2, setup, opts)?;
        let product = r1.matrix.compose(&r2.matrix)?;
        let (distance, scalar) = lhs.matrix.distance(&product)?;
        pass &= distance < tol;
        out.push(HomomorphismCase {
            w1: w1.to_string(),
            w2: w2.to_string(),
            distance,
            scalar: [scalar.re, scalar.im],
        });
    }
    Ok(HomomorphismReport {
        pairs: out,
        tol,
        pass,
    })
}

/// A variant realization of the same word, for invariance checks.
#[derive(Debug, Clone, Copy)]
pub struct MotionVariant {
    pub radius_scale: f64,
    pub detour: f64,
    pub step_scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotopyCase {
    pub variant_a: usize,
    pub variant_b: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotopyReport {
    pub word: String,
    pub cases: Vec<IsotopyCase>,
    pub tol: f64,
    pub pass: bool,
}

/// Recomputes the word's value under each variant motion realization and
/// compares all results pairwise.
pub fn isotopy_invariance_check(
    word: &BraidWord,
    setup: &RepSetup,
    opts: &PipelineOptions,
    variants: &[MotionVariant],
    tol: f64,
) -> Result<IsotopyReport, PipelineError> {
    let mut values = Vec::with_capacity(variants.len());
    for v in variants {
        let mut local = *opts;
        local.motion.radius_scale *= v.radius_scale;
        local.motion.detour = v.detour;
        local.track.step *= v.step_scale;
        values.push(representation(word, setup, &local)?.matrix);
    }
    let mut cases = Vec::new();
    let mut pass = true;
    for a in 0..values.len() {
        for b in (a + 1)..values.len() {
            let (distance, _) = values[a].distance(&values[b])?;
            pass &= distance < tol;
            cases.push(IsotopyCase {
                variant_a: a,
                variant_b: b,
                distance,
            });
        }
    }
    Ok(IsotopyReport {
        word: word.to_string(),
        cases,
        tol,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceScanRow {
    pub n: i64,
    pub dimension: usize,
    pub trace_abs: f64,
}

/// |trace| of the determinant-normalized value of the word, for a sweep of
/// odd orders N. The puncture exponents are reused across orders. Purely
/// descriptive output; the determinant normalization is a convention.
pub fn trace_scan(
    word: &BraidWord,
    config: &SpherePointConfig,
    orders: &[i64],
    puncture_exponents: &[i64],
    opts: &PipelineOptions,
) -> Result<Vec<TraceScanRow>, PipelineError> {
    let mut rows = Vec::with_capacity(orders.len());
    for &n in orders {
        let params = RootOfUnityParams::new(n, 1).map_err(PipelineError::Algebra)?;
        let setup = RepSetup {
            config: config.clone(),
            params,
            puncture_exponents: puncture_exponents.to_vec(),
            h_sign: None,
        };
        let out = representation(word, &setup, opts)?;
        let m = out.matrix.matrix();
        let d = m.nrows();
        let det = m.clone().lu().determinant();
        if det.norm() == 0.0 {
            return Err(PipelineError::ZeroMatrix);
        }
        // Principal D-th root of 1/det.
        let scale = Complex64::from_polar(det.norm().powf(-1.0 / d as f64), -det.arg() / d as f64);
        let trace_abs = (m * scale).trace().norm();
        rows.push(TraceScanRow {
            n,
            dimension: d,
            trace_abs,
        });
    }
    Ok(rows)
}
