//! Command-line driver: Delaunay triangulations, representation builds,
//! braid word evaluation, self-check suites and trace scans, all with JSON
//! input and output.
//!
//! Exit codes: 0 success (and, for `verify`, all checks passed);
//! 2 degenerate configuration; 3 unsupported parameters; 4 word not pure;
//! 5 event-tracking failure; 1 anything else.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use spherebraid::algebra::{
    build_irrep, ClassifyingData, ClassifyingDataJson, RootOfUnityParams, Sign,
};
use spherebraid::braid::{
    parse_braid, representation, trace_scan, GeneratorLog, PipelineOptions, RepSetup,
    TraceScanRow,
};
use spherebraid::error::{AlgebraError, BraidError, GeometryError, PipelineError};
use spherebraid::geometry::{config_from_specs, cross_ratio_weights, delaunay_with, PointSpec};
use spherebraid::linalg::matrix_to_rows;
use spherebraid::triangulation::TriangulationJson;
use spherebraid::verify::run_suite;

#[derive(Parser)]
#[command(name = "spherebraid", version, about = "Braid representations from triangulated spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Delaunay triangulation and skew form of a configuration.
    Delaunay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Standard irreducible representation with geometric edge weights.
    Irrep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projective matrix of a pure braid word.
    BraidRep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Self-check suite: algebra, flips, or braid.
    Verify {
        #[arg(long)]
        suite: String,
        /// Optional configuration supplying the default seed.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// |trace| of the determinant-normalized word value over a sweep of N.
    TraceScan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Sign specification: 1, -1, or "auto".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum HSignSpec {
    Auto(String),
    Value(i8),
}

impl Default for HSignSpec {
    fn default() -> Self {
        HSignSpec::Auto("auto".into())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct Tolerances {
    relation_tol: f64,
    projective_tol: f64,
    delta_t: f64,
    step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relation_tol: 1e-9,
            projective_tol: 1e-6,
            delta_t: 1e-10,
            step: 1e-3,
        }
    }
}

fn default_n() -> i64 {
    3
}
fn default_s() -> i64 {
    1
}
fn default_scan() -> Vec<i64> {
    vec![3, 5, 7]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RunConfig {
    points: Vec<PointSpec>,
    #[serde(rename = "N", default = "default_n")]
    order: i64,
    #[serde(default = "default_s")]
    s: i64,
    /// Puncture exponents; zeros when omitted.
    #[serde(default)]
    n: Vec<i64>,
    #[serde(default)]
    h_sign: HSignSpec,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    seed: u64,
    /// Clearance required between punctures along generator motions.
    #[serde(default)]
    epsilon: Option<f64>,
    /// Sampling step of the tracker; shorthand for tolerances.step.
    #[serde(default)]
    step: Option<f64>,
    /// Orders swept by trace-scan.
    #[serde(default = "default_scan")]
    scan_n: Vec<i64>,
    /// Default output path; the --out flag takes precedence.
    #[serde(default)]
    out: Option<String>,
}

#[derive(Debug, Serialize)]
struct Header {
    tool: String,
    seed: u64,
}

fn exit_code_for(err: &PipelineError) -> u8 {
    match err {
        PipelineError::Geometry(GeometryError::DegenerateConfiguration(_)) => 2,
        PipelineError::Algebra(AlgebraError::UnsupportedParameters(_)) => 3,
        PipelineError::Braid(BraidError::NotPure) => 4,
        PipelineError::Geometry(GeometryError::TrackingMismatch(_))
        | PipelineError::Geometry(GeometryError::SimultaneousEvents(_))
        | PipelineError::Geometry(GeometryError::NoSafePath(_)) => 5,
        _ => 1,
    }
}

fn fail(err: PipelineError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn read_config(path: &PathBuf) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

fn emit(out: Option<PathBuf>, fallback: Option<String>, value: &impl Serialize) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    let path = out.or(fallback.map(PathBuf::from));
    match path {
        Some(p) => {
            let mut f = std::fs::File::create(&p)
                .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
            writeln!(f, "{text}").map_err(|e| e.to_string())?;
            eprintln!("wrote {}", p.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

struct Prepared {
    setup: RepSetup,
    opts: PipelineOptions,
    header: Header,
    fallback_out: Option<String>,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared, PipelineError> {
    let config = config_from_specs(&cfg.points)?;
    let params = RootOfUnityParams::new(cfg.order, cfg.s)?;
    let exponents = if cfg.n.is_empty() {
        vec![0; config.len()]
    } else {
        cfg.n.clone()
    };
    if exponents.len() != config.len() {
        return Err(PipelineError::Algebra(AlgebraError::Incompatible(format!(
            "{} puncture exponents for {} points",
            exponents.len(),
            config.len()
        ))));
    }
    let t = &cfg.tolerances;
    if t.relation_tol <= 0.0 || t.projective_tol <= 0.0 || t.delta_t <= 0.0 || t.step <= 0.0 {
        return Err(PipelineError::Algebra(AlgebraError::Incompatible(
            "all tolerance fields must be positive".into(),
        )));
    }
    if cfg.step.is_some_and(|s| s <= 0.0) || cfg.epsilon.is_some_and(|e| e <= 0.0) {
        return Err(PipelineError::Algebra(AlgebraError::Incompatible(
            "step and epsilon must be positive".into(),
        )));
    }
    let h_sign = match &cfg.h_sign {
        HSignSpec::Auto(word) if word == "auto" => None,
        HSignSpec::Auto(word) => {
            return Err(PipelineError::Algebra(AlgebraError::Incompatible(format!(
                "h_sign must be 1, -1 or \"auto\", got {word:?}"
            ))))
        }
        HSignSpec::Value(v) => Some(Sign::from_i8(*v).ok_or_else(|| {
            PipelineError::Algebra(AlgebraError::Incompatible(
                "h_sign must be 1, -1 or \"auto\"".into(),
            ))
        })?),
    };
    let mut opts = PipelineOptions::default();
    opts.track.step = cfg.step.unwrap_or(cfg.tolerances.step);
    opts.track.delta_t = cfg.tolerances.delta_t;
    opts.compose.flip.tol = cfg.tolerances.relation_tol.max(1e-9) * 1e3;
    if let Some(eps) = cfg.epsilon {
        opts.motion.margin = eps;
    }
    Ok(Prepared {
        setup: RepSetup {
            config,
            params,
            puncture_exponents: exponents,
            h_sign,
        },
        opts,
        header: Header {
            tool: format!("spherebraid {}", env!("CARGO_PKG_VERSION")),
            seed: cfg.seed,
        },
        fallback_out: cfg.out.clone(),
    })
}

#[derive(Serialize)]
struct DelaunayOutput {
    header: Header,
    triangulation: TriangulationJson,
    sigma: Vec<Vec<i64>>,
    edge_weights: ClassifyingDataJson,
}

fn cmd_delaunay(config: PathBuf, out: Option<PathBuf>) -> ExitCode {
    let cfg = match read_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let prepared = match prepare(&cfg) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let run = || -> Result<DelaunayOutput, PipelineError> {
        let tri = delaunay_with(&prepared.setup.config, 1e-9)?;
        let sigma = tri.sigma_matrix();
        let weights = cross_ratio_weights(&tri, &prepared.setup.config)?;
        let h_sign = ClassifyingData::realizable_h_sign(weights.values(), 1e-6)
            .unwrap_or(Sign::Plus);
        let data = ClassifyingData::new(
            weights.values().to_vec(),
            prepared.setup.puncture_exponents.clone(),
            h_sign,
        );
        Ok(DelaunayOutput {
            header: prepared.header,
            triangulation: TriangulationJson::from(&tri),
            sigma: sigma.to_rows(),
            edge_weights: ClassifyingDataJson::from(&data),
        })
    };
    match run() {
        Ok(output) => match emit(out, prepared.fallback_out, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => fail(e),
    }
}

#[derive(Serialize)]
struct IrrepOutput {
    header: Header,
    dimension: usize,
    triangulation: TriangulationJson,
    data: ClassifyingDataJson,
    /// Generator matrices keyed by 1-based edge label.
    matrices: std::collections::BTreeMap<String, Vec<Vec<[f64; 2]>>>,
    relation_residual: f64,
    classifying_residual: f64,
}

fn cmd_irrep(config: PathBuf, out: Option<PathBuf>) -> ExitCode {
    let cfg = match read_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let prepared = match prepare(&cfg) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let run = || -> Result<IrrepOutput, PipelineError> {
        let setup = &prepared.setup;
        let tri = delaunay_with(&setup.config, 1e-9)?;
        let sigma = tri.sigma_matrix();
        let weights = cross_ratio_weights(&tri, &setup.config)?;
        let h_sign = match setup.h_sign {
            Some(s) => s,
            None => ClassifyingData::realizable_h_sign(weights.values(), 1e-6).ok_or(
                PipelineError::Algebra(AlgebraError::CharacterMismatch(
                    "no realizable charge sign".into(),
                )),
            )?,
        };
        let data = ClassifyingData::new(
            weights.values().to_vec(),
            setup.puncture_exponents.clone(),
            h_sign,
        );
        let rep = build_irrep(&tri, &sigma, &data, &setup.params)?;
        Ok(IrrepOutput {
            header: prepared.header,
            dimension: rep.dimension(),
            triangulation: TriangulationJson::from(&tri),
            data: ClassifyingDataJson::from(&data),
            matrices: rep
                .matrices()
                .iter()
                .enumerate()
                .map(|(i, m)| ((i + 1).to_string(), matrix_to_rows(m)))
                .collect(),
            relation_residual: rep.relation_residual(),
            classifying_residual: rep.classifying_residual(1e-7)?,
        })
    };
    match run() {
        Ok(output) => match emit(out, prepared.fallback_out, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => fail(e),
    }
}

#[derive(Serialize)]
struct BraidRepFile {
    header: Header,
    word: String,
    dimension: usize,
    matrix: Vec<Vec<[f64; 2]>>,
    flip_log: Vec<GeneratorLog>,
    total_flips: usize,
    /// 1-based: entry for label i+1 names the label its edge started with.
    transport: Vec<usize>,
    intertwiner_sigma_min: f64,
    intertwiner_sigma_second: f64,
    intertwiner_residual: f64,
    weight_residual: f64,
}

fn cmd_braid_rep(config: PathBuf, word_text: String, out: Option<PathBuf>) -> ExitCode {
    let cfg = match read_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let prepared = match prepare(&cfg) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let run = || -> Result<BraidRepFile, PipelineError> {
        let word = parse_braid(&word_text, prepared.setup.config.len())?;
        let outp = representation(&word, &prepared.setup, &prepared.opts)?;
        Ok(BraidRepFile {
            header: prepared.header,
            word: word.to_string(),
            dimension: outp.dimension,
            matrix: matrix_to_rows(outp.matrix.matrix()),
            flip_log: outp.flip_log,
            total_flips: outp.total_flips,
            transport: outp.transport.iter().map(|&j| j + 1).collect(),
            intertwiner_sigma_min: outp.intertwiner_sigma_min,
            intertwiner_sigma_second: outp.intertwiner_sigma_second,
            intertwiner_residual: outp.intertwiner_residual,
            weight_residual: outp.weight_residual,
        })
    };
    match run() {
        Ok(output) => match emit(out, prepared.fallback_out, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => fail(e),
    }
}

fn cmd_verify(
    suite: String,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> ExitCode {
    let config_seed = match config {
        Some(path) => match read_config(&path) {
            Ok(cfg) => Some(cfg.seed),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => None,
    };
    let seed = seed.or(config_seed).unwrap_or(0);
    match run_suite(&suite, seed) {
        Some(report) => {
            for case in &report.cases {
                eprintln!(
                    "[{}] {} - {}",
                    if case.pass { "PASS" } else { "FAIL" },
                    case.name,
                    case.detail
                );
            }
            if emit(out, None, &report).is_err() {
                return ExitCode::from(1);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        None => {
            eprintln!("error: unknown suite {suite:?} (expected algebra, flips or braid)");
            ExitCode::from(1)
        }
    }
}

#[derive(Serialize)]
struct TraceScanFile {
    header: Header,
    word: String,
    rows: Vec<TraceScanRow>,
}

fn cmd_trace_scan(config: PathBuf, word_text: String, out: Option<PathBuf>) -> ExitCode {
    let cfg = match read_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let prepared = match prepare(&cfg) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let run = || -> Result<TraceScanFile, PipelineError> {
        let word = parse_braid(&word_text, prepared.setup.config.len())?;
        let rows = trace_scan(
            &word,
            &prepared.setup.config,
            &cfg.scan_n,
            &prepared.setup.puncture_exponents,
            &prepared.opts,
        )?;
        Ok(TraceScanFile {
            header: prepared.header,
            word: word.to_string(),
            rows,
        })
    };
    match run() {
        Ok(output) => match emit(out, prepared.fallback_out, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => fail(e),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match cli.command {
        Command::Delaunay { config, out } => cmd_delaunay(config, out),
        Command::Irrep { config, out } => cmd_irrep(config, out),
        Command::BraidRep { config, word, out } => cmd_braid_rep(config, word, out),
        Command::Verify {
            suite,
            config,
            seed,
            out,
        } => cmd_verify(suite, config, seed, out),
        Command::TraceScan { config, word, out } => cmd_trace_scan(config, word, out),
    }
}
