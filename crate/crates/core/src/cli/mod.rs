//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 no path exists,
//! 4 internal failure.

pub mod bench;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use config::{Config, ConfigError, Mode, Verbosity};
pub use output::{parse_match_json, MatchDocument, SCHEMA};

use crate::descriptors::{thickness_2d, thickness_3d, ThicknessOptions};
use crate::evaluation::{evaluate_matches, uniform_grid, EvalError, GroundTruth};
use crate::geometry::io::{load_contour, load_mesh, save_mesh};
use crate::geometry::{Contour, GeometryError, TriMesh};
use crate::graph::LayeredGraph;
use crate::pipeline::{prepare, PrepareError, PrepareOptions};
use crate::solver::{solve_cyclic, solve_open, SolveOptions, SolverError};
use crate::transfer::{transfer_deformation, ArapOptions, DeformationInput, TransferError};

pub const THREADS_ENV: &str = "CONJMATCH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "conjmatch", version, about = "Globally optimal 2D contour to 3D mesh matching")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (overrides CONJMATCH_THREADS and the config file).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub verbosity: Option<Verbosity>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Match a contour to a mesh.
    Match(MatchArgs),
    /// Score a matching against ground truth.
    Eval(EvalArgs),
    /// Per-vertex thickness of a contour or a mesh.
    Thickness(ThicknessArgs),
    /// Carry a contour deformation over to a matched mesh.
    Transfer(TransferArgs),
    /// Graph sizes for a contour/mesh pair.
    Info(InfoArgs),
    /// Runtime scaling sweep on a fixed 500-vertex mesh.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub contour: PathBuf,
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Output JSON; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall time in the output.
    #[arg(long)]
    pub timing: bool,
    /// Keep input coordinates instead of scaling to unit diameter.
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long)]
    pub warm_start: bool,
    /// Resample the contour to this edge length (in input units) first.
    #[arg(long)]
    pub resample: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "match")]
    pub matching: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub mesh: PathBuf,
    /// Directory for summary.json and the curve CSV files.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ThicknessArgs {
    #[arg(long, required_unless_present = "mesh", conflicts_with = "mesh")]
    pub contour: Option<PathBuf>,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Test every face instead of using the BVH.
    #[arg(long)]
    pub brute_force: bool,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long)]
    pub rest: PathBuf,
    #[arg(long)]
    pub deformed: PathBuf,
    #[arg(long = "match")]
    pub matching: PathBuf,
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub anchors: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Allow a uniform scale in the alignment.
    #[arg(long)]
    pub scale: bool,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub contour: PathBuf,
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 100])]
    pub sizes: Vec<usize>,
    /// Skip the branch-and-bound solve and time one Dijkstra pass only.
    #[arg(long)]
    pub no_cyclic: bool,
    /// Keep the fastest of this many Dijkstra runs per size.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("NoPath: {0}")]
    NoPath(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::NoPath(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::DisconnectedMesh { .. } => CliError::NoPath(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PrepareError> for CliError {
    fn from(e: PrepareError) -> Self {
        match e {
            PrepareError::Geometry(g) => g.into(),
            PrepareError::Energy(e) => CliError::Input(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NoPath(_) => CliError::NoPath(e.to_string()),
            SolverError::TooLarge(_) | SolverError::InvalidSource(_) => CliError::Input(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<TransferError> for CliError {
    fn from(e: TransferError) -> Self {
        match e {
            TransferError::ArapDiverged { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read_contour(path: &Path) -> Result<Contour, CliError> {
    load_contour(path, None).map_err(|e| io_err(path, e))
}

fn read_mesh(path: &Path) -> Result<TriMesh, CliError> {
    load_mesh(path, None).map_err(|e| io_err(path, e))
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("conjmatch: {e}");
            e.exit_code()
        }
    }
}

/// Effective configuration: defaults, then the config file, then the
/// environment, then flags.
pub fn resolve_config(global: &GlobalArgs) -> Result<Config, CliError> {
    let mut cfg = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            Config::from_toml(&text)?
        }
        None => Config::default(),
    };
    if let (None, Ok(v)) = (global.threads, std::env::var(THREADS_ENV)) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        cfg.threads = Some(n);
    }
    if let Some(n) = global.threads {
        cfg.threads = Some(n);
    }
    if let Some(v) = global.verbosity {
        cfg.verbosity = v;
    }
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut cfg = resolve_config(&cli.global)?;
    let _ = env_logger::Builder::new().filter_level(cfg.verbosity.level()).format_timestamp(None).try_init();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Internal(e.to_string()))?;
    log::info!("{} worker threads", pool.current_num_threads());
    pool.install(|| match cli.command {
        Command::Match(a) => {
            if let Some(m) = a.mode {
                cfg.mode = m;
            }
            cfg.normalize &= !a.no_normalize;
            cfg.warm_start |= a.warm_start;
            cmd_match(&a, &cfg)
        }
        Command::Eval(a) => cmd_eval(&a),
        Command::Thickness(a) => cmd_thickness(&a),
        Command::Transfer(a) => {
            if let Some(n) = a.anchors {
                cfg.anchor_count = n;
            }
            cfg.validate()?;
            cmd_transfer(&a, &cfg)
        }
        Command::Info(a) => cmd_info(&a, &cfg),
        Command::Bench(a) => cmd_bench(&a, &cfg),
    })
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn prepare_options(cfg: &Config) -> PrepareOptions {
    PrepareOptions { normalize: cfg.normalize, energy: cfg.energy(), ..PrepareOptions::default() }
}

/// Loads the contour, resampled if asked.
fn load_match_contour(path: &Path, resample: Option<f64>) -> Result<Contour, CliError> {
    let c = read_contour(path)?;
    match resample {
        Some(len) => Ok(c.resample(len)?),
        None => Ok(c),
    }
}

/// Solves the matching problem; the shared core of `match`.
pub fn match_shapes(contour: &Contour, mesh: &TriMesh, cfg: &Config) -> Result<MatchDocument, CliError> {
    let components = mesh.component_count();
    if components > 1 {
        return Err(GeometryError::DisconnectedMesh { components }.into());
    }
    let prep = prepare(contour, mesh, &prepare_options(cfg))?;
    let g = LayeredGraph::new(&prep.contour, &prep.mesh, cfg.prune);
    let (path, stats) = match cfg.mode {
        Mode::Cyclic => {
            let (p, s) = solve_cyclic(&g, &prep.model, SolveOptions { warm_start: cfg.warm_start })?;
            (p, Some(s))
        }
        Mode::Open => (solve_open(&g, &prep.model)?, None),
    };
    log::info!("matched {} steps, energy {}", path.steps.len(), path.total_energy);
    Ok(MatchDocument::from_path(&g, &path, cfg.mode, stats.as_ref()))
}

fn cmd_match(a: &MatchArgs, cfg: &Config) -> Result<(), CliError> {
    let t0 = Instant::now();
    let contour = load_match_contour(&a.contour, a.resample)?;
    let mesh = read_mesh(&a.mesh)?;
    let mut doc = match_shapes(&contour, &mesh, cfg)?;
    if a.timing {
        doc.timing = Some(output::Timing { wall_seconds: t0.elapsed().as_secs_f64() });
    }
    write_output(a.out.as_deref(), &doc.to_json())
}

fn cmd_eval(a: &EvalArgs) -> Result<(), CliError> {
    if a.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let doc = parse_match_json(&read_text(&a.matching)?).map_err(|e| CliError::Input(e.to_string()))?;
    let gt = GroundTruth::from_json(&read_text(&a.gt)?)?;
    let mesh = read_mesh(&a.mesh)?;
    if doc.mesh_vertices != mesh.vertex_count() {
        return Err(CliError::Input(format!(
            "matching refers to {} mesh vertices, mesh has {}",
            doc.mesh_vertices,
            mesh.vertex_count()
        )));
    }
    gt.validate(doc.contour_vertices, mesh.vertex_count())?;
    let report = evaluate_matches(&doc.vertex_match_pairs(), &gt, &mesh, &uniform_grid(a.samples))?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;
    if let Some(c) = &report.geodesic {
        let p = a.out_dir.join("geodesic_curve.csv");
        std::fs::write(&p, c.to_csv()).map_err(|e| io_err(&p, e))?;
    }
    if let Some(c) = &report.segmentation {
        let p = a.out_dir.join("segmentation_curve.csv");
        std::fs::write(&p, c.to_csv()).map_err(|e| io_err(&p, e))?;
    }
    let summary = output::EvalDocument::new(&report);
    let p = a.out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("plain data serializes") + "\n";
    std::fs::write(&p, text).map_err(|e| io_err(&p, e))
}

fn cmd_thickness(a: &ThicknessArgs) -> Result<(), CliError> {
    let field = match (&a.contour, &a.mesh) {
        (Some(c), None) => thickness_2d(&read_contour(c)?),
        (None, Some(m)) => {
            let opts = ThicknessOptions { accelerate: !a.brute_force, ..ThicknessOptions::default() };
            thickness_3d(&read_mesh(m)?, opts)
        }
        _ => return Err(CliError::Usage("give exactly one of --contour and --mesh".into())),
    };
    write_output(a.out.as_deref(), &field.to_csv())
}

fn cmd_transfer(a: &TransferArgs, cfg: &Config) -> Result<(), CliError> {
    let rest = read_contour(&a.rest)?;
    let deformed = read_contour(&a.deformed)?;
    let mesh = read_mesh(&a.mesh)?;
    let doc = parse_match_json(&read_text(&a.matching)?).map_err(|e| CliError::Input(e.to_string()))?;
    if doc.contour_vertices != rest.len() || doc.mesh_vertices != mesh.vertex_count() {
        return Err(CliError::Input("matching does not refer to these shapes".into()));
    }
    let inp = DeformationInput {
        rest: &rest,
        deformed: &deformed,
        mesh: &mesh,
        matches: doc.vertex_match_pairs(),
        anchor_count: cfg.anchor_count,
        with_scale: a.scale,
        arap: ArapOptions::default(),
    };
    let res = transfer_deformation(&inp)?;
    log::info!("ARAP converged after {} iterations", res.iterations);
    save_mesh(&a.out, &res.mesh)?;
    Ok(())
}

fn cmd_info(a: &InfoArgs, cfg: &Config) -> Result<(), CliError> {
    let contour = read_contour(&a.contour)?;
    let mesh = read_mesh(&a.mesh)?;
    let g = LayeredGraph::new(&contour, &mesh, cfg.prune);
    let doc = output::InfoDocument::new(g.info());
    write_output(a.out.as_deref(), &(serde_json::to_string_pretty(&doc).expect("plain data serializes") + "\n"))
}

fn cmd_bench(a: &BenchArgs, cfg: &Config) -> Result<(), CliError> {
    if a.sizes.iter().any(|&m| m < 3) {
        return Err(CliError::Usage("contour sizes must be at least 3".into()));
    }
    let opts = bench::BenchOptions {
        sizes: a.sizes.clone(),
        seed: cfg.seed,
        repeats: a.repeats,
        cyclic: !a.no_cyclic,
        prepare: prepare_options(cfg),
        prune: cfg.prune,
    };
    let mut text = String::from(bench::CSV_HEADER);
    text.push('\n');
    bench::run_bench(&opts, |_| {})
        .map_err(|e| match e {
            bench::BenchError::Prepare(p) => CliError::from(p),
            bench::BenchError::Solver(s) => CliError::from(s),
        })?
        .iter()
        .for_each(|r| {
            text.push_str(&bench::csv_row(r));
            text.push('\n');
        });
    write_output(a.out.as_deref(), &text)
}
