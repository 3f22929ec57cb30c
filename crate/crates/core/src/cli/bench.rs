//! Runtime scaling harness: a fixed 500-vertex torus against contours
//! subsampled from one seeded random shape.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Contour, TriMesh, Vec2};
use crate::graph::{LayeredGraph, PruneOptions};
use crate::pipeline::{prepare, PrepareError, PrepareOptions};
use crate::shapes;
use crate::solver::{layered_dijkstra, solve_cyclic, SolveOptions, SolverError, Targets};

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub seed: u64,
    /// Dijkstra timings keep the fastest of this many runs.
    pub repeats: usize,
    /// Also run the full branch-and-bound solve.
    pub cyclic: bool,
    pub prepare: PrepareOptions,
    pub prune: PruneOptions,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            sizes: vec![25, 50, 100],
            seed: 0,
            repeats: 3,
            cyclic: true,
            prepare: PrepareOptions::default(),
            prune: PruneOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub contour_vertices: usize,
    pub product_vertices: usize,
    pub dijkstra_seconds: f64,
    pub cyclic_seconds: Option<f64>,
    pub branches: Option<usize>,
    pub dijkstra_runs: Option<usize>,
    pub energy: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Prepare(#[from] PrepareError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// 25 x 20 torus, 500 vertices.
pub fn bench_mesh() -> TriMesh {
    shapes::torus(1.0, 0.4, 25, 20)
}

/// Smooth star-shaped curve with a few seeded low-frequency harmonics,
/// sampled densely.
pub fn bench_shape(seed: u64) -> Contour {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let harmonics: Vec<(f64, f64)> =
        (2..=4).map(|_| (rng.random_range(-0.12..0.12), rng.random_range(0.0..std::f64::consts::TAU))).collect();
    let n = 720;
    let pts = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            let r = 1.0
                + harmonics.iter().enumerate().map(|(h, &(a, ph))| a * ((h + 2) as f64 * t + ph).cos()).sum::<f64>();
            Vec2::new(1.6 * r * t.cos(), r * t.sin())
        })
        .collect();
    Contour::new(pts, true).expect("smooth star-shaped curve")
}

/// `m` points at equal arc length along `base`.
pub fn subsample(base: &Contour, m: usize) -> Contour {
    let len = base.perimeter();
    let pts = (0..m).map(|k| base.point_at_arc_length(len * k as f64 / m as f64)).collect();
    Contour::new(pts, true).expect("subsample of a simple curve")
}

pub fn run_bench(opts: &BenchOptions, mut on_row: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>, BenchError> {
    let mesh = bench_mesh();
    let base = bench_shape(opts.seed);
    let mut rows = Vec::new();
    for &m in &opts.sizes {
        let contour = subsample(&base, m);
        let prep = prepare(&contour, &mesh, &opts.prepare)?;
        let g = LayeredGraph::new(&prep.contour, &prep.mesh, opts.prune);
        let sources: Vec<usize> = g.first_layer_ids().collect();
        let mut dijkstra_seconds = f64::INFINITY;
        for _ in 0..opts.repeats.max(1) {
            let t0 = Instant::now();
            layered_dijkstra(&g, &prep.model, &sources, Targets::Duplicates, None)?;
            dijkstra_seconds = dijkstra_seconds.min(t0.elapsed().as_secs_f64());
        }
        let mut row = BenchRow {
            contour_vertices: m,
            product_vertices: m * mesh.vertex_count(),
            dijkstra_seconds,
            cyclic_seconds: None,
            branches: None,
            dijkstra_runs: None,
            energy: None,
        };
        if opts.cyclic {
            let t0 = Instant::now();
            let (path, stats) = solve_cyclic(&g, &prep.model, SolveOptions::default())?;
            row.cyclic_seconds = Some(t0.elapsed().as_secs_f64());
            row.branches = Some(stats.branches_processed);
            row.dijkstra_runs = Some(stats.dijkstra_runs);
            row.energy = Some(path.total_energy);
        }
        log::info!("bench m={m}: dijkstra {:.3}s", row.dijkstra_seconds);
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

pub const CSV_HEADER: &str =
    "contour_vertices,product_vertices,dijkstra_seconds,cyclic_seconds,branches,dijkstra_runs,energy";

pub fn csv_row(r: &BenchRow) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{}",
        r.contour_vertices,
        r.product_vertices,
        r.dijkstra_seconds,
        opt(r.cyclic_seconds.map(|v| v.to_string())),
        opt(r.branches.map(|v| v.to_string())),
        opt(r.dijkstra_runs.map(|v| v.to_string())),
        opt(r.energy.map(|v| v.to_string())),
    )
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
