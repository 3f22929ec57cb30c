//! Globally optimal paths through the layered conjugate product graph.

mod bnb;
mod dijkstra;

pub use bnb::{solve_cyclic, voronoi_split, BranchStats, SolveOptions};
pub use dijkstra::{layered_dijkstra, DijkstraRun, Targets};

use serde::Serialize;

use crate::energy::EnergyModel;
use crate::graph::{ConjugateVertex, ContourStep, LayeredGraph, MeshStep, VertexKind};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("no path: {0}")]
    NoPath(String),
    #[error("vertex {0} is not in the first layer")]
    InvalidSource(usize),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("graph too large ({0} vertices)")]
    TooLarge(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// One step of a matching: the product edge taken and the cost of the
/// conjugate edge that led into it (zero for the first step).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchStep {
    pub id: usize,
    pub vertex: ConjugateVertex,
    pub d_data: f64,
    pub d_reg: f64,
}

/// A path through the conjugate product graph. For cyclic paths the last
/// step repeats the first one in the closing layer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchPath {
    pub steps: Vec<MatchStep>,
    pub total_energy: f64,
    pub cyclic: bool,
}

impl MatchPath {
    pub(crate) fn from_ids(g: &LayeredGraph, model: &EnergyModel, ids: &[usize], total: f64, cyclic: bool) -> Self {
        let steps = ids
            .iter()
            .enumerate()
            .map(|(k, &id)| {
                let (d_data, d_reg) = if k == 0 { (0.0, 0.0) } else { model.terms_ids(g, ids[k - 1], id) };
                MatchStep { id, vertex: g.vertex(id), d_data, d_reg }
            })
            .collect();
        MatchPath { steps, total_energy: total, cyclic }
    }

    pub fn ids(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.id).collect()
    }

    /// Energy summed along the path in order.
    pub fn recomputed_energy(&self, g: &LayeredGraph, model: &EnergyModel) -> f64 {
        self.steps.windows(2).fold(0.0, |acc, w| acc + model.cost_ids(g, w[0].id, w[1].id))
    }

    /// Product edges, without the closing repeat of a cyclic path.
    pub fn correspondences(&self) -> &[MatchStep] {
        if self.cyclic && self.steps.len() > 1 {
            &self.steps[..self.steps.len() - 1]
        } else {
            &self.steps
        }
    }

    /// Mesh vertex assigned to each contour vertex: the mesh vertex at which
    /// the path arrives at that contour vertex (before any mesh motion while
    /// the contour waits). Contour vertex 0 of an open path takes the start
    /// of the first step.
    pub fn vertex_matches(&self, g: &LayeredGraph) -> Vec<(usize, usize)> {
        let mesh = g.mesh();
        let start = |v: &ConjugateVertex| match v.product.mesh {
            MeshStep::Edge(d) => mesh.edge(d).0,
            MeshStep::Stay(j) => j,
        };
        let end = |v: &ConjugateVertex| match v.product.mesh {
            MeshStep::Edge(d) => mesh.edge(d).1,
            MeshStep::Stay(j) => j,
        };
        let m = g.contour_vertex_count();
        let mut out = vec![None; m];
        if let Some(first) = self.steps.first() {
            if !self.cyclic {
                out[0] = Some(start(&first.vertex));
            }
        }
        for s in &self.steps {
            if let ContourStep::Edge(k) = s.vertex.product.contour {
                if g.is_virtual(s.id) {
                    continue;
                }
                let i = (k + 1) % m;
                if out[i].is_none() {
                    out[i] = Some(end(&s.vertex));
                }
            }
        }
        out.into_iter().enumerate().filter_map(|(i, j)| j.map(|j| (i, j))).collect()
    }

    /// Checks adjacency, layer coverage, closure and the stored energy.
    pub fn validate(&self, g: &LayeredGraph, model: &EnergyModel) -> Result<(), SolverError> {
        let ids = self.ids();
        let Some(&first) = ids.first() else {
            return Err(SolverError::InvalidPath("empty path".into()));
        };
        if !g.first_layer_ids().contains(&first) {
            return Err(SolverError::InvalidPath("path does not start in the first layer".into()));
        }
        let mut advances = 0;
        for w in ids.windows(2) {
            let mut found = None;
            g.for_each_out(w[0], |h, adv| {
                if h == w[1] {
                    found = Some(adv);
                }
            });
            match found {
                Some(adv) => advances += usize::from(adv),
                None => return Err(SolverError::InvalidPath(format!("{} -> {} is not an edge", w[0], w[1]))),
            }
        }
        let last = *ids.last().unwrap();
        if self.cyclic {
            if advances != g.layer_count() || last != g.duplicate(first) {
                return Err(SolverError::InvalidPath("path is not closed".into()));
            }
        } else {
            let want = if g.is_closed() { g.layer_count() } else { g.layer_count() - 1 };
            if advances != want {
                return Err(SolverError::InvalidPath(format!("path crosses {advances} layers, expected {want}")));
            }
        }
        let e = self.recomputed_energy(g, model);
        if !((e - self.total_energy).abs() <= 1e-9 * (1.0 + e.abs())) {
            return Err(SolverError::InvalidPath(format!("energy {} != recomputed {e}", self.total_energy)));
        }
        Ok(())
    }
}

/// Minimum-energy path from any first-layer vertex to any final-layer
/// vertex, without the cyclic constraint.
pub fn solve_open(g: &LayeredGraph, model: &EnergyModel) -> Result<MatchPath, SolverError> {
    let sources: Vec<usize> = g.first_layer_ids().collect();
    if sources.is_empty() {
        return Err(SolverError::NoPath("empty first layer".into()));
    }
    let run = layered_dijkstra(g, model, &sources, Targets::FinalLayer, None)?;
    let (t, d) = run.best_target().expect("checked by layered_dijkstra");
    let ids = run.path_to(t);
    Ok(MatchPath::from_ids(g, model, &ids, d, false))
}

/// Mesh vertices touched by a first-layer vertex.
pub(crate) fn seed_vertices(g: &LayeredGraph, id: usize) -> Vec<usize> {
    let e = g.frame_edge(id);
    let (a, b) = g.mesh().edge(e);
    match g.kind(id) {
        VertexKind::MeshStay => vec![b],
        _ => vec![a, b],
    }
}

#[cfg(test)]
mod tests;
