//! JSON documents written and read by the command-line tool. Every
//! document carries `"schema": "v1"`.

use serde::{Deserialize, Serialize};

use super::config::Mode;
use crate::graph::{ContourStep, GraphInfo, LayeredGraph, MeshStep};
use crate::solver::{BranchStats, MatchPath};

pub const SCHEMA: &str = "v1";

fn schema() -> String {
    SCHEMA.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Correspondence {
    pub contour_edge: [usize; 2],
    pub mesh_edge: [usize; 2],
    /// Cost of the conjugate edge entering this step. On cyclic paths the
    /// first step carries the closing edge.
    pub d_data: f64,
    pub d_reg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counters {
    pub branches_processed: usize,
    pub dijkstra_runs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchDocument {
    pub schema: String,
    pub mode: Mode,
    pub contour_vertices: usize,
    pub mesh_vertices: usize,
    pub total_energy: f64,
    pub correspondences: Vec<Correspondence>,
    /// `[contour vertex, mesh vertex]` pairs.
    pub vertex_matches: Vec<[usize; 2]>,
    pub counters: Counters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema '{0}'")]
    Schema(String),
    #[error("inconsistent document: {0}")]
    Invalid(String),
}

impl MatchDocument {
    pub fn from_path(g: &LayeredGraph, path: &MatchPath, mode: Mode, stats: Option<&BranchStats>) -> Self {
        let mesh = g.mesh();
        let steps = path.correspondences();
        let contour_n = g.contour_vertex_count();
        let correspondences = steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let contour_edge = match s.vertex.product.contour {
                    ContourStep::Edge(e) => [e % contour_n, (e + 1) % contour_n],
                    ContourStep::Stay(i) => [i, i],
                };
                let mesh_edge = match s.vertex.product.mesh {
                    MeshStep::Edge(d) => {
                        let (a, b) = mesh.edge(d);
                        [a, b]
                    }
                    MeshStep::Stay(j) => [j, j],
                };
                let cost = if k == 0 && path.cyclic { path.steps.last().unwrap_or(s) } else { s };
                Correspondence { contour_edge, mesh_edge, d_data: cost.d_data, d_reg: cost.d_reg }
            })
            .collect();
        MatchDocument {
            schema: schema(),
            mode,
            contour_vertices: contour_n,
            mesh_vertices: mesh.vertex_count(),
            total_energy: path.total_energy,
            correspondences,
            vertex_matches: path.vertex_matches(g).into_iter().map(|(i, j)| [i, j]).collect(),
            counters: stats
                .map(|s| Counters { branches_processed: s.branches_processed, dijkstra_runs: s.dijkstra_runs })
                .unwrap_or(Counters { branches_processed: 0, dijkstra_runs: 1 }),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn vertex_match_pairs(&self) -> Vec<(usize, usize)> {
        self.vertex_matches.iter().map(|m| (m[0], m[1])).collect()
    }
}

/// Parses and checks a matching document.
pub fn parse_match_json(text: &str) -> Result<MatchDocument, DocumentError> {
    let doc: MatchDocument = serde_json::from_str(text)?;
    if doc.schema != SCHEMA {
        return Err(DocumentError::Schema(doc.schema));
    }
    for c in &doc.correspondences {
        if c.contour_edge.iter().any(|&i| i >= doc.contour_vertices)
            || c.mesh_edge.iter().any(|&j| j >= doc.mesh_vertices)
        {
            return Err(DocumentError::Invalid("correspondence index out of range".into()));
        }
    }
    for m in &doc.vertex_matches {
        if m[0] >= doc.contour_vertices || m[1] >= doc.mesh_vertices {
            return Err(DocumentError::Invalid(format!("vertex match {m:?} out of range")));
        }
    }
    if !doc.total_energy.is_finite() {
        return Err(DocumentError::Invalid("total energy is not finite".into()));
    }
    Ok(doc)
}

#[derive(Debug, Clone, Serialize)]
pub struct InfoDocument {
    pub schema: String,
    #[serde(flatten)]
    pub info: GraphInfo,
}

impl InfoDocument {
    pub fn new(info: GraphInfo) -> Self {
        InfoDocument { schema: schema(), info }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSummary {
    pub auc: f64,
    pub samples: usize,
    pub mean_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalDocument {
    pub schema: String,
    pub diameter: f64,
    pub diameter_exact: bool,
    pub geodesic: Option<CurveSummary>,
    pub segmentation: Option<CurveSummary>,
    pub segmentation_permutation: Option<usize>,
}

impl EvalDocument {
    pub fn new(r: &crate::evaluation::EvalReport) -> Self {
        let summary = |c: &crate::evaluation::ErrorCurve| CurveSummary {
            auc: c.auc,
            samples: c.errors.len(),
            mean_error: if c.errors.is_empty() { 0.0 } else { c.errors.iter().sum::<f64>() / c.errors.len() as f64 },
        };
        EvalDocument {
            schema: schema(),
            diameter: r.diameter,
            diameter_exact: r.diameter_exact,
            geodesic: r.geodesic.as_ref().map(summary),
            segmentation: r.segmentation.as_ref().map(summary),
            segmentation_permutation: r.segmentation_permutation,
        }
    }
}
