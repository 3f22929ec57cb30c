//! Second-order matching cost: thickness agreement at the shared vertices
//! plus the change of frame rotation between consecutive product edges.

mod frames;
mod loss;

pub use frames::{frame_rotation, FrameRotation, LocalFrame};
pub use loss::{robust_loss, Bowl, RobustLossParams};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Contour, TriMesh};
use crate::graph::{ConjugateEdge, ConjugateVertex, ContourStep, LayeredGraph, MeshStep};

#[derive(Debug, thiserror::Error)]
pub enum EnergyError {
    #[error("loss argument must be nonnegative, got {0}")]
    Domain(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("no rotation available: {0}")]
    MissingRotation(String),
}

/// The two robust losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyParams {
    pub psi1: RobustLossParams,
    pub psi2: RobustLossParams,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams { psi1: RobustLossParams::psi1_default(), psi2: RobustLossParams::psi2_default() }
    }
}

/// Cost tables for one contour/mesh pair.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    contour_vertices: usize,
    contour_edges: usize,
    mesh_vertices: usize,
    directed_edges: usize,
    mesh_heads: Vec<usize>,
    thickness_2d: Vec<f64>,
    thickness_3d: Vec<f64>,
    params: EnergyParams,
    /// `contour_edges x directed_edges`
    rotations: Vec<FrameRotation>,
    /// `contour_vertices x mesh_vertices`, psi1 already applied
    data: Vec<f64>,
}

impl EnergyModel {
    pub fn new(
        contour: &Contour,
        mesh: &TriMesh,
        thickness_2d: &[f64],
        thickness_3d: &[f64],
        params: EnergyParams,
    ) -> Result<Self, EnergyError> {
        params.psi1.validate()?;
        params.psi2.validate()?;
        if thickness_2d.len() != contour.len() || thickness_3d.len() != mesh.vertex_count() {
            return Err(EnergyError::InvalidParams("thickness fields do not match the shapes".into()));
        }
        if let Some(x) = thickness_2d.iter().chain(thickness_3d).find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(EnergyError::Domain(*x));
        }
        let d = mesh.directed_edge_count();
        let mesh_frames = (0..d).map(|e| LocalFrame::mesh_edge(mesh, e)).collect::<Result<Vec<_>, _>>()?;
        let contour_frames =
            (0..contour.edge_count()).map(|k| LocalFrame::contour_edge(contour, k)).collect::<Result<Vec<_>, _>>()?;
        let rotations = contour_frames
            .par_iter()
            .flat_map_iter(|f2| mesh_frames.iter().map(move |f3| frame_rotation(f2, f3)))
            .collect();
        let nv = mesh.vertex_count();
        let psi1 = params.psi1;
        let data =
            thickness_2d.iter().flat_map(|&a| thickness_3d.iter().map(move |&b| psi1.eval((a - b).abs()))).collect();
        Ok(EnergyModel {
            contour_vertices: contour.len(),
            contour_edges: contour.edge_count(),
            mesh_vertices: nv,
            directed_edges: d,
            mesh_heads: (0..d).map(|e| mesh.edge(e).1).collect(),
            thickness_2d: thickness_2d.to_vec(),
            thickness_3d: thickness_3d.to_vec(),
            params,
            rotations,
            data,
        })
    }

    pub fn params(&self) -> EnergyParams {
        self.params
    }

    pub fn thickness_2d(&self) -> &[f64] {
        &self.thickness_2d
    }

    pub fn thickness_3d(&self) -> &[f64] {
        &self.thickness_3d
    }

    /// Cached rotation of contour edge `k` onto directed mesh edge `e`.
    pub fn rotation(&self, k: usize, e: usize) -> &FrameRotation {
        &self.rotations[k * self.directed_edges + e]
    }

    /// psi1 of the thickness difference between contour vertex `i` and mesh
    /// vertex `j`.
    #[inline]
    pub fn data_term(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.mesh_vertices + j]
    }

    /// psi2 of the rotation change between two (contour edge, mesh edge)
    /// frames.
    #[inline]
    pub fn reg_term(&self, k1: usize, e1: usize, k2: usize, e2: usize) -> f64 {
        self.params.psi2.eval(self.rotation(k1, e1).distance(self.rotation(k2, e2)))
    }

    /// Cost of the conjugate edge `tail -> head` given by graph ids; returns
    /// `(d_data, d_reg)`.
    #[inline]
    pub fn terms_ids(&self, g: &LayeredGraph, tail: usize, head: usize) -> (f64, f64) {
        let (k1, e1) = (g.contour_edge(tail), g.frame_edge(tail));
        let (k2, e2) = (g.contour_edge(head), g.frame_edge(head));
        let i = (k1 + 1) % self.contour_vertices;
        let j = self.mesh_heads[e1];
        (self.data_term(i, j), self.reg_term(k1, e1, k2, e2))
    }

    #[inline]
    pub fn cost_ids(&self, g: &LayeredGraph, tail: usize, head: usize) -> f64 {
        let (a, b) = self.terms_ids(g, tail, head);
        a + b
    }

    fn frame_of(&self, v: &ConjugateVertex) -> Result<(usize, usize), EnergyError> {
        let k = match v.product.contour {
            ContourStep::Edge(k) => k,
            ContourStep::Stay(i) => {
                let prev = (i + self.contour_vertices - 1) % self.contour_vertices;
                if prev >= self.contour_edges {
                    return Err(EnergyError::MissingRotation(format!("no contour edge enters vertex {i}")));
                }
                prev
            }
        };
        let e = match (v.product.mesh, v.ref_edge) {
            (MeshStep::Edge(d), _) => d,
            (MeshStep::Stay(_), Some(t)) => t,
            (MeshStep::Stay(j), None) => {
                return Err(EnergyError::MissingRotation(format!("mesh pause at {j} carries no reference edge")))
            }
        };
        if k >= self.contour_edges || e >= self.directed_edges {
            return Err(EnergyError::MissingRotation(format!("edge pair ({k}, {e}) out of range")));
        }
        Ok((k, e))
    }

    fn shared_vertices(&self, tail: &ConjugateVertex) -> Result<(usize, usize), EnergyError> {
        let i = match tail.product.contour {
            ContourStep::Edge(k) => (k + 1) % self.contour_vertices,
            ContourStep::Stay(i) => i,
        };
        let j = match tail.product.mesh {
            MeshStep::Edge(d) => *self
                .mesh_heads
                .get(d)
                .ok_or_else(|| EnergyError::MissingRotation(format!("mesh edge {d} out of range")))?,
            MeshStep::Stay(j) => j,
        };
        if i >= self.contour_vertices || j >= self.mesh_vertices {
            return Err(EnergyError::InvalidParams("vertex out of range".into()));
        }
        Ok((i, j))
    }

    /// Thickness term at the vertices shared by the two product edges.
    pub fn d_data(&self, e: &ConjugateEdge) -> Result<f64, EnergyError> {
        let (i, j) = self.shared_vertices(&e.tail)?;
        Ok(self.data_term(i, j))
    }

    /// Rigidity term between the two product edges' frame rotations.
    pub fn d_reg(&self, e: &ConjugateEdge) -> Result<f64, EnergyError> {
        let (k1, e1) = self.frame_of(&e.tail)?;
        let (k2, e2) = self.frame_of(&e.head)?;
        Ok(self.reg_term(k1, e1, k2, e2))
    }

    pub fn edge_cost(&self, e: &ConjugateEdge) -> Result<f64, EnergyError> {
        Ok(self.d_data(e)? + self.d_reg(e)?)
    }
}
