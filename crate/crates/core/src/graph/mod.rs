//! Implicit layered conjugate product graph.
//!
//! A vertex of the conjugate graph is a product edge: a contour edge (or a
//! contour vertex held fixed) paired with a directed mesh edge (or a mesh
//! vertex held fixed). Layer `k` holds every product edge whose contour part
//! is the edge `(k, k+1)`, plus the product edges `((k+1, k+1), d)` that
//! move on the mesh while the contour waits at vertex `k + 1`.
//!
//! Inside a layer the local index is laid out as
//!
//! | range       | contour        | mesh                                  |
//! |-------------|----------------|---------------------------------------|
//! | `[0, D)`    | `(k, k+1)`     | directed edge `d`                     |
//! | `[D, 2D)`   | `(k, k+1)`     | `(j, j)` tagged with incoming edge `t` |
//! | `[2D, 3D)`  | `(k+1, k+1)`   | directed edge `d`                     |
//!
//! where `D` is the number of directed mesh edges. For closed contours a
//! virtual layer `L` (the number of contour edges) repeats the first
//! `2D` entries of layer 0, so cyclic paths become paths from layer 0 to
//! layer `L`.

use serde::Serialize;

use crate::geometry::{Contour, TriMesh};

/// Contour half of a product edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ContourStep {
    /// Edge `(k, k+1)` (indices modulo the vertex count when closed).
    Edge(usize),
    /// Degenerate edge `(i, i)`.
    Stay(usize),
}

/// Mesh half of a product edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MeshStep {
    /// Directed mesh edge id.
    Edge(usize),
    /// Degenerate edge `(j, j)`.
    Stay(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ProductEdge {
    pub contour: ContourStep,
    pub mesh: MeshStep,
}

impl ProductEdge {
    pub fn is_valid(&self) -> bool {
        !matches!((self.contour, self.mesh), (ContourStep::Stay(_), MeshStep::Stay(_)))
    }
}

/// A product edge, plus the incoming mesh edge when the mesh part is
/// degenerate (needed to orient the frame at a mesh pause).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ConjugateVertex {
    pub product: ProductEdge,
    pub ref_edge: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ConjugateEdge {
    pub tail: ConjugateVertex,
    pub head: ConjugateVertex,
    /// 1 when the head's contour part is a proper edge.
    pub layer_advance: u8,
}

/// Which tags a mesh pause receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefTagPolicy {
    /// The mesh edge of the preceding vertex.
    #[default]
    Previous,
    /// Every directed edge entering the paused vertex.
    AllIncoming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PruneOptions {
    /// Drop steps whose mesh edge reverses the previous mesh edge.
    pub turning_points: bool,
    /// Drop a contour pause directly followed by a mesh pause, and the
    /// reverse.
    pub degenerate_pairs: bool,
    pub ref_tags: RefTagPolicy,
}

impl Default for PruneOptions {
    fn default() -> Self {
        PruneOptions { turning_points: true, degenerate_pairs: true, ref_tags: RefTagPolicy::Previous }
    }
}

/// Kind of a vertex, from its local index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    /// Both shapes advance.
    Proper,
    /// The mesh pauses.
    MeshStay,
    /// The contour pauses.
    ContourStay,
}

/// Implicit conjugate product graph over a contour and a mesh.
#[derive(Debug, Clone)]
pub struct LayeredGraph<'a> {
    mesh: &'a TriMesh,
    contour_vertices: usize,
    layers: usize,
    closed: bool,
    d: usize,
    prune: PruneOptions,
}

impl<'a> LayeredGraph<'a> {
    pub fn new(contour: &Contour, mesh: &'a TriMesh, prune: PruneOptions) -> Self {
        LayeredGraph {
            mesh,
            contour_vertices: contour.len(),
            layers: contour.edge_count(),
            closed: contour.is_closed(),
            d: mesh.directed_edge_count(),
            prune,
        }
    }

    pub fn mesh(&self) -> &'a TriMesh {
        self.mesh
    }

    pub fn prune(&self) -> PruneOptions {
        self.prune
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Number of real layers (contour edges).
    pub fn layer_count(&self) -> usize {
        self.layers
    }

    pub fn contour_vertex_count(&self) -> usize {
        self.contour_vertices
    }

    pub fn directed_mesh_edges(&self) -> usize {
        self.d
    }

    /// Ids per layer.
    pub fn stride(&self) -> usize {
        3 * self.d
    }

    /// Size of the id space including the virtual closing layer.
    pub fn id_bound(&self) -> usize {
        if self.closed {
            self.layers * self.stride() + 2 * self.d
        } else {
            self.layers * self.stride()
        }
    }

    pub fn layer_of(&self, id: usize) -> usize {
        id / self.stride()
    }

    pub fn local(&self, id: usize) -> usize {
        id % self.stride()
    }

    pub fn kind(&self, id: usize) -> VertexKind {
        let l = self.local(id);
        if l < self.d {
            VertexKind::Proper
        } else if l < 2 * self.d {
            VertexKind::MeshStay
        } else {
            VertexKind::ContourStay
        }
    }

    /// Contour edge used for the vertex's frame. Contour pauses reuse the
    /// edge that led into the paused vertex, which is the layer's own edge.
    pub fn contour_edge(&self, id: usize) -> usize {
        self.layer_of(id) % self.layers
    }

    /// Mesh edge used for the vertex's frame: the edge itself, or the tag of
    /// a mesh pause.
    pub fn frame_edge(&self, id: usize) -> usize {
        self.local(id) % self.d
    }

    /// Mesh vertex where the vertex's product edge ends.
    pub fn end_mesh_vertex(&self, id: usize) -> usize {
        self.mesh.edge(self.frame_edge(id)).1
    }

    /// Contour vertex where the vertex's product edge ends.
    pub fn end_contour_vertex(&self, id: usize) -> usize {
        (self.contour_edge(id) + 1) % self.contour_vertices
    }

    /// Id of a first-layer vertex in the virtual closing layer.
    pub fn duplicate(&self, first_layer_id: usize) -> usize {
        debug_assert!(self.closed && first_layer_id < 2 * self.d);
        self.layers * self.stride() + first_layer_id
    }

    pub fn is_virtual(&self, id: usize) -> bool {
        self.layer_of(id) == self.layers
    }

    /// The conjugate vertex behind an id.
    pub fn vertex(&self, id: usize) -> ConjugateVertex {
        let layer = self.contour_edge(id);
        let e = self.frame_edge(id);
        let (contour, mesh, ref_edge) = match self.kind(id) {
            VertexKind::Proper => (ContourStep::Edge(layer), MeshStep::Edge(e), None),
            VertexKind::MeshStay => (ContourStep::Edge(layer), MeshStep::Stay(self.mesh.edge(e).1), Some(e)),
            VertexKind::ContourStay => {
                (ContourStep::Stay((layer + 1) % self.contour_vertices), MeshStep::Edge(e), None)
            }
        };
        ConjugateVertex { product: ProductEdge { contour, mesh }, ref_edge }
    }

    /// Inverse of [`LayeredGraph::vertex`] on real layers.
    pub fn id_of(&self, v: &ConjugateVertex) -> Option<usize> {
        let s = self.stride();
        let check_edge = |d: usize| (d < self.d).then_some(d);
        match (v.product.contour, v.product.mesh, v.ref_edge) {
            (ContourStep::Edge(k), MeshStep::Edge(d), None) if k < self.layers => Some(k * s + check_edge(d)?),
            (ContourStep::Edge(k), MeshStep::Stay(j), Some(t)) if k < self.layers => {
                let t = check_edge(t)?;
                (self.mesh.edge(t).1 == j).then_some(k * s + self.d + t)
            }
            (ContourStep::Stay(i), MeshStep::Edge(d), None) if i < self.contour_vertices => {
                let layer = (i + self.contour_vertices - 1) % self.contour_vertices;
                (layer < self.layers).then_some(layer * s + 2 * self.d + check_edge(d)?)
            }
            _ => None,
        }
    }

    /// Calls `f(head, layer_advance)` for every out-neighbour of `id`.
    #[inline]
    pub fn for_each_out(&self, id: usize, mut f: impl FnMut(usize, bool)) {
        let layer = self.layer_of(id);
        if layer >= self.layers {
            return;
        }
        let s = self.stride();
        let d = self.d;
        let kind = self.kind(id);
        let e = self.frame_edge(id);
        let jm = self.mesh.edge(e).1;
        let reverse = if self.prune.turning_points && kind != VertexKind::MeshStay {
            Some(TriMesh::reverse_edge(e))
        } else {
            None
        };
        let next = layer + 1;
        if next < self.layers || (next == self.layers && self.closed) {
            let base = next * s;
            for &dn in self.mesh.out_edges(jm) {
                if Some(dn) != reverse {
                    f(base + dn, true);
                }
            }
            if !(self.prune.degenerate_pairs && kind == VertexKind::ContourStay) {
                match self.prune.ref_tags {
                    RefTagPolicy::Previous => f(base + d + e, true),
                    RefTagPolicy::AllIncoming => {
                        for &t in self.mesh.in_edges(jm) {
                            f(base + d + t, true);
                        }
                    }
                }
            }
        }
        if !(self.prune.degenerate_pairs && kind == VertexKind::MeshStay) {
            let base = layer * s + 2 * d;
            for &dn in self.mesh.out_edges(jm) {
                if Some(dn) != reverse {
                    f(base + dn, false);
                }
            }
        }
    }

    /// Out-neighbours as ids.
    pub fn out_ids(&self, id: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        self.for_each_out(id, |h, adv| out.push((h, adv)));
        out
    }

    /// Out-going conjugate edges of a vertex.
    pub fn out_neighbors(&self, v: &ConjugateVertex) -> Vec<ConjugateEdge> {
        let Some(id) = self.id_of(v) else { return Vec::new() };
        self.out_ids(id)
            .into_iter()
            .map(|(h, adv)| ConjugateEdge { tail: *v, head: self.vertex(h), layer_advance: u8::from(adv) })
            .collect()
    }

    /// Product edges leaving contour vertex 0 along the first contour edge:
    /// every directed mesh edge and every mesh vertex, `2|E| + |V|` in total.
    pub fn first_layer_vertices(&self) -> Vec<ProductEdge> {
        if self.layers == 0 {
            return Vec::new();
        }
        let mut out: Vec<ProductEdge> =
            (0..self.d).map(|e| ProductEdge { contour: ContourStep::Edge(0), mesh: MeshStep::Edge(e) }).collect();
        out.extend(
            (0..self.mesh.vertex_count())
                .map(|j| ProductEdge { contour: ContourStep::Edge(0), mesh: MeshStep::Stay(j) }),
        );
        out
    }

    /// First-layer ids, with one mesh pause per incoming tag.
    pub fn first_layer_ids(&self) -> std::ops::Range<usize> {
        if self.layers == 0 {
            0..0
        } else {
            0..2 * self.d
        }
    }

    /// Size figures of the product graph and its conjugate.
    pub fn info(&self) -> GraphInfo {
        let vm = self.contour_vertices;
        let vn = self.mesh.vertex_count();
        let en = self.mesh.undirected_edge_count();
        let per_layer_proper = self.d;
        let per_layer_stays = (0..vn).filter(|&j| !self.mesh.in_edges(j).is_empty()).count();
        let mut edges = 0usize;
        let total_real = self.layers * self.stride();
        for id in 0..total_real {
            self.for_each_out(id, |_, _| edges += 1);
        }
        GraphInfo {
            contour_vertices: vm,
            mesh_vertices: vn,
            mesh_edges: en,
            layers: self.layers,
            product_vertices_formula: vm * vn,
            product_vertices: vm * vn,
            product_edges_formula: vm * (2 * en + vn),
            conjugate_vertices_formula: vm * (2 * en + vn),
            conjugate_vertices: self.layers * (per_layer_proper + vn),
            conjugate_vertices_with_tags: self.layers * 2 * self.d,
            contour_stay_vertices: self.layers * self.d,
            isolated_mesh_stays: self.layers * (vn - per_layer_stays),
            conjugate_edges: edges,
            mean_out_degree: if total_real > 0 { edges as f64 / total_real as f64 } else { 0.0 },
            vertex_ratio: if vn > 0 && vm > 0 {
                (self.layers * (per_layer_proper + vn)) as f64 / (vm * vn) as f64
            } else {
                0.0
            },
        }
    }
}

/// Sizes reported by [`LayeredGraph::info`].
///
/// `conjugate_vertices` counts product edges with a proper contour edge
/// (each mesh pause once); contour pauses and the extra tagged copies of
/// mesh pauses are listed separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphInfo {
    pub contour_vertices: usize,
    pub mesh_vertices: usize,
    pub mesh_edges: usize,
    pub layers: usize,
    pub product_vertices_formula: usize,
    pub product_vertices: usize,
    pub product_edges_formula: usize,
    pub conjugate_vertices_formula: usize,
    pub conjugate_vertices: usize,
    pub conjugate_vertices_with_tags: usize,
    pub contour_stay_vertices: usize,
    pub isolated_mesh_stays: usize,
    pub conjugate_edges: usize,
    pub mean_out_degree: f64,
    pub vertex_ratio: f64,
}

#[cfg(test)]
mod tests;
