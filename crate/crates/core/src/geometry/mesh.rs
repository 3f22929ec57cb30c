use std::collections::HashMap;

use super::{bbox_diagonal, GeometryError, Vec3};

/// Oriented manifold triangle mesh with directed-edge adjacency.
///
/// Every undirected edge `u` (sorted by its endpoint pair) owns two directed
/// edge ids: `2u` runs from the smaller to the larger vertex index and
/// `2u + 1` is its reverse, so `reverse(d) == d ^ 1`.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    normals: Vec<Vec3>,
    edges: Vec<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    edge_normals: Vec<Vec3>,
}

impl TriMesh {
    /// Builds and validates a mesh. Rejects out-of-range indices, repeated
    /// indices within a face, edges shared by more than two faces and
    /// inconsistently oriented neighbouring faces.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, GeometryError> {
        if vertices.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(GeometryError::InvalidArgument("non-finite vertex coordinate".into()));
        }
        let n = vertices.len();
        // directed half-edge -> face; each may occur once if orientation is consistent
        let mut half_edges: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        let mut undirected: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3 / 2);
        for (f, tri) in faces.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(GeometryError::InvalidFace { face: f, msg: "vertex index out of range".into() });
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(GeometryError::InvalidFace { face: f, msg: "repeated vertex index".into() });
            }
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let count = undirected.entry(key).or_insert(0);
                *count += 1;
                if *count > 2 {
                    return Err(GeometryError::NonManifold(format!(
                        "edge ({}, {}) is shared by more than two faces",
                        key.0, key.1
                    )));
                }
                if half_edges.insert((a, b), f).is_some() {
                    return Err(GeometryError::NonManifold(format!(
                        "faces adjacent across edge ({a}, {b}) are inconsistently oriented"
                    )));
                }
            }
        }

        let mut keys: Vec<(usize, usize)> = undirected.into_keys().collect();
        keys.sort_unstable();
        let mut edges = Vec::with_capacity(keys.len() * 2);
        for &(a, b) in &keys {
            edges.push((a, b));
            edges.push((b, a));
        }
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (d, &(a, b)) in edges.iter().enumerate() {
            out_edges[a].push(d);
            in_edges[b].push(d);
        }

        let face_normals: Vec<Vec3> = faces
            .iter()
            .map(|t| {
                let c = (vertices[t[1]] - vertices[t[0]]).cross(&(vertices[t[2]] - vertices[t[0]]));
                let len = c.norm();
                if len > 0.0 {
                    c / len
                } else {
                    Vec3::zeros()
                }
            })
            .collect();

        let mut normal_sums = vec![Vec3::zeros(); n];
        for (f, t) in faces.iter().enumerate() {
            for k in 0..3 {
                let p = vertices[t[k]];
                let u = vertices[t[(k + 1) % 3]] - p;
                let v = vertices[t[(k + 2) % 3]] - p;
                let angle = u.angle(&v);
                if angle.is_finite() {
                    normal_sums[t[k]] += face_normals[f] * angle;
                }
            }
        }
        let normals: Vec<Vec3> = normal_sums
            .into_iter()
            .map(|s| {
                let len = s.norm();
                if len > 1e-300 {
                    s / len
                } else {
                    Vec3::z()
                }
            })
            .collect();

        let mut edge_normals = Vec::with_capacity(keys.len());
        for &(a, b) in &keys {
            let mut sum = Vec3::zeros();
            for he in [(a, b), (b, a)] {
                if let Some(&f) = half_edges.get(&he) {
                    sum += face_normals[f];
                }
            }
            let dir = vertices[b] - vertices[a];
            edge_normals.push(orthonormal_to(dir, sum, normals[a] + normals[b]));
        }

        Ok(TriMesh { vertices, faces, normals, edges, out_edges, in_edges, edge_normals })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn directed_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vec3 {
        self.vertices[i]
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Angle-weighted outward unit vertex normals.
    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    /// `(tail, head)` of directed edge `d`.
    pub fn edge(&self, d: usize) -> (usize, usize) {
        self.edges[d]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn reverse_edge(d: usize) -> usize {
        d ^ 1
    }

    /// Directed edge id of `(a, b)`, if that edge exists.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.out_edges.get(a)?.iter().copied().find(|&d| self.edges[d].1 == b)
    }

    /// Directed edges leaving vertex `v`, in increasing id order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Directed edges entering vertex `v`, in increasing id order.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn edge_length(&self, d: usize) -> f64 {
        let (a, b) = self.edges[d];
        (self.vertices[b] - self.vertices[a]).norm()
    }

    pub fn mean_edge_length(&self) -> f64 {
        let m = self.undirected_edge_count();
        if m == 0 {
            return 0.0;
        }
        (0..m).map(|u| self.edge_length(2 * u)).sum::<f64>() / m as f64
    }

    /// Outward unit normal of the undirected edge under directed edge `d`,
    /// orthogonal to the edge direction.
    pub fn edge_normal(&self, d: usize) -> Vec3 {
        self.edge_normals[d / 2]
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bbox_diagonal(self.vertices.iter().copied())
    }

    /// Uniformly scaled copy.
    pub fn scaled(&self, s: f64) -> TriMesh {
        let mut m = self.clone();
        for p in &mut m.vertices {
            *p *= s;
        }
        m
    }

    /// Copy with every vertex mapped through `f`. Normals are recomputed, so
    /// `f` may be any map that keeps faces non-degenerate.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> TriMesh {
        let vertices = self.vertices.iter().map(|&p| f(p)).collect();
        TriMesh::new(vertices, self.faces.clone()).expect("connectivity unchanged")
    }

    /// Copy with new positions for the same connectivity.
    pub fn with_positions(&self, vertices: Vec<Vec3>) -> TriMesh {
        assert_eq!(vertices.len(), self.vertices.len());
        TriMesh::new(vertices, self.faces.clone()).expect("connectivity unchanged")
    }

    /// Number of connected components of the vertex-edge graph (isolated
    /// vertices count as components).
    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &d in &self.out_edges[v] {
                    let w = self.edges[d].1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }
}

/// Unit vector orthogonal to `dir`, taken from `preferred` or, if that is
/// degenerate after projection, from `fallback`.
fn orthonormal_to(dir: Vec3, preferred: Vec3, fallback: Vec3) -> Vec3 {
    let t = dir.normalize();
    for cand in [preferred, fallback] {
        let p = cand - t * t.dot(&cand);
        let len = p.norm();
        if len > 1e-12 {
            return p / len;
        }
    }
    // any perpendicular
    let axis = if t.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    t.cross(&axis).normalize()
}
