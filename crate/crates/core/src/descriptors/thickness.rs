use rayon::prelude::*;

use super::bvh::FaceBvh;
use super::ray::{ray_segment_intersect, ray_triangle_intersect, RayTolerance};
use crate::geometry::{contour_diameter, mesh_diameter, Contour, DiameterOptions, TriMesh};

/// Per-vertex local thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessField {
    pub values: Vec<f64>,
    /// `false` where the inward ray found no surface; the value there is the
    /// fallback (the shape's graph diameter).
    pub hit: Vec<bool>,
}

impl ThicknessField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn hit_count(&self) -> usize {
        self.hit.iter().filter(|&&h| h).count()
    }

    /// Field with the given values, all marked as hits.
    pub fn from_values(values: Vec<f64>) -> Self {
        let hit = vec![true; values.len()];
        ThicknessField { values, hit }
    }

    /// CSV with header `vertex_id,thickness,hit`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex_id,thickness,hit\n");
        for (i, (v, h)) in self.values.iter().zip(&self.hit).enumerate() {
            out.push_str(&format!("{i},{v},{}\n", u8::from(*h)));
        }
        out
    }
}

/// Options for [`thickness_3d`].
#[derive(Debug, Clone, Copy)]
pub struct ThicknessOptions {
    /// Use the face BVH instead of testing every face.
    pub accelerate: bool,
    /// Minimum hit distance as a fraction of the bounding-box diagonal.
    pub t_min_rel: f64,
    pub bary_tol: f64,
}

impl Default for ThicknessOptions {
    fn default() -> Self {
        ThicknessOptions { accelerate: true, t_min_rel: 1e-6, bary_tol: 1e-9 }
    }
}

/// Distance from every contour vertex along its inverted normal to the first
/// non-incident contour edge.
pub fn thickness_2d(contour: &Contour) -> ThicknessField {
    let diag = crate::geometry::bbox_diagonal(contour.vertices().iter().copied());
    let tol = RayTolerance { t_min: 1e-6 * diag, bary: 1e-9 };
    let fallback = contour_diameter(contour);
    let n = contour.len();
    let edges = contour.edge_count();
    let mut values = Vec::with_capacity(n);
    let mut hit = Vec::with_capacity(n);
    for i in 0..n {
        let origin = contour.vertex(i);
        let dir = -contour.normals()[i];
        let best = (0..edges)
            .filter(|&k| {
                let (a, b) = contour.edge(k);
                a != i && b != i
            })
            .filter_map(|k| {
                let (a, b) = contour.edge(k);
                ray_segment_intersect(origin, dir, contour.vertex(a), contour.vertex(b), tol)
            })
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            values.push(best);
            hit.push(true);
        } else {
            values.push(fallback);
            hit.push(false);
        }
    }
    ThicknessField { values, hit }
}

/// Distance from every mesh vertex along its inverted normal to the first
/// triangle not incident to that vertex.
pub fn thickness_3d(mesh: &TriMesh, opts: ThicknessOptions) -> ThicknessField {
    let tol = RayTolerance { t_min: opts.t_min_rel * mesh.bbox_diagonal(), bary: opts.bary_tol };
    let fallback =
        mesh_diameter(mesh, DiameterOptions::default()).map(|d| d.value).unwrap_or_else(|_| mesh.bbox_diagonal());
    let bvh = opts.accelerate.then(|| FaceBvh::build(mesh));
    let faces = mesh.faces();
    let cast = |j: usize| -> f64 {
        let origin = mesh.vertex(j);
        let dir = -mesh.normals()[j];
        let test = |f: usize| -> f64 {
            let tri = faces[f];
            if tri.contains(&j) {
                return f64::INFINITY;
            }
            let pts = [mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])];
            ray_triangle_intersect(origin, dir, pts, tol).map_or(f64::INFINITY, |h| h.t)
        };
        match &bvh {
            Some(bvh) => {
                let mut best = f64::INFINITY;
                bvh.traverse(origin, dir, f64::INFINITY, |f| {
                    best = best.min(test(f));
                    best
                });
                best
            }
            None => (0..faces.len()).map(test).fold(f64::INFINITY, f64::min),
        }
    };
    let raw: Vec<f64> = (0..mesh.vertex_count()).into_par_iter().map(cast).collect();
    let hit: Vec<bool> = raw.iter().map(|t| t.is_finite()).collect();
    let values = raw.into_iter().map(|t| if t.is_finite() { t } else { fallback }).collect();
    ThicknessField { values, hit }
}
