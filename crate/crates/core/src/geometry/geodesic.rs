//! Graph geodesics: shortest edge paths weighted by Euclidean edge length.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{Contour, GeometryError, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-vertex graph-geodesic distance from the nearest source. Vertices
/// unreachable from every source get `f64::INFINITY`.
pub fn mesh_graph_geodesic(mesh: &TriMesh, sources: &[usize]) -> Vec<f64> {
    let n = mesh.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if s < n && dist[s] != 0.0 {
            dist[s] = 0.0;
            heap.push(Entry { dist: 0.0, vertex: s });
        }
    }
    while let Some(Entry { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &e in mesh.out_edges(v) {
            let w = mesh.edge(e).1;
            let nd = d + mesh.edge_length(e);
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry { dist: nd, vertex: w });
            }
        }
    }
    dist
}

/// How [`mesh_diameter`] evaluates the maximum eccentricity.
#[derive(Debug, Clone, Copy)]
pub struct DiameterOptions {
    /// Meshes with at most this many vertices get exact all-pairs search.
    pub exact_limit: usize,
    /// Number of farthest-point sweeps for larger meshes.
    pub samples: usize,
}

impl Default for DiameterOptions {
    fn default() -> Self {
        DiameterOptions { exact_limit: 4000, samples: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diameter {
    pub value: f64,
    /// False when the value comes from sampled sweeps (a lower bound).
    pub exact: bool,
}

/// Largest graph-geodesic distance between two mesh vertices.
pub fn mesh_diameter(mesh: &TriMesh, opts: DiameterOptions) -> Result<Diameter, GeometryError> {
    let n = mesh.vertex_count();
    if n == 0 {
        return Err(GeometryError::InvalidArgument("empty mesh".into()));
    }
    let components = mesh.component_count();
    if components > 1 {
        return Err(GeometryError::DisconnectedMesh { components });
    }
    let ecc = |s: usize| -> (f64, usize) {
        let d = mesh_graph_geodesic(mesh, &[s]);
        d.iter().enumerate().fold((0.0, s), |best, (v, &x)| if x > best.0 { (x, v) } else { best })
    };
    if n <= opts.exact_limit {
        let value = (0..n).into_par_iter().map(|s| ecc(s).0).reduce(|| 0.0, f64::max);
        return Ok(Diameter { value, exact: true });
    }
    let mut best = 0.0f64;
    let mut s = 0;
    for _ in 0..opts.samples.max(1) {
        let (d, far) = ecc(s);
        best = best.max(d);
        if far == s {
            break;
        }
        s = far;
    }
    Ok(Diameter { value: best, exact: false })
}

/// Largest along-contour distance between two contour vertices (half the
/// perimeter, up to discretisation, for closed contours; the total length
/// for open ones).
pub fn contour_diameter(contour: &Contour) -> f64 {
    let n = contour.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for k in 0..contour.edge_count() {
        let last = *prefix.last().unwrap();
        prefix.push(last + contour.edge_length(k));
    }
    let total = *prefix.last().unwrap();
    if !contour.is_closed() {
        return total;
    }
    // two-pointer sweep: for each i the best j is the last one before the
    // half-perimeter mark, or the first after it
    let mut best = 0.0f64;
    let mut j = 0;
    for i in 0..n {
        if j < i {
            j = i;
        }
        while j + 1 < n && prefix[j + 1] - prefix[i] <= total / 2.0 {
            j += 1;
        }
        for k in [j, (j + 1).min(n - 1)] {
            let arc = prefix[k] - prefix[i];
            best = best.max(arc.min(total - arc));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Vec2, Vec3};
    use crate::shapes;

    #[test]
    fn source_distance_is_zero() {
        let m = shapes::icosphere(1, 1.0);
        let d = mesh_graph_geodesic(&m, &[5]);
        assert_eq!(d[5], 0.0);
    }

    #[test]
    fn collinear_strip() {
        // a strip of two triangles whose bottom boundary is 0 - 1 - 2
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(1.0, 5.0, 0.0),
        ];
        let m = TriMesh::new(v, vec![[0, 1, 3], [1, 2, 3]]).unwrap();
        let d = mesh_graph_geodesic(&m, &[0]);
        assert_eq!(&d[..3], &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn tetrahedron_unit_edges() {
        let m = shapes::regular_tetrahedron(1.0);
        let d = mesh_graph_geodesic(&m, &[0]);
        for &x in &d[1..] {
            assert!((x - 1.0).abs() < 1e-12);
        }
        let diam = mesh_diameter(&m, DiameterOptions::default()).unwrap();
        assert!((diam.value - 1.0).abs() < 1e-12 && diam.exact);
    }

    #[test]
    fn disjoint_tetrahedra_are_disconnected() {
        let a = shapes::regular_tetrahedron(1.0);
        let m = shapes::disjoint_union(&a, &a.map_vertices(|p| p + Vec3::new(5.0, 0.0, 0.0)));
        assert!(matches!(
            mesh_diameter(&m, DiameterOptions::default()),
            Err(GeometryError::DisconnectedMesh { components: 2 })
        ));
        let d = mesh_graph_geodesic(&m, &[0]);
        assert!(d[4].is_infinite());
    }

    #[test]
    fn sampled_diameter_is_lower_bound() {
        let m = shapes::icosphere(2, 1.0);
        let exact = mesh_diameter(&m, DiameterOptions::default()).unwrap();
        let sampled = mesh_diameter(&m, DiameterOptions { exact_limit: 0, samples: 4 }).unwrap();
        assert!(!sampled.exact);
        assert!(sampled.value <= exact.value + 1e-12);
        assert!(sampled.value > 0.9 * exact.value);
    }

    #[test]
    fn contour_diameter_square() {
        let c = Contour::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)],
            true,
        )
        .unwrap();
        assert_eq!(contour_diameter(&c), 2.0);
    }
}
