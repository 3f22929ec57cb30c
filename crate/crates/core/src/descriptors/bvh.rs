//! Axis-aligned bounding volume hierarchy over mesh faces.

use crate::geometry::{TriMesh, Vec3};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Vec3,
    hi: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb { lo: Vec3::repeat(f64::INFINITY), hi: Vec3::repeat(f64::NEG_INFINITY) }
    }

    fn grow(&mut self, p: Vec3) {
        self.lo = self.lo.inf(&p);
        self.hi = self.hi.sup(&p);
    }

    /// Slab test; `true` when the ray may enter the box at some t ≥ 0.
    fn hit(&self, origin: Vec3, dir: Vec3, t_max: f64) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for k in 0..3 {
            if dir[k].abs() < 1e-300 {
                if origin[k] < self.lo[k] || origin[k] > self.hi[k] {
                    return false;
                }
                continue;
            }
            let inv = 1.0 / dir[k];
            let (mut a, mut b) = ((self.lo[k] - origin[k]) * inv, (self.hi[k] - origin[k]) * inv);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

/// Face BVH; leaves reference ranges of a permuted face list.
#[derive(Debug, Clone)]
pub struct FaceBvh {
    nodes: Vec<Node>,
    faces: Vec<usize>,
}

impl FaceBvh {
    pub fn build(mesh: &TriMesh) -> Self {
        let pad = 1e-9 * mesh.bbox_diagonal().max(1e-300);
        let bounds: Vec<Aabb> = mesh
            .faces()
            .iter()
            .map(|f| {
                let mut b = Aabb::empty();
                for &v in f {
                    b.grow(mesh.vertex(v));
                }
                b.lo -= Vec3::repeat(pad);
                b.hi += Vec3::repeat(pad);
                b
            })
            .collect();
        let centroids: Vec<Vec3> = bounds.iter().map(|b| (b.lo + b.hi) * 0.5).collect();
        let mut bvh = FaceBvh { nodes: Vec::new(), faces: (0..mesh.face_count()).collect() };
        if !bvh.faces.is_empty() {
            let n = bvh.faces.len();
            bvh.split(&bounds, &centroids, 0, n);
        }
        bvh
    }

    fn split(&mut self, bounds: &[Aabb], centroids: &[Vec3], start: usize, end: usize) -> usize {
        let mut b = Aabb::empty();
        let mut cb = Aabb::empty();
        for &f in &self.faces[start..end] {
            b.grow(bounds[f].lo);
            b.grow(bounds[f].hi);
            cb.grow(centroids[f]);
        }
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bounds: b, start, end });
            return id;
        }
        let extent = cb.hi - cb.lo;
        let axis = extent.imax();
        let mid = (start + end) / 2;
        self.faces[start..end]
            .select_nth_unstable_by(mid - start, |&x, &y| centroids[x][axis].total_cmp(&centroids[y][axis]));
        self.nodes.push(Node::Leaf { bounds: b, start, end });
        let left = self.split(bounds, centroids, start, mid);
        let right = self.split(bounds, centroids, mid, end);
        self.nodes[id] = Node::Inner { bounds: b, left, right };
        id
    }

    /// Calls `visit` for every face whose box the ray may hit before
    /// `t_max`; `visit` returns the (possibly shrunk) new `t_max`.
    pub fn traverse(&self, origin: Vec3, dir: Vec3, mut t_max: f64, mut visit: impl FnMut(usize) -> f64) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            match &self.nodes[id] {
                Node::Leaf { bounds, start, end } => {
                    if bounds.hit(origin, dir, t_max) {
                        for &f in &self.faces[*start..*end] {
                            t_max = visit(f).min(t_max);
                        }
                    }
                }
                Node::Inner { bounds, left, right } => {
                    if bounds.hit(origin, dir, t_max) {
                        stack.push(*right);
                        stack.push(*left);
                    }
                }
            }
        }
    }
}
