use nalgebra::{Matrix3, Rotation3, UnitQuaternion};

use super::EnergyError;
use crate::geometry::{Contour, TriMesh, Vec3};

/// Orthonormal frame attached to an edge: columns are the edge direction,
/// the outward normal and their cross product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub origin: Vec3,
    pub axes: Matrix3<f64>,
}

impl LocalFrame {
    /// `normal` is made orthogonal to `direction` before normalizing.
    pub fn new(origin: Vec3, direction: Vec3, normal: Vec3) -> Result<Self, EnergyError> {
        let len = direction.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(EnergyError::DegenerateFrame("zero-length edge".into()));
        }
        let t = direction / len;
        let n = normal - t * t.dot(&normal);
        let nlen = n.norm();
        if !(nlen > 1e-12 * normal.norm().max(1e-300)) {
            return Err(EnergyError::DegenerateFrame("normal parallel to edge".into()));
        }
        let n = n / nlen;
        let b = t.cross(&n);
        Ok(LocalFrame { origin, axes: Matrix3::from_columns(&[t, n, b]) })
    }

    /// Frame of contour edge `k`, embedded in the plane z = 0.
    pub fn contour_edge(contour: &Contour, k: usize) -> Result<Self, EnergyError> {
        let (a, _) = contour.edge(k);
        let p = contour.vertex(a);
        let d = contour.edge_vector(k);
        let n = contour.edge_normal(k);
        Self::new(Vec3::new(p.x, p.y, 0.0), Vec3::new(d.x, d.y, 0.0), Vec3::new(n.x, n.y, 0.0))
    }

    /// Frame of directed mesh edge `d`.
    pub fn mesh_edge(mesh: &TriMesh, d: usize) -> Result<Self, EnergyError> {
        let (a, b) = mesh.edge(d);
        Self::new(mesh.vertex(a), mesh.vertex(b) - mesh.vertex(a), mesh.edge_normal(d))
    }
}

/// Rotation taking a contour-edge frame onto a mesh-edge frame, stored as a
/// unit quaternion `[w, x, y, z]` with `w >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRotation {
    pub q: [f64; 4],
}

impl FrameRotation {
    pub fn from_matrix(r: &Matrix3<f64>) -> Self {
        let uq = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r));
        let c = uq.quaternion().coords;
        // nalgebra stores (i, j, k, w)
        let mut q = [c[3], c[0], c[1], c[2]];
        if q[0] < 0.0 {
            q = q.map(|x| -x);
        }
        FrameRotation { q }
    }

    pub fn dot(&self, other: &FrameRotation) -> f64 {
        self.q.iter().zip(&other.q).map(|(a, b)| a * b).sum()
    }

    /// Rotation angle between the two orientations on the unit-quaternion
    /// sphere, insensitive to the sign of either quaternion.
    pub fn distance(&self, other: &FrameRotation) -> f64 {
        self.dot(other).abs().clamp(0.0, 1.0).acos()
    }
}

/// Procrustes rotation between two orthonormal frames: `R = F3 * F2^T`.
pub fn frame_rotation(f2: &LocalFrame, f3: &LocalFrame) -> FrameRotation {
    FrameRotation::from_matrix(&(f3.axes * f2.axes.transpose()))
}
