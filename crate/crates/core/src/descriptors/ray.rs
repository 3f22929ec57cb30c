use crate::geometry::{Vec2, Vec3};

/// Acceptance window for a ray hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayTolerance {
    /// Hits with `t <= t_min` are ignored (self-intersection guard).
    pub t_min: f64,
    /// Barycentric (or segment) coordinates down to `-bary` are accepted, so
    /// rays through shared edges and vertices are never lost between
    /// neighbouring primitives.
    pub bary: f64,
}

impl Default for RayTolerance {
    fn default() -> Self {
        RayTolerance { t_min: 1e-9, bary: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleHit {
    pub t: f64,
    /// Weights of the three triangle corners, in input order.
    pub barycentric: [f64; 3],
}

/// Möller–Trumbore ray/triangle intersection.
pub fn ray_triangle_intersect(origin: Vec3, dir: Vec3, tri: [Vec3; 3], tol: RayTolerance) -> Option<TriangleHit> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    let scale = e1.norm() * e2.norm();
    if !(det.abs() > 1e-14 * scale) {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&p) * inv;
    if u < -tol.bary || u > 1.0 + tol.bary {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < -tol.bary || u + v > 1.0 + tol.bary {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > tol.t_min).then_some(TriangleHit { t, barycentric: [1.0 - u - v, u, v] })
}

/// Ray/segment intersection in the plane; returns the ray parameter.
pub fn ray_segment_intersect(origin: Vec2, dir: Vec2, a: Vec2, b: Vec2, tol: RayTolerance) -> Option<f64> {
    let ab = b - a;
    let denom = dir.perp(&ab);
    if !(denom.abs() > 1e-14 * ab.norm()) {
        return None;
    }
    let ao = a - origin;
    let t = ao.perp(&ab) / denom;
    let s = ao.perp(&dir) / denom;
    if s < -tol.bary || s > 1.0 + tol.bary {
        return None;
    }
    (t > tol.t_min).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tri() -> [Vec3; 3] {
        [Vec3::zeros(), Vec3::x(), Vec3::y()]
    }

    #[test]
    fn axis_aligned_hit() {
        let hit =
            ray_triangle_intersect(Vec3::new(0.2, 0.2, -1.0), Vec3::z(), unit_tri(), RayTolerance::default()).unwrap();
        assert_eq!(hit.t, 1.0);
        let expected = [0.6, 0.2, 0.2];
        for (b, e) in hit.barycentric.iter().zip(expected) {
            assert!((b - e).abs() < 1e-15);
        }
    }

    #[test]
    fn outside_triangle_misses() {
        assert!(
            ray_triangle_intersect(Vec3::new(2.0, 2.0, -1.0), Vec3::z(), unit_tri(), RayTolerance::default()).is_none()
        );
    }

    #[test]
    fn parallel_ray_misses() {
        assert!(
            ray_triangle_intersect(Vec3::new(0.2, 0.2, 1.0), Vec3::x(), unit_tri(), RayTolerance::default()).is_none()
        );
    }

    #[test]
    fn behind_origin_misses() {
        assert!(
            ray_triangle_intersect(Vec3::new(0.2, 0.2, 1.0), Vec3::z(), unit_tri(), RayTolerance::default()).is_none()
        );
    }

    #[test]
    fn shared_vertex_is_hit() {
        let hit = ray_triangle_intersect(Vec3::new(1.0, 0.0, -1.0), Vec3::z(), unit_tri(), RayTolerance::default());
        assert!(hit.is_some());
    }

    #[test]
    fn segment_hit_at_endpoint() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = ray_segment_intersect(
            Vec2::zeros(),
            Vec2::new(h, h),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            RayTolerance::default(),
        )
        .unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-15);
    }
}
