//! Local thickness: distance along the inverted vertex normal to the far
//! side of the shape.

mod bvh;
mod ray;
mod thickness;

pub use bvh::FaceBvh;
pub use ray::{ray_segment_intersect, ray_triangle_intersect, RayTolerance, TriangleHit};
pub use thickness::{thickness_2d, thickness_3d, ThicknessField, ThicknessOptions};
