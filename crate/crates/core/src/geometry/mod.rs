//! Shape containers for the two sides of a matching: closed (or open)
//! planar contours and oriented triangle meshes.
//!
//! Both types are validated on construction and immutable afterwards.
//! Parsing lives in [`io`]; graph geodesics in [`geodesic`].

mod contour;
pub mod geodesic;
pub mod io;
mod mesh;

pub use contour::Contour;
pub use geodesic::{contour_diameter, mesh_diameter, mesh_graph_geodesic, Diameter, DiameterOptions};
pub use mesh::TriMesh;

use nalgebra::{Vector2, Vector3};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;

/// File formats accepted for contours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourFormat {
    Csv,
    Json,
}

/// File formats accepted for meshes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
    Ply,
}

impl ContourFormat {
    pub fn from_path(path: &std::path::Path) -> Result<Self, GeometryError> {
        match extension(path).as_deref() {
            Some("csv") | Some("txt") => Ok(Self::Csv),
            Some("json") => Ok(Self::Json),
            other => Err(GeometryError::UnsupportedFormat(other.unwrap_or("").to_string())),
        }
    }
}

impl MeshFormat {
    pub fn from_path(path: &std::path::Path) -> Result<Self, GeometryError> {
        match extension(path).as_deref() {
            Some("off") => Ok(Self::Off),
            Some("obj") => Ok(Self::Obj),
            Some("ply") => Ok(Self::Ply),
            other => Err(GeometryError::UnsupportedFormat(other.unwrap_or("").to_string())),
        }
    }
}

fn extension(path: &std::path::Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },
    #[error("degenerate contour: {0}")]
    DegenerateContour(String),
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),
    #[error("face {face} has {count} vertices, only triangles are supported")]
    NonTriangular { face: usize, count: usize },
    #[error("invalid face {face}: {msg}")]
    InvalidFace { face: usize, msg: String },
    #[error("mesh is disconnected ({components} components)")]
    DisconnectedMesh { components: usize },
    #[error("unsupported file format '{0}'")]
    UnsupportedFormat(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GeometryError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Self::Parse { line, msg: msg.into() }
    }
}

/// Diagonal length of the axis-aligned bounding box of a point set.
pub(crate) fn bbox_diagonal<const D: usize>(points: impl IntoIterator<Item = nalgebra::SVector<f64, D>>) -> f64 {
    let mut lo = [f64::INFINITY; D];
    let mut hi = [f64::NEG_INFINITY; D];
    let mut any = false;
    for p in points {
        any = true;
        for k in 0..D {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if !any {
        return 0.0;
    }
    (0..D).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
}
