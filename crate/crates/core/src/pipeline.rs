//! Shared preparation for matching: scale normalization, thickness and
//! the energy tables.

use crate::descriptors::{thickness_2d, thickness_3d, ThicknessField, ThicknessOptions};
use crate::energy::{EnergyError, EnergyModel, EnergyParams};
use crate::geometry::{contour_diameter, mesh_diameter, Contour, DiameterOptions, GeometryError, TriMesh};

#[derive(Debug, Clone, Copy)]
pub struct PrepareOptions {
    /// Scale both shapes to graph-geodesic diameter 1.
    pub normalize: bool,
    pub energy: EnergyParams,
    pub thickness: ThicknessOptions,
    pub diameter: DiameterOptions,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        PrepareOptions {
            normalize: true,
            energy: EnergyParams::default(),
            thickness: ThicknessOptions::default(),
            diameter: DiameterOptions::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PrepareError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Normalized shapes with their descriptors and cost tables.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub contour: Contour,
    pub mesh: TriMesh,
    /// Factor applied to the input contour coordinates.
    pub contour_scale: f64,
    /// Factor applied to the input mesh coordinates.
    pub mesh_scale: f64,
    pub mesh_diameter_exact: bool,
    pub thickness_2d: ThicknessField,
    pub thickness_3d: ThicknessField,
    pub model: EnergyModel,
}

pub fn prepare(contour: &Contour, mesh: &TriMesh, opts: &PrepareOptions) -> Result<Prepared, PrepareError> {
    let (contour_scale, mesh_scale, exact) = if opts.normalize {
        let dm = mesh_diameter(mesh, opts.diameter)?;
        let dc = contour_diameter(contour);
        if !(dm.value > 0.0 && dc > 0.0) {
            return Err(GeometryError::InvalidArgument("shape with zero diameter".into()).into());
        }
        (1.0 / dc, 1.0 / dm.value, dm.exact)
    } else {
        (1.0, 1.0, true)
    };
    let contour = contour.scaled(contour_scale);
    let mesh = mesh.scaled(mesh_scale);
    let t2 = thickness_2d(&contour);
    let t3 = thickness_3d(&mesh, opts.thickness);
    let model = EnergyModel::new(&contour, &mesh, &t2.values, &t3.values, opts.energy)?;
    Ok(Prepared {
        contour,
        mesh,
        contour_scale,
        mesh_scale,
        mesh_diameter_exact: exact,
        thickness_2d: t2,
        thickness_3d: t3,
        model,
    })
}
