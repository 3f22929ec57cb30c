use nalgebra::{Matrix3, SVD};

use super::TransferError;
use crate::geometry::Vec3;

/// `x -> scale * rotation * x + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
    pub scale: f64,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform { rotation: Matrix3::identity(), translation: Vec3::zeros(), scale: 1.0 }
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation * p * self.scale + self.translation
    }
}

/// Least-squares rotation (and optionally uniform scale) plus translation
/// taking `source` onto `target`. Reflections are excluded.
pub fn procrustes_align(source: &[Vec3], target: &[Vec3], with_scale: bool) -> Result<RigidTransform, TransferError> {
    if source.len() != target.len() {
        return Err(TransferError::InvalidInput("point sets differ in size".into()));
    }
    if source.len() < 3 {
        return Err(TransferError::DegenerateConfiguration(format!("{} point pairs", source.len())));
    }
    let n = source.len() as f64;
    let cs = source.iter().sum::<Vec3>() / n;
    let ct = target.iter().sum::<Vec3>() / n;
    let mut h = Matrix3::zeros();
    let mut spread = Matrix3::zeros();
    let mut var = 0.0;
    for (s, t) in source.iter().zip(target) {
        let (a, b) = (s - cs, t - ct);
        h += a * b.transpose();
        spread += a * a.transpose();
        var += a.norm_squared();
    }
    let sv = SVD::new(spread, false, false).singular_values;
    let mut sv: Vec<f64> = sv.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if !(sv[0] > 0.0) || sv[1] <= 1e-12 * sv[0] {
        return Err(TransferError::DegenerateConfiguration("source points are collinear or coincident".into()));
    }
    let svd = SVD::new(h, true, true);
    let mut hs: Vec<f64> = svd.singular_values.iter().copied().collect();
    hs.sort_by(|a, b| b.total_cmp(a));
    if !(hs[0] > 0.0) || hs[1] <= 1e-12 * hs[0] {
        // the rotation is undetermined unless the cross-covariance has rank 2
        return Err(TransferError::DegenerateConfiguration("target points are collinear or coincident".into()));
    }
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut d = Matrix3::identity();
    if (v_t.transpose() * u.transpose()).determinant() < 0.0 {
        // flip the axis of the smallest singular value
        let k = (0..3).min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b])).unwrap();
        d[(k, k)] = -1.0;
    }
    let rotation = v_t.transpose() * d * u.transpose();
    let scale = if with_scale { (0..3).map(|k| svd.singular_values[k] * d[(k, k)]).sum::<f64>() / var } else { 1.0 };
    Ok(RigidTransform { rotation, translation: ct - rotation * cs * scale, scale })
}
