//! Matching quality: normalized geodesic error, segmentation error and
//! cumulative error curves.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::geometry::{mesh_diameter, mesh_graph_geodesic, DiameterOptions, GeometryError, TriMesh};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no ground-truth match for contour vertex {0}")]
    MissingGroundTruth(usize),
    #[error("no mesh vertex carries segment label {0}")]
    EmptyTargetSegment(u32),
    #[error("no error values")]
    EmptyInput,
    #[error("invalid ground truth: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Ground truth for one contour/mesh pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    /// Mesh vertex matching each contour vertex.
    #[serde(default)]
    pub gt: Vec<Option<usize>>,
    /// Segment label of each contour vertex.
    #[serde(default)]
    pub seg2d: Vec<u32>,
    /// Segment label of each mesh vertex.
    #[serde(default)]
    pub seg3d: Vec<u32>,
    /// Label maps `l -> perm[l]` describing plausible symmetric labelings.
    #[serde(default)]
    pub sym_perms: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
}

impl GroundTruth {
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks sizes against the shapes and that every permutation is a
    /// bijection of the label set.
    pub fn validate(&self, contour_vertices: usize, mesh_vertices: usize) -> Result<(), EvalError> {
        if !self.gt.is_empty() && self.gt.len() != contour_vertices {
            return Err(EvalError::Invalid(format!(
                "gt has {} entries for {contour_vertices} contour vertices",
                self.gt.len()
            )));
        }
        if let Some(j) = self.gt.iter().flatten().find(|&&j| j >= mesh_vertices) {
            return Err(EvalError::Invalid(format!("gt vertex {j} out of range")));
        }
        if !self.seg2d.is_empty() && self.seg2d.len() != contour_vertices {
            return Err(EvalError::Invalid("seg2d length does not match the contour".into()));
        }
        if !self.seg3d.is_empty() && self.seg3d.len() != mesh_vertices {
            return Err(EvalError::Invalid("seg3d length does not match the mesh".into()));
        }
        let labels: BTreeSet<u32> = self.seg2d.iter().chain(&self.seg3d).copied().collect();
        for p in &self.sym_perms {
            let image: BTreeSet<u32> = labels.iter().map(|&l| p.get(l as usize).copied().unwrap_or(u32::MAX)).collect();
            if image != labels {
                return Err(EvalError::Invalid("symmetry permutation is not a bijection on the labels".into()));
            }
        }
        Ok(())
    }

    fn permute(perm: Option<&[u32]>, label: u32) -> u32 {
        perm.and_then(|p| p.get(label as usize).copied()).unwrap_or(label)
    }
}

/// `dist(y, gt(x)) / diam`.
pub fn geodesic_error(x: usize, y: usize, gt: &GroundTruth, mesh: &TriMesh, diameter: f64) -> Result<f64, EvalError> {
    let target = gt.gt.get(x).copied().flatten().ok_or(EvalError::MissingGroundTruth(x))?;
    Ok(mesh_graph_geodesic(mesh, &[target])[y] / diameter)
}

/// Distance from `y` to the nearest mesh vertex whose label matches that
/// of `x`, over the identity and every symmetry permutation.
pub fn segmentation_error(
    x: usize,
    y: usize,
    gt: &GroundTruth,
    mesh: &TriMesh,
    diameter: f64,
) -> Result<f64, EvalError> {
    let mut ev = Evaluator::new(mesh, gt, diameter);
    let mut best = ev.segmentation(x, y, None)?;
    for p in &gt.sym_perms {
        if let Ok(e) = ev.segmentation(x, y, Some(p)) {
            best = best.min(e);
        }
    }
    Ok(best)
}

/// Geodesic fields cached per target vertex and per label.
pub struct Evaluator<'a> {
    mesh: &'a TriMesh,
    gt: &'a GroundTruth,
    diameter: f64,
    vertex_fields: HashMap<usize, Vec<f64>>,
    label_fields: HashMap<u32, Vec<f64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(mesh: &'a TriMesh, gt: &'a GroundTruth, diameter: f64) -> Self {
        Evaluator { mesh, gt, diameter, vertex_fields: HashMap::new(), label_fields: HashMap::new() }
    }

    pub fn geodesic(&mut self, x: usize, y: usize) -> Result<f64, EvalError> {
        let target = self.gt.gt.get(x).copied().flatten().ok_or(EvalError::MissingGroundTruth(x))?;
        let mesh = self.mesh;
        let field = self.vertex_fields.entry(target).or_insert_with(|| mesh_graph_geodesic(mesh, &[target]));
        Ok(field[y] / self.diameter)
    }

    pub fn segmentation(&mut self, x: usize, y: usize, perm: Option<&[u32]>) -> Result<f64, EvalError> {
        let label =
            *self.gt.seg2d.get(x).ok_or_else(|| EvalError::Invalid(format!("no label for contour vertex {x}")))?;
        let label = GroundTruth::permute(perm, label);
        if !self.label_fields.contains_key(&label) {
            let sources: Vec<usize> =
                self.gt.seg3d.iter().enumerate().filter(|(_, &l)| l == label).map(|(j, _)| j).collect();
            if sources.is_empty() {
                return Err(EvalError::EmptyTargetSegment(label));
            }
            self.label_fields.insert(label, mesh_graph_geodesic(self.mesh, &sources));
        }
        Ok(self.label_fields[&label][y] / self.diameter)
    }
}

/// Sorted errors with their cumulative curve on a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCurve {
    pub errors: Vec<f64>,
    pub thresholds: Vec<f64>,
    /// Fraction of errors `<= threshold`.
    pub curve: Vec<f64>,
    /// Trapezoidal area under the curve divided by the grid span.
    pub auc: f64,
}

impl ErrorCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fraction\n");
        for (t, c) in self.thresholds.iter().zip(&self.curve) {
            out.push_str(&format!("{t},{c}\n"));
        }
        out
    }
}

/// `n` evenly spaced thresholds on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    }
}

pub fn cumulative_curve(errors: &[f64], grid: &[f64]) -> Result<ErrorCurve, EvalError> {
    if errors.is_empty() || grid.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if errors.iter().any(|e| e.is_nan()) {
        return Err(EvalError::Invalid("NaN error value".into()));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let curve: Vec<f64> = grid.iter().map(|&t| sorted.partition_point(|&e| e <= t) as f64 / n).collect();
    let span = grid[grid.len() - 1] - grid[0];
    let auc = if span > 0.0 {
        grid.windows(2).zip(curve.windows(2)).map(|(t, c)| (t[1] - t[0]) * (c[0] + c[1]) * 0.5).sum::<f64>() / span
    } else {
        curve[0]
    };
    Ok(ErrorCurve { errors: sorted, thresholds: grid.to_vec(), curve, auc })
}

/// Per-match errors and their curves for a whole matching.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub diameter: f64,
    pub diameter_exact: bool,
    pub geodesic: Option<ErrorCurve>,
    pub segmentation: Option<ErrorCurve>,
    /// Index into `sym_perms` of the labeling used (`None` = identity).
    pub segmentation_permutation: Option<usize>,
}

/// Evaluates `(contour vertex, mesh vertex)` matches. Geodesic errors use
/// the matches that have a ground-truth vertex; segmentation errors use one
/// labeling for the whole matching, the one with the lowest mean error.
pub fn evaluate_matches(
    matches: &[(usize, usize)],
    gt: &GroundTruth,
    mesh: &TriMesh,
    grid: &[f64],
) -> Result<EvalReport, EvalError> {
    let diam = mesh_diameter(mesh, DiameterOptions::default())?;
    if let Some(&(x, y)) = matches.iter().find(|&&(_, y)| y >= mesh.vertex_count()) {
        return Err(EvalError::Invalid(format!("match ({x}, {y}) refers to a missing mesh vertex")));
    }
    let mut ev = Evaluator::new(mesh, gt, diam.value);
    let mut geo = Vec::new();
    for &(x, y) in matches {
        if gt.gt.get(x).copied().flatten().is_some() {
            geo.push(ev.geodesic(x, y)?);
        }
    }
    let geodesic = if geo.is_empty() { None } else { Some(cumulative_curve(&geo, grid)?) };

    let mut segmentation = None;
    let mut segmentation_permutation = None;
    if !gt.seg2d.is_empty() && !gt.seg3d.is_empty() && !matches.is_empty() {
        let perms: Vec<Option<&[u32]>> =
            std::iter::once(None).chain(gt.sym_perms.iter().map(|p| Some(p.as_slice()))).collect();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        let mut first_err = None;
        for (k, perm) in perms.iter().enumerate() {
            let errs: Result<Vec<f64>, EvalError> =
                matches.iter().map(|&(x, y)| ev.segmentation(x, y, *perm)).collect();
            match errs {
                Ok(errs) => {
                    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
                    if best.as_ref().is_none_or(|b| mean < b.0) {
                        best = Some((mean, k, errs));
                    }
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        match best {
            Some((_, k, errs)) => {
                segmentation = Some(cumulative_curve(&errs, grid)?);
                segmentation_permutation = k.checked_sub(1);
            }
            None => return Err(first_err.expect("at least the identity was tried")),
        }
    }
    Ok(EvalReport {
        diameter: diam.value,
        diameter_exact: diam.exact,
        geodesic,
        segmentation,
        segmentation_permutation,
    })
}
