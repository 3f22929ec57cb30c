//! Transfer of a 2D contour deformation onto a matched 3D mesh.

mod arap;
mod procrustes;

pub use arap::{arap_deform, ArapOptions, ArapResult};
pub use procrustes::{procrustes_align, RigidTransform};

use crate::geometry::{mesh_graph_geodesic, Contour, TriMesh, Vec3};
use crate::graph::LayeredGraph;
use crate::solver::MatchPath;

pub const DEFAULT_ANCHOR_COUNT: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum TransferError {
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ARAP energy increased at iteration {iteration}: {before} -> {after}")]
    ArapDiverged { iteration: usize, before: f64, after: f64 },
}

#[derive(Debug, Clone)]
pub struct DeformationInput<'a> {
    pub rest: &'a Contour,
    pub deformed: &'a Contour,
    pub mesh: &'a TriMesh,
    /// `(contour vertex, mesh vertex)` pairs read off the matching.
    pub matches: Vec<(usize, usize)>,
    pub anchor_count: usize,
    /// Similarity instead of rigid alignment.
    pub with_scale: bool,
    pub arap: ArapOptions,
}

impl<'a> DeformationInput<'a> {
    pub fn from_path(
        rest: &'a Contour,
        deformed: &'a Contour,
        g: &LayeredGraph<'a>,
        path: &MatchPath,
        anchor_count: usize,
    ) -> Self {
        DeformationInput {
            rest,
            deformed,
            mesh: g.mesh(),
            matches: path.vertex_matches(g),
            anchor_count,
            with_scale: false,
            arap: ArapOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransferResult {
    pub mesh: TriMesh,
    pub alignment: RigidTransform,
    pub anchors: Vec<usize>,
    pub energies: Vec<f64>,
    pub iterations: usize,
}

/// Greedy farthest-point sampling over `candidates` by mesh graph geodesic
/// distance. Starts from the smallest candidate id; ties go to the smaller id.
pub fn farthest_point_sampling(mesh: &TriMesh, candidates: &[usize], count: usize) -> Vec<usize> {
    let mut cand: Vec<usize> = candidates.to_vec();
    cand.sort_unstable();
    cand.dedup();
    let Some(&first) = cand.first() else { return Vec::new() };
    let mut chosen = vec![first];
    let mut dist = mesh_graph_geodesic(mesh, &[first]);
    while chosen.len() < count.min(cand.len()) {
        let mut best: Option<(f64, usize)> = None;
        for &c in &cand {
            if chosen.contains(&c) {
                continue;
            }
            let d = dist[c];
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, c));
            }
        }
        let (_, next) = best.expect("fewer chosen than candidates");
        chosen.push(next);
        for (a, b) in dist.iter_mut().zip(mesh_graph_geodesic(mesh, &[next])) {
            *a = a.min(b);
        }
    }
    chosen
}

fn embed(p: crate::geometry::Vec2) -> Vec3 {
    Vec3::new(p.x, p.y, 0.0)
}

pub fn transfer_deformation(inp: &DeformationInput) -> Result<TransferResult, TransferError> {
    let (rest, deformed, mesh) = (inp.rest, inp.deformed, inp.mesh);
    if rest.len() != deformed.len() {
        return Err(TransferError::InvalidInput(format!(
            "rest contour has {} vertices, deformed has {}",
            rest.len(),
            deformed.len()
        )));
    }
    if inp.anchor_count == 0 {
        return Err(TransferError::InvalidInput("anchor count must be positive".into()));
    }
    for &(i, j) in &inp.matches {
        if i >= rest.len() || j >= mesh.vertex_count() {
            return Err(TransferError::InvalidInput(format!("match ({i}, {j}) out of range")));
        }
    }
    let src: Vec<Vec3> = inp.matches.iter().map(|&(i, _)| embed(rest.vertex(i))).collect();
    let dst: Vec<Vec3> = inp.matches.iter().map(|&(_, j)| mesh.vertex(j)).collect();
    let alignment = procrustes_align(&src, &dst, inp.with_scale)?;

    // first contour vertex matched to each mesh vertex supplies its offset
    let mut offset = std::collections::BTreeMap::new();
    for &(i, j) in &inp.matches {
        offset.entry(j).or_insert_with(|| {
            alignment.rotation * (embed(deformed.vertex(i)) - embed(rest.vertex(i))) * alignment.scale
        });
    }
    let matched: Vec<usize> = offset.keys().copied().collect();
    if inp.anchor_count > matched.len() {
        log::warn!("anchor count {} exceeds {} matched vertices; clamping", inp.anchor_count, matched.len());
    }
    let anchors = farthest_point_sampling(mesh, &matched, inp.anchor_count);
    let constraints: Vec<(usize, Vec3)> = anchors.iter().map(|&j| (j, mesh.vertex(j) + offset[&j])).collect();

    // start from the best rigid fit to the anchor targets, or their mean
    // displacement when too few anchors fix a rotation
    let from: Vec<Vec3> = constraints.iter().map(|&(j, _)| mesh.vertex(j)).collect();
    let to: Vec<Vec3> = constraints.iter().map(|&(_, t)| t).collect();
    let initial: Vec<Vec3> = match procrustes_align(&from, &to, false) {
        Ok(t) => mesh.vertices().iter().map(|&p| t.apply(p)).collect(),
        Err(_) => {
            let shift = to.iter().zip(&from).map(|(t, f)| t - f).sum::<Vec3>() / to.len() as f64;
            mesh.vertices().iter().map(|&p| p + shift).collect()
        }
    };
    let res = arap_deform(mesh, &constraints, &initial, inp.arap)?;
    Ok(TransferResult {
        mesh: mesh.with_positions(res.positions),
        alignment,
        anchors,
        energies: res.energies,
        iterations: res.iterations,
    })
}
