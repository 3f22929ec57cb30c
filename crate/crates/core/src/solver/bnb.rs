use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::dijkstra::{layered_dijkstra, layered_dijkstra_cached, EdgeCosts, Targets};
use super::{seed_vertices, MatchPath, SolverError};
use crate::energy::EnergyModel;
use crate::geometry::mesh_graph_geodesic;
use crate::graph::LayeredGraph;

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Seed the upper bound with the closed path through the start vertex
    /// of the cheapest set-to-set path into the closing layer.
    pub warm_start: bool,
}

/// Bookkeeping of one branch-and-bound run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BranchStats {
    pub branches_processed: usize,
    pub dijkstra_runs: usize,
    /// First-layer product edges, `2|E| + |V|`.
    pub first_layer_size: usize,
    /// First-layer vertices including every tag of a mesh pause.
    pub first_layer_tagged: usize,
    /// Upper bound after each processed branch.
    pub upper_bounds: Vec<f64>,
    /// Lower bound of each processed branch, in pop order.
    pub popped_lower_bounds: Vec<f64>,
}

struct Branch {
    lower: f64,
    seq: usize,
    members: Vec<usize>,
}

impl PartialEq for Branch {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Branch {}

impl Ord for Branch {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on the lower bound, first in first out among equals
        other.lower.total_cmp(&self.lower).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Branch {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Splits `branch` into the members closer to `seed_a`'s mesh edge and
/// those closer to `seed_b`'s, measured by graph geodesics between edge
/// endpoints. Ties go to the first part.
pub fn voronoi_split(
    g: &LayeredGraph,
    seed_a: usize,
    seed_b: usize,
    branch: &[usize],
) -> Result<(Vec<usize>, Vec<usize>), SolverError> {
    let (mut sa, mut sb) = (seed_vertices(g, seed_a), seed_vertices(g, seed_b));
    sa.sort_unstable();
    sb.sort_unstable();
    if sa == sb {
        return Err(SolverError::InvalidSplit("seeds share their mesh edge".into()));
    }
    let da = mesh_graph_geodesic(g.mesh(), &sa);
    let db = mesh_graph_geodesic(g.mesh(), &sb);
    let (mut b1, mut b2) = (Vec::new(), Vec::new());
    for &v in branch {
        let ends = seed_vertices(g, v);
        let a = ends.iter().map(|&j| da[j]).fold(f64::INFINITY, f64::min);
        let b = ends.iter().map(|&j| db[j]).fold(f64::INFINITY, f64::min);
        if a <= b {
            b1.push(v);
        } else {
            b2.push(v);
        }
    }
    if b1.is_empty() || b2.is_empty() {
        return Err(SolverError::InvalidSplit("one Voronoi cell is empty".into()));
    }
    Ok((b1, b2))
}

/// Fallback split: the members on `end`'s mesh edge against the rest, or
/// `end` alone when `start` sits on the same edge.
fn edge_split(g: &LayeredGraph, start: usize, end: usize, branch: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let key = |v: usize| {
        let mut s = seed_vertices(g, v);
        s.sort_unstable();
        s
    };
    let target = key(end);
    if key(start) != target {
        let (on, off): (Vec<usize>, Vec<usize>) = branch.iter().partition(|&&v| key(v) == target);
        if !off.is_empty() {
            return (off, on);
        }
    }
    (branch.iter().copied().filter(|&v| v != end).collect(), vec![end])
}

/// Minimum-energy cyclic path by branch and bound over the first layer.
pub fn solve_cyclic(
    g: &LayeredGraph,
    model: &EnergyModel,
    opts: SolveOptions,
) -> Result<(MatchPath, BranchStats), SolverError> {
    if !g.is_closed() {
        return Err(SolverError::NoPath("cyclic matching needs a closed contour".into()));
    }
    let first: Vec<usize> = g.first_layer_ids().collect();
    let mut stats = BranchStats {
        first_layer_size: g.first_layer_vertices().len(),
        first_layer_tagged: first.len(),
        ..Default::default()
    };
    if first.is_empty() {
        return Err(SolverError::NoPath("empty first layer".into()));
    }
    let cache = EdgeCosts::build(g, model);
    let dijkstra = |sources: &[usize], bound: Option<f64>| match &cache {
        Some(c) => layered_dijkstra_cached(g, c, sources, Targets::Duplicates, bound),
        None => layered_dijkstra(g, model, sources, Targets::Duplicates, bound),
    };
    let mut upper = f64::INFINITY;
    let mut best: Option<(Vec<usize>, f64)> = None;

    if opts.warm_start {
        let open = dijkstra(&first, None)?;
        stats.dijkstra_runs += 1;
        if let Some((t, _)) = open.best_target() {
            let s = open.origin(t).expect("reached targets have an origin");
            stats.dijkstra_runs += 1;
            if let Ok(run) = dijkstra(&[s], None) {
                let d = run.distance(g.duplicate(s));
                upper = d;
                best = Some((run.path_to(g.duplicate(s)), d));
            }
        }
    }

    let mut queue = BinaryHeap::new();
    let mut seq = 0;
    queue.push(Branch { lower: 0.0, seq, members: first });
    while let Some(branch) = queue.pop() {
        if branch.lower >= upper {
            break;
        }
        stats.branches_processed += 1;
        stats.popped_lower_bounds.push(branch.lower);
        stats.dijkstra_runs += 1;
        let run = match dijkstra(&branch.members, Some(upper)) {
            Ok(run) => run,
            Err(SolverError::NoPath(_)) => {
                stats.upper_bounds.push(upper);
                continue;
            }
            Err(e) => return Err(e),
        };
        let (t, d) = run.best_target().expect("checked by layered_dijkstra");
        let start = run.origin(t).expect("reached targets have an origin");
        let end = t - g.duplicate(0);
        // any reached duplicate whose path closes on itself tightens the bound
        for (t2, d2) in run.reached() {
            let v = t2 - g.duplicate(0);
            if run.origin(t2) == Some(v) && d2 < upper {
                upper = d2;
                best = Some((run.path_to(t2), d2));
            }
        }
        if start != end && d < upper {
            let (b1, b2) = match voronoi_split(g, start, end, &branch.members) {
                Ok(parts) => parts,
                Err(_) => edge_split(g, start, end, &branch.members),
            };
            for members in [b1, b2] {
                seq += 1;
                queue.push(Branch { lower: d, seq, members });
            }
        }
        stats.upper_bounds.push(upper);
    }
    let (ids, total) = best.ok_or_else(|| SolverError::NoPath("no cyclic path".into()))?;
    Ok((MatchPath::from_ids(g, model, &ids, total, true), stats))
}
