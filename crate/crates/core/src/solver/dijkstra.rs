use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::SolverError;
use crate::energy::EnergyModel;
use crate::graph::LayeredGraph;

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    id: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, id)
        other.dist.total_cmp(&self.dist).then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which vertices end a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Targets {
    /// The copies of the sources in the virtual closing layer (closed
    /// contours only).
    Duplicates,
    /// Every vertex of the final layer: the closing layer for closed
    /// contours, the last real layer for open ones.
    FinalLayer,
}

/// Distances and shortest-path trees of one layered run.
#[derive(Debug, Clone)]
pub struct DijkstraRun {
    dist: Vec<f64>,
    pred: Vec<u32>,
    origin: Vec<u32>,
    targets: Vec<usize>,
}

impl DijkstraRun {
    pub fn distance(&self, id: usize) -> f64 {
        self.dist[id]
    }

    /// Source at which the shortest path to `id` starts.
    pub fn origin(&self, id: usize) -> Option<usize> {
        (self.origin[id] != NONE).then(|| self.origin[id] as usize)
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Reached targets in id order.
    pub fn reached(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.targets.iter().filter(|&&t| self.dist[t].is_finite()).map(|&t| (t, self.dist[t]))
    }

    /// Cheapest reached target; ties go to the smaller id.
    pub fn best_target(&self) -> Option<(usize, f64)> {
        self.reached().fold(None, |best, (t, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((t, d)),
        })
    }

    /// Ids along the shortest path ending at `id`.
    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut path = vec![id];
        let mut cur = id;
        while self.pred[cur] != NONE {
            cur = self.pred[cur] as usize;
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Shortest paths from `sources` (first-layer ids) through the layers in
/// contour order.
///
/// Each layer is settled with its own heap before the next starts; edges
/// that stay in a layer are relaxed inside it. Vertices are only labelled
/// with distances below `bound`.
pub fn layered_dijkstra(
    g: &LayeredGraph,
    model: &EnergyModel,
    sources: &[usize],
    targets: Targets,
    bound: Option<f64>,
) -> Result<DijkstraRun, SolverError> {
    run_layered(g, |tail, _, head| model.cost_ids(g, tail, head), sources, targets, bound)
}

/// Conjugate edge costs in [`LayeredGraph::for_each_out`] order, for
/// repeated runs on one graph.
pub(crate) struct EdgeCosts {
    offsets: Vec<usize>,
    costs: Vec<f64>,
}

impl EdgeCosts {
    /// Largest number of cached edges.
    pub(crate) const BUDGET: usize = 1 << 25;

    /// `None` when the graph has more edges than the budget.
    pub(crate) fn build(g: &LayeredGraph, model: &EnergyModel) -> Option<Self> {
        let n = g.id_bound();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut total = 0usize;
        for id in 0..n {
            g.for_each_out(id, |_, _| total += 1);
            if total > Self::BUDGET {
                return None;
            }
            offsets.push(total);
        }
        let costs: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|id| {
                let mut v = Vec::new();
                g.for_each_out(id, |h, _| v.push(model.cost_ids(g, id, h)));
                v
            })
            .collect();
        debug_assert_eq!(costs.len(), total);
        Some(EdgeCosts { offsets, costs })
    }
}

pub(crate) fn layered_dijkstra_cached(
    g: &LayeredGraph,
    cache: &EdgeCosts,
    sources: &[usize],
    targets: Targets,
    bound: Option<f64>,
) -> Result<DijkstraRun, SolverError> {
    run_layered(g, |tail, slot, _| cache.costs[cache.offsets[tail] + slot], sources, targets, bound)
}

fn run_layered(
    g: &LayeredGraph,
    cost: impl Fn(usize, usize, usize) -> f64,
    sources: &[usize],
    targets: Targets,
    bound: Option<f64>,
) -> Result<DijkstraRun, SolverError> {
    let bound = bound.unwrap_or(f64::INFINITY);
    let n = g.id_bound();
    if n > NONE as usize {
        return Err(SolverError::TooLarge(n));
    }
    let first = g.first_layer_ids();
    if let Some(&bad) = sources.iter().find(|s| !first.contains(s)) {
        return Err(SolverError::InvalidSource(bad));
    }
    let target_ids: Vec<usize> = match targets {
        Targets::Duplicates => {
            if !g.is_closed() {
                return Err(SolverError::NoPath("open contours have no closing layer".into()));
            }
            let mut t: Vec<usize> = sources.iter().map(|&s| g.duplicate(s)).collect();
            t.sort_unstable();
            t.dedup();
            t
        }
        Targets::FinalLayer => {
            if g.layer_count() == 0 {
                Vec::new()
            } else if g.is_closed() {
                first.clone().map(|s| g.duplicate(s)).collect()
            } else {
                let s = g.stride();
                ((g.layer_count() - 1) * s..g.layer_count() * s).collect()
            }
        }
    };

    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut origin = vec![NONE; n];
    let mut settled = vec![false; n];
    let mut current: Vec<usize> = Vec::new();
    for &s in sources {
        if 0.0 < bound && dist[s] != 0.0 {
            dist[s] = 0.0;
            origin[s] = s as u32;
            current.push(s);
        }
    }
    let last_layer = g.layer_of(n.saturating_sub(1));
    let mut heap = BinaryHeap::new();
    let mut next: Vec<usize> = Vec::new();
    for layer in 0..=last_layer {
        if current.is_empty() {
            break;
        }
        heap.clear();
        heap.extend(current.drain(..).map(|id| Entry { dist: dist[id], id }));
        let expand = layer < g.layer_count();
        while let Some(Entry { dist: d, id }) = heap.pop() {
            if settled[id] || d > dist[id] {
                continue;
            }
            settled[id] = true;
            if !expand {
                continue;
            }
            let mut slot = 0;
            g.for_each_out(id, |h, advance| {
                let nd = d + cost(id, slot, h);
                slot += 1;
                if nd < dist[h] && nd < bound {
                    dist[h] = nd;
                    pred[h] = id as u32;
                    origin[h] = origin[id];
                    if advance {
                        next.push(h);
                    } else {
                        heap.push(Entry { dist: nd, id: h });
                    }
                }
            });
        }
        std::mem::swap(&mut current, &mut next);
    }
    let run = DijkstraRun { dist, pred, origin, targets: target_ids };
    if run.best_target().is_none() {
        return Err(SolverError::NoPath("no final-layer vertex reachable below the bound".into()));
    }
    Ok(run)
}
