//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here goes through the graph, energy or solver modules: states,
//! adjacency, frames, quaternions and losses are rebuilt from their
//! definitions on top of the plain shape containers.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use conjmatch::geometry::{Contour, TriMesh, Vec3};
use conjmatch::graph::{ConjugateVertex, ContourStep, MeshStep, ProductEdge};
use conjmatch::shapes;
use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ------------------------------------------------------------------ loss

/// General robust loss written directly from its closed form.
pub fn loss(x: f64, alpha: f64, c: f64, cubic: bool) -> f64 {
    let z = if cubic { (x / c).abs().powi(3) } else { (x / c).powi(2) };
    if alpha == 2.0 {
        0.5 * z
    } else if alpha == 0.0 {
        (0.5 * z + 1.0).ln()
    } else {
        let b = (alpha - 2.0).abs();
        b / alpha * ((z / b + 1.0).powf(alpha / 2.0) - 1.0)
    }
}

pub fn psi1(x: f64) -> f64 {
    loss(x, -2.0, 0.15, false)
}

pub fn psi2(x: f64) -> f64 {
    loss(x, 0.7, 0.6, true)
}

// ---------------------------------------------------------- frames, quats

/// Columns: unit direction, normal made orthogonal to it, their cross
/// product.
pub fn frame(dir: Vec3, normal: Vec3) -> Matrix3<f64> {
    let t = dir.normalize();
    let n = (normal - t * t.dot(&normal)).normalize();
    Matrix3::from_columns(&[t, n, t.cross(&n)])
}

pub fn contour_frame(c: &Contour, k: usize) -> Matrix3<f64> {
    let (a, b) = c.edge(k);
    let d = c.vertex(b) - c.vertex(a);
    let t = d.normalize();
    // right-hand normal, outward for counter-clockwise contours
    frame(Vec3::new(d.x, d.y, 0.0), Vec3::new(t.y, -t.x, 0.0))
}

pub fn mesh_frame(m: &TriMesh, d: usize) -> Matrix3<f64> {
    let (a, b) = m.edge(d);
    frame(m.vertex(b) - m.vertex(a), m.edge_normal(d))
}

/// Unit quaternion `[w, x, y, z]` of a rotation matrix by Shepperd's
/// method, sign fixed so that `w >= 0`.
pub fn quaternion(r: &Matrix3<f64>) -> [f64; 4] {
    let tr = r.trace();
    let cands = [tr, r[(0, 0)], r[(1, 1)], r[(2, 2)]];
    let k = (0..4).max_by(|&a, &b| cands[a].total_cmp(&cands[b])).unwrap();
    let q = match k {
        0 => {
            let s = (1.0 + tr).sqrt() * 2.0;
            [0.25 * s, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s]
        }
        1 => {
            let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
            [(r[(2, 1)] - r[(1, 2)]) / s, 0.25 * s, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s]
        }
        2 => {
            let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
            [(r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, 0.25 * s, (r[(1, 2)] + r[(2, 1)]) / s]
        }
        _ => {
            let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
            [(r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, 0.25 * s]
        }
    };
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
    q.map(|v| sign * v / norm)
}

pub fn quat_distance(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot.abs().min(1.0).acos()
}

// ---------------------------------------------------------------- states

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cs {
    Edge(usize),
    Stay(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ms {
    Edge(usize),
    /// Mesh pause at `vertex`, oriented by the incoming edge `tag`.
    Stay {
        vertex: usize,
        tag: usize,
    },
}

/// A conjugate vertex: a product edge plus the pause tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct St {
    pub c: Cs,
    pub m: Ms,
}

#[derive(Debug, Clone, Copy)]
pub struct Rules {
    pub turning_points: bool,
    pub degenerate_pairs: bool,
    pub all_incoming: bool,
}

impl Default for Rules {
    fn default() -> Self {
        Rules { turning_points: true, degenerate_pairs: true, all_incoming: false }
    }
}

/// A closed contour and a mesh with thickness fields and rotations, all
/// rebuilt from scratch.
pub struct Oracle<'a> {
    pub contour: &'a Contour,
    pub mesh: &'a TriMesh,
    pub t2: Vec<f64>,
    pub t3: Vec<f64>,
    pub rules: Rules,
    quats: HashMap<(usize, usize), [f64; 4]>,
}

impl<'a> Oracle<'a> {
    pub fn new(contour: &'a Contour, mesh: &'a TriMesh, t2: &[f64], t3: &[f64], rules: Rules) -> Self {
        let mut quats = HashMap::new();
        for k in 0..contour.edge_count() {
            let f2 = contour_frame(contour, k);
            for d in 0..mesh.directed_edge_count() {
                quats.insert((k, d), quaternion(&(mesh_frame(mesh, d) * f2.transpose())));
            }
        }
        Oracle { contour, mesh, t2: t2.to_vec(), t3: t3.to_vec(), rules, quats }
    }

    pub fn m(&self) -> usize {
        self.contour.len()
    }

    fn reverse(&self, d: usize) -> usize {
        let (a, b) = self.mesh.edge(d);
        self.mesh.find_edge(b, a).unwrap()
    }

    pub fn contour_head(&self, s: &St) -> usize {
        match s.c {
            Cs::Edge(k) => (k + 1) % self.m(),
            Cs::Stay(i) => i,
        }
    }

    pub fn mesh_head(&self, s: &St) -> usize {
        match s.m {
            Ms::Edge(d) => self.mesh.edge(d).1,
            Ms::Stay { vertex, .. } => vertex,
        }
    }

    fn frame_edges(&self, s: &St) -> (usize, usize) {
        let k = match s.c {
            Cs::Edge(k) => k,
            Cs::Stay(i) => (i + self.m() - 1) % self.m(),
        };
        let d = match s.m {
            Ms::Edge(d) => d,
            Ms::Stay { tag, .. } => tag,
        };
        (k, d)
    }

    /// Product edges leaving contour vertex 0 along edge 0, with every tag.
    pub fn starts(&self) -> Vec<St> {
        let mut out = Vec::new();
        for d in 0..self.mesh.directed_edge_count() {
            out.push(St { c: Cs::Edge(0), m: Ms::Edge(d) });
        }
        for t in 0..self.mesh.directed_edge_count() {
            out.push(St { c: Cs::Edge(0), m: Ms::Stay { vertex: self.mesh.edge(t).1, tag: t } });
        }
        out
    }

    /// Successors of `s` and whether the contour moves on to a new edge.
    pub fn successors(&self, s: &St) -> Vec<(St, bool)> {
        let i = self.contour_head(s);
        let j = self.mesh_head(s);
        let (_, frame_edge) = self.frame_edges(s);
        let mut mesh_next: Vec<Ms> =
            (0..self.mesh.directed_edge_count()).filter(|&d| self.mesh.edge(d).0 == j).map(Ms::Edge).collect();
        if self.rules.all_incoming {
            mesh_next.extend(
                (0..self.mesh.directed_edge_count())
                    .filter(|&t| self.mesh.edge(t).1 == j)
                    .map(|t| Ms::Stay { vertex: j, tag: t }),
            );
        } else {
            mesh_next.push(Ms::Stay { vertex: j, tag: frame_edge });
        }
        let mut out = Vec::new();
        for (c, adv) in [(Cs::Edge(i), true), (Cs::Stay(i), false)] {
            for &m in &mesh_next {
                if matches!((c, m), (Cs::Stay(_), Ms::Stay { .. })) {
                    continue;
                }
                if self.rules.turning_points {
                    if let (Ms::Edge(d), Ms::Edge(d2)) = (s.m, m) {
                        if d2 == self.reverse(d) {
                            continue;
                        }
                    }
                }
                if self.rules.degenerate_pairs {
                    if matches!(s.c, Cs::Stay(_)) && matches!(m, Ms::Stay { .. }) {
                        continue;
                    }
                    if matches!(s.m, Ms::Stay { .. }) && matches!(c, Cs::Stay(_)) {
                        continue;
                    }
                }
                out.push((St { c, m }, adv));
            }
        }
        out
    }

    pub fn data(&self, s: &St) -> f64 {
        psi1((self.t2[self.contour_head(s)] - self.t3[self.mesh_head(s)]).abs())
    }

    pub fn reg(&self, a: &St, b: &St) -> f64 {
        let qa = self.quats[&self.frame_edges(a)];
        let qb = self.quats[&self.frame_edges(b)];
        psi2(quat_distance(&qa, &qb))
    }

    pub fn cost(&self, a: &St, b: &St) -> f64 {
        self.data(a) + self.reg(a, b)
    }

    /// Energy of a closed walk given without its closing repeat.
    pub fn cycle_energy(&self, walk: &[St]) -> f64 {
        (0..walk.len()).map(|k| self.cost(&walk[k], &walk[(k + 1) % walk.len()])).sum()
    }

    /// Checks that `walk` (without closing repeat) is a closed walk that
    /// crosses every contour edge once.
    pub fn is_feasible_cycle(&self, walk: &[St]) -> bool {
        if walk.is_empty() || walk[0].c != Cs::Edge(0) {
            return false;
        }
        let mut advances = 0;
        for k in 0..walk.len() {
            let next = walk[(k + 1) % walk.len()];
            match self.successors(&walk[k]).into_iter().find(|(s, _)| *s == next) {
                Some((_, adv)) => advances += usize::from(adv),
                None => return false,
            }
        }
        advances == self.m()
    }

    /// Cheapest closed walk through every contour edge once, by
    /// label-correcting search from every start.
    pub fn min_cycle(&self) -> Option<f64> {
        let m = self.m();
        let mut best: Option<f64> = None;
        for s in self.starts() {
            let mut dist: HashMap<(St, usize), f64> = HashMap::new();
            let mut queue = VecDeque::new();
            let mut queued: HashSet<(St, usize)> = HashSet::new();
            dist.insert((s, 0), 0.0);
            queue.push_back((s, 0));
            queued.insert((s, 0));
            while let Some((u, layer)) = queue.pop_front() {
                queued.remove(&(u, layer));
                let du = dist[&(u, layer)];
                if layer == m {
                    continue;
                }
                for (v, adv) in self.successors(&u) {
                    let nl = layer + usize::from(adv);
                    if nl == m && v != s {
                        continue;
                    }
                    let nd = du + self.cost(&u, &v);
                    if dist.get(&(v, nl)).is_none_or(|&old| nd < old) {
                        dist.insert((v, nl), nd);
                        if queued.insert((v, nl)) {
                            queue.push_back((v, nl));
                        }
                    }
                }
            }
            if let Some(&d) = dist.get(&(s, m)) {
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }

    /// Depth-first enumeration of closed walks without a repeated state on
    /// the same contour position (repeats only add cost), pruned by the best
    /// total found so far.
    pub fn min_cycle_enumerated(&self) -> Option<f64> {
        let mut best = f64::INFINITY;
        for s in self.starts() {
            let mut seen = HashSet::new();
            seen.insert((s, 0));
            self.dfs(s, s, 0, 0.0, &mut seen, &mut best);
        }
        best.is_finite().then_some(best)
    }

    fn dfs(&self, start: St, u: St, layer: usize, acc: f64, seen: &mut HashSet<(St, usize)>, best: &mut f64) {
        let m = self.m();
        let mut succ = self.successors(&u);
        succ.sort_by_key(|&(_, adv)| !adv);
        for (v, adv) in succ {
            let nl = layer + usize::from(adv);
            let nd = acc + self.cost(&u, &v);
            if nd >= *best {
                continue;
            }
            if nl == m {
                if v == start {
                    *best = nd;
                }
                continue;
            }
            if seen.insert((v, nl)) {
                self.dfs(start, v, nl, nd, seen, best);
                seen.remove(&(v, nl));
            }
        }
    }
}

/// The library's view of an oracle state.
pub fn to_conjugate(s: &St) -> ConjugateVertex {
    let contour = match s.c {
        Cs::Edge(k) => ContourStep::Edge(k),
        Cs::Stay(i) => ContourStep::Stay(i),
    };
    let (mesh, ref_edge) = match s.m {
        Ms::Edge(d) => (MeshStep::Edge(d), None),
        Ms::Stay { vertex, tag } => (MeshStep::Stay(vertex), Some(tag)),
    };
    ConjugateVertex { product: ProductEdge { contour, mesh }, ref_edge }
}

// ------------------------------------------------------------- instances

pub struct Instance {
    pub contour: Contour,
    pub mesh: TriMesh,
    pub t2: Vec<f64>,
    pub t3: Vec<f64>,
    pub label: String,
}

/// Small random instance: contour with 3..=8 vertices against a
/// tetrahedron, an octahedron or a random hull of at most 10 vertices, with
/// thickness fields drawn from [0, 2].
pub fn small_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(3..=8);
    let contour = shapes::random_star_polygon(&mut rng, m);
    let (mesh, name) = match rng.random_range(0..3) {
        0 => (shapes::tetrahedron(), "tetrahedron".to_string()),
        1 => (shapes::octahedron(), "octahedron".to_string()),
        _ => {
            let n = rng.random_range(4..=10);
            (shapes::random_convex_hull(&mut rng, n), format!("hull{n}"))
        }
    };
    let t2 = (0..m).map(|_| rng.random_range(0.0..2.0)).collect();
    let t3 = (0..mesh.vertex_count()).map(|_| rng.random_range(0.0..2.0)).collect();
    Instance { contour, mesh, t2, t3, label: format!("seed {seed}: m={m} vs {name}") }
}

/// Closed walk on the mesh that never turns straight back, starting and
/// ending at `start`, as directed edge ids. Gives up after `tries`.
pub fn random_closed_walk(rng: &mut ChaCha8Rng, mesh: &TriMesh, start: usize, tries: usize) -> Option<Vec<usize>> {
    for _ in 0..tries {
        let mut walk: Vec<usize> = Vec::new();
        let mut v = start;
        for _ in 0..4 * mesh.vertex_count() {
            let opts: Vec<usize> = mesh
                .out_edges(v)
                .iter()
                .copied()
                .filter(|&d| walk.last().is_none_or(|&p| mesh.edge(p) != (mesh.edge(d).1, mesh.edge(d).0)))
                .collect();
            let d = opts[rng.random_range(0..opts.len())];
            walk.push(d);
            v = mesh.edge(d).1;
            let closes = v == start && {
                let (a, b) = mesh.edge(walk[0]);
                mesh.edge(d) != (b, a)
            };
            if closes && walk.len() >= 3 {
                return Some(walk);
            }
        }
    }
    None
}

/// Pairs a closed contour of `m` edges with a closed mesh walk along a
/// monotone schedule of `D`iagonal, `C`ontour-only and `M`esh-only moves.
/// Returns `None` if the schedule breaks a pruning rule.
pub fn schedule_cycle(oracle: &Oracle, walk: &[usize], schedule: &[char]) -> Option<Vec<St>> {
    let m = oracle.m();
    let mut states = Vec::new();
    let (mut k, mut w) = (0usize, 0usize);
    let mut prev_edge = *walk.last()?;
    for &step in schedule {
        let s = match step {
            'D' => {
                let s = St { c: Cs::Edge(k % m), m: Ms::Edge(walk[w % walk.len()]) };
                k += 1;
                w += 1;
                s
            }
            'C' => {
                let s =
                    St { c: Cs::Edge(k % m), m: Ms::Stay { vertex: oracle.mesh.edge(prev_edge).1, tag: prev_edge } };
                k += 1;
                s
            }
            _ => {
                let s = St { c: Cs::Stay(k % m), m: Ms::Edge(walk[w % walk.len()]) };
                w += 1;
                s
            }
        };
        if let Ms::Edge(d) = s.m {
            prev_edge = d;
        }
        states.push(s);
    }
    oracle.is_feasible_cycle(&states).then_some(states)
}

/// Random schedule with `m` contour moves and `n` mesh moves that starts
/// on the contour.
pub fn random_schedule(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<char> {
    let diag = rng.random_range(1..=m.min(n));
    let mut moves: Vec<char> = std::iter::repeat_n('D', diag)
        .chain(std::iter::repeat_n('C', m - diag))
        .chain(std::iter::repeat_n('M', n - diag))
        .collect();
    // keep a contour move in front
    use rand::seq::SliceRandom;
    moves.shuffle(rng);
    if let Some(p) = moves.iter().position(|&c| c != 'M') {
        moves.swap(0, p);
    }
    moves
}
