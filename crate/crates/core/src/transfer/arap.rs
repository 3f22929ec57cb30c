//! As-rigid-as-possible surface deformation with hard positional
//! constraints.

use nalgebra::{Matrix3, SVD};

use super::TransferError;
use crate::geometry::{TriMesh, Vec3};

const MIN_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct ArapOptions {
    pub max_iterations: usize,
    /// Stop once the energy changes by less than this fraction.
    pub rel_tol: f64,
    /// Stop once the energy is below this value.
    pub abs_tol: f64,
}

impl Default for ArapOptions {
    fn default() -> Self {
        ArapOptions { max_iterations: 200, rel_tol: 1e-6, abs_tol: 1e-20 }
    }
}

#[derive(Debug, Clone)]
pub struct ArapResult {
    pub positions: Vec<Vec3>,
    /// Energy after every global step, starting with the initial guess.
    pub energies: Vec<f64>,
    pub iterations: usize,
}

/// Symmetric cotangent weights per vertex neighbour, clamped from below.
struct Weights {
    /// CSR adjacency
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
    w: Vec<f64>,
}

impl Weights {
    fn cotangent(mesh: &TriMesh) -> Self {
        let n = mesh.vertex_count();
        let p = mesh.vertices();
        let mut acc = std::collections::HashMap::<(usize, usize), f64>::new();
        for f in mesh.faces() {
            for k in 0..3 {
                let (a, b, c) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                // angle at c is opposite edge (a, b)
                let u = p[a] - p[c];
                let v = p[b] - p[c];
                let cross = u.cross(&v).norm();
                let cot = if cross > 0.0 { u.dot(&v) / cross } else { 0.0 };
                *acc.entry((a.min(b), a.max(b))).or_insert(0.0) += 0.5 * cot;
            }
        }
        let mut lists = vec![Vec::new(); n];
        for d in 0..mesh.directed_edge_count() {
            let (a, b) = mesh.edge(d);
            let w = acc.get(&(a.min(b), a.max(b))).copied().unwrap_or(0.0).max(MIN_WEIGHT);
            lists[a].push((b, w));
        }
        let mut offsets = vec![0];
        let mut nbrs = Vec::new();
        let mut w = Vec::new();
        for l in lists {
            for (b, x) in l {
                nbrs.push(b);
                w.push(x);
            }
            offsets.push(nbrs.len());
        }
        Weights { offsets, nbrs, w }
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.offsets[i]..self.offsets[i + 1]).map(move |k| (self.nbrs[k], self.w[k]))
    }
}

fn energy(w: &Weights, rest: &[Vec3], cur: &[Vec3], rot: &[Matrix3<f64>]) -> f64 {
    (0..rest.len())
        .map(|i| {
            w.row(i).map(|(j, x)| x * ((cur[i] - cur[j]) - rot[i] * (rest[i] - rest[j])).norm_squared()).sum::<f64>()
        })
        .sum()
}

fn fit_rotations(w: &Weights, rest: &[Vec3], cur: &[Vec3]) -> Vec<Matrix3<f64>> {
    (0..rest.len())
        .map(|i| {
            let mut s = Matrix3::zeros();
            for (j, x) in w.row(i) {
                s += (rest[i] - rest[j]) * (cur[i] - cur[j]).transpose() * x;
            }
            let svd = SVD::new(s, true, true);
            let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else { return Matrix3::identity() };
            let mut r = v_t.transpose() * u.transpose();
            if r.determinant() < 0.0 {
                let k = (0..3).min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b])).unwrap();
                let mut u = u;
                u.column_mut(k).neg_mut();
                r = v_t.transpose() * u.transpose();
            }
            r
        })
        .collect()
}

/// Minimizes the ARAP energy of `mesh` subject to `constraints`
/// (vertex, target position), starting from `initial`.
pub fn arap_deform(
    mesh: &TriMesh,
    constraints: &[(usize, Vec3)],
    initial: &[Vec3],
    opts: ArapOptions,
) -> Result<ArapResult, TransferError> {
    let n = mesh.vertex_count();
    if initial.len() != n {
        return Err(TransferError::InvalidInput("initial guess has the wrong size".into()));
    }
    let rest = mesh.vertices();
    let w = Weights::cotangent(mesh);
    let mut fixed = vec![false; n];
    let mut cur = initial.to_vec();
    for &(j, target) in constraints {
        if j >= n {
            return Err(TransferError::InvalidInput(format!("anchor {j} out of range")));
        }
        fixed[j] = true;
        cur[j] = target;
    }
    // components without any anchor keep their initial placement
    let mut comp = vec![usize::MAX; n];
    let mut anchored = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = anchored.len();
        let mut has = false;
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            has |= fixed[v];
            for (u, _) in w.row(v) {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    stack.push(u);
                }
            }
        }
        if !has {
            for v in members {
                fixed[v] = true;
            }
        }
        anchored.push(has);
    }
    let diag: Vec<f64> = (0..n).map(|i| w.row(i).map(|(_, x)| x).sum()).collect();

    let mut rot = fit_rotations(&w, rest, &cur);
    let mut energies = vec![energy(&w, rest, &cur, &rot)];
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        // global step, one coordinate at a time
        let mut next = cur.clone();
        for c in 0..3 {
            let mut b = vec![0.0; n];
            for i in 0..n {
                if fixed[i] {
                    continue;
                }
                let mut s = 0.0;
                for (j, x) in w.row(i) {
                    let r = (rot[i] + rot[j]) * (rest[i] - rest[j]) * (0.5 * x);
                    s += r[c];
                    if fixed[j] {
                        s += x * cur[j][c];
                    }
                }
                b[i] = s;
            }
            let mut x: Vec<f64> = cur.iter().map(|p| p[c]).collect();
            conjugate_gradient(&w, &diag, &fixed, &b, &mut x);
            for i in 0..n {
                if !fixed[i] {
                    next[i][c] = x[i];
                }
            }
        }
        let after_global = energy(&w, rest, &next, &rot);
        let before = *energies.last().unwrap();
        if after_global > before * (1.0 + 1e-9) + 1e-18 {
            return Err(TransferError::ArapDiverged { iteration: iterations, before, after: after_global });
        }
        cur = next;
        rot = fit_rotations(&w, rest, &cur);
        let e = energy(&w, rest, &cur, &rot);
        energies.push(e);
        if e <= opts.abs_tol || (before - e).abs() <= opts.rel_tol * before {
            break;
        }
    }
    Ok(ArapResult { positions: cur, energies, iterations })
}

/// Jacobi-preconditioned CG on the free rows of the weighted graph
/// Laplacian; fixed entries of `x` act as boundary values already folded
/// into `b`.
fn conjugate_gradient(w: &Weights, diag: &[f64], fixed: &[bool], b: &[f64], x: &mut [f64]) {
    let n = x.len();
    let apply = |v: &[f64], out: &mut [f64]| {
        for i in 0..n {
            out[i] = if fixed[i] {
                0.0
            } else {
                diag[i] * v[i] - w.row(i).filter(|&(j, _)| !fixed[j]).map(|(j, a)| a * v[j]).sum::<f64>()
            };
        }
    };
    let mut xf: Vec<f64> = (0..n).map(|i| if fixed[i] { 0.0 } else { x[i] }).collect();
    let mut ax = vec![0.0; n];
    apply(&xf, &mut ax);
    let mut r: Vec<f64> = (0..n).map(|i| if fixed[i] { 0.0 } else { b[i] - ax[i] }).collect();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 && r.iter().all(|&v| v == 0.0) {
        return;
    }
    let precond = |r: &[f64]| -> Vec<f64> { (0..n).map(|i| if fixed[i] { 0.0 } else { r[i] / diag[i] }).collect() };
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for _ in 0..(4 * n).max(100) {
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= 1e-13 * bnorm.max(1e-300) {
            break;
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            xf[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z = precond(&r);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    for i in 0..n {
        if !fixed[i] {
            x[i] = xf[i];
        }
    }
}
