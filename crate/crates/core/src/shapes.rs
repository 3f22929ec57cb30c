//! Procedural test shapes: platonic solids, icospheres, tori, boxes, random
//! convex hulls and regular polygons.

use std::collections::HashMap;

use rand::Rng;

use crate::geometry::{Contour, TriMesh, Vec2, Vec3};

/// Regular tetrahedron centred at the origin with edge length `2√2`.
pub fn tetrahedron() -> TriMesh {
    let v = vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ];
    convex_from_faces(v, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
}

/// Regular tetrahedron centred at the origin with the given edge length.
pub fn regular_tetrahedron(edge: f64) -> TriMesh {
    tetrahedron().scaled(edge / 8f64.sqrt())
}

/// Unit octahedron (vertices on the coordinate axes).
pub fn octahedron() -> TriMesh {
    let v = vec![Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()];
    let mut faces = Vec::new();
    for &a in &[0, 1] {
        for &b in &[2, 3] {
            for &c in &[4, 5] {
                faces.push([a, b, c]);
            }
        }
    }
    convex_from_faces(v, faces)
}

/// Icosahedron subdivided `levels` times and projected onto a sphere.
/// Level 2 has 162 vertices, level 3 has 642.
pub fn icosphere(levels: usize, radius: f64) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
            *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let verts = verts.into_iter().map(|p| p * radius).collect();
    TriMesh::new(verts, faces).expect("icosphere is a valid manifold")
}

/// Torus around the z axis with `major_steps × minor_steps` vertices.
pub fn torus(major: f64, minor: f64, major_steps: usize, minor_steps: usize) -> TriMesh {
    use std::f64::consts::TAU;
    let mut v = Vec::with_capacity(major_steps * minor_steps);
    for i in 0..major_steps {
        let u = TAU * i as f64 / major_steps as f64;
        for j in 0..minor_steps {
            let w = TAU * j as f64 / minor_steps as f64;
            let r = major + minor * w.cos();
            v.push(Vec3::new(r * u.cos(), r * u.sin(), minor * w.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % major_steps) * minor_steps + (j % minor_steps);
    let mut f = Vec::with_capacity(2 * major_steps * minor_steps);
    for i in 0..major_steps {
        for j in 0..minor_steps {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            f.push([a, b, c]);
            f.push([a, c, d]);
        }
    }
    TriMesh::new(v, f).expect("torus is a valid manifold")
}

/// Closed axis-aligned box centred at the origin, every face split into a
/// `steps × steps` grid of quads (two triangles each).
pub fn box_mesh(size: Vec3, steps: usize) -> TriMesh {
    let steps = steps.max(1);
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    let s = steps as i64;
    // each face: fixed axis, sign, and (u, v) axes with u × v pointing outward
    let sides: [(usize, i64, usize, usize); 6] =
        [(0, 1, 1, 2), (0, -1, 2, 1), (1, 1, 2, 0), (1, -1, 0, 2), (2, 1, 0, 1), (2, -1, 1, 0)];
    for &(axis, sign, ua, va) in &sides {
        let mut grid = vec![vec![0usize; steps + 1]; steps + 1];
        for i in 0..=s {
            for j in 0..=s {
                let mut key = [0i64; 3];
                key[axis] = sign * s;
                key[ua] = 2 * i - s;
                key[va] = 2 * j - s;
                let id = *index.entry(key).or_insert_with(|| {
                    let unit = |c: usize| key[c] as f64 / (2 * s) as f64 * size[c];
                    verts.push(Vec3::new(unit(0), unit(1), unit(2)));
                    verts.len() - 1
                });
                grid[i as usize][j as usize] = id;
            }
        }
        for i in 0..steps {
            for j in 0..steps {
                let (a, b, c, d) = (grid[i][j], grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]);
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
    }
    TriMesh::new(verts, faces).expect("box is a valid manifold")
}

/// Flat disk in the z = 0 plane: one centre vertex (index 0) and `n`
/// boundary vertices on a circle, triangulated as a fan with normal +z.
pub fn disk(n: usize, radius: f64) -> TriMesh {
    let mut v = vec![Vec3::zeros()];
    for k in 0..n {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        v.push(Vec3::new(radius * t.cos(), radius * t.sin(), 0.0));
    }
    let f = (0..n).map(|k| [0, 1 + k, 1 + (k + 1) % n]).collect();
    TriMesh::new(v, f).expect("disk is a valid manifold")
}

/// Flat disk with `rings` concentric rings of `n` vertices around a centre
/// vertex; boundary vertices are the last `n` indices.
pub fn ring_disk(n: usize, rings: usize, radius: f64) -> TriMesh {
    let mut v = vec![Vec3::zeros()];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for k in 0..n {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            v.push(Vec3::new(rad * t.cos(), rad * t.sin(), 0.0));
        }
    }
    let ring = |r: usize, k: usize| 1 + (r - 1) * n + k % n;
    let mut f: Vec<[usize; 3]> = (0..n).map(|k| [0, ring(1, k), ring(1, k + 1)]).collect();
    for r in 1..rings {
        for k in 0..n {
            let (a, b, c, d) = (ring(r, k), ring(r + 1, k), ring(r + 1, k + 1), ring(r, k + 1));
            f.push([a, b, c]);
            f.push([a, c, d]);
        }
    }
    TriMesh::new(v, f).expect("disk is a valid manifold")
}

/// Convex hull of `n ≥ 4` random points on the unit sphere.
pub fn random_convex_hull<R: Rng>(rng: &mut R, n: usize) -> TriMesh {
    assert!(n >= 4);
    loop {
        let pts: Vec<Vec3> = (0..n).map(|_| random_unit_vector(rng)).collect();
        if let Some(mesh) = hull(&pts) {
            return mesh;
        }
    }
}

/// Brute-force hull of points in general position; `None` when the points
/// are too close to degenerate (coplanar quadruples, interior points).
fn hull(pts: &[Vec3]) -> Option<TriMesh> {
    let n = pts.len();
    let centroid = pts.iter().sum::<Vec3>() / n as f64;
    let mut faces = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let nrm = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                if nrm.norm() < 1e-6 {
                    return None;
                }
                let nrm = nrm.normalize();
                let mut pos = 0;
                let mut neg = 0;
                for (l, p) in pts.iter().enumerate() {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let s = nrm.dot(&(p - pts[i]));
                    if s.abs() < 1e-7 {
                        return None;
                    }
                    if s > 0.0 {
                        pos += 1;
                    } else {
                        neg += 1;
                    }
                }
                if pos == 0 || neg == 0 {
                    let outward = nrm.dot(&(pts[i] - centroid)) > 0.0;
                    faces.push(if outward { [i, j, k] } else { [i, k, j] });
                }
            }
        }
    }
    let mesh = TriMesh::new(pts.to_vec(), faces).ok()?;
    // every point must be on the hull and the surface closed
    let closed = mesh.undirected_edge_count() == 3 * n - 6 && mesh.face_count() == 2 * n - 4;
    closed.then_some(mesh)
}

pub fn random_unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let p = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let l = p.norm();
        if l > 1e-3 && l <= 1.0 {
            return p / l;
        }
    }
}

/// Disjoint union of two meshes (indices of `b` shifted).
pub fn disjoint_union(a: &TriMesh, b: &TriMesh) -> TriMesh {
    let off = a.vertex_count();
    let mut v = a.vertices().to_vec();
    v.extend_from_slice(b.vertices());
    let mut f = a.faces().to_vec();
    f.extend(b.faces().iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
    TriMesh::new(v, f).expect("union of valid meshes")
}

fn convex_from_faces(v: Vec<Vec3>, faces: Vec<[usize; 3]>) -> TriMesh {
    let c = v.iter().sum::<Vec3>() / v.len() as f64;
    let faces = faces
        .into_iter()
        .map(|[a, b, d]| {
            let n = (v[b] - v[a]).cross(&(v[d] - v[a]));
            if n.dot(&(v[a] - c)) > 0.0 {
                [a, b, d]
            } else {
                [a, d, b]
            }
        })
        .collect();
    TriMesh::new(v, faces).expect("convex solid is a valid manifold")
}

/// Regular `n`-gon of circumradius `radius`, vertex 0 on the +x axis.
pub fn regular_polygon(n: usize, radius: f64) -> Contour {
    ellipse(n, radius, radius)
}

pub fn ellipse(n: usize, a: f64, b: f64) -> Contour {
    let pts = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            Vec2::new(a * t.cos(), b * t.sin())
        })
        .collect();
    Contour::new(pts, true).expect("ellipse is a valid contour")
}

/// Random star-shaped polygon with `n` vertices: sorted random angles and
/// radii in `[0.5, 1]`.
pub fn random_star_polygon<R: Rng>(rng: &mut R, n: usize) -> Contour {
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<Vec2> = angles
            .iter()
            .map(|&t| {
                let r = rng.random_range(0.5..1.0);
                Vec2::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let min_edge = (0..n).map(|k| (pts[(k + 1) % n] - pts[k]).norm()).fold(f64::INFINITY, f64::min);
        if min_edge < 1e-3 {
            continue;
        }
        if let Ok(c) = Contour::new(pts, true) {
            return c;
        }
    }
}
