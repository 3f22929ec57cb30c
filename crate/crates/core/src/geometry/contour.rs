use super::{bbox_diagonal, GeometryError, Vec2};

/// A planar polygon, stored counter-clockwise.
///
/// Edge `k` joins vertex `k` to vertex `k + 1`; for a closed contour the
/// last edge wraps around to vertex 0. Open contours (partial shapes) have
/// `len() - 1` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    vertices: Vec<Vec2>,
    normals: Vec<Vec2>,
    closed: bool,
}

impl Contour {
    /// Validates `points`, normalizes the orientation to counter-clockwise and
    /// computes outward vertex normals.
    pub fn new(mut points: Vec<Vec2>, closed: bool) -> Result<Self, GeometryError> {
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(GeometryError::DegenerateContour("non-finite coordinate".into()));
        }
        if points.len() < 3 {
            return Err(GeometryError::DegenerateContour(format!("need at least 3 vertices, got {}", points.len())));
        }
        let tol = 1e-9 * bbox_diagonal(points.iter().copied());
        if tol == 0.0 {
            return Err(GeometryError::DegenerateContour("all vertices coincide".into()));
        }
        check_distinct(&points, tol)?;
        if shoelace(&points) < 0.0 {
            points.reverse();
        }
        let mut c = Contour { vertices: points, normals: Vec::new(), closed };
        if closed && c.signed_area().abs() <= tol * tol {
            return Err(GeometryError::DegenerateContour("zero enclosed area".into()));
        }
        c.normals = c.compute_normals();
        if c.vertices.len() <= 5000 {
            if let Some((a, b)) = c.first_crossing() {
                log::warn!("contour edges {a} and {b} intersect");
            }
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i]
    }

    /// Outward unit vertex normals.
    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    /// Endpoints of edge `k`.
    pub fn edge(&self, k: usize) -> (usize, usize) {
        (k, (k + 1) % self.vertices.len())
    }

    pub fn edge_vector(&self, k: usize) -> Vec2 {
        let (a, b) = self.edge(k);
        self.vertices[b] - self.vertices[a]
    }

    pub fn edge_length(&self, k: usize) -> f64 {
        self.edge_vector(k).norm()
    }

    /// Unit normal of edge `k`, on its right-hand side (outside for a
    /// counter-clockwise contour).
    pub fn edge_normal(&self, k: usize) -> Vec2 {
        let d = self.edge_vector(k).normalize();
        Vec2::new(d.y, -d.x)
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.edge_count()).map(|k| self.edge_length(k)).sum()
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.perimeter() / self.edge_count() as f64
    }

    /// Shoelace area of the polygon (the closing segment is included for
    /// open contours).
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// Sum of signed exterior angles over all vertices of a closed contour.
    pub fn turning_angle_sum(&self) -> f64 {
        let n = self.edge_count();
        let mut total = 0.0;
        for k in 0..n {
            let prev = if k == 0 { n - 1 } else { k - 1 };
            let a = self.edge_vector(prev);
            let b = self.edge_vector(k);
            total += (a.x * b.y - a.y * b.x).atan2(a.dot(&b));
        }
        total
    }

    /// Uniformly scaled copy (normals are scale invariant).
    pub fn scaled(&self, s: f64) -> Contour {
        Contour {
            vertices: self.vertices.iter().map(|p| p * s).collect(),
            normals: self.normals.clone(),
            closed: self.closed,
        }
    }

    /// Copy whose first vertex is `start`; only meaningful for closed contours.
    pub fn rotated_start(&self, start: usize) -> Contour {
        let n = self.len();
        let mut vertices = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        for k in 0..n {
            vertices.push(self.vertices[(start + k) % n]);
            normals.push(self.normals[(start + k) % n]);
        }
        Contour { vertices, normals, closed: self.closed }
    }

    /// Resamples the contour along its arc length with spacing as close as
    /// possible to `target_edge_length`. The first vertex is kept, all new
    /// vertices lie on the original polyline.
    pub fn resample(&self, target_edge_length: f64) -> Result<Contour, GeometryError> {
        if !(target_edge_length > 0.0) || !target_edge_length.is_finite() {
            return Err(GeometryError::InvalidArgument(format!(
                "target edge length must be positive, got {target_edge_length}"
            )));
        }
        let stations = self.arc_length_stations(target_edge_length)?;
        let points = stations.iter().map(|&s| self.point_at_arc_length(s)).collect();
        Contour::new(points, self.closed)
    }

    /// Arc-length positions (along this contour) of the vertices produced by
    /// [`Contour::resample`].
    pub fn arc_length_stations(&self, target_edge_length: f64) -> Result<Vec<f64>, GeometryError> {
        let total = self.perimeter();
        let segments = (total / target_edge_length).round() as usize;
        let count = if self.closed { segments } else { segments + 1 };
        if count < 3 || segments == 0 {
            return Err(GeometryError::DegenerateContour(format!(
                "resampling to edge length {target_edge_length} leaves {count} vertices"
            )));
        }
        let step = total / segments as f64;
        Ok((0..count).map(|k| if k == segments { total } else { k as f64 * step }).collect())
    }

    /// Point at arc length `s` measured from vertex 0 along the edges.
    pub fn point_at_arc_length(&self, s: f64) -> Vec2 {
        let mut remaining = s.max(0.0);
        let n = self.edge_count();
        for k in 0..n {
            let len = self.edge_length(k);
            if remaining <= len || k + 1 == n {
                let (a, b) = self.edge(k);
                let t = (remaining / len).clamp(0.0, 1.0);
                if t == 1.0 {
                    return self.vertices[b];
                }
                return self.vertices[a] + (self.vertices[b] - self.vertices[a]) * t;
            }
            remaining -= len;
        }
        self.vertices[0]
    }

    fn compute_normals(&self) -> Vec<Vec2> {
        let n = self.vertices.len();
        let edges = self.edge_count();
        (0..n)
            .map(|i| {
                let incoming = if i > 0 {
                    Some(i - 1)
                } else if self.closed {
                    Some(n - 1)
                } else {
                    None
                };
                let outgoing = if i < edges { Some(i) } else { None };
                let sum = match (incoming, outgoing) {
                    (Some(a), Some(b)) => self.edge_normal(a) + self.edge_normal(b),
                    (Some(a), None) => self.edge_normal(a),
                    (None, Some(b)) => self.edge_normal(b),
                    (None, None) => unreachable!("contour has at least 3 vertices"),
                };
                if sum.norm() > 1e-12 {
                    sum.normalize()
                } else {
                    // hairpin: bisector undefined, use the outgoing edge normal
                    self.edge_normal(outgoing.or(incoming).unwrap())
                }
            })
            .collect()
    }

    fn first_crossing(&self) -> Option<(usize, usize)> {
        let n = self.edge_count();
        for a in 0..n {
            for b in (a + 1)..n {
                let (a0, a1) = self.edge(a);
                let (b0, b1) = self.edge(b);
                if a1 == b0 || b1 == a0 {
                    continue;
                }
                if segments_cross(self.vertices[a0], self.vertices[a1], self.vertices[b0], self.vertices[b1]) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

fn shoelace(points: &[Vec2]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % n];
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
}

fn check_distinct(points: &[Vec2], tol: f64) -> Result<(), GeometryError> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j].x - points[i].x > tol {
                break;
            }
            if (points[j] - points[i]).norm() <= tol {
                return Err(GeometryError::DegenerateContour(format!(
                    "vertices {} and {} coincide",
                    i.min(j),
                    i.max(j)
                )));
            }
        }
    }
    Ok(())
}

fn segments_cross(p: Vec2, q: Vec2, r: Vec2, s: Vec2) -> bool {
    let orient = |a: Vec2, b: Vec2, c: Vec2| (b - a).perp(&(c - a));
    let d1 = orient(p, q, r);
    let d2 = orient(p, q, s);
    let d3 = orient(r, s, p);
    let d4 = orient(r, s, q);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}
