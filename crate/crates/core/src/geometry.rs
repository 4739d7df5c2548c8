//! Domains: balls, bounded convex polytopes given by half-spaces, and simple
//! polygons in the plane.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::MAX_DIM;
use crate::quadrature::lowdisc;
use crate::quadrature::simplex::SimplexRule;
use crate::quadrature::sphere::{self, SphereRule};

pub type Point = Vec<f64>;

/// Relative boundary tolerance (times the domain diameter).
pub const BOUNDARY_TOL: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_point(x: &[f64]) -> Result<()> {
    if x.len() < 2 || x.len() > MAX_DIM {
        return Err(Error::Unsupported(format!("dimension {} outside 2..=8", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidDomain("non-finite coordinate".into()));
    }
    Ok(())
}

/// Rank of a set of row vectors, relative tolerance `tol`.
pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax.max(1.0)).count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        check_point(&center)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidDomain(format!("ball radius {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn unit(n: usize) -> Result<Self> {
        Ball::new(vec![0.0; n], 1.0)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        let n = self.dim() as f64;
        std::f64::consts::PI.powf(n / 2.0) * self.radius.powf(n) / libm::tgamma(n / 2.0 + 1.0)
    }

    pub fn area(&self) -> f64 {
        sphere::sphere_area(self.dim() - 1) * self.radius.powi(self.dim() as i32 - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// index of the defining half-space
    pub halfspace: usize,
    pub vertices: Vec<usize>,
}

/// `{x : <a_i, x> <= b_i}`, bounded with non-empty interior.
#[derive(Debug)]
pub struct ConvexPolytope {
    n: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    diameter: f64,
    tol: f64,
    facet_simplices: OnceLock<Vec<Vec<Vec<usize>>>>,
}

impl Clone for ConvexPolytope {
    fn clone(&self) -> Self {
        ConvexPolytope {
            n: self.n,
            halfspaces: self.halfspaces.clone(),
            vertices: self.vertices.clone(),
            facets: self.facets.clone(),
            diameter: self.diameter,
            tol: self.tol,
            facet_simplices: OnceLock::new(),
        }
    }
}

fn n_choose_k(n: usize, k: usize) -> u64 {
    let mut r: u64 = 1;
    for i in 0..k as u64 {
        r = r * (n as u64 - i) / (i + 1);
    }
    r
}

fn for_each_subset(m: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::with_capacity(k), f);
}

impl ConvexPolytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let n = halfspaces
            .first()
            .map(|h| h.a.len())
            .ok_or_else(|| Error::InvalidDomain("no half-spaces".into()))?;
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Unsupported(format!("dimension {n} outside 2..=8")));
        }
        let mut hs = Vec::with_capacity(halfspaces.len());
        for h in halfspaces {
            check_dim(n, h.a.len())?;
            let len = norm(&h.a);
            if !(len > 0.0) || !len.is_finite() || !h.b.is_finite() {
                return Err(Error::InvalidDomain("degenerate half-space normal".into()));
            }
            hs.push(Halfspace {
                a: h.a.iter().map(|v| v / len).collect(),
                b: h.b / len,
            });
        }
        let m = hs.len();
        if n_choose_k(m, n) > 2_000_000 {
            return Err(Error::Unsupported(format!("{m} half-spaces in dimension {n}")));
        }
        let rows: Vec<Vec<f64>> = hs.iter().map(|h| h.a.clone()).collect();
        if rank(&rows, 1e-12) < n {
            return Err(Error::InvalidDomain("unbounded: normals do not span".into()));
        }
        let scale = hs.iter().map(|h| h.b.abs()).fold(1.0, f64::max);
        let probe_tol = 1e-10 * scale;

        // Extreme rays of the recession cone lie on (n-1)-subsets of tight constraints.
        let mut unbounded = false;
        for_each_subset(m, n - 1, &mut |s| {
            if unbounded {
                return;
            }
            // Null direction by the generalized cross product.
            let mut d: Vec<f64> = (0..n)
                .map(|j| {
                    let minor = DMatrix::from_fn(n - 1, n - 1, |i, k| hs[s[i]].a[if k < j { k } else { k + 1 }]);
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * minor.determinant()
                })
                .collect();
            let len = norm(&d);
            if len < 1e-12 {
                return;
            }
            d.iter_mut().for_each(|v| *v /= len);
            for sign in [1.0, -1.0] {
                if hs.iter().all(|h| sign * dot(&h.a, &d) <= 1e-12) {
                    unbounded = true;
                }
            }
        });
        if unbounded {
            return Err(Error::InvalidDomain("unbounded polytope".into()));
        }

        let mut vertices: Vec<Point> = Vec::new();
        for_each_subset(m, n, &mut |s| {
            let a = DMatrix::from_fn(n, n, |i, j| hs[s[i]].a[j]);
            let b = DVector::from_fn(n, |i, _| hs[s[i]].b);
            let lu = a.lu();
            if lu.determinant().abs() < 1e-12 {
                return;
            }
            let x = match lu.solve(&b) {
                Some(x) => x,
                None => return,
            };
            let x: Vec<f64> = x.iter().cloned().collect();
            if hs.iter().all(|h| dot(&h.a, &x) <= h.b + probe_tol)
                && !vertices.iter().any(|v| norm(&sub(v, &x)) <= probe_tol)
            {
                vertices.push(x);
            }
        });
        if vertices.is_empty() {
            return Err(Error::InvalidDomain("empty polytope".into()));
        }
        let mut diameter: f64 = 0.0;
        for (i, v) in vertices.iter().enumerate() {
            for w in &vertices[i + 1..] {
                diameter = diameter.max(norm(&sub(v, w)));
            }
        }
        let tol = BOUNDARY_TOL * diameter.max(f64::MIN_POSITIVE);
        let centroid = Self::mean(&vertices);
        let interior_margin = hs.iter().map(|h| h.b - dot(&h.a, &centroid)).fold(f64::INFINITY, f64::min);
        if !(interior_margin > 1e-9 * diameter) {
            return Err(Error::InvalidDomain("polytope has empty interior".into()));
        }
        let mut facets = Vec::new();
        for (i, h) in hs.iter().enumerate() {
            let on: Vec<usize> = (0..vertices.len())
                .filter(|&k| (dot(&h.a, &vertices[k]) - h.b).abs() <= 1e3 * tol)
                .collect();
            if on.len() >= n {
                let rows: Vec<Vec<f64>> = on.iter().map(|&k| sub(&vertices[k], &vertices[on[0]])).collect();
                if rank(&rows, 1e-10) == n - 1 {
                    facets.push(Facet {
                        halfspace: i,
                        vertices: on,
                    });
                }
            }
        }
        Ok(ConvexPolytope {
            n,
            halfspaces: hs,
            vertices,
            facets,
            diameter,
            tol,
            facet_simplices: OnceLock::new(),
        })
    }

    /// `[lo, hi]^n`
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        let mut hs = Vec::new();
        for i in 0..n {
            let mut a = vec![0.0; n];
            a[i] = -1.0;
            hs.push(Halfspace { a: a.clone(), b: -lo });
            a[i] = 1.0;
            hs.push(Halfspace { a, b: hi });
        }
        Self::new(hs)
    }

    /// `{x >= 0, sum x <= 1}`
    pub fn corner_simplex(n: usize) -> Result<Self> {
        let mut hs = Vec::new();
        for i in 0..n {
            let mut a = vec![0.0; n];
            a[i] = -1.0;
            hs.push(Halfspace { a, b: 0.0 });
        }
        hs.push(Halfspace {
            a: vec![1.0; n],
            b: 1.0,
        });
        Self::new(hs)
    }

    fn mean(pts: &[Point]) -> Point {
        let n = pts[0].len();
        let mut c = vec![0.0; n];
        for p in pts {
            for i in 0..n {
                c[i] += p[i];
            }
        }
        c.iter().map(|v| v / pts.len() as f64).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Average of the vertices; strictly interior.
    pub fn centroid(&self) -> Point {
        Self::mean(&self.vertices)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = vec![f64::INFINITY; self.n];
        let mut hi = vec![f64::NEG_INFINITY; self.n];
        for v in &self.vertices {
            for i in 0..self.n {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.n, x.len())?;
        Ok(self.halfspaces.iter().all(|h| dot(&h.a, x) <= h.b + self.tol))
    }

    /// `max_i (<a_i, x> - b_i)`: negative inside, zero on the boundary.
    pub fn signed_gap(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| dot(&h.a, x) - h.b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Half-spaces tight at `x`.
    pub fn active_set(&self, x: &[f64]) -> Vec<usize> {
        (0..self.halfspaces.len())
            .filter(|&i| (dot(&self.halfspaces[i].a, x) - self.halfspaces[i].b).abs() <= 1e3 * self.tol)
            .collect()
    }

    pub fn on_boundary(&self, x: &[f64]) -> bool {
        self.signed_gap(x).abs() <= 1e3 * self.tol
    }

    fn affine_dim(&self, verts: &[usize]) -> usize {
        if verts.len() <= 1 {
            return 0;
        }
        let rows: Vec<Vec<f64>> = verts[1..].iter().map(|&k| sub(&self.vertices[k], &self.vertices[verts[0]])).collect();
        rank(&rows, 1e-10)
    }

    /// Faces of dimension `dim - 1` of the face spanned by `verts`, each with a
    /// half-space tight on it.
    pub fn subfaces(&self, verts: &[usize], dim: usize) -> Vec<(Vec<usize>, usize)> {
        let mut out: Vec<(Vec<usize>, usize)> = Vec::new();
        for (j, h) in self.halfspaces.iter().enumerate() {
            let sub: Vec<usize> = verts
                .iter()
                .cloned()
                .filter(|&k| (dot(&h.a, &self.vertices[k]) - h.b).abs() <= 1e3 * self.tol)
                .collect();
            if sub.len() < dim || sub.len() == verts.len() {
                continue;
            }
            if out.iter().any(|(s, _)| *s == sub) {
                continue;
            }
            if self.affine_dim(&sub) == dim - 1 {
                out.push((sub, j));
            }
        }
        out
    }

    /// Pulling triangulation of the face spanned by `verts` (of dimension `dim`).
    pub fn triangulate_face(&self, verts: &[usize], dim: usize) -> Vec<Vec<usize>> {
        if dim == 0 {
            return vec![vec![verts[0]]];
        }
        if verts.len() == dim + 1 {
            return vec![verts.to_vec()];
        }
        let v0 = verts[0];
        let mut out = Vec::new();
        for (sub, _) in self.subfaces(verts, dim) {
            if sub.contains(&v0) {
                continue;
            }
            for s in self.triangulate_face(&sub, dim - 1) {
                let mut simplex = vec![v0];
                simplex.extend(s);
                out.push(simplex);
            }
        }
        out
    }

    /// Simplices (vertex ids) triangulating each facet, in facet order.
    pub fn facet_simplices(&self) -> &[Vec<Vec<usize>>] {
        self.facet_simplices.get_or_init(|| {
            self.facets
                .iter()
                .map(|f| self.triangulate_face(&f.vertices, self.n - 1))
                .collect()
        })
    }

    /// Bases for cones from the point `p` (on the face spanned by `verts`)
    /// covering that face: simplices triangulating the subfaces that miss `p`.
    pub fn cone_bases(&self, verts: &[usize], dim: usize, p: &[f64]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (sub, j) in self.subfaces(verts, dim) {
            let h = &self.halfspaces[j];
            if (dot(&h.a, p) - h.b).abs() <= 1e3 * self.tol {
                continue;
            }
            out.extend(self.triangulate_face(&sub, dim - 1));
        }
        out
    }

    /// Simplices of dimension n from the centroid over the facet triangulation.
    pub fn volume_simplices(&self) -> Vec<Vec<Point>> {
        let c = self.centroid();
        let mut out = Vec::new();
        for simplices in self.facet_simplices() {
            for s in simplices {
                let mut pts = vec![c.clone()];
                pts.extend(s.iter().map(|&k| self.vertices[k].clone()));
                out.push(pts);
            }
        }
        out
    }

    pub fn volume(&self) -> f64 {
        self.volume_simplices().iter().map(|s| simplex_volume(s)).sum()
    }

    pub fn facet_area(&self, f: usize) -> f64 {
        self.facet_simplices()[f]
            .iter()
            .map(|s| simplex_volume(&s.iter().map(|&k| self.vertices[k].clone()).collect::<Vec<_>>()))
            .sum()
    }

    pub fn area(&self) -> f64 {
        (0..self.facets.len()).map(|f| self.facet_area(f)).sum()
    }

    pub fn facet_center(&self, f: usize) -> Point {
        let pts: Vec<Point> = self.facets[f].vertices.iter().map(|&k| self.vertices[k].clone()).collect();
        Self::mean(&pts)
    }

    /// Facet index whose half-space has the given outward normal, if any.
    pub fn facet_with_normal(&self, a: &[f64]) -> Option<usize> {
        self.facets
            .iter()
            .position(|f| norm(&sub(&self.halfspaces[f.halfspace].a, a)) < 1e-12)
    }

    pub fn normal(&self, f: usize) -> &[f64] {
        &self.halfspaces[self.facets[f].halfspace].a
    }
}

/// k-volume of the simplex with k+1 vertices in R^n.
pub fn simplex_volume(pts: &[Point]) -> f64 {
    let k = pts.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let n = pts[0].len();
    let e = DMatrix::from_fn(n, k, |i, j| pts[j + 1][i] - pts[0][i]);
    let g = e.transpose() * &e;
    let det = g.determinant().max(0.0);
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    det.sqrt() / fact
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<[f64; 2]>,
    tol: f64,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], p: [f64; 2], d: f64| {
        d == 0.0 && p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn seg_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1])).clamp(0.0, 1.0);
    let q = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1]];
    (q[0] * q[0] + q[1] * q[1]).sqrt()
}

impl Polygon2D {
    /// Simple polygon; stored counter-clockwise.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("non-finite polygon vertex".into()));
        }
        for i in 0..m {
            for j in i + 1..m {
                let adjacent = j == i + 1 || (i == 0 && j == m - 1);
                let (p1, p2) = (vertices[i], vertices[(i + 1) % m]);
                let (q1, q2) = (vertices[j], vertices[(j + 1) % m]);
                if !adjacent && segments_intersect(p1, p2, q1, q2) {
                    return Err(Error::InvalidDomain("polygon is not simple".into()));
                }
            }
            if vertices[i] == vertices[(i + 1) % m] {
                return Err(Error::InvalidDomain("repeated polygon vertex".into()));
            }
        }
        let mut poly = Polygon2D { vertices, tol: 0.0 };
        let area = poly.signed_area();
        if area == 0.0 {
            return Err(Error::InvalidDomain("degenerate polygon".into()));
        }
        if area < 0.0 {
            poly.vertices.reverse();
        }
        let mut diam: f64 = 0.0;
        for a in &poly.vertices {
            for b in &poly.vertices {
                diam = diam.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        poly.tol = BOUNDARY_TOL * diam;
        Ok(poly)
    }

    /// `[-1,1]^2` minus the lower-right quadrant; reentrant corner at the origin.
    pub fn l_shape() -> Self {
        Polygon2D::new(vec![[-1.0, -1.0], [0.0, -1.0], [0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [-1.0, 1.0]])
            .expect("valid L-shape")
    }

    pub fn unit_square() -> Self {
        Polygon2D::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).expect("valid square")
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn signed_area(&self) -> f64 {
        let m = self.vertices.len();
        (0..m)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % m];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let m = self.vertices.len();
        (0..m).map(move |i| (self.vertices[i], self.vertices[(i + 1) % m]))
    }

    /// Outward unit normal of edge `i` (polygon is counter-clockwise).
    pub fn edge_normal(&self, i: usize) -> [f64; 2] {
        let m = self.vertices.len();
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % m];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let l = (dx * dx + dy * dy).sqrt();
        [dy / l, -dx / l]
    }

    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        self.edges().map(|(a, b)| seg_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        if self.boundary_distance(p) <= self.tol {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Signed distance: negative inside.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let d = self.boundary_distance(p);
        if self.contains(p) {
            -d
        } else {
            d
        }
    }

    pub fn is_convex(&self) -> bool {
        let m = self.vertices.len();
        (0..m).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % m], self.vertices[(i + 2) % m]) >= 0.0)
    }

    /// `per_edge` midpoint samples on each edge with outward normals.
    pub fn boundary_samples(&self, per_edge: usize) -> Vec<BoundaryPatch> {
        let mut out = Vec::new();
        for (i, (a, b)) in self.edges().enumerate() {
            let nrm = self.edge_normal(i);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            for k in 0..per_edge {
                let t = (k as f64 + 0.5) / per_edge as f64;
                out.push(BoundaryPatch {
                    point: vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
                    normal: nrm.to_vec(),
                    weight: len / per_edge as f64,
                });
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum Domain {
    Ball(Ball),
    Polytope(ConvexPolytope),
    Polygon(Polygon2D),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DomainSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Polytope { halfspaces: Vec<Halfspace> },
    Polygon2d { vertices: Vec<[f64; 2]> },
}

impl Domain {
    pub fn from_spec(spec: DomainSpec) -> Result<Self> {
        Ok(match spec {
            DomainSpec::Ball { center, radius } => Domain::Ball(Ball::new(center, radius)?),
            DomainSpec::Polytope { halfspaces } => Domain::Polytope(ConvexPolytope::new(halfspaces)?),
            DomainSpec::Polygon2d { vertices } => Domain::Polygon(Polygon2D::new(vertices)?),
        })
    }

    pub fn to_spec(&self) -> DomainSpec {
        match self {
            Domain::Ball(b) => DomainSpec::Ball {
                center: b.center.clone(),
                radius: b.radius,
            },
            Domain::Polytope(p) => DomainSpec::Polytope {
                halfspaces: p.halfspaces().to_vec(),
            },
            Domain::Polygon(p) => DomainSpec::Polygon2d {
                vertices: p.vertices().to_vec(),
            },
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_spec(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_spec())?)
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball(b) => b.dim(),
            Domain::Polytope(p) => p.dim(),
            Domain::Polygon(_) => 2,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Ball(b) => 2.0 * b.radius,
            Domain::Polytope(p) => p.diameter(),
            Domain::Polygon(p) => {
                let mut d: f64 = 0.0;
                for a in p.vertices() {
                    for b in p.vertices() {
                        d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
                    }
                }
                d
            }
        }
    }

    pub fn tolerance(&self) -> f64 {
        BOUNDARY_TOL * self.diameter()
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Domain::Polygon(p) => p.is_convex(),
            _ => true,
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Domain::Ball(b) => norm(&sub(x, &b.center)) <= b.radius + self.tolerance(),
            Domain::Polytope(p) => p.contains(x)?,
            Domain::Polygon(p) => p.contains([x[0], x[1]]),
        })
    }

    /// Negative inside, zero on the boundary. Exact distance for balls and
    /// polygons; for polytopes the largest constraint violation, which has the
    /// same sign.
    pub fn signed_distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Domain::Ball(b) => norm(&sub(x, &b.center)) - b.radius,
            Domain::Polytope(p) => p.signed_gap(x),
            Domain::Polygon(p) => p.signed_distance([x[0], x[1]]),
        })
    }

    pub fn on_boundary(&self, x: &[f64]) -> Result<bool> {
        Ok(self.signed_distance(x)?.abs() <= 1e3 * self.tolerance())
    }

    /// Outward unit normal at a boundary point (the first active facet for
    /// polytope edges and vertices).
    pub fn normal_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        match self {
            Domain::Ball(b) => {
                let d = sub(x, &b.center);
                let l = norm(&d);
                Ok(d.iter().map(|v| v / l).collect())
            }
            Domain::Polytope(p) => p
                .active_set(x)
                .first()
                .map(|&i| p.halfspaces()[i].a.clone())
                .ok_or_else(|| Error::Precondition("point is not on the boundary".into())),
            Domain::Polygon(p) => {
                let q = [x[0], x[1]];
                let (i, _) = p
                    .edges()
                    .enumerate()
                    .map(|(i, (a, b))| (i, seg_distance(q, a, b)))
                    .fold((0, f64::INFINITY), |m, e| if e.1 < m.1 { e } else { m });
                Ok(p.edge_normal(i).to_vec())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPatch {
    pub point: Point,
    pub normal: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleScheme {
    FacetGrid,
    LowDiscrepancy,
}

/// Boundary nodes whose weights integrate over the surface measure.
pub fn surface_sample(domain: &Domain, budget: usize, scheme: SampleScheme, seed: u64) -> Result<Vec<BoundaryPatch>> {
    let budget = budget.max(1);
    match domain {
        Domain::Polygon(_) => Err(Error::Unsupported(
            "polygon surfaces are sampled by the solver grid, not by surface rules".into(),
        )),
        Domain::Ball(b) => {
            let n = b.dim();
            let frame: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect();
            let rule = match scheme {
                SampleScheme::FacetGrid => {
                    let mut degree = 1;
                    while SphereRule::product_size(n - 1, degree + 2, n) <= budget {
                        degree += 2;
                    }
                    SphereRule::product(&frame, degree, n)
                }
                SampleScheme::LowDiscrepancy => {
                    let shift = lowdisc::shift(n, seed, 0);
                    SphereRule::low_discrepancy(&frame, budget, &shift)
                }
            };
            let scale = b.radius.powi(n as i32 - 1);
            Ok(rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, &w)| BoundaryPatch {
                    point: b.center.iter().zip(p).map(|(c, v)| c + b.radius * v).collect(),
                    normal: p.clone(),
                    weight: w * scale,
                })
                .collect())
        }
        Domain::Polytope(p) => {
            let n = p.dim();
            let total: usize = p.facet_simplices().iter().map(|s| s.len()).sum();
            let per = (budget / total.max(1)).max(1);
            let rule = match scheme {
                SampleScheme::FacetGrid => {
                    let mut k = 1;
                    while (k + 1usize).pow(n as u32 - 1) <= per {
                        k += 1;
                    }
                    SimplexRule::stroud(n - 1, k)
                }
                SampleScheme::LowDiscrepancy => SimplexRule::low_discrepancy(n - 1, per, &lowdisc::shift(n - 1, seed, 0)),
            };
            let mut out = Vec::new();
            for (f, simplices) in p.facet_simplices().iter().enumerate() {
                let normal = p.normal(f).to_vec();
                for s in simplices {
                    let verts: Vec<Point> = s.iter().map(|&k| p.vertices()[k].clone()).collect();
                    let vol = simplex_volume(&verts);
                    for (bary, &w) in rule.bary.iter().zip(&rule.weights) {
                        let mut x = vec![0.0; n];
                        for (l, v) in bary.iter().zip(&verts) {
                            for i in 0..n {
                                x[i] += l * v[i];
                            }
                        }
                        out.push(BoundaryPatch {
                            point: x,
                            normal: normal.clone(),
                            weight: w * vol,
                        });
                    }
                }
            }
            Ok(out)
        }
    }
}

/// `min over patches of <x - y, N(x)>`.
pub fn convexity_support(y: &[f64], patches: &[BoundaryPatch]) -> f64 {
    patches
        .iter()
        .map(|p| dot(&sub(&p.point, y), &p.normal))
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force `min over pairs (P, Q) of <P - Q, N(P)>`, with the minimizing pair.
pub fn convexity_pair_probe(patches: &[BoundaryPatch]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for (i, p) in patches.iter().enumerate() {
        for (j, q) in patches.iter().enumerate() {
            let v = dot(&sub(&p.point, &q.point), &p.normal);
            if v < best.0 {
                best = (v, i, j);
            }
        }
    }
    best
}
