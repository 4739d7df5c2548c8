use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Polygon2D;
use crate::jets::{JetField, JetOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Interior,
    Boundary,
    Exterior,
}

/// Prescribed clamped data: `u` and its outward normal derivative.
pub trait ClampedData: Sync {
    fn value(&self, p: [f64; 2]) -> f64;
    fn normal_derivative(&self, p: [f64; 2], normal: [f64; 2]) -> f64;
}

pub struct ZeroData;

impl ClampedData for ZeroData {
    fn value(&self, _: [f64; 2]) -> f64 {
        0.0
    }

    fn normal_derivative(&self, _: [f64; 2], _: [f64; 2]) -> f64 {
        0.0
    }
}

/// Traces of an exact field, for manufactured solutions.
pub struct ExactData<'a>(pub &'a dyn JetField);

impl ClampedData for ExactData<'_> {
    fn value(&self, p: [f64; 2]) -> f64 {
        self.0.value(&p)
    }

    fn normal_derivative(&self, p: [f64; 2], normal: [f64; 2]) -> f64 {
        let j = self.0.jet(&p, JetOrder::Second);
        j.grad[0] * normal[0] + j.grad[1] * normal[1]
    }
}

/// Node grid over a polygon whose vertices lie on grid nodes and whose edges
/// are axis-parallel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
    pub kind: Vec<NodeKind>,
    /// Outward normal at boundary nodes; zero at corners.
    pub normal: Vec<[f64; 2]>,
    pub boundary_value: Vec<f64>,
    pub boundary_derivative: Vec<f64>,
}

fn on_grid(v: f64, h: f64) -> Option<usize> {
    let k = v / h;
    let r = k.round();
    ((k - r).abs() <= 1e-9 * (1.0 + r.abs()) && r >= 0.0).then_some(r as usize)
}

impl Grid {
    pub fn for_polygon(poly: &Polygon2D, h: f64) -> Result<Grid> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("grid spacing {h} must be positive")));
        }
        let vs = poly.vertices();
        let lo = [vs.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min), vs.iter().map(|v| v[1]).fold(f64::INFINITY, f64::min)];
        let hi = [vs.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max), vs.iter().map(|v| v[1]).fold(f64::NEG_INFINITY, f64::max)];
        for v in vs {
            if on_grid(v[0] - lo[0], h).is_none() || on_grid(v[1] - lo[1], h).is_none() {
                return Err(Error::Unsupported(format!("polygon vertex {v:?} is not a node of the grid with h = {h}")));
            }
        }
        for (a, b) in poly.edges() {
            if a[0] != b[0] && a[1] != b[1] {
                return Err(Error::Unsupported("grid polygons need axis-parallel edges".into()));
            }
        }
        let nx = on_grid(hi[0] - lo[0], h).unwrap() + 1;
        let ny = on_grid(hi[1] - lo[1], h).unwrap() + 1;
        if nx.saturating_mul(ny) > 50_000_000 {
            return Err(Error::Config(format!("grid {nx} x {ny} is too large")));
        }
        let tol = 1e-9 * h;
        let edges: Vec<([f64; 2], [f64; 2])> = poly.edges().collect();
        let mut kind = vec![NodeKind::Exterior; nx * ny];
        let mut normal = vec![[0.0; 2]; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let p = [lo[0] + i as f64 * h, lo[1] + j as f64 * h];
                let k = j * nx + i;
                let touching: Vec<usize> = edges
                    .iter()
                    .enumerate()
                    .filter(|(_, (a, b))| {
                        let within = |c: usize| p[c] >= a[c].min(b[c]) - tol && p[c] <= a[c].max(b[c]) + tol;
                        within(0) && within(1)
                    })
                    .map(|(e, _)| e)
                    .collect();
                if !touching.is_empty() {
                    kind[k] = NodeKind::Boundary;
                    if touching.len() == 1 {
                        normal[k] = poly.edge_normal(touching[0]);
                    }
                } else if poly.contains(p) {
                    kind[k] = NodeKind::Interior;
                }
            }
        }
        let grid = Grid {
            nx,
            ny,
            h,
            origin: lo,
            kind,
            normal,
            boundary_value: vec![0.0; nx * ny],
            boundary_derivative: vec![0.0; nx * ny],
        };
        grid.check_connected()?;
        Ok(grid)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, k: usize) -> [f64; 2] {
        let (i, j) = (k % self.nx, k / self.nx);
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Kind of node `(i + di, j + dj)`; off-grid counts as exterior.
    pub fn kind_at(&self, i: usize, j: usize, di: i64, dj: i64) -> (NodeKind, usize) {
        let a = i as i64 + di;
        let b = j as i64 + dj;
        if a < 0 || b < 0 || a >= self.nx as i64 || b >= self.ny as i64 {
            return (NodeKind::Exterior, usize::MAX);
        }
        let k = self.index(a as usize, b as usize);
        (self.kind[k], k)
    }

    pub fn interior_count(&self) -> usize {
        self.kind.iter().filter(|k| **k == NodeKind::Interior).count()
    }

    pub fn set_data(&mut self, data: &dyn ClampedData) {
        for k in 0..self.kind.len() {
            if self.kind[k] == NodeKind::Boundary {
                let p = self.coords(k);
                self.boundary_value[k] = data.value(p);
                self.boundary_derivative[k] = data.normal_derivative(p, self.normal[k]);
            }
        }
    }

    fn check_connected(&self) -> Result<()> {
        let start = self.kind.iter().position(|k| *k == NodeKind::Interior);
        let Some(start) = start else {
            return Err(Error::InvalidDomain("grid has no interior nodes".into()));
        };
        let mut seen = vec![false; self.kind.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut reached = 1;
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % self.nx, k / self.nx);
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (kind, q) = self.kind_at(i, j, di, dj);
                if kind == NodeKind::Interior && !seen[q] {
                    seen[q] = true;
                    reached += 1;
                    queue.push_back(q);
                }
            }
        }
        if reached != self.interior_count() {
            return Err(Error::InvalidDomain(format!(
                "interior mask is disconnected ({reached} of {} nodes reachable)",
                self.interior_count()
            )));
        }
        Ok(())
    }
}
