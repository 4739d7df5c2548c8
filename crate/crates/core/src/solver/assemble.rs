use super::grid::{Grid, NodeKind};
use crate::error::{Error, Result};

/// 13-point stencil of `h^4 Δ²`.
pub const STENCIL: [(i64, i64, f64); 13] = [
    (0, 0, 20.0),
    (1, 0, -8.0),
    (-1, 0, -8.0),
    (0, 1, -8.0),
    (0, -1, -8.0),
    (1, 1, 2.0),
    (1, -1, 2.0),
    (-1, 1, 2.0),
    (-1, -1, 2.0),
    (2, 0, 1.0),
    (-2, 0, 1.0),
    (0, 2, 1.0),
    (0, -2, 1.0),
];

/// Symmetric sparse matrix in compressed rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_start: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.row_start[r]..self.row_start[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[r] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_start[r]..self.row_start[r + 1])
                    .find(|&k| self.cols[k] == r)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    /// Largest `|row - col|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|r| (self.row_start[r]..self.row_start[r + 1]).map(move |k| (r, k)))
            .map(|(r, k)| r.abs_diff(self.cols[k]))
            .max()
            .unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        let get = |r: usize, c: usize| -> f64 {
            (self.row_start[r]..self.row_start[r + 1])
                .find(|&k| self.cols[k] == c)
                .map_or(0.0, |k| self.vals[k])
        };
        (0..self.n).all(|r| (self.row_start[r]..self.row_start[r + 1]).all(|k| get(self.cols[k], r) == self.vals[k]))
    }
}

/// `A u = b` on the interior unknowns, scaled by `h^4`.
#[derive(Clone, Debug)]
pub struct System {
    pub matrix: Csr,
    pub rhs: Vec<f64>,
    /// Grid node of each unknown.
    pub nodes: Vec<usize>,
}

/// Assembles the clamped problem `Δ²u = 0`. Ghost nodes one cell outside an
/// edge are eliminated through the central difference of the prescribed
/// normal derivative, `u_ghost = u_mirror + 2h ∂u/∂N`.
pub fn assemble(grid: &Grid) -> Result<System> {
    let mut unknown = vec![usize::MAX; grid.kind.len()];
    let mut nodes = Vec::new();
    for (k, kind) in grid.kind.iter().enumerate() {
        if *kind == NodeKind::Interior {
            unknown[k] = nodes.len();
            nodes.push(k);
        }
    }
    let mut row_start = vec![0];
    let mut cols = Vec::with_capacity(13 * nodes.len());
    let mut vals = Vec::with_capacity(13 * nodes.len());
    let mut rhs = vec![0.0; nodes.len()];
    let h = grid.h;
    for (r, &k) in nodes.iter().enumerate() {
        let (i, j) = (k % grid.nx, k / grid.nx);
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(13);
        let mut diag = 0.0;
        for &(di, dj, w) in &STENCIL {
            let (kind, q) = grid.kind_at(i, j, di, dj);
            match kind {
                NodeKind::Interior if q == k => diag += w,
                NodeKind::Interior => row.push((unknown[q], w)),
                NodeKind::Boundary => rhs[r] -= w * grid.boundary_value[q],
                NodeKind::Exterior => {
                    let (mk, m) = grid.kind_at(i, j, di / 2, dj / 2);
                    let dir = [(di / 2) as f64, (dj / 2) as f64];
                    let aligned = (di.abs() == 2 || dj.abs() == 2)
                        && mk == NodeKind::Boundary
                        && grid.normal[m] == dir;
                    if !aligned {
                        return Err(Error::Unsupported(format!(
                            "stencil of node {:?} leaves the domain away from a straight edge",
                            grid.coords(k)
                        )));
                    }
                    diag += w;
                    rhs[r] -= w * 2.0 * h * grid.boundary_derivative[m];
                }
            }
        }
        row.push((r, diag));
        row.sort_by_key(|e| e.0);
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_start.push(cols.len());
    }
    Ok(System {
        matrix: Csr {
            n: nodes.len(),
            row_start,
            cols,
            vals,
        },
        rhs,
        nodes,
    })
}

/// `Δ²_h` of nodal values at nodes whose whole stencil lies in the closed
/// domain; other nodes get NaN.
pub fn apply_stencil(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let h4 = grid.h.powi(4);
    (0..grid.kind.len())
        .map(|k| {
            let (i, j) = (k % grid.nx, k / grid.nx);
            let mut s = 0.0;
            for &(di, dj, w) in &STENCIL {
                let (kind, q) = grid.kind_at(i, j, di, dj);
                if kind == NodeKind::Exterior {
                    return f64::NAN;
                }
                s += w * values[q];
            }
            s / h4
        })
        .collect()
}
