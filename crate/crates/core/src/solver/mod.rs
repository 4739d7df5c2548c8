//! Finite differences for the clamped plate `Δ²u = 0` on grid-aligned
//! polygons in the plane. Two-dimensional only.

pub mod assemble;
pub mod banded;
pub mod cg;
pub mod grid;
pub mod io;

use serde::{Deserialize, Serialize};

pub use assemble::{apply_stencil, assemble, Csr, System};
pub use grid::{ClampedData, ExactData, Grid, NodeKind, ZeroData};

use crate::error::{Error, Result};
use crate::geometry::Polygon2D;
use crate::jets::{JetField, JetOrder, MultiPoly, PolyField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Backend {
    Cg,
    Banded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub backend: Backend,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 200_000,
            backend: Backend::Cg,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveResult {
    /// Nodal values on the whole grid; NaN outside the domain.
    pub values: Vec<f64>,
    /// `|b - A u| / |b|` of the discrete system.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub backend: Backend,
}

/// Solves the assembled system and scatters the result onto the grid.
pub fn solve(grid: &Grid, options: &SolveOptions) -> Result<SolveResult> {
    if !(options.tol > 0.0 && options.tol < 1.0) {
        return Err(Error::Config(format!("solver tolerance {} not in (0, 1)", options.tol)));
    }
    let system = assemble(grid)?;
    let (x, residual, iterations, converged) = match options.backend {
        Backend::Cg => {
            let out = cg::conjugate_gradient(&system.matrix, &system.rhs, options.tol, options.max_iter);
            if !out.converged {
                log::warn!(
                    "conjugate gradients stopped after {} iterations at relative residual {:.3e}",
                    out.iterations,
                    out.relative_residual
                );
            }
            (out.x, out.relative_residual, out.iterations, out.converged)
        }
        Backend::Banded => {
            if grid.nx.max(grid.ny) > 513 {
                return Err(Error::Config("the banded backend is limited to grids up to 512 cells wide".into()));
            }
            let f = banded::BandCholesky::factor(&system.matrix)?;
            let x = f.solve(&system.rhs);
            let mut ax = vec![0.0; x.len()];
            system.matrix.mul(&x, &mut ax);
            let bn = system.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
            let rn = system.rhs.iter().zip(&ax).map(|(b, v)| (b - v) * (b - v)).sum::<f64>().sqrt();
            let rel = if bn == 0.0 { 0.0 } else { rn / bn };
            (x, rel, 1, rel <= options.tol.max(1e-8))
        }
    };
    let mut values: Vec<f64> = grid
        .kind
        .iter()
        .enumerate()
        .map(|(k, kind)| match kind {
            NodeKind::Boundary => grid.boundary_value[k],
            _ => f64::NAN,
        })
        .collect();
    for (v, &k) in x.iter().zip(&system.nodes) {
        values[k] = *v;
    }
    Ok(SolveResult {
        values,
        residual,
        iterations,
        converged,
        backend: options.backend,
    })
}

/// Grid, data and solve in one call.
pub fn solve_polygon(poly: &Polygon2D, h: f64, data: &dyn ClampedData, options: &SolveOptions) -> Result<(Grid, SolveResult)> {
    let mut grid = Grid::for_polygon(poly, h)?;
    grid.set_data(data);
    let result = solve(&grid, options)?;
    Ok((grid, result))
}

/// Discrete `L^2` error `sqrt(h^2 sum (u_h - u)^2)` over interior nodes.
pub fn l2_error(grid: &Grid, values: &[f64], exact: &dyn Fn([f64; 2]) -> f64) -> f64 {
    let mut s = 0.0;
    for (k, kind) in grid.kind.iter().enumerate() {
        if *kind == NodeKind::Interior {
            let e = values[k] - exact(grid.coords(k));
            s += e * e;
        }
    }
    (s * grid.h * grid.h).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceRow {
    pub h: f64,
    pub l2_error: f64,
    /// Error at the previous (coarser) `h` divided by this one.
    pub ratio: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Manufactured-solution study: clamped data from `exact` on each grid.
pub fn convergence_study(poly: &Polygon2D, exact: &PolyField, hs: &[f64], options: &SolveOptions) -> Result<Vec<ConvergenceRow>> {
    if exact.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: exact.dim() });
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &h in hs {
        let (grid, res) = solve_polygon(poly, h, &ExactData(exact), options)?;
        let err = l2_error(&grid, &res.values, &|p| exact.value(&p));
        rows.push(ConvergenceRow {
            h,
            l2_error: err,
            ratio: rows.last().map(|r| r.l2_error / err),
            iterations: res.iterations,
            residual: res.residual,
        });
    }
    Ok(rows)
}

/// `x^3 + x y^2`.
pub fn manufactured_cubic() -> PolyField {
    let p = MultiPoly::from_spec(
        2,
        &[
            crate::jets::MonomialSpec { exps: vec![3, 0], coef: 1.0 },
            crate::jets::MonomialSpec { exps: vec![1, 2], coef: 1.0 },
        ],
    )
    .expect("valid cubic");
    PolyField::new(p).expect("2D field")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Fixture {
    pub name: String,
    pub spec: Vec<crate::jets::MonomialSpec>,
    pub biharmonic: bool,
    /// `v = dv/dy = 0` on `{y = 0}`.
    pub clamped: bool,
}

/// Exact local solutions on the upper half-plane. Only the clamped ones feed
/// decay fits; the rest are manufactured solutions.
pub fn half_plane_fixtures() -> Vec<(Fixture, PolyField)> {
    let list: [(&str, &[(u32, u32)]); 4] = [("y^2", &[(0, 2)]), ("xy^2", &[(1, 2)]), ("x^2y", &[(2, 1)]), ("x^3+xy^2", &[(3, 0), (1, 2)])];
    list.iter()
        .map(|(name, monos)| {
            let spec: Vec<crate::jets::MonomialSpec> = monos
                .iter()
                .map(|&(a, b)| crate::jets::MonomialSpec { exps: vec![a, b], coef: 1.0 })
                .collect();
            let field = PolyField::new(MultiPoly::from_spec(2, &spec).expect("valid fixture")).expect("2D field");
            let biharmonic = field.poly().laplacian().laplacian().is_zero();
            let clamped = (0..=16).all(|k| {
                let x = -2.0 + 0.25 * k as f64;
                let j = field.jet(&[x, 0.0], JetOrder::Second);
                j.u == 0.0 && j.grad[1] == 0.0
            });
            (
                Fixture {
                    name: name.to_string(),
                    spec,
                    biharmonic,
                    clamped,
                },
                field,
            )
        })
        .collect()
}
