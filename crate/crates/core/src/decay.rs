//! Local energy decay `E(r) = ∫_{T(Q,r)} |∇v|^2` near boundary points,
//! log-log exponent fits and the Caccioppoli ratio.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Polygon2D;
use crate::jets::{JetField, JetOrder};
use crate::quadrature::gauss::gauss_legendre;
use crate::solver::{self, ClampedData, Grid, NodeKind, SolveOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayFit {
    pub base: [f64; 2],
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    pub exponent: f64,
    pub stderr: f64,
    /// Inclusive index range of the radii used in the fit.
    pub window: (usize, usize),
}

impl DecayFit {
    /// Two columns `log r, log E`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["logR", "logE"])?;
        for (r, e) in self.radii.iter().zip(&self.energies) {
            out.write_record([r.ln().to_string(), e.ln().to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `r_j = r0 2^-j`, `j = 0..count`.
pub fn dyadic_radii(r0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| r0 * 0.5f64.powi(j as i32)).collect()
}

/// Default window: drop the coarsest and the finest radius.
pub fn default_window(count: usize) -> (usize, usize) {
    (1, count.saturating_sub(2))
}

/// Least-squares slope of `log E` against `log r` with its standard error.
pub fn fit_exponent(radii: &[f64], energies: &[f64], window: (usize, usize)) -> Result<(f64, f64)> {
    if radii.len() != energies.len() {
        return Err(Error::DimensionMismatch {
            expected: radii.len(),
            got: energies.len(),
        });
    }
    if radii.len() < 4 {
        return Err(Error::Precondition(format!("a decay fit needs at least 4 radii (got {})", radii.len())));
    }
    let (a, b) = window;
    if a >= b || b >= radii.len() {
        return Err(Error::Config(format!("fit window {a}..={b} invalid for {} radii", radii.len())));
    }
    if energies[a..=b].iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Precondition("non-positive energy inside the fit window".into()));
    }
    let xs: Vec<f64> = radii[a..=b].iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = energies[a..=b].iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let stderr = if xs.len() > 2 {
        let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        (sse / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// Errors if `E_j` grows with `j` by more than `1e-12` relative.
pub fn check_monotone(energies: &[f64]) -> Result<()> {
    for j in 1..energies.len() {
        if energies[j] > energies[j - 1] * (1.0 + 1e-12) + f64::MIN_POSITIVE {
            return Err(Error::Precondition(format!(
                "local energy increases from radius {} to {}: {:e} > {:e}",
                j - 1,
                j,
                energies[j],
                energies[j - 1]
            )));
        }
    }
    Ok(())
}

pub fn decay_fit(base: [f64; 2], radii: Vec<f64>, energies: Vec<f64>, window: Option<(usize, usize)>) -> Result<DecayFit> {
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("radii must be strictly decreasing".into()));
    }
    check_monotone(&energies)?;
    let window = window.unwrap_or_else(|| default_window(radii.len()));
    let (exponent, stderr) = fit_exponent(&radii, &energies, window)?;
    Ok(DecayFit {
        base,
        radii,
        energies,
        exponent,
        stderr,
        window,
    })
}

/// Polar Gauss rule on `{Q + s(cos t, sin t) : s in (r0, r1), t in (0, pi)}`,
/// the part of an annulus above the line through `Q`.
fn half_annulus(q: [f64; 2], r0: f64, r1: f64) -> Vec<([f64; 2], f64)> {
    let rs = gauss_legendre(24, r0, r1);
    let ts = gauss_legendre(48, 0.0, std::f64::consts::PI);
    let mut out = Vec::with_capacity(rs.len() * ts.len());
    for (&s, &ws) in rs.x.iter().zip(&rs.w) {
        for (&t, &wt) in ts.x.iter().zip(&ts.w) {
            out.push(([q[0] + s * t.cos(), q[1] + s * t.sin()], ws * wt * s));
        }
    }
    out
}

fn check_half_plane(field: &dyn JetField, q: [f64; 2]) -> Result<()> {
    if field.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: field.dim() });
    }
    if q[1] != 0.0 {
        return Err(Error::Precondition("half-plane fixtures are measured from points on {y = 0}".into()));
    }
    Ok(())
}

/// `E(r)` for a field on the upper half-plane with `Q` on its edge.
pub fn local_energy_half_disk(field: &dyn JetField, q: [f64; 2], radii: &[f64]) -> Result<Vec<f64>> {
    check_half_plane(field, q)?;
    Ok(radii
        .iter()
        .map(|&r| {
            half_annulus(q, 0.0, r)
                .iter()
                .map(|(x, w)| {
                    let j = field.jet(x, JetOrder::Second);
                    w * (j.grad[0] * j.grad[0] + j.grad[1] * j.grad[1])
                })
                .sum()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CaccioppoliRatio {
    pub r: f64,
    /// `r^-2 ∫_{T(r)} |∇v|^2 + ∫_{T(r)} |∇²v|^2`
    pub inner: f64,
    /// `r^-4 ∫_{T(2r) \ T(r)} |v|^2`
    pub outer: f64,
    pub ratio: f64,
}

fn ratio(r: f64, grad: f64, hess: f64, value: f64) -> Result<CaccioppoliRatio> {
    let inner = grad / (r * r) + hess;
    let outer = value / r.powi(4);
    if !(outer > 0.0) {
        return Err(Error::Precondition(format!("zero annulus norm at r = {r}")));
    }
    Ok(CaccioppoliRatio {
        r,
        inner,
        outer,
        ratio: inner / outer,
    })
}

pub fn caccioppoli_half_disk(field: &dyn JetField, q: [f64; 2], r: f64) -> Result<CaccioppoliRatio> {
    check_half_plane(field, q)?;
    let mut g = 0.0;
    let mut hsum = 0.0;
    for (x, w) in half_annulus(q, 0.0, r) {
        let j = field.jet(&x, JetOrder::Second);
        g += w * (j.grad[0] * j.grad[0] + j.grad[1] * j.grad[1]);
        hsum += w * (j.hess[0][0].powi(2) + 2.0 * j.hess[0][1].powi(2) + j.hess[1][1].powi(2));
    }
    let v: f64 = half_annulus(q, r, 2.0 * r).iter().map(|(x, w)| w * field.value(x).powi(2)).sum();
    ratio(r, g, hsum, v)
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// `E(r)` for nodal values by midpoint sums over cells with all corners in
/// the closed domain and centers inside `B(Q, r)`.
pub fn local_energy_grid(grid: &Grid, values: &[f64], q: [f64; 2], radii: &[f64]) -> Result<Vec<f64>> {
    if let Some(r) = radii.iter().find(|r| **r < 4.0 * grid.h) {
        return Err(Error::Precondition(format!("radius {r} is under-resolved by h = {}", grid.h)));
    }
    let h = grid.h;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let k = [grid.index(i, j), grid.index(i + 1, j), grid.index(i, j + 1), grid.index(i + 1, j + 1)];
            if k.iter().any(|&k| grid.kind[k] == NodeKind::Exterior) {
                continue;
            }
            let v: Vec<f64> = k.iter().map(|&k| values[k]).collect();
            let ux = (v[1] - v[0] + v[3] - v[2]) / (2.0 * h);
            let uy = (v[2] - v[0] + v[3] - v[1]) / (2.0 * h);
            let p = grid.coords(k[0]);
            let c = [p[0] + 0.5 * h, p[1] + 0.5 * h];
            cells.push((dist2(c, q), (ux * ux + uy * uy) * h * h));
        }
    }
    Ok(radii
        .iter()
        .map(|r| cells.iter().filter(|(d, _)| *d < r * r).map(|c| c.1).sum())
        .collect())
}

/// Caccioppoli ratio for nodal values, with central differences at nodes
/// whose eight neighbors lie in the closed domain.
pub fn caccioppoli_grid(grid: &Grid, values: &[f64], q: [f64; 2], r: f64) -> Result<CaccioppoliRatio> {
    if r < 4.0 * grid.h {
        return Err(Error::Precondition(format!("radius {r} is under-resolved by h = {}", grid.h)));
    }
    let h = grid.h;
    let a = h * h;
    let (mut g, mut hs, mut v) = (0.0, 0.0, 0.0);
    for k in 0..grid.kind.len() {
        if grid.kind[k] == NodeKind::Exterior {
            continue;
        }
        let p = grid.coords(k);
        let d = dist2(p, q);
        if d < 4.0 * r * r && d >= r * r {
            v += a * values[k] * values[k];
        }
        if d >= r * r || grid.kind[k] != NodeKind::Interior {
            continue;
        }
        let (i, j) = (k % grid.nx, k / grid.nx);
        let mut nb = [[0.0; 3]; 3];
        let mut ok = true;
        for (di, row) in nb.iter_mut().enumerate() {
            for (dj, e) in row.iter_mut().enumerate() {
                let (kind, q) = grid.kind_at(i, j, di as i64 - 1, dj as i64 - 1);
                ok &= kind != NodeKind::Exterior;
                if kind != NodeKind::Exterior {
                    *e = values[q];
                }
            }
        }
        if !ok {
            continue;
        }
        let ux = (nb[2][1] - nb[0][1]) / (2.0 * h);
        let uy = (nb[1][2] - nb[1][0]) / (2.0 * h);
        let uxx = (nb[2][1] - 2.0 * nb[1][1] + nb[0][1]) / a;
        let uyy = (nb[1][2] - 2.0 * nb[1][1] + nb[1][0]) / a;
        let uxy = (nb[2][2] - nb[2][0] - nb[0][2] + nb[0][0]) / (4.0 * a);
        g += a * (ux * ux + uy * uy);
        hs += a * (uxx * uxx + 2.0 * uxy * uxy + uyy * uyy);
    }
    ratio(r, g, hs, v)
}

/// Boundary data vanishing within `zero` of the listed corners and ramping to
/// seeded random cubics beyond `ramp`.
pub struct CornerClampedData {
    pub corners: Vec<[f64; 2]>,
    pub zero: f64,
    pub ramp: f64,
    pub value_coef: Vec<f64>,
    pub deriv_coef: Vec<f64>,
}

const CUBIC_EXPS: [(i32, i32); 10] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];

fn cubic(c: &[f64], p: [f64; 2]) -> f64 {
    c.iter().zip(CUBIC_EXPS).map(|(c, (a, b))| c * p[0].powi(a) * p[1].powi(b)).sum()
}

impl CornerClampedData {
    pub fn random(corners: Vec<[f64; 2]>, zero: f64, ramp: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || (0..CUBIC_EXPS.len()).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect::<Vec<f64>>();
        let value_coef = draw();
        let deriv_coef = draw();
        CornerClampedData {
            corners,
            zero,
            ramp,
            value_coef,
            deriv_coef,
        }
    }

    fn cutoff(&self, p: [f64; 2]) -> f64 {
        let d = self.corners.iter().map(|c| dist2(*c, p).sqrt()).fold(f64::INFINITY, f64::min);
        let t = ((d - self.zero) / (self.ramp - self.zero)).clamp(0.0, 1.0);
        t * t * (3.0 - 2.0 * t)
    }
}

impl ClampedData for CornerClampedData {
    fn value(&self, p: [f64; 2]) -> f64 {
        self.cutoff(p) * cubic(&self.value_coef, p)
    }

    fn normal_derivative(&self, p: [f64; 2], _: [f64; 2]) -> f64 {
        self.cutoff(p) * cubic(&self.deriv_coef, p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CornerComparison {
    pub seed: u64,
    pub h: f64,
    pub reentrant: DecayFit,
    pub convex: Vec<DecayFit>,
    /// Reentrant exponent below every convex one.
    pub ordered: bool,
    pub solver_residual: f64,
    pub solver_converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct LShapeConfig {
    pub h: f64,
    pub r0: f64,
    pub radii: usize,
    pub zero: f64,
    pub ramp: f64,
    pub solver: SolveOptions,
}

impl Default for LShapeConfig {
    fn default() -> Self {
        LShapeConfig {
            h: 1.0 / 128.0,
            r0: 0.5,
            radii: 5,
            zero: 0.55,
            ramp: 0.8,
            solver: SolveOptions {
                backend: solver::Backend::Banded,
                ..SolveOptions::default()
            },
        }
    }
}

pub const L_REENTRANT: [f64; 2] = [0.0, 0.0];
pub const L_CONVEX: [[f64; 2]; 3] = [[-1.0, 1.0], [-1.0, -1.0], [1.0, 1.0]];

/// Solves on the L-shape with random data that vanishes near the reentrant
/// corner and three convex corners, then fits the decay at each of them.
pub fn l_shape_experiment(seed: u64, cfg: &LShapeConfig) -> Result<CornerComparison> {
    let poly = Polygon2D::l_shape();
    let mut corners = vec![L_REENTRANT];
    corners.extend(L_CONVEX);
    let data = CornerClampedData::random(corners, cfg.zero, cfg.ramp, seed);
    let (grid, sol) = solver::solve_polygon(&poly, cfg.h, &data, &cfg.solver)?;
    let radii = dyadic_radii(cfg.r0, cfg.radii);
    let fit = |q: [f64; 2]| -> Result<DecayFit> {
        let e = local_energy_grid(&grid, &sol.values, q, &radii)?;
        decay_fit(q, radii.clone(), e, None)
    };
    let reentrant = fit(L_REENTRANT)?;
    let convex = L_CONVEX.iter().map(|q| fit(*q)).collect::<Result<Vec<_>>>()?;
    let ordered = convex.iter().all(|c| reentrant.exponent < c.exponent);
    Ok(CornerComparison {
        seed,
        h: cfg.h,
        reentrant,
        convex,
        ordered,
        solver_residual: sol.residual,
        solver_converged: sol.converged,
    })
}
