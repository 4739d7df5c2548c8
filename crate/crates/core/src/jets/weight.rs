//! Closed-form derivatives of the singular weight `rho^-alpha`, `rho = |x - y|`.

use super::compiled::MAX_DIM;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct WeightJet {
    pub n: usize,
    pub alpha: f64,
    pub rho: f64,
    /// `x - y`
    pub d: [f64; MAX_DIM],
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    pub hess: [[f64; MAX_DIM]; MAX_DIM],
    pub lap: f64,
    pub bilap: f64,
}

impl WeightJet {
    pub fn new(y: &[f64], alpha: f64, x: &[f64]) -> Result<Self> {
        let n = y.len();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut d = [0.0; MAX_DIM];
        let mut r2 = 0.0;
        for i in 0..n {
            d[i] = x[i] - y[i];
            r2 += d[i] * d[i];
        }
        if r2 == 0.0 {
            return Err(Error::AtPole);
        }
        let rho = r2.sqrt();
        let value = rho.powf(-alpha);
        let w2 = value / r2;
        let w4 = w2 / r2;
        let nf = n as f64;
        let mut grad = [0.0; MAX_DIM];
        let mut hess = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            grad[i] = -alpha * w2 * d[i];
            for j in 0..n {
                hess[i][j] = alpha * (alpha + 2.0) * d[i] * d[j] * w4;
            }
            hess[i][i] -= alpha * w2;
        }
        Ok(WeightJet {
            n,
            alpha,
            rho,
            d,
            value,
            grad,
            hess,
            lap: -alpha * (nf - 2.0 - alpha) * w2,
            bilap: alpha * (alpha + 2.0) * (nf - 2.0 - alpha) * (nf - 4.0 - alpha) * w4,
        })
    }

    /// `d^2/dx_i dx_j ((x - y)_k rho^-alpha)`.
    pub fn moment_hess(&self, i: usize, j: usize, k: usize) -> f64 {
        let a = self.alpha;
        let w2 = self.value / (self.rho * self.rho);
        let w4 = w2 / (self.rho * self.rho);
        let delta = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
        let d = &self.d;
        -a * (delta(i, k) * d[j] + delta(i, j) * d[k] + delta(j, k) * d[i]) * w2
            + a * (a + 2.0) * d[i] * d[j] * d[k] * w4
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(y: &[f64], alpha: f64, x: &[f64]) -> f64 {
        let r: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        r.powf(-alpha)
    }

    // Fourth-order central differences of the Laplacian of the Laplacian.
    fn fd_bilap(y: &[f64], alpha: f64, x: &[f64], h: f64) -> f64 {
        let n = x.len();
        let lap = |p: &[f64]| {
            let mut s = 0.0;
            for i in 0..n {
                let mut q = p.to_vec();
                let c = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
                for (k, &ck) in c.iter().enumerate() {
                    q[i] = p[i] + (k as f64 - 2.0) * h;
                    s += ck * weight(y, alpha, &q);
                }
            }
            s / (h * h)
        };
        let mut s = 0.0;
        for i in 0..n {
            let mut q = x.to_vec();
            let c = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
            for (k, &ck) in c.iter().enumerate() {
                q[i] = x[i] + (k as f64 - 2.0) * h;
                s += ck * lap(&q);
            }
        }
        s / (h * h)
    }

    #[test]
    fn bilaplacian_n4_alpha1_at_unit_distance() {
        let y = [0.0; 4];
        let x = [0.5, 0.5, 0.5, 0.5];
        let w = WeightJet::new(&y, 1.0, &x).unwrap();
        assert!((w.bilap - (-3.0)).abs() < 1e-14);
        assert!((fd_bilap(&y, 1.0, &x, 1e-2) - (-3.0)).abs() < 1e-4);
    }

    #[test]
    fn harmonic_and_biharmonic_exponents() {
        let y = [0.1, 0.0, -0.2, 0.3, 0.0];
        let x = [1.0, 0.4, 0.2, -0.3, 0.7];
        let n = 5.0;
        assert_eq!(WeightJet::new(&y, n - 2.0, &x).unwrap().bilap, 0.0);
        assert_eq!(WeightJet::new(&y, n - 2.0, &x).unwrap().lap, 0.0);
        assert_eq!(WeightJet::new(&y, n - 4.0, &x).unwrap().bilap, 0.0);
    }

    #[test]
    fn pole_is_an_error() {
        assert!(matches!(WeightJet::new(&[1.0, 2.0], 1.0, &[1.0, 2.0]), Err(Error::AtPole)));
    }

    #[test]
    fn hessian_trace_is_laplacian_and_matches_differences() {
        let y = [0.3, -0.1, 0.2];
        let x = [1.1, 0.5, -0.4];
        let a = 1.7;
        let w = WeightJet::new(&y, a, &x).unwrap();
        let tr: f64 = (0..3).map(|i| w.hess[i][i]).sum();
        assert!((tr - w.lap).abs() < 1e-14);
        let h = 1e-4;
        for i in 0..3 {
            for j in 0..3 {
                let f = |si: f64, sj: f64| {
                    let mut q = x;
                    q[i] += si * h;
                    q[j] += sj * h;
                    weight(&y, a, &q)
                };
                let fd = (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (4.0 * h * h);
                assert!((fd - w.hess[i][j]).abs() < 1e-6, "{i}{j}");
            }
        }
    }

    #[test]
    fn moment_hessian_matches_differences() {
        let y = [0.0, 0.0, 0.0, 0.0];
        let x = [0.6, -0.2, 0.3, 0.9];
        let a = 2.5;
        let w = WeightJet::new(&y, a, &x).unwrap();
        let h = 1e-4;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let f = |si: f64, sj: f64| {
                        let mut q = x;
                        q[i] += si * h;
                        q[j] += sj * h;
                        q[k] * weight(&y, a, &q)
                    };
                    let fd = (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (4.0 * h * h);
                    assert!((fd - w.moment_hess(i, j, k)).abs() < 1e-6);
                }
            }
        }
    }
}
