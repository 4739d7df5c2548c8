//! Node sets: parametrized families of weighted nodes visited on the fly.
//! Each visit calls `f(x, normal, w)`; the normal is empty for volume rules.
//! Weights already contain the factor `rho^-beta`.

use super::gauss::Rule1D;
use super::simplex::SimplexRule;
use super::sphere::SphereRule;
use crate::geometry::{dot, norm, sub};

pub type Visitor<'a> = dyn FnMut(&[f64], &[f64], f64) + 'a;

pub trait NodeSet: Send + Sync {
    fn count(&self) -> u64;
    fn visit(&self, f: &mut Visitor<'_>);
}

fn rho_weight(x: &[f64], y: &[f64], beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        r2.powf(-0.5 * beta)
    }
}

/// Ball with the pole `y` on its sphere: `x = y + L t sigma (t nu + sqrt(1-t^2) theta)`
/// with chord length `L = 2R`; the weight is folded into the `t` and `sigma` rules.
pub struct BallPole {
    pub y: Vec<f64>,
    pub nu: Vec<f64>,
    pub two_r: f64,
    pub t: Rule1D,
    pub sigma: Rule1D,
    pub theta: SphereRule,
}

impl NodeSet for BallPole {
    fn count(&self) -> u64 {
        (self.t.len() * self.sigma.len() * self.theta.len()) as u64
    }

    fn visit(&self, f: &mut Visitor<'_>) {
        let n = self.y.len();
        let mut omega = vec![0.0; n];
        let mut x = vec![0.0; n];
        for (&t, &wt) in self.t.x.iter().zip(&self.t.w) {
            let st = (1.0 - t * t).max(0.0).sqrt();
            for (th, &wth) in self.theta.points.iter().zip(&self.theta.weights) {
                for i in 0..n {
                    omega[i] = t * self.nu[i] + st * th[i];
                }
                for (&s, &ws) in self.sigma.x.iter().zip(&self.sigma.w) {
                    let r = self.two_r * t * s;
                    for i in 0..n {
                        x[i] = self.y[i] + r * omega[i];
                    }
                    f(&x, &[], wt * wth * ws);
                }
            }
        }
    }
}

/// Ball in coordinates centered at `c`: `x = c + s (t e + sqrt(1-t^2) theta)`,
/// explicit `rho^-beta`.
pub struct BallCentered {
    pub c: Vec<f64>,
    pub e: Vec<f64>,
    pub y: Vec<f64>,
    pub beta: f64,
    pub s: Rule1D,
    pub t: Rule1D,
    pub theta: SphereRule,
}

impl NodeSet for BallCentered {
    fn count(&self) -> u64 {
        (self.t.len() * self.s.len() * self.theta.len()) as u64
    }

    fn visit(&self, f: &mut Visitor<'_>) {
        let n = self.c.len();
        let mut omega = vec![0.0; n];
        let mut x = vec![0.0; n];
        for (&t, &wt) in self.t.x.iter().zip(&self.t.w) {
            let st = (1.0 - t * t).max(0.0).sqrt();
            for (th, &wth) in self.theta.points.iter().zip(&self.theta.weights) {
                for i in 0..n {
                    omega[i] = t * self.e[i] + st * th[i];
                }
                for (&s, &ws) in self.s.x.iter().zip(&self.s.w) {
                    for i in 0..n {
                        x[i] = self.c[i] + s * omega[i];
                    }
                    let w = wt * wth * ws * rho_weight(&x, &self.y, self.beta);
                    f(&x, &[], w);
                }
            }
        }
    }
}

/// Sphere with the pole on it: `x - c = R(-nu (1 - 2s) + 2 sqrt(s(1-s)) theta)`,
/// `s = sin^2(phi/2)`; the weight lives in the `s` rule.
pub struct SphereCap {
    pub c: Vec<f64>,
    pub nu: Vec<f64>,
    pub radius: f64,
    pub s: Rule1D,
    pub theta: SphereRule,
}

impl NodeSet for SphereCap {
    fn count(&self) -> u64 {
        (self.s.len() * self.theta.len()) as u64
    }

    fn visit(&self, f: &mut Visitor<'_>) {
        let n = self.c.len();
        let mut x = vec![0.0; n];
        let mut normal = vec![0.0; n];
        for (&s, &ws) in self.s.x.iter().zip(&self.s.w) {
            let a = -(1.0 - 2.0 * s);
            let b = 2.0 * (s * (1.0 - s)).max(0.0).sqrt();
            for (th, &wth) in self.theta.points.iter().zip(&self.theta.weights) {
                for i in 0..n {
                    normal[i] = a * self.nu[i] + b * th[i];
                    x[i] = self.c[i] + self.radius * normal[i];
                }
                f(&x, &normal, ws * wth);
            }
        }
    }
}

/// Sphere in centered coordinates `x = c + R(t e + sqrt(1-t^2) theta)`, explicit `rho^-beta`.
pub struct SphereCentered {
    pub c: Vec<f64>,
    pub e: Vec<f64>,
    pub radius: f64,
    pub y: Vec<f64>,
    pub beta: f64,
    pub t: Rule1D,
    pub theta: SphereRule,
}

impl NodeSet for SphereCentered {
    fn count(&self) -> u64 {
        (self.t.len() * self.theta.len()) as u64
    }

    fn visit(&self, f: &mut Visitor<'_>) {
        let n = self.c.len();
        let mut x = vec![0.0; n];
        let mut normal = vec![0.0; n];
        for (&t, &wt) in self.t.x.iter().zip(&self.t.w) {
            let st = (1.0 - t * t).max(0.0).sqrt();
            for (th, &wth) in self.theta.points.iter().zip(&self.theta.weights) {
                for i in 0..n {
                    normal[i] = t * self.e[i] + st * th[i];
                    x[i] = self.c[i] + self.radius * normal[i];
                }
                f(&x, &normal, wt * wth * rho_weight(&x, &self.y, self.beta));
            }
        }
    }
}

/// A cone `{a + tau (z - a)}` over a base k-simplex, with its Jacobian
/// `sqrt det(E^T E) / k!`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub apex: Vec<f64>,
    pub base: Vec<Vec<f64>>,
    pub jac: f64,
    pub normal: Vec<f64>,
}

impl Cone {
    pub fn new(apex: &[f64], base: Vec<Vec<f64>>, normal: Vec<f64>) -> Cone {
        let k = base.len() - 1;
        let mut cols: Vec<Vec<f64>> = (1..=k).map(|i| sub(&base[i], &base[0])).collect();
        cols.push(sub(&base[0], apex));
        let m = cols.len();
        let mut g = nalgebra::DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                g[(i, j)] = dot(&cols[i], &cols[j]);
            }
        }
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        Cone {
            apex: apex.to_vec(),
            base,
            jac: g.determinant().max(0.0).sqrt() / fact,
            normal,
        }
    }
}

/// Cones whose apex is the pole: `rho = tau |z - a|`, so `tau^-beta` sits in
/// the `tau` rule and `|z - a|^-beta` is applied per base node.
pub struct PoleCones {
    pub cones: Vec<Cone>,
    pub beta: f64,
    pub tau: Rule1D,
    pub base: SimplexRule,
}

impl NodeSet for PoleCones {
    fn count(&self) -> u64 {
        (self.cones.len() * self.tau.len() * self.base.len()) as u64
    }

    fn visit(&self, f: &mut Visitor<'_>) {
        let Some(first) = self.cones.first() else { return };
        let n = first.apex.len();
        let mut z = vec![0.0; n];
        let mut x = vec![0.0; n];
        for cone in &self.cones {
            for (bary, &wb) in self.base.bary.iter().zip(&self.base.weights) {
                z.iter_mut().for_each(|v| *v = 0.0);
                for (l, v) in bary.iter().zip(&cone.base) {
                    for i in 0..n {
                        z[i] += l * v[i];
                    }
                }
                for i in 0..n {
                    z[i] -= cone.apex[i];
                }
                let wz = cone.jac * wb * if self.beta == 0.0 { 1.0 } else { norm(&z).powf(-self.beta) };
                for (&tau, &wt) in self.tau.x.iter().zip(&self.tau.w) {
                    for i in 0..n {
                        x[i] = cone.apex[i] + tau * z[i];
                    }
                    f(&x, &cone.normal, wz * wt);
                }
            }
        }
    }
}

/// Simplices of any dimension with explicit `rho^-beta`; weights are volumes.
pub struct Simplices {
    pub simplices: Vec<(Vec<Vec<f64>>, f64, Vec<f64>)>,
    pub y: Vec<f64>,
    pub beta: f64,
    pub rule: SimplexRule,
}

impl NodeSet for Simplices {
    fn count(&self) -> u64 {
        (self.simplices.len() * self.rule.len()) as u64
    }

    fn visit(&self, f: &mut Visitor<'_>) {
        let Some(first) = self.simplices.first() else { return };
        let n = first.0[0].len();
        let mut x = vec![0.0; n];
        for (verts, vol, normal) in &self.simplices {
            for (bary, &w) in self.rule.bary.iter().zip(&self.rule.weights) {
                x.iter_mut().for_each(|v| *v = 0.0);
                for (l, v) in bary.iter().zip(verts) {
                    for i in 0..n {
                        x[i] += l * v[i];
                    }
                }
                f(&x, normal, vol * w * rho_weight(&x, &self.y, self.beta));
            }
        }
    }
}
