//! Gauss–Jacobi rules by the Golub–Welsch eigenvalue method.

use nalgebra::{DMatrix, SymmetricEigen};

/// One-dimensional rule: nodes and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1D {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Nodes and weights for `(1-x)^a (1+x)^b` on `[-1, 1]`, `a, b > -1`.
pub fn gauss_jacobi(npts: usize, a: f64, b: f64) -> Rule1D {
    assert!(npts >= 1, "at least one node");
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let ab = a + b;
    let mu0 = 2f64.powf(ab + 1.0) * libm::tgamma(a + 1.0) * libm::tgamma(b + 1.0) / libm::tgamma(ab + 2.0);
    let mut diag = vec![0.0; npts];
    let mut off = vec![0.0; npts.saturating_sub(1)];
    diag[0] = (b - a) / (ab + 2.0);
    for k in 1..npts {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        diag[k] = (b * b - a * a) / (s * (s + 2.0));
    }
    for k in 1..npts {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let beta = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off[k - 1] = beta.sqrt();
    }
    let jm = DMatrix::from_fn(npts, npts, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..npts)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Rule1D {
        x: pairs.iter().map(|p| p.0).collect(),
        w: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Nodes and weights for `t^a (1-t)^b` on `[0, 1]`.
pub fn gauss_jacobi01(npts: usize, a: f64, b: f64) -> Rule1D {
    let r = gauss_jacobi(npts, b, a);
    let scale = 2f64.powf(a + b + 1.0);
    Rule1D {
        x: r.x.iter().map(|x| 0.5 * (1.0 + x)).collect(),
        w: r.w.iter().map(|w| w / scale).collect(),
    }
}

/// Gauss–Legendre on `[lo, hi]`.
pub fn gauss_legendre(npts: usize, lo: f64, hi: f64) -> Rule1D {
    let r = gauss_jacobi(npts, 0.0, 0.0);
    let h = 0.5 * (hi - lo);
    Rule1D {
        x: r.x.iter().map(|x| lo + h * (1.0 + x)).collect(),
        w: r.w.iter().map(|w| w * h).collect(),
    }
}

/// Rule for `t^a dt` on `[lo, hi]`, `0 <= lo < hi`: Gauss–Jacobi when the
/// window touches zero, otherwise Legendre with the smooth weight folded in.
pub fn power_weight(npts: usize, a: f64, lo: f64, hi: f64) -> Rule1D {
    if lo == 0.0 {
        let r = gauss_jacobi01(npts, a, 0.0);
        let s = hi.powf(a + 1.0);
        Rule1D {
            x: r.x.iter().map(|x| x * hi).collect(),
            w: r.w.iter().map(|w| w * s).collect(),
        }
    } else {
        let r = gauss_legendre(npts, lo, hi);
        Rule1D {
            w: r.x.iter().zip(&r.w).map(|(x, w)| w * x.powf(a)).collect(),
            x: r.x,
        }
    }
}
