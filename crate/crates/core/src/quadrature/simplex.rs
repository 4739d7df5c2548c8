//! Rules on the standard k-simplex in barycentric form; weights sum to one.

use super::gauss::gauss_jacobi01;
use super::lowdisc;

#[derive(Clone, Debug)]
pub struct SimplexRule {
    /// barycentric coordinates, k+1 entries each
    pub bary: Vec<Vec<f64>>,
    /// fractions of the simplex volume
    pub weights: Vec<f64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Collapsed coordinates `u in [0,1]^k` to barycentric coordinates and the
/// Jacobian `prod (1-u_i)^(k-i)`.
fn collapse(u: &[f64]) -> (Vec<f64>, f64) {
    let k = u.len();
    let mut bary = vec![0.0; k + 1];
    let mut rest = 1.0;
    let mut jac = 1.0;
    for (i, &ui) in u.iter().enumerate() {
        bary[i + 1] = rest * ui;
        jac *= (1.0 - ui).powi((k - 1 - i) as i32);
        rest *= 1.0 - ui;
    }
    bary[0] = rest;
    (bary, jac)
}

impl SimplexRule {
    /// Conical product of Gauss–Jacobi rules, `nodes` per direction; exact for
    /// total degree `2 nodes - 1`.
    pub fn stroud(k: usize, nodes: usize) -> SimplexRule {
        if k == 0 {
            return SimplexRule {
                bary: vec![vec![1.0]],
                weights: vec![1.0],
            };
        }
        let rules: Vec<_> = (0..k).map(|i| gauss_jacobi01(nodes, 0.0, (k - 1 - i) as f64)).collect();
        let scale = factorial(k);
        let mut out = SimplexRule {
            bary: Vec::with_capacity(nodes.pow(k as u32)),
            weights: Vec::with_capacity(nodes.pow(k as u32)),
        };
        let mut idx = vec![0usize; k];
        loop {
            let u: Vec<f64> = (0..k).map(|i| rules[i].x[idx[i]]).collect();
            let w: f64 = (0..k).map(|i| rules[i].w[idx[i]]).product();
            let (b, _) = collapse(&u);
            out.bary.push(b);
            out.weights.push(w * scale);
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < nodes {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == k {
                    return out;
                }
            }
        }
    }

    /// Shifted R_d points through the collapsed map, Jacobian-weighted and
    /// normalized to unit sum.
    pub fn low_discrepancy(k: usize, count: usize, shift: &[f64]) -> SimplexRule {
        if k == 0 {
            return Self::stroud(0, 1);
        }
        let mut out = SimplexRule {
            bary: Vec::with_capacity(count),
            weights: Vec::with_capacity(count),
        };
        for u in lowdisc::rd_points(k, count, shift) {
            let (b, jac) = collapse(&u);
            out.bary.push(b);
            out.weights.push(jac);
        }
        let total: f64 = out.weights.iter().sum();
        out.weights.iter_mut().for_each(|w| *w /= total);
        out
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
