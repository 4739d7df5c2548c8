//! Rules on the unit sphere `S^m` spanned by an orthonormal frame in `R^n`.

use super::gauss::gauss_jacobi;
use super::lowdisc;

/// Surface measure of the unit sphere `S^m` in `R^(m+1)`.
pub fn sphere_area(m: usize) -> f64 {
    let k = (m + 1) as f64;
    2.0 * std::f64::consts::PI.powf(k / 2.0) / libm::tgamma(k / 2.0)
}

#[derive(Clone, Debug)]
pub struct SphereRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Number of nodes `product` would generate.
    pub fn product_size(m: usize, degree: usize, active: usize) -> usize {
        if m == 0 {
            return 2;
        }
        if active == 0 {
            return 1;
        }
        if m == 1 {
            return degree + 1;
        }
        gegenbauer_nodes(degree) * Self::product_size(m - 1, degree, active - 1)
    }

    /// Product Gauss–Gegenbauer rule exact for polynomials of total degree
    /// `degree` restricted to the sphere of `frame` (m+1 orthonormal vectors).
    /// The integrand may depend only on the components along the first
    /// `active` frame vectors; the remaining sphere factor is integrated by
    /// a single node carrying its full measure.
    pub fn product(frame: &[Vec<f64>], degree: usize, active: usize) -> SphereRule {
        let n = frame[0].len();
        let mut rule = SphereRule {
            points: Vec::new(),
            weights: Vec::new(),
        };
        let mut base = vec![0.0; n];
        build(frame, degree, active, 1.0, 1.0, &mut base, &mut rule);
        rule
    }

    /// Equal-weight rule from Gaussian-normalized R_d points, with antithetic
    /// pairs so odd integrands cancel exactly.
    pub fn low_discrepancy(frame: &[Vec<f64>], count: usize, shift: &[f64]) -> SphereRule {
        let n = frame[0].len();
        let dim = frame.len();
        let m = dim - 1;
        let pairs = count.div_ceil(2).max(1);
        let ud = 2 * dim.div_ceil(2);
        let raw = lowdisc::rd_points(ud, pairs, shift);
        let w = sphere_area(m) / (2 * pairs) as f64;
        let mut rule = SphereRule {
            points: Vec::with_capacity(2 * pairs),
            weights: Vec::with_capacity(2 * pairs),
        };
        for u in raw {
            let mut g = Vec::with_capacity(ud);
            for k in 0..ud / 2 {
                let (a, b) = lowdisc::box_muller(u[2 * k], u[2 * k + 1]);
                g.push(a);
                g.push(b);
            }
            let len: f64 = g[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            if dim == 1 {
                let p = frame[0].clone();
                rule.points.push(p.clone());
                rule.points.push(p.iter().map(|v| -v).collect());
                rule.weights.push(1.0);
                rule.weights.push(1.0);
                continue;
            }
            let mut p = vec![0.0; n];
            for (k, f) in frame.iter().enumerate() {
                for i in 0..n {
                    p[i] += g[k] / len * f[i];
                }
            }
            rule.points.push(p.iter().map(|v| -v).collect());
            rule.points.push(p);
            rule.weights.push(w);
            rule.weights.push(w);
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss nodes per polar level for exactness up to `degree`.
fn gegenbauer_nodes(degree: usize) -> usize {
    degree / 2 + 1
}

fn build(frame: &[Vec<f64>], degree: usize, active: usize, weight: f64, radius: f64, base: &mut [f64], out: &mut SphereRule) {
    let m = frame.len() - 1;
    let n = base.len();
    let emit = |dir: &[f64], s: f64, w: f64, base: &[f64], out: &mut SphereRule| {
        out.points.push((0..n).map(|i| base[i] + radius * s * dir[i]).collect());
        out.weights.push(w);
    };
    if m == 0 {
        emit(&frame[0], 1.0, weight, base, out);
        emit(&frame[0], -1.0, weight, base, out);
        return;
    }
    if active == 0 {
        emit(&frame[0], 1.0, weight * sphere_area(m), base, out);
        return;
    }
    if m == 1 {
        let npts = degree + 1;
        let h = 2.0 * std::f64::consts::PI / npts as f64;
        for j in 0..npts {
            let phi = h * j as f64;
            let (s, c) = phi.sin_cos();
            out.points.push((0..n).map(|i| base[i] + radius * (c * frame[0][i] + s * frame[1][i])).collect());
            out.weights.push(weight * h);
        }
        return;
    }
    let k = gegenbauer_nodes(degree);
    let a = (m as f64 - 2.0) / 2.0;
    let z = gauss_jacobi(k, a, a);
    for (&zi, &wi) in z.x.iter().zip(&z.w) {
        let saved: Vec<f64> = base.to_vec();
        for i in 0..n {
            base[i] += radius * zi * frame[0][i];
        }
        let r = radius * (1.0 - zi * zi).max(0.0).sqrt();
        build(&frame[1..], degree, active - 1, weight * wi, r, base, out);
        base.copy_from_slice(&saved);
    }
}

/// Orthonormal frame of `R^n` starting with `first` (if given), then the
/// span of `axes`, then completed by coordinate vectors. Returns the frame
/// and how many vectors after `first` came from `axes`.
pub fn adapted_frame(n: usize, first: Option<&[f64]>, axes: &[Vec<f64>]) -> (Vec<Vec<f64>>, usize) {
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
    let push = |v: &[f64], frame: &mut Vec<Vec<f64>>| -> bool {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for f in frame.iter() {
                let d: f64 = w.iter().zip(f).map(|(a, b)| a * b).sum();
                for i in 0..n {
                    w[i] -= d * f[i];
                }
            }
        }
        let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-10 * scale.max(1e-300) && frame.len() < n {
            frame.push(w.iter().map(|x| x / len).collect());
            true
        } else {
            false
        }
    };
    if let Some(f) = first {
        push(f, &mut frame);
    }
    let start = frame.len();
    for a in axes {
        push(a, &mut frame);
    }
    let active = frame.len() - start;
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        push(&e, &mut frame);
    }
    (frame, active)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect()
    }

    // Mean of prod x_i^{2k_i} over S^{n-1}.
    fn even_moment(ks: &[u32]) -> f64 {
        let n = ks.len() as f64;
        let s: f64 = ks.iter().map(|&k| k as f64).sum();
        let mut num = 1.0;
        for &k in ks {
            num *= libm::tgamma(k as f64 + 0.5) / libm::tgamma(0.5);
        }
        num * libm::tgamma(n / 2.0) / libm::tgamma(n / 2.0 + s)
    }

    #[test]
    fn areas() {
        assert!((sphere_area(1) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-13);
    }

    #[test]
    fn product_rule_integrates_even_monomials() {
        for n in 2..=6 {
            let rule = SphereRule::product(&identity(n), 8, n);
            assert_eq!(rule.len(), SphereRule::product_size(n - 1, 8, n));
            let cases: Vec<Vec<u32>> = vec![vec![0; n], {
                let mut v = vec![0; n];
                v[0] = 2;
                v[n - 1] = 2;
                v
            }, {
                let mut v = vec![0; n];
                v[n / 2] = 4;
                v
            }, {
                let mut v = vec![0; n];
                v[n - 1] = 3;
                v[0] += 1;
                v
            }];
            for ks in cases {
                let got: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * p.iter().zip(&ks).map(|(x, &k)| x.powi(2 * k as i32)).product::<f64>())
                    .sum();
                let exact = even_moment(&ks) * sphere_area(n - 1);
                assert!((got - exact).abs() < 1e-13 * exact, "n={n} {ks:?}: {got} vs {exact}");
            }
            let odd: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0] * p[1] * p[1]).sum();
            assert!(odd.abs() < 1e-14);
        }
    }

    #[test]
    fn reduced_rule_matches_full_for_axis_functions() {
        let n = 7;
        let (frame, active) = adapted_frame(n, None, &[vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]]);
        assert_eq!(active, 2);
        let full = SphereRule::product(&frame, 6, n);
        let reduced = SphereRule::product(&frame, 6, active);
        assert!(reduced.len() < full.len() / 10);
        let f = |p: &[f64]| (1.0 + p[1] - 2.0 * p[3]).powi(3) + p[1] * p[1] * p[3] * p[3];
        let a: f64 = full.points.iter().zip(&full.weights).map(|(p, w)| w * f(p)).sum();
        let b: f64 = reduced.points.iter().zip(&reduced.weights).map(|(p, w)| w * f(p)).sum();
        assert!((a - b).abs() < 1e-13 * a.abs());
    }

    #[test]
    fn low_discrepancy_rule_area_and_symmetry() {
        let rule = SphereRule::low_discrepancy(&identity(5), 1000, &[0.3; 6]);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - sphere_area(4)).abs() < 1e-12);
        let m: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[2]).sum();
        assert!(m.abs() < 1e-13);
        let x2: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0] * p[0]).sum();
        assert!((x2 / s - 0.2).abs() < 5e-3);
    }
}
