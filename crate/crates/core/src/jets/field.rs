//! Jet evaluation for polynomial fields, including clamped test fields kept
//! in factored form for speed.

use std::sync::OnceLock;

use super::compiled::{CompiledPoly, PowerTable, MAX_DIM};
use super::poly::{MultiPoly, DEFAULT_FIELD_DEGREE_CAP, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::geometry::ConvexPolytope;

/// How many derivative orders a caller needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum JetOrder {
    /// value, gradient, Hessian, Laplacian
    Second,
    /// adds the bilaplacian
    Fourth,
    /// adds all third partials and the gradient of the Laplacian
    Full,
}

pub type Third = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

#[derive(Clone, Debug)]
pub struct Jet {
    pub n: usize,
    pub u: f64,
    pub grad: [f64; MAX_DIM],
    pub hess: [[f64; MAX_DIM]; MAX_DIM],
    pub lap: f64,
    /// NaN unless evaluated with `JetOrder::Fourth` or higher.
    pub bilap: f64,
    pub grad_lap: [f64; MAX_DIM],
    pub third: Option<Box<Third>>,
}

impl Jet {
    pub fn zero(n: usize) -> Self {
        Jet {
            n,
            u: 0.0,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
            lap: 0.0,
            bilap: f64::NAN,
            grad_lap: [0.0; MAX_DIM],
            third: None,
        }
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.n]
    }
}

/// Rotational symmetry of a field: invariance under every orthogonal map of
/// `x - center` that fixes `axes` pointwise. `center: None` means any center.
#[derive(Clone, Debug, PartialEq)]
pub struct Symmetry {
    pub center: Option<Vec<f64>>,
    pub axes: Vec<Vec<f64>>,
}

pub trait JetField: Send + Sync {
    fn dim(&self) -> usize;

    /// Total polynomial degree.
    fn degree(&self) -> usize;

    fn jet(&self, x: &[f64], order: JetOrder) -> Jet;

    fn value(&self, x: &[f64]) -> f64 {
        self.jet(x, JetOrder::Second).u
    }

    /// Degree of the field once factors depending only on `|x - center|` are
    /// discounted; bounds the angular degree in coordinates centered there.
    fn angular_degree(&self, _center: &[f64]) -> usize {
        self.degree()
    }

    fn symmetry(&self) -> Option<Symmetry> {
        None
    }

    /// Expanded polynomial form.
    fn poly(&self) -> &MultiPoly;
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i..n {
            v.push((i, j));
        }
    }
    v
}

fn used_axes(p: &MultiPoly) -> Vec<Vec<f64>> {
    let n = p.dim();
    let mut used = vec![false; n];
    for (e, _) in p.terms() {
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                used[i] = true;
            }
        }
    }
    (0..n)
        .filter(|&i| used[i])
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        })
        .collect()
}

struct FourthParts {
    bilap: CompiledPoly,
}

struct FullParts {
    third: Vec<((usize, usize, usize), CompiledPoly)>,
    grad_lap: Vec<CompiledPoly>,
}

/// General polynomial field with every jet entry compiled from exact
/// derivatives.
pub struct PolyField {
    p: MultiPoly,
    n: usize,
    u: CompiledPoly,
    grad: Vec<CompiledPoly>,
    hess: Vec<((usize, usize), CompiledPoly)>,
    lap: CompiledPoly,
    max_exp: usize,
    fourth: OnceLock<FourthParts>,
    full: OnceLock<FullParts>,
}

impl PolyField {
    pub fn new(p: MultiPoly) -> Result<Self> {
        let n = p.dim();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Unsupported(format!("dimension {n}")));
        }
        let grad_p: Vec<MultiPoly> = (0..n).map(|i| p.derivative(i)).collect();
        let hess = upper_pairs(n)
            .into_iter()
            .map(|(i, j)| ((i, j), CompiledPoly::new(&grad_p[i].derivative(j))))
            .collect();
        Ok(PolyField {
            n,
            u: CompiledPoly::new(&p),
            grad: grad_p.iter().map(CompiledPoly::new).collect(),
            hess,
            lap: CompiledPoly::new(&p.laplacian()),
            max_exp: p.max_exponent(),
            p,
            fourth: OnceLock::new(),
            full: OnceLock::new(),
        })
    }

    fn fourth(&self) -> &FourthParts {
        self.fourth.get_or_init(|| FourthParts {
            bilap: CompiledPoly::new(&self.p.laplacian().laplacian()),
        })
    }

    fn full(&self) -> &FullParts {
        self.full.get_or_init(|| {
            let n = self.n;
            let mut third = Vec::new();
            for i in 0..n {
                let pi = self.p.derivative(i);
                for j in i..n {
                    let pij = pi.derivative(j);
                    for k in j..n {
                        third.push(((i, j, k), CompiledPoly::new(&pij.derivative(k))));
                    }
                }
            }
            let lap = self.p.laplacian();
            FullParts {
                third,
                grad_lap: (0..n).map(|i| CompiledPoly::new(&lap.derivative(i))).collect(),
            }
        })
    }
}

impl JetField for PolyField {
    fn dim(&self) -> usize {
        self.n
    }

    fn degree(&self) -> usize {
        self.p.degree()
    }

    fn jet(&self, x: &[f64], order: JetOrder) -> Jet {
        let t = PowerTable::new(&x[..self.n], self.max_exp);
        let mut j = Jet::zero(self.n);
        j.u = self.u.eval(&t);
        for (i, g) in self.grad.iter().enumerate() {
            j.grad[i] = g.eval(&t);
        }
        for ((a, b), h) in &self.hess {
            let v = h.eval(&t);
            j.hess[*a][*b] = v;
            j.hess[*b][*a] = v;
        }
        j.lap = self.lap.eval(&t);
        if order >= JetOrder::Fourth {
            j.bilap = self.fourth().bilap.eval(&t);
        }
        if order >= JetOrder::Full {
            let full = self.full();
            let mut d3 = Box::new([[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]);
            for ((a, b, c), q) in &full.third {
                let v = q.eval(&t);
                for (p, q, r) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                    d3[*p][*q][*r] = v;
                }
            }
            j.third = Some(d3);
            for (i, g) in full.grad_lap.iter().enumerate() {
                j.grad_lap[i] = g.eval(&t);
            }
        }
        j
    }

    fn value(&self, x: &[f64]) -> f64 {
        let t = PowerTable::new(&x[..self.n], self.max_exp);
        self.u.eval(&t)
    }

    fn symmetry(&self) -> Option<Symmetry> {
        Some(Symmetry {
            center: None,
            axes: used_axes(&self.p),
        })
    }

    fn poly(&self) -> &MultiPoly {
        &self.p
    }
}

/// Second-order jet of a scalar; the Hessian is filled on `i <= j` only until
/// `finish` mirrors it.
#[derive(Clone, Copy)]
struct Jet2 {
    v: f64,
    g: [f64; MAX_DIM],
    h: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet2 {
    fn constant(v: f64) -> Self {
        Jet2 {
            v,
            g: [0.0; MAX_DIM],
            h: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    fn mul(&self, o: &Jet2, n: usize) -> Jet2 {
        let mut r = Jet2::constant(self.v * o.v);
        for i in 0..n {
            r.g[i] = self.v * o.g[i] + o.v * self.g[i];
        }
        for i in 0..n {
            for j in i..n {
                r.h[i][j] = self.v * o.h[i][j]
                    + o.v * self.h[i][j]
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        r
    }

    /// `self^m` by the chain rule.
    fn powi(&self, m: u32, n: usize) -> Jet2 {
        if m == 1 {
            return *self;
        }
        let mf = m as f64;
        let vm2 = self.v.powi(m as i32 - 2);
        let vm1 = vm2 * self.v;
        let mut r = Jet2::constant(vm1 * self.v);
        for i in 0..n {
            r.g[i] = mf * vm1 * self.g[i];
        }
        for i in 0..n {
            for j in i..n {
                r.h[i][j] = mf * vm1 * self.h[i][j] + mf * (mf - 1.0) * vm2 * self.g[i] * self.g[j];
            }
        }
        r
    }
}

#[derive(Clone, Debug)]
enum Factor {
    /// `b - <a, x>`
    Affine { a: Vec<f64>, b: f64 },
    /// `r^2 - |x - c|^2`
    BallSlack { c: Vec<f64>, r: f64 },
}

impl Factor {
    fn poly(&self) -> MultiPoly {
        match self {
            Factor::Affine { a, b } => MultiPoly::affine_slack(a, *b),
            Factor::BallSlack { c, r } => MultiPoly::ball_slack(c, *r),
        }
    }

    fn jet(&self, x: &[f64], n: usize) -> Jet2 {
        let mut j = Jet2::constant(0.0);
        match self {
            Factor::Affine { a, b } => {
                let mut v = *b;
                for i in 0..n {
                    v -= a[i] * x[i];
                    j.g[i] = -a[i];
                }
                j.v = v;
            }
            Factor::BallSlack { c, r } => {
                let mut s = 0.0;
                for i in 0..n {
                    let d = x[i] - c[i];
                    s += d * d;
                    j.g[i] = -2.0 * d;
                    j.h[i][i] = -2.0;
                }
                j.v = r * r - s;
            }
        }
        j
    }
}

/// `u = prod_k f_k^2 * p` with each `f_k` vanishing on part of the boundary,
/// so `u` and `grad u` vanish there. Second-order jets use the product rule
/// on the factors; higher orders come from the expanded polynomial.
pub struct ClampedField {
    n: usize,
    factors: Vec<Factor>,
    p: PolyField,
    expanded: PolyField,
    ball_center: Option<Vec<f64>>,
}

impl ClampedField {
    fn build(n: usize, factors: Vec<Factor>, p: MultiPoly, cap: usize) -> Result<Self> {
        if p.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.dim(),
            });
        }
        if cap > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree: cap,
                cap: MAX_DEGREE,
            });
        }
        let factor_degree: usize = factors
            .iter()
            .map(|f| match f {
                Factor::Affine { .. } => 2,
                Factor::BallSlack { .. } => 4,
            })
            .sum();
        let degree = factor_degree + p.degree();
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        let mut expanded = p.clone();
        for f in &factors {
            expanded = expanded.mul(&f.poly().pow(2)?)?;
        }
        let ball_center = factors.iter().find_map(|f| match f {
            Factor::BallSlack { c, .. } => Some(c.clone()),
            _ => None,
        });
        Ok(ClampedField {
            n,
            factors,
            p: PolyField::new(p)?,
            expanded: PolyField::new(expanded)?,
            ball_center,
        })
    }

    /// `(R^2 - |x - c|^2)^2 p(x)`, degree capped at the default cap.
    pub fn ball(center: &[f64], radius: f64, p: MultiPoly) -> Result<Self> {
        Self::ball_with_cap(center, radius, p, DEFAULT_FIELD_DEGREE_CAP)
    }

    pub fn ball_with_cap(center: &[f64], radius: f64, p: MultiPoly, cap: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain("radius must be positive".into()));
        }
        let f = Factor::BallSlack {
            c: center.to_vec(),
            r: radius,
        };
        Self::build(center.len(), vec![f], p, cap)
    }

    /// `prod_i (b_i - <a_i, x>)^2 p(x)` over the polytope's half-spaces.
    pub fn polytope(poly: &ConvexPolytope, p: MultiPoly) -> Result<Self> {
        Self::polytope_with_cap(poly, p, DEFAULT_FIELD_DEGREE_CAP)
    }

    pub fn polytope_with_cap(poly: &ConvexPolytope, p: MultiPoly, cap: usize) -> Result<Self> {
        let factors = poly
            .halfspaces()
            .iter()
            .map(|h| Factor::Affine {
                a: h.a.clone(),
                b: h.b,
            })
            .collect();
        Self::build(poly.dim(), factors, p, cap)
    }

    pub fn smooth_factor(&self) -> &MultiPoly {
        self.p.poly()
    }
}

impl JetField for ClampedField {
    fn dim(&self) -> usize {
        self.n
    }

    fn degree(&self) -> usize {
        self.expanded.degree()
    }

    fn jet(&self, x: &[f64], order: JetOrder) -> Jet {
        let n = self.n;
        let pj = self.p.jet(x, JetOrder::Second);
        let mut acc = Jet2 {
            v: pj.u,
            g: pj.grad,
            h: pj.hess,
        };
        for f in &self.factors {
            let fj = f.jet(x, n).powi(2, n);
            acc = acc.mul(&fj, n);
        }
        let mut j = Jet::zero(n);
        j.u = acc.v;
        j.grad = acc.g;
        let mut lap = 0.0;
        for a in 0..n {
            lap += acc.h[a][a];
            for b in a..n {
                j.hess[a][b] = acc.h[a][b];
                j.hess[b][a] = acc.h[a][b];
            }
        }
        j.lap = lap;
        if order >= JetOrder::Fourth {
            let e = self.expanded.jet(x, order);
            j.bilap = e.bilap;
            j.grad_lap = e.grad_lap;
            j.third = e.third;
        }
        j
    }

    fn angular_degree(&self, center: &[f64]) -> usize {
        match &self.ball_center {
            Some(c) if self.factors.len() == 1 && c.iter().zip(center).all(|(a, b)| (a - b).abs() <= 1e-14) => {
                self.p.degree()
            }
            _ => self.degree(),
        }
    }

    fn symmetry(&self) -> Option<Symmetry> {
        match &self.ball_center {
            Some(c) if self.factors.len() == 1 => Some(Symmetry {
                center: Some(c.clone()),
                axes: used_axes(self.p.poly()),
            }),
            _ => None,
        }
    }

    fn poly(&self) -> &MultiPoly {
        self.expanded.poly()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexPolytope;

    fn ball_field(n: usize, p: MultiPoly) -> ClampedField {
        ClampedField::ball(&vec![0.0; n], 1.0, p).unwrap()
    }

    #[test]
    fn clamped_ball_center_values() {
        let f = ball_field(4, MultiPoly::constant(4, 1.0));
        let j = f.jet(&[0.0; 4], JetOrder::Fourth);
        assert_eq!(j.u, 1.0);
        assert_eq!(j.bilap, 192.0);
    }

    #[test]
    fn clamped_ball_vanishes_on_sphere() {
        let f = ball_field(3, MultiPoly::constant(3, 1.0));
        let j = f.jet(&[1.0, 0.0, 0.0], JetOrder::Second);
        assert_eq!(j.u, 0.0);
        assert!(j.grad().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn odd_factor_gives_odd_field() {
        let f = ball_field(3, MultiPoly::var(3, 0));
        let x = [0.2, -0.3, 0.1];
        let mx = [-0.2, 0.3, -0.1];
        let a = f.jet(&x, JetOrder::Full);
        let b = f.jet(&mx, JetOrder::Full);
        assert!((a.u + b.u).abs() < 1e-15);
        for i in 0..3 {
            assert!((a.grad[i] - b.grad[i]).abs() < 1e-15);
            for k in 0..3 {
                assert!((a.hess[i][k] + b.hess[i][k]).abs() < 1e-14);
            }
            assert!((a.grad_lap[i] - b.grad_lap[i]).abs() < 1e-13);
        }
        assert!((a.bilap + b.bilap).abs() < 1e-12);
    }

    #[test]
    fn clamped_square_center() {
        let sq = ConvexPolytope::cube(2, 0.0, 1.0).unwrap();
        let f = ClampedField::polytope(&sq, MultiPoly::constant(2, 1.0)).unwrap();
        assert!((f.value(&[0.5, 0.5]) - 0.00390625).abs() < 1e-17);
    }

    #[test]
    fn factored_jets_match_expanded_polynomial() {
        let sq = ConvexPolytope::corner_simplex(3).unwrap();
        let p = MultiPoly::constant(3, 1.0)
            .add(&MultiPoly::var(3, 0).scale(0.5))
            .unwrap();
        let f = ClampedField::polytope(&sq, p).unwrap();
        let direct = PolyField::new(f.poly().clone()).unwrap();
        let x = [0.21, 0.13, 0.4];
        let a = f.jet(&x, JetOrder::Second);
        let b = direct.jet(&x, JetOrder::Second);
        let s = b.hess.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((a.u - b.u).abs() <= 1e-13 * s);
        for i in 0..3 {
            assert!((a.grad[i] - b.grad[i]).abs() <= 1e-13 * s);
            for k in 0..3 {
                assert!((a.hess[i][k] - b.hess[i][k]).abs() <= 1e-13 * s);
            }
        }
        assert!((a.lap - b.lap).abs() <= 1e-13 * s);
    }

    #[test]
    fn degree_cap_rejects_large_products() {
        let cube = ConvexPolytope::cube(4, 0.0, 1.0).unwrap();
        let r = ClampedField::polytope(&cube, MultiPoly::constant(4, 1.0));
        assert!(matches!(r, Err(Error::DegreeCap { degree: 16, cap: 12 })));
        assert!(ClampedField::polytope_with_cap(&cube, MultiPoly::constant(4, 1.0), 16).is_ok());
    }

    #[test]
    fn ball_symmetry_axes_follow_smooth_factor() {
        let p = MultiPoly::constant(5, 1.0)
            .add(&MultiPoly::var(5, 2))
            .unwrap();
        let f = ball_field(5, p);
        let s = f.symmetry().unwrap();
        assert_eq!(s.axes, vec![vec![0.0, 0.0, 1.0, 0.0, 0.0]]);
        assert_eq!(f.angular_degree(&[0.0; 5]), 1);
        assert_eq!(f.angular_degree(&[0.5, 0.0, 0.0, 0.0, 0.0]), 5);
    }
}
