//! Sparse multivariate polynomials with exact coefficient arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard limit on the total degree of any polynomial built by this module.
pub const MAX_DEGREE: usize = 24;

/// Default degree cap for clamped test fields.
pub const DEFAULT_FIELD_DEGREE_CAP: usize = 12;

/// Sparse polynomial in `dim` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

/// One monomial in the JSON layout `{"exps": [...], "coef": c}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MonomialSpec {
    pub exps: Vec<u32>,
    pub coef: f64,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.insert(vec![0; dim], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0u8; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.insert(e, 1.0);
        p
    }

    pub fn monomial(coef: f64, exps: &[u32]) -> Result<Self> {
        let deg: u32 = exps.iter().sum();
        if deg as usize > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree: deg as usize,
                cap: MAX_DEGREE,
            });
        }
        let mut p = Self::zero(exps.len());
        p.insert(exps.iter().map(|&e| e as u8).collect(), coef);
        Ok(p)
    }

    /// `b - <a, x>`, the slack of a half-space constraint.
    pub fn affine_slack(a: &[f64], b: f64) -> Self {
        let dim = a.len();
        let mut p = Self::constant(dim, b);
        for (i, &ai) in a.iter().enumerate() {
            let mut e = vec![0u8; dim];
            e[i] = 1;
            p.insert(e, -ai);
        }
        p
    }

    /// `r^2 - |x - c|^2`.
    pub fn ball_slack(center: &[f64], radius: f64) -> Self {
        let dim = center.len();
        let c2: f64 = center.iter().map(|c| c * c).sum();
        let mut p = Self::constant(dim, radius * radius - c2);
        for (i, &ci) in center.iter().enumerate() {
            let mut e = vec![0u8; dim];
            e[i] = 1;
            p.insert(e.clone(), 2.0 * ci);
            e[i] = 2;
            p.insert(e, -1.0);
        }
        p
    }

    fn insert(&mut self, exps: Vec<u8>, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v += c;
                if *v == 0.0 {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    /// Highest exponent of any single variable.
    pub fn max_exponent(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|&x| x as usize))
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.insert(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            out.insert(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let degree = self.degree() + other.degree();
        if degree > MAX_DEGREE && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeCap {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let mut out = Self::zero(self.dim);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::constant(self.dim, 1.0);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                out.insert(d, c * e[i] as f64);
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            for i in 0..self.dim {
                if e[i] >= 2 {
                    let mut d = e.clone();
                    d[i] -= 2;
                    out.insert(d, c * (e[i] as f64) * (e[i] as f64 - 1.0));
                }
            }
        }
        out
    }

    /// Direct evaluation; the compiled form in `field` is the fast path.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .zip(x)
                    .fold(c, |acc, (&k, &xi)| acc * xi.powi(k as i32))
            })
            .sum()
    }

    /// Substitute `x_i = value` and return a polynomial in the same variables
    /// (with `x_i` no longer appearing).
    pub fn restrict(&self, i: usize, value: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            let mut d = e.clone();
            let k = d[i];
            d[i] = 0;
            out.insert(d, c * value.powi(k as i32));
        }
        out
    }

    pub fn to_spec(&self) -> Vec<MonomialSpec> {
        self.terms
            .iter()
            .map(|(e, &c)| MonomialSpec {
                exps: e.iter().map(|&k| k as u32).collect(),
                coef: c,
            })
            .collect()
    }

    pub fn from_spec(dim: usize, spec: &[MonomialSpec]) -> Result<Self> {
        let mut out = Self::zero(dim);
        for m in spec {
            if m.exps.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.exps.len(),
                });
            }
            let deg: u32 = m.exps.iter().sum();
            if deg as usize > MAX_DEGREE {
                return Err(Error::DegreeCap {
                    degree: deg as usize,
                    cap: MAX_DEGREE,
                });
            }
            out.insert(m.exps.iter().map(|&k| k as u8).collect(), m.coef);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_spec())?)
    }

    /// Parse the JSON list form; the dimension is read off the first monomial.
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Vec<MonomialSpec> = serde_json::from_str(s)?;
        let dim = spec
            .first()
            .map(|m| m.exps.len())
            .ok_or_else(|| Error::Config("empty polynomial list".into()))?;
        Self::from_spec(dim, &spec)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_of_x1_squared_x2() {
        let p = MultiPoly::monomial(1.0, &[2, 1]).unwrap();
        let lap = p.laplacian();
        assert_eq!(lap, MultiPoly::monomial(2.0, &[0, 1]).unwrap());
    }

    #[test]
    fn bilaplacian_of_clamped_ball_factor() {
        // Delta(r^k) = k (k + n - 2) r^(k-2) applied to 1 - 2 r^2 + r^4.
        for n in 2..=8usize {
            let w = MultiPoly::ball_slack(&vec![0.0; n], 1.0);
            let u = w.pow(2).unwrap();
            let bilap = u.laplacian().laplacian();
            let nf = n as f64;
            let oracle = {
                // Delta(r^4) = 4(n+2) r^2, Delta(r^2) = 2n
                4.0 * (nf + 2.0) * 2.0 * nf
            };
            assert_eq!(bilap.degree(), 0);
            assert!((bilap.eval(&vec![0.3; n]) - oracle).abs() < 1e-12);
        }
        let w = MultiPoly::ball_slack(&[0.0; 4], 1.0);
        let u = w.pow(2).unwrap();
        assert_eq!(u.laplacian().laplacian().eval(&[0.0; 4]), 192.0);
    }

    #[test]
    fn cubic_is_biharmonic() {
        let x3 = MultiPoly::monomial(1.0, &[3, 0]).unwrap();
        let xy2 = MultiPoly::monomial(1.0, &[1, 2]).unwrap();
        let p = x3.add(&xy2).unwrap();
        assert_eq!(p.laplacian(), MultiPoly::monomial(8.0, &[1, 0]).unwrap());
        assert!(p.laplacian().laplacian().is_zero());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let x = MultiPoly::var(2, 0);
        let big = x.pow(20).unwrap();
        assert!(matches!(big.mul(&x.pow(5).unwrap()), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn no_zero_coefficients_are_stored() {
        let x = MultiPoly::var(3, 1);
        let z = x.sub(&x).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.n_terms(), 0);
    }

    #[test]
    fn json_layout() {
        let p = MultiPoly::monomial(2.5, &[1, 0, 3]).unwrap();
        let s = p.to_json().unwrap();
        assert_eq!(s, r#"[{"exps":[1,0,3],"coef":2.5}]"#);
        assert_eq!(MultiPoly::from_json(&s).unwrap(), p);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = MultiPoly::var(2, 0);
        let b = MultiPoly::var(3, 0);
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch { .. })));
    }
}
