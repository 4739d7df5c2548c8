//! Flat evaluation form for polynomials sharing one power table.

use super::poly::{MultiPoly, MAX_DEGREE};

/// Maximum supported dimension.
pub const MAX_DIM: usize = 8;

/// Powers `x_i^k` for `k <= MAX_DEGREE`, filled once per point.
pub struct PowerTable {
    pows: [[f64; MAX_DEGREE + 1]; MAX_DIM],
}

impl PowerTable {
    pub fn new(x: &[f64], max_exp: usize) -> Self {
        let mut pows = [[0.0; MAX_DEGREE + 1]; MAX_DIM];
        for (i, &xi) in x.iter().enumerate() {
            let row = &mut pows[i];
            row[0] = 1.0;
            for k in 1..=max_exp {
                row[k] = row[k - 1] * xi;
            }
        }
        PowerTable { pows }
    }

    #[inline]
    fn get(&self, var: u8, exp: u8) -> f64 {
        self.pows[var as usize][exp as usize]
    }
}

#[derive(Clone, Debug, Default)]
pub struct CompiledPoly {
    coefs: Vec<f64>,
    // (start, len) into `factors` for each term
    spans: Vec<(u32, u8)>,
    factors: Vec<(u8, u8)>,
    max_exp: usize,
}

impl CompiledPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let mut out = CompiledPoly::default();
        for (exps, c) in p.terms() {
            let start = out.factors.len() as u32;
            let mut len = 0u8;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    out.factors.push((i as u8, e));
                    out.max_exp = out.max_exp.max(e as usize);
                    len += 1;
                }
            }
            out.coefs.push(c);
            out.spans.push((start, len));
        }
        out
    }

    pub fn max_exp(&self) -> usize {
        self.max_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coefs.is_empty()
    }

    #[inline]
    pub fn eval(&self, t: &PowerTable) -> f64 {
        let mut acc = 0.0;
        for (&c, &(start, len)) in self.coefs.iter().zip(&self.spans) {
            let mut m = c;
            let s = start as usize;
            for &(v, e) in &self.factors[s..s + len as usize] {
                m *= t.get(v, e);
            }
            acc += m;
        }
        acc
    }
}
