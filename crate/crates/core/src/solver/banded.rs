use super::assemble::Csr;
use crate::error::{Error, Result};

/// Cholesky factor of a symmetric positive-definite band matrix, stored by
/// rows: `l[i][k]` holds `L[i, i - bw + k]`.
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &Csr) -> Result<Self> {
        let n = a.n;
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for r in 0..n {
            for k in a.row_start[r]..a.row_start[r + 1] {
                let c = a.cols[k];
                if c <= r {
                    l[r * w + (c + bw - r)] = a.vals[k];
                }
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = l[i * w + (j + bw - i)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= l[i * w + (k + bw - i)] * l[j * w + (k + bw - j)];
                }
                if j == i {
                    if s <= 0.0 {
                        return Err(Error::Precondition(format!("matrix is not positive definite at row {i}")));
                    }
                    l[i * w + bw] = s.sqrt();
                } else {
                    l[i * w + (j + bw - i)] = s / l[j * w + bw];
                }
            }
        }
        Ok(BandCholesky { n, bw, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l[i * w + (k + bw - i)] * y[k];
            }
            y[i] = s / self.l[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.l[k * w + (i + bw - k)] * y[k];
            }
            y[i] = s / self.l[i * w + bw];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] has x = [1 1 1].
        let a = Csr {
            n: 3,
            row_start: vec![0, 2, 5, 7],
            cols: vec![0, 1, 0, 1, 2, 1, 2],
            vals: vec![2.0, -1.0, -1.0, 2.0, -1.0, -1.0, 2.0],
        };
        let f = BandCholesky::factor(&a).unwrap();
        let x = f.solve(&[1.0, 0.0, 1.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let bad = Csr {
            vals: vec![1.0, -2.0, -2.0, 1.0, -1.0, -1.0, 2.0],
            ..a
        };
        assert!(BandCholesky::factor(&bad).is_err());
    }
}
