//! Closed-form exponents and ranges: the positivity quadratic, `alpha_n`,
//! `lambda_n` and the upper ends of the solvability ranges in `p`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `n^2 + 2 n alpha - 7 alpha^2 - 8 alpha`.
pub fn quad_form(n: f64, alpha: f64) -> f64 {
    n * n + 2.0 * n * alpha - 7.0 * alpha * alpha - 8.0 * alpha
}

/// Positive root of `quad_form(n, .)`, defined for any real `n`.
pub fn alpha_root(n: f64) -> f64 {
    (n - 4.0 + 2.0 * (2.0 * (n * n - n + 2.0)).sqrt()) / 7.0
}

fn require_high_dim(n: usize) -> Result<()> {
    if n < 8 {
        return Err(Error::Precondition(format!(
            "alpha_n and lambda_n are used only for n >= 8 (got n = {n}); for n = 5, 6, 7 the exponent n - 4 already satisfies the positivity condition"
        )));
    }
    Ok(())
}

pub fn alpha_n(n: usize) -> Result<f64> {
    require_high_dim(n)?;
    Ok(alpha_root(n as f64))
}

pub fn lambda_n(n: usize) -> Result<f64> {
    Ok(alpha_n(n)? + 2.0)
}

/// Upper end of a range in `p`; printed with the symbolic `+ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UpperBound {
    Finite(f64),
    Infinite,
}

impl UpperBound {
    pub fn value(&self) -> f64 {
        match self {
            UpperBound::Finite(v) => *v,
            UpperBound::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for UpperBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpperBound::Finite(v) => {
                let s = format!("{v:.6}");
                let s = s.trim_end_matches('0').trim_end_matches('.');
                write!(f, "{s}+ε")
            }
            UpperBound::Infinite => write!(f, "∞"),
        }
    }
}

impl Serialize for UpperBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            UpperBound::Finite(v) => s.serialize_f64(*v),
            UpperBound::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PRange {
    pub n: usize,
    pub convex: bool,
    pub lower: String,
    pub upper: UpperBound,
    /// `2 + 4/(n-3)` for `n >= 8`.
    pub classical_candidate: Option<f64>,
    /// `2 + 4/(n - lambda_n)` for `n >= 8`.
    pub lambda_candidate: Option<f64>,
}

pub fn p_range(n: usize, convex: bool) -> Result<PRange> {
    if n < 4 {
        return Err(Error::Precondition(format!("p ranges are tabulated for n >= 4 (got {n})")));
    }
    let (classical, lam) = if n >= 8 {
        let nf = n as f64;
        (Some(2.0 + 4.0 / (nf - 3.0)), Some(2.0 + 4.0 / (nf - lambda_n(n)?)))
    } else {
        (None, None)
    };
    let upper = if convex {
        UpperBound::Infinite
    } else {
        match n {
            4 => UpperBound::Finite(6.0),
            5..=7 => UpperBound::Finite(4.0),
            _ => UpperBound::Finite(classical.unwrap().max(lam.unwrap())),
        }
    };
    Ok(PRange {
        n,
        convex,
        lower: "2-ε".into(),
        upper,
        classical_candidate: classical,
        lambda_candidate: lam,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExponentTable {
    pub n: usize,
    pub quad_form_at_n_minus_4: f64,
    pub alpha_n: Option<f64>,
    pub lambda_n: Option<f64>,
    pub p_upper_lipschitz: Option<UpperBound>,
    pub p_upper_convex: UpperBound,
    /// Whether `alpha = n - 4` makes the quadratic positive.
    pub mazya_positivity: bool,
}

pub fn exponent_table(n: usize) -> ExponentTable {
    let nf = n as f64;
    let q = quad_form(nf, nf - 4.0);
    let alpha = alpha_n(n).ok();
    ExponentTable {
        n,
        quad_form_at_n_minus_4: q,
        alpha_n: alpha,
        lambda_n: alpha.map(|a| a + 2.0),
        p_upper_lipschitz: p_range(n, false).ok().map(|r| r.upper),
        p_upper_convex: UpperBound::Infinite,
        mazya_positivity: q > 0.0,
    }
}

pub fn exponent_rows(lo: usize, hi: usize) -> Vec<ExponentTable> {
    (lo..=hi).map(exponent_table).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_examples() {
        assert_eq!(quad_form(5.0, 0.0), 25.0);
        assert_eq!(quad_form(7.0, 3.0), 4.0);
        assert_eq!(quad_form(7.0, 3.0), 4.0 * (-49.0 + 70.0 - 20.0));
        assert_eq!(quad_form(8.0, 4.0), -16.0);
    }

    #[test]
    fn alpha_eight() {
        let a = alpha_n(8).unwrap();
        assert!((a - 3.648666).abs() < 1e-6);
        assert_eq!(lambda_n(8).unwrap(), a + 2.0);
        assert!(alpha_n(7).is_err());
        assert!(quad_form(10.0, alpha_n(10).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn ranges() {
        assert_eq!(p_range(4, false).unwrap().upper, UpperBound::Finite(6.0));
        assert_eq!(p_range(4, false).unwrap().upper.to_string(), "6+ε");
        assert_eq!(p_range(5, true).unwrap().upper.to_string(), "∞");
        let r = p_range(8, false).unwrap();
        assert!((r.classical_candidate.unwrap() - 2.8).abs() < 1e-12);
        assert!((r.lambda_candidate.unwrap() - 3.7011617).abs() < 1e-6);
        assert_eq!(r.upper, UpperBound::Finite(r.lambda_candidate.unwrap()));
        assert!(p_range(3, false).is_err());
    }
}
