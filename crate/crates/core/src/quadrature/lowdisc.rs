//! Additive-recurrence (R_d) low-discrepancy points with seeded random shifts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Positive root of `x^(d+1) = x + 1`.
fn generalized_golden(d: usize) -> f64 {
    let mut x = 1.5f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

/// The `d` irrational increments of the R_d sequence.
pub fn rd_alphas(d: usize) -> Vec<f64> {
    let g = generalized_golden(d);
    (1..=d).map(|i| (1.0 / g.powi(i as i32)).fract()).collect()
}

/// `count` points of the shifted R_d sequence in `[0,1)^d`.
pub fn rd_points(d: usize, count: usize, shift: &[f64]) -> Vec<Vec<f64>> {
    let alphas = rd_alphas(d);
    (0..count)
        .map(|k| {
            (0..d)
                .map(|i| (shift.get(i).copied().unwrap_or(0.0) + (k as f64 + 1.0) * alphas[i]).fract())
                .collect()
        })
        .collect()
}

/// Seeded uniform shift for replication `rep`.
pub fn shift(d: usize, seed: u64, rep: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ rep.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..d).map(|_| rng.random::<f64>()).collect()
}

/// Standard normal pair from two uniforms.
pub fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * u1.max(1e-300).ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    (r * t.cos(), r * t.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_for_one_dimension() {
        assert!((generalized_golden(1) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rd_mean_converges() {
        let pts = rd_points(3, 4096, &[0.0; 3]);
        for i in 0..3 {
            let m: f64 = pts.iter().map(|p| p[i]).sum::<f64>() / pts.len() as f64;
            assert!((m - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn shifts_are_seeded() {
        assert_eq!(shift(4, 7, 1), shift(4, 7, 1));
        assert_ne!(shift(4, 7, 1), shift(4, 7, 2));
    }
}
