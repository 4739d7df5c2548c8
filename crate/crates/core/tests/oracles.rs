//! Independent routes to quantities the quadrature computes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use biharm_core::campaign::{build_field, place_pole, DomainKind, FieldChoice, PolePlacement};
use biharm_core::identities::{self, Piece, Term};
use biharm_core::jets::{JetOrder, DEFAULT_FIELD_DEGREE_CAP};
use biharm_core::quadrature::{self, BaseScheme, Integrand};
use biharm_core::{Domain, JetField, SampleBudget};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let (u1, u2): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `∫_Ω |Δu|^2 ρ^-α` by plain Monte Carlo stratified over dyadic shells
/// `2^-(j+1) D < ρ <= 2^-j D` about the pole, `D` the diameter; the region
/// `ρ <= 2^-J D` is bounded
/// by `max|Δu|^2 |S^(n-1)| r^(n-α) / (n-α)`. Returns (estimate, 4 sigma + tail).
fn shell_monte_carlo(domain: &Domain, u: &dyn JetField, y: &[f64], alpha: f64, shells: usize, per_shell: usize, seed: u64) -> (f64, f64) {
    let n = y.len();
    let nf = n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sphere = 2.0 * std::f64::consts::PI.powf(nf / 2.0) / libm::tgamma(nf / 2.0);
    let mut total = 0.0;
    let mut var = 0.0;
    let mut max_lap: f64 = 0.0;
    let diam = domain.diameter();
    for j in 0..shells {
        let (r0, r1) = (diam * 0.5f64.powi(j as i32 + 1), diam * 0.5f64.powi(j as i32));
        let vol = sphere / nf * (r1.powf(nf) - r0.powf(nf));
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..per_shell {
            let t: f64 = rng.random();
            let r = (r0.powf(nf) + t * (r1.powf(nf) - r0.powf(nf))).powf(1.0 / nf);
            let mut dir: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            dir.iter_mut().for_each(|v| *v /= len);
            let x: Vec<f64> = y.iter().zip(&dir).map(|(y, d)| y + r * d).collect();
            let f = if domain.contains(&x).unwrap() {
                let lap = u.jet(&x, JetOrder::Second).lap;
                max_lap = max_lap.max(lap.abs());
                lap * lap * r.powf(-alpha)
            } else {
                0.0
            };
            s += f;
            s2 += f * f;
        }
        let m = s / per_shell as f64;
        total += vol * m;
        var += vol * vol * (s2 / per_shell as f64 - m * m) / per_shell as f64;
    }
    let rj = diam * 0.5f64.powi(shells as i32);
    // Δu is bounded by its sampled maximum times a safety factor of 4.
    let tail = 16.0 * max_lap * max_lap * sphere * rj.powf(nf - alpha) / (nf - alpha);
    (total, 4.0 * var.sqrt() + tail)
}

#[test]
fn singular_energy_matches_shell_monte_carlo() {
    for (kind, n, alpha) in [(DomainKind::Ball, 3, 1.5), (DomainKind::Ball, 4, 2.0), (DomainKind::Simplex, 3, 1.0), (DomainKind::Cube, 2, 1.0)] {
        let d = kind.build(n).unwrap();
        let y = place_pole(&d, PolePlacement::Boundary).unwrap();
        let u = build_field(&d, &FieldChoice::Default, DEFAULT_FIELD_DEGREE_CAP).unwrap();
        let table = identities::integrate_pieces(&d, &u, &y, alpha, &[Piece::Volume(Term::LapSq)], &SampleBudget::default()).unwrap();
        let (q, qe) = table.get(Piece::Volume(Term::LapSq)).unwrap();
        let (mc, band) = shell_monte_carlo(&d, &u, &y, alpha, 14, 120_000, 17);
        assert!((q - mc).abs() <= band + 3.0 * qe, "{kind:?} n={n}: quadrature {q} vs shells {mc} ± {band}");
        assert!(band < 0.05 * q.abs(), "{kind:?} n={n}: oracle too loose ({band} vs {q})");
    }
}

/// `∫_{B^n} x^a = Π Γ((a_i+1)/2) / Γ(|a|/2 + n/2 + 1)` for even `a`.
fn ball_monomial(a: &[u32]) -> f64 {
    let n = a.len() as f64;
    let s: f64 = a.iter().map(|&k| k as f64).sum();
    a.iter().map(|&k| libm::tgamma((k as f64 + 1.0) / 2.0)).product::<f64>() / libm::tgamma(s / 2.0 + n / 2.0 + 1.0)
}

fn monomial(a: &[u32]) -> impl Fn(&[f64], &[f64], &mut [f64]) + Sync + '_ {
    move |x: &[f64], _: &[f64], out: &mut [f64]| out[0] = x.iter().zip(a).map(|(x, &k)| x.powi(k as i32)).product()
}

#[test]
fn error_estimates_are_honest_on_closed_forms() {
    let mut cases: Vec<(Domain, Vec<f64>, Vec<u32>, usize, f64, SampleBudget)> = Vec::new();
    // Cubes sampled by randomized low-discrepancy cones from a vertex.
    let ld = SampleBudget {
        base: BaseScheme::LowDiscrepancy { points: 512, replications: 8 },
        ..SampleBudget::default()
    };
    for (n, a) in [(2, vec![3, 1]), (2, vec![5, 2]), (3, vec![1, 2, 3]), (3, vec![4, 0, 1]), (3, vec![2, 2, 2]), (4, vec![1, 1, 1, 1]), (4, vec![3, 0, 2, 1]), (4, vec![0, 5, 0, 0]), (5, vec![1, 0, 2, 0, 1]), (6, vec![1, 1, 0, 2, 0, 1])] {
        let d = DomainKind::Cube.build(n).unwrap();
        let exact = a.iter().map(|&k| 1.0 / (k as f64 + 1.0)).product();
        let deg = a.iter().sum::<u32>() as usize;
        cases.push((d, vec![0.0; n], a, deg, exact, ld.clone()));
    }
    // Balls with a deliberately under-declared degree, so the rule is not exact.
    for (n, a) in [(2, vec![8, 0]), (2, vec![6, 4]), (3, vec![8, 2, 0]), (3, vec![6, 2, 2]), (3, vec![10, 0, 0]), (4, vec![6, 2, 0, 0]), (4, vec![4, 4, 2, 0]), (4, vec![8, 0, 0, 2]), (5, vec![6, 2, 2, 0, 0]), (6, vec![4, 4, 0, 0, 2, 0])] {
        let d = DomainKind::Ball.build(n).unwrap();
        let exact = ball_monomial(&a);
        let deg = a.iter().sum::<u32>() as usize - 6;
        let mut y = vec![0.0; n];
        y[0] = 2.0;
        cases.push((d, y, a, deg, exact, SampleBudget::default()));
    }
    let mut honest = 0;
    let mut report = Vec::new();
    for (d, y, a, deg, exact, budget) in &cases {
        let f = monomial(a);
        let ig = Integrand::new(1, 0.0, *deg, &f);
        let est = quadrature::integrate_generic(d, y, &ig, budget).unwrap();
        let err = (est.value() - exact).abs();
        if err <= 3.0 * est.error() {
            honest += 1;
        } else {
            report.push(format!("{a:?}: error {err:e}, estimate {:e}", est.error()));
        }
    }
    assert!(honest >= 18, "{honest}/20 honest; {report:?}");
}
