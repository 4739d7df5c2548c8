//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use biharm_core::campaign::{self, ConvexityConfig, DomainKind, FieldChoice, PolePlacement, PositivityConfig, VerifyConfig};
use biharm_core::constants::{self, UpperBound};
use biharm_core::decay::{self, LShapeConfig};
use biharm_core::identities::IdentityId;
use biharm_core::solver::{self, Backend, SolveOptions};
use biharm_core::{MonomialSpec, Polygon2D};

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn within(elapsed: Duration, minutes: u64) -> bool {
    elapsed <= Duration::from_secs(60 * minutes)
}

const SUITE: [IdentityId; 5] = [IdentityId::I2_13, IdentityId::I2_19, IdentityId::I3_3, IdentityId::I3_18, IdentityId::I3_22];

fn suite_config() -> VerifyConfig {
    VerifyConfig {
        identities: SUITE.to_vec(),
        ..Default::default()
    }
}

fn identity_suite() -> (Line, Vec<f64>) {
    let t = Instant::now();
    let r = campaign::run_verify(&suite_config(), 1).expect("default matrix runs");
    let elapsed = t.elapsed();
    let mut bad = Vec::new();
    let mut worst_ext: f64 = 0.0;
    let mut worst_ball: f64 = 0.0;
    for c in &r.cases {
        if let Some(e) = &c.error {
            bad.push(format!("n={} {} alpha={}: {e}", c.case.n, c.case.domain, c.case.alpha));
        }
        for x in &c.reports {
            let ok = if c.case.pole == PolePlacement::Exterior {
                worst_ext = worst_ext.max(x.rel_residual);
                x.rel_residual <= 1e-7
            } else if c.case.domain == "ball" {
                worst_ball = worst_ball.max(x.rel_residual);
                x.rel_residual <= 1e-7
            } else {
                x.rel_residual <= f64::max(1e-4, 3.0 * x.quad_error / x.scale)
            };
            if !ok {
                bad.push(format!("{} n={} {} alpha={} {:?} rel={:e}", x.identity, x.n, c.case.domain, x.alpha, c.case.pole, x.rel_residual));
            }
        }
    }
    let rels: Vec<f64> = r.reports().map(|x| x.rel_residual).collect();
    let pass = bad.is_empty() && within(elapsed, 15) && !rels.is_empty();
    let detail = if bad.is_empty() {
        format!(
            "{} cases, {} residuals, {} skipped; worst exterior {:.1e}, worst ball boundary {:.1e}",
            r.summary.cases, r.summary.reports, r.summary.skipped, worst_ext, worst_ball
        )
    } else {
        format!("{} failures, first: {}", bad.len(), bad[0])
    };
    (
        Line {
            id: 1,
            name: "identity suite",
            pass,
            detail,
            elapsed,
        },
        rels,
    )
}

fn fourth_order() -> Line {
    let t = Instant::now();
    let ids = vec![IdentityId::I3_8, IdentityId::I3_1];
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for exps in [vec![0, 0, 0, 0], vec![1, 0, 0, 0]] {
        let cfg = VerifyConfig {
            identities: ids.clone(),
            dims: vec![4],
            domains: vec![DomainKind::Ball],
            alphas: Some(vec![0.0, 1.0, 2.0]),
            poles: vec![PolePlacement::Exterior, PolePlacement::BoundarySpherePoint],
            field: FieldChoice::Poly {
                monomials: vec![MonomialSpec { exps, coef: 1.0 }],
            },
            ..Default::default()
        };
        let r = campaign::run_verify(&cfg, 1).expect("ball cases run");
        if r.summary.reports != 12 {
            bad.push(format!("ball: {} reports", r.summary.reports));
        }
        for x in r.reports() {
            worst = worst.max(x.rel_residual);
            if x.rel_residual > 1e-6 {
                bad.push(format!("ball {} alpha={} rel={:e}", x.identity, x.alpha, x.rel_residual));
            }
        }
    }
    let cube = VerifyConfig {
        identities: ids,
        dims: vec![4],
        domains: vec![DomainKind::Cube],
        alphas: Some(vec![2.0]),
        poles: vec![PolePlacement::BoundaryVertex],
        degree_cap: 16,
        ..Default::default()
    };
    let r = campaign::run_verify(&cube, 1).expect("cube case runs");
    let mut cube_detail = String::new();
    if r.summary.reports != 2 {
        bad.push(format!("cube: {} reports", r.summary.reports));
    }
    for x in r.reports() {
        cube_detail.push_str(&format!(" {} rel {:.1e} (quadError {:.1e})", x.identity, x.rel_residual, x.quad_error));
        if x.rel_residual > 1e-3 || !x.quad_error.is_finite() {
            bad.push(format!("cube {} rel={:e}", x.identity, x.rel_residual));
        }
    }
    let elapsed = t.elapsed();
    Line {
        id: 2,
        name: "fourth-order identities",
        pass: bad.is_empty() && within(elapsed, 5),
        detail: if bad.is_empty() {
            format!("ball worst {worst:.1e};{cube_detail}")
        } else {
            bad.join("; ")
        },
        elapsed,
    }
}

fn constants_line() -> Line {
    let t = Instant::now();
    let a8 = constants::alpha_n(8).unwrap();
    let l8 = constants::lambda_n(8).unwrap();
    let row4 = constants::exponent_table(4);
    let lip4 = row4.p_upper_lipschitz.expect("n = 4 is tabulated");
    let checks = [
        ("alpha_8", (a8 - 3.648666).abs() <= 1e-5),
        ("lambda_8 = alpha_8 + 2", l8 == a8 + 2.0),
        ("quadForm(7,3) = 4", constants::quad_form(7.0, 3.0) == 4.0),
        ("quadForm(8,4) = -16", constants::quad_form(8.0, 4.0) == -16.0),
        ("n=4 upper 6", lip4 == UpperBound::Finite(6.0) && lip4.to_string().starts_with("6+")),
        ("convex upper inf", row4.p_upper_convex.to_string() == "∞"),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Line {
        id: 3,
        name: "constants",
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("alpha_8 = {a8:.6}, lambda_8 = {l8:.6}, n=4 upper {lip4}, convex upper {}", row4.p_upper_convex)
        } else {
            format!("failed: {}", failed.join(", "))
        },
        elapsed: t.elapsed(),
    }
}

fn positivity() -> Line {
    let t = Instant::now();
    let cfg = PositivityConfig::default();
    let r = campaign::run_positivity(&cfg, 1).expect("positivity campaign runs");
    let mut ok = 0;
    let mut per = std::collections::BTreeMap::<String, usize>::new();
    for c in &r.cases {
        *per.entry(c.domain.clone()).or_default() += 1;
        if let Some(p) = &c.report {
            if p.slack >= -3.0 * p.slack_error && p.rhs >= -3.0 * p.rhs_error {
                ok += 1;
            }
        }
    }
    let elapsed = t.elapsed();
    let counts_ok = per.len() == 2 && per.values().all(|v| *v == 20);
    Line {
        id: 4,
        name: "positivity",
        pass: ok == r.cases.len() && counts_ok && within(elapsed, 10),
        detail: format!("{ok}/{} fields with slack and rhs >= -3 quadError {:?}", r.cases.len(), per),
        elapsed,
    }
}

fn convexity() -> Line {
    let t = Instant::now();
    let r = campaign::run_convexity(&ConvexityConfig::default(), 1).expect("convexity campaign runs");
    let surf_bad: Vec<String> = r
        .surface
        .iter()
        .filter(|c| !(c.surface >= -3.0 * c.quad_error))
        .map(|c| format!("n={} {} alpha={} {:?}: {:e}", c.case.n, c.case.domain, c.case.alpha, c.case.pole, c.surface))
        .collect();
    let l = r.probes.iter().find(|p| p.domain == "l-shape").expect("L-shape probe");
    let convex_ok = r.probes.iter().filter(|p| p.convex).all(|p| p.pass);
    let elapsed = t.elapsed();
    Line {
        id: 5,
        name: "convexity sign",
        pass: surf_bad.is_empty() && !r.surface.is_empty() && l.min_support < 0.0 && convex_ok && within(elapsed, 2),
        detail: if surf_bad.is_empty() {
            format!("{} surface terms >= -3 quadError; L-shape min <P-Q,N(P)> = {:.3}", r.surface.len(), l.min_support)
        } else {
            format!("negative surface terms: {}", surf_bad.join("; "))
        },
        elapsed,
    }
}

fn solver_convergence() -> Line {
    let t = Instant::now();
    let opts = SolveOptions {
        backend: Backend::Banded,
        ..Default::default()
    };
    let rows = solver::convergence_study(&Polygon2D::unit_square(), &solver::manufactured_cubic(), &[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0], &opts).expect("solves");
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let elapsed = t.elapsed();
    Line {
        id: 6,
        name: "solver convergence",
        pass: ratios.len() == 2 && ratios.iter().all(|q| (3.4..=4.6).contains(q)) && within(elapsed, 3),
        detail: format!("L2 error ratios {:?}", ratios.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>()),
        elapsed,
    }
}

fn decay_line() -> Line {
    let t = Instant::now();
    let radii = decay::dyadic_radii(0.5, 5);
    let mut detail = Vec::new();
    let mut pass = true;
    for (fx, field) in solver::half_plane_fixtures().into_iter().filter(|(f, _)| f.clamped) {
        let expected = if fx.name == "y^2" { 4.0 } else { 6.0 };
        let e = decay::local_energy_half_disk(&field, [0.0, 0.0], &radii).unwrap();
        let fit = decay::decay_fit([0.0, 0.0], radii.clone(), e, None).unwrap();
        let ratios: Vec<f64> = [0.1, 0.2, 0.4].iter().map(|r| decay::caccioppoli_half_disk(&field, [0.0, 0.0], *r).unwrap().ratio).collect();
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        pass &= (fit.exponent - expected).abs() <= 0.05 && hi / lo - 1.0 <= 0.01;
        detail.push(format!("{} exponent {:.3}, Caccioppoli spread {:.1e}", fx.name, fit.exponent, hi / lo - 1.0));
    }
    let seeds = [1, 2, 3, 4, 5];
    let l = campaign::run_l_shape(&seeds, &LShapeConfig::default(), 1).expect("L-shape runs");
    detail.push(format!("L-shape ordered {}/{}", l.ordered, seeds.len()));
    let elapsed = t.elapsed();
    Line {
        id: 7,
        name: "decay fixtures",
        pass: pass && l.ordered == seeds.len() && within(elapsed, 10),
        detail: detail.join("; "),
        elapsed,
    }
}

fn determinism(first: &[f64]) -> Line {
    let t = Instant::now();
    // A second run on several workers; order and bits must match the first.
    let r = campaign::run_verify(&suite_config(), 3).expect("default matrix runs");
    let second: Vec<f64> = r.reports().map(|x| x.rel_residual).collect();
    let same = first.len() == second.len() && first.iter().zip(&second).all(|(a, b)| a.to_bits() == b.to_bits());
    Line {
        id: 8,
        name: "determinism",
        pass: same && !first.is_empty(),
        detail: format!("{} relResidual values compared bitwise", first.len()),
        elapsed: t.elapsed(),
    }
}

fn main() {
    // Under `cargo test -- --list` or filters, behave like an empty harness.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut lines = Vec::new();
    let (l1, rels) = identity_suite();
    lines.push(l1);
    lines.push(fourth_order());
    lines.push(constants_line());
    lines.push(positivity());
    lines.push(convexity());
    lines.push(solver_convergence());
    lines.push(decay_line());
    lines.push(determinism(&rels));
    lines.sort_by_key(|l| l.id);
    for l in &lines {
        println!(
            "criterion {} {:<24} {} ({:.1} s) {}",
            l.id,
            l.name,
            if l.pass { "PASS" } else { "FAIL" },
            l.elapsed.as_secs_f64(),
            l.detail
        );
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("acceptance: {}/{} criteria pass", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
