use proptest::prelude::*;

use biharm_core::campaign::{build_field, place_pole, DomainKind, FieldChoice, PolePlacement};
use biharm_core::constants;
use biharm_core::decay;
use biharm_core::geometry::{self, Halfspace, SampleScheme};
use biharm_core::identities::{self, IdentityId};
use biharm_core::jets::{JetOrder, DEFAULT_FIELD_DEGREE_CAP, MAX_DEGREE};
use biharm_core::solver::{self, apply_stencil, Grid};
use biharm_core::{Ball, ClampedField, ConvexPolytope, Domain, JetField, MonomialSpec, MultiPoly, PolyField, Polygon2D, SampleBudget};

/// Unit cube in `n` dimensions cut by extra halfspaces through points near
/// the center with random normals.
fn cut_cube(n: usize, cuts: &[(Vec<f64>, f64)]) -> ConvexPolytope {
    let mut hs = Vec::new();
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        hs.push(Halfspace { a: a.clone(), b: 1.0 });
        a[i] = -1.0;
        hs.push(Halfspace { a, b: 0.0 });
    }
    for (dir, off) in cuts {
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let a: Vec<f64> = dir.iter().map(|v| v / len).collect();
        let center: f64 = a.iter().map(|v| 0.5 * v).sum();
        hs.push(Halfspace { a, b: center + off });
    }
    ConvexPolytope::new(hs).expect("bounded, non-empty")
}

fn cuts(n: usize) -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
    prop::collection::vec((prop::collection::vec(-1.0f64..1.0, n).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 0.1)), 0.1f64..0.4), 0..3)
}

fn small_poly(n: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, n), -1.0f64..1.0), 1..4).prop_map(move |terms| {
        let spec: Vec<MonomialSpec> = terms.into_iter().map(|(exps, coef)| MonomialSpec { exps, coef }).collect();
        MultiPoly::from_spec(n, &spec).unwrap_or_else(|_| MultiPoly::constant(n, 1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn convex_polytopes_have_nonnegative_support(n in 2usize..5, c in cuts(4)) {
        let c: Vec<(Vec<f64>, f64)> = c.into_iter().map(|(d, o)| (d[..n].to_vec(), o)).filter(|(d, _)| d.iter().any(|x| x.abs() > 0.1)).collect();
        let d = Domain::Polytope(cut_cube(n, &c));
        let patches = geometry::surface_sample(&d, 200, SampleScheme::LowDiscrepancy, 7).unwrap();
        // At least 10^4 ordered pairs.
        prop_assert!(patches.len() >= 101);
        let (v, _, _) = geometry::convexity_pair_probe(&patches);
        prop_assert!(v >= -1e-10, "{v}");
    }

    #[test]
    fn containment_agrees_with_signed_distance(n in 2usize..5, c in cuts(4), seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let c: Vec<(Vec<f64>, f64)> = c.into_iter().map(|(d, o)| (d[..n].to_vec(), o)).filter(|(d, _)| d.iter().any(|x| x.abs() > 0.1)).collect();
        let domains = [Domain::Polytope(cut_cube(n, &c)), Domain::Ball(Ball::new(vec![0.5; n], 0.6).unwrap())];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for d in &domains {
            for _ in 0..4200 {
                let x: Vec<f64> = (0..n).map(|_| 1.6 * rng.random::<f64>() - 0.3).collect();
                let s = d.signed_distance(&x).unwrap();
                if s.abs() > 1e-9 {
                    prop_assert_eq!(d.contains(&x).unwrap(), s < 0.0);
                }
            }
        }
    }

    #[test]
    fn jets_match_central_differences(n in 2usize..5, p in small_poly(4), seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let p = MultiPoly::from_spec(n, &p.to_spec().into_iter().map(|m| MonomialSpec { exps: m.exps[..n].to_vec(), coef: m.coef }).collect::<Vec<_>>())
            .unwrap_or_else(|_| MultiPoly::constant(n, 1.0));
        let simplex = ConvexPolytope::corner_simplex(n).unwrap();
        let fields: Vec<Box<dyn JetField>> = vec![
            Box::new(ClampedField::ball_with_cap(&vec![0.0; n], 1.0, p.clone(), MAX_DEGREE).unwrap()),
            Box::new(ClampedField::polytope_with_cap(&simplex, p.clone(), MAX_DEGREE).unwrap()),
            Box::new(PolyField::new(p).unwrap()),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let h = 1e-3;
        for f in &fields {
            for _ in 0..1000 {
                let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
                let j = f.jet(&x, JetOrder::Fourth);
                let shift = |i: usize, s: f64| { let mut y = x.clone(); y[i] += s; y };
                let scale = 1.0 + j.u.abs() + j.grad().iter().map(|g| g.abs()).sum::<f64>();
                let mut tr = 0.0;
                for i in 0..n {
                    let fd = (f.value(&shift(i, h)) - f.value(&shift(i, -h))) / (2.0 * h);
                    prop_assert!((fd - j.grad[i]).abs() <= 100.0 * h * h * scale, "grad {i}: {fd} vs {}", j.grad[i]);
                    let fd2 = (f.value(&shift(i, h)) - 2.0 * j.u + f.value(&shift(i, -h))) / (h * h);
                    prop_assert!((fd2 - j.hess[i][i]).abs() <= 100.0 * h * h * (scale + j.hess[i][i].abs()), "hess {i}: {fd2} vs {}", j.hess[i][i]);
                    tr += j.hess[i][i];
                }
                prop_assert!((tr - j.lap).abs() <= 1e-12 * (1.0 + j.lap.abs()));
            }
            let poly = f.poly();
            let lap2 = poly.laplacian().laplacian();
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let j = f.jet(&x, JetOrder::Fourth);
            prop_assert!((lap2.eval(&x) - j.bilap).abs() <= 1e-10 * (1.0 + j.bilap.abs()));
        }
    }

    #[test]
    fn clamped_polytope_fields_vanish_on_the_boundary(n in 2usize..5, p in small_poly(4)) {
        let p = MultiPoly::from_spec(n, &p.to_spec().into_iter().map(|m| MonomialSpec { exps: m.exps[..n].to_vec(), coef: m.coef }).collect::<Vec<_>>())
            .unwrap_or_else(|_| MultiPoly::constant(n, 1.0));
        for d in [Domain::Polytope(ConvexPolytope::cube(n, 0.0, 1.0).unwrap()), Domain::Polytope(ConvexPolytope::corner_simplex(n).unwrap())] {
            let Domain::Polytope(poly) = &d else { unreachable!() };
            let u = ClampedField::polytope_with_cap(poly, p.clone(), MAX_DEGREE).unwrap();
            for s in geometry::surface_sample(&d, 2500, SampleScheme::LowDiscrepancy, 3).unwrap() {
                // Snap onto coordinate facets, where the facet equation is exact
                // in floating point; the slanted simplex facet is only close.
                let mut x = s.point.clone();
                let axis = s.normal.iter().position(|v| v.abs() == 1.0);
                if let Some(i) = axis {
                    x[i] = if s.normal[i] > 0.0 { poly.halfspaces().iter().find(|h| h.a == s.normal).unwrap().b } else { 0.0 };
                }
                let j = u.jet(&x, JetOrder::Second);
                if axis.is_some() {
                    prop_assert_eq!(j.u, 0.0);
                    prop_assert!(j.grad().iter().all(|g| *g == 0.0));
                } else {
                    prop_assert!(j.u.abs() <= 1e-14 && j.grad().iter().all(|g| g.abs() <= 1e-14));
                }
            }
        }
        let ball = Domain::Ball(Ball::unit(n).unwrap());
        let u = ClampedField::ball_with_cap(&vec![0.0; n], 1.0, p, MAX_DEGREE).unwrap();
        for s in geometry::surface_sample(&ball, 2500, SampleScheme::LowDiscrepancy, 3).unwrap() {
            let j = u.jet(&s.point, JetOrder::Second);
            prop_assert!(j.u.abs() <= 1e-12 && j.grad().iter().all(|g| g.abs() <= 1e-12));
        }
    }

    #[test]
    fn scaling_the_field_scales_terms_quadratically(alpha in -1.0f64..2.5, c in prop::sample::select(vec![1e-3, 7.0, 1e3])) {
        let d = DomainKind::Ball.build(3).unwrap();
        let y = place_pole(&d, PolePlacement::Boundary).unwrap();
        let u = build_field(&d, &FieldChoice::Default, DEFAULT_FIELD_DEGREE_CAP).unwrap();
        let Domain::Ball(b) = &d else { unreachable!() };
        let cu = ClampedField::ball(&b.center, b.radius, u.smooth_factor().scale(c)).unwrap();
        let budget = SampleBudget::default();
        let a = identities::evaluate_many(&IdentityId::ALL, &d, &u, &y, alpha, &budget).unwrap();
        let s = identities::evaluate_many(&IdentityId::ALL, &d, &cu, &y, alpha, &budget).unwrap();
        for (a, s) in a.iter().zip(&s) {
            prop_assert!((a.rel_residual - s.rel_residual).abs() <= 1e-10);
            for (ta, ts) in a.terms.iter().zip(&s.terms) {
                prop_assert!((ts.value - c * c * ta.value).abs() <= 1e-9 * (c * c * ta.value).abs().max(1e-300));
            }
        }
    }

    #[test]
    fn stencil_annihilates_cubics(coefs in prop::collection::vec(-2.0f64..2.0, 10), k in 3usize..6) {
        let exps = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];
        let spec: Vec<MonomialSpec> = exps.iter().zip(&coefs).map(|(&(a, b), &c)| MonomialSpec { exps: vec![a, b], coef: c }).collect();
        let p = MultiPoly::from_spec(2, &spec).unwrap();
        let h = 0.5f64.powi(k as i32);
        let grid = Grid::for_polygon(&Polygon2D::l_shape(), h).unwrap();
        let values: Vec<f64> = (0..grid.kind.len()).map(|k| p.eval(&grid.coords(k))).collect();
        let r = apply_stencil(&grid, &values);
        let scale = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
        for v in r.iter().filter(|v| !v.is_nan()) {
            prop_assert!(v.abs() <= 64.0 * f64::EPSILON * scale / h.powi(4), "{v}");
        }
    }

    #[test]
    fn caccioppoli_ratio_is_scale_free(c in 1e-3f64..1e3, r in 0.05f64..0.5) {
        for (fx, field) in solver::half_plane_fixtures().into_iter().filter(|(f, _)| f.clamped) {
            let scaled = PolyField::new(MultiPoly::from_spec(2, &fx.spec).unwrap().scale(c)).unwrap();
            let a = decay::caccioppoli_half_disk(&field, [0.0, 0.0], r).unwrap();
            let b = decay::caccioppoli_half_disk(&scaled, [0.0, 0.0], r).unwrap();
            prop_assert!((a.ratio / b.ratio - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn alpha_n_is_a_root_below_n_minus_4() {
    for n in 8..=64 {
        let a = constants::alpha_n(n).unwrap();
        let nf = n as f64;
        assert!(constants::quad_form(nf, a).abs() <= 1e-9 * nf.powi(4), "n = {n}");
        assert!(a < nf - 4.0, "n = {n}");
    }
}

#[test]
fn sign_dichotomy_at_n_minus_4() {
    for n in 5..=7 {
        assert!(constants::quad_form(n as f64, n as f64 - 4.0) > 0.0);
    }
    for n in 8..=64 {
        assert!(constants::quad_form(n as f64, n as f64 - 4.0) < 0.0);
    }
}

#[test]
fn lambda_range_beats_classical_range() {
    let mut below = Vec::new();
    for n in 8..=64 {
        let r = constants::p_range(n, false).unwrap();
        if r.lambda_candidate.unwrap() <= r.classical_candidate.unwrap() {
            below.push(n);
        }
    }
    if !below.is_empty() {
        eprintln!("lambda candidate not above the classical bound for n in {below:?}");
    }
    assert!(below.is_empty());
}

#[test]
fn energies_decrease_on_l_shape_solutions() {
    let cfg = decay::LShapeConfig {
        h: 1.0 / 64.0,
        radii: 4,
        ..Default::default()
    };
    let r = decay::l_shape_experiment(11, &cfg).unwrap();
    for fit in std::iter::once(&r.reentrant).chain(&r.convex) {
        decay::check_monotone(&fit.energies).unwrap();
    }
}

#[test]
fn l_shape_self_convergence() {
    // Random corner data, no exact solution: differences at shared nodes
    // between successive refinements shrink.
    let data = decay::CornerClampedData::random(vec![[0.0, 0.0]], 0.3, 0.6, 5);
    let opts = solver::SolveOptions {
        backend: solver::Backend::Banded,
        ..Default::default()
    };
    let hs = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
    let sols: Vec<(Grid, Vec<f64>)> = hs
        .iter()
        .map(|h| {
            let (g, r) = solver::solve_polygon(&Polygon2D::l_shape(), *h, &data, &opts).unwrap();
            (g, r.values)
        })
        .collect();
    let mut diffs = Vec::new();
    for w in sols.windows(2) {
        let (gc, vc) = &w[0];
        let (gf, vf) = &w[1];
        let mut m: f64 = 0.0;
        for k in 0..vc.len() {
            if vc[k].is_nan() {
                continue;
            }
            let (i, j) = (k % gc.nx, k / gc.nx);
            let kf = gf.index(2 * i, 2 * j);
            m = m.max((vc[k] - vf[kf]).abs());
        }
        diffs.push(m);
    }
    assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
}
