//! Volume and surface integration of `F(x) rho(x)^-beta`, `rho = |x - y|`, over
//! balls and convex polytopes with the pole `y` on the boundary or outside.
//!
//! Every rule is an exact parametrization of the domain. Poles on the
//! boundary are absorbed into Jacobi weights along rays from the pole, so
//! integrands that are polynomial along those rays are integrated exactly up
//! to the declared degree. Error estimates come from a second, lower-order
//! rule or from the spread over randomized low-discrepancy replications.

pub mod budget;
pub mod gauss;
pub mod lowdisc;
pub mod sets;
pub mod simplex;
pub mod sphere;
pub mod sum;

use serde::{Deserialize, Serialize};

pub use budget::{BaseScheme, SampleBudget};
use gauss::{gauss_jacobi, gauss_jacobi01, power_weight, Rule1D};
use sets::{BallCentered, BallPole, Cone, NodeSet, PoleCones, Simplices, SphereCap, SphereCentered};
use simplex::SimplexRule;
use sphere::{adapted_frame, SphereRule};
use sum::Neumaier;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, Ball, ConvexPolytope, Domain, Point};
use crate::jets::Symmetry;

/// Vector-valued integrand `F`, evaluated as `f(x, normal, out)`; the normal
/// slice is empty for volume integrals.
pub struct Integrand<'a> {
    pub outputs: usize,
    /// Exponent of the weight `rho^-beta` handled by the rule.
    pub beta: f64,
    /// Degree of `F` as a polynomial along rays from the pole (boundary poles)
    /// or in `x` (other cases). Sets the rule orders.
    pub degree: usize,
    /// Degree of `F` on spheres about a ball's center (ball rules only).
    pub angular_degree: usize,
    /// Invariance used to shrink angular rules on balls.
    pub symmetry: Option<Symmetry>,
    /// `F` carries powers of `1/|x - y|^2`: polynomial along rays from the
    /// pole but not in `x`, so rules not centered at the pole add nodes.
    pub polar: bool,
    pub f: &'a (dyn Fn(&[f64], &[f64], &mut [f64]) + Sync),
}

impl<'a> Integrand<'a> {
    pub fn new(outputs: usize, beta: f64, degree: usize, f: &'a (dyn Fn(&[f64], &[f64], &mut [f64]) + Sync)) -> Self {
        Integrand {
            outputs,
            beta,
            degree,
            angular_degree: degree,
            symmetry: None,
            polar: false,
            f,
        }
    }
}

/// Values with error estimates, one per integrand output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// `sum |w F|` per output, the scale for relative tolerances.
    pub scales: Vec<f64>,
    pub nodes: u64,
}

impl Estimate {
    pub fn value(&self) -> f64 {
        self.values[0]
    }

    pub fn error(&self) -> f64 {
        self.errors[0]
    }
}

/// Materialized weighted nodes.
#[derive(Clone, Debug, Default)]
pub struct QuadratureRule {
    pub nodes: Vec<Point>,
    pub normals: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn total_weight(&self) -> f64 {
        let mut s = Neumaier::default();
        self.weights.iter().for_each(|&w| s.add(w));
        s.value()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleKind {
    Boundary,
    Exterior,
    Interior,
}

/// Where `y` sits relative to the domain, with the boundary tolerance of
/// the domain scaled by 1e3.
pub fn classify_pole(domain: &Domain, y: &[f64]) -> Result<PoleKind> {
    let d = domain.signed_distance(y)?;
    let tol = 1e3 * domain.tolerance();
    Ok(if d.abs() <= tol {
        PoleKind::Boundary
    } else if d > 0.0 {
        PoleKind::Exterior
    } else {
        PoleKind::Interior
    })
}

type Sets = Vec<Box<dyn NodeSet>>;

enum Plan {
    Pair { hi: Sets, lo: Sets },
    Replicated(Vec<Sets>),
}

fn count(sets: &Sets) -> u64 {
    sets.iter().map(|s| s.count()).sum()
}

impl Plan {
    fn total(&self) -> u64 {
        match self {
            Plan::Pair { hi, lo } => count(hi) + count(lo),
            Plan::Replicated(r) => r.iter().map(count).sum(),
        }
    }
}

fn accumulate(sets: &Sets, ig: &Integrand) -> (Vec<f64>, Vec<f64>) {
    let k = ig.outputs;
    let mut acc = vec![Neumaier::default(); k];
    let mut abs = vec![0.0; k];
    let mut buf = vec![0.0; k];
    for s in sets {
        s.visit(&mut |x, normal, w| {
            buf.iter_mut().for_each(|v| *v = 0.0);
            (ig.f)(x, normal, &mut buf);
            for i in 0..k {
                let v = w * buf[i];
                acc[i].add(v);
                abs[i] += v.abs();
            }
        });
    }
    (acc.iter().map(|a| a.value()).collect(), abs)
}

fn execute(plan: Plan, ig: &Integrand, budget: &SampleBudget) -> Result<Estimate> {
    let nodes = plan.total();
    if nodes > budget.max_nodes {
        return Err(Error::Budget {
            needed: nodes,
            max: budget.max_nodes,
        });
    }
    let roundoff = 50.0 * f64::EPSILON;
    match plan {
        Plan::Pair { hi, lo } => {
            let (vh, ah) = accumulate(&hi, ig);
            let (vl, _) = accumulate(&lo, ig);
            let errors = (0..ig.outputs).map(|i| (vh[i] - vl[i]).abs() + roundoff * ah[i]).collect();
            Ok(Estimate {
                values: vh,
                errors,
                scales: ah,
                nodes,
            })
        }
        Plan::Replicated(reps) => {
            let runs: Vec<(Vec<f64>, Vec<f64>)> = reps.iter().map(|r| accumulate(r, ig)).collect();
            let m = runs.len() as f64;
            let mut values = Vec::with_capacity(ig.outputs);
            let mut errors = Vec::with_capacity(ig.outputs);
            let mut scales = Vec::with_capacity(ig.outputs);
            for i in 0..ig.outputs {
                let mut s = Neumaier::default();
                runs.iter().for_each(|r| s.add(r.0[i]));
                let mean = s.value() / m;
                let var = runs.iter().map(|r| (r.0[i] - mean).powi(2)).sum::<f64>() / (m - 1.0);
                let abs = runs.iter().map(|r| r.1[i]).sum::<f64>() / m;
                values.push(mean);
                errors.push((var / m).sqrt() + roundoff * abs);
                scales.push(abs);
            }
            Ok(Estimate {
                values,
                errors,
                scales,
                nodes,
            })
        }
    }
}

/// Runs the plan from `build`, raising the smooth-integrand node surplus
/// until every output meets `tol` relative to its scale, the plan stops
/// growing, or the budget is reached.
fn refine(ig: &Integrand, budget: &SampleBudget, build: impl Fn(&SampleBudget) -> Result<Plan>) -> Result<Estimate> {
    let mut b = budget.clone();
    let mut best: Option<Estimate> = None;
    let mut last_total = 0;
    for _ in 0..4 {
        let plan = match build(&b) {
            Ok(p) => p,
            Err(Error::Budget { .. }) if best.is_some() => break,
            Err(e) => return Err(e),
        };
        let total = plan.total();
        if total == last_total || (total > budget.max_nodes && best.is_some()) {
            break;
        }
        let replicated = matches!(plan, Plan::Replicated(_));
        let est = execute(plan, ig, budget)?;
        let converged = (0..ig.outputs).all(|i| est.errors[i] <= budget.tol * est.scales[i].max(f64::MIN_POSITIVE));
        best = Some(est);
        if converged || replicated {
            break;
        }
        last_total = total;
        b.smooth_extra += 8;
    }
    Ok(best.expect("at least one round"))
}

/// Gauss nodes for exactness up to `degree`.
fn exact_nodes(degree: usize) -> usize {
    degree / 2 + 1
}

fn unit(v: &[f64]) -> Vec<f64> {
    let l = norm(v);
    v.iter().map(|x| x / l).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Level {
    Hi,
    Lo,
}

/// Angular rule on the unit sphere orthogonal to `first`, reduced by the
/// integrand's symmetry when it is centered at `center`.
fn theta_rule(center: &[f64], first: &[f64], ig: &Integrand, extra: usize) -> SphereRule {
    let n = center.len();
    let axes: Vec<Vec<f64>> = match &ig.symmetry {
        Some(s) if s.center.as_ref().is_none_or(|c| norm(&sub(c, center)) <= 1e-12 * (1.0 + norm(center))) => s.axes.clone(),
        _ => (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect(),
    };
    let (frame, active) = adapted_frame(n, Some(first), &axes);
    SphereRule::product(&frame[1..], ig.angular_degree.min(ig.degree.max(1)).max(1) + extra, active)
}

fn ball_pole_set(ball: &Ball, y: &[f64], ig: &Integrand, window: (f64, f64), level: Level, extra: usize) -> BallPole {
    let n = ball.dim() as f64;
    let d = ig.degree;
    let drop = if level == Level::Hi { 0 } else { 2 };
    let window_extra = if window.0 > 0.0 { extra } else { 0 };
    let n_sigma = exact_nodes(d) + 2 + window_extra - drop;
    let n_t = d + 3 + if ball.dim() % 2 == 0 { 6 } else { 0 } - drop;
    let nu = unit(&sub(&ball.center, y));
    let two_r = 2.0 * ball.radius;
    let h = 0.5 * (n - 3.0);
    let tr = gauss_jacobi01(n_t, n - ig.beta, h);
    let scale = two_r.powf(n - ig.beta);
    let t = Rule1D {
        w: tr.x.iter().zip(&tr.w).map(|(x, w)| w * scale * (1.0 + x).powf(h)).collect(),
        x: tr.x,
    };
    let sigma = power_weight(n_sigma, n - 1.0 - ig.beta, window.0, window.1);
    BallPole {
        y: y.to_vec(),
        theta: theta_rule(&ball.center, &nu, ig, 0),
        nu,
        two_r,
        t,
        sigma,
    }
}

fn ball_centered_set(ball: &Ball, y: &[f64], ig: &Integrand, level: Level, extra: usize, smooth: bool) -> BallCentered {
    let n = ball.dim();
    let d = ig.degree;
    let drop = if level == Level::Hi { 0 } else { 3 };
    let (es, et) = if smooth { (extra, 2 * extra) } else { (3, 3) };
    let ns = exact_nodes(d) + es - drop;
    let nt = exact_nodes(d) + et - drop;
    let off = sub(y, &ball.center);
    let e = if norm(&off) > 1e-12 * ball.radius {
        unit(&off)
    } else {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    };
    let h = 0.5 * (n as f64 - 3.0);
    BallCentered {
        c: ball.center.clone(),
        theta: theta_rule(&ball.center, &e, ig, if smooth { extra } else { 0 }),
        e,
        y: y.to_vec(),
        beta: ig.beta,
        s: power_weight(ns, n as f64 - 1.0, 0.0, ball.radius),
        t: gauss_jacobi(nt, h, h),
    }
}

fn facet_holds(poly: &ConvexPolytope, f: usize, y: &[f64]) -> bool {
    let h = &poly.halfspaces()[poly.facets()[f].halfspace];
    (dot(&h.a, y) - h.b).abs() <= 1e3 * poly.tolerance()
}

fn points(poly: &ConvexPolytope, ids: &[usize]) -> Vec<Point> {
    ids.iter().map(|&k| poly.vertices()[k].clone()).collect()
}

/// Base rules for cones: `Ok(product rules)` or replicated LD rules.
enum BaseRules {
    Product(SimplexRule, SimplexRule),
    Replicated(Vec<SimplexRule>),
}

fn base_rules(k: usize, degree: usize, cones: usize, tau_nodes: usize, budget: &SampleBudget) -> BaseRules {
    let hi = exact_nodes(degree) + budget.smooth_extra;
    let lo = hi.saturating_sub(3).max(1);
    let product_count = (cones * tau_nodes) as u64 * ((hi as u64).pow(k as u32) + (lo as u64).pow(k as u32));
    let ld = |points: usize, reps: usize| {
        BaseRules::Replicated(
            (0..reps)
                .map(|r| SimplexRule::low_discrepancy(k, points, &lowdisc::shift(k, budget.seed, r as u64)))
                .collect(),
        )
    };
    match budget.base {
        BaseScheme::Product => BaseRules::Product(SimplexRule::stroud(k, hi), SimplexRule::stroud(k, lo)),
        BaseScheme::LowDiscrepancy { points, replications } => ld(points, replications),
        BaseScheme::Auto => {
            if product_count <= budget.max_nodes {
                BaseRules::Product(SimplexRule::stroud(k, hi), SimplexRule::stroud(k, lo))
            } else {
                ld(1024, 8)
            }
        }
    }
}

fn pole_cone_plan(cones: Vec<Cone>, k: usize, ig: &Integrand, window: (f64, f64), budget: &SampleBudget) -> Plan {
    let window_extra = if window.0 > 0.0 { budget.smooth_extra } else { 0 };
    let nt = exact_nodes(ig.degree) + 2 + window_extra;
    let tau_hi = power_weight(nt, k as f64 - ig.beta, window.0, window.1);
    let tau_lo = power_weight(nt - 2, k as f64 - ig.beta, window.0, window.1);
    let make = |tau: Rule1D, base: SimplexRule| -> Box<dyn NodeSet> {
        Box::new(PoleCones {
            cones: cones.clone(),
            beta: ig.beta,
            tau,
            base,
        })
    };
    match base_rules(k, ig.degree, cones.len(), nt, budget) {
        BaseRules::Product(hi, lo) => Plan::Pair {
            hi: vec![make(tau_hi, hi)],
            lo: vec![make(tau_lo, lo)],
        },
        BaseRules::Replicated(rules) => Plan::Replicated(rules.into_iter().map(|b| vec![make(tau_hi.clone(), b)]).collect()),
    }
}

fn check_divergence(beta: f64, limit: usize, what: &str) -> Result<()> {
    if beta >= limit as f64 {
        return Err(Error::Divergent(format!(
            "{what} weight exponent {beta} >= {limit} with the pole on the boundary"
        )));
    }
    Ok(())
}

fn volume_plan(domain: &Domain, y: &[f64], ig: &Integrand, budget: &SampleBudget, window: (f64, f64)) -> Result<Plan> {
    let n = domain.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let kind = classify_pole(domain, y)?;
    if kind == PoleKind::Interior && ig.beta != 0.0 {
        return Err(Error::Precondition("pole lies inside the domain".into()));
    }
    if kind == PoleKind::Boundary {
        check_divergence(ig.beta, n, "volume")?;
    }
    let extra = budget.smooth_extra;
    match domain {
        Domain::Ball(b) => {
            if kind == PoleKind::Boundary && (ig.beta != 0.0 || ig.polar || window != (0.0, 1.0)) {
                Ok(Plan::Pair {
                    hi: vec![Box::new(ball_pole_set(b, y, ig, window, Level::Hi, extra))],
                    lo: vec![Box::new(ball_pole_set(b, y, ig, window, Level::Lo, extra))],
                })
            } else {
                let smooth = kind == PoleKind::Exterior && (ig.beta != 0.0 || ig.polar);
                Ok(Plan::Pair {
                    hi: vec![Box::new(ball_centered_set(b, y, ig, Level::Hi, extra, smooth))],
                    lo: vec![Box::new(ball_centered_set(b, y, ig, Level::Lo, extra, smooth))],
                })
            }
        }
        Domain::Polytope(p) => {
            if kind == PoleKind::Boundary {
                let mut cones = Vec::new();
                for (f, simplices) in p.facet_simplices().iter().enumerate() {
                    if facet_holds(p, f, y) {
                        continue;
                    }
                    for s in simplices {
                        cones.push(Cone::new(y, points(p, s), Vec::new()));
                    }
                }
                Ok(pole_cone_plan(cones, n - 1, ig, window, budget))
            } else {
                let simplices: Vec<_> = p
                    .volume_simplices()
                    .into_iter()
                    .map(|s| {
                        let v = crate::geometry::simplex_volume(&s);
                        (s, v, Vec::new())
                    })
                    .collect();
                let hi = exact_nodes(ig.degree) + if ig.beta != 0.0 || ig.polar { extra } else { 2 };
                let make = |k: usize| -> Box<dyn NodeSet> {
                    Box::new(Simplices {
                        simplices: simplices.clone(),
                        y: y.to_vec(),
                        beta: ig.beta,
                        rule: SimplexRule::stroud(n, k),
                    })
                };
                check_product_size(simplices.len(), n, hi, budget)?;
                Ok(Plan::Pair {
                    hi: vec![make(hi)],
                    lo: vec![make(hi - 2)],
                })
            }
        }
        Domain::Polygon(_) => Err(Error::Unsupported("volume quadrature on polygons".into())),
    }
}

fn check_product_size(simplices: usize, k: usize, nodes: usize, budget: &SampleBudget) -> Result<()> {
    let needed = simplices as u64 * (nodes as u64).saturating_pow(k as u32);
    if needed > budget.max_nodes {
        return Err(Error::Budget {
            needed,
            max: budget.max_nodes,
        });
    }
    Ok(())
}

/// `int_Omega F rho^-beta dx` for a pole on the sphere of a ball.
pub fn integrate_ball_pole_boundary(ball: &Ball, y: &[f64], ig: &Integrand, budget: &SampleBudget) -> Result<Estimate> {
    budget.validate()?;
    let domain = Domain::Ball(ball.clone());
    if classify_pole(&domain, y)? != PoleKind::Boundary {
        return Err(Error::Precondition("pole must lie on the sphere".into()));
    }
    check_divergence(ig.beta, ball.dim(), "volume")?;
    let plan = Plan::Pair {
        hi: vec![Box::new(ball_pole_set(ball, y, ig, (0.0, 1.0), Level::Hi, budget.smooth_extra))],
        lo: vec![Box::new(ball_pole_set(ball, y, ig, (0.0, 1.0), Level::Lo, budget.smooth_extra))],
    };
    execute(plan, ig, budget)
}

/// `int_Omega F rho^-beta dx` over a ball or convex polytope.
pub fn integrate_generic(domain: &Domain, y: &[f64], ig: &Integrand, budget: &SampleBudget) -> Result<Estimate> {
    budget.validate()?;
    refine(ig, budget, |b| volume_plan(domain, y, ig, b, (0.0, 1.0)))
}

/// Homothetic shells about a boundary pole: shell `j` is the image of the
/// domain under scaling about `y` by factors in `[2^-(j+1), 2^-j]`; the last
/// entry is the innermost remainder `[0, 2^-shells]`.
pub fn integrate_shells(domain: &Domain, y: &[f64], ig: &Integrand, budget: &SampleBudget, shells: usize) -> Result<Vec<Estimate>> {
    budget.validate()?;
    if classify_pole(domain, y)? != PoleKind::Boundary {
        return Err(Error::Precondition("shells need a pole on the boundary".into()));
    }
    let mut out = Vec::with_capacity(shells + 1);
    for j in 0..=shells {
        let window = if j < shells {
            (0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32))
        } else {
            (0.0, 0.5f64.powi(shells as i32))
        };
        out.push(refine(ig, budget, |b| volume_plan(domain, y, ig, b, window))?);
    }
    Ok(out)
}

fn surface_plan(domain: &Domain, y: &[f64], ig: &Integrand, budget: &SampleBudget, skip_pole_facets: bool) -> Result<Plan> {
    let n = domain.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let kind = classify_pole(domain, y)?;
    if kind == PoleKind::Interior && ig.beta != 0.0 {
        return Err(Error::Precondition("pole lies inside the domain".into()));
    }
    let extra = budget.smooth_extra;
    let d = ig.degree;
    match domain {
        Domain::Ball(b) => {
            let nf = n as f64;
            let h = 0.5 * (nf - 3.0);
            if kind == PoleKind::Boundary && ig.beta != 0.0 {
                check_divergence(ig.beta, n - 1, "surface")?;
                let nu = unit(&sub(&b.center, y));
                let theta = theta_rule(&b.center, &nu, ig, 0);
                let scale = b.radius.powf(nf - 1.0) * 2f64.powf(nf - 2.0) * (2.0 * b.radius).powf(-ig.beta);
                let make = |k: usize| -> Box<dyn NodeSet> {
                    let r = gauss_jacobi01(k, h - 0.5 * ig.beta, h);
                    Box::new(SphereCap {
                        c: b.center.clone(),
                        nu: nu.clone(),
                        radius: b.radius,
                        s: Rule1D {
                            x: r.x,
                            w: r.w.iter().map(|w| w * scale).collect(),
                        },
                        theta: theta.clone(),
                    })
                };
                let hi = exact_nodes(d) + 2;
                Ok(Plan::Pair {
                    hi: vec![make(hi)],
                    lo: vec![make(hi - 2)],
                })
            } else {
                let off = sub(y, &b.center);
                let e = if norm(&off) > 1e-12 * b.radius {
                    unit(&off)
                } else {
                    let mut e = vec![0.0; n];
                    e[0] = 1.0;
                    e
                };
                let smooth = kind == PoleKind::Exterior && (ig.beta != 0.0 || ig.polar);
                let theta = theta_rule(&b.center, &e, ig, if smooth { extra } else { 0 });
                let scale = b.radius.powf(nf - 1.0);
                let make = |k: usize| -> Box<dyn NodeSet> {
                    let r = gauss_jacobi(k, h, h);
                    Box::new(SphereCentered {
                        c: b.center.clone(),
                        e: e.clone(),
                        radius: b.radius,
                        y: y.to_vec(),
                        beta: ig.beta,
                        t: Rule1D {
                            x: r.x,
                            w: r.w.iter().map(|w| w * scale).collect(),
                        },
                        theta: theta.clone(),
                    })
                };
                let hi = exact_nodes(d) + if smooth { 2 * extra } else { 3 };
                Ok(Plan::Pair {
                    hi: vec![make(hi)],
                    lo: vec![make(hi - 3)],
                })
            }
        }
        Domain::Polytope(p) => {
            let mut cones = Vec::new();
            let mut plain = Vec::new();
            for (f, simplices) in p.facet_simplices().iter().enumerate() {
                let normal = p.normal(f).to_vec();
                if kind == PoleKind::Boundary && facet_holds(p, f, y) {
                    if skip_pole_facets {
                        continue;
                    }
                    check_divergence(ig.beta, n - 1, "surface")?;
                    for base in p.cone_bases(&p.facets()[f].vertices, n - 1, y) {
                        cones.push(Cone::new(y, points(p, &base), normal.clone()));
                    }
                } else {
                    for s in simplices {
                        let pts = points(p, s);
                        let v = crate::geometry::simplex_volume(&pts);
                        plain.push((pts, v, normal.clone()));
                    }
                }
            }
            let nb = exact_nodes(d) + if ig.beta != 0.0 || ig.polar { extra } else { 2 };
            check_product_size(plain.len(), n - 1, nb, budget)?;
            let make_plain = |k: usize| -> Box<dyn NodeSet> {
                Box::new(Simplices {
                    simplices: plain.clone(),
                    y: y.to_vec(),
                    beta: ig.beta,
                    rule: SimplexRule::stroud(n - 1, k),
                })
            };
            let cone_plan = if cones.is_empty() {
                None
            } else {
                Some(pole_cone_plan(cones, n - 2, ig, (0.0, 1.0), budget))
            };
            match cone_plan {
                None => Ok(Plan::Pair {
                    hi: vec![make_plain(nb)],
                    lo: vec![make_plain(nb - 2)],
                }),
                Some(Plan::Pair { mut hi, mut lo }) => {
                    hi.push(make_plain(nb));
                    lo.push(make_plain(nb - 2));
                    Ok(Plan::Pair { hi, lo })
                }
                Some(Plan::Replicated(mut reps)) => {
                    for r in reps.iter_mut() {
                        r.push(make_plain(nb));
                    }
                    Ok(Plan::Replicated(reps))
                }
            }
        }
        Domain::Polygon(_) => Err(Error::Unsupported(
            "polygon surfaces are handled by the solver grid".into(),
        )),
    }
}

/// `int_{boundary} G(x, N) rho^-beta dsigma`. Facets through a boundary pole
/// are skipped when `skip_pole_facets` is set, which is exact for integrands
/// carrying the factor `<x - y, N>`.
pub fn integrate_surface(domain: &Domain, y: &[f64], ig: &Integrand, budget: &SampleBudget, skip_pole_facets: bool) -> Result<Estimate> {
    budget.validate()?;
    refine(ig, budget, |b| surface_plan(domain, y, ig, b, skip_pole_facets))
}

fn materialize(sets: &Sets) -> QuadratureRule {
    let mut rule = QuadratureRule::default();
    for s in sets {
        s.visit(&mut |x, normal, w| {
            rule.nodes.push(x.to_vec());
            rule.normals.push(normal.to_vec());
            rule.weights.push(w);
        });
    }
    rule
}

fn first_rule(plan: Plan) -> QuadratureRule {
    match plan {
        Plan::Pair { hi, .. } => materialize(&hi),
        Plan::Replicated(reps) => materialize(&reps[0]),
    }
}

/// Nodes and weights of the volume rule used for `integrate_generic`
/// (weights include `rho^-beta`).
pub fn volume_rule(domain: &Domain, y: &[f64], beta: f64, degree: usize, budget: &SampleBudget) -> Result<QuadratureRule> {
    let f = |_: &[f64], _: &[f64], _: &mut [f64]| {};
    let ig = Integrand::new(1, beta, degree, &f);
    Ok(first_rule(volume_plan(domain, y, &ig, budget, (0.0, 1.0))?))
}

/// Nodes, normals and weights of the surface rule used for `integrate_surface`.
pub fn surface_rule(domain: &Domain, y: &[f64], beta: f64, degree: usize, budget: &SampleBudget) -> Result<QuadratureRule> {
    let f = |_: &[f64], _: &[f64], _: &mut [f64]| {};
    let ig = Integrand::new(1, beta, degree, &f);
    Ok(first_rule(surface_plan(domain, y, &ig, budget, false)?))
}
