//! Test matrices and their execution: identity verification, positivity at
//! `alpha_n`, the convexity sign of the surface term, and corner decay.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants;
use crate::decay::{self, CornerComparison, LShapeConfig};
use crate::error::{Error, Result};
use crate::geometry::{self, Ball, ConvexPolytope, Domain, DomainSpec, Polygon2D, SampleScheme};
use crate::identities::{self, IdentityId, IdentityReport, PositivityReport};
use crate::jets::{ClampedField, MonomialSpec, MultiPoly, DEFAULT_FIELD_DEGREE_CAP};
use crate::quadrature::SampleBudget;

/// Worker count: `BIHARM_WORKERS` if set, otherwise the available cores.
pub fn worker_count() -> usize {
    std::env::var("BIHARM_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|w| *w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Maps `f` over `items` on `workers` threads; output order is input order.
pub fn run_pool<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every item ran"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DomainKind {
    Ball,
    Cube,
    Simplex,
}

impl DomainKind {
    pub const ALL: [DomainKind; 3] = [DomainKind::Ball, DomainKind::Cube, DomainKind::Simplex];

    pub fn build(&self, n: usize) -> Result<Domain> {
        Ok(match self {
            DomainKind::Ball => Domain::Ball(Ball::unit(n)?),
            DomainKind::Cube => Domain::Polytope(ConvexPolytope::cube(n, 0.0, 1.0)?),
            DomainKind::Simplex => Domain::Polytope(ConvexPolytope::corner_simplex(n)?),
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ball" => Ok(DomainKind::Ball),
            "cube" => Ok(DomainKind::Cube),
            "simplex" => Ok(DomainKind::Simplex),
            _ => Err(Error::Config(format!("unknown domain {s:?} (ball, cube, simplex)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolePlacement {
    Exterior,
    /// Sphere point for balls, facet center for polytopes.
    Boundary,
    BoundaryVertex,
    BoundaryFacetCenter,
    BoundarySpherePoint,
}

impl PolePlacement {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
            .map_err(|_| Error::Config(format!("unknown pole placement {s:?}")))
    }

    pub fn is_boundary(&self) -> bool {
        *self != PolePlacement::Exterior
    }
}

/// Pole for a placement, or `None` when the placement does not apply.
pub fn place_pole(domain: &Domain, pole: PolePlacement) -> Option<Vec<f64>> {
    let n = domain.dim();
    match (domain, pole) {
        (Domain::Ball(b), PolePlacement::Exterior) => {
            let mut y = b.center.clone();
            y[0] += 2.0 * b.radius;
            Some(y)
        }
        (Domain::Ball(b), PolePlacement::Boundary | PolePlacement::BoundarySpherePoint) => {
            let mut y = b.center.clone();
            y[0] += b.radius;
            Some(y)
        }
        (Domain::Polytope(p), PolePlacement::Exterior) => {
            let c = p.facet_center(0);
            let s = 0.5 * p.diameter() / (n as f64).sqrt();
            Some(c.iter().zip(p.normal(0)).map(|(c, a)| c + s * a).collect())
        }
        (Domain::Polytope(p), PolePlacement::Boundary | PolePlacement::BoundaryFacetCenter) => Some(p.facet_center(0)),
        (Domain::Polytope(p), PolePlacement::BoundaryVertex) => Some(p.vertices()[0].clone()),
        _ => None,
    }
}

/// Smooth factor `p` of a test field `u = (clamping factor)^2 p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum FieldChoice {
    /// `1 + x_1/2 - 3 x_2^2/10` on balls, `1` on polytopes.
    Default,
    Poly { monomials: Vec<MonomialSpec> },
}

pub fn default_ball_factor(n: usize) -> MultiPoly {
    let mut p = MultiPoly::constant(n, 1.0).add(&MultiPoly::var(n, 0).scale(0.5)).expect("same dimension");
    if n >= 2 {
        let x2 = MultiPoly::var(n, 1);
        p = p.add(&x2.mul(&x2).expect("degree 2").scale(-0.3)).expect("same dimension");
    }
    p
}

pub fn build_field(domain: &Domain, choice: &FieldChoice, cap: usize) -> Result<ClampedField> {
    let n = domain.dim();
    let p = match (choice, domain) {
        (FieldChoice::Default, Domain::Ball(_)) => default_ball_factor(n),
        (FieldChoice::Default, _) => MultiPoly::constant(n, 1.0),
        (FieldChoice::Poly { monomials }, _) => MultiPoly::from_spec(n, monomials)?,
    };
    match domain {
        Domain::Ball(b) => ClampedField::ball_with_cap(&b.center, b.radius, p, cap),
        Domain::Polytope(poly) => ClampedField::polytope_with_cap(poly, p, cap),
        Domain::Polygon(_) => Err(Error::Unsupported("test fields are built on balls and polytopes".into())),
    }
}

/// `{0, 1, n-4, n-2}` and `alpha_n` for `n >= 8`, duplicates removed.
pub fn default_alphas(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut v = vec![0.0, 1.0, nf - 4.0, nf - 2.0];
    if let Ok(a) = constants::alpha_n(n) {
        v.push(a);
    }
    let mut out: Vec<f64> = Vec::new();
    for a in v {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub identities: Vec<IdentityId>,
    pub dims: Vec<usize>,
    pub domains: Vec<DomainKind>,
    /// Replaces `dims` x `domains` when present.
    pub custom_domain: Option<DomainSpec>,
    /// Per-dimension defaults when absent.
    pub alphas: Option<Vec<f64>>,
    pub poles: Vec<PolePlacement>,
    pub field: FieldChoice,
    pub degree_cap: usize,
    pub budget: SampleBudget,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            identities: IdentityId::ALL.to_vec(),
            dims: vec![2, 3, 4, 6, 8],
            domains: DomainKind::ALL.to_vec(),
            custom_domain: None,
            alphas: None,
            poles: vec![PolePlacement::Exterior, PolePlacement::Boundary],
            field: FieldChoice::Default,
            degree_cap: DEFAULT_FIELD_DEGREE_CAP,
            budget: SampleBudget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseSpec {
    pub n: usize,
    pub domain: String,
    pub alpha: f64,
    pub pole: PolePlacement,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseOutcome {
    pub case: CaseSpec,
    pub reports: Vec<IdentityReport>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedCase {
    pub n: usize,
    pub domain: String,
    pub alpha: Option<f64>,
    pub pole: Option<PolePlacement>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub cases: usize,
    pub reports: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyResults {
    pub summary: Summary,
    pub cases: Vec<CaseOutcome>,
    pub skipped: Vec<SkippedCase>,
}

impl VerifyResults {
    pub fn pass(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    pub fn reports(&self) -> impl Iterator<Item = &IdentityReport> {
        self.cases.iter().flat_map(|c| c.reports.iter())
    }
}

struct Prepared {
    spec: CaseSpec,
    domain: Domain,
    field: std::sync::Arc<ClampedField>,
}

fn domain_list(cfg: &VerifyConfig) -> Result<Vec<(String, Domain)>> {
    if let Some(spec) = &cfg.custom_domain {
        return Ok(vec![("custom".into(), Domain::from_spec(spec.clone())?)]);
    }
    let mut out = Vec::new();
    for &n in &cfg.dims {
        if !(2..=8).contains(&n) {
            return Err(Error::Config(format!("dimension {n} outside 2..=8")));
        }
        for kind in &cfg.domains {
            out.push((format!("{kind:?}").to_lowercase(), kind.build(n)?));
        }
    }
    Ok(out)
}

fn prepare(cfg: &VerifyConfig) -> Result<(Vec<Prepared>, Vec<SkippedCase>)> {
    let mut cases = Vec::new();
    let mut skipped = Vec::new();
    for (name, domain) in domain_list(cfg)? {
        let n = domain.dim();
        let field = match build_field(&domain, &cfg.field, cfg.degree_cap) {
            Ok(f) => std::sync::Arc::new(f),
            Err(e @ Error::DegreeCap { .. }) => {
                skipped.push(SkippedCase {
                    n,
                    domain: name.clone(),
                    alpha: None,
                    pole: None,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let alphas = cfg.alphas.clone().unwrap_or_else(|| default_alphas(n));
        for &alpha in &alphas {
            for &pole in &cfg.poles {
                let skip = |reason: String| SkippedCase {
                    n,
                    domain: name.clone(),
                    alpha: Some(alpha),
                    pole: Some(pole),
                    reason,
                };
                let Some(y) = place_pole(&domain, pole) else {
                    skipped.push(skip(format!("pole placement {pole:?} does not apply")));
                    continue;
                };
                if pole.is_boundary() && alpha >= n as f64 {
                    skipped.push(skip(format!("boundary pole needs alpha < n (alpha = {alpha})")));
                    continue;
                }
                cases.push(Prepared {
                    spec: CaseSpec {
                        n,
                        domain: name.clone(),
                        alpha,
                        pole,
                        y,
                    },
                    domain: domain.clone(),
                    field: field.clone(),
                });
            }
        }
    }
    Ok((cases, skipped))
}

/// Explicitly requested `alpha >= n` with a boundary pole is an error;
/// only the default lists are silently thinned.
fn check_explicit_alphas(cfg: &VerifyConfig) -> Result<()> {
    let Some(alphas) = &cfg.alphas else { return Ok(()) };
    if !cfg.poles.iter().any(|p| p.is_boundary()) {
        return Ok(());
    }
    let dims = match &cfg.custom_domain {
        Some(spec) => vec![Domain::from_spec(spec.clone())?.dim()],
        None => cfg.dims.clone(),
    };
    for &n in &dims {
        if let Some(a) = alphas.iter().find(|a| **a >= n as f64) {
            return Err(Error::Precondition(format!("boundary pole needs alpha < n, got alpha = {a} with n = {n}")));
        }
    }
    Ok(())
}

/// Runs the verification matrix.
pub fn run_verify(cfg: &VerifyConfig, workers: usize) -> Result<VerifyResults> {
    cfg.budget.validate()?;
    if cfg.identities.is_empty() {
        return Err(Error::Config("no identities selected".into()));
    }
    check_explicit_alphas(cfg)?;
    let (prepared, skipped) = prepare(cfg)?;
    for s in &skipped {
        log::info!("skipped n={} {} alpha={:?} pole={:?}: {}", s.n, s.domain, s.alpha, s.pole, s.reason);
    }
    let cases = run_pool(&prepared, workers, |p| {
        let r = identities::evaluate_many(&cfg.identities, &p.domain, p.field.as_ref(), &p.spec.y, p.spec.alpha, &cfg.budget);
        match r {
            Ok(reports) => {
                let pass = reports.iter().all(|r| r.pass);
                CaseOutcome {
                    case: p.spec.clone(),
                    reports,
                    error: None,
                    pass,
                }
            }
            Err(e) => CaseOutcome {
                case: p.spec.clone(),
                reports: Vec::new(),
                error: Some(e.to_string()),
                pass: false,
            },
        }
    });
    let reports: Vec<&IdentityReport> = cases.iter().flat_map(|c| c.reports.iter()).collect();
    let summary = Summary {
        cases: cases.len(),
        reports: reports.len(),
        passed: reports.iter().filter(|r| r.pass).count(),
        failed: reports.iter().filter(|r| !r.pass).count(),
        errors: cases.iter().filter(|c| c.error.is_some()).count(),
        skipped: skipped.len(),
    };
    Ok(VerifyResults { summary, cases, skipped })
}

/// Evaluation errors that are configuration problems rather than numerical
/// failures (exit code 2 at the command line).
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Precondition(_) | Error::Config(_) | Error::Unsupported(_) | Error::DimensionMismatch { .. } | Error::InvalidDomain(_) | Error::DegreeCap { .. } | Error::Json(_)
    )
}

/// Seeded smooth factor: uniform coefficients in `[-1, 1]` on the monomials
/// of degree at most `degree` in the first `vars` coordinates, plus 2.
pub fn random_factor(n: usize, vars: usize, degree: usize, rng: &mut ChaCha8Rng) -> MultiPoly {
    let vars = vars.min(n);
    let mut p = MultiPoly::constant(n, 2.0);
    let mut exps = vec![0u32; n];
    fn rec(i: usize, left: usize, vars: usize, exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == vars {
            out.push(exps.clone());
            return;
        }
        for k in 0..=left {
            exps[i] = k as u32;
            rec(i + 1, left - k, vars, exps, out);
        }
        exps[i] = 0;
    }
    let mut all = Vec::new();
    rec(0, degree, vars, &mut exps, &mut all);
    for e in all {
        let c = 2.0 * rng.random::<f64>() - 1.0;
        p = p.add(&MultiPoly::monomial(c, &e).expect("valid monomial")).expect("same dimension");
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct PositivityConfig {
    pub dims: Vec<usize>,
    pub domains: Vec<DomainKind>,
    pub fields: usize,
    /// Coordinates the random factor depends on.
    pub vars: usize,
    pub factor_degree: usize,
    pub degree_cap: usize,
    pub budget: SampleBudget,
}

impl Default for PositivityConfig {
    fn default() -> Self {
        PositivityConfig {
            dims: vec![8],
            domains: vec![DomainKind::Ball, DomainKind::Simplex],
            fields: 20,
            vars: 4,
            factor_degree: 2,
            degree_cap: 24,
            budget: SampleBudget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PositivityCase {
    pub n: usize,
    pub domain: String,
    pub field_index: usize,
    pub factor: Vec<MonomialSpec>,
    pub report: Option<PositivityReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PositivityResults {
    pub cases: Vec<PositivityCase>,
    pub passed: usize,
    pub total: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl PositivityResults {
    pub fn pass(&self) -> bool {
        self.passed == self.total
    }
}

pub fn run_positivity(cfg: &PositivityConfig, workers: usize) -> Result<PositivityResults> {
    cfg.budget.validate()?;
    let mut jobs = Vec::new();
    for &n in &cfg.dims {
        constants::alpha_n(n)?;
        for kind in &cfg.domains {
            let domain = kind.build(n)?;
            let pole = place_pole(&domain, PolePlacement::Boundary).expect("boundary placement applies");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.budget.seed ^ ((n as u64) << 32) ^ (*kind as u64) << 40);
            for i in 0..cfg.fields {
                let p = random_factor(n, cfg.vars, cfg.factor_degree, &mut rng);
                jobs.push((n, *kind, domain.clone(), pole.clone(), i, p));
            }
        }
    }
    let cases = run_pool(&jobs, workers, |(n, kind, domain, pole, i, p)| {
        let factor = p.to_spec();
        let run = || -> Result<PositivityReport> {
            let field = build_field(domain, &FieldChoice::Poly { monomials: factor.clone() }, cfg.degree_cap)?;
            identities::positivity_chain(domain, &field, pole, &cfg.budget)
        };
        let (report, error) = match run() {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        PositivityCase {
            n: *n,
            domain: format!("{kind:?}").to_lowercase(),
            field_index: *i,
            factor,
            report,
            error,
        }
    });
    let ratios: Vec<f64> = cases.iter().filter_map(|c| c.report.as_ref().map(|r| r.ratio)).collect();
    Ok(PositivityResults {
        passed: cases.iter().filter(|c| c.report.as_ref().is_some_and(|r| r.pass)).count(),
        total: cases.len(),
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        cases,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct ConvexityConfig {
    pub dims: Vec<usize>,
    pub domains: Vec<DomainKind>,
    pub alphas: Option<Vec<f64>>,
    pub poles: Vec<PolePlacement>,
    pub degree_cap: usize,
    pub budget: SampleBudget,
    /// Boundary samples for the pair probe on each domain.
    pub probe_samples: usize,
}

impl Default for ConvexityConfig {
    fn default() -> Self {
        ConvexityConfig {
            dims: vec![2, 3, 4, 6, 8],
            domains: DomainKind::ALL.to_vec(),
            alphas: None,
            poles: vec![PolePlacement::Boundary, PolePlacement::BoundaryVertex],
            degree_cap: DEFAULT_FIELD_DEGREE_CAP,
            budget: SampleBudget::default(),
            probe_samples: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceCase {
    pub case: CaseSpec,
    pub surface: f64,
    pub quad_error: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeResult {
    pub domain: String,
    pub n: usize,
    pub convex: bool,
    /// `min <P - Q, N(P)>` over sample pairs.
    pub min_support: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvexityResults {
    pub surface: Vec<SurfaceCase>,
    pub probes: Vec<ProbeResult>,
    pub skipped: Vec<SkippedCase>,
}

impl ConvexityResults {
    pub fn pass(&self) -> bool {
        self.surface.iter().all(|c| c.pass) && self.probes.iter().all(|p| p.pass)
    }
}

/// Every k-th patch, so that at most about `max` remain. Polytope samples
/// carry at least one node per facet simplex and can far exceed the budget.
fn thin(patches: Vec<geometry::BoundaryPatch>, max: usize) -> Vec<geometry::BoundaryPatch> {
    let k = patches.len().div_ceil(max.max(1)).max(1);
    patches.into_iter().step_by(k).collect()
}

fn probe(name: &str, n: usize, convex: bool, patches: &[geometry::BoundaryPatch]) -> ProbeResult {
    let (v, i, j) = geometry::convexity_pair_probe(patches);
    let pass = if convex { v >= -1e-10 } else { v < 0.0 };
    ProbeResult {
        domain: name.to_string(),
        n,
        convex,
        min_support: v,
        witness: (v < 0.0).then(|| (patches[i].point.clone(), patches[j].point.clone())),
        pass,
    }
}

pub fn run_convexity(cfg: &ConvexityConfig, workers: usize) -> Result<ConvexityResults> {
    cfg.budget.validate()?;
    let verify = VerifyConfig {
        identities: vec![IdentityId::I3_1],
        dims: cfg.dims.clone(),
        domains: cfg.domains.clone(),
        alphas: cfg.alphas.clone(),
        poles: cfg.poles.clone(),
        degree_cap: cfg.degree_cap,
        budget: cfg.budget.clone(),
        ..Default::default()
    };
    let (prepared, skipped) = prepare(&verify)?;
    let surface = run_pool(&prepared, workers, |p| {
        let run = || -> Result<(f64, f64)> {
            identities::check_admissible(&p.domain, &p.spec.y, p.spec.alpha)?;
            let est = identities::integrate_surface_term(&p.domain, p.field.as_ref(), &p.spec.y, p.spec.alpha, &cfg.budget)?;
            Ok((est.values[0], est.errors[0]))
        };
        match run() {
            Ok((s, e)) => SurfaceCase {
                case: p.spec.clone(),
                surface: s,
                quad_error: e,
                pass: s >= -3.0 * e,
                error: None,
            },
            Err(err) => SurfaceCase {
                case: p.spec.clone(),
                surface: f64::NAN,
                quad_error: f64::NAN,
                pass: false,
                error: Some(err.to_string()),
            },
        }
    });
    let mut probes = Vec::new();
    for (name, domain) in domain_list(&verify)? {
        let patches = geometry::surface_sample(&domain, cfg.probe_samples, SampleScheme::LowDiscrepancy, cfg.budget.seed)?;
        probes.push(probe(&name, domain.dim(), true, &thin(patches, cfg.probe_samples)));
    }
    let l = Polygon2D::l_shape();
    let per_edge = (cfg.probe_samples / l.vertices().len()).max(2);
    probes.push(probe("l-shape", 2, false, &l.boundary_samples(per_edge)));
    Ok(ConvexityResults { surface, probes, skipped })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LShapeResults {
    pub runs: Vec<CornerComparison>,
    pub ordered: usize,
}

pub fn run_l_shape(seeds: &[u64], cfg: &LShapeConfig, workers: usize) -> Result<LShapeResults> {
    let runs = run_pool(seeds, workers, |s| decay::l_shape_experiment(*s, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(LShapeResults {
        ordered: runs.iter().filter(|r| r.ordered).count(),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{classify_pole, PoleKind};

    #[test]
    fn pool_keeps_order() {
        let items: Vec<u64> = (0..37).collect();
        let out = run_pool(&items, 4, |x| x * x);
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!(run_pool(&Vec::<u64>::new(), 3, |x| *x).is_empty());
    }

    #[test]
    fn alpha_lists() {
        assert_eq!(default_alphas(4), vec![0.0, 1.0, 2.0]);
        assert_eq!(default_alphas(2), vec![0.0, 1.0, -2.0]);
        let a8 = default_alphas(8);
        assert_eq!(a8.len(), 5);
        assert!((a8[4] - 3.648666).abs() < 1e-6);
    }

    #[test]
    fn poles_land_where_placed() {
        for kind in DomainKind::ALL {
            let d = kind.build(3).unwrap();
            let ext = place_pole(&d, PolePlacement::Exterior).unwrap();
            assert_eq!(classify_pole(&d, &ext).unwrap(), PoleKind::Exterior);
            let b = place_pole(&d, PolePlacement::Boundary).unwrap();
            assert_eq!(classify_pole(&d, &b).unwrap(), PoleKind::Boundary);
        }
        let ball = DomainKind::Ball.build(3).unwrap();
        assert!(place_pole(&ball, PolePlacement::BoundaryVertex).is_none());
        assert_eq!(PolePlacement::parse("boundary-vertex").unwrap(), PolePlacement::BoundaryVertex);
        assert!(PolePlacement::parse("inside").is_err());
    }

    #[test]
    fn small_matrix_runs_and_skips() {
        let cfg = VerifyConfig {
            dims: vec![2, 4],
            domains: vec![DomainKind::Cube, DomainKind::Simplex],
            ..Default::default()
        };
        let r = run_verify(&cfg, 2).unwrap();
        assert!(r.pass(), "{:?}", r.summary);
        // The cube field for n = 4 exceeds the degree cap.
        assert!(r.skipped.iter().any(|s| s.domain == "cube" && s.n == 4 && s.alpha.is_none()));
        assert_eq!(r.summary.reports, r.summary.cases * 7);
        let bad = VerifyConfig {
            dims: vec![8],
            alphas: Some(vec![9.0]),
            poles: vec![PolePlacement::BoundaryVertex],
            ..Default::default()
        };
        assert!(matches!(run_verify(&bad, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_factor_is_seeded() {
        let a = random_factor(8, 4, 2, &mut ChaCha8Rng::seed_from_u64(3));
        let b = random_factor(8, 4, 2, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert_eq!(a.degree(), 2);
        assert!(a.n_terms() <= 15);
    }
}
