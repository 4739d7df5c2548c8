use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use biharm_core::campaign::{self, ConvexityConfig, ConvexityResults, PositivityConfig, PositivityResults, VerifyConfig, VerifyResults};
use biharm_core::constants::{self, ExponentTable};
use biharm_core::decay::{self, CaccioppoliRatio, DecayFit, LShapeConfig};
use biharm_core::identities::CSV_HEADER;
use biharm_core::solver::{self, io::GridValues, ClampedData, ConvergenceRow, ExactData, ZeroData};
use biharm_core::{Backend, DomainSpec, FieldChoice, JetField, Polygon2D, Report, SampleBudget, SolveOptions};

use crate::args::*;
use crate::parse::{self, DomainArg};

/// Rendered report and overall verdict.
pub struct Output {
    pub body: String,
    pub pass: bool,
}

fn load_config<T: DeserializeOwned + Default>(common: &Common) -> Result<T> {
    match &common.config {
        None => Ok(T::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
        }
    }
}

fn apply_budget(common: &Common, budget: &mut SampleBudget) -> Result<()> {
    if let Some(s) = common.seed {
        budget.seed = s;
    }
    if let Some(t) = common.tol {
        budget.tol = t;
    }
    if let Some(m) = common.max_nodes {
        budget.max_nodes = m;
    }
    budget.validate()?;
    Ok(())
}

fn backend(b: BackendArg) -> Backend {
    match b {
        BackendArg::Cg => Backend::Cg,
        BackendArg::Banded => Backend::Banded,
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn render<T: Serialize, C: Serialize>(
    common: &Common,
    command: &str,
    seed: u64,
    config: &C,
    pass: bool,
    results: T,
    csv: impl FnOnce(&T) -> Result<String>,
    text: impl FnOnce(&T) -> String,
) -> Result<Output> {
    let body = match common.format {
        Format::Json => Report::new(command, timestamp(), seed, config, pass, &results)?.to_json()?,
        Format::Csv => csv(&results)?,
        Format::Text => {
            let mut s = text(&results);
            let _ = writeln!(s, "seed {seed}  {}", if pass { "PASS" } else { "FAIL" });
            s
        }
    };
    Ok(Output { body, pass })
}

fn e(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.6}"))
}

pub fn constants(common: &Common, a: &ConstantsArgs) -> Result<Output> {
    #[derive(Serialize, Deserialize)]
    #[serde(rename_all = "camelCase", default, deny_unknown_fields)]
    struct Cfg {
        dims: Vec<usize>,
    }
    impl Default for Cfg {
        fn default() -> Self {
            Cfg { dims: (4..=12).collect() }
        }
    }
    let mut cfg: Cfg = load_config(common)?;
    if common.config.is_none() || a.dims != "4..12" {
        cfg.dims = parse::dims(&a.dims)?;
    }
    if cfg.dims.iter().any(|n| *n < 2) {
        bail!("dimensions start at 2");
    }
    let rows: Vec<ExponentTable> = cfg.dims.iter().map(|n| constants::exponent_table(*n)).collect();
    let cells = |r: &ExponentTable| {
        vec![
            r.n.to_string(),
            format!("{}", r.quad_form_at_n_minus_4),
            opt(r.alpha_n),
            opt(r.lambda_n),
            r.p_upper_lipschitz.map_or("-".into(), |u| u.to_string()),
            r.p_upper_convex.to_string(),
            r.mazya_positivity.to_string(),
        ]
    };
    const HEAD: [&str; 7] = ["n", "quadForm(n,n-4)", "alpha_n", "lambda_n", "pUpperLipschitz", "pUpperConvex", "positiveAtNMinus4"];
    render(
        common,
        "constants",
        common.seed.unwrap_or(0),
        &cfg,
        true,
        rows,
        |rows| csv_string(&HEAD, rows.iter().map(cells)),
        |rows| {
            let mut s = String::new();
            let _ = writeln!(s, "{:>3} {:>16} {:>10} {:>10} {:>16} {:>13} {:>18}", HEAD[0], HEAD[1], HEAD[2], HEAD[3], HEAD[4], HEAD[5], HEAD[6]);
            for r in rows {
                let c = cells(r);
                let _ = writeln!(s, "{:>3} {:>16} {:>10} {:>10} {:>16} {:>13} {:>18}", c[0], c[1], c[2], c[3], c[4], c[5], c[6]);
            }
            s
        },
    )
}

pub fn verify(common: &Common, a: &VerifyArgs) -> Result<Output> {
    let mut cfg: VerifyConfig = load_config(common)?;
    if let Some(s) = &a.identity {
        cfg.identities = parse::identities(s)?;
    }
    if let Some(s) = &a.dim {
        cfg.dims = parse::dims(s)?;
    }
    if let Some(s) = &a.domain {
        match parse::domain(s)? {
            DomainArg::Kinds(k) => {
                cfg.domains = k;
                cfg.custom_domain = None;
            }
            DomainArg::Spec(spec) => cfg.custom_domain = Some(spec),
        }
    }
    if let Some(s) = &a.alpha {
        cfg.alphas = Some(parse::floats(s)?);
    }
    if let Some(s) = &a.pole {
        cfg.poles = parse::poles(s)?;
    }
    if let Some(s) = &a.field {
        cfg.field = FieldChoice::Poly { monomials: parse::monomials(s)? };
    }
    if let Some(c) = a.degree_cap {
        cfg.degree_cap = c;
    }
    apply_budget(common, &mut cfg.budget)?;
    let results = campaign::run_verify(&cfg, campaign::worker_count())?;
    let pass = results.pass();
    render(
        common,
        "verify",
        cfg.budget.seed,
        &cfg,
        pass,
        results,
        |r: &VerifyResults| csv_string(&CSV_HEADER, r.reports().map(|x| x.csv_row())),
        |r: &VerifyResults| {
            let mut s = String::new();
            let _ = writeln!(s, "{:<6} {:>2} {:<8} {:>9} {:<22} {:>11} {:>11} {:>5}", "id", "n", "domain", "alpha", "pole", "relResidual", "quadError", "pass");
            for c in &r.cases {
                if let Some(err) = &c.error {
                    let _ = writeln!(s, "error n={} {} alpha={} {:?}: {err}", c.case.n, c.case.domain, c.case.alpha, c.case.pole);
                }
                for x in &c.reports {
                    let pole = serde_json::to_value(c.case.pole).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                    let _ = writeln!(
                        s,
                        "{:<6} {:>2} {:<8} {:>9.5} {:<22} {:>11.3e} {:>11.3e} {:>5}",
                        x.identity.to_string(),
                        x.n,
                        c.case.domain,
                        x.alpha,
                        pole,
                        x.rel_residual,
                        x.quad_error,
                        x.pass
                    );
                }
            }
            let m = &r.summary;
            let _ = writeln!(s, "{} cases, {} reports: {} passed, {} failed, {} errors, {} skipped", m.cases, m.reports, m.passed, m.failed, m.errors, m.skipped);
            s
        },
    )
}

pub fn positivity(common: &Common, a: &PositivityArgs) -> Result<Output> {
    let mut cfg: PositivityConfig = load_config(common)?;
    if let Some(s) = &a.dim {
        cfg.dims = parse::dims(s)?;
    }
    if let Some(s) = &a.domain {
        cfg.domains = parse::domain_kinds(s)?;
    }
    if let Some(f) = a.fields {
        cfg.fields = f;
    }
    if let Some(c) = a.degree_cap {
        cfg.degree_cap = c;
    }
    apply_budget(common, &mut cfg.budget)?;
    let results = campaign::run_positivity(&cfg, campaign::worker_count())?;
    let pass = results.pass();
    const HEAD: [&str; 10] = ["n", "domain", "field", "slack", "slackError", "rhs", "rhsError", "ratio", "pass", "error"];
    render(
        common,
        "positivity",
        cfg.budget.seed,
        &cfg,
        pass,
        results,
        |r: &PositivityResults| {
            csv_string(
                &HEAD,
                r.cases.iter().map(|c| match &c.report {
                    Some(p) => vec![c.n.to_string(), c.domain.clone(), c.field_index.to_string(), e(p.slack), e(p.slack_error), e(p.rhs), e(p.rhs_error), e(p.ratio), p.pass.to_string(), String::new()],
                    None => {
                        let mut row = vec![c.n.to_string(), c.domain.clone(), c.field_index.to_string()];
                        row.extend(std::iter::repeat_n(String::new(), 5));
                        row.push("false".into());
                        row.push(c.error.clone().unwrap_or_default());
                        row
                    }
                }),
            )
        },
        |r: &PositivityResults| {
            let mut s = String::new();
            for c in &r.cases {
                match &c.report {
                    Some(p) => {
                        let _ = writeln!(s, "n={} {:<8} #{:<3} slack {:.4e} ± {:.1e}  rhs {:.4e} ± {:.1e}  {}", c.n, c.domain, c.field_index, p.slack, p.slack_error, p.rhs, p.rhs_error, p.pass);
                    }
                    None => {
                        let _ = writeln!(s, "n={} {:<8} #{:<3} error: {}", c.n, c.domain, c.field_index, c.error.as_deref().unwrap_or(""));
                    }
                }
            }
            let _ = writeln!(s, "{}/{} fields pass", r.passed, r.total);
            s
        },
    )
}

pub fn convexity(common: &Common, a: &ConvexityArgs) -> Result<Output> {
    let mut cfg: ConvexityConfig = load_config(common)?;
    if let Some(s) = &a.dim {
        cfg.dims = parse::dims(s)?;
    }
    if let Some(s) = &a.domain {
        cfg.domains = parse::domain_kinds(s)?;
    }
    if let Some(s) = &a.alpha {
        cfg.alphas = Some(parse::floats(s)?);
    }
    if let Some(s) = &a.pole {
        cfg.poles = parse::poles(s)?;
    }
    if let Some(p) = a.probe_samples {
        cfg.probe_samples = p;
    }
    apply_budget(common, &mut cfg.budget)?;
    let results = campaign::run_convexity(&cfg, campaign::worker_count())?;
    let pass = results.pass();
    const HEAD: [&str; 8] = ["kind", "n", "domain", "alpha", "pole", "value", "quadError", "pass"];
    render(
        common,
        "convexity",
        cfg.budget.seed,
        &cfg,
        pass,
        results,
        |r: &ConvexityResults| {
            let surf = r.surface.iter().map(|c| {
                vec![
                    "surface".into(),
                    c.case.n.to_string(),
                    c.case.domain.clone(),
                    e(c.case.alpha),
                    format!("{:?}", c.case.pole),
                    e(c.surface),
                    e(c.quad_error),
                    c.pass.to_string(),
                ]
            });
            let probes = r
                .probes
                .iter()
                .map(|p| vec!["probe".into(), p.n.to_string(), p.domain.clone(), String::new(), String::new(), e(p.min_support), String::new(), p.pass.to_string()]);
            csv_string(&HEAD, surf.chain(probes))
        },
        |r: &ConvexityResults| {
            let mut s = String::new();
            for c in &r.surface {
                let _ = writeln!(
                    s,
                    "surface n={} {:<8} alpha={:<9.5} {:?}: {:.4e} ± {:.1e} {}",
                    c.case.n, c.case.domain, c.case.alpha, c.case.pole, c.surface, c.quad_error, c.pass
                );
            }
            for p in &r.probes {
                let _ = writeln!(s, "probe   n={} {:<8} convex={} min <P-Q,N(P)> = {:.4e} {}", p.n, p.domain, p.convex, p.min_support, p.pass);
            }
            s
        },
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolygonChoice {
    Named(String),
    Spec(DomainSpec),
}

fn polygon(choice: &PolygonChoice) -> Result<Polygon2D> {
    match choice {
        PolygonChoice::Named(s) => match s.to_ascii_lowercase().as_str() {
            "l-shape" | "lshape" => Ok(Polygon2D::l_shape()),
            "square" | "unit-square" => Ok(Polygon2D::unit_square()),
            _ => bail!("unknown polygon {s:?} (l-shape, square, or polygon2d JSON)"),
        },
        PolygonChoice::Spec(DomainSpec::Polygon2d { vertices }) => Ok(Polygon2D::new(vertices.clone())?),
        PolygonChoice::Spec(_) => bail!("the solver runs on polygon2d domains only"),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SolveConfig {
    pub domain: PolygonChoice,
    pub h: Vec<f64>,
    pub data: SolveData,
    pub seed: u64,
    pub solver: SolveOptions,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            domain: PolygonChoice::Named("l-shape".into()),
            h: vec![1.0 / 64.0],
            data: SolveData::Cubic,
            seed: 1,
            solver: SolveOptions::default(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveOutcome {
    pub rows: Vec<ConvergenceRow>,
    pub converged: bool,
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    /// Nodal values of the finest solve; null outside the domain.
    pub values: Vec<Option<f64>>,
}

pub fn solve(common: &Common, a: &SolveArgs) -> Result<Output> {
    let mut cfg: SolveConfig = load_config(common)?;
    if let Some(s) = &a.domain {
        cfg.domain = match parse::json_text(s)? {
            Some(text) => PolygonChoice::Spec(serde_json::from_str(&text).context("invalid polygon JSON")?),
            None => PolygonChoice::Named(s.clone()),
        };
    }
    if let Some(s) = &a.h {
        cfg.h = parse::floats(s)?;
    }
    if let Some(d) = a.data {
        cfg.data = d;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(b) = a.backend {
        cfg.solver.backend = backend(b);
    }
    if let Some(t) = a.solver_tol {
        cfg.solver.tol = t;
    }
    if let Some(m) = a.max_iter {
        cfg.solver.max_iter = m;
    }
    if cfg.h.iter().any(|h| !(*h > 0.0)) {
        bail!("mesh widths must be positive");
    }
    let poly = polygon(&cfg.domain)?;
    let exact = solver::manufactured_cubic();
    let random = decay::CornerClampedData::random(Vec::new(), 0.0, 1.0, cfg.seed);
    let data: &dyn ClampedData = match cfg.data {
        SolveData::Cubic => &ExactData(&exact),
        SolveData::Zero => &ZeroData,
        SolveData::Random => &random,
    };
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut last = None;
    let mut converged = true;
    for &h in &cfg.h {
        let (grid, res) = solver::solve_polygon(&poly, h, data, &cfg.solver)?;
        converged &= res.converged;
        let err = match cfg.data {
            SolveData::Cubic => solver::l2_error(&grid, &res.values, &|p| exact.value(&p)),
            _ => f64::NAN,
        };
        rows.push(ConvergenceRow {
            h,
            l2_error: err,
            ratio: rows.last().map(|r| r.l2_error / err).filter(|r| r.is_finite()),
            iterations: res.iterations,
            residual: res.residual,
        });
        last = Some((grid, res));
    }
    let (grid, res) = last.expect("at least one mesh width");
    let gv = GridValues {
        nx: grid.nx,
        ny: grid.ny,
        h: grid.h,
        origin: grid.origin,
        values: res.values,
    };
    if let Some(path) = &a.grid_out {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
        solver::io::write_binary(&mut f, &gv)?;
    }
    let seed = cfg.seed;
    if common.format == Format::Csv {
        let mut buf = Vec::new();
        solver::io::write_csv(&mut buf, &gv)?;
        return Ok(Output {
            body: String::from_utf8(buf)?,
            pass: converged,
        });
    }
    let outcome = SolveOutcome {
        rows,
        converged,
        nx: gv.nx,
        ny: gv.ny,
        origin: gv.origin,
        values: gv.values.iter().map(|v| (!v.is_nan()).then_some(*v)).collect(),
    };
    render(
        common,
        "solve",
        seed,
        &cfg,
        converged,
        outcome,
        |_| unreachable!("csv handled above"),
        |o: &SolveOutcome| {
            let mut s = String::new();
            let _ = writeln!(s, "{:>10} {:>12} {:>7} {:>10} {:>11}", "h", "l2Error", "ratio", "iterations", "residual");
            for r in &o.rows {
                let _ = writeln!(s, "{:>10.6} {:>12.4e} {:>7} {:>10} {:>11.3e}", r.h, r.l2_error, r.ratio.map_or("-".into(), |q| format!("{q:.3}")), r.iterations, r.residual);
            }
            let _ = writeln!(s, "grid {} x {}, converged {}", o.nx, o.ny, o.converged);
            s
        },
    )
}

fn fixture_list(names: &[String]) -> Result<Vec<(String, biharm_core::PolyField, f64)>> {
    let all = solver::half_plane_fixtures();
    let wanted: Vec<String> = if names.iter().any(|n| n.eq_ignore_ascii_case("all")) {
        all.iter().filter(|(f, _)| f.clamped).map(|(f, _)| f.name.clone()).collect()
    } else {
        names.to_vec()
    };
    for name in &wanted {
        match all.iter().find(|(f, _)| &f.name == name) {
            None => bail!("unknown fixture {name:?}"),
            Some((f, _)) if !f.clamped => bail!("fixture {name:?} is not clamped on the boundary line"),
            Some(_) => {}
        }
    }
    let mut out = Vec::new();
    for (f, field) in all {
        if wanted.contains(&f.name) {
            let degree = f.spec.iter().map(|m| m.exps.iter().sum::<u32>()).max().unwrap_or(0);
            out.push((f.name, field, 2.0 * degree as f64));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct DecayConfig {
    pub source: DecaySource,
    pub fixtures: Vec<String>,
    pub r0: f64,
    pub radii: usize,
    /// Allowed distance of a fixture exponent from its exact value.
    pub fixture_tolerance: f64,
    pub seed: u64,
    pub seeds: Option<Vec<u64>>,
    pub l_shape: LShapeConfig,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            source: DecaySource::Fixtures,
            fixtures: vec!["all".into()],
            r0: 0.5,
            radii: 5,
            fixture_tolerance: 0.05,
            seed: 1,
            seeds: None,
            l_shape: LShapeConfig::default(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FixtureFit {
    pub fixture: String,
    pub expected: f64,
    pub fit: DecayFit,
    pub pass: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase", tag = "source")]
pub enum DecayOutcome {
    Fixtures { fits: Vec<FixtureFit> },
    LShape(campaign::LShapeResults),
}

pub fn decay(common: &Common, a: &DecayArgs) -> Result<Output> {
    let mut cfg: DecayConfig = load_config(common)?;
    if let Some(s) = a.source {
        cfg.source = s;
    }
    if let Some(s) = &a.fixture {
        cfg.fixtures = s.split(',').map(|t| t.trim().to_string()).collect();
    }
    if let Some(r) = a.r0 {
        cfg.r0 = r;
        cfg.l_shape.r0 = r;
    }
    if let Some(k) = a.radii {
        cfg.radii = k;
        cfg.l_shape.radii = k;
    }
    if let Some(h) = a.h {
        cfg.l_shape.h = h;
    }
    if let Some(b) = a.backend {
        cfg.l_shape.solver.backend = backend(b);
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(s) = &a.seeds {
        cfg.seeds = Some(parse::u64s(s)?);
    }
    let (outcome, pass) = match cfg.source {
        DecaySource::Fixtures => {
            let radii = decay::dyadic_radii(cfg.r0, cfg.radii);
            let mut fits = Vec::new();
            for (name, field, expected) in fixture_list(&cfg.fixtures)? {
                let e = decay::local_energy_half_disk(&field, [0.0, 0.0], &radii)?;
                let fit = decay::decay_fit([0.0, 0.0], radii.clone(), e, None)?;
                let pass = (fit.exponent - expected).abs() <= cfg.fixture_tolerance;
                fits.push(FixtureFit { fixture: name, expected, fit, pass });
            }
            let pass = fits.iter().all(|f| f.pass);
            (DecayOutcome::Fixtures { fits }, pass)
        }
        DecaySource::LShape => {
            let seeds = cfg.seeds.clone().unwrap_or_else(|| (cfg.seed..cfg.seed + 5).collect());
            let r = campaign::run_l_shape(&seeds, &cfg.l_shape, campaign::worker_count())?;
            let pass = r.ordered == r.runs.len();
            (DecayOutcome::LShape(r), pass)
        }
    };
    render(
        common,
        "decay",
        cfg.seed,
        &cfg,
        pass,
        outcome,
        |o: &DecayOutcome| {
            let fits: Vec<(String, &DecayFit)> = match o {
                DecayOutcome::Fixtures { fits } => fits.iter().map(|f| (f.fixture.clone(), &f.fit)).collect(),
                DecayOutcome::LShape(r) => r
                    .runs
                    .iter()
                    .flat_map(|run| {
                        std::iter::once((format!("seed{}-reentrant", run.seed), &run.reentrant))
                            .chain(run.convex.iter().enumerate().map(move |(i, f)| (format!("seed{}-convex{}", run.seed, i), f)))
                    })
                    .collect(),
            };
            if fits.len() == 1 {
                let mut buf = Vec::new();
                fits[0].1.write_csv(&mut buf)?;
                return Ok(String::from_utf8(buf)?);
            }
            csv_string(
                &["fit", "logR", "logE"],
                fits.iter()
                    .flat_map(|(name, f)| f.radii.iter().zip(&f.energies).map(move |(r, e)| vec![name.clone(), r.ln().to_string(), e.ln().to_string()])),
            )
        },
        |o: &DecayOutcome| {
            let mut s = String::new();
            match o {
                DecayOutcome::Fixtures { fits } => {
                    for f in fits {
                        let _ = writeln!(s, "{:<8} exponent {:.4} ± {:.1e} (exact {}) {}", f.fixture, f.fit.exponent, f.fit.stderr, f.expected, f.pass);
                    }
                }
                DecayOutcome::LShape(r) => {
                    for run in &r.runs {
                        let convex: Vec<String> = run.convex.iter().map(|f| format!("{:.3}", f.exponent)).collect();
                        let _ = writeln!(s, "seed {:<4} reentrant {:.3}  convex {}  ordered {}", run.seed, run.reentrant.exponent, convex.join(" "), run.ordered);
                    }
                    let _ = writeln!(s, "{}/{} runs ordered", r.ordered, r.runs.len());
                }
            }
            s
        },
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct CaccioppoliConfig {
    pub fixtures: Vec<String>,
    pub radii: Vec<f64>,
    /// Allowed `max/min - 1` of the analytic ratios.
    pub spread_tolerance: f64,
    pub grid_h: Option<f64>,
    pub solver: SolveOptions,
}

impl Default for CaccioppoliConfig {
    fn default() -> Self {
        CaccioppoliConfig {
            fixtures: vec!["all".into()],
            radii: vec![0.1, 0.2, 0.4],
            spread_tolerance: 0.01,
            grid_h: None,
            solver: SolveOptions {
                backend: Backend::Banded,
                ..SolveOptions::default()
            },
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CaccioppoliRow {
    pub fixture: String,
    pub analytic: Vec<CaccioppoliRatio>,
    pub spread: f64,
    pub grid: Option<Vec<CaccioppoliRatio>>,
    pub pass: bool,
}

fn spread(v: &[CaccioppoliRatio]) -> f64 {
    let hi = v.iter().map(|c| c.ratio).fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);
    hi / lo - 1.0
}

pub fn caccioppoli(common: &Common, a: &CaccioppoliArgs) -> Result<Output> {
    let mut cfg: CaccioppoliConfig = load_config(common)?;
    if let Some(s) = &a.fixture {
        cfg.fixtures = s.split(',').map(|t| t.trim().to_string()).collect();
    }
    if let Some(s) = &a.r {
        cfg.radii = parse::floats(s)?;
    }
    if a.grid_h.is_some() {
        cfg.grid_h = a.grid_h;
    }
    if cfg.radii.iter().any(|r| !(*r > 0.0 && *r <= 0.5)) {
        bail!("radii must lie in (0, 0.5]");
    }
    let mut rows = Vec::new();
    for (name, field, _) in fixture_list(&cfg.fixtures)? {
        let analytic = cfg.radii.iter().map(|r| decay::caccioppoli_half_disk(&field, [0.0, 0.0], *r)).collect::<biharm_core::Result<Vec<_>>>()?;
        let grid = match cfg.grid_h {
            None => None,
            Some(h) => {
                let rect = Polygon2D::new(vec![[-1.0, 0.0], [1.0, 0.0], [1.0, 1.0], [-1.0, 1.0]])?;
                let (g, res) = solver::solve_polygon(&rect, h, &ExactData(&field), &cfg.solver)?;
                Some(cfg.radii.iter().map(|r| decay::caccioppoli_grid(&g, &res.values, [0.0, 0.0], *r)).collect::<biharm_core::Result<Vec<_>>>()?)
            }
        };
        let sp = spread(&analytic);
        rows.push(CaccioppoliRow {
            fixture: name,
            pass: sp <= cfg.spread_tolerance,
            spread: sp,
            analytic,
            grid,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    render(
        common,
        "caccioppoli",
        common.seed.unwrap_or(0),
        &cfg,
        pass,
        rows,
        |rows: &Vec<CaccioppoliRow>| {
            csv_string(
                &["fixture", "source", "r", "inner", "outer", "ratio"],
                rows.iter().flat_map(|row| {
                    let a = row.analytic.iter().map(|c| ("analytic", c));
                    let g = row.grid.iter().flatten().map(|c| ("grid", c));
                    a.chain(g)
                        .map(|(src, c)| vec![row.fixture.clone(), src.to_string(), c.r.to_string(), e(c.inner), e(c.outer), e(c.ratio)])
                        .collect::<Vec<_>>()
                }),
            )
        },
        |rows: &Vec<CaccioppoliRow>| {
            let mut s = String::new();
            for row in rows {
                let ratios: Vec<String> = row.analytic.iter().map(|c| format!("{:.5}", c.ratio)).collect();
                let _ = writeln!(s, "{:<8} ratios {}  spread {:.2e} {}", row.fixture, ratios.join(" "), row.spread, row.pass);
                if let Some(g) = &row.grid {
                    let ratios: Vec<String> = g.iter().map(|c| format!("{:.5}", c.ratio)).collect();
                    let _ = writeln!(s, "{:<8} grid   {}", "", ratios.join(" "));
                }
            }
            s
        },
    )
}
