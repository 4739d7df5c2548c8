//! Both sides of the weighted integral identities, term by term.
//!
//! Every volume term has the form `T(x) rho^-alpha`, and the integrand handed
//! to the quadrature is `T rho^alpha`. For clamped fields and a boundary
//! pole that quotient is a polynomial along rays from the pole, which is
//! what the ray-based rules integrate exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{Error, Result};
use crate::geometry::{self, Domain, DomainSpec, SampleScheme};
use crate::jets::{JetField, JetOrder, WeightJet, MAX_DIM};
use crate::quadrature::{self, classify_pole, Estimate, Integrand, PoleKind, SampleBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityId {
    I2_13,
    I2_19,
    I3_3,
    I3_8,
    I3_18,
    I3_1,
    I3_22,
}

impl IdentityId {
    pub const ALL: [IdentityId; 7] = [
        IdentityId::I2_13,
        IdentityId::I2_19,
        IdentityId::I3_3,
        IdentityId::I3_8,
        IdentityId::I3_18,
        IdentityId::I3_1,
        IdentityId::I3_22,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityId::I2_13 => "I2_13",
            IdentityId::I2_19 => "I2_19",
            IdentityId::I3_3 => "I3_3",
            IdentityId::I3_8 => "I3_8",
            IdentityId::I3_18 => "I3_18",
            IdentityId::I3_1 => "I3_1",
            IdentityId::I3_22 => "I3_22",
        }
    }

    /// Whether only `u = 0` (not `grad u = 0`) is required on the boundary.
    pub fn needs_only_vanishing(&self) -> bool {
        *self == IdentityId::I3_18
    }

    pub fn needs_surface(&self) -> bool {
        matches!(self, IdentityId::I3_8 | IdentityId::I3_1)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown identity {s:?}")))
    }
}

/// Volume terms. `d = x - y`, `H` the Hessian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `|Δu|^2 ρ^-α`
    LapSq,
    /// `Δu Δ(u ρ^-α)`
    LapLapWeighted,
    /// `|∇u|^2 ρ^(-α-2)`
    GradSq,
    /// `<∇u, d>^2 ρ^(-α-4)`
    RadialSq,
    /// `u^2 ρ^(-α-4)`
    ValueSq,
    /// `Δu <∇u, d> ρ^(-α-2)`
    LapRadial,
    /// `|H|^2 ρ^-α`
    HessSq,
    /// `∂ij u ∂ij(u ρ^-α)`
    HessHessWeighted,
    /// `Δ²u <∇u, d> ρ^-α`
    BilapRadial,
    /// `|H d|^2 ρ^(-α-2)`
    RadialHessSq,
    /// `(<∇u, d> + (n-α)/2 u)^2 ρ^-α`
    RadialCompositeValue,
    /// `<∇u, d>^2 ρ^-α`
    RadialSqFlat,
    /// `u^2 ρ^-α`
    ValueSqFlat,
    /// `|H d + (n-α-2)/2 ∇u|^2 ρ^(-α-2)`
    RadialCompositeGrad,
    /// `(<∇u, d> + (n-α-4)/2 u)^2 ρ^(-α-4)`
    RadialCompositeLow,
}

impl Term {
    pub fn label(&self) -> &'static str {
        match self {
            Term::LapSq => "|Δu|²ρ^{-α}",
            Term::LapLapWeighted => "ΔuΔ(uρ^{-α})",
            Term::GradSq => "|∇u|²ρ^{-α-2}",
            Term::RadialSq => "|∂u/∂ρ|²ρ^{-α-2}",
            Term::ValueSq => "|u|²ρ^{-α-4}",
            Term::LapRadial => "Δu·∂u/∂ρ·ρ^{-α-1}",
            Term::HessSq => "|∇²u|²ρ^{-α}",
            Term::HessHessWeighted => "∂ᵢⱼu·∂ᵢⱼ(uρ^{-α})",
            Term::BilapRadial => "Δ²u·∂u/∂ρ·ρ^{1-α}",
            Term::RadialHessSq => "|∂(∇u)/∂ρ|²ρ^{-α}",
            Term::RadialCompositeValue => "|∂(uρ^{(n-α)/2})/∂ρ|²ρ^{2-n}",
            Term::RadialSqFlat => "|∂u/∂ρ|²ρ^{2-α}",
            Term::ValueSqFlat => "|u|²ρ^{-α}",
            Term::RadialCompositeGrad => "|∂(ρ^{(n-α-2)/2}∇u)/∂ρ|²ρ^{2-n}",
            Term::RadialCompositeLow => "|∂(ρ^{(n-α-4)/2}u)/∂ρ|²ρ^{2-n}",
        }
    }

    fn order(&self) -> JetOrder {
        if *self == Term::BilapRadial {
            JetOrder::Fourth
        } else {
            JetOrder::Second
        }
    }
}

/// A summand of an identity: a volume term or the boundary integral
/// `∫ |∇²u|^2 <x - y, N> ρ^-α dσ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    Volume(Term),
    Surface,
}

pub const SURFACE_LABEL: &str = "surface";

impl Piece {
    pub fn label(&self) -> &'static str {
        match self {
            Piece::Volume(t) => t.label(),
            Piece::Surface => SURFACE_LABEL,
        }
    }
}

/// Linear combinations `sum c_i piece_i` on each side.
pub struct Combination {
    pub lhs: Vec<(f64, Piece)>,
    pub rhs: Vec<(f64, Piece)>,
}

use Piece::{Surface, Volume as V};
use Term::*;

pub fn combination(id: IdentityId, n: usize, alpha: f64) -> Combination {
    let nf = n as f64;
    let a = alpha;
    match id {
        IdentityId::I2_13 => Combination {
            lhs: vec![(1.0, V(LapLapWeighted))],
            rhs: vec![
                (1.0, V(LapSq)),
                (2.0 * a, V(GradSq)),
                (-2.0 * a * (a + 2.0), V(RadialSq)),
                (0.5 * a * (a + 2.0) * (nf - 2.0 - a) * (nf - 4.0 - a), V(ValueSq)),
            ],
        },
        IdentityId::I2_19 => Combination {
            lhs: vec![(1.0, V(LapRadial))],
            rhs: vec![(0.5 * (nf - 4.0 - a), V(GradSq)), (a + 2.0, V(RadialSq))],
        },
        IdentityId::I3_3 => Combination {
            lhs: vec![(1.0, V(HessHessWeighted))],
            rhs: vec![
                (1.0, V(HessSq)),
                (a * (nf - a - 1.0), V(GradSq)),
                (-a * (a + 2.0), V(RadialSq)),
                (0.5 * a * (a + 2.0) * (nf - a - 2.0) * (nf - a - 4.0), V(ValueSq)),
            ],
        },
        IdentityId::I3_8 => Combination {
            lhs: vec![(1.0, V(BilapRadial))],
            rhs: vec![
                (-0.5, Surface),
                (0.5 * (a + 4.0 - nf), V(HessSq)),
                (-2.0 * a, V(RadialHessSq)),
                (0.5 * a * (nf - a), V(GradSq)),
                (-0.5 * a * (a + 2.0) * (nf - a), V(RadialSq)),
            ],
        },
        IdentityId::I3_18 => Combination {
            lhs: vec![(1.0, V(RadialCompositeValue))],
            rhs: vec![(1.0, V(RadialSqFlat)), (-0.25 * (nf - a) * (nf - a), V(ValueSqFlat))],
        },
        IdentityId::I3_1 => Combination {
            lhs: vec![(a + 4.0 - nf, V(LapLapWeighted)), (-2.0, V(BilapRadial))],
            rhs: vec![
                (1.0, Surface),
                (4.0 * a, V(RadialCompositeGrad)),
                (2.0 * a * (a + 2.0) * (nf - a - 2.0), V(RadialCompositeLow)),
            ],
        },
        IdentityId::I3_22 => Combination {
            lhs: vec![(1.0, V(LapLapWeighted))],
            rhs: vec![(1.0, V(HessHessWeighted))],
        },
    }
}

/// The right side of the identity used to derive the composite form: the
/// expansion with the radial composites written out.
pub fn expanded_3_1_rhs(n: usize, alpha: f64) -> Vec<(f64, Piece)> {
    let nf = n as f64;
    let a = alpha;
    let c = nf - a - 2.0;
    vec![
        (1.0, Surface),
        (4.0 * a, V(RadialHessSq)),
        (-a * c * c, V(GradSq)),
        (2.0 * a * (a + 2.0) * c, V(RadialSq)),
        (-0.5 * a * (a + 2.0) * c * (nf - a - 4.0).powi(2), V(ValueSq)),
    ]
}

/// `F = T rho^alpha` for each requested term at one point.
pub fn eval_terms(n: usize, alpha: f64, y: &[f64], x: &[f64], jet: &crate::jets::Jet, terms: &[Term], out: &mut [f64]) {
    let mut d = [0.0; MAX_DIM];
    let mut r2 = 0.0;
    for i in 0..n {
        d[i] = x[i] - y[i];
        r2 += d[i] * d[i];
    }
    let q = 1.0 / r2;
    let nf = n as f64;
    let u = jet.u;
    let g = &jet.grad;
    let h = &jet.hess;
    let mut gd = 0.0;
    let mut gg = 0.0;
    let mut hh = 0.0;
    let mut hd = [0.0; MAX_DIM];
    for i in 0..n {
        gd += g[i] * d[i];
        gg += g[i] * g[i];
        for j in 0..n {
            hh += h[i][j] * h[i][j];
            hd[i] += h[i][j] * d[j];
        }
    }
    let weight = || WeightJet::new(y, alpha, x).expect("quadrature nodes avoid the pole");
    for (o, t) in out.iter_mut().zip(terms) {
        *o = match t {
            LapSq => jet.lap * jet.lap,
            LapLapWeighted => {
                let w = weight();
                let mut gw = 0.0;
                for i in 0..n {
                    gw += g[i] * w.grad[i];
                }
                jet.lap * (jet.lap * w.value + 2.0 * gw + u * w.lap) / w.value
            }
            GradSq => gg * q,
            RadialSq => gd * gd * q * q,
            ValueSq => u * u * q * q,
            LapRadial => jet.lap * gd * q,
            HessSq => hh,
            HessHessWeighted => {
                let w = weight();
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let second = h[i][j] * w.value + g[i] * w.grad[j] + g[j] * w.grad[i] + u * w.hess[i][j];
                        s += h[i][j] * second;
                    }
                }
                s / w.value
            }
            BilapRadial => jet.bilap * gd,
            RadialHessSq => {
                let mut s = 0.0;
                for v in hd.iter().take(n) {
                    s += v * v;
                }
                s * q
            }
            RadialCompositeValue => {
                let v = gd + 0.5 * (nf - alpha) * u;
                v * v
            }
            RadialSqFlat => gd * gd,
            ValueSqFlat => u * u,
            RadialCompositeGrad => {
                let c = 0.5 * (nf - alpha - 2.0);
                let mut s = 0.0;
                for i in 0..n {
                    let v = hd[i] + c * g[i];
                    s += v * v;
                }
                s * q
            }
            RadialCompositeLow => {
                let v = gd + 0.5 * (nf - alpha - 4.0) * u;
                v * v * q * q
            }
        };
    }
}

/// Integrated values of a set of pieces.
#[derive(Clone, Debug, Default)]
pub struct TermTable {
    pub entries: Vec<(Piece, f64, f64)>,
    pub nodes: u64,
}

impl TermTable {
    pub fn get(&self, p: Piece) -> Option<(f64, f64)> {
        self.entries.iter().find(|e| e.0 == p).map(|e| (e.1, e.2))
    }

    /// `(sum c v, sum |c v|, sum |c| err)`.
    pub fn combine(&self, side: &[(f64, Piece)]) -> (f64, f64, f64) {
        let mut v = 0.0;
        let mut scale = 0.0;
        let mut err = 0.0;
        for &(c, p) in side {
            let (x, e) = self.get(p).expect("piece was integrated");
            v += c * x;
            scale += (c * x).abs();
            err += c.abs() * e;
        }
        (v, scale, err)
    }
}

fn ball_center(domain: &Domain) -> Option<&[f64]> {
    match domain {
        Domain::Ball(b) => Some(&b.center),
        _ => None,
    }
}

/// Degrees of the numerators `T rho^alpha`: quadratic in the jets of `u`.
fn integrand_degrees(domain: &Domain, u: &dyn JetField) -> (usize, usize) {
    let d = 2 * u.degree();
    let angular = match ball_center(domain) {
        Some(c) => 2 * u.angular_degree(c) + 6,
        None => d,
    };
    (d, angular)
}

/// Checks the pole placement and the exponent range shared by all identities.
pub fn check_admissible(domain: &Domain, y: &[f64], alpha: f64) -> Result<PoleKind> {
    if !alpha.is_finite() {
        return Err(Error::Precondition("alpha must be finite".into()));
    }
    let n = domain.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if matches!(domain, Domain::Polygon(_)) {
        return Err(Error::Unsupported("identities are evaluated on balls and convex polytopes".into()));
    }
    let kind = classify_pole(domain, y)?;
    match kind {
        PoleKind::Interior => Err(Error::Precondition("the pole must lie on the boundary or outside the closed domain".into())),
        PoleKind::Boundary if alpha >= n as f64 => Err(Error::Precondition(format!(
            "a boundary pole requires alpha < n (alpha = {alpha}, n = {n})"
        ))),
        k => Ok(k),
    }
}

/// Verifies `u = 0` (and `grad u = 0` when `gradient`) on boundary samples,
/// relative to the size of the field inside.
pub fn check_clamped(domain: &Domain, u: &dyn JetField, gradient: bool, seed: u64) -> Result<()> {
    let patches = geometry::surface_sample(domain, 256, SampleScheme::LowDiscrepancy, seed)?;
    let center: Vec<f64> = match domain {
        Domain::Ball(b) => b.center.clone(),
        Domain::Polytope(p) => p.centroid(),
        Domain::Polygon(_) => unreachable!("surface_sample rejects polygons"),
    };
    let mut reference: f64 = 0.0;
    for p in patches.iter().take(64) {
        let x: Vec<f64> = center.iter().zip(&p.point).map(|(c, b)| c + 0.5 * (b - c)).collect();
        let j = u.jet(&x, JetOrder::Second);
        reference = reference.max(j.u.abs() + j.grad().iter().map(|v| v.abs()).sum::<f64>());
    }
    let tol = 1e-9 * reference.max(f64::MIN_POSITIVE);
    for p in &patches {
        let j = u.jet(&p.point, JetOrder::Second);
        let g: f64 = j.grad().iter().map(|v| v.abs()).sum();
        if j.u.abs() > tol || (gradient && g > tol) {
            return Err(Error::Precondition(format!(
                "field is not clamped on the boundary: |u| = {:.3e}, |grad u| = {:.3e} at {:?}",
                j.u.abs(),
                g,
                p.point
            )));
        }
    }
    Ok(())
}

/// Integrates the requested pieces for one `(domain, u, y, alpha)`.
pub fn integrate_pieces(domain: &Domain, u: &dyn JetField, y: &[f64], alpha: f64, pieces: &[Piece], budget: &SampleBudget) -> Result<TermTable> {
    let n = domain.dim();
    if u.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.dim() });
    }
    let mut terms: Vec<Term> = pieces
        .iter()
        .filter_map(|p| match p {
            Piece::Volume(t) => Some(*t),
            Piece::Surface => None,
        })
        .collect();
    terms.sort();
    terms.dedup();
    let order = terms.iter().map(|t| t.order()).max().unwrap_or(JetOrder::Second);
    let (degree, angular) = integrand_degrees(domain, u);
    let mut table = TermTable::default();
    if !terms.is_empty() {
        let f = |x: &[f64], _: &[f64], out: &mut [f64]| {
            let jet = u.jet(x, order);
            eval_terms(n, alpha, y, x, &jet, &terms, out);
        };
        let ig = Integrand {
            outputs: terms.len(),
            beta: alpha,
            degree,
            angular_degree: angular,
            symmetry: u.symmetry(),
            polar: true,
            f: &f,
        };
        let est = quadrature::integrate_generic(domain, y, &ig, budget)?;
        check_finite(&est)?;
        table.nodes += est.nodes;
        for (i, t) in terms.iter().enumerate() {
            table.entries.push((Piece::Volume(*t), est.values[i], est.errors[i]));
        }
    }
    if pieces.contains(&Piece::Surface) {
        let est = integrate_surface_term(domain, u, y, alpha, budget)?;
        table.nodes += est.nodes;
        table.entries.push((Piece::Surface, est.values[0], est.errors[0]));
    }
    Ok(table)
}

fn check_finite(est: &Estimate) -> Result<()> {
    if est.values.iter().chain(&est.errors).any(|v| !v.is_finite()) {
        return Err(Error::Divergent("non-finite term value".into()));
    }
    Ok(())
}

/// `∫ |∇²u|^2 <x - y, N> ρ^-α dσ`.
pub fn integrate_surface_term(domain: &Domain, u: &dyn JetField, y: &[f64], alpha: f64, budget: &SampleBudget) -> Result<Estimate> {
    let n = domain.dim();
    let d = u.degree().saturating_sub(2);
    // On a sphere <x - y, N> = rho^2 / 2R, so the rho^-2 is divided out there.
    let (beta, shift, degree) = match domain {
        Domain::Ball(_) => (alpha - 2.0, true, 2 * d),
        _ => (alpha, false, 2 * d + 1),
    };
    let f = |x: &[f64], normal: &[f64], out: &mut [f64]| {
        let jet = u.jet(x, JetOrder::Second);
        let mut hh = 0.0;
        let mut dn = 0.0;
        let mut r2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                hh += jet.hess[i][j] * jet.hess[i][j];
            }
            let di = x[i] - y[i];
            dn += di * normal[i];
            r2 += di * di;
        }
        out[0] = if shift { hh * dn / r2 } else { hh * dn };
    };
    let angular = match ball_center(domain) {
        Some(c) => 2 * u.angular_degree(c) + 6,
        None => degree,
    };
    let ig = Integrand {
        outputs: 1,
        beta,
        degree,
        angular_degree: angular,
        symmetry: u.symmetry(),
        polar: shift,
        f: &f,
    };
    let est = quadrature::integrate_surface(domain, y, &ig, budget, true)?;
    check_finite(&est)?;
    Ok(est)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TermValue {
    pub name: String,
    pub coefficient: f64,
    pub side: String,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub n: usize,
    pub alpha: f64,
    pub domain: DomainSpec,
    pub pole: Vec<f64>,
    pub terms: Vec<TermValue>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub quad_error: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub nodes: u64,
}

pub const CSV_HEADER: [&str; 8] = ["identity", "n", "alpha", "lhs", "rhs", "relResidual", "quadError", "pass"];

impl IdentityReport {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.identity.to_string(),
            self.n.to_string(),
            format!("{:e}", self.alpha),
            format!("{:e}", self.lhs),
            format!("{:e}", self.rhs),
            format!("{:e}", self.rel_residual),
            format!("{:e}", self.quad_error),
            self.pass.to_string(),
        ]
    }
}

/// Residual bookkeeping shared by reports: `pass` iff the absolute residual
/// is within `max(tol * scale, 3 * quad_error)`.
pub fn verdict(abs: f64, scale: f64, quad_error: f64, tol: f64) -> (f64, bool) {
    let rel = abs / scale.max(f64::MIN_POSITIVE);
    (rel, abs <= (tol * scale).max(3.0 * quad_error))
}

fn assemble(id: IdentityId, domain: &Domain, y: &[f64], alpha: f64, table: &TermTable, tol: f64) -> IdentityReport {
    let n = domain.dim();
    let comb = combination(id, n, alpha);
    let (lhs, _, el) = table.combine(&comb.lhs);
    let (rhs, _, er) = table.combine(&comb.rhs);
    let mut terms = Vec::new();
    for (side, list) in [("lhs", &comb.lhs), ("rhs", &comb.rhs)] {
        for &(c, p) in list.iter() {
            let (v, e) = table.get(p).expect("piece was integrated");
            terms.push(TermValue {
                name: p.label().to_string(),
                coefficient: c,
                side: side.to_string(),
                value: v,
                error: e,
            });
        }
    }
    let abs = (lhs - rhs).abs();
    // Raw term integrals, not coefficient-weighted summands: at alpha = n - 4
    // some sides have only zero coefficients and would leave no scale.
    let scale: f64 = terms.iter().map(|t| t.value.abs()).sum();
    let quad_error = el + er;
    let (rel, pass) = verdict(abs, scale, quad_error, tol);
    IdentityReport {
        identity: id,
        n,
        alpha,
        domain: domain.to_spec(),
        pole: y.to_vec(),
        terms,
        lhs,
        rhs,
        abs_residual: abs,
        rel_residual: rel,
        quad_error,
        scale,
        tolerance: tol,
        pass,
        nodes: table.nodes,
    }
}

/// Evaluates several identities from one shared set of integrals.
pub fn evaluate_many(ids: &[IdentityId], domain: &Domain, u: &dyn JetField, y: &[f64], alpha: f64, budget: &SampleBudget) -> Result<Vec<IdentityReport>> {
    budget.validate()?;
    check_admissible(domain, y, alpha)?;
    let full_clamp = ids.iter().any(|id| !id.needs_only_vanishing());
    check_clamped(domain, u, full_clamp, budget.seed)?;
    let n = domain.dim();
    let mut pieces: Vec<Piece> = Vec::new();
    for id in ids {
        let c = combination(*id, n, alpha);
        pieces.extend(c.lhs.iter().chain(&c.rhs).map(|e| e.1));
    }
    pieces.sort();
    pieces.dedup();
    let table = integrate_pieces(domain, u, y, alpha, &pieces, budget)?;
    Ok(ids.iter().map(|id| assemble(*id, domain, y, alpha, &table, budget.tol)).collect())
}

pub fn evaluate(id: IdentityId, domain: &Domain, u: &dyn JetField, y: &[f64], alpha: f64, budget: &SampleBudget) -> Result<IdentityReport> {
    Ok(evaluate_many(&[id], domain, u, y, alpha, budget)?.remove(0))
}

/// Residual of `∫ Δu Δ(u ρ^-α) = ∫ ∂ij u ∂ij(u ρ^-α)`.
pub fn consistency_3_22(domain: &Domain, u: &dyn JetField, y: &[f64], alpha: f64, budget: &SampleBudget) -> Result<IdentityReport> {
    evaluate(IdentityId::I3_22, domain, u, y, alpha, budget)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PositivityReport {
    pub n: usize,
    pub alpha: f64,
    pub domain: DomainSpec,
    pub pole: Vec<f64>,
    pub terms: Vec<TermValue>,
    /// `∫|Δu|²ρ^-α - (n+α)²/4 ∫|∂u/∂ρ|²ρ^(-α-2)`
    pub slack: f64,
    pub slack_error: f64,
    pub slack_pass: bool,
    /// `α(α+2)(n-2-α)(n-4-α)/2`
    pub value_coefficient: f64,
    pub coefficient_pass: bool,
    /// Right side of the expansion of `∫ΔuΔ(uρ^-α)`.
    pub rhs: f64,
    pub rhs_error: f64,
    pub rhs_pass: bool,
    /// `∫u²ρ^(-α-4) / ∫ΔuΔ(uρ^-α)`
    pub ratio: f64,
    pub pass: bool,
    pub nodes: u64,
}

/// Positivity checks at `alpha = alpha_n`, `n >= 8`.
pub fn positivity_chain(domain: &Domain, u: &dyn JetField, y: &[f64], budget: &SampleBudget) -> Result<PositivityReport> {
    let n = domain.dim();
    if n < 8 {
        return Err(Error::Precondition(format!("the positivity chain is stated for n >= 8 (got {n})")));
    }
    budget.validate()?;
    let alpha = constants::alpha_n(n)?;
    check_admissible(domain, y, alpha)?;
    check_clamped(domain, u, true, budget.seed)?;
    let pieces = [V(LapSq), V(LapLapWeighted), V(GradSq), V(RadialSq), V(ValueSq)];
    let table = integrate_pieces(domain, u, y, alpha, &pieces, budget)?;
    let nf = n as f64;
    let k = 0.25 * (nf + alpha).powi(2);
    let (slack, _, slack_error) = table.combine(&[(1.0, V(LapSq)), (-k, V(RadialSq))]);
    let comb = combination(IdentityId::I2_13, n, alpha);
    let (rhs, _, rhs_error) = table.combine(&comb.rhs);
    let coefficient = comb.rhs[3].0;
    let (lhs, _) = table.get(V(LapLapWeighted)).unwrap();
    let (vsq, _) = table.get(V(ValueSq)).unwrap();
    let terms = pieces
        .iter()
        .map(|&p| {
            let (v, e) = table.get(p).unwrap();
            TermValue {
                name: p.label().to_string(),
                coefficient: 1.0,
                side: "term".into(),
                value: v,
                error: e,
            }
        })
        .collect();
    let slack_pass = slack >= -3.0 * slack_error;
    let coefficient_pass = coefficient > 0.0 && alpha < nf - 4.0;
    let rhs_pass = rhs >= -3.0 * rhs_error;
    Ok(PositivityReport {
        n,
        alpha,
        domain: domain.to_spec(),
        pole: y.to_vec(),
        terms,
        slack,
        slack_error,
        slack_pass,
        value_coefficient: coefficient,
        coefficient_pass,
        rhs,
        rhs_error,
        rhs_pass,
        ratio: vsq / lhs,
        pass: slack_pass && coefficient_pass && rhs_pass,
        nodes: table.nodes,
    })
}
