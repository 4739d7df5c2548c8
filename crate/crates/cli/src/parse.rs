use anyhow::{bail, Context, Result};
use biharm_core::campaign::{DomainKind, PolePlacement};
use biharm_core::{DomainSpec, IdentityId, MonomialSpec};

/// `lo..hi` (inclusive) or a comma list.
pub fn dims(s: &str) -> Result<Vec<usize>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().with_context(|| format!("bad dimension range {s:?}"))?;
        let hi: usize = hi.trim_start_matches('=').trim().parse().with_context(|| format!("bad dimension range {s:?}"))?;
        if lo > hi {
            bail!("empty dimension range {s:?}");
        }
        return Ok((lo..=hi).collect());
    }
    list(s, |t| t.parse::<usize>().with_context(|| format!("bad dimension {t:?}")))
}

pub fn floats(s: &str) -> Result<Vec<f64>> {
    list(s, |t| {
        let v: f64 = t.parse().with_context(|| format!("bad number {t:?}"))?;
        if !v.is_finite() {
            bail!("non-finite number {t:?}");
        }
        Ok(v)
    })
}

pub fn u64s(s: &str) -> Result<Vec<u64>> {
    list(s, |t| t.parse::<u64>().with_context(|| format!("bad seed {t:?}")))
}

pub fn identities(s: &str) -> Result<Vec<IdentityId>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(IdentityId::ALL.to_vec());
    }
    list(s, |t| Ok(t.parse::<IdentityId>()?))
}

pub fn poles(s: &str) -> Result<Vec<PolePlacement>> {
    list(s, |t| Ok(PolePlacement::parse(t)?))
}

pub fn domain_kinds(s: &str) -> Result<Vec<DomainKind>> {
    list(s, |t| Ok(DomainKind::parse(t)?))
}

pub enum DomainArg {
    Kinds(Vec<DomainKind>),
    Spec(DomainSpec),
}

/// Kind list, inline JSON, or a path to a JSON file.
pub fn domain(s: &str) -> Result<DomainArg> {
    match json_text(s)? {
        Some(text) => Ok(DomainArg::Spec(serde_json::from_str(&text).context("invalid domain JSON")?)),
        None => Ok(DomainArg::Kinds(domain_kinds(s)?)),
    }
}

pub fn monomials(s: &str) -> Result<Vec<MonomialSpec>> {
    let text = json_text(s)?.unwrap_or_else(|| s.to_string());
    serde_json::from_str(&text).context("invalid monomial list")
}

/// Inline JSON or the contents of a `.json` file; `None` for anything else.
pub fn json_text(s: &str) -> Result<Option<String>> {
    let t = s.trim();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(Some(t.to_string()));
    }
    if t.ends_with(".json") {
        return Ok(Some(std::fs::read_to_string(t).with_context(|| format!("reading {t}"))?));
    }
    Ok(None)
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let out = s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(f).collect::<Result<Vec<T>>>()?;
    if out.is_empty() {
        bail!("empty list {s:?}");
    }
    Ok(out)
}
