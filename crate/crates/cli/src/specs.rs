//! Parsers for the compact option strings accepted on the command line.

use anyhow::{anyhow, bail, Context, Result};

use hsframe::generate::Profile;
use hsframe::{DecayWeights, EpsChoice, Regime};

/// `auto` or a nonnegative number.
pub fn parse_eps(text: &str) -> Result<EpsChoice> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("auto") {
        return Ok(EpsChoice::Auto);
    }
    let v: f64 = t
        .parse()
        .with_context(|| format!("--eps: cannot parse {t:?}"))?;
    Ok(EpsChoice::Explicit(v))
}

fn param(text: &str, prefix: &str, key: &str) -> Option<Result<f64>> {
    let rest = text.strip_prefix(prefix)?;
    let value = rest
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| anyhow!("expected {prefix}{key}=<value>, got {text:?}"));
    Some(value.and_then(|v| {
        v.parse::<f64>()
            .with_context(|| format!("cannot parse {key} in {text:?}"))
    }))
}

/// `poly:p=P` or `exp:c=C`.
pub fn parse_regime(text: &str) -> Result<Option<Regime>> {
    let t = text.trim();
    if let Some(p) = param(t, "poly:", "p") {
        return Ok(Some(Regime::Poly { p: p? }));
    }
    if let Some(c) = param(t, "exp:", "c") {
        return Ok(Some(Regime::Exp { c: c? }));
    }
    Ok(None)
}

/// `poly:p=P`, `exp:c=C`, or an explicit comma-separated weight list.
/// Regime weights use the rigorous upper bound of the infinite series.
pub fn parse_weights(text: &str, len: usize) -> Result<DecayWeights> {
    if let Some(regime) = parse_regime(text)? {
        return Ok(regime.decay_weights(len)?);
    }
    let list = text
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .with_context(|| format!("--weights: cannot parse {w:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayWeights::new(list)?)
}

/// `constant`, `poly:p=P` or `exp:c=C`.
pub fn parse_profile(text: &str) -> Result<Profile> {
    let t = text.trim();
    if t == "constant" {
        return Ok(Profile::Constant);
    }
    match parse_regime(t)? {
        Some(Regime::Poly { p }) => Ok(Profile::Poly { p }),
        Some(Regime::Exp { c }) => Ok(Profile::Exp { c }),
        None => bail!("--profile: expected constant | poly:p=P | exp:c=C, got {t:?}"),
    }
}

/// One-based, comma-separated indices into zero-based positions.
pub fn parse_sigma(text: &str, len: usize) -> Result<Vec<usize>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|s| {
            let i: usize = s
                .trim()
                .parse()
                .with_context(|| format!("--sigma: cannot parse {s:?}"))?;
            if i == 0 || i > len {
                bail!("--sigma: index {i} outside 1..={len}");
            }
            Ok(i - 1)
        })
        .collect()
}
