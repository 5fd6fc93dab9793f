//! Text forms of profiles and `k` ranges used on the command line.

use crate::constructions::parse_bit_string;
use crate::domain::Valuation;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest `k` a range may name.
pub const MAX_K: u32 = 64;

/// One valuation: a rational (`3`, `5/2`, `0.5`), a bit string `b:0110`
/// read as an integer, or a vector `(0;1;5/2)`.
pub fn parse_valuation(s: &str) -> Result<Valuation> {
    let t = s.trim();
    let bad = |why: &str| Error::ParseProfile(format!("{t:?}: {why}"));
    if let Some(bits) = t.strip_prefix("b:") {
        let v = parse_bit_string(bits.trim()).ok_or_else(|| bad("not a bit string"))?;
        return Ok(Valuation::Scalar(Rational::from_biguint(v.into())));
    }
    if let Some(inner) = t.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or_else(|| bad("unclosed vector"))?;
        if inner.trim().is_empty() {
            return Err(bad("empty vector"));
        }
        let xs = inner
            .split(';')
            .map(|x| x.parse::<Rational>().map_err(|_| bad("bad vector entry")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Valuation::Vector(xs));
    }
    t.parse::<Rational>().map(Valuation::Scalar).map_err(|_| bad("not a rational"))
}

/// Comma-separated valuations, one per player.
pub fn parse_profile(s: &str) -> Result<Vec<Valuation>> {
    if s.trim().is_empty() {
        return Err(Error::ParseProfile("empty profile".into()));
    }
    s.split(',').map(parse_valuation).collect()
}

/// Inverse of [`parse_profile`].
pub fn format_profile(p: &[Valuation]) -> String {
    p.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn parse_k(s: &str, whole: &str) -> Result<u32> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::ParseKRange(whole.to_string()));
    }
    match t.parse::<u32>() {
        Ok(k) if (1..=MAX_K).contains(&k) => Ok(k),
        _ => Err(Error::ParseKRange(whole.to_string())),
    }
}

/// `3`, `1..=3`, `1..4`, `1-3`, or a comma-separated mix; sorted, without
/// repeats.
pub fn parse_k_range(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::ParseKRange(s.to_string());
    let mut out = Vec::new();
    for item in s.split(',') {
        let (lo, hi) = if let Some((a, b)) = item.split_once("..=") {
            (parse_k(a, s)?, parse_k(b, s)?)
        } else if let Some((a, b)) = item.split_once("..") {
            let hi = parse_k(b, s)?.checked_sub(1).ok_or_else(bad)?;
            (parse_k(a, s)?, hi)
        } else if let Some((a, b)) = item.split_once('-') {
            (parse_k(a, s)?, parse_k(b, s)?)
        } else {
            let k = parse_k(item, s)?;
            (k, k)
        };
        if lo > hi {
            return Err(bad());
        }
        out.extend(lo..=hi);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
