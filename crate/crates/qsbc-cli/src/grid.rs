//! Flag-value parsing for parameter sweeps, and the per-point seed chain.

use anyhow::{anyhow, bail, Context, Result};
use qsbc::protocols::ProtocolId;

/// Parse a comma list of non-negative integers and inclusive `a..b` ranges:
/// `"1,2,5"`, `"1..6"`, `"1..3,8"`.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = token.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .context(format!("bad range start {lo:?}"))?;
            let hi: usize = hi.trim().parse().context(format!("bad range end {hi:?}"))?;
            if hi < lo {
                bail!("range {token:?} runs backwards");
            }
            out.extend(lo..=hi);
        } else {
            out.push(token.parse().context(format!("bad integer {token:?}"))?);
        }
    }
    if out.is_empty() {
        bail!("empty integer list");
    }
    Ok(out)
}

/// Parse one angle: a plain radian value (`0.785`) or a π token
/// (`pi`, `pi/4`, `3pi/8`, `0.5pi`).
fn parse_angle(token: &str) -> Result<f64> {
    let token = token.trim();
    if let Some(pos) = token.find("pi") {
        let (coeff, rest) = (&token[..pos], &token[pos + 2..]);
        let numerator: f64 = match coeff.trim() {
            "" => 1.0,
            "-" => -1.0,
            c => c.parse().context(format!("bad π coefficient {c:?}"))?,
        };
        let denominator: f64 = match rest.trim() {
            "" => 1.0,
            d => d
                .strip_prefix('/')
                .ok_or_else(|| anyhow!("expected /denominator after pi in {token:?}"))?
                .trim()
                .parse()
                .context(format!("bad π denominator in {token:?}"))?,
        };
        Ok(numerator * std::f64::consts::PI / denominator)
    } else {
        token.parse().context(format!("bad angle {token:?}"))
    }
}

/// Parse a comma list of angles; each item is a single angle or an
/// inclusive linspace `a..b:k` with `k` evenly spaced points.
pub fn parse_alpha_list(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some((range, count)) = token.rsplit_once(':') {
            let (lo, hi) = range
                .split_once("..")
                .ok_or_else(|| anyhow!("expected a..b:k in {token:?}"))?;
            let lo = parse_angle(lo)?;
            let hi = parse_angle(hi)?;
            let k: usize = count
                .trim()
                .parse()
                .context(format!("bad point count {count:?}"))?;
            match k {
                0 => bail!("range {token:?} asks for zero points"),
                1 => out.push(lo),
                _ => {
                    let step = (hi - lo) / (k - 1) as f64;
                    out.extend((0..k).map(|i| lo + step * i as f64));
                }
            }
        } else if token.contains("..") {
            bail!("angle range {token:?} needs a point count (a..b:k)");
        } else {
            out.push(parse_angle(token)?);
        }
    }
    if out.is_empty() {
        bail!("empty angle list");
    }
    Ok(out)
}

/// Parse a comma list of protocol ids.
pub fn parse_protocols(text: &str) -> Result<Vec<ProtocolId>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        out.push(token.parse::<ProtocolId>().map_err(|e| anyhow!(e))?);
    }
    if out.is_empty() {
        bail!("empty protocol list");
    }
    Ok(out)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-point seed: the grid point at `index` always gets the
/// same stream for a given master seed, independent of how many points run
/// or in what order.
pub fn child_seed(master: u64, index: usize) -> u64 {
    splitmix64(master ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
