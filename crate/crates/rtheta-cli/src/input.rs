//! Parsing of command-line values: `τ` strings, rationals and spec sources.

use num_rational::Rational64;
use rtheta::periodic::{catalog, PeriodicFunction};
use rtheta::theta::ThetaSpec;
use rtheta::Cx;
use std::path::Path;

use crate::CliError;

/// A real number written as a decimal (`0.25`, `-1e-3`) or a rational (`3/7`).
fn parse_real(prec: u32, s: &str) -> Option<Cx> {
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Cx::from_ratio(prec, p, q));
    }
    Cx::parse(prec, s, "0")
}

/// Parses `τ` in the forms `a+bi`, `a-bi`, `bi`, `i`, `-i`, `a` and the
/// rational forms `p/q+p'/q'i`, `1/2+i/3`.
pub fn parse_tau(prec: u32, raw: &str) -> Result<Cx, CliError> {
    let bad = || CliError::Config(format!("cannot parse τ = `{raw}`"));
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    // `…i/3` puts the denominator after the unit.
    let (body, denominator) = if let Some(pos) = s.find("i/") {
        (&s[..pos], Some(&s[pos + 2..]))
    } else if let Some(body) = s.strip_suffix('i') {
        (body, None)
    } else {
        return parse_real(prec, &s).ok_or_else(bad);
    };
    let split = body
        .char_indices()
        .filter(|&(k, c)| (c == '+' || c == '-') && k > 0 && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
        .map(|(k, _)| k)
        .last();
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { Cx::zero(prec) } else { parse_real(prec, re_part).ok_or_else(bad)? };
    let mut im = match im_part {
        "" | "+" => Cx::one(prec),
        "-" => -Cx::one(prec),
        t => parse_real(prec, t).ok_or_else(bad)?,
    };
    if let Some(den) = denominator {
        let d: i64 = den.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        im = im.div_i64(d);
    }
    Ok(&re + &im.mul_i())
}

pub fn parse_rational(raw: &str) -> Result<Rational64, CliError> {
    raw.trim()
        .parse::<Rational64>()
        .map_err(|_| CliError::Config(format!("cannot parse rational `{raw}`")))
}

/// Where the coefficient function comes from.
#[derive(Clone, Debug)]
pub enum SpecSource {
    Catalog(String),
    File(String),
}

impl SpecSource {
    pub fn label(&self) -> String {
        match self {
            SpecSource::Catalog(n) => format!("catalog:{n}"),
            SpecSource::File(p) => format!("file:{p}"),
        }
    }

    /// Loads `f` and the default `ν` (from the catalog, 0 for files).
    pub fn load(&self, prec: u32) -> Result<(u32, PeriodicFunction), CliError> {
        match self {
            SpecSource::Catalog(name) => catalog(name, prec).map_err(|e| CliError::Config(e.to_string())),
            SpecSource::File(path) => {
                let text = std::fs::read_to_string(Path::new(path))
                    .map_err(|e| CliError::Config(format!("reading {path}: {e}")))?;
                let f = PeriodicFunction::from_json_str(&text, prec).map_err(|e| CliError::Config(e.to_string()))?;
                Ok((0, f))
            }
        }
    }

    pub fn spec(&self, prec: u32, nu: Option<u32>) -> Result<ThetaSpec, CliError> {
        let (default_nu, f) = self.load(prec)?;
        Ok(ThetaSpec::new(nu.unwrap_or(default_nu), f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(z: &Cx, re: f64, im: f64) -> bool {
        (z - &Cx::from_f64(128, re, im)).abs_f64() < 1e-15
    }

    #[test]
    fn tau_forms() {
        let p = 128;
        assert!(close(&parse_tau(p, "i").unwrap(), 0.0, 1.0));
        assert!(close(&parse_tau(p, "-i").unwrap(), 0.0, -1.0));
        assert!(close(&parse_tau(p, "0.3+0.7i").unwrap(), 0.3, 0.7));
        assert!(close(&parse_tau(p, "0.5 - 2i").unwrap(), 0.5, -2.0));
        assert!(close(&parse_tau(p, "1/2+1/3i").unwrap(), 0.5, 1.0 / 3.0));
        assert!(close(&parse_tau(p, "1/2+i/3").unwrap(), 0.5, 1.0 / 3.0));
        assert!(close(&parse_tau(p, "2i").unwrap(), 0.0, 2.0));
        assert!(close(&parse_tau(p, "1e-1+1e-2i").unwrap(), 0.1, 0.01));
        assert!(close(&parse_tau(p, "-3").unwrap(), -3.0, 0.0));
        assert!(parse_tau(p, "x+i").is_err());
        assert!(parse_tau(p, "").is_err());
        assert!(parse_tau(p, "1/0+i").is_err());
    }

    #[test]
    fn exact_rational_parts() {
        let t = parse_tau(256, "1/3+1/3i").unwrap();
        assert!((&t - &Cx::from_ratio(256, 1, 3)).re.is_zero());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-1/3").unwrap(), Rational64::new(-1, 3));
        assert_eq!(parse_rational("2").unwrap(), Rational64::from_integer(2));
        assert!(parse_rational("1/x").is_err());
    }
}
