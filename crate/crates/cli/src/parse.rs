//! Parsers for centre descriptions, exact radii and radius windows.

use std::str::FromStr;

use gasket::packing::{boundary_sq_floor, Variant};
use gasket::{apply_map, ExactPoint, LatticePoint, RadiusWindow, SimilarityMap, Surd, Word};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("cannot parse centre {0:?}: expected `barycentre`, `z<j>`, `f<word>(z<j>)` or `a/den,b/den`")]
    Centre(String),
    #[error("cannot parse radius {input:?}: {reason}")]
    Radius { input: String, reason: String },
    #[error("cannot parse window {0:?}: expected `centred`, `barycentric`, `packing`, `all` or `LO..HI`")]
    Window(String),
    #[error("{0}")]
    Point(String),
}

/// A rational number `num / den` with `den > 0`.
fn parse_rational(s: &str) -> Option<(i64, i64)> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?);
        return (d > 0).then_some((n, d));
    }
    decimal(s)
}

fn decimal(s: &str) -> Option<(i64, i64)> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let digits = format!("{int}{frac}");
    let num = if digits.is_empty() {
        0
    } else {
        digits.parse::<i64>().ok()?
    };
    Some((if neg { -num } else { num }, den))
}

/// Parses a centre at level `k`.
pub fn parse_centre(spec: &str, k: u32) -> Result<ExactPoint, ParseError> {
    let bad = || ParseError::Centre(spec.to_string());
    let point = |e: gasket::GasketError| ParseError::Point(e.to_string());
    let s: String = spec
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .collect();
    let lower = s.to_ascii_lowercase();
    match lower.as_str() {
        "barycentre" | "barycenter" | "xb" => return Ok(ExactPoint::barycentre(k)),
        _ => {}
    }
    if let Some(j) = lower.strip_prefix('z') {
        let j: u8 = j.parse().ok().filter(|j| *j <= 2).ok_or_else(bad)?;
        return Ok(LatticePoint::vertex(j, k).into());
    }
    if let Some(rest) = lower.strip_prefix('f') {
        let (word, arg) = rest.split_once('(').ok_or_else(bad)?;
        let arg = arg.strip_suffix(')').ok_or_else(bad)?;
        let j: u8 = arg
            .strip_prefix('z')
            .and_then(|j| j.parse().ok())
            .filter(|j| *j <= 2)
            .ok_or_else(bad)?;
        let word = Word::from_str(word).map_err(|_| bad())?;
        let len = word.len() as u32;
        if len >= k {
            return Err(ParseError::Point(format!(
                "f{word}(z{j}) needs a level above {len}, got {k}"
            )));
        }
        let base = LatticePoint::vertex(j, k - len);
        let p = apply_map(&SimilarityMap::Composite(word), &base).map_err(point)?;
        return Ok(p.into());
    }
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let (an, ad) = parse_rational(a).ok_or_else(bad)?;
    let (bn, bd) = parse_rational(b).ok_or_else(bad)?;
    let den = ad.checked_mul(bd).ok_or_else(bad)?;
    let a = an.checked_mul(bd).ok_or_else(bad)?;
    let b = bn.checked_mul(ad).ok_or_else(bad)?;
    let x = ExactPoint::new(k, a, b, den).map_err(point)?;
    let n = (1i64 << k) * x.den;
    if x.b < 0 || x.b > x.a || x.b > n - x.a {
        return Err(ParseError::Point(format!(
            "centre {spec:?} lies outside the triangle"
        )));
    }
    Ok(x)
}

/// One product term `c * sqrt(n)`, kept as `num / den` and radicand `n`.
struct Term {
    num: i64,
    den: i64,
    radicand: i64,
}

fn parse_factor(f: &str, t: &mut Term, divide: bool) -> Result<(), String> {
    let f = f.trim();
    let scale = |t: &mut Term, n: i64, d: i64| -> Result<(), String> {
        let (n, d) = if divide { (d, n) } else { (n, d) };
        if d == 0 {
            return Err("division by zero".into());
        }
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        t.num = t.num.checked_mul(n).ok_or("overflow")?;
        t.den = t.den.checked_mul(d).ok_or("overflow")?;
        Ok(())
    };
    if let Some(inner) = f.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        if divide {
            return Err("cannot divide by a square root".into());
        }
        if t.radicand != 1 {
            return Err("at most one square root per term".into());
        }
        let n: i64 = inner
            .trim()
            .parse()
            .map_err(|_| format!("bad radicand {inner:?}"))?;
        if n < 0 {
            return Err("negative radicand".into());
        }
        t.radicand = n;
        return Ok(());
    }
    if let Some(e) = f.strip_prefix("2^") {
        let e = e.trim_start_matches('(').trim_end_matches(')');
        let e: i32 = e.parse().map_err(|_| format!("bad exponent {e:?}"))?;
        if e.unsigned_abs() > 40 {
            return Err("exponent out of range".into());
        }
        let p = 1i64 << e.unsigned_abs();
        return if e >= 0 {
            scale(t, p, 1)
        } else {
            scale(t, 1, p)
        };
    }
    let (n, d) = decimal(f).ok_or_else(|| format!("bad number {f:?}"))?;
    scale(t, n, d)
}

fn parse_term(s: &str) -> Result<Surd, String> {
    let mut t = Term {
        num: 1,
        den: 1,
        radicand: 1,
    };
    let mut divide = false;
    let mut start = 0;
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' | '/' if depth == 0 => {
                parse_factor(&s[start..i], &mut t, divide)?;
                divide = c == '/';
                start = i + 1;
            }
            _ => {}
        }
    }
    parse_factor(&s[start..], &mut t, divide)?;
    Ok(if t.radicand == 1 {
        Surd::rational(t.num, t.den)
    } else {
        Surd::new(0, t.num, t.radicand, t.den)
    })
}

/// Parses an exact radius such as `sqrt(3)/8 + 2^-13`, `3/10` or `0.3108`.
pub fn parse_radius(input: &str) -> Result<Surd, ParseError> {
    let err = |reason: String| ParseError::Radius {
        input: input.to_string(),
        reason,
    };
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty expression".into()));
    }
    // split into signed terms at top-level `+` / `-` not following `^`
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let (mut start, mut depth, mut neg) = (0, 0, false);
    let bytes = s.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > 0 && bytes[i - 1] != b'^' => {
                terms.push((neg, &s[start..i]));
                neg = c == b'-';
                start = i + 1;
            }
            _ => {}
        }
    }
    terms.push((neg, &s[start..]));
    let mut total = Surd::zero();
    for (neg, t) in terms {
        let mut v = parse_term(t).map_err(err)?;
        if neg {
            v = v.mul_rational(-1, 1);
        }
        total = total
            .add(&v)
            .ok_or_else(|| err("terms with different square roots cannot be combined".into()))?;
    }
    if total.signum() == std::cmp::Ordering::Less {
        return Err(err("radius must be non-negative".into()));
    }
    Ok(total)
}

/// Parses a radius window for a profile centred at `centre`.
pub fn parse_window(
    spec: &str,
    centre: &ExactPoint,
    variant: Variant,
) -> Result<RadiusWindow, ParseError> {
    let k = centre.level;
    match spec.trim().to_ascii_lowercase().as_str() {
        "all" => return Ok(RadiusWindow::all()),
        "centred" | "centered" => return Ok(RadiusWindow::centred(k)),
        "barycentric" => return Ok(RadiusWindow::barycentric()),
        "packing" => {
            let hi = Surd::sqrt_over(boundary_sq_floor(centre) as i64, centre.scale());
            return Ok(RadiusWindow::closed(variant.radius_floor(k), hi));
        }
        _ => {}
    }
    let (lo, hi) = spec
        .split_once("..")
        .ok_or_else(|| ParseError::Window(spec.to_string()))?;
    let lo = parse_radius(lo)?;
    if hi.trim().is_empty() {
        return Ok(RadiusWindow::from(lo));
    }
    Ok(RadiusWindow::closed(lo, parse_radius(hi)?))
}
