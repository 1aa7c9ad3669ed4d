//! Text formats: point files, line files and rational numbers.
//!
//! A point file holds one point per line as `x y`, where each coordinate is
//! a decimal (`-0.125`, `3`, `2.5e-3`) or a fraction `p/q`. A line file holds
//! one line per row as three integers `a b c`, meaning `a x + b y + c = 0`.
//! In both, `#` starts a comment and blank lines are skipped.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use sepline_core::{CanonicalLine, Point, PointSet, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line, message: message.into() }
    }
}

/// Parse a decimal or `p/q` number exactly.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = parse_integer(p).ok_or_else(|| format!("bad numerator in {s:?}"))?;
        let q: BigInt = parse_integer(q).ok_or_else(|| format!("bad denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s).ok_or_else(|| format!("not a number: {s:?}"))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.strip_prefix('+').unwrap_or(s).parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = exp.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    if scale.unsigned_abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10);
    let pow = |k: u32| -> BigInt { Pow::pow(&ten, k) };
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * pow(scale as u32))
    } else {
        Rational::new(digits, pow(scale.unsigned_abs()))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

/// `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Always `p/q`, with `q >= 1`.
pub fn format_fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

pub fn parse_points(text: &str) -> Result<Vec<Point>, ParseError> {
    content_lines(text)
        .map(|(line, fields)| {
            if fields.len() != 2 {
                return Err(ParseError::at(line, format!("expected 2 coordinates, found {}", fields.len())));
            }
            let x = parse_rational(fields[0]).map_err(|m| ParseError::at(line, m))?;
            let y = parse_rational(fields[1]).map_err(|m| ParseError::at(line, m))?;
            Ok(Point::new(x, y))
        })
        .collect()
}

pub fn parse_lines(text: &str) -> Result<Vec<CanonicalLine>, ParseError> {
    content_lines(text)
        .map(|(line, fields)| {
            if fields.len() != 3 {
                return Err(ParseError::at(line, format!("expected 3 coefficients, found {}", fields.len())));
            }
            let mut coef = Vec::with_capacity(3);
            for f in &fields {
                coef.push(parse_integer(f).ok_or_else(|| ParseError::at(line, format!("not an integer: {f:?}")))?);
            }
            let [a, b, c]: [BigInt; 3] = coef.try_into().expect("three fields");
            CanonicalLine::new(a, b, c).map_err(|e| ParseError::at(line, e.to_string()))
        })
        .collect()
}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path)
        .map_err(|e| ParseError::Io { path: path.display().to_string(), reason: e.to_string() })
}

pub fn read_points(path: &Path) -> Result<Vec<Point>, ParseError> {
    parse_points(&read(path)?)
}

pub fn read_lines(path: &Path) -> Result<Vec<CanonicalLine>, ParseError> {
    parse_lines(&read(path)?)
}

pub fn format_points(points: &[Point]) -> String {
    let mut out = String::new();
    for p in points {
        writeln!(out, "{} {}", format_rational(&p.x), format_rational(&p.y)).unwrap();
    }
    out
}

pub fn point_set_text(ps: &PointSet) -> String {
    format_points(&ps.points())
}

pub fn format_lines(lines: &[CanonicalLine]) -> String {
    let mut out = String::new();
    for l in lines {
        writeln!(out, "{} {} {}", l.a(), l.b(), l.c()).unwrap();
    }
    out
}
