//! Text and JSON forms of multivectors.
//!
//! Text: terms `coeff*e_{..}` joined by `+`/`-`, e.g. `1.0*e_1 + 2.0i*e_23`
//! or `(0.5-1.0i)*e_{1,10}`. A bare coefficient is a scalar term and a bare
//! blade has coefficient one. Blade indices written out of order pick up the
//! sign of the reordering, and repeated indices contract with the metric.
//!
//! JSON: `{"sig":[p,q],"terms":[{"blade":[1],"re":1.0,"im":0.0}]}`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::blade::{blade_product, BladeIndex};
use super::{Multivector, Signature};
use crate::error::{Error, Result};

fn fmt_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:?}", c.re)
    } else if c.re == 0.0 {
        format!("{:?}i", c.im)
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        format!("({:?}{sign}{:?}i)", c.re, c.im.abs())
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (blade, c)) in self.terms().enumerate() {
            // pull a leading minus out of purely real or purely imaginary terms
            let negate = (c.im == 0.0 && c.re < 0.0) || (c.re == 0.0 && c.im < 0.0);
            let shown = if negate { -c } else { c };
            match (k, negate) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if blade == BladeIndex::SCALAR {
                f.write_str(&fmt_coeff(shown))?;
            } else {
                write!(f, "{}*{blade}", fmt_coeff(shown))?;
            }
        }
        Ok(())
    }
}

fn split_terms(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            _ => {}
        }
        let exponent = i >= 2
            && matches!(chars[i - 1], 'e' | 'E')
            && (chars[i - 2].is_ascii_digit() || chars[i - 2] == '.');
        if (ch == '+' || ch == '-') && depth == 0 && !exponent && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    terms
}

fn parse_coeff(s: &str) -> Result<Complex64> {
    let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    inner.parse::<Complex64>().map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))
}

fn parse_blade(s: &str, sig: Signature) -> Result<(BladeIndex, i8)> {
    if s == "1" {
        return Ok((BladeIndex::SCALAR, 1));
    }
    let body = s.strip_prefix("e_").ok_or_else(|| Error::Parse(format!("bad blade `{s}`")))?;
    let indices: Vec<usize> = if let Some(list) = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')) {
        list.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index in `{s}`"))))
            .collect::<Result<_>>()?
    } else {
        body.chars()
            .map(|ch| ch.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Parse(format!("bad blade `{s}`"))))
            .collect::<Result<_>>()?
    };
    if indices.is_empty() {
        return Err(Error::Parse(format!("empty blade `{s}`")));
    }
    let mut acc = (BladeIndex::SCALAR, 1i8);
    for i in indices {
        if i == 0 || i > sig.n() {
            return Err(Error::Parse(format!("generator e_{i} out of range for {sig}")));
        }
        let (blade, sign) = blade_product(acc.0, BladeIndex::generator(i), sig);
        acc = (blade, acc.1 * sign);
    }
    Ok(acc)
}

fn parse_term(term: &str, sig: Signature) -> Result<(BladeIndex, Complex64)> {
    let (sign, rest) = match term.as_bytes().first() {
        Some(b'-') => (-1.0, &term[1..]),
        Some(b'+') => (1.0, &term[1..]),
        _ => (1.0, term),
    };
    if rest.is_empty() {
        return Err(Error::Parse(format!("empty term in `{term}`")));
    }
    let (coeff, blade) = match rest.rsplit_once('*') {
        Some((c, b)) => (parse_coeff(c)?, parse_blade(b, sig)?),
        None if rest.starts_with("e_") => (Complex64::new(1.0, 0.0), parse_blade(rest, sig)?),
        None => (parse_coeff(rest)?, (BladeIndex::SCALAR, 1)),
    };
    Ok((blade.0, coeff * sign * f64::from(blade.1)))
}

impl Multivector {
    /// Parse the text form described in the module docs.
    pub fn parse(s: &str, sig: Signature) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(Error::Parse("empty multivector".into()));
        }
        let terms = split_terms(trimmed)
            .iter()
            .map(|t| parse_term(t, sig))
            .collect::<Result<Vec<_>>>()?;
        Multivector::from_terms(sig, terms)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    blade: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MultivectorJson {
    sig: Signature,
    terms: Vec<TermJson>,
}

impl Serialize for Multivector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MultivectorJson {
            sig: self.signature(),
            terms: self
                .terms()
                .map(|(b, c)| TermJson { blade: b.indices(), re: c.re, im: c.im })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MultivectorJson::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let mut acc = (BladeIndex::SCALAR, 1i8);
            for &i in &t.blade {
                if i == 0 || i > raw.sig.n() {
                    return Err(D::Error::custom(format!("generator e_{i} out of range")));
                }
                let (blade, sign) = blade_product(acc.0, BladeIndex::generator(i), raw.sig);
                acc = (blade, acc.1 * sign);
            }
            terms.push((acc.0, Complex64::new(t.re, t.im) * f64::from(acc.1)));
        }
        Multivector::from_terms(raw.sig, terms).map_err(D::Error::custom)
    }
}
