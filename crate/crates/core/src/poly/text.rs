//! Line-oriented text format for normalized integer polynomials.
//!
//! ```text
//! # orthovar-poly v1
//! vars: y11 y12 y21 y22 s
//! 1 0 0 0 0 4
//! -2 1 0 0 0 3
//! ```
//!
//! One term per line, `<coefficient> <e1> ... <ek>`, in strictly descending
//! monomial order. Only normalized polynomials can be written or read.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Monomial, Polynomial, Ring};
use crate::error::{Error, Result};

pub const POLY_HEADER: &str = "# orthovar-poly v1";

impl Polynomial {
    pub fn to_text(&self) -> Result<String> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized("refusing to write an unnormalized polynomial".into()));
        }
        let mut out = String::with_capacity(32 * (self.num_terms() + 2));
        out.push_str(POLY_HEADER);
        out.push('\n');
        out.push_str("vars: ");
        out.push_str(&self.ring.names().join(" "));
        out.push('\n');
        for (m, c) in self.terms() {
            out.push_str(&c.numer().to_string());
            for e in m.exponents() {
                out.push(' ');
                out.push_str(&e.to_string());
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Parses a single block. A ring may be supplied to share the `Arc`.
    pub fn from_text(text: &str, ring: Option<&Arc<Ring>>) -> Result<Polynomial> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        parse_block(&lines, ring)
    }
}

fn parse_block(lines: &[(usize, &str)], ring: Option<&Arc<Ring>>) -> Result<Polynomial> {
    let mut it = lines.iter();
    let &(ln, header) = it.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    if header != POLY_HEADER {
        return Err(Error::parse(ln, format!("expected `{POLY_HEADER}`")));
    }
    let &(ln, vars) = it.next().ok_or_else(|| Error::parse(ln + 1, "missing vars line"))?;
    let names: Vec<&str> = vars
        .strip_prefix("vars:")
        .ok_or_else(|| Error::parse(ln, "expected `vars:`"))?
        .split_whitespace()
        .collect();
    let ring = match ring {
        Some(r) if r.names().iter().map(String::as_str).eq(names.iter().copied()) => r.clone(),
        Some(_) => return Err(Error::parse(ln, "variables differ from the expected ring")),
        None => Ring::new(names.iter().copied()),
    };
    let nv = ring.nvars();
    let mut terms = Vec::new();
    let mut prev: Option<Monomial> = None;
    for &(ln, line) in it {
        let mut fields = line.split_whitespace();
        let coeff: BigInt = fields
            .next()
            .ok_or_else(|| Error::parse(ln, "empty term"))?
            .parse()
            .map_err(|_| Error::parse(ln, "coefficient is not an integer"))?;
        let exps = fields
            .map(|f| f.parse::<u16>().map_err(|_| Error::parse(ln, "bad exponent")))
            .collect::<Result<Vec<u16>>>()?;
        if exps.len() != nv {
            return Err(Error::parse(ln, format!("expected {nv} exponents, got {}", exps.len())));
        }
        if coeff == BigInt::from(0) {
            return Err(Error::NotNormalized(format!("zero coefficient on line {ln}")));
        }
        let m = Monomial::new(exps);
        if let Some(p) = &prev {
            if m >= *p {
                return Err(Error::NotNormalized(format!("terms not strictly descending at line {ln}")));
            }
        }
        prev = Some(m.clone());
        terms.push((m, BigRational::from_integer(coeff)));
    }
    let p = Polynomial::from_terms(&ring, terms)?;
    if !p.is_normalized() {
        return Err(Error::NotNormalized("coefficients not coprime or leading coefficient negative".into()));
    }
    Ok(p)
}

/// Splits a file holding several polynomial blocks (each opened by the
/// poly header) and parses them. Lines before the first block are returned
/// verbatim as the preamble.
pub fn read_poly_blocks(text: &str) -> Result<(Vec<String>, Vec<Polynomial>)> {
    let mut preamble = Vec::new();
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line == POLY_HEADER {
            blocks.push(Vec::new());
        }
        match blocks.last_mut() {
            Some(b) => {
                if !line.is_empty() {
                    b.push((i + 1, line));
                }
            }
            None => {
                if !line.is_empty() {
                    preamble.push(line.to_string());
                }
            }
        }
    }
    let mut ring: Option<Arc<Ring>> = None;
    let mut polys = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let p = parse_block(b, ring.as_ref())?;
        ring.get_or_insert_with(|| p.ring().clone());
        polys.push(p);
    }
    Ok((preamble, polys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn round_trip() {
        let r = Ring::projective(3);
        let y11 = Polynomial::var(&r, 0);
        let s = Polynomial::var(&r, 4);
        let p = (&(&y11 * &s).scale(&rat(-3)) + &s.pow(2).scale(&rat(6))).normalized();
        let text = p.to_text().unwrap();
        assert!(text.starts_with("# orthovar-poly v1\nvars: y11 y12 y21 y22 s\n2 0 0 0 0 2\n-1 1 0 0 0 1\n"));
        assert_eq!(Polynomial::from_text(&text, None).unwrap(), p);
        assert_eq!(Polynomial::from_text(&text, Some(&r)).unwrap(), p);
    }

    #[test]
    fn rejects_unnormalized_files() {
        let base = "# orthovar-poly v1\nvars: a b\n";
        assert!(Polynomial::from_text(&format!("{base}2 1 0\n4 0 1\n"), None).is_err());
        assert!(Polynomial::from_text(&format!("{base}1 1 0\n1 0 1\n"), None).is_err());
        assert!(Polynomial::from_text(&format!("{base}-1 0 1\n1 1 0\n"), None).is_err());
        assert!(Polynomial::from_text(&format!("{base}1 0 1\n0 1 0\n"), None).is_err());
        assert!(Polynomial::from_text(&format!("{base}1 0 1 1\n"), None).is_err());
        assert!(Polynomial::from_text("vars: a\n", None).is_err());
        let ok = Polynomial::from_text(&format!("{base}1 0 1\n-1 1 0\n"), None).unwrap();
        assert_eq!(ok.num_terms(), 2);
        let zero = Polynomial::from_text(base, None).unwrap();
        assert!(zero.is_zero());
        let unnormal = Polynomial::var(&Ring::new(["a"]), 0).scale(&rat(2));
        assert!(unnormal.to_text().is_err());
    }

    #[test]
    fn multiple_blocks() {
        let r = Ring::new(["a", "b"]);
        let p = Polynomial::var(&r, 0);
        let q = Polynomial::var(&r, 1);
        let text = format!("# header\nn: 4\n{}{}", p.to_text().unwrap(), q.to_text().unwrap());
        let (pre, polys) = read_poly_blocks(&text).unwrap();
        assert_eq!(pre, vec!["# header".to_string(), "n: 4".to_string()]);
        assert_eq!(polys, vec![p, q]);
    }
}
