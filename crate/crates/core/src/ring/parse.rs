//! Ring-spec strings and arithmetic expressions.
//!
//! Ring specs: `zmod:<m>`, `fp:<p>`, `q`, `zloc:<p>`,
//! `ratfunc:<p>:<v1,v2,...>@invert(<e1,...>)` and `laurent(<base>,prec=<k>)`.
//! Expressions use `+ - * / ^`, parentheses, integer literals and the ring's
//! variables; `2x` is read as `2*x`.

use num_bigint::BigInt;

use super::laurent::LaurentSpec;
use super::ratfunc::{RatFunc, RatFuncSpec};
use super::{Element, RingDescriptor, RingKind, Value};
use crate::error::{Error, Result};

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("invalid {what} `{s}`")))
}

pub fn parse_ring(spec: &str) -> Result<RingDescriptor> {
    let spec = spec.trim();
    if spec == "q" {
        return Ok(RingDescriptor::rationals());
    }
    if let Some(rest) = spec.strip_prefix("zmod:") {
        return RingDescriptor::zmod(parse_u64(rest, "modulus")?);
    }
    if let Some(rest) = spec.strip_prefix("fp:") {
        return RingDescriptor::prime_field(parse_u64(rest, "prime")?);
    }
    if let Some(rest) = spec.strip_prefix("zloc:") {
        return RingDescriptor::local_int(parse_u64(rest, "prime")?);
    }
    if let Some(rest) = spec.strip_prefix("ratfunc:") {
        return Ok(RingDescriptor::ratfunc(parse_ratfunc_spec(rest)?));
    }
    if let Some(inner) = spec.strip_prefix("laurent(").and_then(|s| s.strip_suffix(')')) {
        let (base, prec) = inner
            .rsplit_once(",prec=")
            .ok_or_else(|| Error::Parse("expected laurent(<base>,prec=<k>)".into()))?;
        let base = match parse_ring(base)?.kind() {
            RingKind::RatFuncLocal(s) => s.clone(),
            _ => return Err(Error::InvalidRing("Laurent coefficients must be a ratfunc ring".into())),
        };
        let prec = u32::try_from(parse_u64(prec, "precision")?)
            .map_err(|_| Error::InvalidRing("precision too large".into()))?;
        return RingDescriptor::new(RingKind::TruncLaurent(LaurentSpec::new(base, prec)?));
    }
    Err(Error::Parse(format!("unrecognised ring spec `{spec}`")))
}

fn parse_ratfunc_spec(rest: &str) -> Result<RatFuncSpec> {
    let (head, inv) = match rest.split_once('@') {
        Some((h, tail)) => {
            let list = tail
                .trim()
                .strip_prefix("invert(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected @invert(...), found `@{tail}`")))?;
            (h, Some(list))
        }
        None => (rest, None),
    };
    let (p, vars) = head.split_once(':').ok_or_else(|| Error::Parse("expected ratfunc:<p>:<vars>".into()))?;
    let p = u32::try_from(parse_u64(p, "prime")?).map_err(|_| Error::InvalidRing("prime too large".into()))?;
    let vars: Vec<String> = vars.split(',').map(|v| v.trim().to_string()).collect();
    for v in &vars {
        let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::Parse(format!("invalid variable name `{v}`")));
        }
    }
    let plain = RatFuncSpec::new(p, vars.clone(), vec![])?;
    let mut inverted = Vec::new();
    if let Some(list) = inv {
        let ring = RingDescriptor::ratfunc(plain.clone());
        for e in list.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let x = parse_element(&ring, e)?;
            let f = x.as_ratfunc().unwrap();
            if !f.is_polynomial() {
                return Err(Error::InvalidRing(format!("inverted element `{e}` must be a polynomial")));
            }
            inverted.push(f.num().clone());
        }
    }
    RatFuncSpec::new(p, vars, inverted)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = cs[st..i].iter().collect();
            out.push(Tok::Num(lit.parse().unwrap()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    ring: &'a RingDescriptor,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in `{}`", self.src))
    }

    fn expr(&mut self) -> Result<Element> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Element> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.ambient_div(&d)?;
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                acc = acc * self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Element> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = match self.peek() {
            Some(Tok::Num(n)) => i64::try_from(n.clone()).map_err(|_| self.err("exponent too large"))?,
            _ => return Err(self.err("expected an integer exponent")),
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return Err(self.err("expected `)`"));
        }
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> Result<Element> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            let b = if e < 0 { self.ring.one().ambient_div(&base)? } else { base };
            let mut acc = self.ring.one();
            for _ in 0..e.unsigned_abs() {
                acc = acc * &b;
            }
            Ok(acc)
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Element> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.ring.from_bigint(&n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.ring.var(&name)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.err("unexpected end of expression or operator")),
        }
    }
}

/// Parses an expression, evaluating in the ambient fraction ring, and then
/// checks that the result belongs to `ring`.
pub fn parse_element(ring: &RingDescriptor, src: &str) -> Result<Element> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, ring, src };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    ring.element(e.value)
}

impl Element {
    /// Quotient in the ambient fraction ring without a membership check.
    pub(crate) fn ambient_div(&self, other: &Element) -> Result<Element> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = other.ambient_inv()?;
        Ok(&self.with(inv) * self)
    }
}

/// Builds a [`RatFunc`] value from an expression over the ring's variables,
/// ignoring membership (used for inverted-parameter lists and tests).
pub fn parse_ratfunc(ring: &RingDescriptor, src: &str) -> Result<RatFunc> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, ring, src };
    let e = p.expr()?;
    match e.value {
        Value::Frac(f) => Ok(f),
        _ => Err(Error::Parse("not a rational function".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_specs_round_trip() {
        for s in ["zmod:9", "fp:7", "q", "zloc:3", "ratfunc:7:x", "ratfunc:7:x,y@invert(x)", "laurent(ratfunc:7:s,prec=8)"] {
            assert_eq!(parse_ring(s).unwrap().to_string(), s);
        }
        assert_eq!(parse_ring("ratfunc:7:x,y@invert(2*x+2*y)").unwrap().to_string(), "ratfunc:7:x,y@invert(x+y)");
        assert!(parse_ring("zmod:1").is_err());
        assert!(parse_ring("fp:8").is_err());
        assert!(parse_ring("ratfunc:7:x@invert(x+1)").is_err());
        assert!(parse_ring("poly:7").is_err());
    }

    #[test]
    fn expressions() {
        let r = parse_ring("ratfunc:7:x@invert(x)").unwrap();
        let f = parse_element(&r, "(2*x^3+x^4)/(3+x)").unwrap();
        assert_eq!(f.to_string(), "(x^4+2*x^3)/(x+3)");
        assert_eq!(parse_element(&r, "x^-2*(1+x)").unwrap(), parse_element(&r, "(1+x)/x^2").unwrap());
        assert_eq!(parse_element(&r, "2x").unwrap(), parse_element(&r, "2*x").unwrap());
        let base = parse_ring("ratfunc:7:x").unwrap();
        assert!(matches!(parse_element(&base, "1/x"), Err(Error::NotMember(..))));
        assert_eq!(parse_element(&base, "x^2/x").unwrap().to_string(), "x");
        assert!(matches!(parse_element(&base, "1/(x-x)"), Err(Error::DivisionByZero)));
        assert!(matches!(parse_element(&base, "y"), Err(Error::Parse(_))));
    }

    #[test]
    fn rational_and_modular_literals() {
        let q = parse_ring("q").unwrap();
        assert_eq!(parse_element(&q, "4/6").unwrap().to_string(), "2/3");
        let z = parse_ring("zmod:7").unwrap();
        assert_eq!(parse_element(&z, "9").unwrap().to_string(), "2");
        assert_eq!(parse_element(&z, "2/3").unwrap().to_string(), "3");
        let z4 = parse_ring("zmod:4").unwrap();
        assert!(parse_element(&z4, "1/2").is_err());
    }

    #[test]
    fn laurent_literals() {
        let r = parse_ring("laurent(ratfunc:7:s,prec=6)").unwrap();
        let x = parse_element(&r, "s + s^2/t").unwrap();
        assert!(!x.is_unit());
        let y = parse_element(&r, "1 + s*t").unwrap();
        assert!(y.is_unit());
    }
}
