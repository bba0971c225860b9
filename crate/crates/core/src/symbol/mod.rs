//! Steinberg symbols `{a,b}` and Dennis–Stein symbols `<a,b>` and their
//! formal integer combinations.

pub mod derive;
pub mod relation;
pub mod solver;
pub mod window;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Element, RingDescriptor};

pub use relation::{DerivationTrace, RelationInstance, Rule};
pub use window::{SymbolWindow, WindowKind};

/// A single generator. The constructors check that the arguments live in
/// one ring and satisfy the defining unit conditions, so every value of this
/// type names a genuine element of `K_2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolTerm {
    Steinberg(Element, Element),
    DennisStein(Element, Element),
}

fn same_ring(a: &Element, b: &Element) -> Result<()> {
    if a.ring() != b.ring() {
        return Err(Error::InvalidRing(format!("{a} and {b} lie in different rings")));
    }
    Ok(())
}

impl SymbolTerm {
    pub fn steinberg(a: &Element, b: &Element) -> Result<Self> {
        same_ring(a, b)?;
        for x in [a, b] {
            if !x.try_is_unit()? {
                return Err(Error::NotUnit(x.to_string(), x.ring().to_string()));
            }
        }
        Ok(SymbolTerm::Steinberg(a.clone(), b.clone()))
    }

    pub fn dennis_stein(a: &Element, b: &Element) -> Result<Self> {
        same_ring(a, b)?;
        let w = a.ring().one() + a * b;
        if !w.try_is_unit()? {
            return Err(Error::NotUnit(format!("1+({a})*({b})"), a.ring().to_string()));
        }
        Ok(SymbolTerm::DennisStein(a.clone(), b.clone()))
    }

    pub fn args(&self) -> (&Element, &Element) {
        match self {
            SymbolTerm::Steinberg(a, b) | SymbolTerm::DennisStein(a, b) => (a, b),
        }
    }

    pub fn ring(&self) -> &RingDescriptor {
        self.args().0.ring()
    }

    pub fn is_steinberg(&self) -> bool {
        matches!(self, SymbolTerm::Steinberg(..))
    }

    /// Symbols that vanish for purely formal reasons: `{1,b}`, `{a,1}`,
    /// `<a,0>` and `<0,b>`.
    pub fn is_trivial(&self) -> bool {
        match self {
            SymbolTerm::Steinberg(a, b) => a.is_one() || b.is_one(),
            SymbolTerm::DennisStein(a, b) => a.is_zero() || b.is_zero(),
        }
    }

    /// The same symbol read in another ring with a compatible representation.
    pub fn coerce(&self, ring: &RingDescriptor) -> Result<Self> {
        let (a, b) = self.args();
        let (a, b) = (ring.coerce(a)?, ring.coerce(b)?);
        match self {
            SymbolTerm::Steinberg(..) => Self::steinberg(&a, &b),
            SymbolTerm::DennisStein(..) => Self::dennis_stein(&a, &b),
        }
    }
}

impl fmt::Display for SymbolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolTerm::Steinberg(a, b) => write!(f, "{{{a},{b}}}"),
            SymbolTerm::DennisStein(a, b) => write!(f, "<{a},{b}>"),
        }
    }
}

impl fmt::Debug for SymbolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite integer combination of symbols.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolExpr {
    terms: BTreeMap<SymbolTerm, i64>,
}

impl SymbolExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(t: SymbolTerm) -> Self {
        let mut e = Self::zero();
        e.add_term(t, 1);
        e
    }

    pub fn steinberg(a: &Element, b: &Element) -> Result<Self> {
        Ok(Self::term(SymbolTerm::steinberg(a, b)?))
    }

    pub fn dennis_stein(a: &Element, b: &Element) -> Result<Self> {
        Ok(Self::term(SymbolTerm::dennis_stein(a, b)?))
    }

    pub fn add_term(&mut self, t: SymbolTerm, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(t) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, other: &SymbolExpr, k: i64) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * k);
        }
    }

    pub fn plus(mut self, other: &SymbolExpr) -> Self {
        self.add_scaled(other, 1);
        self
    }

    pub fn minus(mut self, other: &SymbolExpr) -> Self {
        self.add_scaled(other, -1);
        self
    }

    pub fn scaled(&self, k: i64) -> Self {
        let mut e = Self::zero();
        e.add_scaled(self, k);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymbolTerm, i64)> {
        self.terms.iter().map(|(t, c)| (t, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, t: &SymbolTerm) -> i64 {
        self.terms.get(t).copied().unwrap_or(0)
    }

    /// Every ring element occurring as a symbol argument.
    pub fn elements(&self) -> Vec<Element> {
        let mut out: Vec<Element> = self.terms.keys().flat_map(|t| [t.args().0.clone(), t.args().1.clone()]).collect();
        out.sort();
        out.dedup();
        out
    }

    /// The ring of the terms, if there are any.
    pub fn ring(&self) -> Option<&RingDescriptor> {
        self.terms.keys().next().map(|t| t.ring())
    }

    pub fn coerce(&self, ring: &RingDescriptor) -> Result<Self> {
        let mut e = Self::zero();
        for (t, c) in &self.terms {
            e.add_term(t.coerce(ring)?, *c);
        }
        Ok(e)
    }

    /// Parses `2*{3,5} - <x,1+x> + {2,x}` over `ring`.
    pub fn parse(ring: &RingDescriptor, src: &str) -> Result<Self> {
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        let mut e = Self::zero();
        let skip_ws = |i: &mut usize| {
            while *i < chars.len() && chars[*i].is_whitespace() {
                *i += 1;
            }
        };
        if src.trim() == "0" {
            return Ok(e);
        }
        let mut first = true;
        loop {
            skip_ws(&mut i);
            if i == chars.len() {
                break;
            }
            let mut sign = 1;
            if chars[i] == '+' || chars[i] == '-' {
                if chars[i] == '-' {
                    sign = -1;
                }
                i += 1;
                skip_ws(&mut i);
                if i == chars.len() {
                    return Err(Error::Parse("expression ends after an operator".into()));
                }
            } else if !first {
                return Err(Error::Parse(format!("expected + or - at position {i}")));
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let coef: i64 = if i > start {
                let c = chars[start..i].iter().collect::<String>().parse().map_err(|_| Error::Parse("coefficient too large".into()))?;
                skip_ws(&mut i);
                if i < chars.len() && chars[i] == '*' {
                    i += 1;
                    skip_ws(&mut i);
                }
                c
            } else {
                1
            };
            let (open, close) = match chars.get(i) {
                Some('{') => ('{', '}'),
                Some('<') => ('<', '>'),
                _ => return Err(Error::Parse(format!("expected {{ or < at position {i}"))),
            };
            i += 1;
            let mut depth = 0i32;
            let mut comma = None;
            let body_start = i;
            while i < chars.len() && !(depth == 0 && chars[i] == close) {
                match chars[i] {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 && comma.is_none() => comma = Some(i),
                    _ => {}
                }
                i += 1;
            }
            if i == chars.len() {
                return Err(Error::Parse(format!("unterminated symbol starting at position {}", body_start - 1)));
            }
            let comma = comma.ok_or_else(|| Error::Parse("a symbol needs two arguments".into()))?;
            let a: String = chars[body_start..comma].iter().collect();
            let b: String = chars[comma + 1..i].iter().collect();
            i += 1;
            let (a, b) = (ring.parse_element(&a)?, ring.parse_element(&b)?);
            let t = if open == '{' { SymbolTerm::steinberg(&a, &b)? } else { SymbolTerm::dennis_stein(&a, &b)? };
            e.add_term(t, sign * coef);
            first = false;
        }
        Ok(e)
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if k == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_check_units() {
        let f7 = RingDescriptor::prime_field(7).unwrap();
        assert!(SymbolTerm::steinberg(&f7.from_int(2), &f7.from_int(0)).is_err());
        let z4 = RingDescriptor::zmod(4).unwrap();
        // 1 + 2*2 = 5 = 1 in Z/4.
        assert!(SymbolTerm::dennis_stein(&z4.from_int(2), &z4.from_int(2)).is_ok());
        assert!(SymbolTerm::dennis_stein(&z4.from_int(1), &z4.from_int(1)).is_err());
        let r = RingDescriptor::parse("ratfunc:7:x").unwrap();
        let t = SymbolTerm::dennis_stein(&r.from_int(3), &r.var("x").unwrap()).unwrap();
        assert_eq!(t.to_string(), "<3,x>");
    }

    #[test]
    fn parse_and_print() {
        let r = RingDescriptor::parse("ratfunc:7:x@invert(x)").unwrap();
        let e = SymbolExpr::parse(&r, "2*{2,3} - 3*<x+1,x> + {2,3}").unwrap();
        assert_eq!(e.coefficient(&SymbolTerm::steinberg(&r.from_int(2), &r.from_int(3)).unwrap()), 3);
        let back = SymbolExpr::parse(&r, &e.to_string()).unwrap();
        assert_eq!(back, e);
        assert!(SymbolExpr::parse(&r, "{2,3} - {2,3}").unwrap().is_zero());
        assert!(SymbolExpr::parse(&r, "{2,0}").is_err());
        assert!(SymbolExpr::parse(&r, "{2,3").is_err());
    }
}
