//! Truncated Laurent series `O((t)) / t^N` over `O = F_p[s]_(s)`.
//!
//! Every series carries an absolute precision: coefficients of `t^e` are
//! known for `e < prec` and unknown beyond. Arithmetic propagates precision
//! the usual way, and questions that depend on unknown coefficients are
//! answered with [`Error::PrecisionExhausted`].

use super::ratfunc::{RatFunc, RatFuncSpec};
use crate::error::{Error, Result};

pub const SERIES_VAR: &str = "t";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentSpec {
    /// One-variable ring localised at the origin; the coefficient ring `O`.
    pub base: RatFuncSpec,
    pub precision: u32,
}

impl LaurentSpec {
    pub fn new(base: RatFuncSpec, precision: u32) -> Result<Self> {
        if base.vars.len() != 1 || !base.inverted.is_empty() {
            return Err(Error::InvalidRing(
                "the coefficient ring of a Laurent ring must be a one-variable local ring".into(),
            ));
        }
        if base.vars[0] == SERIES_VAR {
            return Err(Error::InvalidRing(format!("`{SERIES_VAR}` is reserved for the series variable")));
        }
        if precision == 0 {
            return Err(Error::InvalidRing("precision must be at least 1".into()));
        }
        Ok(LaurentSpec { base, precision })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Laurent {
    offset: i64,
    coeffs: Vec<RatFunc>,
    prec: i64,
    p: u32,
}

impl Laurent {
    fn normalise(p: u32, mut offset: i64, mut coeffs: Vec<RatFunc>, prec: i64) -> Self {
        let keep = (prec - offset).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        while coeffs.last().is_some_and(RatFunc::is_zero) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        offset += lead as i64;
        if coeffs.is_empty() {
            offset = 0;
        }
        Laurent { offset, coeffs, prec, p }
    }

    pub fn constant(c: RatFunc, precision: u32) -> Self {
        Self::monomial(c, 0, precision)
    }

    pub fn monomial(c: RatFunc, e: i64, precision: u32) -> Self {
        let p = c.modulus();
        Self::normalise(p, e, vec![c], precision as i64)
    }

    pub fn from_coeffs(offset: i64, coeffs: Vec<RatFunc>, precision: u32) -> Self {
        let p = coeffs.first().map(RatFunc::modulus).expect("at least one coefficient");
        Self::normalise(p, offset, coeffs, precision as i64)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// No coefficient below the precision is non-zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.offset == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn valuation(&self) -> Result<i64> {
        if self.coeffs.is_empty() {
            Err(Error::PrecisionExhausted(format!("series vanishes modulo t^{}", self.prec)))
        } else {
            Ok(self.offset)
        }
    }

    pub fn coeff(&self, e: i64) -> Result<RatFunc> {
        if e >= self.prec {
            return Err(Error::PrecisionExhausted(format!("coefficient of t^{e} is beyond t^{}", self.prec)));
        }
        let i = e - self.offset;
        Ok(if i >= 0 && (i as usize) < self.coeffs.len() {
            self.coeffs[i as usize].clone()
        } else {
            RatFunc::constant(self.p, 0)
        })
    }

    /// Exponents carrying non-zero known coefficients, lowest first.
    pub fn support(&self) -> impl Iterator<Item = (i64, &RatFunc)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.offset + i as i64, c))
    }

    pub fn coefficients_in(&self, o: &RatFuncSpec) -> bool {
        self.coeffs.iter().all(|c| o.contains(c))
    }

    fn low(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.prec
        } else {
            self.offset
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        let lo = self.low().min(other.low());
        let len = (prec - lo).max(0) as usize;
        let mut out = vec![RatFunc::constant(self.p, 0); len];
        for x in [self, other] {
            for (i, c) in x.coeffs.iter().enumerate() {
                let k = x.offset + i as i64 - lo;
                if (k as usize) < len {
                    out[k as usize] = out[k as usize].add(c);
                }
            }
        }
        Self::normalise(self.p, lo, out, prec)
    }

    pub fn neg(&self) -> Self {
        Laurent { offset: self.offset, coeffs: self.coeffs.iter().map(RatFunc::neg).collect(), prec: self.prec, p: self.p }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self, cap: u32) -> Self {
        let (va, vb) = (self.low(), other.low());
        let prec = (va + other.prec).min(vb + self.prec).min(cap as i64);
        let lo = va + vb;
        let len = (prec - lo).max(0) as usize;
        let mut out = vec![RatFunc::constant(self.p, 0); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Self::normalise(self.p, lo, out, prec)
    }

    /// A series over a domain is a unit iff its lowest coefficient is.
    pub fn is_unit(&self, o: &RatFuncSpec) -> Result<bool> {
        self.valuation()?;
        Ok(o.is_unit(&self.coeffs[0]))
    }

    pub fn inv(&self, o: &RatFuncSpec, cap: u32) -> Result<Self> {
        let v = self.valuation()?;
        let a0 = &self.coeffs[0];
        if !o.is_unit(a0) {
            return Err(Error::NotUnit(self.render(&o.vars), "the truncated Laurent ring".into()));
        }
        let rel = self.prec - v;
        let prec = (-v + rel).min(cap as i64);
        let len = (prec + v).max(0) as usize;
        let inv0 = a0.inv().unwrap();
        let mut b: Vec<RatFunc> = Vec::with_capacity(len);
        for k in 0..len {
            if k == 0 {
                b.push(inv0.clone());
                continue;
            }
            let mut acc = RatFunc::constant(self.p, 0);
            for i in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                acc = acc.add(&self.coeffs[i].mul(&b[k - i]));
            }
            b.push(acc.mul(&inv0).neg());
        }
        Ok(Self::normalise(self.p, -v, b, prec))
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (e, c) in self.support() {
            let cs = c.render(names);
            let cs = if cs.contains(['+', '-', '/']) && e != 0 { format!("({cs})") } else { cs };
            parts.push(match (e, cs.as_str()) {
                (0, _) => cs,
                (1, "1") => SERIES_VAR.to_string(),
                (1, _) => format!("{cs}*{SERIES_VAR}"),
                (_, "1") => format!("{SERIES_VAR}^{e}"),
                _ => format!("{cs}*{SERIES_VAR}^{e}"),
            });
        }
        parts.push(format!("O({SERIES_VAR}^{})", self.prec));
        parts.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::super::poly::Poly;
    use super::*;

    fn o() -> RatFuncSpec {
        RatFuncSpec::new(7, vec!["s".into()], vec![]).unwrap()
    }
    fn s() -> RatFunc {
        RatFunc::from_poly(Poly::var(7, 0))
    }
    fn k(c: i64) -> RatFunc {
        RatFunc::constant(7, c)
    }

    #[test]
    fn inverse_of_one_plus_t() {
        let x = Laurent::from_coeffs(0, vec![k(1), k(1)], 6);
        let y = x.inv(&o(), 6).unwrap();
        let expect: Vec<RatFunc> = (0..6).map(|i| k(if i % 2 == 0 { 1 } else { -1 })).collect();
        assert_eq!(y, Laurent::from_coeffs(0, expect, 6));
        assert!(x.mul(&y, 6).is_one());
    }

    #[test]
    fn lowest_coefficient_decides_units() {
        // s + t^-1 has lowest coefficient 1: a unit.
        let a = Laurent::from_coeffs(-1, vec![k(1), s()], 6);
        assert!(a.is_unit(&o()).unwrap());
        // s*t^-1 + 1 has lowest coefficient s: not a unit.
        let b = Laurent::from_coeffs(-1, vec![s(), k(1)], 6);
        assert!(!b.is_unit(&o()).unwrap());
        assert!(b.inv(&o(), 6).is_err());
    }

    #[test]
    fn precision_loss_is_reported() {
        let t = Laurent::monomial(k(1), 1, 3);
        let z = t.mul(&t, 3).mul(&t, 3);
        assert!(z.is_zero());
        assert!(matches!(z.valuation(), Err(Error::PrecisionExhausted(_))));
        assert!(matches!(t.coeff(5), Err(Error::PrecisionExhausted(_))));
    }
}
